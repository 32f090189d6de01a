//! The surface type system: syntax-directed, with convertibility at every
//! boundary where a value flows into a declared type.

use std::collections::HashSet;

use super::ast::{ClassDef, ClassTable, MethodDef, SurfaceExpr, SurfaceProgram};
use crate::error::{StaticTypeError, TypeErrorKind};
use crate::types::{convertible, Type, TypeEnv};

fn err(e: &SurfaceExpr, kind: TypeErrorKind) -> StaticTypeError {
    StaticTypeError::new(format!("in `{e}`"), kind)
}

fn require_convertible(
    table: &ClassTable,
    e: &SurfaceExpr,
    found: &Type,
    expected: &Type,
) -> Result<(), StaticTypeError> {
    match convertible(table, found, expected) {
        Ok(true) => Ok(()),
        Ok(false) => Err(err(e, TypeErrorKind::NotConvertible { found: found.clone(), expected: expected.clone() })),
        Err(unknown) => Err(err(e, unknown.into())),
    }
}

/// The class of `this`, required by field accesses.
fn self_class<'t>(env: &TypeEnv, table: &'t ClassTable, e: &SurfaceExpr) -> Result<&'t ClassDef, StaticTypeError> {
    match env.this_type() {
        None => Err(err(e, TypeErrorKind::NoSelf(e.to_string()))),
        Some(Type::Any) => Err(err(e, TypeErrorKind::SelfIsAny)),
        Some(Type::Class(c)) => table.get(c).ok_or_else(|| err(e, TypeErrorKind::UnknownClass(c.clone()))),
    }
}

/// Synthesises the unique type of `e` under `env`.
pub fn type_surface_expr(env: &TypeEnv, table: &ClassTable, e: &SurfaceExpr) -> Result<Type, StaticTypeError> {
    match e {
        SurfaceExpr::Var(x) => env
            .lookup(x)
            .cloned()
            .ok_or_else(|| err(e, TypeErrorKind::UnboundVariable(x.clone()))),
        SurfaceExpr::This => env
            .this_type()
            .cloned()
            .ok_or_else(|| err(e, TypeErrorKind::NoSelf("this".into()))),
        SurfaceExpr::FieldRead(f) => {
            let class = self_class(env, table, e)?;
            class.field(f).map(|fd| fd.ty.clone()).ok_or_else(|| {
                err(e, TypeErrorKind::UnknownField { class: class.name.clone(), field: f.clone() })
            })
        }
        SurfaceExpr::FieldWrite(f, value) => {
            let class = self_class(env, table, e)?;
            let field = class.field(f).ok_or_else(|| {
                err(e, TypeErrorKind::UnknownField { class: class.name.clone(), field: f.clone() })
            })?;
            let found = type_surface_expr(env, table, value)?;
            require_convertible(table, value, &found, &field.ty)?;
            Ok(field.ty.clone())
        }
        SurfaceExpr::Invoke { receiver, method, arg } => {
            let receiver_type = type_surface_expr(env, table, receiver)?;
            let arg_type = type_surface_expr(env, table, arg)?;
            match receiver_type {
                Type::Any => Ok(Type::Any),
                Type::Class(c) => {
                    let class = table.get(&c).ok_or_else(|| err(e, TypeErrorKind::UnknownClass(c.clone())))?;
                    let md = class.method(method).ok_or_else(|| {
                        err(e, TypeErrorKind::UnknownMethod { class: c.clone(), method: method.clone() })
                    })?;
                    require_convertible(table, arg, &arg_type, &md.param_type)?;
                    Ok(md.return_type.clone())
                }
            }
        }
        SurfaceExpr::New(c, args) => {
            let class = table.get(c).ok_or_else(|| err(e, TypeErrorKind::UnknownClass(c.clone())))?;
            if class.fields.len() != args.len() {
                return Err(err(
                    e,
                    TypeErrorKind::Arity { class: c.clone(), expected: class.fields.len(), found: args.len() },
                ));
            }
            for (field, arg) in class.fields.iter().zip(args) {
                let found = type_surface_expr(env, table, arg)?;
                require_convertible(table, arg, &found, &field.ty)?;
            }
            Ok(Type::class(c.clone()))
        }
    }
}

fn check_type_exists(table: &ClassTable, ty: &Type, what: &str) -> Result<(), StaticTypeError> {
    match ty {
        Type::Class(c) if table.get(c).is_none() => {
            Err(StaticTypeError::new(what.to_string(), TypeErrorKind::UnknownClass(c.clone())))
        }
        _ => Ok(()),
    }
}

fn check_method(table: &ClassTable, class: &ClassDef, md: &MethodDef) -> Vec<StaticTypeError> {
    let here = format!("{}.{} ({})", class.name, md.name, md.pos);
    let mut errors = Vec::new();
    for (ty, what) in [(&md.param_type, "parameter type"), (&md.return_type, "return type")] {
        if let Err(e) = check_type_exists(table, ty, what) {
            errors.push(e.within(&here));
        }
    }
    if !errors.is_empty() {
        return errors;
    }
    let env = TypeEnv::for_method(&class.name, &md.param, &md.param_type);
    match type_surface_expr(&env, table, &md.body) {
        Ok(found) => {
            if let Err(e) = require_convertible(table, &md.body, &found, &md.return_type) {
                errors.push(e.within(&here));
            }
        }
        Err(e) => errors.push(e.within(&here)),
    }
    errors
}

/// Checks every class of `table` (names, declared types, method bodies).
pub fn check_table(table: &ClassTable) -> Vec<StaticTypeError> {
    let mut errors = Vec::new();
    let mut seen = HashSet::new();
    for class in &table.classes {
        let here = format!("class {} ({})", class.name, class.pos);
        if !seen.insert(class.name.as_str()) {
            errors.push(StaticTypeError::new(here.clone(), TypeErrorKind::DuplicateClass(class.name.clone())));
        }
        let mut fields = HashSet::new();
        for field in &class.fields {
            if !fields.insert(field.name.as_str()) {
                errors.push(StaticTypeError::new(here.clone(), TypeErrorKind::DuplicateField(field.name.clone())));
            }
            if let Err(e) = check_type_exists(table, &field.ty, &format!("field `{}`", field.name)) {
                errors.push(e.within(&here));
            }
        }
        let mut methods = HashSet::new();
        for md in &class.methods {
            if !methods.insert(md.name.as_str()) {
                errors.push(StaticTypeError::new(here.clone(), TypeErrorKind::DuplicateMethod(md.name.clone())));
            }
            errors.extend(check_method(table, class, md));
        }
    }
    errors
}

/// Type-checks a whole program and returns the type of its main expression.
pub fn check_program(p: &SurfaceProgram) -> Result<Type, Vec<StaticTypeError>> {
    let mut errors = check_table(&p.table);
    let main = type_surface_expr(&TypeEnv::new(), &p.table, &p.main)
        .map_err(|e| e.within(format!("main ({})", p.main_pos)));
    match main {
        Ok(ty) if errors.is_empty() => Ok(ty),
        Ok(_) => Err(errors),
        Err(e) => {
            errors.push(e);
            Err(errors)
        }
    }
}
