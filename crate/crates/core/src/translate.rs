//! Type-driven translations from surface programs to KafKa, one per
//! gradual typing semantics.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::error::{StaticTypeError, TypeErrorKind};
use crate::kafka::{KafkaClassDef, KafkaClassTable, KafkaExpr, KafkaMethodDef, KafkaProgram};
use crate::surface::{check_program, type_surface_expr, ClassDef, ClassTable, FieldDef, SurfaceExpr, SurfaceProgram};
use crate::types::{is_subtype, Type, TypeEnv};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Optional,
    Transient,
    Behavioral,
    Concrete,
}

impl Semantics {
    pub const ALL: [Semantics; 4] = [Semantics::Optional, Semantics::Transient, Semantics::Behavioral, Semantics::Concrete];

    pub fn name(self) -> &'static str {
        match self {
            Semantics::Optional => "optional",
            Semantics::Transient => "transient",
            Semantics::Behavioral => "behavioral",
            Semantics::Concrete => "concrete",
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SemanticsError {
    /// Named but without translation rules.
    #[error("the {0} semantics has no translation")]
    Unsupported(String),
    #[error("unknown semantics `{0}` (expected optional, transient, behavioral, concrete or monotonic)")]
    Unknown(String),
}

impl FromStr for Semantics {
    type Err = SemanticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "monotonic" => Err(SemanticsError::Unsupported(s.to_string())),
            _ => Semantics::ALL
                .into_iter()
                .find(|sem| sem.name() == s)
                .ok_or_else(|| SemanticsError::Unknown(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("program is not well typed ({} error(s))", .0.len())]
    IllTyped(Vec<StaticTypeError>),
}

/// The type-agnostic translation: everything becomes dynamic.
fn erase(e: &SurfaceExpr) -> KafkaExpr {
    match e {
        SurfaceExpr::Var(x) => KafkaExpr::var(x.clone()),
        SurfaceExpr::This => KafkaExpr::sub_cast(Type::Any, KafkaExpr::This),
        SurfaceExpr::FieldRead(f) => KafkaExpr::read(f.clone()),
        SurfaceExpr::FieldWrite(f, v) => KafkaExpr::write(f.clone(), erase(v)),
        SurfaceExpr::New(c, args) => {
            KafkaExpr::sub_cast(Type::Any, KafkaExpr::new_object(c.clone(), args.iter().map(erase).collect()))
        }
        SurfaceExpr::Invoke { receiver, method, arg } => KafkaExpr::dyn_call(erase(receiver), method.clone(), erase(arg)),
    }
}

struct Translator<'a> {
    s: Semantics,
    table: &'a ClassTable,
}

impl Translator<'_> {
    fn type_of(&self, env: &TypeEnv, e: &SurfaceExpr) -> Result<Type, StaticTypeError> {
        type_surface_expr(env, self.table, e)
    }

    fn cast(&self, t: Type, e: KafkaExpr) -> KafkaExpr {
        match self.s {
            Semantics::Behavioral => KafkaExpr::beh_cast(t, e),
            _ => KafkaExpr::sub_cast(t, e),
        }
    }

    fn field_type(&self, class: &str, field: &str) -> Result<Type, StaticTypeError> {
        self.table.get(class).and_then(|c| c.field(field)).map(|f| f.ty.clone()).ok_or_else(|| {
            StaticTypeError::new(
                format!("field `{field}`"),
                TypeErrorKind::UnknownField { class: class.to_string(), field: field.to_string() },
            )
        })
    }

    fn self_class(&self, env: &TypeEnv, e: &SurfaceExpr) -> Result<String, StaticTypeError> {
        match env.this_type() {
            Some(Type::Class(c)) => Ok(c.clone()),
            _ => Err(StaticTypeError::new(format!("in `{e}`"), TypeErrorKind::NoSelf(e.to_string()))),
        }
    }

    fn synth(&self, env: &TypeEnv, e: &SurfaceExpr) -> Result<KafkaExpr, StaticTypeError> {
        if self.s == Semantics::Optional {
            return Ok(erase(e));
        }
        let transient = self.s == Semantics::Transient;
        Ok(match e {
            SurfaceExpr::Var(x) if transient => KafkaExpr::sub_cast(self.type_of(env, e)?, KafkaExpr::var(x.clone())),
            SurfaceExpr::Var(x) => KafkaExpr::var(x.clone()),
            SurfaceExpr::This => KafkaExpr::This,
            SurfaceExpr::FieldRead(f) if transient => {
                KafkaExpr::sub_cast(self.type_of(env, e)?, KafkaExpr::read(f.clone()))
            }
            SurfaceExpr::FieldRead(f) => KafkaExpr::read(f.clone()),
            SurfaceExpr::FieldWrite(f, v) => {
                let required = if transient { Type::Any } else { self.field_type(&self.self_class(env, e)?, f)? };
                KafkaExpr::write(f.clone(), self.assert(env, v, &required)?)
            }
            SurfaceExpr::New(c, args) => {
                let class = self.table.get(c).ok_or_else(|| {
                    StaticTypeError::new(format!("in `{e}`"), TypeErrorKind::UnknownClass(c.clone()))
                })?;
                let args = class
                    .fields
                    .iter()
                    .zip(args)
                    .map(|(field, arg)| {
                        let required = if transient { Type::Any } else { field.ty.clone() };
                        self.assert(env, arg, &required)
                    })
                    .collect::<Result<_, _>>()?;
                KafkaExpr::new_object(c.clone(), args)
            }
            SurfaceExpr::Invoke { receiver, method, arg } => {
                let receiver_type = self.type_of(env, receiver)?;
                let recv = self.synth(env, receiver)?;
                match receiver_type {
                    Type::Any => KafkaExpr::dyn_call(recv, method.clone(), self.assert(env, arg, &Type::Any)?),
                    Type::Class(c) => {
                        let md = self.table.get(&c).and_then(|class| class.method(method)).ok_or_else(|| {
                            StaticTypeError::new(
                                format!("in `{e}`"),
                                TypeErrorKind::UnknownMethod { class: c.clone(), method: method.clone() },
                            )
                        })?;
                        if transient {
                            let call = KafkaExpr::static_call(
                                recv,
                                method.clone(),
                                self.assert(env, arg, &Type::Any)?,
                                Type::Any,
                                Type::Any,
                            );
                            KafkaExpr::sub_cast(md.return_type.clone(), call)
                        } else {
                            KafkaExpr::static_call(
                                recv,
                                method.clone(),
                                self.assert(env, arg, &md.param_type)?,
                                md.param_type.clone(),
                                md.return_type.clone(),
                            )
                        }
                    }
                }
            }
        })
    }

    fn assert(&self, env: &TypeEnv, e: &SurfaceExpr, required: &Type) -> Result<KafkaExpr, StaticTypeError> {
        let found = self.type_of(env, e)?;
        let translated = self.synth(env, e)?;
        if self.s == Semantics::Optional {
            return Ok(translated);
        }
        let holds = is_subtype(self.table, &found, required)
            .map_err(|u| StaticTypeError::new(format!("in `{e}`"), u.into()))?;
        Ok(if holds { translated } else { self.cast(required.clone(), translated) })
    }

    fn class(&self, c: &ClassDef) -> Result<KafkaClassDef, StaticTypeError> {
        let any_fields = || c.fields.iter().map(|f| FieldDef::new(f.name.clone(), Type::Any)).collect();
        let mut methods = Vec::new();
        let mut guards = Vec::new();
        for m in &c.methods {
            let env = TypeEnv::for_method(&c.name, &m.param, &m.param_type);
            let within = |e: StaticTypeError| e.within(format!("{}.{}", c.name, m.name));
            match self.s {
                Semantics::Optional => {
                    methods.push(KafkaMethodDef::new(m.name.clone(), m.param.clone(), Type::Any, Type::Any, erase(&m.body)))
                }
                Semantics::Transient => {
                    let check = KafkaExpr::sub_cast(m.param_type.clone(), KafkaExpr::var(m.param.clone()));
                    let body = self.assert(&env, &m.body, &Type::Any).map_err(within)?;
                    methods.push(KafkaMethodDef::new(
                        m.name.clone(),
                        m.param.clone(),
                        Type::Any,
                        Type::Any,
                        KafkaExpr::seq(check, body),
                    ));
                }
                Semantics::Behavioral | Semantics::Concrete => {
                    let body = self.assert(&env, &m.body, &m.return_type).map_err(within)?;
                    methods.push(KafkaMethodDef::new(
                        m.name.clone(),
                        m.param.clone(),
                        m.param_type.clone(),
                        m.return_type.clone(),
                        body,
                    ));
                    if self.s == Semantics::Concrete && !m.param_type.is_any() {
                        guards.push(concrete_guard(&m.name, &m.param_type, &m.return_type));
                    }
                }
            }
        }
        methods.extend(guards);
        let fields = match self.s {
            Semantics::Optional | Semantics::Transient => any_fields(),
            Semantics::Behavioral | Semantics::Concrete => c.fields.clone(),
        };
        Ok(KafkaClassDef::new(c.name.clone(), fields, methods))
    }
}

/// `m(x:any):any { <any> this.m(<t1>x){t1->t2} }`
fn concrete_guard(name: &str, t1: &Type, t2: &Type) -> KafkaMethodDef {
    let call = KafkaExpr::static_call(
        KafkaExpr::This,
        name,
        KafkaExpr::sub_cast(t1.clone(), KafkaExpr::var("x")),
        t1.clone(),
        t2.clone(),
    );
    KafkaMethodDef::new(name, "x", Type::Any, Type::Any, KafkaExpr::sub_cast(Type::Any, call))
}

pub fn translate_class(s: Semantics, table: &ClassTable, c: &ClassDef) -> Result<KafkaClassDef, StaticTypeError> {
    Translator { s, table }.class(c)
}

/// Translation of `e` when no particular type is required of it.
pub fn synth_expr(s: Semantics, env: &TypeEnv, table: &ClassTable, e: &SurfaceExpr) -> Result<KafkaExpr, StaticTypeError> {
    Translator { s, table }.synth(env, e)
}

/// Translation of `e` where a `required` is expected; inserts the
/// semantics' cast unless the type of `e` is already a subtype.
pub fn assert_expr(
    s: Semantics,
    env: &TypeEnv,
    table: &ClassTable,
    e: &SurfaceExpr,
    required: &Type,
) -> Result<KafkaExpr, StaticTypeError> {
    Translator { s, table }.assert(env, e, required)
}

/// Type-checks and translates a whole program.
pub fn translate_program(s: Semantics, p: &SurfaceProgram) -> Result<KafkaProgram, TranslateError> {
    check_program(p).map_err(TranslateError::IllTyped)?;
    let tr = Translator { s, table: &p.table };
    let one = |e: StaticTypeError| TranslateError::IllTyped(vec![e]);
    let classes = p.table.classes.iter().map(|c| tr.class(c)).collect::<Result<Vec<_>, _>>().map_err(one)?;
    let table = KafkaClassTable::from_classes(classes).map_err(|d| {
        one(StaticTypeError::new(String::new(), TypeErrorKind::DuplicateClass(d.0)))
    })?;
    let main = tr.synth(&TypeEnv::new(), &p.main).map_err(one)?;
    Ok(KafkaProgram { table, main })
}
