//! Static semantics of KafKa: expression typing, class and state
//! well-formedness.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap, HashSet};

use super::ast::{Addr, KafkaClassDef, KafkaClassTable, KafkaExpr, THAT};
use crate::error::{StaticTypeError, TypeErrorKind};
use crate::types::{is_subtype, Type, TypeEnv};
use crate::vm::Heap;

/// Maps each allocated address to the class of the object stored there.
pub type HeapTyping = BTreeMap<Addr, String>;

pub fn heap_typing_of(heap: &Heap) -> HeapTyping {
    heap.iter().map(|(a, obj)| (a, obj.class.clone())).collect()
}

struct Checker<'a> {
    env: &'a TypeEnv,
    heap: &'a HeapTyping,
    table: &'a KafkaClassTable,
    /// Subtyping answers for class pairs; the table is fixed while checking.
    subtypes: RefCell<HashMap<(String, String), bool>>,
}

fn err(e: &KafkaExpr, kind: TypeErrorKind) -> StaticTypeError {
    StaticTypeError::new(format!("in `{e}`"), kind)
}

impl<'a> Checker<'a> {
    fn new(env: &'a TypeEnv, heap: &'a HeapTyping, table: &'a KafkaClassTable) -> Self {
        Checker { env, heap, table, subtypes: RefCell::default() }
    }

    fn subtype(&self, e: &KafkaExpr, sub: &str, sup: &str) -> Result<bool, StaticTypeError> {
        let key = (sub.to_string(), sup.to_string());
        if let Some(&known) = self.subtypes.borrow().get(&key) {
            return Ok(known);
        }
        let holds = is_subtype(self.table, &Type::class(sub), &Type::class(sup)).map_err(|u| err(e, u.into()))?;
        self.subtypes.borrow_mut().insert(key, holds);
        Ok(holds)
    }

    fn class(&self, e: &KafkaExpr, name: &str) -> Result<&KafkaClassDef, StaticTypeError> {
        self.table.get(name).ok_or_else(|| err(e, TypeErrorKind::UnknownClass(name.to_string())))
    }

    fn type_exists(&self, e: &KafkaExpr, t: &Type) -> Result<(), StaticTypeError> {
        match t {
            Type::Class(c) => self.class(e, c).map(|_| ()),
            Type::Any => Ok(()),
        }
    }

    fn field_type(&self, e: &KafkaExpr, class: &str, field: &str) -> Result<Type, StaticTypeError> {
        let def = self.class(e, class)?;
        def.field(field).map(|f| f.ty.clone()).ok_or_else(|| {
            err(e, TypeErrorKind::UnknownField { class: class.to_string(), field: field.to_string() })
        })
    }

    fn self_class(&self, e: &KafkaExpr) -> Result<String, StaticTypeError> {
        match self.env.this_type() {
            None => Err(err(e, TypeErrorKind::NoSelf(e.to_string()))),
            Some(Type::Any) => Err(err(e, TypeErrorKind::SelfIsAny)),
            Some(Type::Class(c)) => Ok(c.clone()),
        }
    }

    fn addr_class(&self, e: &KafkaExpr, a: Addr) -> Result<String, StaticTypeError> {
        self.heap.get(&a).cloned().ok_or_else(|| err(e, TypeErrorKind::DanglingAddress(a.0)))
    }

    /// Checks `e` where a value of type `expected` is demanded. Any accepts
    /// only Any or an address; a class accepts any subtype.
    fn check(&self, e: &KafkaExpr, expected: &Type) -> Result<(), StaticTypeError> {
        if let (Type::Any, KafkaExpr::Addr(a)) = (expected, e) {
            return self.addr_class(e, *a).map(|_| ());
        }
        let found = self.synth(e)?;
        let ok = match (&found, expected) {
            (Type::Any, Type::Any) => true,
            (Type::Class(a), Type::Class(b)) => self.subtype(e, a, b)?,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(err(e, TypeErrorKind::NotSubtype { found, expected: expected.clone() }))
        }
    }

    fn synth(&self, e: &KafkaExpr) -> Result<Type, StaticTypeError> {
        match e {
            KafkaExpr::Var(x) => {
                self.env.lookup(x).cloned().ok_or_else(|| err(e, TypeErrorKind::UnboundVariable(x.clone())))
            }
            KafkaExpr::This => {
                self.env.this_type().cloned().ok_or_else(|| err(e, TypeErrorKind::NoSelf("this".into())))
            }
            KafkaExpr::That => {
                let c = self.self_class(e)?;
                self.field_type(e, &c, THAT)
            }
            KafkaExpr::FieldRead(f) => {
                let c = self.self_class(e)?;
                self.field_type(e, &c, f)
            }
            KafkaExpr::FieldWrite(f, v) => {
                let c = self.self_class(e)?;
                let t = self.field_type(e, &c, f)?;
                self.check(v, &t)?;
                Ok(t)
            }
            KafkaExpr::AddrFieldRead(a, f) => {
                let c = self.addr_class(e, *a)?;
                self.field_type(e, &c, f)
            }
            KafkaExpr::AddrFieldWrite(a, f, v) => {
                let c = self.addr_class(e, *a)?;
                let t = self.field_type(e, &c, f)?;
                self.check(v, &t)?;
                Ok(t)
            }
            KafkaExpr::New(c, args) => {
                let class = self.class(e, c)?;
                if class.fields.len() != args.len() {
                    return Err(err(
                        e,
                        TypeErrorKind::Arity { class: c.clone(), expected: class.fields.len(), found: args.len() },
                    ));
                }
                for (field, arg) in class.fields.iter().zip(args) {
                    self.check(arg, &field.ty)?;
                }
                Ok(Type::class(c.clone()))
            }
            KafkaExpr::StaticCall { receiver, method, arg, arg_type, ret_type } => {
                self.type_exists(e, arg_type)?;
                self.type_exists(e, ret_type)?;
                let d = match self.synth(receiver)? {
                    Type::Any => return Err(err(e, TypeErrorKind::StaticCallOnAny)),
                    Type::Class(d) => d,
                };
                if !self.has_signature_above(e, &d, method, arg_type, ret_type)? {
                    return Err(err(
                        e,
                        TypeErrorKind::NoSuchSignature {
                            class: d,
                            method: method.clone(),
                            param: arg_type.clone(),
                            ret: ret_type.clone(),
                        },
                    ));
                }
                self.check(arg, arg_type)?;
                Ok(ret_type.clone())
            }
            KafkaExpr::DynCall { receiver, arg, .. } => {
                self.check(receiver, &Type::Any)
                    .map_err(|_| err(e, TypeErrorKind::DynamicNotAny("receiver")))?;
                self.check(arg, &Type::Any).map_err(|_| err(e, TypeErrorKind::DynamicNotAny("argument")))?;
                Ok(Type::Any)
            }
            KafkaExpr::SubCast(t, body) | KafkaExpr::BehCast(t, body) => {
                self.type_exists(e, t)?;
                self.synth(body)?;
                Ok(t.clone())
            }
            KafkaExpr::Seq(first, second) => {
                self.synth(first)?;
                self.synth(second)
            }
            KafkaExpr::Addr(a) => self.addr_class(e, *a).map(Type::Class),
        }
    }

    /// Whether the receiver class `d`, viewed at itself or any supertype,
    /// declares `method` with exactly the annotated signature.
    fn has_signature_above(
        &self,
        e: &KafkaExpr,
        d: &str,
        method: &str,
        param: &Type,
        ret: &Type,
    ) -> Result<bool, StaticTypeError> {
        let own = self.class(e, d)?;
        if own.method_with_sig(method, param, ret).is_some() {
            return Ok(true);
        }
        for c in self.table.classes() {
            if c.name != d && c.method_with_sig(method, param, ret).is_some() && self.subtype(e, d, &c.name)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Synthesises the type of `e`. An address synthesises its heap class; use
/// [`check_kafka_expr`] for positions that demand `any`.
pub fn type_kafka_expr(
    env: &TypeEnv,
    heap_typing: &HeapTyping,
    table: &KafkaClassTable,
    e: &KafkaExpr,
) -> Result<Type, StaticTypeError> {
    Checker::new(env, heap_typing, table).synth(e)
}

pub fn check_kafka_expr(
    env: &TypeEnv,
    heap_typing: &HeapTyping,
    table: &KafkaClassTable,
    e: &KafkaExpr,
    expected: &Type,
) -> Result<(), StaticTypeError> {
    Checker::new(env, heap_typing, table).check(e, expected)
}

pub fn well_formed_class(table: &KafkaClassTable, c: &KafkaClassDef) -> Vec<StaticTypeError> {
    let here = format!("class {}", c.name);
    let mut errors = Vec::new();
    let unknown = |t: &Type| match t {
        Type::Class(n) if table.get(n).is_none() => Some(TypeErrorKind::UnknownClass(n.clone())),
        _ => None,
    };

    let mut fields = HashSet::new();
    for f in &c.fields {
        if !fields.insert(f.name.as_str()) {
            errors.push(StaticTypeError::new(here.clone(), TypeErrorKind::DuplicateField(f.name.clone())));
        }
        if let Some(kind) = unknown(&f.ty) {
            errors.push(StaticTypeError::new(format!("{here}, field {}", f.name), kind));
        }
    }

    let mut typed = HashSet::new();
    let mut untyped = HashSet::new();
    for m in &c.methods {
        let (seen, flavor) = if m.is_untyped() { (&mut untyped, "untyped") } else { (&mut typed, "typed") };
        if !seen.insert(m.name.as_str()) {
            errors.push(StaticTypeError::new(
                here.clone(),
                TypeErrorKind::Overloading { method: m.name.clone(), flavor },
            ));
        }
    }

    let heap = HeapTyping::new();
    for m in &c.methods {
        let at = format!("{}.{}({}):{}", c.name, m.name, m.param_type, m.return_type);
        let bad: Vec<_> = [&m.param_type, &m.return_type].into_iter().filter_map(unknown).collect();
        if !bad.is_empty() {
            errors.extend(bad.into_iter().map(|k| StaticTypeError::new(at.clone(), k)));
            continue;
        }
        let env = TypeEnv::for_method(&c.name, &m.param, &m.param_type);
        if let Err(e) = check_kafka_expr(&env, &heap, table, &m.body, &m.return_type) {
            errors.push(e.within(&at));
        }
    }
    errors
}

pub fn well_formed_table(table: &KafkaClassTable) -> Vec<StaticTypeError> {
    table.classes().iter().flat_map(|c| well_formed_class(table, c)).collect()
}

/// Well-formedness of a machine state: the table, every heap object, and the
/// expression under the heap's typing.
pub fn well_formed_state(table: &KafkaClassTable, e: &KafkaExpr, heap: &Heap) -> Vec<StaticTypeError> {
    let mut errors = well_formed_table(table);
    errors.extend(well_formed_heap_and_expr(table, e, heap));
    errors
}

/// The part of [`well_formed_state`] that does not re-check the class table.
pub fn well_formed_heap_and_expr(table: &KafkaClassTable, e: &KafkaExpr, heap: &Heap) -> Vec<StaticTypeError> {
    let mut errors = well_formed_heap(table, heap);
    let typing = heap_typing_of(heap);
    if let Err(err) = type_kafka_expr(&TypeEnv::new(), &typing, table, e) {
        errors.push(err.within("expression"));
    }
    errors
}

/// Every object's class exists, its field count matches and each field value
/// is a live address whose class is a subtype of the declared field type.
pub fn well_formed_heap(table: &KafkaClassTable, heap: &Heap) -> Vec<StaticTypeError> {
    let mut errors = Vec::new();
    let typing = heap_typing_of(heap);
    let env = TypeEnv::new();
    let checker = Checker::new(&env, &typing, table);
    for (a, obj) in heap.iter() {
        let here = || format!("heap {a}");
        let Some(class) = table.get(&obj.class) else {
            errors.push(StaticTypeError::new(here(), TypeErrorKind::UnknownClass(obj.class.clone())));
            continue;
        };
        if class.fields.len() != obj.fields.len() {
            errors.push(StaticTypeError::new(
                here(),
                TypeErrorKind::FieldCount {
                    addr: a.0,
                    class: obj.class.clone(),
                    expected: class.fields.len(),
                    found: obj.fields.len(),
                },
            ));
            continue;
        }
        for (field, value) in class.fields.iter().zip(&obj.fields) {
            let Some(value_class) = typing.get(value) else {
                errors.push(StaticTypeError::new(here(), TypeErrorKind::DanglingAddress(value.0)));
                continue;
            };
            let Type::Class(expected) = &field.ty else { continue };
            if !checker.subtype(&KafkaExpr::Addr(*value), value_class, expected).unwrap_or(false) {
                let found = Type::class(value_class.clone());
                errors.push(StaticTypeError::new(
                    here(),
                    TypeErrorKind::FieldValue { addr: a.0, field: field.name.clone(), found, expected: field.ty.clone() },
                ));
            }
        }
    }
    errors
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kafka::ast::KafkaMethodDef;
    use crate::surface::FieldDef;

    fn int() -> Type {
        Type::class("Int")
    }

    /// `C` with a typed `m(Int):Int` and an untyped `m`, plus a stand-in Int.
    fn overloaded() -> KafkaClassTable {
        let int_class = KafkaClassDef::new("Int", vec![], vec![]);
        let c = KafkaClassDef::new(
            "C",
            vec![],
            vec![
                KafkaMethodDef::new("m", "x", int(), int(), KafkaExpr::var("x")),
                KafkaMethodDef::new("m", "x", Type::Any, Type::Any, KafkaExpr::var("x")),
            ],
        );
        KafkaClassTable::from_classes(vec![int_class, c]).unwrap()
    }

    fn synth(table: &KafkaClassTable, env: &TypeEnv, e: &KafkaExpr) -> Result<Type, StaticTypeError> {
        type_kafka_expr(env, &HeapTyping::new(), table, e)
    }

    #[test]
    fn static_call_on_overloaded_class() {
        let k = overloaded();
        let e = KafkaExpr::static_call(
            KafkaExpr::new_object("C", vec![]),
            "m",
            KafkaExpr::new_object("Int", vec![]),
            int(),
            int(),
        );
        assert_eq!(synth(&k, &TypeEnv::new(), &e).unwrap(), int());
    }

    #[test]
    fn dyn_call_needs_any_receiver() {
        let k = overloaded();
        let env = TypeEnv::new().bind("x", Type::Any);
        let typed = KafkaExpr::dyn_call(KafkaExpr::new_object("C", vec![]), "m", KafkaExpr::var("x"));
        let e = synth(&k, &env, &typed).unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::DynamicNotAny("receiver"));
        let erased = KafkaExpr::dyn_call(
            KafkaExpr::sub_cast(Type::Any, KafkaExpr::new_object("C", vec![])),
            "m",
            KafkaExpr::var("x"),
        );
        assert_eq!(synth(&k, &env, &erased).unwrap(), Type::Any);
    }

    #[test]
    fn cast_to_any() {
        let k = overloaded();
        let e = KafkaExpr::sub_cast(Type::Any, KafkaExpr::new_object("Int", vec![]));
        assert_eq!(synth(&k, &TypeEnv::new(), &e).unwrap(), Type::Any);
    }

    #[test]
    fn unannotated_signature_is_rejected() {
        let k = overloaded();
        let e = KafkaExpr::static_call(
            KafkaExpr::new_object("C", vec![]),
            "m",
            KafkaExpr::new_object("Int", vec![]),
            int(),
            Type::Any,
        );
        assert!(matches!(synth(&k, &TypeEnv::new(), &e).unwrap_err().kind, TypeErrorKind::NoSuchSignature { .. }));
    }

    #[test]
    fn overloading_restriction() {
        let k = overloaded();
        assert!(well_formed_table(&k).is_empty());
        let bad = KafkaClassDef::new(
            "B",
            vec![],
            vec![
                KafkaMethodDef::new("m", "x", int(), int(), KafkaExpr::var("x")),
                KafkaMethodDef::new("m", "x", int(), Type::Any, KafkaExpr::sub_cast(Type::Any, KafkaExpr::var("x"))),
            ],
        );
        let errors = well_formed_class(&k, &bad);
        assert_eq!(errors.len(), 1);
        assert!(matches!(errors[0].kind, TypeErrorKind::Overloading { flavor: "typed", .. }));
    }

    #[test]
    fn method_body_is_checked() {
        let k = overloaded();
        let c = KafkaClassDef::new("D", vec![], vec![KafkaMethodDef::new("m", "x", Type::Any, int(), KafkaExpr::var("x"))]);
        let errors = well_formed_class(&k, &c);
        assert!(matches!(errors[0].kind, TypeErrorKind::NotSubtype { .. }));
    }

    #[test]
    fn state_checks_heap() {
        let k = overloaded();
        let mut heap = Heap::new();
        let a = heap.alloc("Missing", vec![]);
        let errors = well_formed_state(&k, &KafkaExpr::Addr(a), &heap);
        assert!(errors.iter().any(|e| e.kind == TypeErrorKind::UnknownClass("Missing".into())));

        let errors = well_formed_state(&k, &KafkaExpr::Addr(Addr(42)), &Heap::new());
        assert_eq!(errors[0].kind, TypeErrorKind::DanglingAddress(42));
    }

    #[test]
    fn address_checks_at_any_and_at_class() {
        let k = KafkaClassTable::from_classes(vec![KafkaClassDef::new(
            "P",
            vec![FieldDef::new("f", Type::Any), FieldDef::new("g", Type::class("P"))],
            vec![],
        )])
        .unwrap();
        let mut heap = Heap::new();
        let a = heap.alloc("P", vec![]);
        heap.replace(a, vec![a, a]);
        let e = KafkaExpr::new_object("P", vec![KafkaExpr::Addr(a), KafkaExpr::Addr(a)]);
        assert!(well_formed_state(&k, &e, &heap).is_empty());
        assert_eq!(heap_typing_of(&heap).get(&a).map(String::as_str), Some("P"));
    }
}
