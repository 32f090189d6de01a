use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::surface::FieldDef;
use crate::types::{ClassSignatures, MethodSig, Type};

/// A heap address.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Addr(pub u32);

impl fmt::Display for Addr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Name of the field through which a generated wrapper reaches the object
/// it wraps.
pub const THAT: &str = "that";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KafkaExpr {
    Var(String),
    This,
    /// `this.that`, only produced inside generated wrapper classes.
    That,
    FieldRead(String),
    FieldWrite(String, Box<KafkaExpr>),
    New(String, Vec<KafkaExpr>),
    /// `e.m(e'){t->t'}`
    StaticCall {
        receiver: Box<KafkaExpr>,
        method: String,
        arg: Box<KafkaExpr>,
        arg_type: Type,
        ret_type: Type,
    },
    /// `e@m(e')`
    DynCall {
        receiver: Box<KafkaExpr>,
        method: String,
        arg: Box<KafkaExpr>,
    },
    /// `<t>e`
    SubCast(Type, Box<KafkaExpr>),
    /// `<<t>>e`
    BehCast(Type, Box<KafkaExpr>),
    /// `e ; e'`
    Seq(Box<KafkaExpr>, Box<KafkaExpr>),
    Addr(Addr),
    AddrFieldRead(Addr, String),
    AddrFieldWrite(Addr, String, Box<KafkaExpr>),
}

impl KafkaExpr {
    pub fn var(name: impl Into<String>) -> Self {
        KafkaExpr::Var(name.into())
    }

    pub fn read(field: impl Into<String>) -> Self {
        KafkaExpr::FieldRead(field.into())
    }

    pub fn write(field: impl Into<String>, value: KafkaExpr) -> Self {
        KafkaExpr::FieldWrite(field.into(), Box::new(value))
    }

    pub fn new_object(class: impl Into<String>, args: Vec<KafkaExpr>) -> Self {
        KafkaExpr::New(class.into(), args)
    }

    pub fn static_call(
        receiver: KafkaExpr,
        method: impl Into<String>,
        arg: KafkaExpr,
        arg_type: Type,
        ret_type: Type,
    ) -> Self {
        KafkaExpr::StaticCall {
            receiver: Box::new(receiver),
            method: method.into(),
            arg: Box::new(arg),
            arg_type,
            ret_type,
        }
    }

    pub fn dyn_call(receiver: KafkaExpr, method: impl Into<String>, arg: KafkaExpr) -> Self {
        KafkaExpr::DynCall { receiver: Box::new(receiver), method: method.into(), arg: Box::new(arg) }
    }

    pub fn sub_cast(target: Type, body: KafkaExpr) -> Self {
        KafkaExpr::SubCast(target, Box::new(body))
    }

    pub fn beh_cast(target: Type, body: KafkaExpr) -> Self {
        KafkaExpr::BehCast(target, Box::new(body))
    }

    pub fn seq(first: KafkaExpr, second: KafkaExpr) -> Self {
        KafkaExpr::Seq(Box::new(first), Box::new(second))
    }

    pub fn as_value(&self) -> Option<Addr> {
        match self {
            KafkaExpr::Addr(a) => Some(*a),
            _ => None,
        }
    }

    pub fn is_value(&self) -> bool {
        matches!(self, KafkaExpr::Addr(_))
    }

    /// Substitutes `receiver` for `this` (including field accesses through
    /// it) and `arg` for the variable `param`.
    pub fn substitute(&self, receiver: Addr, param: &str, arg: Addr) -> KafkaExpr {
        let go = |e: &KafkaExpr| Box::new(e.substitute(receiver, param, arg));
        match self {
            KafkaExpr::Var(x) if x == param => KafkaExpr::Addr(arg),
            KafkaExpr::Var(_) | KafkaExpr::Addr(_) | KafkaExpr::AddrFieldRead(..) => self.clone(),
            KafkaExpr::This => KafkaExpr::Addr(receiver),
            KafkaExpr::That => KafkaExpr::AddrFieldRead(receiver, THAT.to_string()),
            KafkaExpr::FieldRead(f) => KafkaExpr::AddrFieldRead(receiver, f.clone()),
            KafkaExpr::FieldWrite(f, v) => KafkaExpr::AddrFieldWrite(receiver, f.clone(), go(v)),
            KafkaExpr::AddrFieldWrite(a, f, v) => KafkaExpr::AddrFieldWrite(*a, f.clone(), go(v)),
            KafkaExpr::New(c, args) => {
                KafkaExpr::New(c.clone(), args.iter().map(|a| a.substitute(receiver, param, arg)).collect())
            }
            KafkaExpr::StaticCall { receiver: r, method, arg: a, arg_type, ret_type } => KafkaExpr::StaticCall {
                receiver: go(r),
                method: method.clone(),
                arg: go(a),
                arg_type: arg_type.clone(),
                ret_type: ret_type.clone(),
            },
            KafkaExpr::DynCall { receiver: r, method, arg: a } => {
                KafkaExpr::DynCall { receiver: go(r), method: method.clone(), arg: go(a) }
            }
            KafkaExpr::SubCast(t, b) => KafkaExpr::SubCast(t.clone(), go(b)),
            KafkaExpr::BehCast(t, b) => KafkaExpr::BehCast(t.clone(), go(b)),
            KafkaExpr::Seq(a, b) => KafkaExpr::Seq(go(a), go(b)),
        }
    }

    /// Visits this expression and all of its subexpressions, pre-order.
    pub fn walk(&self, visit: &mut impl FnMut(&KafkaExpr)) {
        visit(self);
        match self {
            KafkaExpr::Var(_)
            | KafkaExpr::This
            | KafkaExpr::That
            | KafkaExpr::FieldRead(_)
            | KafkaExpr::Addr(_)
            | KafkaExpr::AddrFieldRead(..) => {}
            KafkaExpr::FieldWrite(_, v) | KafkaExpr::AddrFieldWrite(_, _, v) => v.walk(visit),
            KafkaExpr::New(_, args) => args.iter().for_each(|a| a.walk(visit)),
            KafkaExpr::StaticCall { receiver, arg, .. } | KafkaExpr::DynCall { receiver, arg, .. } => {
                receiver.walk(visit);
                arg.walk(visit);
            }
            KafkaExpr::SubCast(_, b) | KafkaExpr::BehCast(_, b) => b.walk(visit),
            KafkaExpr::Seq(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KafkaMethodDef {
    pub name: String,
    pub param: String,
    pub param_type: Type,
    pub return_type: Type,
    pub body: KafkaExpr,
}

impl KafkaMethodDef {
    pub fn new(
        name: impl Into<String>,
        param: impl Into<String>,
        param_type: Type,
        return_type: Type,
        body: KafkaExpr,
    ) -> Self {
        KafkaMethodDef { name: name.into(), param: param.into(), param_type, return_type, body }
    }

    pub fn sig(&self) -> MethodSig {
        MethodSig { name: self.name.clone(), param: self.param_type.clone(), ret: self.return_type.clone() }
    }

    pub fn is_untyped(&self) -> bool {
        self.param_type.is_any() && self.return_type.is_any()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KafkaClassDef {
    pub name: String,
    pub fields: Vec<FieldDef>,
    pub methods: Vec<KafkaMethodDef>,
}

impl KafkaClassDef {
    pub fn new(name: impl Into<String>, fields: Vec<FieldDef>, methods: Vec<KafkaMethodDef>) -> Self {
        KafkaClassDef { name: name.into(), fields, methods }
    }

    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f.name == name)
    }

    pub fn field(&self, name: &str) -> Option<&FieldDef> {
        self.fields.iter().find(|f| f.name == name)
    }

    /// All definitions of `name` (at most one typed and one untyped in a
    /// well-formed class).
    pub fn methods_named<'a: 'n, 'n>(&'a self, name: &'n str) -> impl Iterator<Item = &'a KafkaMethodDef> + 'n {
        self.methods.iter().filter(move |m| m.name == name)
    }

    /// The definition of `name` with exactly this signature.
    pub fn method_with_sig(&self, name: &str, param: &Type, ret: &Type) -> Option<&KafkaMethodDef> {
        self.methods_named(name).find(|m| m.param_type == *param && m.return_type == *ret)
    }

    /// The untyped `name(x:any):any`, the only target of a dynamic call.
    pub fn untyped_method(&self, name: &str) -> Option<&KafkaMethodDef> {
        self.method_with_sig(name, &Type::Any, &Type::Any)
    }
}

/// Returned when a class name is already taken.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("class `{0}` is already defined")]
pub struct DuplicateClass(pub String);

/// An ordered, append-only class table.
#[derive(Clone, Debug, Default)]
pub struct KafkaClassTable {
    classes: Vec<KafkaClassDef>,
    index: HashMap<String, usize>,
}

impl KafkaClassTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_classes(classes: Vec<KafkaClassDef>) -> Result<Self, DuplicateClass> {
        let mut table = KafkaClassTable::new();
        for class in classes {
            table.push(class)?;
        }
        Ok(table)
    }

    pub fn push(&mut self, class: KafkaClassDef) -> Result<(), DuplicateClass> {
        if self.index.contains_key(&class.name) {
            return Err(DuplicateClass(class.name));
        }
        self.index.insert(class.name.clone(), self.classes.len());
        self.classes.push(class);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&KafkaClassDef> {
        self.index.get(name).map(|&i| &self.classes[i])
    }

    pub fn classes(&self) -> &[KafkaClassDef] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

impl PartialEq for KafkaClassTable {
    fn eq(&self, other: &Self) -> bool {
        self.classes == other.classes
    }
}

impl Eq for KafkaClassTable {}

impl ClassSignatures for KafkaClassTable {
    fn has_class(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    fn method_sigs(&self, class: &str) -> Option<Vec<MethodSig>> {
        self.get(class).map(|c| c.methods.iter().map(KafkaMethodDef::sig).collect())
    }
}

/// A class table together with the expression to evaluate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KafkaProgram {
    pub table: KafkaClassTable,
    pub main: KafkaExpr,
}
