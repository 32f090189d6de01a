use std::fmt;

use thiserror::Error;

use crate::types::{Type, UnknownClass};

/// Why a term or a definition was rejected by one of the static checkers.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeErrorKind {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("class `{class}` has no field `{field}`")]
    UnknownField { class: String, field: String },
    #[error("class `{class}` has no method `{method}`")]
    UnknownMethod { class: String, method: String },
    #[error("`{found}` is not convertible to `{expected}`")]
    NotConvertible { found: Type, expected: Type },
    #[error("`{found}` is not a subtype of `{expected}`")]
    NotSubtype { found: Type, expected: Type },
    #[error("`new {class}` expects {expected} argument(s), found {found}")]
    Arity { class: String, expected: usize, found: usize },
    #[error("`{0}` is only meaningful inside a class")]
    NoSelf(String),
    #[error("field access on `this` of type `any`")]
    SelfIsAny,
    #[error("static call receiver has type `any`")]
    StaticCallOnAny,
    #[error("no class above `{class}` declares `{method}({param}):{ret}`")]
    NoSuchSignature { class: String, method: String, param: Type, ret: Type },
    #[error("dynamic call {0} must have type `any`")]
    DynamicNotAny(&'static str),
    #[error("duplicate class `{0}`")]
    DuplicateClass(String),
    #[error("duplicate field `{0}`")]
    DuplicateField(String),
    #[error("duplicate method `{0}`")]
    DuplicateMethod(String),
    #[error("method `{method}` has more than one {flavor} definition")]
    Overloading { method: String, flavor: &'static str },
    #[error("address #{0} is not bound in the heap")]
    DanglingAddress(u32),
    #[error("object #{addr} of class `{class}` has {found} field(s), its class declares {expected}")]
    FieldCount { addr: u32, class: String, expected: usize, found: usize },
    #[error("field `{field}` of object #{addr} holds a `{found}`, declared `{expected}`")]
    FieldValue { addr: u32, field: String, found: Type, expected: Type },
}

impl From<UnknownClass> for TypeErrorKind {
    fn from(err: UnknownClass) -> Self {
        TypeErrorKind::UnknownClass(err.0)
    }
}

/// A static error with a human-readable location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaticTypeError {
    pub location: String,
    pub kind: TypeErrorKind,
}

impl StaticTypeError {
    pub fn new(location: impl Into<String>, kind: TypeErrorKind) -> Self {
        StaticTypeError { location: location.into(), kind }
    }

    /// Prefixes the location with an outer context, e.g. the enclosing method.
    pub fn within(mut self, outer: impl fmt::Display) -> Self {
        self.location = if self.location.is_empty() {
            outer.to_string()
        } else {
            format!("{outer}: {}", self.location)
        };
        self
    }
}

impl fmt::Display for StaticTypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.location.is_empty() {
            write!(f, "{}", self.kind)
        } else {
            write!(f, "{}: {}", self.location, self.kind)
        }
    }
}

impl std::error::Error for StaticTypeError {}
