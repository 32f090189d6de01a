//! Types, type environments and structural subtyping.
//!
//! Both the surface language and KafKa share a single type former: a type is
//! either the dynamic type `any` or the name of a class. Subtyping is purely
//! structural over method signatures and uses the Amber rule for recursion:
//! while proving `C <: D` the pair is assumed, so cyclic obligations are
//! discharged by the assumption instead of looping.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A type: the dynamic type or a class name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Type {
    Any,
    Class(String),
}

impl Type {
    pub fn class(name: impl Into<String>) -> Type {
        Type::Class(name.into())
    }

    pub fn is_any(&self) -> bool {
        matches!(self, Type::Any)
    }

    pub fn class_name(&self) -> Option<&str> {
        match self {
            Type::Any => None,
            Type::Class(name) => Some(name),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Any => f.write_str("any"),
            Type::Class(name) => f.write_str(name),
        }
    }
}

/// The signature of a method as seen by subtyping: name, argument and
/// return type. Bodies and parameter names are irrelevant here.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MethodSig {
    pub name: String,
    pub param: Type,
    pub ret: Type,
}

impl MethodSig {
    /// Untyped methods take and return `any`.
    pub fn is_untyped(&self) -> bool {
        self.param.is_any() && self.ret.is_any()
    }
}

/// Anything that can answer "which methods does class `C` declare".
///
/// Implemented by the surface and the KafKa class tables so that one
/// subtyping algorithm serves both languages.
pub trait ClassSignatures {
    fn has_class(&self, name: &str) -> bool;

    /// Method signatures of `class`, or `None` when the class is unknown.
    fn method_sigs(&self, class: &str) -> Option<Vec<MethodSig>>;
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown class `{0}`")]
pub struct UnknownClass(pub String);

/// The assumption set `M` threaded through a subtype derivation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubtypeAssumptions {
    pairs: Vec<(String, String)>,
}

impl SubtypeAssumptions {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, sub: impl Into<String>, sup: impl Into<String>) -> Self {
        self.pairs.push((sub.into(), sup.into()));
        self
    }

    pub fn contains(&self, sub: &str, sup: &str) -> bool {
        self.pairs.iter().any(|(c, d)| c == sub && d == sup)
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Decides `assume ⊢ t1 <: t2` in `table`.
///
/// `Any <: Any` is an axiom; no rule relates `Any` to a class in either
/// direction. For classes, `C <: D` holds if the pair is assumed, or if,
/// assuming it, every method of `D` is matched by a same-named method of `C`
/// with a contravariant argument and a covariant result. Fields play no role.
pub fn subtype<T: ClassSignatures + ?Sized>(
    assume: &SubtypeAssumptions,
    table: &T,
    t1: &Type,
    t2: &Type,
) -> Result<bool, UnknownClass> {
    let mut search = Search::new(table);
    for (c, d) in &assume.pairs {
        search.stack.push((c.clone(), d.clone()));
    }
    search.types(t1, t2)
}

/// `subtype` with an empty assumption set.
pub fn is_subtype<T: ClassSignatures + ?Sized>(
    table: &T,
    t1: &Type,
    t2: &Type,
) -> Result<bool, UnknownClass> {
    Search::new(table).types(t1, t2)
}

/// Surface convertibility: subtyping, plus implicit conversion to and from
/// `any`. Not transitive.
pub fn convertible<T: ClassSignatures + ?Sized>(
    table: &T,
    from: &Type,
    to: &Type,
) -> Result<bool, UnknownClass> {
    for t in [from, to] {
        if let Type::Class(c) = t {
            if !table.has_class(c) {
                return Err(UnknownClass(c.clone()));
            }
        }
    }
    if from.is_any() || to.is_any() {
        return Ok(true);
    }
    is_subtype(table, from, to)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cached {
    Holds,
    Fails,
}

/// One top-level subtype query.
///
/// The stack is the assumption set `M`. A failure is memoised at once since
/// extra assumptions never turn a success into a failure. A success that
/// leaned on an assumption still on the stack is provisional: it is promoted
/// when that frame succeeds and dropped when any enclosing frame fails.
struct Search<'t, T: ?Sized> {
    table: &'t T,
    stack: Vec<(String, String)>,
    memo: HashMap<(String, String), Cached>,
    /// Provisional successes in creation order, with the stack depth of the
    /// lowest assumption each one used.
    pending: Vec<((String, String), usize)>,
    pending_index: HashMap<(String, String), usize>,
    sigs: HashMap<String, Rc<[MethodSig]>>,
}

impl<'t, T: ClassSignatures + ?Sized> Search<'t, T> {
    fn new(table: &'t T) -> Self {
        Search {
            table,
            stack: Vec::new(),
            memo: HashMap::new(),
            pending: Vec::new(),
            pending_index: HashMap::new(),
            sigs: HashMap::new(),
        }
    }

    fn types(&mut self, t1: &Type, t2: &Type) -> Result<bool, UnknownClass> {
        Ok(self.types_at(t1, t2)?.0)
    }

    /// Returns the result and the lowest stack depth of an assumption it used
    /// (`usize::MAX` when none was used).
    fn types_at(&mut self, t1: &Type, t2: &Type) -> Result<(bool, usize), UnknownClass> {
        match (t1, t2) {
            (Type::Any, Type::Any) => Ok((true, usize::MAX)),
            (Type::Class(c), Type::Class(d)) => self.classes(c, d),
            (Type::Class(c), Type::Any) | (Type::Any, Type::Class(c)) => {
                self.sigs_of(c)?;
                Ok((false, usize::MAX))
            }
        }
    }

    fn sigs_of(&mut self, class: &str) -> Result<Rc<[MethodSig]>, UnknownClass> {
        if let Some(sigs) = self.sigs.get(class) {
            return Ok(sigs.clone());
        }
        let sigs: Rc<[MethodSig]> =
            self.table.method_sigs(class).ok_or_else(|| UnknownClass(class.to_string()))?.into();
        self.sigs.insert(class.to_string(), sigs.clone());
        Ok(sigs)
    }

    fn classes(&mut self, c: &str, d: &str) -> Result<(bool, usize), UnknownClass> {
        let sub_sigs = self.sigs_of(c)?;
        let sup_sigs = self.sigs_of(d)?;
        if let Some(depth) = self.stack.iter().position(|(a, b)| a == c && b == d) {
            return Ok((true, depth));
        }
        let key = (c.to_string(), d.to_string());
        match self.memo.get(&key) {
            Some(Cached::Holds) => return Ok((true, usize::MAX)),
            Some(Cached::Fails) => return Ok((false, usize::MAX)),
            None => {}
        }
        if let Some(&depth) = self.pending_index.get(&key) {
            return Ok((true, depth));
        }

        let frame = self.stack.len();
        let mark = self.pending.len();
        self.stack.push(key.clone());
        let mut lowest = usize::MAX;
        let mut holds = true;
        'obligations: for wanted in sup_sigs.iter() {
            let mut matched = false;
            for offered in sub_sigs.iter().filter(|s| s.name == wanted.name) {
                let (arg_ok, arg_dep) = self.types_at(&wanted.param, &offered.param)?;
                if !arg_ok {
                    continue;
                }
                let (ret_ok, ret_dep) = self.types_at(&offered.ret, &wanted.ret)?;
                if !ret_ok {
                    continue;
                }
                lowest = lowest.min(arg_dep).min(ret_dep);
                matched = true;
                break;
            }
            if !matched {
                holds = false;
                break 'obligations;
            }
        }
        self.stack.pop();

        let settled: Vec<_> = self.pending.drain(mark..).collect();
        for (k, _) in &settled {
            self.pending_index.remove(k);
        }
        if !holds {
            self.memo.insert(key, Cached::Fails);
            return Ok((false, usize::MAX));
        }
        let result = if lowest >= frame {
            self.memo.insert(key, Cached::Holds);
            (true, usize::MAX)
        } else {
            self.provisional(key, lowest);
            (true, lowest)
        };
        // Entries that leaned on this frame now lean on whatever it did.
        for (k, depth) in settled {
            match (depth >= frame, lowest >= frame) {
                (true, true) => {
                    self.memo.insert(k, Cached::Holds);
                }
                (true, false) => self.provisional(k, lowest),
                (false, _) => self.provisional(k, depth),
            }
        }
        Ok(result)
    }

    fn provisional(&mut self, key: (String, String), depth: usize) {
        self.pending_index.insert(key.clone(), depth);
        self.pending.push((key, depth));
    }
}

/// A typing environment: variables (and `this`) to types.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeEnv {
    bindings: BTreeMap<String, Type>,
}

impl TypeEnv {
    pub const THIS: &'static str = "this";

    pub fn new() -> Self {
        Self::default()
    }

    /// The environment of a method body: `{x: param, this: C}`.
    pub fn for_method(class: &str, param: &str, param_type: &Type) -> Self {
        TypeEnv::new()
            .bind(TypeEnv::THIS, Type::class(class))
            .bind(param, param_type.clone())
    }

    pub fn bind(mut self, name: impl Into<String>, ty: Type) -> Self {
        self.bindings.insert(name.into(), ty);
        self
    }

    pub fn lookup(&self, name: &str) -> Option<&Type> {
        self.bindings.get(name)
    }

    pub fn this_type(&self) -> Option<&Type> {
        self.lookup(Self::THIS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Method = (&'static str, Type, Type);

    /// A tiny table: class name -> list of (method, param, ret).
    struct Table(Vec<(&'static str, Vec<Method>)>);

    impl ClassSignatures for Table {
        fn has_class(&self, name: &str) -> bool {
            self.0.iter().any(|(n, _)| *n == name)
        }

        fn method_sigs(&self, class: &str) -> Option<Vec<MethodSig>> {
            self.0.iter().find(|(n, _)| *n == class).map(|(_, ms)| {
                ms.iter()
                    .map(|(m, p, r)| MethodSig { name: m.to_string(), param: p.clone(), ret: r.clone() })
                    .collect()
            })
        }
    }

    fn c(name: &str) -> Type {
        Type::class(name)
    }

    fn l1() -> Table {
        Table(vec![
            ("A", vec![("m", c("A"), c("A"))]),
            ("I", vec![("n", c("I"), c("I"))]),
            ("T", vec![("s", c("I"), c("T")), ("t", Type::Any, Type::Any)]),
        ])
    }

    #[test]
    fn any_is_only_related_to_itself() {
        let t = l1();
        assert!(is_subtype(&t, &Type::Any, &Type::Any).unwrap());
        assert!(!is_subtype(&t, &c("A"), &Type::Any).unwrap());
        assert!(!is_subtype(&t, &Type::Any, &c("A")).unwrap());
    }

    #[test]
    fn unrelated_method_names_fail() {
        assert!(!is_subtype(&l1(), &c("A"), &c("I")).unwrap());
    }

    #[test]
    fn reflexive_through_assumption() {
        let t = l1();
        for name in ["A", "I", "T"] {
            assert!(is_subtype(&t, &c(name), &c(name)).unwrap());
        }
    }

    #[test]
    fn assumption_discharges_goal() {
        let t = l1();
        let m = SubtypeAssumptions::new().with("A", "I");
        assert!(subtype(&m, &t, &c("A"), &c("I")).unwrap());
    }

    #[test]
    fn unknown_class_is_an_error() {
        assert_eq!(is_subtype(&l1(), &c("Z"), &c("A")), Err(UnknownClass("Z".into())));
        assert_eq!(convertible(&l1(), &Type::Any, &c("Z")), Err(UnknownClass("Z".into())));
    }

    #[test]
    fn convertibility_is_not_transitive() {
        let t = l1();
        assert!(convertible(&t, &c("A"), &Type::Any).unwrap());
        assert!(convertible(&t, &Type::Any, &c("I")).unwrap());
        assert!(!convertible(&t, &c("A"), &c("I")).unwrap());
    }

    #[test]
    fn contravariant_arguments() {
        // Wide takes any object with `m`; Narrow insists on Self-typed args.
        let t = Table(vec![
            ("Empty", vec![]),
            ("Wide", vec![("m", c("Empty"), c("Empty"))]),
            ("Narrow", vec![("m", c("Wide"), c("Empty"))]),
        ]);
        // Wide <: Narrow: Wide <: Empty for the argument, Empty <: Empty for the result.
        assert!(is_subtype(&t, &c("Wide"), &c("Narrow")).unwrap());
        // Narrow <: Wide needs Empty <: Wide, which fails (Empty lacks m).
        assert!(!is_subtype(&t, &c("Narrow"), &c("Wide")).unwrap());
    }

    #[test]
    fn recursive_classes_terminate() {
        let t = Table(vec![
            ("List", vec![("next", Type::Any, c("List")), ("cons", c("List"), c("List"))]),
            ("Stream", vec![("next", Type::Any, c("Stream")), ("cons", c("Stream"), c("Stream"))]),
        ]);
        assert!(is_subtype(&t, &c("List"), &c("Stream")).unwrap());
        assert!(is_subtype(&t, &c("Stream"), &c("List")).unwrap());
    }
}
