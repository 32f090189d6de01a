use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::heap::Heap;
use crate::kafka::{Addr, KafkaClassDef, KafkaClassTable, KafkaExpr, KafkaMethodDef, THAT};
use crate::surface::FieldDef;
use crate::types::{is_subtype, Type, UnknownClass};

pub const DEFAULT_FUEL: u64 = 100_000;

/// The three ways a well-typed program may legitimately get stuck.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum StuckKind {
    NoSuchMethodDynamic,
    SubtypeCastFailure,
    BehavioralCastFailure,
}

impl fmt::Display for StuckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Value(Addr),
    Stuck { kind: StuckKind, location: String },
    FuelExhausted,
}

impl Outcome {
    /// `value`, `stuck` or `fuel`.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Outcome::Value(_) => "value",
            Outcome::Stuck { .. } => "stuck",
            Outcome::FuelExhausted => "fuel",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Value(a) => write!(f, "value {a}"),
            Outcome::Stuck { kind, location } => write!(f, "stuck: {kind} at `{location}`"),
            Outcome::FuelExhausted => f.write_str("fuel exhausted"),
        }
    }
}

/// Failures that a well-formed state can never produce. Seeing one means
/// the program was ill-typed or the implementation is unsound.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum VmError {
    #[error("cannot evaluate open term `{0}`")]
    OpenTerm(String),
    #[error("address {0} is not bound")]
    DanglingAddress(Addr),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("object {addr} of class `{class}` has no field `{field}`")]
    UnknownField { addr: Addr, class: String, field: String },
    #[error("`new {class}` with {found} argument(s), {expected} field(s) declared")]
    Arity { class: String, expected: usize, found: usize },
    #[error("class `{class}` has no method `{method}` applicable at {param}->{ret}")]
    NoApplicableMethod { class: String, method: String, param: Type, ret: Type },
}

impl From<UnknownClass> for VmError {
    fn from(e: UnknownClass) -> Self {
        VmError::UnknownClass(e.0)
    }
}

/// The result of a single [`Machine::step`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Reduced,
    /// The expression is already a value; nothing was done.
    Value(Addr),
    /// No rule applies to `redex`; the state is left unchanged.
    Stuck { kind: StuckKind, redex: KafkaExpr },
}

/// One line of a JSONL execution trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum TraceRecord {
    Step { step: u64, redex: String, heap: usize, classes: usize },
    Final {
        result: &'static str,
        #[serde(skip_serializing_if = "Option::is_none")]
        kind: Option<StuckKind>,
        #[serde(skip_serializing_if = "Option::is_none")]
        at: Option<String>,
    },
}

impl TraceRecord {
    fn last(outcome: &Outcome) -> Self {
        match outcome {
            Outcome::Stuck { kind, location } => {
                TraceRecord::Final { result: "stuck", kind: Some(*kind), at: Some(location.clone()) }
            }
            other => TraceRecord::Final { result: other.kind_name(), kind: None, at: None },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace records always serialise")
    }
}

/// `K e σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineState {
    pub table: KafkaClassTable,
    pub expr: KafkaExpr,
    pub heap: Heap,
}

#[derive(Clone, Debug)]
pub struct Machine {
    pub state: MachineState,
    wrappers: u32,
}

enum Focus {
    Value,
    Open,
    Redex,
    Child(usize),
}

fn focus(e: &KafkaExpr) -> Focus {
    let first_open = |es: &[&KafkaExpr]| es.iter().position(|e| !e.is_value());
    match e {
        KafkaExpr::Addr(_) => Focus::Value,
        KafkaExpr::Var(_) | KafkaExpr::This | KafkaExpr::That | KafkaExpr::FieldRead(_) | KafkaExpr::FieldWrite(..) => {
            Focus::Open
        }
        KafkaExpr::New(_, args) => args.iter().position(|a| !a.is_value()).map_or(Focus::Redex, Focus::Child),
        KafkaExpr::StaticCall { receiver, arg, .. } | KafkaExpr::DynCall { receiver, arg, .. } => {
            first_open(&[receiver, arg]).map_or(Focus::Redex, Focus::Child)
        }
        KafkaExpr::SubCast(_, b) | KafkaExpr::BehCast(_, b) | KafkaExpr::Seq(b, _) | KafkaExpr::AddrFieldWrite(_, _, b) => {
            if b.is_value() {
                Focus::Redex
            } else {
                Focus::Child(0)
            }
        }
        KafkaExpr::AddrFieldRead(..) => Focus::Redex,
    }
}

fn child(e: &KafkaExpr, i: usize) -> &KafkaExpr {
    match e {
        KafkaExpr::New(_, args) => &args[i],
        KafkaExpr::StaticCall { receiver, arg, .. } | KafkaExpr::DynCall { receiver, arg, .. } => {
            if i == 0 {
                receiver
            } else {
                arg
            }
        }
        KafkaExpr::SubCast(_, b) | KafkaExpr::BehCast(_, b) | KafkaExpr::Seq(b, _) | KafkaExpr::AddrFieldWrite(_, _, b) => b,
        _ => unreachable!("focus never descends into {e}"),
    }
}

fn child_mut(e: &mut KafkaExpr, i: usize) -> &mut KafkaExpr {
    match e {
        KafkaExpr::New(_, args) => &mut args[i],
        KafkaExpr::StaticCall { receiver, arg, .. } | KafkaExpr::DynCall { receiver, arg, .. } => {
            if i == 0 {
                receiver
            } else {
                arg
            }
        }
        KafkaExpr::SubCast(_, b) | KafkaExpr::BehCast(_, b) | KafkaExpr::Seq(b, _) | KafkaExpr::AddrFieldWrite(_, _, b) => b,
        _ => unreachable!("focus never descends here"),
    }
}

fn values(es: &[KafkaExpr]) -> Vec<Addr> {
    es.iter().filter_map(KafkaExpr::as_value).collect()
}

fn class_of<'t>(table: &'t KafkaClassTable, heap: &Heap, a: Addr) -> Result<&'t KafkaClassDef, VmError> {
    let name = heap.class_of(a).ok_or(VmError::DanglingAddress(a))?;
    table.get(name).ok_or_else(|| VmError::UnknownClass(name.to_string()))
}

fn field_index(table: &KafkaClassTable, heap: &Heap, a: Addr, field: &str) -> Result<usize, VmError> {
    let class = class_of(table, heap, a)?;
    class.field_index(field).ok_or_else(|| VmError::UnknownField {
        addr: a,
        class: class.name.clone(),
        field: field.to_string(),
    })
}

/// Picks the method run by `a.m(a'){t->t'}`: among the definitions
/// `m(x:t1):t2` with `t <: t1` and `t2 <: t'`, the one with exactly the
/// annotated signature, else the typed one, else the untyped one.
fn select_static<'c>(
    table: &KafkaClassTable,
    class: &'c KafkaClassDef,
    method: &str,
    t: &Type,
    t_ret: &Type,
) -> Result<Option<&'c KafkaMethodDef>, VmError> {
    let mut applicable = Vec::new();
    for m in class.methods_named(method) {
        if is_subtype(table, t, &m.param_type)? && is_subtype(table, &m.return_type, t_ret)? {
            applicable.push(m);
        }
    }
    let exact = applicable.iter().find(|m| m.param_type == *t && m.return_type == *t_ret);
    let typed = applicable.iter().find(|m| !m.is_untyped());
    Ok(exact.or(typed).or(applicable.first()).copied())
}

fn unique_names(methods: &[KafkaMethodDef]) -> bool {
    let mut names: Vec<&str> = methods.iter().map(|m| m.name.as_str()).collect();
    names.sort_unstable();
    names.windows(2).all(|w| w[0] != w[1])
}

fn forward(method: &str, arg: KafkaExpr, t1: &Type, t2: &Type) -> KafkaExpr {
    KafkaExpr::static_call(KafkaExpr::That, method, arg, t1.clone(), t2.clone())
}

/// Generates the wrapper methods for an object of class `source` viewed at
/// `target` (`None` for `any`).
pub fn wrapper_methods(source: &KafkaClassDef, target: Option<&KafkaClassDef>) -> Vec<KafkaMethodDef> {
    let x = || KafkaExpr::var("x");
    source
        .methods
        .iter()
        .map(|m| {
            let (t1, t2) = (&m.param_type, &m.return_type);
            let guarded = || forward(&m.name, KafkaExpr::beh_cast(t1.clone(), x()), t1, t2);
            match target {
                None => {
                    let body = KafkaExpr::beh_cast(Type::Any, guarded());
                    KafkaMethodDef::new(m.name.clone(), "x", Type::Any, Type::Any, body)
                }
                Some(target) => match target.methods_named(&m.name).next() {
                    Some(tm) => {
                        let body = KafkaExpr::beh_cast(tm.return_type.clone(), guarded());
                        KafkaMethodDef::new(m.name.clone(), "x", tm.param_type.clone(), tm.return_type.clone(), body)
                    }
                    None => KafkaMethodDef::new(m.name.clone(), "x", t1.clone(), t2.clone(), forward(&m.name, x(), t1, t2)),
                },
            }
        })
        .collect()
}

/// Behavioural cast of the object at `a` to `t`: generates a wrapper class,
/// adds it to `table`, and allocates a wrapper around `a`. `fresh` numbers
/// the generated classes.
pub fn bcast(
    a: Addr,
    t: &Type,
    heap: &mut Heap,
    table: &mut KafkaClassTable,
    fresh: &mut u32,
) -> Result<Result<Addr, StuckKind>, VmError> {
    let source = class_of(table, heap, a)?;
    let target = match t {
        Type::Any => None,
        Type::Class(c) => match table.get(c) {
            Some(target) => Some(target),
            None => return Ok(Err(StuckKind::BehavioralCastFailure)),
        },
    };
    if !unique_names(&source.methods) {
        return Ok(Err(StuckKind::BehavioralCastFailure));
    }
    if let Some(target) = target {
        let covered = target.methods.iter().all(|tm| source.methods_named(&tm.name).next().is_some());
        if !covered || !unique_names(&target.methods) {
            return Ok(Err(StuckKind::BehavioralCastFailure));
        }
    }
    let methods = wrapper_methods(source, target);
    let wrapped = Type::class(source.name.clone());
    let name = loop {
        *fresh += 1;
        let name = format!("$W{fresh}");
        if table.get(&name).is_none() {
            break name;
        }
    };
    let class = KafkaClassDef::new(name.clone(), vec![FieldDef::new(THAT, wrapped)], methods);
    table.push(class).expect("wrapper names are fresh");
    Ok(Ok(heap.alloc(name, vec![a])))
}

impl Machine {
    pub fn new(table: KafkaClassTable, expr: KafkaExpr) -> Self {
        Machine { state: MachineState { table, expr, heap: Heap::new() }, wrappers: 0 }
    }

    /// The subterm that the next step will reduce, or `None` for a value.
    pub fn redex(&self) -> Result<Option<&KafkaExpr>, VmError> {
        let mut cur = &self.state.expr;
        loop {
            match focus(cur) {
                Focus::Value => return Ok(None),
                Focus::Open => return Err(VmError::OpenTerm(cur.to_string())),
                Focus::Redex => return Ok(Some(cur)),
                Focus::Child(i) => cur = child(cur, i),
            }
        }
    }

    pub fn step(&mut self) -> Result<Step, VmError> {
        let MachineState { table, expr, heap } = &mut self.state;
        if let Some(a) = expr.as_value() {
            return Ok(Step::Value(a));
        }
        let mut cur = expr;
        loop {
            match focus(cur) {
                Focus::Child(i) => cur = child_mut(cur, i),
                Focus::Open => return Err(VmError::OpenTerm(cur.to_string())),
                Focus::Value => unreachable!("values are never focused below the root"),
                Focus::Redex => break,
            }
        }
        let redex = std::mem::replace(cur, KafkaExpr::This);
        if let KafkaExpr::Seq(_, second) = redex {
            *cur = *second;
            return Ok(Step::Reduced);
        }
        match reduce(&redex, table, heap, &mut self.wrappers) {
            Ok(Ok(next)) => {
                *cur = next;
                Ok(Step::Reduced)
            }
            Ok(Err(kind)) => {
                *cur = redex.clone();
                Ok(Step::Stuck { kind, redex })
            }
            Err(e) => {
                *cur = redex;
                Err(e)
            }
        }
    }

    /// Steps until a value, a stuck state, or `fuel` steps have been taken.
    pub fn run(&mut self, fuel: u64, mut trace: Option<&mut Vec<TraceRecord>>) -> Result<Outcome, VmError> {
        let mut taken = 0;
        let outcome = loop {
            if let Some(a) = self.state.expr.as_value() {
                break Outcome::Value(a);
            }
            if taken >= fuel {
                break Outcome::FuelExhausted;
            }
            let shown = match &trace {
                Some(_) => self.redex()?.map(ToString::to_string),
                None => None,
            };
            match self.step()? {
                Step::Reduced => {
                    taken += 1;
                    if let Some(t) = trace.as_deref_mut() {
                        t.push(TraceRecord::Step {
                            step: taken,
                            redex: shown.unwrap_or_default(),
                            heap: self.state.heap.len(),
                            classes: self.state.table.len(),
                        });
                    }
                }
                Step::Value(a) => break Outcome::Value(a),
                Step::Stuck { kind, redex } => break Outcome::Stuck { kind, location: redex.to_string() },
            }
        };
        if let Some(t) = trace {
            t.push(TraceRecord::last(&outcome));
        }
        Ok(outcome)
    }
}

/// Evaluates `main` against `table` from an empty heap, recording a trace.
pub fn run(table: KafkaClassTable, main: KafkaExpr, fuel: u64) -> Result<(Outcome, Vec<TraceRecord>), VmError> {
    let mut trace = Vec::new();
    let outcome = Machine::new(table, main).run(fuel, Some(&mut trace))?;
    Ok((outcome, trace))
}

fn reduce(
    redex: &KafkaExpr,
    table: &mut KafkaClassTable,
    heap: &mut Heap,
    fresh: &mut u32,
) -> Result<Result<KafkaExpr, StuckKind>, VmError> {
    let value = |e: &KafkaExpr| e.as_value().expect("focus only yields redexes with evaluated operands");
    let next = match redex {
        KafkaExpr::New(c, args) => {
            let class = table.get(c).ok_or_else(|| VmError::UnknownClass(c.clone()))?;
            if class.fields.len() != args.len() {
                return Err(VmError::Arity { class: c.clone(), expected: class.fields.len(), found: args.len() });
            }
            KafkaExpr::Addr(heap.alloc(c.clone(), values(args)))
        }
        KafkaExpr::AddrFieldRead(a, f) => {
            let i = field_index(table, heap, *a, f)?;
            KafkaExpr::Addr(heap.get(*a).expect("checked by field_index").fields[i])
        }
        KafkaExpr::AddrFieldWrite(a, f, v) => {
            let i = field_index(table, heap, *a, f)?;
            let v = value(v);
            let mut fields = heap.get(*a).expect("checked by field_index").fields.clone();
            fields[i] = v;
            heap.replace(*a, fields);
            KafkaExpr::Addr(v)
        }
        KafkaExpr::StaticCall { receiver, method, arg, arg_type, ret_type } => {
            let (a, b) = (value(receiver), value(arg));
            let class = class_of(table, heap, a)?;
            let m = select_static(table, class, method, arg_type, ret_type)?.ok_or_else(|| {
                VmError::NoApplicableMethod {
                    class: class.name.clone(),
                    method: method.clone(),
                    param: arg_type.clone(),
                    ret: ret_type.clone(),
                }
            })?;
            m.body.substitute(a, &m.param, b)
        }
        KafkaExpr::DynCall { receiver, method, arg } => {
            let (a, b) = (value(receiver), value(arg));
            match class_of(table, heap, a)?.untyped_method(method) {
                Some(m) => m.body.substitute(a, &m.param, b),
                None => return Ok(Err(StuckKind::NoSuchMethodDynamic)),
            }
        }
        KafkaExpr::SubCast(t, body) => {
            let a = value(body);
            let found = Type::class(heap.class_of(a).ok_or(VmError::DanglingAddress(a))?);
            let holds = match t {
                Type::Any => true,
                Type::Class(c) => table.get(c).is_some() && is_subtype(table, &found, t)?,
            };
            if !holds {
                return Ok(Err(StuckKind::SubtypeCastFailure));
            }
            KafkaExpr::Addr(a)
        }
        KafkaExpr::BehCast(t, body) => match bcast(value(body), t, heap, table, fresh)? {
            Ok(wrapper) => KafkaExpr::Addr(wrapper),
            Err(kind) => return Ok(Err(kind)),
        },
        other => unreachable!("`{other}` is not a redex"),
    };
    Ok(Ok(next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kafka::well_formed_class;

    fn c(name: &str) -> Type {
        Type::class(name)
    }

    fn table(classes: Vec<KafkaClassDef>) -> KafkaClassTable {
        KafkaClassTable::from_classes(classes).unwrap()
    }

    fn untyped(name: &str) -> KafkaMethodDef {
        KafkaMethodDef::new(name, "x", Type::Any, Type::Any, KafkaExpr::var("x"))
    }

    fn typed(name: &str, t: Type) -> KafkaMethodDef {
        KafkaMethodDef::new(name, "x", t.clone(), t, KafkaExpr::var("x"))
    }

    /// `A {m(A):A}` and `I {n(I):I}`.
    fn l1_table() -> KafkaClassTable {
        let a = KafkaMethodDef::new("m", "x", c("A"), c("A"), KafkaExpr::This);
        let i = KafkaMethodDef::new("n", "x", c("I"), c("I"), KafkaExpr::This);
        table(vec![KafkaClassDef::new("A", vec![], vec![a]), KafkaClassDef::new("I", vec![], vec![i])])
    }

    fn run_to_end(table: KafkaClassTable, e: KafkaExpr) -> Outcome {
        Machine::new(table, e).run(DEFAULT_FUEL, None).unwrap()
    }

    #[test]
    fn allocation() {
        let mut m = Machine::new(l1_table(), KafkaExpr::new_object("A", vec![]));
        assert_eq!(m.step().unwrap(), Step::Reduced);
        assert_eq!(m.state.expr, KafkaExpr::Addr(Addr(0)));
        assert_eq!(m.state.heap.class_of(Addr(0)), Some("A"));
        assert_eq!(m.step().unwrap(), Step::Value(Addr(0)));
    }

    #[test]
    fn cast_to_any_always_succeeds() {
        let out = run_to_end(l1_table(), KafkaExpr::sub_cast(Type::Any, KafkaExpr::new_object("A", vec![])));
        assert_eq!(out, Outcome::Value(Addr(0)));
    }

    #[test]
    fn subtype_cast_failure() {
        let out = run_to_end(l1_table(), KafkaExpr::sub_cast(c("I"), KafkaExpr::new_object("A", vec![])));
        assert_eq!(out, Outcome::Stuck { kind: StuckKind::SubtypeCastFailure, location: "<I>#0".into() });
    }

    #[test]
    fn cast_to_unknown_class_fails() {
        let out = run_to_end(l1_table(), KafkaExpr::sub_cast(c("Nope"), KafkaExpr::new_object("A", vec![])));
        assert!(matches!(out, Outcome::Stuck { kind: StuckKind::SubtypeCastFailure, .. }));
    }

    #[test]
    fn dynamic_call_without_untyped_method() {
        let e = KafkaExpr::dyn_call(
            KafkaExpr::sub_cast(Type::Any, KafkaExpr::new_object("A", vec![])),
            "m",
            KafkaExpr::new_object("A", vec![]),
        );
        let out = run_to_end(l1_table(), e);
        assert_eq!(out, Outcome::Stuck { kind: StuckKind::NoSuchMethodDynamic, location: "#0@m(#1)".into() });
    }

    #[test]
    fn behavioural_cast_failure_on_missing_name() {
        let out = run_to_end(l1_table(), KafkaExpr::beh_cast(c("I"), KafkaExpr::new_object("A", vec![])));
        assert!(matches!(out, Outcome::Stuck { kind: StuckKind::BehavioralCastFailure, .. }));
    }

    #[test]
    fn fuel() {
        let out = Machine::new(l1_table(), KafkaExpr::new_object("A", vec![])).run(0, None).unwrap();
        assert_eq!(out, Outcome::FuelExhausted);
    }

    #[test]
    fn evaluation_order_is_left_to_right() {
        let k = table(vec![
            KafkaClassDef::new("P", vec![FieldDef::new("l", Type::Any), FieldDef::new("r", Type::Any)], vec![]),
            KafkaClassDef::new("L", vec![], vec![]),
            KafkaClassDef::new("R", vec![], vec![]),
        ]);
        let e = KafkaExpr::new_object(
            "P",
            vec![KafkaExpr::new_object("L", vec![]), KafkaExpr::new_object("R", vec![])],
        );
        let mut m = Machine::new(k, e);
        m.run(DEFAULT_FUEL, None).unwrap();
        assert_eq!(m.state.heap.class_of(Addr(0)), Some("L"));
        assert_eq!(m.state.heap.class_of(Addr(1)), Some("R"));
        assert_eq!(m.state.heap.get(Addr(2)).unwrap().fields, vec![Addr(0), Addr(1)]);
    }

    #[test]
    fn static_dispatch_prefers_exact_then_typed() {
        let int = c("Int");
        let k = table(vec![
            KafkaClassDef::new("Int", vec![], vec![]),
            KafkaClassDef::new(
                "C",
                vec![],
                vec![untyped("m"), KafkaMethodDef::new("m", "x", int.clone(), int.clone(), KafkaExpr::This)],
            ),
        ]);
        let call = |t: Type| {
            KafkaExpr::static_call(KafkaExpr::new_object("C", vec![]), "m", KafkaExpr::new_object("Int", vec![]), t.clone(), t)
        };
        // the typed m returns the receiver (#0), the untyped one its argument (#1)
        assert_eq!(run_to_end(k.clone(), call(int)), Outcome::Value(Addr(0)));
        assert_eq!(run_to_end(k, call(Type::Any)), Outcome::Value(Addr(1)));
    }

    #[test]
    fn field_write_replaces_and_returns_value() {
        let k = table(vec![KafkaClassDef::new("P", vec![FieldDef::new("f", Type::Any)], vec![])]);
        let mut m = Machine::new(k, KafkaExpr::This);
        let a = m.state.heap.alloc("P", vec![]);
        m.state.heap.replace(a, vec![a]);
        let b = m.state.heap.alloc("P", vec![a]);
        m.state.expr = KafkaExpr::AddrFieldWrite(a, "f".into(), Box::new(KafkaExpr::Addr(b)));
        assert_eq!(m.run(10, None).unwrap(), Outcome::Value(b));
        assert_eq!(m.state.heap.get(a).unwrap().fields, vec![b]);
    }

    #[test]
    fn wrapper_at_any() {
        let k = table(vec![KafkaClassDef::new("C", vec![], vec![typed("a", c("C"))])]);
        let mut m = Machine::new(k, KafkaExpr::beh_cast(Type::Any, KafkaExpr::new_object("C", vec![])));
        assert_eq!(m.run(10, None).unwrap(), Outcome::Value(Addr(1)));
        let w = m.state.table.get("$W1").unwrap();
        assert_eq!(w.to_string(), "class $W1 {\n  that:C\n  a(x:any):any { <<any>> this.that.a(<<C>>x){C->C} }\n}");
        assert!(well_formed_class(&m.state.table, w).is_empty());
    }

    #[test]
    fn trace_records() {
        let (out, trace) = run(l1_table(), KafkaExpr::sub_cast(c("I"), KafkaExpr::new_object("A", vec![])), 10).unwrap();
        assert!(matches!(out, Outcome::Stuck { .. }));
        assert_eq!(trace[0].to_json(), r#"{"step":1,"redex":"new A()","heap":1,"classes":2}"#);
        assert_eq!(trace[1].to_json(), r#"{"result":"stuck","kind":"SubtypeCastFailure","at":"<I>#0"}"#);
    }
}
