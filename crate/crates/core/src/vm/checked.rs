//! An instrumented runner that re-establishes the soundness invariants after
//! every step. Used by the test suites; far too slow for ordinary runs.

use thiserror::Error;

use super::machine::{Machine, MachineState, Outcome, Step, StuckKind};
use crate::kafka::KafkaClassTable;
use crate::error::StaticTypeError;
use crate::kafka::{
    check_kafka_expr, heap_typing_of, type_kafka_expr, well_formed_class, well_formed_heap, well_formed_state, HeapTyping,
    KafkaExpr,
};
use crate::types::{Type, TypeEnv};

#[derive(Clone, Debug, Error)]
pub enum Violation {
    #[error("step {step}: ill-formed state: {errors:?}")]
    IllFormed { step: u64, errors: Vec<String> },
    #[error("step {step}: result no longer has type {expected}: {error}")]
    Preservation { step: u64, expected: Type, error: String },
    #[error("step {step}: {what}")]
    Monotonicity { step: u64, what: String },
    #[error("step {step}: {kind} on unexpected redex `{redex}`")]
    StuckShape { step: u64, kind: StuckKind, redex: String },
    #[error("step {step}: {error}")]
    Vm { step: u64, error: String },
}

fn strings(errors: Vec<StaticTypeError>) -> Vec<String> {
    errors.iter().map(ToString::to_string).collect()
}

/// Whether `redex` has the shape the soundness theorem allows for `kind`.
pub fn stuck_shape_ok(kind: StuckKind, redex: &KafkaExpr) -> bool {
    match (kind, redex) {
        (StuckKind::NoSuchMethodDynamic, KafkaExpr::DynCall { receiver, arg, .. }) => {
            receiver.is_value() && arg.is_value()
        }
        (StuckKind::SubtypeCastFailure, KafkaExpr::SubCast(Type::Class(_), body))
        | (StuckKind::BehavioralCastFailure, KafkaExpr::BehCast(Type::Class(_), body)) => body.is_value(),
        _ => false,
    }
}

/// What a step must preserve. Existing classes cannot change through the
/// table's API, so their names are enough to detect a non-append update.
struct Snapshot {
    classes: Vec<String>,
    typing: HeapTyping,
}

impl Snapshot {
    fn of(state: &MachineState) -> Self {
        Snapshot {
            classes: state.table.classes().iter().map(|c| c.name.clone()).collect(),
            typing: heap_typing_of(&state.heap),
        }
    }

    fn extended_by(&self, table: &KafkaClassTable, typing: &HeapTyping) -> Result<(), String> {
        let new = table.classes();
        if new.len() < self.classes.len() || new.iter().zip(&self.classes).any(|(c, old)| c.name != *old) {
            return Err("class table was not extended append-only".into());
        }
        for (a, class) in &self.typing {
            match typing.get(a) {
                None => return Err(format!("address {a} disappeared")),
                Some(c) if c != class => return Err(format!("address {a} changed class from {class} to {c}")),
                Some(_) => {}
            }
        }
        Ok(())
    }
}

/// Runs like [`Machine::run`], verifying well-formedness, preservation of
/// the initial type, heap and table monotonicity, and the shape of any
/// stuck redex.
pub fn run_checked(machine: &mut Machine, fuel: u64) -> Result<Outcome, Violation> {
    let state = &machine.state;
    let errors = well_formed_state(&state.table, &state.expr, &state.heap);
    if !errors.is_empty() {
        return Err(Violation::IllFormed { step: 0, errors: strings(errors) });
    }
    let typing = heap_typing_of(&state.heap);
    let expected = type_kafka_expr(&TypeEnv::new(), &typing, &state.table, &state.expr)
        .map_err(|e| Violation::IllFormed { step: 0, errors: vec![e.to_string()] })?;

    let mut taken = 0;
    loop {
        if let Some(a) = machine.state.expr.as_value() {
            return Ok(Outcome::Value(a));
        }
        if taken >= fuel {
            return Ok(Outcome::FuelExhausted);
        }
        let before = Snapshot::of(&machine.state);
        let step = taken + 1;
        match machine.step().map_err(|e| Violation::Vm { step, error: e.to_string() })? {
            Step::Value(a) => return Ok(Outcome::Value(a)),
            Step::Stuck { kind, redex } => {
                if !stuck_shape_ok(kind, &redex) {
                    return Err(Violation::StuckShape { step, kind, redex: redex.to_string() });
                }
                return Ok(Outcome::Stuck { kind, location: redex.to_string() });
            }
            Step::Reduced => taken = step,
        }
        let after = &machine.state;
        let typing = heap_typing_of(&after.heap);
        before.extended_by(&after.table, &typing).map_err(|what| Violation::Monotonicity { step, what })?;
        // Existing classes cannot lose well-formedness when the table grows,
        // so only new ones are checked. The preservation check below covers
        // the expression.
        let mut errors: Vec<_> = after.table.classes()[before.classes.len()..]
            .iter()
            .flat_map(|c| well_formed_class(&after.table, c))
            .collect();
        errors.extend(well_formed_heap(&after.table, &after.heap));
        if !errors.is_empty() {
            return Err(Violation::IllFormed { step, errors: strings(errors) });
        }
        check_kafka_expr(&TypeEnv::new(), &typing, &after.table, &after.expr, &expected).map_err(|e| {
            Violation::Preservation { step, expected: expected.clone(), error: e.to_string() }
        })?;
    }
}
