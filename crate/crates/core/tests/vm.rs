mod common;

use common::{program, GenConfig};
use gradual_core::kafka::{heap_typing_of, KafkaClassDef, KafkaClassTable, KafkaExpr, KafkaMethodDef};
use gradual_core::litmus::{run_cell, CaseId};
use gradual_core::translate::{translate_program, Semantics};
use gradual_core::types::Type;
use gradual_core::vm::{run, run_checked, Machine, Outcome, Step, StuckKind, TraceRecord, DEFAULT_FUEL};
use proptest::prelude::*;

fn c(name: &str) -> Type {
    Type::class(name)
}

fn counter_table() -> KafkaClassTable {
    let x = || KafkaExpr::var("x");
    KafkaClassTable::from_classes(vec![
        KafkaClassDef::new("N", vec![], vec![]),
        KafkaClassDef::new(
            "Box",
            vec![gradual_core::surface::FieldDef::new("v", c("N"))],
            vec![
                KafkaMethodDef::new("get", "x", c("N"), c("N"), KafkaExpr::read("v")),
                KafkaMethodDef::new("put", "x", c("N"), c("N"), KafkaExpr::write("v", x())),
            ],
        ),
    ])
    .unwrap()
}

#[test]
fn l1_first_allocation() {
    let p = CaseId::L1.translate(Semantics::Optional);
    let mut m = Machine::new(p.table, p.main);
    while m.state.heap.is_empty() {
        assert!(matches!(m.step().unwrap(), Step::Reduced));
    }
    let typing = heap_typing_of(&m.state.heap);
    assert_eq!(typing.len(), 1);
    assert_eq!(typing.values().next().unwrap(), "T");
}

#[test]
fn addresses_are_consecutive() {
    let e = KafkaExpr::seq(
        KafkaExpr::new_object("N", vec![]),
        KafkaExpr::seq(KafkaExpr::new_object("N", vec![]), KafkaExpr::new_object("N", vec![])),
    );
    let (outcome, _) = run(counter_table(), e, DEFAULT_FUEL).unwrap();
    assert_eq!(outcome.to_string(), "value #2");
}

#[test]
fn field_write_then_read() {
    let boxed = KafkaExpr::new_object("Box", vec![KafkaExpr::new_object("N", vec![])]);
    let fresh = KafkaExpr::new_object("N", vec![]);
    let put = KafkaExpr::static_call(boxed, "put", fresh, c("N"), c("N"));
    let mut m = Machine::new(counter_table(), put);
    assert_eq!(run_checked(&mut m, DEFAULT_FUEL).unwrap().to_string(), "value #2");
    let boxed = m.state.heap.get(gradual_core::kafka::Addr(1)).unwrap();
    assert_eq!(boxed.fields, vec![gradual_core::kafka::Addr(2)]);
}

#[test]
fn dynamic_call_without_untyped_method_is_stuck() {
    let e = KafkaExpr::dyn_call(
        KafkaExpr::sub_cast(Type::Any, KafkaExpr::new_object("Box", vec![KafkaExpr::new_object("N", vec![])])),
        "get",
        KafkaExpr::sub_cast(Type::Any, KafkaExpr::new_object("N", vec![])),
    );
    let (outcome, _) = run(counter_table(), e, DEFAULT_FUEL).unwrap();
    assert!(matches!(outcome, Outcome::Stuck { kind: StuckKind::NoSuchMethodDynamic, .. }), "{outcome}");
}

#[test]
fn failed_subtype_cast_is_stuck() {
    let e = KafkaExpr::sub_cast(c("Box"), KafkaExpr::new_object("N", vec![]));
    let (outcome, _) = run(counter_table(), e, DEFAULT_FUEL).unwrap();
    assert!(matches!(outcome, Outcome::Stuck { kind: StuckKind::SubtypeCastFailure, .. }), "{outcome}");
}

#[test]
fn behavioral_wrapper_is_transparent() {
    // Casting a Box to itself wraps it; the call reaches the original and
    // the N it returns comes back wrapped in turn.
    let boxed = KafkaExpr::new_object("Box", vec![KafkaExpr::new_object("N", vec![])]);
    let e = KafkaExpr::static_call(KafkaExpr::beh_cast(c("Box"), boxed), "get", KafkaExpr::new_object("N", vec![]), c("N"), c("N"));
    let mut m = Machine::new(counter_table(), e);
    let outcome = run_checked(&mut m, DEFAULT_FUEL).unwrap();
    let Outcome::Value(result) = outcome else { panic!("{outcome}") };
    let wrapper = m.state.heap.get(result).unwrap();
    assert!(wrapper.class.starts_with("$W"), "{}", wrapper.class);
    assert_eq!(wrapper.fields, vec![gradual_core::kafka::Addr(0)]);
    assert!(m.state.table.get("$W1").is_some());
}

#[test]
fn fuel_runs_out() {
    let table = KafkaClassTable::from_classes(vec![KafkaClassDef::new(
        "Loop",
        vec![],
        vec![KafkaMethodDef::new("go", "x", Type::Any, Type::Any, KafkaExpr::dyn_call(KafkaExpr::var("x"), "go", KafkaExpr::var("x")))],
    )])
    .unwrap();
    let start = KafkaExpr::sub_cast(Type::Any, KafkaExpr::new_object("Loop", vec![]));
    let e = KafkaExpr::dyn_call(start.clone(), "go", start);
    let (outcome, trace) = run(table, e, 50).unwrap();
    assert_eq!(outcome, Outcome::FuelExhausted);
    assert!(matches!(trace.last(), Some(TraceRecord::Final { .. })));
}

#[test]
fn litmus_cells_are_deterministic() {
    for case in CaseId::ALL {
        for s in Semantics::ALL {
            assert_eq!(run_cell(case, s, DEFAULT_FUEL).unwrap(), run_cell(case, s, DEFAULT_FUEL).unwrap());
        }
    }
}

#[test]
fn trace_records_every_step() {
    let p = CaseId::L2.translate(Semantics::Behavioral);
    let (outcome, trace) = run(p.table, p.main, DEFAULT_FUEL).unwrap();
    assert!(matches!(outcome, Outcome::Value(_)));
    let (last, steps) = trace.split_last().unwrap();
    assert!(matches!(last, TraceRecord::Final { .. }));
    assert!(steps.iter().all(|r| matches!(r, TraceRecord::Step { .. })));
    for r in &trace {
        assert!(serde_json::from_str::<serde_json::Value>(&r.to_json()).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_programs_preserve_typing(seed in any::<u64>()) {
        let p = program(seed, &GenConfig::default());
        for s in Semantics::ALL {
            let k = translate_program(s, &p).unwrap();
            let mut m = Machine::new(k.table, k.main);
            let checked = run_checked(&mut m, 200);
            prop_assert!(checked.is_ok(), "{} under {}: {}", p, s, checked.unwrap_err());
        }
    }

    #[test]
    fn outcomes_are_reproducible(seed in any::<u64>()) {
        let p = program(seed, &GenConfig::default());
        let k = translate_program(Semantics::Behavioral, &p).unwrap();
        let (a, ta) = run(k.table.clone(), k.main.clone(), 300).unwrap();
        let (b, tb) = run(k.table.clone(), k.main.clone(), 300).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(ta.len(), tb.len());
    }
}
