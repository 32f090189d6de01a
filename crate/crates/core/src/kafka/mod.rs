//! The KafKa core calculus: syntax, static semantics and printer.

mod ast;
mod print;
mod typing;

pub use ast::{Addr, DuplicateClass, KafkaClassDef, KafkaClassTable, KafkaExpr, KafkaMethodDef, KafkaProgram, THAT};
pub use typing::{
    check_kafka_expr, heap_typing_of, type_kafka_expr, well_formed_class, well_formed_heap, well_formed_heap_and_expr,
    well_formed_state, well_formed_table, HeapTyping,
};
