//! Small-step evaluation of KafKa programs.

mod checked;
mod heap;
mod machine;

pub use checked::{run_checked, stuck_shape_ok, Violation};
pub use heap::{Heap, HeapObject};
pub use machine::{
    bcast, run, wrapper_methods, Machine, MachineState, Outcome, Step, StuckKind, TraceRecord, VmError, DEFAULT_FUEL,
};
