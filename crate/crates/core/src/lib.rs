//! A workbench for gradual type systems: a surface object language, the
//! KafKa core calculus with its interpreter, and four translations between
//! them.

pub mod error;
pub mod kafka;
pub mod litmus;
pub mod surface;
pub mod translate;
pub mod types;
pub mod vm;

pub use error::{StaticTypeError, TypeErrorKind};
pub use types::Type;
