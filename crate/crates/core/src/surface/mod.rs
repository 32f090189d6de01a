//! The gradually typed surface language: a unary object calculus without
//! inheritance whose only type former besides class names is `any`.

mod ast;
mod check;
mod parse;

pub use ast::{ClassDef, ClassTable, FieldDef, MethodDef, Pos, SurfaceExpr, SurfaceProgram};
pub use check::{check_program, check_table, type_surface_expr};
pub use parse::{parse_expr, parse_program, ParseError};
