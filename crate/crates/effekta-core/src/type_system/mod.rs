//! Types, subtyping, and the type-and-effect checker.

pub mod check;
pub mod types;

pub use check::{
    check_program, extract_filter, infer_expr, infer_program, infer_value, subtype, Context,
    Report, Subtype, TypeAndEffect, TypeError,
};
pub use types::{effect_display, Type};
