//! Interpreter, type-and-effect checker, and soundness-verification harness
//! for a fine-grain call-by-value language with algebraic operations and
//! handlers, parametric over a small family of monadic runtimes.

pub mod core_lang;
pub mod effect_algebra;
pub mod harness;
pub mod interp;
pub mod monad_kernel;
pub mod step_semantics;
pub mod type_system;
