//! Surface syntax, abstract syntax, parsing/desugaring, and substitution.

pub mod ast;
pub mod parser;
pub mod subst;

pub use ast::{Clause, Expression, Handler, OpSig, PrimOp, Program, SignatureTable, Value};
pub use parser::{parse_expression, parse_program, ParseError};
pub use subst::{fresh_name, free_vars_expr, free_vars_value, substitute, substitute_value};
