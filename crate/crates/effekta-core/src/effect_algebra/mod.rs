//! Effect expressions, their automaton semantics, language inclusion, and
//! handler filters.

pub mod automaton;
pub mod expr;
pub mod filter;
pub mod include;

pub use automaton::{compile, eff_concat, eff_omega, eff_star, eff_union, EffectAutomaton, Lasso};
pub use expr::{parse_effect_expr, parse_effect_expr_prefix, EffectExpr, EffectParseError};
pub use filter::{filter_apply, ClauseMode, FilterClause, HandlerFilter};
pub use include::{eff_equal, eff_includes, Inclusion, InclusionBounds, Witness};
