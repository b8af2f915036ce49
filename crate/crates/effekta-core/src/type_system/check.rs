//! Subtyping and the algorithmic type-and-effect checker.
//!
//! The checker is syntax-directed: there is no standalone subsumption rule;
//! subtype and subeffect checks appear exactly where a rule's side condition
//! demands them. Subeffect checks are three-valued (language inclusion on
//! effect automata can be undecided within bounds); an undecided check is
//! rejected with a dedicated diagnostic, never accepted.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::core_lang::ast::{Expression, Handler, PrimOp, Program, SignatureTable, Value};
use crate::effect_algebra::automaton::{compile, eff_concat, eff_union, EffectAutomaton};
use crate::effect_algebra::filter::{filter_apply, FilterClause, HandlerFilter};
use crate::effect_algebra::include::{eff_includes, Inclusion, InclusionBounds};
use crate::effect_algebra::ClauseMode;

use super::types::{effect_display, Type};

/// Three-valued subtyping verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subtype {
    Yes,
    No,
    Unknown,
}

impl Subtype {
    fn and(self, other: Subtype) -> Subtype {
        match (self, other) {
            (Subtype::No, _) | (_, Subtype::No) => Subtype::No,
            (Subtype::Unknown, _) | (_, Subtype::Unknown) => Subtype::Unknown,
            _ => Subtype::Yes,
        }
    }
}

/// Structural subtyping: the empty type below everything, base types
/// reflexive, arrows contravariant in the parameter and covariant in the
/// result, with language inclusion on latent effects.
pub fn subtype(t1: &Type, t2: &Type, bounds: InclusionBounds) -> Subtype {
    match (t1, t2) {
        (Type::Bot, _) => Subtype::Yes,
        (Type::Nat, Type::Nat) | (Type::Bool, Type::Bool) | (Type::Unit, Type::Unit) => {
            Subtype::Yes
        }
        (
            Type::Arrow {
                param: p1,
                latent: l1,
                result: r1,
            },
            Type::Arrow {
                param: p2,
                latent: l2,
                result: r2,
            },
        ) => {
            let param = subtype(p2, p1, bounds);
            let result = subtype(r1, r2, bounds);
            let eff = match eff_includes(l1, l2, bounds) {
                Inclusion::Yes => Subtype::Yes,
                Inclusion::No(_) => Subtype::No,
                Inclusion::Unknown => Subtype::Unknown,
            };
            param.and(result).and(eff)
        }
        _ => Subtype::No,
    }
}

/// A type together with the effect of computing it.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeAndEffect {
    pub ty: Type,
    pub eff: EffectAutomaton,
}

/// Typing context; later bindings shadow earlier ones.
#[derive(Debug, Clone, Default)]
pub struct Context(BTreeMap<String, Type>);

impl Context {
    pub fn empty() -> Context {
        Context::default()
    }

    pub fn lookup(&self, name: &str) -> Option<&Type> {
        self.0.get(name)
    }

    pub fn extended(&self, name: impl Into<String>, ty: Type) -> Context {
        let mut map = self.0.clone();
        map.insert(name.into(), ty);
        Context(map)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("callee is not a function type: `{0}`")]
    NotAFunction(Type),
    #[error("successor applied to a non-natural: `{0}`")]
    SuccOfNonNat(Type),
    #[error("conditional scrutinee has type `{0}`, expected Bool")]
    CondNotBool(Type),
    #[error("{context}: type `{found}` is not a subtype of `{expected}`")]
    Mismatch {
        context: String,
        found: Type,
        expected: Type,
    },
    #[error("incomparable types `{0}` and `{1}` have no join")]
    BranchJoin(Type, Type),
    #[error("undeclared operation `{0}`")]
    UndeclaredOp(String),
    #[error("operation `{op}` takes {expected} argument(s), called with {found}")]
    OpArity {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("{context}: effect `{found}` is not included in `{expected}` ({witness})")]
    EffectNotIncluded {
        context: String,
        found: String,
        expected: String,
        witness: String,
    },
    #[error(
        "{context}: inclusion of effect `{found}` in `{expected}` is undecided \
         within the configured bounds"
    )]
    UndecidedSubeffect {
        context: String,
        found: String,
        expected: String,
    },
    #[error("{context}: type `{found}` is not a subtype of `{expected}` \
             (latent-effect inclusion undecided within the configured bounds)")]
    UndecidedSubtype {
        context: String,
        found: Type,
        expected: Type,
    },
}

impl TypeError {
    /// True for errors caused by an undecided inclusion rather than a
    /// definite mismatch (they get a dedicated exit code in the front end).
    pub fn is_undecided(&self) -> bool {
        matches!(
            self,
            TypeError::UndecidedSubeffect { .. } | TypeError::UndecidedSubtype { .. }
        )
    }
}

fn require_subtype(
    found: &Type,
    expected: &Type,
    context: &str,
    bounds: InclusionBounds,
) -> Result<(), TypeError> {
    match subtype(found, expected, bounds) {
        Subtype::Yes => Ok(()),
        Subtype::No => Err(TypeError::Mismatch {
            context: context.to_string(),
            found: found.clone(),
            expected: expected.clone(),
        }),
        Subtype::Unknown => Err(TypeError::UndecidedSubtype {
            context: context.to_string(),
            found: found.clone(),
            expected: expected.clone(),
        }),
    }
}

fn require_subeffect(
    found: &EffectAutomaton,
    expected: &EffectAutomaton,
    context: &str,
    bounds: InclusionBounds,
) -> Result<(), TypeError> {
    match eff_includes(found, expected, bounds) {
        Inclusion::Yes => Ok(()),
        Inclusion::No(w) => Err(TypeError::EffectNotIncluded {
            context: context.to_string(),
            found: effect_display(found),
            expected: effect_display(expected),
            witness: format!("counterexample sequence {w}"),
        }),
        Inclusion::Unknown => Err(TypeError::UndecidedSubeffect {
            context: context.to_string(),
            found: effect_display(found),
            expected: effect_display(expected),
        }),
    }
}

/// Infers the type of a value.
pub fn infer_value(
    ctx: &Context,
    v: &Value,
    sigs: &SignatureTable,
    bounds: InclusionBounds,
) -> Result<Type, TypeError> {
    match v {
        Value::Var(x) => ctx
            .lookup(x)
            .cloned()
            .ok_or_else(|| TypeError::Unbound(x.clone())),
        Value::Unit => Ok(Type::Unit),
        Value::True | Value::False => Ok(Type::Bool),
        Value::Zero => Ok(Type::Nat),
        Value::Succ(inner) => {
            let t = infer_value(ctx, inner, sigs, bounds)?;
            match subtype(&t, &Type::Nat, bounds) {
                Subtype::Yes => Ok(Type::Nat),
                _ => Err(TypeError::SuccOfNonNat(t)),
            }
        }
        Value::RecFun {
            fun_name,
            param,
            param_type,
            result_type,
            latent,
            body,
        } => {
            let latent_auto = compile(latent);
            let fun_type = Type::arrow(param_type.clone(), latent_auto.clone(), result_type.clone());
            let inner = ctx
                .extended(fun_name.clone(), fun_type.clone())
                .extended(param.clone(), param_type.clone());
            let te = infer_expr(&inner, body, sigs, bounds)?;
            require_subtype(&te.ty, result_type, "recursive function body", bounds)?;
            require_subeffect(&te.eff, &latent_auto, "recursive function body", bounds)?;
            Ok(fun_type)
        }
    }
}

/// Infers the type and effect of an expression.
pub fn infer_expr(
    ctx: &Context,
    e: &Expression,
    sigs: &SignatureTable,
    bounds: InclusionBounds,
) -> Result<TypeAndEffect, TypeError> {
    match e {
        Expression::Return(v) => Ok(TypeAndEffect {
            ty: infer_value(ctx, v, sigs, bounds)?,
            eff: EffectAutomaton::eps(),
        }),
        Expression::App(v1, v2) => {
            let fun_ty = infer_value(ctx, v1, sigs, bounds)?;
            let Type::Arrow {
                param,
                latent,
                result,
            } = fun_ty
            else {
                return Err(TypeError::NotAFunction(fun_ty));
            };
            let arg_ty = infer_value(ctx, v2, sigs, bounds)?;
            require_subtype(&arg_ty, &param, "application argument", bounds)?;
            Ok(TypeAndEffect {
                ty: *result,
                eff: latent,
            })
        }
        Expression::OpCall { op, args } => {
            let sig = sigs
                .get(op)
                .ok_or_else(|| TypeError::UndeclaredOp(op.clone()))?;
            if sig.arg_types.len() != args.len() {
                return Err(TypeError::OpArity {
                    op: op.clone(),
                    expected: sig.arg_types.len(),
                    found: args.len(),
                });
            }
            for (arg, want) in args.iter().zip(&sig.arg_types) {
                let got = infer_value(ctx, arg, sigs, bounds)?;
                require_subtype(&got, want, &format!("argument of operation `{op}`"), bounds)?;
            }
            Ok(TypeAndEffect {
                ty: sig.return_type.clone(),
                eff: EffectAutomaton::atom(op.clone()),
            })
        }
        Expression::Prim { op, arg } => {
            let got = infer_value(ctx, arg, sigs, bounds)?;
            require_subtype(&got, &Type::Nat, &format!("argument of `{}`", op.name()), bounds)?;
            let ty = match op {
                PrimOp::Pred => Type::Nat,
                PrimOp::IsZero | PrimOp::Even => Type::Bool,
            };
            Ok(TypeAndEffect {
                ty,
                eff: EffectAutomaton::eps(),
            })
        }
        Expression::Do { binder, first, rest } => {
            let te1 = infer_expr(ctx, first, sigs, bounds)?;
            let inner = ctx.extended(binder.clone(), te1.ty);
            let te2 = infer_expr(&inner, rest, sigs, bounds)?;
            Ok(TypeAndEffect {
                ty: te2.ty,
                eff: eff_concat(&te1.eff, &te2.eff),
            })
        }
        Expression::If {
            cond,
            then_branch,
            else_branch,
        } => {
            let cond_ty = infer_value(ctx, cond, sigs, bounds)?;
            if subtype(&cond_ty, &Type::Bool, bounds) != Subtype::Yes {
                return Err(TypeError::CondNotBool(cond_ty));
            }
            let t1 = infer_expr(ctx, then_branch, sigs, bounds)?;
            let t2 = infer_expr(ctx, else_branch, sigs, bounds)?;
            let ty = join_types(t1.ty, t2.ty, bounds)?;
            Ok(TypeAndEffect {
                ty,
                eff: eff_union(&t1.eff, &t2.eff),
            })
        }
        Expression::With { handler, body } => {
            let te = infer_expr(ctx, body, sigs, bounds)?;
            let (out_ty, filter) = extract_filter(ctx, &te.ty, handler, sigs, bounds)?;
            Ok(TypeAndEffect {
                ty: out_ty,
                eff: filter_apply(&filter, &te.eff),
            })
        }
    }
}

/// The join (least upper bound) of two types under the algorithmic
/// subtyping: the larger side, requiring one to subsume the other.
fn join_types(a: Type, b: Type, bounds: InclusionBounds) -> Result<Type, TypeError> {
    if subtype(&a, &b, bounds) == Subtype::Yes {
        Ok(b)
    } else if subtype(&b, &a, bounds) == Subtype::Yes {
        Ok(a)
    } else {
        Err(TypeError::BranchJoin(a, b))
    }
}

/// Types a handler against the type of the expression it handles, returning
/// the handler's output type and the filter it induces on effects.
///
/// The final expression is typed with the final binder at the handled type;
/// each clause body is typed with its parameters at the operation's argument
/// types. A continue-clause must produce the operation's return type (its
/// result feeds the continuation). A stop-clause's result replaces the whole
/// computation, so the handler's output type is the join of the final
/// expression's type with every stop-clause type. Joining — rather than
/// forcing each stop-clause below the final expression's type — keeps typing
/// stable under stepping: when the handled expression steps into a bare
/// operation call, its type and with it the final expression's can shrink to
/// the empty type, while the stop-clauses' types do not change.
pub fn extract_filter(
    ctx: &Context,
    in_type: &Type,
    h: &Handler,
    sigs: &SignatureTable,
    bounds: InclusionBounds,
) -> Result<(Type, HandlerFilter), TypeError> {
    let final_ctx = ctx.extended(h.final_binder.clone(), in_type.clone());
    let final_te = infer_expr(&final_ctx, &h.final_expr, sigs, bounds)?;
    let mut out_type = final_te.ty;
    let mut clauses = Vec::new();
    for c in &h.clauses {
        let sig = sigs
            .get(&c.op)
            .ok_or_else(|| TypeError::UndeclaredOp(c.op.clone()))?;
        let mut clause_ctx = ctx.clone();
        for (p, t) in c.params.iter().zip(&sig.arg_types) {
            clause_ctx = clause_ctx.extended(p.clone(), t.clone());
        }
        let te = infer_expr(&clause_ctx, &c.body, sigs, bounds)?;
        match c.mode {
            ClauseMode::Continue => require_subtype(
                &te.ty,
                &sig.return_type,
                &format!("continue-clause for `{}`", c.op),
                bounds,
            )?,
            ClauseMode::Stop => {
                out_type = join_types(out_type, te.ty.clone(), bounds)?;
            }
        }
        clauses.push(FilterClause {
            op: c.op.clone(),
            mode: c.mode,
            effect: te.eff,
        });
    }
    Ok((
        out_type,
        HandlerFilter {
            clauses,
            final_effect: final_te.eff,
        },
    ))
}

/// A check report: the inferred type and effect on success, diagnostics on
/// failure. Serializes to `{type, effect, diagnostics[]}`.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    #[serde(rename = "type")]
    pub ty: Option<String>,
    pub effect: Option<String>,
    pub diagnostics: Vec<String>,
}

/// Checks a whole program under the empty context.
pub fn infer_program(p: &Program, bounds: InclusionBounds) -> Result<TypeAndEffect, TypeError> {
    infer_expr(&Context::empty(), &p.main, &p.signatures, bounds)
}

pub fn check_program(p: &Program, bounds: InclusionBounds) -> Report {
    match infer_program(p, bounds) {
        Ok(te) => Report {
            ty: Some(te.ty.to_string()),
            effect: Some(effect_display(&te.eff)),
            diagnostics: vec![],
        },
        Err(e) => Report {
            ty: None,
            effect: None,
            diagnostics: vec![e.to_string()],
        },
    }
}
