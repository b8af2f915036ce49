//! Free variables and simultaneous substitution.
//!
//! Binders: `Do` binds in its continuation, `RecFun` binds the function name
//! and parameter in its body, handler clauses bind their parameters in the
//! clause body, and the final binder binds in the final expression. Binders
//! shadow outer bindings. Substitution maps variables to *closed* values, so
//! no renaming is ever needed.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};

use super::ast::{Clause, Expression, Handler, Value};

/// Fresh-name source for desugaring and trace-level rewrites. Generated names
/// start with `$`, which the surface grammar reserves, so they cannot collide
/// with user-written identifiers.
static FRESH: AtomicU64 = AtomicU64::new(0);

pub fn fresh_name(prefix: &str) -> String {
    let n = FRESH.fetch_add(1, Ordering::Relaxed);
    format!("${prefix}{n}")
}

pub fn free_vars_value(v: &Value) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    fv_value(v, &mut out);
    out
}

pub fn free_vars_expr(e: &Expression) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    fv_expr(e, &mut out);
    out
}

fn fv_value(v: &Value, out: &mut BTreeSet<String>) {
    match v {
        Value::Var(x) => {
            out.insert(x.clone());
        }
        Value::RecFun {
            fun_name,
            param,
            body,
            ..
        } => {
            let mut inner = BTreeSet::new();
            fv_expr(body, &mut inner);
            inner.remove(fun_name);
            inner.remove(param);
            out.extend(inner);
        }
        Value::Succ(inner) => fv_value(inner, out),
        Value::Unit | Value::Zero | Value::True | Value::False => {}
    }
}

fn fv_expr(e: &Expression, out: &mut BTreeSet<String>) {
    match e {
        Expression::App(v1, v2) => {
            fv_value(v1, out);
            fv_value(v2, out);
        }
        Expression::OpCall { args, .. } => {
            for a in args {
                fv_value(a, out);
            }
        }
        Expression::Return(v) | Expression::Prim { arg: v, .. } => fv_value(v, out),
        Expression::Do { binder, first, rest } => {
            fv_expr(first, out);
            let mut inner = BTreeSet::new();
            fv_expr(rest, &mut inner);
            inner.remove(binder);
            out.extend(inner);
        }
        Expression::If {
            cond,
            then_branch,
            else_branch,
        } => {
            fv_value(cond, out);
            fv_expr(then_branch, out);
            fv_expr(else_branch, out);
        }
        Expression::With { handler, body } => {
            for c in &handler.clauses {
                let mut inner = BTreeSet::new();
                fv_expr(&c.body, &mut inner);
                for p in &c.params {
                    inner.remove(p);
                }
                out.extend(inner);
            }
            let mut inner = BTreeSet::new();
            fv_expr(&handler.final_expr, &mut inner);
            inner.remove(&handler.final_binder);
            out.extend(inner);
            fv_expr(body, out);
        }
    }
}

/// Simultaneous substitution of closed values for variables in an expression.
pub fn substitute(e: &Expression, bindings: &BTreeMap<String, Value>) -> Expression {
    if bindings.is_empty() {
        return e.clone();
    }
    sub_expr(e, bindings)
}

/// Simultaneous substitution of closed values for variables in a value.
pub fn substitute_value(v: &Value, bindings: &BTreeMap<String, Value>) -> Value {
    if bindings.is_empty() {
        return v.clone();
    }
    sub_value(v, bindings)
}

fn without<'a>(
    bindings: &BTreeMap<String, Value>,
    names: impl IntoIterator<Item = &'a String>,
) -> BTreeMap<String, Value> {
    let mut out = bindings.clone();
    for n in names {
        out.remove(n);
    }
    out
}

fn sub_value(v: &Value, b: &BTreeMap<String, Value>) -> Value {
    match v {
        Value::Var(x) => b.get(x).cloned().unwrap_or_else(|| v.clone()),
        Value::RecFun {
            fun_name,
            param,
            param_type,
            result_type,
            latent,
            body,
        } => {
            let inner = without(b, [fun_name, param]);
            Value::RecFun {
                fun_name: fun_name.clone(),
                param: param.clone(),
                param_type: param_type.clone(),
                result_type: result_type.clone(),
                latent: latent.clone(),
                body: Box::new(if inner.is_empty() {
                    (**body).clone()
                } else {
                    sub_expr(body, &inner)
                }),
            }
        }
        Value::Succ(inner) => Value::Succ(Box::new(sub_value(inner, b))),
        Value::Unit | Value::Zero | Value::True | Value::False => v.clone(),
    }
}

fn sub_expr(e: &Expression, b: &BTreeMap<String, Value>) -> Expression {
    match e {
        Expression::App(v1, v2) => Expression::App(sub_value(v1, b), sub_value(v2, b)),
        Expression::OpCall { op, args } => Expression::OpCall {
            op: op.clone(),
            args: args.iter().map(|a| sub_value(a, b)).collect(),
        },
        Expression::Return(v) => Expression::Return(sub_value(v, b)),
        Expression::Prim { op, arg } => Expression::Prim {
            op: *op,
            arg: sub_value(arg, b),
        },
        Expression::Do { binder, first, rest } => {
            let inner = without(b, [binder]);
            Expression::Do {
                binder: binder.clone(),
                first: Box::new(sub_expr(first, b)),
                rest: Box::new(if inner.is_empty() {
                    (**rest).clone()
                } else {
                    sub_expr(rest, &inner)
                }),
            }
        }
        Expression::If {
            cond,
            then_branch,
            else_branch,
        } => Expression::If {
            cond: sub_value(cond, b),
            then_branch: Box::new(sub_expr(then_branch, b)),
            else_branch: Box::new(sub_expr(else_branch, b)),
        },
        Expression::With { handler, body } => Expression::With {
            handler: Handler {
                clauses: handler
                    .clauses
                    .iter()
                    .map(|c| {
                        let inner = without(b, &c.params);
                        Clause {
                            op: c.op.clone(),
                            params: c.params.clone(),
                            body: if inner.is_empty() {
                                c.body.clone()
                            } else {
                                sub_expr(&c.body, &inner)
                            },
                            mode: c.mode,
                        }
                    })
                    .collect(),
                final_binder: handler.final_binder.clone(),
                final_expr: {
                    let inner = without(b, [&handler.final_binder]);
                    Box::new(if inner.is_empty() {
                        (*handler.final_expr).clone()
                    } else {
                        sub_expr(&handler.final_expr, &inner)
                    })
                },
            },
            body: Box::new(sub_expr(body, b)),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_lang::ast::Value as V;

    fn bind(pairs: &[(&str, V)]) -> BTreeMap<String, V> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect()
    }

    #[test]
    fn substitute_variable_in_return() {
        let e = Expression::Return(V::var("x"));
        let out = substitute(&e, &bind(&[("x", V::Zero)]));
        assert_eq!(out, Expression::Return(V::Zero));
    }

    #[test]
    fn inner_binder_shadows() {
        // do x <- return x; return x — only the bound occurrence is replaced.
        let e = Expression::do_bind(
            "x",
            Expression::Return(V::var("x")),
            Expression::Return(V::var("x")),
        );
        let out = substitute(&e, &bind(&[("x", V::True)]));
        assert_eq!(
            out,
            Expression::do_bind(
                "x",
                Expression::Return(V::True),
                Expression::Return(V::var("x")),
            )
        );
    }

    #[test]
    fn empty_substitution_is_identity() {
        let e = Expression::do_bind(
            "y",
            Expression::op_call("choose", vec![]),
            Expression::ite(
                V::var("y"),
                Expression::Return(V::var("z")),
                Expression::Return(V::Zero),
            ),
        );
        assert_eq!(substitute(&e, &BTreeMap::new()), e);
        assert_eq!(free_vars_expr(&e), BTreeSet::from(["z".to_string()]));
    }
}
