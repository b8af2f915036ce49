//! The reduction engine: pure reduction (including handler dispatch),
//! monadic one-step reduction, the total configuration step, its Kleisli
//! iteration, result extraction, the finitary semantics, and the approximant
//! chain.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::core_lang::ast::{Clause, Expression, Handler, PrimOp, Value};
use crate::core_lang::subst::substitute;
use crate::effect_algebra::ClauseMode;
use crate::monad_kernel::{bind, bottom, fmap, unit, MonadTag, MonadicElement, OperationImpl};

/// A reduction configuration: a (closed) expression still computing, a final
/// value, or the gone-wrong marker.
#[derive(Debug, Clone, PartialEq)]
pub enum Configuration {
    ExpC(Expression),
    ValC(Value),
    WrongC,
}

/// A final result: a value or the gone-wrong marker.
#[derive(Debug, Clone, PartialEq)]
pub enum Res {
    Val(Value),
    Wrong,
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Configuration::ExpC(e) => write!(f, "{e}"),
            Configuration::ValC(v) => write!(f, "{v}"),
            Configuration::WrongC => write!(f, "wrong"),
        }
    }
}

impl fmt::Display for Res {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Res::Val(v) => write!(f, "{v}"),
            Res::Wrong => write!(f, "wrong"),
        }
    }
}

// Monadic elements need ordered payloads; order configurations by kind, then
// by (injective) printing.
impl Ord for Configuration {
    fn cmp(&self, other: &Self) -> Ordering {
        fn rank(c: &Configuration) -> u8 {
            match c {
                Configuration::ExpC(_) => 0,
                Configuration::ValC(_) => 1,
                Configuration::WrongC => 2,
            }
        }
        rank(self)
            .cmp(&rank(other))
            .then_with(|| self.to_string().cmp(&other.to_string()))
    }
}

impl PartialOrd for Configuration {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Eq for Configuration {}

impl Ord for Res {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Res::Val(a), Res::Val(b)) => a.cmp(b),
            (Res::Val(_), Res::Wrong) => Ordering::Less,
            (Res::Wrong, Res::Val(_)) => Ordering::Greater,
            (Res::Wrong, Res::Wrong) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Res {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Eq for Res {}

/// Operation name → implementation, the `mrun` dispatch table.
pub type OpTable = BTreeMap<String, OperationImpl>;

/// What a monadic step records about itself: whether it performed an
/// operation. The label carries the one-step effect needed by subject
/// reduction: `Raised(op)` contributes the singleton effect `{op}`, `Silent`
/// the trivial effect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepLabel {
    Silent,
    Raised(String),
}

fn clause_bindings(c: &Clause, args: &[Value]) -> BTreeMap<String, Value> {
    c.params
        .iter()
        .cloned()
        .zip(args.iter().cloned())
        .collect()
}

/// One pure reduction step, if any rule applies. Deterministic by syntax
/// direction; `Do`, `OpCall`, and `Return` are pure-normal forms.
pub fn pure_step(e: &Expression) -> Option<Expression> {
    match e {
        Expression::App(fun, arg) => match fun {
            Value::RecFun {
                fun_name, param, body, ..
            } => {
                let bindings = BTreeMap::from([
                    (fun_name.clone(), fun.clone()),
                    (param.clone(), arg.clone()),
                ]);
                Some(substitute(body, &bindings))
            }
            _ => None,
        },
        Expression::If {
            cond,
            then_branch,
            else_branch,
        } => match cond {
            Value::True => Some((**then_branch).clone()),
            Value::False => Some((**else_branch).clone()),
            _ => None,
        },
        Expression::Prim { op, arg } => {
            let n = arg.as_numeral()?;
            let out = match op {
                PrimOp::Pred => Value::numeral(n.saturating_sub(1)),
                PrimOp::IsZero => {
                    if n == 0 {
                        Value::True
                    } else {
                        Value::False
                    }
                }
                PrimOp::Even => {
                    if n % 2 == 0 {
                        Value::True
                    } else {
                        Value::False
                    }
                }
            };
            Some(Expression::Return(out))
        }
        Expression::With { handler, body } => Some(with_step(handler, body)?),
        Expression::Do { .. } | Expression::OpCall { .. } | Expression::Return(_) => None,
    }
}

/// Handler dispatch: the five structural rules, falling back to reduction
/// inside the handled expression.
fn with_step(h: &Handler, body: &Expression) -> Option<Expression> {
    match body {
        // with h handle (do y <- e1; e2)  →
        // with {clauses; y: with h handle e2} handle e1
        Expression::Do { binder, first, rest } => {
            let inner = Handler {
                clauses: h.clauses.clone(),
                final_binder: binder.clone(),
                final_expr: Box::new(Expression::With {
                    handler: h.clone(),
                    body: rest.clone(),
                }),
            };
            Some(Expression::With {
                handler: inner,
                body: first.clone(),
            })
        }
        // with h handle (return v)  →  do x <- return v; e_final
        Expression::Return(v) => Some(Expression::Do {
            binder: h.final_binder.clone(),
            first: Box::new(Expression::Return(v.clone())),
            rest: h.final_expr.clone(),
        }),
        Expression::OpCall { op, args } => match h.clause_for(op) {
            // continue-clause: do x <- body[args/params]; e_final
            Some(c) if c.mode == ClauseMode::Continue => Some(Expression::Do {
                binder: h.final_binder.clone(),
                first: Box::new(substitute(&c.body, &clause_bindings(c, args))),
                rest: h.final_expr.clone(),
            }),
            // stop-clause: body[args/params], continuation severed
            Some(c) => Some(substitute(&c.body, &clause_bindings(c, args))),
            // unhandled: forward, do x <- op(args); e_final
            None => Some(Expression::Do {
                binder: h.final_binder.clone(),
                first: Box::new(body.clone()),
                rest: h.final_expr.clone(),
            }),
        },
        _ => {
            let next = pure_step(body)?;
            Some(Expression::With {
                handler: h.clone(),
                body: Box::new(next),
            })
        }
    }
}

/// Monadic one-step reduction. Tries, in order: the bind-of-return rule, the
/// congruence rule for `Do`, the effect rule for operation calls (labelled
/// with the operation), and finally a pure step. Absence covers both
/// `Return`-forms and stuck expressions.
pub fn monadic_step(
    e: &Expression,
    tag: &MonadTag,
    ops: &OpTable,
) -> Option<(MonadicElement<Expression>, StepLabel)> {
    match e {
        Expression::Do { binder, first, rest } => match &**first {
            Expression::Return(v) => {
                let sub = substitute(rest, &BTreeMap::from([(binder.clone(), v.clone())]));
                Some((unit(tag, sub), StepLabel::Silent))
            }
            _ => {
                let (m, label) = monadic_step(first, tag, ops)?;
                let lifted = fmap(
                    |e1: &Expression| Expression::Do {
                        binder: binder.clone(),
                        first: Box::new(e1.clone()),
                        rest: rest.clone(),
                    },
                    &m,
                );
                Some((lifted, label))
            }
        },
        Expression::OpCall { op, args } => {
            let imp = ops.get(op)?;
            let m = crate::monad_kernel::mrun(imp, tag, args)?;
            Some((
                fmap(|v: &Value| Expression::Return(v.clone()), &m),
                StepLabel::Raised(op.clone()),
            ))
        }
        _ => pure_step(e).map(|e2| (unit(tag, e2), StepLabel::Silent)),
    }
}

/// The total configuration step: expressions reduce, `Return` finishes,
/// stuck expressions go wrong, results step to themselves.
pub fn conf_step(
    c: &Configuration,
    tag: &MonadTag,
    ops: &OpTable,
) -> MonadicElement<Configuration> {
    match c {
        Configuration::ValC(_) | Configuration::WrongC => unit(tag, c.clone()),
        Configuration::ExpC(e) => match monadic_step(e, tag, ops) {
            Some((m, _)) => fmap(|e2: &Expression| Configuration::ExpC(e2.clone()), &m),
            None => match e {
                Expression::Return(v) => unit(tag, Configuration::ValC(v.clone())),
                _ => unit(tag, Configuration::WrongC),
            },
        },
    }
}

/// `n`-fold Kleisli iteration of the configuration step from `unit(c)`.
pub fn kleisli_iterate(
    c: &Configuration,
    n: usize,
    tag: &MonadTag,
    ops: &OpTable,
) -> MonadicElement<Configuration> {
    let mut m = unit(tag, c.clone());
    for _ in 0..n {
        m = bind(&m, |c| conf_step(c, tag, ops));
    }
    m
}

/// True iff the monadic configuration lies in the image of the result
/// embedding: every payload is a value or the wrong marker.
pub fn is_result(m: &MonadicElement<Configuration>) -> bool {
    m.all_payloads(|c| !matches!(c, Configuration::ExpC(_)))
}

/// Extracts the monadic result determined so far: result payloads embed, and
/// still-computing expressions contribute the least element.
///
/// For the list monad, the least element is the empty list and concatenation
/// cannot continue past it (appending after an undetermined segment would
/// break the prefix order), so extraction keeps the longest fully-determined
/// prefix rather than skipping over pending expressions.
pub fn res_extract(m: &MonadicElement<Configuration>, tag: &MonadTag) -> MonadicElement<Res> {
    if let MonadicElement::List(l) = m {
        let mut out = Vec::new();
        for c in l {
            match c {
                Configuration::ValC(v) => out.push(Res::Val(v.clone())),
                Configuration::WrongC => out.push(Res::Wrong),
                Configuration::ExpC(_) => break,
            }
        }
        return MonadicElement::List(out);
    }
    bind(m, |c| match c {
        Configuration::ValC(v) => unit(tag, Res::Val(v.clone())),
        Configuration::WrongC => unit(tag, Res::Wrong),
        Configuration::ExpC(_) => bottom(tag),
    })
}

/// The outcome of running or approximating a program.
#[derive(Debug, Clone, PartialEq)]
pub enum SemanticsOutcome {
    Converged {
        result: MonadicElement<Res>,
        steps: usize,
    },
    Diverged {
        budget: usize,
    },
    Chain {
        entries: Vec<MonadicElement<Res>>,
        converged: bool,
    },
}

/// Runs the configuration step until a monadic result is reached or the
/// budget runs out. Stopping at the first result is sound: a result only
/// reduces to itself.
pub fn finitary_sem(
    e: &Expression,
    budget: usize,
    tag: &MonadTag,
    ops: &OpTable,
) -> SemanticsOutcome {
    finitary_sem_traced(e, budget, tag, ops, None)
}

/// As [`finitary_sem`], optionally appending one line per step (including
/// the initial configuration) in the form `n: <pretty-printed element>`.
pub fn finitary_sem_traced(
    e: &Expression,
    budget: usize,
    tag: &MonadTag,
    ops: &OpTable,
    mut trace: Option<&mut Vec<String>>,
) -> SemanticsOutcome {
    let mut m = unit(tag, Configuration::ExpC(e.clone()));
    for steps in 0..=budget {
        if let Some(t) = trace.as_deref_mut() {
            t.push(format!("{steps}: {m}"));
        }
        if is_result(&m) {
            return SemanticsOutcome::Converged {
                result: res_extract(&m, tag),
                steps,
            };
        }
        if steps == budget {
            break;
        }
        m = bind(&m, |c| conf_step(c, tag, ops));
    }
    SemanticsOutcome::Diverged { budget }
}

/// The approximant chain `[res(stepⁿ(e)) | n = 0..maxN]`. Panics if the
/// chain is not increasing in the approximation order (it always is, by
/// construction). The convergence flag is set when the underlying monadic
/// configuration became a result and the chain stabilized.
pub fn approximant_chain(
    e: &Expression,
    max_n: usize,
    tag: &MonadTag,
    ops: &OpTable,
) -> SemanticsOutcome {
    let mut m = unit(tag, Configuration::ExpC(e.clone()));
    let mut entries = Vec::with_capacity(max_n + 1);
    let mut converged = false;
    for n in 0..=max_n {
        let r = res_extract(&m, tag);
        if let Some(prev) = entries.last() {
            assert!(
                crate::monad_kernel::order_leq(prev, &r),
                "approximant chain not increasing at index {n}: {prev} vs {r}"
            );
            if is_result(&m) && *prev == r {
                converged = true;
            }
        }
        entries.push(r);
        if n < max_n {
            m = bind(&m, |c| conf_step(c, tag, ops));
        }
    }
    SemanticsOutcome::Chain { entries, converged }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_lang::ast::{OpSig, SignatureTable};
    use crate::core_lang::parser::parse_program;
    use crate::monad_kernel::{ExcVal, OpKind};
    use crate::type_system::types::Type;
    use std::collections::BTreeSet;

    fn exception_setup() -> (MonadTag, OpTable, SignatureTable) {
        let tag = MonadTag::Exception {
            exc_names: BTreeSet::from(["PredZero".to_string()]),
        };
        let sig = OpSig {
            arg_types: vec![],
            return_type: Type::Bot,
        };
        let imp = OperationImpl {
            op: "raise_PredZero".into(),
            kind: OpKind::Raise("PredZero".into()),
            sig: sig.clone(),
        };
        let sigs = SignatureTable::from([("raise_PredZero".to_string(), sig)]);
        (tag, OpTable::from([("raise_PredZero".to_string(), imp)]), sigs)
    }

    fn list_setup() -> (MonadTag, OpTable, SignatureTable) {
        let sig = OpSig {
            arg_types: vec![],
            return_type: Type::Bool,
        };
        let imp = OperationImpl {
            op: "choose".into(),
            kind: OpKind::Choose,
            sig: sig.clone(),
        };
        (
            MonadTag::NondetList,
            OpTable::from([("choose".to_string(), imp)]),
            SignatureTable::from([("choose".to_string(), sig)]),
        )
    }

    const PREDFUN: &str = "rec f(x: Nat): Nat ! eps | raise_PredZero = \
                           do y <- iszero(x); if y then raise_PredZero() else pred(x)";

    #[test]
    fn predfun_converges_to_zero_in_six_steps() {
        let (tag, ops, sigs) = exception_setup();
        let p = parse_program(&format!("({PREDFUN}) 1"), &sigs).unwrap();
        let mut trace = Vec::new();
        let out = finitary_sem_traced(&p.main, 64, &tag, &ops, Some(&mut trace));
        match out {
            SemanticsOutcome::Converged { result, steps } => {
                assert_eq!(result, MonadicElement::Exception(ExcVal::Val(Res::Val(Value::Zero))));
                assert_eq!(steps, 6);
            }
            other => panic!("expected convergence, got {other:?}"),
        }
        assert_eq!(trace.len(), 7);
        assert_eq!(trace.last().unwrap(), "6: 0");
    }

    #[test]
    fn predfun_on_zero_raises() {
        let (tag, ops, sigs) = exception_setup();
        let p = parse_program(&format!("({PREDFUN}) 0"), &sigs).unwrap();
        match finitary_sem(&p.main, 64, &tag, &ops) {
            SemanticsOutcome::Converged { result, steps } => {
                assert_eq!(
                    result,
                    MonadicElement::Exception(ExcVal::Exc("PredZero".into()))
                );
                assert_eq!(steps, 5);
            }
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn choose_program_reaches_both_values_in_four_steps() {
        let (tag, ops, sigs) = list_setup();
        let p = parse_program(
            "do y <- choose(); if y then return 0 else return 1",
            &sigs,
        )
        .unwrap();
        let m = kleisli_iterate(&Configuration::ExpC(p.main.clone()), 4, &tag, &ops);
        assert_eq!(
            m,
            MonadicElement::List(vec![
                Configuration::ValC(Value::Zero),
                Configuration::ValC(Value::numeral(1)),
            ])
        );
        match finitary_sem(&p.main, 64, &tag, &ops) {
            SemanticsOutcome::Converged { result, steps } => {
                assert_eq!(
                    result,
                    MonadicElement::List(vec![Res::Val(Value::Zero), Res::Val(Value::numeral(1))])
                );
                assert_eq!(steps, 4);
            }
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn values_do_not_reduce() {
        let (tag, ops, _) = list_setup();
        assert!(monadic_step(&Expression::Return(Value::Zero), &tag, &ops).is_none());
    }

    #[test]
    fn stuck_write_goes_wrong() {
        let tag = MonadTag::PointedOutput {
            locations: BTreeSet::from(["l".to_string()]),
        };
        let imp = OperationImpl {
            op: "write_l".into(),
            kind: OpKind::Write("l".into()),
            sig: OpSig {
                arg_types: vec![Type::Nat],
                return_type: Type::Unit,
            },
        };
        let ops = OpTable::from([("write_l".to_string(), imp)]);
        let e = Expression::op_call("write_l", vec![Value::True]);
        assert!(monadic_step(&e, &tag, &ops).is_none());
        assert_eq!(
            conf_step(&Configuration::ExpC(e), &tag, &ops),
            unit(&tag, Configuration::WrongC)
        );
    }

    #[test]
    fn stop_clause_handles_exception() {
        // with {raise_PredZero() =s -> return 0; finally x -> return x}
        // handle predfun 0  ⇒* 0
        let (tag, ops, sigs) = exception_setup();
        let src = format!(
            "with {{ raise_PredZero() =s -> return 0; finally x -> return x }} \
             handle ({PREDFUN}) 0"
        );
        let p = parse_program(&src, &sigs).unwrap();
        match finitary_sem(&p.main, 64, &tag, &ops) {
            SemanticsOutcome::Converged { result, .. } => {
                assert_eq!(result, MonadicElement::Exception(ExcVal::Val(Res::Val(Value::Zero))));
            }
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn results_are_fixpoints() {
        let (tag, ops, _) = exception_setup();
        for c in [
            Configuration::ValC(Value::Zero),
            Configuration::WrongC,
        ] {
            assert_eq!(conf_step(&c, &tag, &ops), unit(&tag, c.clone()));
        }
    }

    #[test]
    fn approximant_chain_of_return() {
        let (tag, ops, _) = exception_setup();
        let out = approximant_chain(&Expression::Return(Value::Zero), 2, &tag, &ops);
        match out {
            SemanticsOutcome::Chain { entries, converged } => {
                assert_eq!(
                    entries,
                    vec![
                        MonadicElement::Exception(ExcVal::Bottom),
                        MonadicElement::Exception(ExcVal::Val(Res::Val(Value::Zero))),
                        MonadicElement::Exception(ExcVal::Val(Res::Val(Value::Zero))),
                    ]
                );
                assert!(converged);
            }
            other => panic!("expected chain, got {other:?}"),
        }
    }

    #[test]
    fn chfun_up_diverges_but_approximants_grow() {
        let (tag, ops, sigs) = list_setup();
        let src = "(rec f(x: Nat): Nat ! choose* . choose = \
                    do y <- choose(); if y then return x else f succ(x)) 0";
        let p = parse_program(src, &sigs).unwrap();
        assert_eq!(
            finitary_sem(&p.main, 64, &tag, &ops),
            SemanticsOutcome::Diverged { budget: 64 }
        );
        match approximant_chain(&p.main, 30, &tag, &ops) {
            SemanticsOutcome::Chain { entries, converged } => {
                assert!(!converged);
                // One pass through the loop costs 4 steps after the initial
                // application, so value k settles at step 5 + 4k: by step 30
                // the chain has collected [0, 1, …, 6].
                let expect: Vec<Res> = (0..=6).map(|k| Res::Val(Value::numeral(k))).collect();
                assert_eq!(*entries.last().unwrap(), MonadicElement::List(expect));
            }
            other => panic!("expected chain, got {other:?}"),
        }
    }
}
