//! Executable checks of the meta-theory at desk scale: progress, per-step
//! subject reduction, operation/interpretation compatibility, finitary
//! soundness, and approximant-level infinitary soundness — over golden
//! programs and randomly generated well-typed terms.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::core_lang::ast::{Clause, Expression, Handler, Program, SignatureTable, Value};
use crate::effect_algebra::automaton::{eff_concat, EffectAutomaton};
use crate::effect_algebra::include::{eff_includes, Inclusion, InclusionBounds};
use crate::effect_algebra::ClauseMode;
use crate::interp::{lift_member, InterpKind};
use crate::monad_kernel::{mrun, MonadTag};
use crate::step_semantics::{
    finitary_sem, monadic_step, OpTable, Res, SemanticsOutcome, StepLabel,
};
use crate::type_system::{infer_expr, infer_value, subtype, Context, Subtype, Type, TypeAndEffect};

/// The outcome of one meta-theoretic check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    /// An effect-inclusion query fell outside the decidable regime; the
    /// check is inconclusive, never silently passed.
    Undecided,
}

#[derive(Debug, Clone, Serialize)]
pub struct HarnessVerdict {
    pub property: String,
    pub subject: String,
    pub verdict: Verdict,
    pub witness: Option<String>,
    /// True when the property held for lack of anything to check (e.g.
    /// soundness of a program that never converged within budget).
    pub vacuous: bool,
}

impl HarnessVerdict {
    fn pass(property: &str, subject: String) -> HarnessVerdict {
        HarnessVerdict {
            property: property.to_string(),
            subject,
            verdict: Verdict::Pass,
            witness: None,
            vacuous: false,
        }
    }

    fn fail(property: &str, subject: String, witness: String) -> HarnessVerdict {
        HarnessVerdict {
            property: property.to_string(),
            subject,
            verdict: Verdict::Fail,
            witness: Some(witness),
            vacuous: false,
        }
    }

    fn undecided(property: &str, subject: String, witness: String) -> HarnessVerdict {
        HarnessVerdict {
            property: property.to_string(),
            subject,
            verdict: Verdict::Undecided,
            witness: Some(witness),
            vacuous: false,
        }
    }

    fn vacuous_pass(property: &str, subject: String, note: String) -> HarnessVerdict {
        HarnessVerdict {
            property: property.to_string(),
            subject,
            verdict: Verdict::Pass,
            witness: Some(note),
            vacuous: true,
        }
    }
}

impl fmt::Display for HarnessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}", self.property, self.verdict)?;
        if self.vacuous {
            write!(f, " (vacuous)")?;
        }
        if let Some(w) = &self.witness {
            write!(f, " [{w}]")?;
        }
        Ok(())
    }
}

/// Aggregated counts over a batch of verdicts.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct SuiteStats {
    pub checks: u64,
    pub passes: u64,
    pub fails: u64,
    pub undecided: u64,
    pub vacuous: u64,
}

impl SuiteStats {
    pub fn record(&mut self, v: &HarnessVerdict) {
        self.checks += 1;
        match v.verdict {
            Verdict::Pass => self.passes += 1,
            Verdict::Fail => self.fails += 1,
            Verdict::Undecided => self.undecided += 1,
        }
        if v.vacuous {
            self.vacuous += 1;
        }
    }
}

fn value_typechecks(v: &Value, want: &Type, sigs: &SignatureTable, bounds: InclusionBounds) -> bool {
    infer_value(&Context::empty(), v, sigs, bounds)
        .is_ok_and(|t| subtype(&t, want, bounds) == Subtype::Yes)
}

fn res_typechecks(r: &Res, want: &Type, sigs: &SignatureTable, bounds: InclusionBounds) -> bool {
    match r {
        Res::Val(v) => value_typechecks(v, want, sigs, bounds),
        Res::Wrong => false,
    }
}

/// Progress: a well-typed closed expression is a `return` or takes a
/// monadic step. An ill-typed subject is reported as a failed precondition.
pub fn check_progress(
    e: &Expression,
    sigs: &SignatureTable,
    tag: &MonadTag,
    ops: &OpTable,
    bounds: InclusionBounds,
) -> HarnessVerdict {
    let subject = e.to_string();
    if let Err(err) = infer_expr(&Context::empty(), e, sigs, bounds) {
        return HarnessVerdict::fail("progress", subject, format!("precondition: {err}"));
    }
    if matches!(e, Expression::Return(_)) || monadic_step(e, tag, ops).is_some() {
        HarnessVerdict::pass("progress", subject)
    } else {
        HarnessVerdict::fail("progress", subject, "well-typed expression is stuck".into())
    }
}

/// One-step subject reduction: stepping a well-typed expression lands, at
/// the step's effect label, in the lifting of "still well-typed at a
/// residual effect" — each residual expression re-infers at a compatible
/// type, the label-then-residual effect is included in the original one,
/// and the stepped element belongs to the lifted well-typedness predicate.
pub fn check_step_sr(
    e: &Expression,
    sigs: &SignatureTable,
    tag: &MonadTag,
    ops: &OpTable,
    kind: InterpKind,
    bounds: InclusionBounds,
) -> HarnessVerdict {
    let subject = e.to_string();
    let te = match infer_expr(&Context::empty(), e, sigs, bounds) {
        Ok(te) => te,
        Err(err) => {
            return HarnessVerdict::fail("step-sr", subject, format!("precondition: {err}"))
        }
    };
    let Some((m, label)) = monadic_step(e, tag, ops) else {
        return HarnessVerdict::vacuous_pass(
            "step-sr",
            subject,
            "no step (return or stuck)".into(),
        );
    };
    let step_eff = match &label {
        StepLabel::Silent => EffectAutomaton::eps(),
        StepLabel::Raised(op) => EffectAutomaton::atom(op.clone()),
    };
    let mut undecided = None;
    for payload in m.payloads() {
        let residual = match infer_expr(&Context::empty(), payload, sigs, bounds) {
            Ok(r) => r,
            Err(err) => {
                return HarnessVerdict::fail(
                    "step-sr",
                    subject,
                    format!("residual `{payload}` is ill-typed: {err}"),
                )
            }
        };
        match subtype(&residual.ty, &te.ty, bounds) {
            Subtype::Yes => {}
            Subtype::No => {
                return HarnessVerdict::fail(
                    "step-sr",
                    subject,
                    format!(
                        "residual `{payload}` has type `{}`, not a subtype of `{}`",
                        residual.ty, te.ty
                    ),
                )
            }
            Subtype::Unknown => {
                undecided = Some(format!("residual `{payload}`: subtype undecided"));
            }
        }
        let composed = eff_concat(&step_eff, &residual.eff);
        match eff_includes(&composed, &te.eff, bounds) {
            Inclusion::Yes => {}
            Inclusion::No(w) => {
                return HarnessVerdict::fail(
                    "step-sr",
                    subject,
                    format!("residual `{payload}`: label-then-residual effect leaks {w}"),
                )
            }
            Inclusion::Unknown => {
                undecided = Some(format!("residual `{payload}`: effect inclusion undecided"));
            }
        }
    }
    if let Some(w) = undecided {
        return HarnessVerdict::undecided("step-sr", subject, w);
    }
    let well_typed = |e2: &Expression| {
        infer_expr(&Context::empty(), e2, sigs, bounds)
            .is_ok_and(|r| subtype(&r.ty, &te.ty, bounds) == Subtype::Yes)
    };
    match lift_member(kind, &m, &well_typed, &step_eff) {
        Ok(true) => HarnessVerdict::pass("step-sr", subject),
        Ok(false) => HarnessVerdict::fail(
            "step-sr",
            subject,
            format!("stepped element {m} outside the lifted well-typedness predicate"),
        ),
        Err(err) => HarnessVerdict::fail("step-sr", subject, err.to_string()),
    }
}

/// Closed values of a base type, bounded: numerals up to five, both
/// booleans, the unit value; none of the empty type.
fn enumerate_values(ty: &Type) -> Vec<Value> {
    match ty {
        Type::Nat => (0..=5).map(Value::numeral).collect(),
        Type::Bool => vec![Value::True, Value::False],
        Type::Unit => vec![Value::Unit],
        _ => vec![],
    }
}

/// Operation compatibility: whenever the operation semantics is defined on
/// well-typed arguments, its output belongs to the lifting of the
/// operation's return type at the singleton effect.
pub fn check_run_compat(
    sigs: &SignatureTable,
    ops: &OpTable,
    tag: &MonadTag,
    kind: InterpKind,
    bounds: InclusionBounds,
) -> HarnessVerdict {
    for (name, imp) in ops {
        let Some(sig) = sigs.get(name) else {
            return HarnessVerdict::fail(
                "run-compat",
                name.clone(),
                "operation implemented but not declared".into(),
            );
        };
        // Cartesian product of bounded value enumerations per argument.
        let mut tuples: Vec<Vec<Value>> = vec![vec![]];
        for t in &sig.arg_types {
            let choices = enumerate_values(t);
            tuples = tuples
                .iter()
                .flat_map(|tp| {
                    choices.iter().map(move |v| {
                        let mut tp2 = tp.clone();
                        tp2.push(v.clone());
                        tp2
                    })
                })
                .collect();
        }
        for args in &tuples {
            let Some(out) = mrun(imp, tag, args) else {
                continue;
            };
            let pred =
                |v: &Value| value_typechecks(v, &sig.return_type, sigs, bounds);
            match lift_member(kind, &out, &pred, &EffectAutomaton::atom(name.clone())) {
                Ok(true) => {}
                Ok(false) => {
                    return HarnessVerdict::fail(
                        "run-compat",
                        name.clone(),
                        format!("mrun output {out} outside lifting for arguments {args:?}"),
                    )
                }
                Err(err) => {
                    return HarnessVerdict::fail("run-compat", name.clone(), err.to_string())
                }
            }
        }
    }
    HarnessVerdict::pass("run-compat", "all declared operations".into())
}

/// Finitary soundness: a converged result belongs to the lifting of the
/// inferred type at the inferred effect. Divergence within budget passes
/// vacuously and is flagged as such.
pub fn check_finitary_soundness(
    e: &Expression,
    budget: usize,
    sigs: &SignatureTable,
    tag: &MonadTag,
    ops: &OpTable,
    kind: InterpKind,
    bounds: InclusionBounds,
) -> HarnessVerdict {
    let subject = e.to_string();
    let te = match infer_expr(&Context::empty(), e, sigs, bounds) {
        Ok(te) => te,
        Err(err) => {
            return HarnessVerdict::fail("finitary", subject, format!("precondition: {err}"))
        }
    };
    match finitary_sem(e, budget, tag, ops) {
        SemanticsOutcome::Diverged { budget } => HarnessVerdict::vacuous_pass(
            "finitary",
            subject,
            format!("diverged within {budget}"),
        ),
        SemanticsOutcome::Converged { result, .. } => {
            let pred = |r: &Res| res_typechecks(r, &te.ty, sigs, bounds);
            match lift_member(kind, &result, &pred, &te.eff) {
                Ok(true) => HarnessVerdict::pass("finitary", subject),
                Ok(false) => HarnessVerdict::fail(
                    "finitary",
                    subject,
                    format!("result {result} outside lifting at inferred effect"),
                ),
                Err(err) => HarnessVerdict::fail("finitary", subject, err.to_string()),
            }
        }
        SemanticsOutcome::Chain { .. } => unreachable!("finitary_sem never returns a chain"),
    }
}

/// Infinitary soundness at the approximant level: every entry of the
/// approximant chain belongs to the lifting of the inferred type and effect.
pub fn check_infinitary_soundness(
    e: &Expression,
    max_n: usize,
    sigs: &SignatureTable,
    tag: &MonadTag,
    ops: &OpTable,
    kind: InterpKind,
    bounds: InclusionBounds,
) -> HarnessVerdict {
    let subject = e.to_string();
    let te = match infer_expr(&Context::empty(), e, sigs, bounds) {
        Ok(te) => te,
        Err(err) => {
            return HarnessVerdict::fail("infinitary", subject, format!("precondition: {err}"))
        }
    };
    let SemanticsOutcome::Chain { entries, .. } =
        crate::step_semantics::approximant_chain(e, max_n, tag, ops)
    else {
        unreachable!("approximant_chain always returns a chain");
    };
    let pred = |r: &Res| res_typechecks(r, &te.ty, sigs, bounds);
    for (n, entry) in entries.iter().enumerate() {
        match lift_member(kind, entry, &pred, &te.eff) {
            Ok(true) => {}
            Ok(false) => {
                return HarnessVerdict::fail(
                    "infinitary",
                    subject,
                    format!("approximant {n} = {entry} outside lifting"),
                )
            }
            Err(err) => return HarnessVerdict::fail("infinitary", subject, err.to_string()),
        }
    }
    HarnessVerdict::pass("infinitary", subject)
}

/// Checks progress and one-step subject reduction along every reachable
/// residual of `e` for up to `budget` steps, deduplicating residuals and
/// capping the frontier to keep branching programs tractable.
pub fn check_progress_and_sr_iterated(
    e: &Expression,
    budget: usize,
    sigs: &SignatureTable,
    tag: &MonadTag,
    ops: &OpTable,
    kind: InterpKind,
    bounds: InclusionBounds,
    stats: &mut SuiteStats,
) -> Vec<HarnessVerdict> {
    const FRONTIER_CAP: usize = 64;
    let mut failures = Vec::new();
    let mut frontier = vec![e.clone()];
    for _ in 0..=budget {
        let mut next: Vec<Expression> = Vec::new();
        for cur in &frontier {
            let p = check_progress(cur, sigs, tag, ops, bounds);
            stats.record(&p);
            if p.verdict != Verdict::Pass {
                failures.push(p);
            }
            let sr = check_step_sr(cur, sigs, tag, ops, kind, bounds);
            stats.record(&sr);
            if sr.verdict == Verdict::Fail {
                failures.push(sr);
            }
            if let Some((m, _)) = monadic_step(cur, tag, ops) {
                for payload in m.payloads() {
                    if next.len() < FRONTIER_CAP && !next.contains(payload) {
                        next.push(payload.clone());
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    failures
}

/// A seeded, derivation-directed generator of closed well-typed terms.
/// Recursion enters only through fixed annotation templates, so all effect
/// inclusions raised by checking generated terms stay in the exact regime.
pub struct TermGenerator {
    rng: ChaCha8Rng,
    /// Binder counter local to this generator, so equal seeds reproduce
    /// byte-identical terms regardless of global state.
    counter: u64,
    pub size_bound: usize,
    pub sigs: SignatureTable,
    pub tag: MonadTag,
}

impl TermGenerator {
    pub fn new(seed: u64, size_bound: usize, sigs: SignatureTable, tag: MonadTag) -> TermGenerator {
        assert!(size_bound >= 1);
        TermGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            counter: 0,
            size_bound,
            sigs,
            tag,
        }
    }

    fn fresh(&mut self, prefix: &str) -> String {
        self.counter += 1;
        format!("{prefix}{}", self.counter)
    }

    /// The checker's type for `e` under a slice-shaped context.
    fn infer_in(&self, ctx: &[(String, Type)], e: &Expression) -> Option<Type> {
        let mut c = Context::empty();
        for (x, t) in ctx {
            c = c.extended(x.clone(), t.clone());
        }
        infer_expr(&c, e, &self.sigs, InclusionBounds::default())
            .ok()
            .map(|te| te.ty)
    }

    /// Operations whose arguments can be enumerated at base types (an
    /// argument of the empty type can never be supplied).
    fn callable_ops(&self) -> Vec<String> {
        self.sigs
            .iter()
            .filter(|(_, sig)| {
                sig.arg_types
                    .iter()
                    .all(|t| matches!(t, Type::Nat | Type::Bool | Type::Unit))
            })
            .map(|(name, _)| name.clone())
            .collect()
    }

    fn gen_base_type(&mut self) -> Type {
        match self.rng.gen_range(0..3) {
            0 => Type::Nat,
            1 => Type::Bool,
            _ => Type::Unit,
        }
    }

    fn gen_value(&mut self, ctx: &[(String, Type)], ty: &Type) -> Value {
        let vars: Vec<&String> = ctx
            .iter()
            .filter(|(_, t)| t == ty)
            .map(|(x, _)| x)
            .collect();
        if !vars.is_empty() && self.rng.gen_bool(0.5) {
            return Value::var(vars[self.rng.gen_range(0..vars.len())].clone());
        }
        match ty {
            Type::Nat => Value::numeral(self.rng.gen_range(0..4)),
            Type::Bool => {
                if self.rng.gen_bool(0.5) {
                    Value::True
                } else {
                    Value::False
                }
            }
            _ => Value::Unit,
        }
    }

    /// A recursive function drawn from the fixed annotation templates that
    /// are available under the generator's monad; `None` when no operation
    /// of the right kind is declared.
    fn template_fun(&mut self) -> Option<(Value, bool)> {
        let raise = self
            .sigs
            .keys()
            .find(|n| n.starts_with("raise_"))
            .cloned();
        let choose = self.sigs.contains_key("choose");
        let write = self
            .sigs
            .keys()
            .find(|n| n.starts_with("write_"))
            .cloned();
        let mut templates: Vec<(String, bool)> = Vec::new();
        if let Some(r) = raise {
            // Converges or raises; never loops.
            templates.push((
                format!(
                    "rec f(x: Nat): Nat ! eps | {r} = \
                     do y <- iszero(x); if y then {r}() else pred(x)"
                ),
                false,
            ));
        }
        if choose {
            // Terminating branch on every path plus a descending recursion.
            templates.push((
                "rec f(x: Nat): Nat ! choose* = \
                 do b <- choose(); if b then return x else \
                 (do y <- iszero(x); if y then return x else (do p <- pred(x); f p))"
                    .into(),
                false,
            ));
            // May stop at any natural or choose forever. The diverging
            // branch keeps the stepped list-monad element linear in the
            // step count, where an unconditional recursion would double it
            // on every unfolding.
            templates.push((
                "rec f(x: Nat): Nat ! choose* | choose^w = \
                 do b <- choose(); if b then return x else f succ(x)"
                    .into(),
                true,
            ));
        }
        if let Some(w) = write.clone() {
            templates.push((
                format!(
                    "rec f(x: Nat): Unit ! {w}* = \
                     do y <- iszero(x); if y then return unit else \
                     (do u <- {w}(x); do p <- pred(x); f p)"
                ),
                false,
            ));
            templates.push((
                format!("rec f(x: Nat): Unit ! {w}^w = do u <- {w}(x); f succ(x)"),
                true,
            ));
        }
        if templates.is_empty() {
            return None;
        }
        let (src, diverges) = templates[self.rng.gen_range(0..templates.len())].clone();
        let program = crate::core_lang::parser::parse_program(
            &format!("return ({src})"),
            &self.sigs,
        )
        .expect("generator templates parse");
        let Expression::Return(v) = program.main else {
            unreachable!("template wrapper is a return");
        };
        Some((v, diverges))
    }

    fn gen_expr(&mut self, ctx: &[(String, Type)], target: &Type, size: usize) -> Expression {
        if size <= 1 {
            return Expression::Return(self.gen_value(ctx, target));
        }
        let ops = self.callable_ops();
        loop {
            match self.rng.gen_range(0..12) {
                // Sequencing through a fresh binder.
                0..=2 => {
                    let mid = self.gen_base_type();
                    let binder = self.fresh("g");
                    let first = self.gen_expr(ctx, &mid, size / 2);
                    // Bind at the checker's inferred type, which can land
                    // strictly below `mid` (an unhandled raise infers the
                    // empty type); tracking the generator's looser guess
                    // instead would let later choices drift off-derivation.
                    let precise = self
                        .infer_in(ctx, &first)
                        .expect("generated subterm checks");
                    let mut ctx2 = ctx.to_vec();
                    ctx2.push((binder.clone(), precise));
                    let rest = self.gen_expr(&ctx2, target, size - size / 2);
                    return Expression::Do {
                        binder,
                        first: Box::new(first),
                        rest: Box::new(rest),
                    };
                }
                // Branch on a boolean value.
                3..=4 => {
                    let cond = self.gen_value(ctx, &Type::Bool);
                    let t = self.gen_expr(ctx, target, size / 2);
                    let e2 = self.gen_expr(ctx, target, size / 2);
                    return Expression::ite(cond, t, e2);
                }
                // A primitive on a natural.
                5 => {
                    let arg = self.gen_value(ctx, &Type::Nat);
                    let (op, ty) = match self.rng.gen_range(0..3) {
                        0 => (crate::core_lang::ast::PrimOp::Pred, Type::Nat),
                        1 => (crate::core_lang::ast::PrimOp::IsZero, Type::Bool),
                        _ => (crate::core_lang::ast::PrimOp::Even, Type::Bool),
                    };
                    if &ty != target {
                        continue;
                    }
                    return Expression::Prim { op, arg };
                }
                // An operation call whose return type matches the target.
                6..=7 if !ops.is_empty() => {
                    let op = ops[self.rng.gen_range(0..ops.len())].clone();
                    let sig = self.sigs.get(&op).unwrap().clone();
                    if subtype(&sig.return_type, target, InclusionBounds::default())
                        != Subtype::Yes
                    {
                        continue;
                    }
                    let args = sig
                        .arg_types
                        .iter()
                        .map(|t| self.gen_value(ctx, t))
                        .collect();
                    return Expression::OpCall { op, args };
                }
                // Apply a recursive template function to a small numeral.
                8 => {
                    let Some((f, _)) = self.template_fun() else {
                        continue;
                    };
                    let matches_target = match &f {
                        Value::RecFun { result_type, .. } => result_type == target,
                        _ => false,
                    };
                    if !matches_target {
                        continue;
                    }
                    let arg = Value::numeral(self.rng.gen_range(0..3));
                    return Expression::App(f, arg);
                }
                // Handle a generated body with a generated handler.
                9 => {
                    if let Some(h) = self.gen_handler(ctx, target, size) {
                        return h;
                    }
                    continue;
                }
                _ => return Expression::Return(self.gen_value(ctx, target)),
            }
        }
    }

    /// A handler over a generated body: stop-clauses for raises produce the
    /// output type directly; continue-clauses for other operations produce
    /// the operation's return type.
    fn gen_handler(
        &mut self,
        ctx: &[(String, Type)],
        target: &Type,
        size: usize,
    ) -> Option<Expression> {
        let ops = self.callable_ops();
        if ops.is_empty() {
            return None;
        }
        let op = ops[self.rng.gen_range(0..ops.len())].clone();
        let sig = self.sigs.get(&op).unwrap().clone();
        let (mode, clause_target) = if matches!(sig.return_type, Type::Bot) {
            (ClauseMode::Stop, target.clone())
        } else {
            (ClauseMode::Continue, sig.return_type.clone())
        };
        let params: Vec<String> = sig.arg_types.iter().map(|_| self.fresh("p")).collect();
        let mut clause_ctx = ctx.to_vec();
        for (p, t) in params.iter().zip(&sig.arg_types) {
            clause_ctx.push((p.clone(), t.clone()));
        }
        let body = self.gen_expr(&clause_ctx, &clause_target, size / 3);
        let final_binder = self.fresh("r");
        let handled = self.gen_expr(ctx, target, size / 2);
        // The handler's output type is the checker's inferred type of the
        // handled body (the final expression just returns its binder). When
        // that inference lands strictly below the base target — say the body
        // ends in an unhandled raise, inferring the empty type — a
        // stop-clause generated at the target would not check; skip rather
        // than emit a term the checker rejects.
        match self.infer_in(ctx, &handled) {
            Some(t) if &t == target => {}
            _ => return None,
        }
        Some(Expression::With {
            handler: Handler {
                clauses: vec![Clause {
                    op,
                    params,
                    body,
                    mode,
                }],
                final_binder: final_binder.clone(),
                final_expr: Box::new(Expression::Return(Value::var(final_binder))),
            },
            body: Box::new(handled),
        })
    }

    /// Generates one closed well-typed expression along with the type and
    /// effect the checker assigns to it. Generation is directed by the
    /// typing rules, and the checker's verdict is asserted as a sanity
    /// gate: a generated term failing to check is a generator bug.
    pub fn generate(&mut self, bounds: InclusionBounds) -> (Expression, TypeAndEffect) {
        let target = self.gen_base_type();
        let size = self.rng.gen_range(1..=self.size_bound);
        let e = self.gen_expr(&[], &target, size);
        let te = infer_expr(&Context::empty(), &e, &self.sigs, bounds)
            .unwrap_or_else(|err| panic!("generated term `{e}` fails to check: {err}"));
        assert_eq!(
            subtype(&te.ty, &target, bounds),
            Subtype::Yes,
            "generated term `{e}` missed its target type"
        );
        (e, te)
    }
}

/// Convenience wrapper matching the generator's public contract.
pub fn generate_well_typed(
    gen: &mut TermGenerator,
    bounds: InclusionBounds,
) -> (Expression, TypeAndEffect) {
    gen.generate(bounds)
}

/// Builds the operation table induced by a signature table under the naming
/// convention: `raise_<name>` raises, `choose` branches, `write_<loc>`
/// writes.
pub fn op_table_from_signatures(sigs: &SignatureTable) -> OpTable {
    use crate::monad_kernel::{OpKind, OperationImpl};
    let mut out = OpTable::new();
    for (name, sig) in sigs {
        let kind = if let Some(e) = name.strip_prefix("raise_") {
            OpKind::Raise(e.to_string())
        } else if name == "choose" {
            OpKind::Choose
        } else if let Some(loc) = name.strip_prefix("write_") {
            OpKind::Write(loc.to_string())
        } else {
            continue;
        };
        out.insert(
            name.clone(),
            OperationImpl {
                op: name.clone(),
                kind,
                sig: sig.clone(),
            },
        );
    }
    out
}

/// Parses a program and returns it with its operation table; a convenience
/// for tests and the front end.
pub fn load_program(src: &str, sigs: &SignatureTable) -> Result<(Program, OpTable), String> {
    let p = crate::core_lang::parser::parse_program(src, sigs).map_err(|e| e.to_string())?;
    let ops = op_table_from_signatures(sigs);
    Ok((p, ops))
}
