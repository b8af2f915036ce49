//! Abstract interpretations of effect types: homomorphisms from effect
//! automata into small ordered monoids, membership in lifted predicates, and
//! a brute-force axiom suite for the lifting laws.
//!
//! Each interpretation assigns to an effect automaton an abstract summary
//! (reachable exception set, a may-branch flag, a result-count bound, an
//! output-length bound, or the automaton itself), and to each predicate on
//! results a predicate on monadic elements. The axiom suite checks the
//! lifting laws exhaustively over small universes; the existential
//! non-determinism interpretation is expected to fail the image-closure law
//! and the suite reports the concrete witness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::effect_algebra::automaton::{eff_concat, EffectAutomaton};
use crate::effect_algebra::include::{eff_includes, Inclusion, InclusionBounds};
use crate::monad_kernel::{bind, bottom, fmap, unit, ExcVal, MonadTag, MonadicElement};

/// The shipped interpretations of effect types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InterpKind {
    /// Which exceptions may be raised, plus `ok` for normal return.
    ExcSets,
    /// Every list element well-typed, list length bounded by the branch count.
    NondetAll01,
    /// Some list element well-typed (or no element at all); an intentionally
    /// weaker, "may"-style interpretation.
    NondetEx01,
    /// Every list element well-typed, length bounded by 2^(choice depth).
    NondetCount,
    /// Output word no longer than the effect's longest write sequence.
    OutputLength,
    /// Output word exactly in (or, while undetermined, a prefix of) the
    /// effect language.
    OutputExact,
    /// Distribution support well-typed and bounded like the counting
    /// interpretation.
    DistSupport,
}

impl InterpKind {
    /// Whether this interpretation applies to elements of the given monad.
    pub fn compatible(&self, tag: &MonadTag) -> bool {
        match self {
            InterpKind::ExcSets => matches!(tag, MonadTag::Exception { .. }),
            InterpKind::NondetAll01 | InterpKind::NondetEx01 | InterpKind::NondetCount => {
                matches!(tag, MonadTag::NondetList)
            }
            InterpKind::OutputLength | InterpKind::OutputExact => {
                matches!(tag, MonadTag::PointedOutput { .. })
            }
            InterpKind::DistSupport => matches!(tag, MonadTag::Distribution),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InterpKind::ExcSets => "exc-sets",
            InterpKind::NondetAll01 => "nondet-all01",
            InterpKind::NondetEx01 => "nondet-ex01",
            InterpKind::NondetCount => "nondet-count",
            InterpKind::OutputLength => "output-length",
            InterpKind::OutputExact => "output-exact",
            InterpKind::DistSupport => "dist-support",
        }
    }

    pub fn from_name(s: &str) -> Option<InterpKind> {
        [
            InterpKind::ExcSets,
            InterpKind::NondetAll01,
            InterpKind::NondetEx01,
            InterpKind::NondetCount,
            InterpKind::OutputLength,
            InterpKind::OutputExact,
            InterpKind::DistSupport,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

/// A natural number extended with infinity; the carrier of the counting and
/// length monoids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

impl ExtNat {
    pub fn saturating_add(self, other: ExtNat) -> ExtNat {
        match (self, other) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => ExtNat::Fin(a.saturating_add(b)),
            _ => ExtNat::Inf,
        }
    }

    pub fn saturating_mul(self, other: ExtNat) -> ExtNat {
        match (self, other) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => ExtNat::Fin(a.saturating_mul(b)),
            _ => ExtNat::Inf,
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(n) => write!(f, "{n}"),
            ExtNat::Inf => write!(f, "inf"),
        }
    }
}

/// The abstract summary an interpretation assigns to an effect automaton.
#[derive(Debug, Clone, PartialEq)]
pub enum AbstractEffect {
    /// Exception names that may be raised, plus the marker `ok` when the
    /// effect admits normal return.
    ExcSets(BTreeSet<String>),
    /// Whether any branching at all may occur.
    Flag(bool),
    /// A bound on the number of results, or on the output length.
    Bound(ExtNat),
    /// The effect automaton itself (the identity interpretation).
    Exact(EffectAutomaton),
}

/// The marker for normal return in the exception-set monoid.
pub const OK: &str = "ok";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InterpError {
    #[error("interpretation `{kind}` expects only `{expected}` operations, found `{op}`")]
    AlphabetViolation {
        kind: &'static str,
        expected: &'static str,
        op: String,
    },
    #[error("interpretation `{kind}` does not apply to this monadic element")]
    IncompatibleElement { kind: &'static str },
}

/// States from which some accepted continuation exists: either a finite
/// accepting state is reachable or an accepting cycle is.
fn live_states(e: &EffectAutomaton) -> BTreeSet<usize> {
    let mut targets = e.fin_accept.clone();
    for scc in e.accepting_sccs() {
        targets.extend(scc);
    }
    e.co_reachable(&targets)
}

/// Exceptions reachable as the first symbol of some accepted word, plus `ok`
/// when the empty word is accepted. Later raises on the same word are
/// unreachable at runtime and are deliberately dropped.
pub fn hom_exceptions(e: &EffectAutomaton) -> Result<BTreeSet<String>, InterpError> {
    for op in &e.alphabet {
        if op.strip_prefix("raise_").is_none() {
            return Err(InterpError::AlphabetViolation {
                kind: "exc-sets",
                expected: "raise",
                op: op.clone(),
            });
        }
    }
    let mut out = BTreeSet::new();
    if e.accepts_empty_word() {
        out.insert(OK.to_string());
    }
    let live = live_states(e);
    for (p, op, q) in &e.transitions {
        if *p == e.initial && live.contains(q) {
            out.insert(op.strip_prefix("raise_").unwrap().to_string());
        }
    }
    Ok(out)
}

fn check_alphabet(
    e: &EffectAutomaton,
    kind: &'static str,
    expected: &'static str,
    allowed: impl Fn(&str) -> bool,
) -> Result<(), InterpError> {
    for op in &e.alphabet {
        if !allowed(op) {
            return Err(InterpError::AlphabetViolation {
                kind,
                expected,
                op: op.clone(),
            });
        }
    }
    Ok(())
}

/// The supremum of accepted word lengths: infinite when an infinite word is
/// accepted or a cycle lies on an initial-to-accepting path, else the longest
/// path in the remaining acyclic useful subgraph.
fn sup_word_len(e: &EffectAutomaton) -> ExtNat {
    if !e.inf_empty() {
        return ExtNat::Inf;
    }
    let useful: BTreeSet<usize> = e
        .reachable()
        .intersection(&e.co_reachable(&e.fin_accept))
        .copied()
        .collect();
    // A cycle inside the useful subgraph pumps unboundedly long words. SCC
    // membership respects usefulness, so whole SCCs are either in or out.
    for scc in e.sccs() {
        if !scc.iter().all(|s| useful.contains(s)) {
            continue;
        }
        let internal = e
            .transitions
            .iter()
            .any(|(p, _, q)| scc.contains(p) && scc.contains(q));
        if scc.len() > 1 || internal {
            return ExtNat::Inf;
        }
    }
    if !useful.contains(&e.initial) {
        return ExtNat::Fin(0);
    }
    // Longest path by memoized DFS on the acyclic useful subgraph.
    fn best(
        e: &EffectAutomaton,
        useful: &BTreeSet<usize>,
        memo: &mut BTreeMap<usize, u64>,
        v: usize,
    ) -> u64 {
        if let Some(&b) = memo.get(&v) {
            return b;
        }
        let mut m = 0;
        for (p, _, q) in &e.transitions {
            if *p == v && useful.contains(q) {
                m = m.max(1 + best(e, useful, memo, *q));
            }
        }
        memo.insert(v, m);
        m
    }
    ExtNat::Fin(best(e, &useful, &mut BTreeMap::new(), e.initial))
}

/// Whether the effect admits any non-trivial branching: the language
/// contains a non-empty word.
pub fn hom_nondet01(e: &EffectAutomaton) -> Result<bool, InterpError> {
    check_alphabet(e, "nondet-01", "choose", |op| op == "choose")?;
    Ok(sup_word_len(e) > ExtNat::Fin(0))
}

/// Bound on the number of results: 2^(maximal choice depth), infinite when
/// the depth is unbounded.
pub fn hom_count(e: &EffectAutomaton) -> Result<ExtNat, InterpError> {
    check_alphabet(e, "nondet-count", "choose", |op| op == "choose")?;
    Ok(match sup_word_len(e) {
        ExtNat::Inf => ExtNat::Inf,
        ExtNat::Fin(n) if n >= 63 => ExtNat::Inf,
        ExtNat::Fin(n) => ExtNat::Fin(1 << n),
    })
}

/// Bound on the output length: the supremum of accepted word lengths.
pub fn hom_outlen(e: &EffectAutomaton) -> Result<ExtNat, InterpError> {
    check_alphabet(e, "output-length", "write", |op| op.starts_with("write_"))?;
    Ok(sup_word_len(e))
}

/// Maps an output-word entry back to the operation symbol that wrote it.
/// Write operations are named `write_<location>` throughout.
fn write_symbol(loc: &str) -> String {
    format!("write_{loc}")
}

/// Whether `word` can be extended to an accepted (finite or infinite) word.
fn is_live_prefix(e: &EffectAutomaton, word: &[String]) -> bool {
    let live = live_states(e);
    let mut cur = BTreeSet::from([e.initial]);
    for a in word {
        cur = e
            .transitions
            .iter()
            .filter(|(p, l, _)| cur.contains(p) && l == a)
            .map(|(_, _, q)| *q)
            .collect();
        if cur.is_empty() {
            return false;
        }
    }
    cur.iter().any(|q| live.contains(q))
}

/// Membership of a monadic element in the lifting of `pred` at effect `eff`.
///
/// The least element always belongs (every lifting is pointed); beyond that
/// each kind checks its own shape: exception raised within the allowed set
/// or a well-typed value under `ok`; list elements well-typed with the
/// kind's cardinality bound (or, for the existential kind, emptiness or one
/// witness); output word within the length bound or exactly in the effect
/// language (a prefix of it while the payload is undetermined); distribution
/// support well-typed and bounded.
pub fn lift_member<P: Ord + Clone>(
    kind: InterpKind,
    m: &MonadicElement<P>,
    pred: &dyn Fn(&P) -> bool,
    eff: &EffectAutomaton,
) -> Result<bool, InterpError> {
    let incompatible = || InterpError::IncompatibleElement { kind: kind.name() };
    match kind {
        InterpKind::ExcSets => {
            let k = hom_exceptions(eff)?;
            match m {
                MonadicElement::Exception(ExcVal::Bottom) => Ok(true),
                MonadicElement::Exception(ExcVal::Exc(e)) => Ok(k.contains(e.as_str())),
                MonadicElement::Exception(ExcVal::Val(r)) => Ok(k.contains(OK) && pred(r)),
                _ => Err(incompatible()),
            }
        }
        InterpKind::NondetAll01 | InterpKind::NondetCount => {
            // The two-point interpretation bounds only the no-branching
            // case (at most one result); once branching is allowed the
            // cardinality is unconstrained, which is what makes the flag
            // monoid's idempotent composition lawful.
            let n = match kind {
                InterpKind::NondetAll01 => {
                    if hom_nondet01(eff)? {
                        ExtNat::Inf
                    } else {
                        ExtNat::Fin(1)
                    }
                }
                _ => hom_count(eff)?,
            };
            let MonadicElement::List(l) = m else {
                return Err(incompatible());
            };
            Ok(ExtNat::Fin(l.len() as u64) <= n && l.iter().all(|x| pred(x)))
        }
        InterpKind::NondetEx01 => {
            let MonadicElement::List(l) = m else {
                return Err(incompatible());
            };
            if hom_nondet01(eff)? {
                Ok(l.is_empty() || l.iter().any(|x| pred(x)))
            } else {
                Ok(l.len() <= 1 && l.iter().all(|x| pred(x)))
            }
        }
        InterpKind::OutputLength => {
            let n = hom_outlen(eff)?;
            let MonadicElement::Output { word, payload } = m else {
                return Err(incompatible());
            };
            Ok(ExtNat::Fin(word.len() as u64) <= n
                && payload.as_ref().is_none_or(|r| pred(r)))
        }
        InterpKind::OutputExact => {
            check_alphabet(eff, "output-exact", "write", |op| op.starts_with("write_"))?;
            let MonadicElement::Output { word, payload } = m else {
                return Err(incompatible());
            };
            let symbols: Vec<String> = word.iter().map(|(loc, _)| write_symbol(loc)).collect();
            Ok(match payload {
                None => is_live_prefix(eff, &symbols),
                Some(r) => eff.accepts_word(&symbols) && pred(r),
            })
        }
        InterpKind::DistSupport => {
            let n = hom_count(eff)?;
            let MonadicElement::Dist(d) = m else {
                return Err(incompatible());
            };
            Ok(ExtNat::Fin(d.len() as u64) <= n && d.keys().all(|x| pred(x)))
        }
    }
}

/// Multiplication in the target monoid of each interpretation's summary:
/// exception sets compose through `ok`, flags join, counts multiply, lengths
/// add.
pub fn abstract_mul(a: &AbstractEffect, b: &AbstractEffect) -> AbstractEffect {
    match (a, b) {
        (AbstractEffect::ExcSets(k1), AbstractEffect::ExcSets(k2)) => {
            let mut out: BTreeSet<String> =
                k1.iter().filter(|e| e.as_str() != OK).cloned().collect();
            if k1.contains(OK) {
                out.extend(k2.iter().cloned());
            }
            AbstractEffect::ExcSets(out)
        }
        (AbstractEffect::Flag(x), AbstractEffect::Flag(y)) => AbstractEffect::Flag(*x || *y),
        (AbstractEffect::Bound(x), AbstractEffect::Bound(y)) => {
            AbstractEffect::Bound(x.saturating_mul(*y))
        }
        _ => panic!("abstract_mul: mismatched summaries"),
    }
}

/// Addition-style multiplication for the length monoid (lengths add rather
/// than multiply).
pub fn abstract_add(a: &AbstractEffect, b: &AbstractEffect) -> AbstractEffect {
    match (a, b) {
        (AbstractEffect::Bound(x), AbstractEffect::Bound(y)) => {
            AbstractEffect::Bound(x.saturating_add(*y))
        }
        _ => panic!("abstract_add: mismatched summaries"),
    }
}

/// The order of each target monoid.
pub fn abstract_leq(a: &AbstractEffect, b: &AbstractEffect) -> bool {
    match (a, b) {
        (AbstractEffect::ExcSets(k1), AbstractEffect::ExcSets(k2)) => k1.is_subset(k2),
        (AbstractEffect::Flag(x), AbstractEffect::Flag(y)) => *x <= *y,
        (AbstractEffect::Bound(x), AbstractEffect::Bound(y)) => x <= y,
        _ => panic!("abstract_leq: mismatched summaries"),
    }
}

/// The verdict for one lifting law.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionVerdict {
    pub condition: String,
    pub pass: bool,
    pub counterexample: Option<String>,
}

/// The axiom-suite report: one verdict per lifting law.
#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub kind: String,
    pub universe: usize,
    pub verdicts: Vec<ConditionVerdict>,
}

impl LawReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn failed(&self) -> Vec<&ConditionVerdict> {
        self.verdicts.iter().filter(|v| !v.pass).collect()
    }
}

/// Enumerates monadic elements over a payload universe, bounded: lists up to
/// `size_cap` elements, distributions with support at most two and dyadic
/// weights, output words up to `size_cap` entries with small counters.
pub fn enumerate_elements<P: Ord + Clone>(
    tag: &MonadTag,
    universe: &[P],
    size_cap: usize,
) -> Vec<MonadicElement<P>> {
    match tag {
        MonadTag::Exception { exc_names } => {
            let mut out = vec![MonadicElement::Exception(ExcVal::Bottom)];
            out.extend(
                exc_names
                    .iter()
                    .map(|e| MonadicElement::Exception(ExcVal::Exc(e.clone()))),
            );
            out.extend(
                universe
                    .iter()
                    .map(|x| MonadicElement::Exception(ExcVal::Val(x.clone()))),
            );
            out
        }
        MonadTag::NondetList => {
            let mut layers: Vec<Vec<P>> = vec![vec![]];
            let mut out = vec![MonadicElement::List(vec![])];
            for _ in 0..size_cap {
                let mut next = Vec::new();
                for l in &layers {
                    for x in universe {
                        let mut l2 = l.clone();
                        l2.push(x.clone());
                        out.push(MonadicElement::List(l2.clone()));
                        next.push(l2);
                    }
                }
                layers = next;
            }
            out
        }
        MonadTag::Distribution => {
            let w = |num: i64, den: i64| BigRational::new(BigInt::from(num), BigInt::from(den));
            let weights = [w(1, 4), w(1, 2), w(1, 1)];
            let mut out = vec![MonadicElement::Dist(BTreeMap::new())];
            for (i, x) in universe.iter().enumerate() {
                for wx in &weights {
                    out.push(MonadicElement::Dist(BTreeMap::from([(
                        x.clone(),
                        wx.clone(),
                    )])));
                    for y in universe.iter().skip(i + 1) {
                        for wy in &weights {
                            if wx + wy <= w(1, 1) {
                                out.push(MonadicElement::Dist(BTreeMap::from([
                                    (x.clone(), wx.clone()),
                                    (y.clone(), wy.clone()),
                                ])));
                            }
                        }
                    }
                }
            }
            out
        }
        MonadTag::PointedOutput { locations } => {
            let letters: Vec<(String, u64)> = locations
                .iter()
                .flat_map(|l| [(l.clone(), 0), (l.clone(), 1)])
                .collect();
            let mut words: Vec<Vec<(String, u64)>> = vec![vec![]];
            let mut layer = vec![vec![]];
            for _ in 0..size_cap {
                let mut next = Vec::new();
                for wd in &layer {
                    for a in &letters {
                        let mut w2: Vec<(String, u64)> = wd.clone();
                        w2.push(a.clone());
                        words.push(w2.clone());
                        next.push(w2);
                    }
                }
                layer = next;
            }
            let mut out = Vec::new();
            for wd in &words {
                out.push(MonadicElement::Output {
                    word: wd.clone(),
                    payload: None,
                });
                for x in universe {
                    out.push(MonadicElement::Output {
                        word: wd.clone(),
                        payload: Some(x.clone()),
                    });
                }
            }
            out
        }
    }
}

/// All functions from `0..from` to `0..to`, each as a lookup table.
fn all_functions(from: usize, to: usize) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = vec![vec![]];
    for _ in 0..from {
        let mut next = Vec::new();
        for f in &out {
            for y in 0..to {
                let mut f2 = f.clone();
                f2.push(y as u8);
                next.push(f2);
            }
        }
        out = next;
    }
    out
}

fn in_mask(mask: u32, x: u8) -> bool {
    mask & (1 << x) != 0
}

/// Brute-force verification of the lifting laws for one interpretation over
/// small universes and the given effect samples:
///
/// - `naturality`: membership in the lifting of a preimage predicate is
///   preserved by mapping the element forward;
/// - `monotone`: effect inclusion implies lifting inclusion;
/// - `unit`: a well-typed value's unit belongs to the trivial-effect lifting;
/// - `mult`: flattening a nested element in the lifting-of-a-lifting lands
///   in the lifting at the composed effect;
/// - `image-closure`: an element of the lifting over an image predicate is
///   the forward map of an element of the lifting over the original (the
///   must-soundness law; the existential kind fails it by design);
/// - `bottom`: the least element belongs to every lifting.
pub fn lifting_axiom_suite(
    kind: InterpKind,
    tag: &MonadTag,
    universe_size: usize,
    effect_samples: &[EffectAutomaton],
    bounds: InclusionBounds,
) -> Result<LawReport, InterpError> {
    assert!(universe_size >= 1 && universe_size <= 4);
    let xs: Vec<u8> = (0..universe_size as u8).collect();
    let elements = enumerate_elements(tag, &xs, 2);
    let masks: Vec<u32> = (0..(1u32 << universe_size)).collect();
    let mut verdicts = Vec::new();

    // naturality: m in lift(f^-1 A) implies fmap f m in lift(A).
    let fn_size = universe_size.min(3);
    let funs = all_functions(fn_size, fn_size);
    let small_xs: Vec<u8> = (0..fn_size as u8).collect();
    let small_elements = enumerate_elements(tag, &small_xs, 2);
    let small_masks: Vec<u32> = (0..(1u32 << fn_size)).collect();
    {
        let mut cx = None;
        'nat: for f in &funs {
            for &a in &small_masks {
                for eff in effect_samples {
                    for m in &small_elements {
                        let pre = |x: &u8| in_mask(a, f[*x as usize]);
                        let post = |y: &u8| in_mask(a, *y);
                        if lift_member(kind, m, &pre, eff)?
                            && !lift_member(kind, &fmap(|x: &u8| f[*x as usize], m), &post, eff)?
                        {
                            cx = Some(format!("f={f:?}, A=mask {a:#b}, m={m:?}"));
                            break 'nat;
                        }
                    }
                }
            }
        }
        verdicts.push(ConditionVerdict {
            condition: "naturality".into(),
            pass: cx.is_none(),
            counterexample: cx,
        });
    }

    // monotone: eff1 included in eff2 implies lift^eff1 within lift^eff2.
    {
        let mut cx = None;
        'mono: for e1 in effect_samples {
            for e2 in effect_samples {
                if eff_includes(e1, e2, bounds) != Inclusion::Yes {
                    continue;
                }
                for &a in &masks {
                    let pred = |x: &u8| in_mask(a, *x);
                    for m in &elements {
                        if lift_member(kind, m, &pred, e1)? && !lift_member(kind, m, &pred, e2)? {
                            cx = Some(format!(
                                "eff1={}, eff2={}, A=mask {a:#b}, m={m:?}",
                                crate::type_system::effect_display(e1),
                                crate::type_system::effect_display(e2),
                            ));
                            break 'mono;
                        }
                    }
                }
            }
        }
        verdicts.push(ConditionVerdict {
            condition: "monotone".into(),
            pass: cx.is_none(),
            counterexample: cx,
        });
    }

    // unit: x in A implies unit(x) in lift^{eps}(A).
    {
        let eps = EffectAutomaton::eps();
        let mut cx = None;
        for &a in &masks {
            let pred = |x: &u8| in_mask(a, *x);
            for x in &xs {
                if pred(x) && !lift_member(kind, &unit(tag, *x), &pred, &eps)? {
                    cx = Some(format!("A=mask {a:#b}, x={x}"));
                }
            }
        }
        verdicts.push(ConditionVerdict {
            condition: "unit".into(),
            pass: cx.is_none(),
            counterexample: cx,
        });
    }

    // mult: M in lift^{e1}(lift^{e2}(A)) implies join(M) in lift^{e1.e2}(A).
    {
        let nested = enumerate_elements(tag, &elements, 2);
        let mut cx = None;
        'mult: for e1 in effect_samples {
            for e2 in effect_samples {
                let composed = eff_concat(e1, e2);
                for &a in &masks {
                    let pred = |x: &u8| in_mask(a, *x);
                    let inner_pred = |inner: &MonadicElement<u8>| {
                        lift_member(kind, inner, &pred, e2).unwrap_or(false)
                    };
                    for big in &nested {
                        if lift_member(kind, big, &inner_pred, e1)? {
                            let joined = bind(big, |inner| inner.clone());
                            if !lift_member(kind, &joined, &pred, &composed)? {
                                cx = Some(format!(
                                    "eff1={}, eff2={}, A=mask {a:#b}, M={big:?}",
                                    crate::type_system::effect_display(e1),
                                    crate::type_system::effect_display(e2),
                                ));
                                break 'mult;
                            }
                        }
                    }
                }
            }
        }
        verdicts.push(ConditionVerdict {
            condition: "mult".into(),
            pass: cx.is_none(),
            counterexample: cx,
        });
    }

    // image-closure: n in lift(f(A)) implies n = fmap f m for some m in
    // lift(A). This is the must-soundness law; the existential kind fails it.
    {
        let mut cx = None;
        'img: for f in &funs {
            for &a in &small_masks {
                let image: u32 = small_xs
                    .iter()
                    .filter(|x| in_mask(a, **x))
                    .map(|x| 1u32 << f[*x as usize])
                    .fold(0, |acc, b| acc | b);
                let img_pred = |y: &u8| in_mask(image, *y);
                let pre_pred = |x: &u8| in_mask(a, *x);
                for eff in effect_samples {
                    for n in &small_elements {
                        if !lift_member(kind, n, &img_pred, eff)? {
                            continue;
                        }
                        let mut found = false;
                        for m in &small_elements {
                            if fmap(|x: &u8| f[*x as usize], m) == *n
                                && lift_member(kind, m, &pre_pred, eff)?
                            {
                                found = true;
                                break;
                            }
                        }
                        if !found {
                            cx = Some(format!("f={f:?}, A=mask {a:#b}, n={n:?}"));
                            break 'img;
                        }
                    }
                }
            }
        }
        verdicts.push(ConditionVerdict {
            condition: "image-closure".into(),
            pass: cx.is_none(),
            counterexample: cx,
        });
    }

    // bottom: the least element belongs to every lifting.
    {
        let bot: MonadicElement<u8> = bottom(tag);
        let mut cx = None;
        for eff in effect_samples {
            for &a in &masks {
                let pred = |x: &u8| in_mask(a, *x);
                if !lift_member(kind, &bot, &pred, eff)? {
                    cx = Some(format!(
                        "eff={}, A=mask {a:#b}",
                        crate::type_system::effect_display(eff)
                    ));
                }
            }
        }
        verdicts.push(ConditionVerdict {
            condition: "bottom".into(),
            pass: cx.is_none(),
            counterexample: cx,
        });
    }

    Ok(LawReport {
        kind: kind.name().to_string(),
        universe: universe_size,
        verdicts,
    })
}

/// Brute-force verification of the Kleisli-triple laws for one monad:
/// left unit, right unit, and associativity, over all enumerated elements
/// and all functions into a representative family of images (the least
/// element, every unit, and one maximally "wide" element).
pub fn kleisli_law_suite(tag: &MonadTag, universe_size: usize) -> LawReport {
    assert!(universe_size >= 1 && universe_size <= 4);
    let xs: Vec<u8> = (0..universe_size as u8).collect();
    let elements = enumerate_elements(tag, &xs, 2);

    // Candidate images for Kleisli arrows.
    let mut candidates: Vec<MonadicElement<u8>> = vec![bottom(tag)];
    for x in &xs {
        candidates.push(unit(tag, *x));
    }
    let wide: MonadicElement<u8> = match tag {
        MonadTag::Exception { exc_names } => {
            MonadicElement::Exception(ExcVal::Exc(exc_names.iter().next().cloned().unwrap()))
        }
        MonadTag::NondetList => MonadicElement::List(xs.clone()),
        MonadTag::Distribution => {
            let half = BigRational::new(BigInt::from(1), BigInt::from(2));
            MonadicElement::Dist(
                xs.iter()
                    .take(2)
                    .map(|x| (*x, half.clone()))
                    .collect(),
            )
        }
        MonadTag::PointedOutput { locations } => MonadicElement::Output {
            word: vec![(locations.iter().next().cloned().unwrap(), 1)],
            payload: Some(xs[0]),
        },
    };
    candidates.push(wide);

    // All functions from the universe into the candidate family.
    let mut arrows: Vec<Vec<MonadicElement<u8>>> = vec![vec![]];
    for _ in 0..universe_size {
        let mut next = Vec::new();
        for f in &arrows {
            for c in &candidates {
                let mut f2 = f.clone();
                f2.push(c.clone());
                next.push(f2);
            }
        }
        arrows = next;
    }
    let apply = |f: &[MonadicElement<u8>], x: &u8| f[*x as usize].clone();

    let mut verdicts = Vec::new();
    {
        let mut cx = None;
        'lu: for f in &arrows {
            for x in &xs {
                if bind(&unit(tag, *x), |y| apply(f, y)) != apply(f, x) {
                    cx = Some(format!("x={x}, f({x})={:?}", apply(f, x)));
                    break 'lu;
                }
            }
        }
        verdicts.push(ConditionVerdict {
            condition: "left-unit".into(),
            pass: cx.is_none(),
            counterexample: cx,
        });
    }
    {
        let mut cx = None;
        for m in &elements {
            if bind(m, |x| unit(tag, *x)) != *m {
                cx = Some(format!("m={m:?}"));
            }
        }
        verdicts.push(ConditionVerdict {
            condition: "right-unit".into(),
            pass: cx.is_none(),
            counterexample: cx,
        });
    }
    {
        let mut cx = None;
        'assoc: for f in &arrows {
            for g in &arrows {
                for m in &elements {
                    let lhs = bind(&bind(m, |x| apply(f, x)), |y| apply(g, y));
                    let rhs = bind(m, |x| bind(&apply(f, x), |y| apply(g, y)));
                    if lhs != rhs {
                        cx = Some(format!("m={m:?}, lhs={lhs:?}, rhs={rhs:?}"));
                        break 'assoc;
                    }
                }
            }
        }
        verdicts.push(ConditionVerdict {
            condition: "associativity".into(),
            pass: cx.is_none(),
            counterexample: cx,
        });
    }
    LawReport {
        kind: "kleisli".to_string(),
        universe: universe_size,
        verdicts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effect_algebra::automaton::compile;
    use crate::effect_algebra::expr::parse_effect_expr;

    fn auto(src: &str) -> EffectAutomaton {
        compile(&parse_effect_expr(src).unwrap())
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn kleisli_laws_hold_for_all_four_monads() {
        // The arrow family grows as (universe+2)^universe; rational
        // arithmetic makes the distribution and output monads markedly
        // slower per bind, so they run on the smaller universe.
        let tags = [
            (
                MonadTag::Exception {
                    exc_names: BTreeSet::from(["e".into()]),
                },
                3,
            ),
            (MonadTag::NondetList, 3),
            (MonadTag::Distribution, 2),
            (
                MonadTag::PointedOutput {
                    locations: BTreeSet::from(["l".into()]),
                },
                2,
            ),
        ];
        for (tag, universe) in &tags {
            let report = kleisli_law_suite(tag, *universe);
            assert!(report.all_pass(), "{tag:?}: {:?}", report.failed());
        }
    }

    #[test]
    fn exceptions_of_simple_effects() {
        assert_eq!(hom_exceptions(&auto("eps")).unwrap(), set(&["ok"]));
        assert_eq!(
            hom_exceptions(&auto("eps | raise_PredZero")).unwrap(),
            set(&["ok", "PredZero"])
        );
        // A raise after a raise is unreachable and gets dropped.
        assert_eq!(
            hom_exceptions(&auto("raise_e . raise_e2")).unwrap(),
            set(&["e"])
        );
    }

    #[test]
    fn exceptions_reject_foreign_alphabet() {
        assert!(hom_exceptions(&auto("choose")).is_err());
    }

    #[test]
    fn branch_flag() {
        assert!(!hom_nondet01(&auto("eps")).unwrap());
        assert!(hom_nondet01(&auto("choose")).unwrap());
        assert!(hom_nondet01(&auto("choose . choose*")).unwrap());
    }

    #[test]
    fn count_bounds() {
        assert_eq!(hom_count(&auto("eps")).unwrap(), ExtNat::Fin(1));
        assert_eq!(
            hom_count(&auto("choose | choose . choose")).unwrap(),
            ExtNat::Fin(4)
        );
        // A cycle on an accepting path pumps unbounded choice depth.
        assert_eq!(
            hom_count(&auto("choose . choose*")).unwrap(),
            ExtNat::Inf
        );
        assert_eq!(hom_count(&auto("choose^w")).unwrap(), ExtNat::Inf);
    }

    #[test]
    fn output_lengths() {
        assert_eq!(hom_outlen(&auto("eps")).unwrap(), ExtNat::Fin(0));
        assert_eq!(
            hom_outlen(&auto("write_l . write_l2")).unwrap(),
            ExtNat::Fin(2)
        );
        assert_eq!(
            hom_outlen(&auto("(write_l . write_l2) . (write_l . write_l2)*")).unwrap(),
            ExtNat::Inf
        );
    }

    #[test]
    fn star_of_eps_is_still_bounded() {
        // The cycle check runs on the automaton, where `eps*` has no cycle
        // through any letter, so the bound stays finite.
        assert_eq!(hom_count(&auto("eps*")).unwrap(), ExtNat::Fin(1));
    }

    #[test]
    fn lifted_exception_membership() {
        let eff = auto("eps | raise_PredZero");
        let exc: MonadicElement<u8> = MonadicElement::Exception(ExcVal::Exc("PredZero".into()));
        let val: MonadicElement<u8> = MonadicElement::Exception(ExcVal::Val(3));
        let t = |_: &u8| true;
        assert!(lift_member(InterpKind::ExcSets, &exc, &t, &eff).unwrap());
        assert!(lift_member(InterpKind::ExcSets, &val, &t, &eff).unwrap());
        let other: MonadicElement<u8> = MonadicElement::Exception(ExcVal::Exc("Over".into()));
        assert!(!lift_member(InterpKind::ExcSets, &other, &t, &eff).unwrap());
    }

    #[test]
    fn lifted_list_membership() {
        let eff = auto("choose");
        let m: MonadicElement<u8> = MonadicElement::List(vec![0, 1]);
        let small = |x: &u8| *x < 2;
        let tiny = |x: &u8| *x < 1;
        assert!(lift_member(InterpKind::NondetAll01, &m, &small, &eff).unwrap());
        assert!(!lift_member(InterpKind::NondetAll01, &m, &tiny, &eff).unwrap());
        // Three results exceed one binary choice.
        let m3: MonadicElement<u8> = MonadicElement::List(vec![0, 0, 0]);
        assert!(!lift_member(InterpKind::NondetCount, &m3, &small, &eff).unwrap());
        // The existential kind is satisfied by a single witness.
        let mixed: MonadicElement<u8> = MonadicElement::List(vec![5, 0]);
        assert!(lift_member(InterpKind::NondetEx01, &mixed, &tiny, &eff).unwrap());
        assert!(!lift_member(InterpKind::NondetAll01, &mixed, &tiny, &eff).unwrap());
    }

    #[test]
    fn lifted_output_membership() {
        let eff = auto("(write_l . write_l2) . (write_l . write_l2)*");
        let unit_pred = |_: &()| true;
        let full = MonadicElement::Output {
            word: vec![("l".into(), 2), ("l2".into(), 2)],
            payload: Some(()),
        };
        assert!(lift_member(InterpKind::OutputExact, &full, &unit_pred, &eff).unwrap());
        // An undetermined payload only needs a live prefix.
        let partial: MonadicElement<()> = MonadicElement::Output {
            word: vec![("l".into(), 0)],
            payload: None,
        };
        assert!(lift_member(InterpKind::OutputExact, &partial, &unit_pred, &eff).unwrap());
        // A completed word must be exactly in the language.
        let short = MonadicElement::Output {
            word: vec![("l".into(), 0)],
            payload: Some(()),
        };
        assert!(!lift_member(InterpKind::OutputExact, &short, &unit_pred, &eff).unwrap());
        // A wrong location fails even as a prefix.
        let bad: MonadicElement<()> = MonadicElement::Output {
            word: vec![("zz".into(), 0)],
            payload: None,
        };
        assert!(!lift_member(InterpKind::OutputExact, &bad, &unit_pred, &eff).unwrap());
    }

    #[test]
    fn exception_monoid_composition() {
        let k1 = AbstractEffect::ExcSets(set(&["ok", "e"]));
        let k2 = AbstractEffect::ExcSets(set(&["e2"]));
        assert_eq!(abstract_mul(&k1, &k2), AbstractEffect::ExcSets(set(&["e", "e2"])));
        let no_ok = AbstractEffect::ExcSets(set(&["e"]));
        assert_eq!(abstract_mul(&no_ok, &k2), AbstractEffect::ExcSets(set(&["e"])));
    }

    #[test]
    fn hom_is_lax_monoid_homomorphism_on_samples() {
        let samples = ["eps", "raise_e", "eps | raise_e", "raise_e . raise_e"];
        for s1 in &samples {
            for s2 in &samples {
                let e1 = auto(s1);
                let e2 = auto(s2);
                let lhs = abstract_mul(
                    &AbstractEffect::ExcSets(hom_exceptions(&e1).unwrap()),
                    &AbstractEffect::ExcSets(hom_exceptions(&e2).unwrap()),
                );
                let rhs = AbstractEffect::ExcSets(hom_exceptions(&eff_concat(&e1, &e2)).unwrap());
                assert!(abstract_leq(&lhs, &rhs), "{s1} . {s2}");
            }
        }
        let csamples = ["eps", "choose", "choose | choose . choose", "choose . choose*"];
        for s1 in &csamples {
            for s2 in &csamples {
                let e1 = auto(s1);
                let e2 = auto(s2);
                let lhs = abstract_mul(
                    &AbstractEffect::Bound(hom_count(&e1).unwrap()),
                    &AbstractEffect::Bound(hom_count(&e2).unwrap()),
                );
                let rhs = AbstractEffect::Bound(hom_count(&eff_concat(&e1, &e2)).unwrap());
                assert!(abstract_leq(&lhs, &rhs), "{s1} . {s2}");
            }
        }
    }

    #[test]
    fn axiom_suite_passes_for_exception_sets() {
        let tag = MonadTag::Exception {
            exc_names: BTreeSet::from(["e".into()]),
        };
        let samples = [auto("eps"), auto("raise_e"), auto("eps | raise_e")];
        let report = lifting_axiom_suite(
            InterpKind::ExcSets,
            &tag,
            2,
            &samples,
            InclusionBounds::default(),
        )
        .unwrap();
        assert!(report.all_pass(), "{:?}", report.failed());
    }

    #[test]
    fn axiom_suite_existential_kind_fails_image_closure() {
        let samples = [auto("eps"), auto("choose"), auto("eps | choose")];
        let report = lifting_axiom_suite(
            InterpKind::NondetEx01,
            &MonadTag::NondetList,
            2,
            &samples,
            InclusionBounds::default(),
        )
        .unwrap();
        // The existential kind fails image-closure by design. It also fails
        // the flattening law: an outer element may witness membership via an
        // empty inner list while another inner carries an ill-typed element
        // that survives flattening — with the empty list in every lifting
        // (pointedness), no may-style lifting can satisfy both.
        let failed: Vec<&str> = report
            .failed()
            .iter()
            .map(|v| v.condition.as_str())
            .collect();
        assert_eq!(failed, vec!["mult", "image-closure"]);
        for v in report.failed() {
            assert!(v.counterexample.is_some(), "{}", v.condition);
        }
    }

    #[test]
    fn axiom_suite_passes_for_all_monad_matched_kinds() {
        let b = InclusionBounds::default();
        let list_samples = [auto("eps"), auto("choose"), auto("choose . choose")];
        for kind in [InterpKind::NondetAll01, InterpKind::NondetCount] {
            let report =
                lifting_axiom_suite(kind, &MonadTag::NondetList, 2, &list_samples, b).unwrap();
            assert!(report.all_pass(), "{}: {:?}", kind.name(), report.failed());
        }
        let out_tag = MonadTag::PointedOutput {
            locations: BTreeSet::from(["l".into()]),
        };
        let out_samples = [auto("eps"), auto("write_l"), auto("write_l . write_l")];
        for kind in [InterpKind::OutputLength, InterpKind::OutputExact] {
            let report = lifting_axiom_suite(kind, &out_tag, 2, &out_samples, b).unwrap();
            assert!(report.all_pass(), "{}: {:?}", kind.name(), report.failed());
        }
        let report = lifting_axiom_suite(
            InterpKind::DistSupport,
            &MonadTag::Distribution,
            2,
            &list_samples,
            b,
        )
        .unwrap();
        assert!(report.all_pass(), "{:?}", report.failed());
    }
}
