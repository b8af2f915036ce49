//! Three-valued language inclusion between effect automata.
//!
//! The finite-word fragment is decided exactly by a subset-construction
//! product. The infinite-word fragment is decided exactly when the left
//! automaton's ω-language is a finite set of ultimately periodic words (its
//! accepting cycles admit a consistent phase labelling and its stems form a
//! DAG); otherwise a bounded lasso sweep either finds a counterexample or
//! answers `Unknown`. `Unknown` is a value, never silently treated as
//! acceptance by callers.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::automaton::{EffectAutomaton, Lasso};

/// Bounds for the inexact regime of [`eff_includes`]: maximum stem length and
/// period length of the lasso sweep, and maximum length for auxiliary word
/// enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InclusionBounds {
    pub max_stem: usize,
    pub max_period: usize,
    pub max_len: usize,
}

impl Default for InclusionBounds {
    fn default() -> Self {
        InclusionBounds {
            max_stem: 6,
            max_period: 6,
            max_len: 8,
        }
    }
}

/// A word demonstrating non-inclusion.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Witness {
    Finite(Vec<String>),
    Infinite(Lasso),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Finite(w) if w.is_empty() => write!(f, "eps"),
            Witness::Finite(w) => write!(f, "{}", w.join(" . ")),
            Witness::Infinite(l) => write!(f, "{l}"),
        }
    }
}

/// Answer of the inclusion procedure (and of subtyping, which inherits its
/// three-valuedness from latent effects).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inclusion {
    Yes,
    No(Witness),
    Unknown,
}

impl Inclusion {
    pub fn is_yes(&self) -> bool {
        matches!(self, Inclusion::Yes)
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Inclusion::No(_))
    }
}

/// Cap on the subset construction of the right automaton; beyond it the
/// finite fragment falls back to a bounded word sweep.
const DETERMINIZE_CAP: usize = 1 << 14;

/// Cap on the number of stem paths enumerated in the exact ω regime.
const STEM_PATH_CAP: usize = 4096;

/// Is `L(a) ⊆ L(b)`, considering both finite and infinite words?
pub fn eff_includes(a: &EffectAutomaton, b: &EffectAutomaton, bounds: InclusionBounds) -> Inclusion {
    match fin_included(a, b, bounds) {
        Inclusion::No(w) => return Inclusion::No(w),
        Inclusion::Unknown => {
            // Finite fragment undecided (determinization cap hit); the ω
            // answer cannot upgrade this beyond Unknown.
            return match inf_included(a, b, bounds) {
                Inclusion::No(w) => Inclusion::No(w),
                _ => Inclusion::Unknown,
            };
        }
        Inclusion::Yes => {}
    }
    inf_included(a, b, bounds)
}

/// Language equality via mutual inclusion.
pub fn eff_equal(a: &EffectAutomaton, b: &EffectAutomaton, bounds: InclusionBounds) -> Inclusion {
    match eff_includes(a, b, bounds) {
        Inclusion::Yes => eff_includes(b, a, bounds),
        other => other,
    }
}

fn fin_included(a: &EffectAutomaton, b: &EffectAutomaton, bounds: InclusionBounds) -> Inclusion {
    if a.fin_empty() {
        return Inclusion::Yes;
    }
    // Determinize b's finite fragment on the fly while exploring a's states.
    // Product states: (state of a, subset of b's states).
    let mut subset_ids: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    let mut subsets: Vec<BTreeSet<usize>> = Vec::new();
    let mut intern = |s: BTreeSet<usize>, subsets: &mut Vec<BTreeSet<usize>>| -> usize {
        if let Some(&id) = subset_ids.get(&s) {
            id
        } else {
            let id = subsets.len();
            subset_ids.insert(s.clone(), id);
            subsets.push(s);
            id
        }
    };
    let start_subset = intern(BTreeSet::from([b.initial]), &mut subsets);
    let start = (a.initial, start_subset);
    let accepts = |qa: usize, sid: usize, subsets: &Vec<BTreeSet<usize>>| {
        a.fin_accept.contains(&qa) && subsets[sid].iter().all(|s| !b.fin_accept.contains(s))
    };
    if accepts(start.0, start.1, &subsets) {
        return Inclusion::No(Witness::Finite(vec![]));
    }
    let mut seen = BTreeSet::from([start]);
    let mut parent: BTreeMap<(usize, usize), ((usize, usize), String)> = BTreeMap::new();
    let mut queue = VecDeque::from([start]);
    while let Some((qa, sid)) = queue.pop_front() {
        for (p, sym, qa2) in &a.transitions {
            if *p != qa {
                continue;
            }
            let next_set: BTreeSet<usize> = b
                .transitions
                .iter()
                .filter(|(bp, bs, _)| subsets[sid].contains(bp) && bs == sym)
                .map(|(_, _, bq)| *bq)
                .collect();
            let sid2 = intern(next_set, &mut subsets);
            if subsets.len() > DETERMINIZE_CAP {
                return fin_included_bounded(a, b, bounds);
            }
            let node = (*qa2, sid2);
            if seen.insert(node) {
                parent.insert(node, ((qa, sid), sym.clone()));
                if accepts(node.0, node.1, &subsets) {
                    // Reconstruct the witness word.
                    let mut word = Vec::new();
                    let mut cur = node;
                    while let Some((prev, sym)) = parent.get(&cur) {
                        word.push(sym.clone());
                        cur = *prev;
                    }
                    word.reverse();
                    return Inclusion::No(Witness::Finite(word));
                }
                queue.push_back(node);
            }
        }
    }
    Inclusion::Yes
}

/// Fallback when the subset construction explodes: sweep all accepted words
/// of `a` up to the bound. Sound for `No`; otherwise `Unknown`.
fn fin_included_bounded(
    a: &EffectAutomaton,
    b: &EffectAutomaton,
    bounds: InclusionBounds,
) -> Inclusion {
    let (words, _) = a.enumerate(bounds.max_len);
    for w in words {
        if !b.accepts_word(&w) {
            return Inclusion::No(Witness::Finite(w));
        }
    }
    Inclusion::Unknown
}

fn inf_included(a: &EffectAutomaton, b: &EffectAutomaton, bounds: InclusionBounds) -> Inclusion {
    if a.inf_empty() {
        return Inclusion::Yes;
    }
    if let Some(lassos) = finite_lasso_language(a) {
        for lasso in lassos {
            if !b.accepts_lasso(&lasso) {
                return Inclusion::No(Witness::Infinite(lasso));
            }
        }
        return Inclusion::Yes;
    }
    // Bounded sweep.
    let alphabet: Vec<&String> = a.alphabet.iter().collect();
    let mut stems: Vec<Vec<String>> = vec![vec![]];
    for _ in 0..=bounds.max_stem {
        let mut next = Vec::new();
        for stem in &stems {
            let mut periods: Vec<Vec<String>> = vec![vec![]];
            for _ in 0..bounds.max_period {
                let mut nextp = Vec::new();
                for period in &periods {
                    for sym in &alphabet {
                        let mut v = period.clone();
                        v.push((*sym).clone());
                        let lasso = Lasso::new(stem.clone(), v.clone());
                        if a.accepts_lasso(&lasso) && !b.accepts_lasso(&lasso) {
                            return Inclusion::No(Witness::Infinite(lasso));
                        }
                        nextp.push(v);
                    }
                }
                periods = nextp;
            }
            if stem.len() < bounds.max_stem {
                for sym in &alphabet {
                    let mut s = stem.clone();
                    s.push((*sym).clone());
                    next.push(s);
                }
            }
        }
        stems = next;
    }
    Inclusion::Unknown
}

/// If the ω-language of `a` is a finite set of ultimately periodic words,
/// returns that set; otherwise `None`.
///
/// The criterion: every reachable accepting SCC admits a phase labelling
/// (all its cycles spell powers of rotations of one primitive word, so the
/// infinite tail from any entry state is unique), no transition leaves an
/// accepting SCC towards a state that can still reach acceptance, and the
/// remaining "stem" subgraph is acyclic. The accepted ω-words are then the
/// words of the finitely many stem paths, each continued with the forced
/// periodic tail.
pub fn finite_lasso_language(a: &EffectAutomaton) -> Option<BTreeSet<Lasso>> {
    let sccs = a.accepting_sccs();
    if sccs.is_empty() {
        return Some(BTreeSet::new());
    }
    let mut scc_states: BTreeSet<usize> = BTreeSet::new();
    for scc in &sccs {
        scc_states.extend(scc.iter().copied());
    }
    // R: states that can reach an accepting SCC.
    let r = a.co_reachable(&scc_states);
    let reach = a.reachable();
    if !r.contains(&a.initial) || !reach.contains(&a.initial) {
        return Some(BTreeSet::new());
    }
    // Phase labelling per accepting SCC: tail word from state s is
    // rot_{phase(s)}(w)^ω.
    let mut tail: BTreeMap<usize, Lasso> = BTreeMap::new();
    for scc in &sccs {
        let (word, phases) = phase_labelling(a, scc)?;
        // No exits from the SCC into R.
        for (p, _, q) in &a.transitions {
            if scc.contains(p) && r.contains(q) && !scc.contains(q) {
                return None;
            }
        }
        for (&s, &ph) in &phases {
            let mut period = word.clone();
            period.rotate_left(ph % word.len());
            tail.insert(s, Lasso::new(vec![], period));
        }
    }
    // Stem subgraph: R states outside accepting SCCs; must be acyclic.
    let stem_states: BTreeSet<usize> = r
        .iter()
        .copied()
        .filter(|s| reach.contains(s) && !scc_states.contains(s))
        .collect();
    if has_cycle(a, &stem_states) {
        return None;
    }
    // Enumerate all paths from initial through the stem DAG into SCC entries.
    let mut lassos = BTreeSet::new();
    let mut paths = 0usize;
    let mut stack: Vec<(usize, Vec<String>)> = Vec::new();
    if scc_states.contains(&a.initial) {
        let t = &tail[&a.initial];
        lassos.insert(Lasso::new(vec![], t.period.clone()).canonical());
    } else {
        stack.push((a.initial, Vec::new()));
    }
    while let Some((s, word)) = stack.pop() {
        paths += 1;
        if paths > STEM_PATH_CAP {
            return None;
        }
        for (p, sym, q) in &a.transitions {
            if *p != s {
                continue;
            }
            if scc_states.contains(q) {
                let mut stem = word.clone();
                stem.push(sym.clone());
                let t = &tail[q];
                lassos.insert(Lasso::new(stem, t.period.clone()).canonical());
            } else if stem_states.contains(q) {
                let mut w = word.clone();
                w.push(sym.clone());
                stack.push((*q, w));
            }
        }
    }
    Some(lassos)
}

/// Tries to assign each SCC state a phase in a common primitive word `w` such
/// that every internal transition from a state at phase `k` is labelled
/// `w[k]` and moves to phase `k+1`. Returns `(w, phases)` on success.
fn phase_labelling(
    a: &EffectAutomaton,
    scc: &BTreeSet<usize>,
) -> Option<(Vec<String>, BTreeMap<usize, usize>)> {
    let &s0 = scc.iter().next().expect("non-empty SCC");
    // Find some cycle word through s0 within the SCC (BFS back to s0).
    let mut parent: BTreeMap<usize, (usize, String)> = BTreeMap::new();
    let mut queue = VecDeque::from([s0]);
    let mut cycle: Option<Vec<String>> = None;
    let mut visited = BTreeSet::from([s0]);
    'bfs: while let Some(p) = queue.pop_front() {
        for (tp, sym, tq) in &a.transitions {
            if *tp != p || !scc.contains(tq) {
                continue;
            }
            if *tq == s0 {
                let mut word = vec![sym.clone()];
                let mut cur = p;
                while cur != s0 {
                    let (prev, s) = parent.get(&cur).expect("visited state has parent");
                    word.push(s.clone());
                    cur = *prev;
                }
                word.reverse();
                cycle = Some(word);
                break 'bfs;
            }
            if visited.insert(*tq) {
                parent.insert(*tq, (p, sym.clone()));
                queue.push_back(*tq);
            }
        }
    }
    let cycle = cycle?;
    let w = {
        // Primitive root of the cycle word.
        let n = cycle.len();
        let mut root = cycle.clone();
        for p in 1..=n {
            if n % p == 0 && (p..n).all(|i| cycle[i] == cycle[i - p]) {
                root = cycle[..p].to_vec();
                break;
            }
        }
        root
    };
    let m = w.len();
    let mut phases = BTreeMap::from([(s0, 0usize)]);
    let mut queue = VecDeque::from([s0]);
    while let Some(p) = queue.pop_front() {
        let ph = phases[&p];
        for (tp, sym, tq) in &a.transitions {
            if *tp != p || !scc.contains(tq) {
                continue;
            }
            if *sym != w[ph % m] {
                return None;
            }
            let next_ph = (ph + 1) % m;
            match phases.get(tq) {
                Some(&existing) if existing != next_ph => return None,
                Some(_) => {}
                None => {
                    phases.insert(*tq, next_ph);
                    queue.push_back(*tq);
                }
            }
        }
    }
    if phases.len() != scc.len() {
        // SCC is strongly connected, so forward BFS covers it; defensive.
        return None;
    }
    Some((w, phases))
}

fn has_cycle(a: &EffectAutomaton, states: &BTreeSet<usize>) -> bool {
    // Kahn's algorithm restricted to `states`.
    let mut indeg: BTreeMap<usize, usize> = states.iter().map(|&s| (s, 0)).collect();
    for (p, _, q) in &a.transitions {
        if states.contains(p) && states.contains(q) {
            *indeg.get_mut(q).expect("state present") += 1;
        }
    }
    let mut queue: VecDeque<usize> = indeg
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&s, _)| s)
        .collect();
    let mut removed = 0;
    while let Some(s) = queue.pop_front() {
        removed += 1;
        for (p, _, q) in &a.transitions {
            if *p == s && states.contains(q) {
                let d = indeg.get_mut(q).expect("state present");
                *d -= 1;
                if *d == 0 {
                    queue.push_back(*q);
                }
            }
        }
    }
    removed != states.len()
}
