//! Effect automata: finite automata over operation names with two acceptance
//! conditions at once. `fin_accept` states accept finite words in the usual
//! NFA sense; `buchi_accept` states accept infinite words under Büchi
//! acceptance (some accepting state is visited infinitely often). The denoted
//! effect is the union of the two languages, a subset of the finite and
//! infinite operation sequences.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::expr::EffectExpr;

/// An ultimately periodic infinite word `stem · period^ω`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Lasso {
    pub stem: Vec<String>,
    pub period: Vec<String>,
}

impl Lasso {
    pub fn new(stem: Vec<String>, period: Vec<String>) -> Self {
        assert!(!period.is_empty(), "lasso period must be non-empty");
        Lasso { stem, period }
    }

    /// Canonical form of the denoted ω-word: the period is primitive and the
    /// stem is as short as possible. Two lassos denote the same ω-word iff
    /// their canonical forms are equal.
    pub fn canonical(&self) -> Lasso {
        let mut stem = self.stem.clone();
        let mut period = primitive_root(&self.period);
        // While the stem ends with the last letter of the period, the word is
        // unchanged by rotating that letter into the period.
        while let Some(last) = stem.last() {
            if last == period.last().expect("non-empty period") {
                let l = period.pop().expect("non-empty period");
                period.insert(0, l);
                stem.pop();
            } else {
                break;
            }
        }
        Lasso { stem, period }
    }
}

impl fmt::Display for Lasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.stem.is_empty() {
            write!(f, "{} . ", self.stem.join(" . "))?;
        }
        write!(f, "({})^w", self.period.join(" . "))
    }
}

/// The shortest word `w` such that the input is `w` repeated.
fn primitive_root(word: &[String]) -> Vec<String> {
    let n = word.len();
    for p in 1..=n {
        if n % p == 0 && (p..n).all(|i| word[i] == word[i - p]) {
            return word[..p].to_vec();
        }
    }
    word.to_vec()
}

/// A finite automaton over operation names with finite and Büchi acceptance.
///
/// Invariants kept by all constructors:
/// - the language is non-empty (some finite word or some infinite word is
///   accepted);
/// - there are no ε-transitions (constructions eliminate them internally);
/// - all transition labels are recorded in `alphabet`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectAutomaton {
    pub n_states: usize,
    pub alphabet: BTreeSet<String>,
    pub transitions: Vec<(usize, String, usize)>,
    pub initial: usize,
    pub fin_accept: BTreeSet<usize>,
    pub buchi_accept: BTreeSet<usize>,
    /// The effect expression this automaton was compiled from, when one is
    /// known; carried along through concatenation and union so reports can
    /// print effects in the concrete syntax.
    pub origin: Option<EffectExpr>,
}

impl EffectAutomaton {
    /// The automaton accepting exactly `{ε}`.
    pub fn eps() -> Self {
        EffectAutomaton {
            n_states: 1,
            alphabet: BTreeSet::new(),
            transitions: vec![],
            initial: 0,
            fin_accept: BTreeSet::from([0]),
            buchi_accept: BTreeSet::new(),
            origin: Some(EffectExpr::Eps),
        }
    }

    /// The automaton accepting exactly the one-letter word `op`.
    pub fn atom(op: impl Into<String>) -> Self {
        let op = op.into();
        EffectAutomaton {
            n_states: 2,
            alphabet: BTreeSet::from([op.clone()]),
            transitions: vec![(0, op.clone(), 1)],
            initial: 0,
            fin_accept: BTreeSet::from([1]),
            buchi_accept: BTreeSet::new(),
            origin: Some(EffectExpr::Atom(op)),
        }
    }

    fn successors(&self) -> Vec<Vec<(usize, &str)>> {
        let mut out = vec![Vec::new(); self.n_states];
        for (p, a, q) in &self.transitions {
            out[*p].push((*q, a.as_str()));
        }
        out
    }

    /// States reachable from `initial`.
    pub fn reachable(&self) -> BTreeSet<usize> {
        let succ = self.successors();
        let mut seen = BTreeSet::from([self.initial]);
        let mut queue = VecDeque::from([self.initial]);
        while let Some(s) = queue.pop_front() {
            for (q, _) in &succ[s] {
                if seen.insert(*q) {
                    queue.push_back(*q);
                }
            }
        }
        seen
    }

    /// States from which some state in `targets` is reachable (including the
    /// targets themselves).
    pub fn co_reachable(&self, targets: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut pred = vec![Vec::new(); self.n_states];
        for (p, _, q) in &self.transitions {
            pred[*q].push(*p);
        }
        let mut seen = targets.clone();
        let mut queue: VecDeque<usize> = targets.iter().copied().collect();
        while let Some(s) = queue.pop_front() {
            for &p in &pred[s] {
                if seen.insert(p) {
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    /// Strongly connected components of the reachable part, as sets of states.
    pub fn sccs(&self) -> Vec<BTreeSet<usize>> {
        // Kosaraju on the reachable subgraph.
        let reach = self.reachable();
        let succ = self.successors();
        let mut order = Vec::new();
        let mut seen = vec![false; self.n_states];
        for &start in &reach {
            if seen[start] {
                continue;
            }
            // Iterative post-order DFS.
            let mut stack = vec![(start, 0usize)];
            seen[start] = true;
            while let Some(&mut (s, ref mut i)) = stack.last_mut() {
                if *i < succ[s].len() {
                    let (q, _) = succ[s][*i];
                    *i += 1;
                    if reach.contains(&q) && !seen[q] {
                        seen[q] = true;
                        stack.push((q, 0));
                    }
                } else {
                    order.push(s);
                    stack.pop();
                }
            }
        }
        let mut pred = vec![Vec::new(); self.n_states];
        for (p, _, q) in &self.transitions {
            if reach.contains(p) && reach.contains(q) {
                pred[*q].push(*p);
            }
        }
        let mut comp = vec![usize::MAX; self.n_states];
        let mut comps: Vec<BTreeSet<usize>> = Vec::new();
        for &s in order.iter().rev() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = BTreeSet::from([s]);
            comp[s] = id;
            let mut queue = VecDeque::from([s]);
            while let Some(t) = queue.pop_front() {
                for &p in &pred[t] {
                    if comp[p] == usize::MAX {
                        comp[p] = id;
                        members.insert(p);
                        queue.push_back(p);
                    }
                }
            }
            comps.push(members);
        }
        comps
    }

    /// SCCs that can host an accepting infinite run: they contain a Büchi
    /// state and an internal transition (so a cycle through the Büchi state
    /// exists).
    pub fn accepting_sccs(&self) -> Vec<BTreeSet<usize>> {
        self.sccs()
            .into_iter()
            .filter(|scc| {
                scc.iter().any(|s| self.buchi_accept.contains(s))
                    && self
                        .transitions
                        .iter()
                        .any(|(p, _, q)| scc.contains(p) && scc.contains(q))
            })
            .collect()
    }

    /// True iff no finite word is accepted.
    pub fn fin_empty(&self) -> bool {
        self.reachable().is_disjoint(&self.fin_accept)
    }

    /// True iff no infinite word is accepted.
    pub fn inf_empty(&self) -> bool {
        self.accepting_sccs().is_empty()
    }

    /// Whether the language (finite or infinite part) contains anything;
    /// all public constructors keep this true.
    pub fn is_nonempty(&self) -> bool {
        !self.fin_empty() || !self.inf_empty()
    }

    pub fn accepts_empty_word(&self) -> bool {
        self.fin_accept.contains(&self.initial)
    }

    /// Finite-word NFA acceptance. Out-of-alphabet symbols simply fail.
    pub fn accepts_word<S: AsRef<str>>(&self, word: &[S]) -> bool {
        let mut current = BTreeSet::from([self.initial]);
        for sym in word {
            let sym = sym.as_ref();
            let mut next = BTreeSet::new();
            for (p, a, q) in &self.transitions {
                if current.contains(p) && a == sym {
                    next.insert(*q);
                }
            }
            if next.is_empty() {
                return false;
            }
            current = next;
        }
        current.iter().any(|s| self.fin_accept.contains(s))
    }

    /// Ultimately-periodic membership: does the automaton Büchi-accept
    /// `stem · period^ω`? Product-graph search for a reachable cycle through a
    /// Büchi state aligned with the periodic part.
    pub fn accepts_lasso(&self, lasso: &Lasso) -> bool {
        let stem = &lasso.stem;
        let period = &lasso.period;
        // States reachable after reading the stem.
        let mut current = BTreeSet::from([self.initial]);
        for sym in stem {
            let mut next = BTreeSet::new();
            for (p, a, q) in &self.transitions {
                if current.contains(p) && a == sym {
                    next.insert(*q);
                }
            }
            current = next;
            if current.is_empty() {
                return false;
            }
        }
        // Product of the automaton with the cyclic period positions.
        let m = period.len();
        let node = |s: usize, i: usize| s * m + i;
        let mut edges: Vec<Vec<usize>> = vec![Vec::new(); self.n_states * m];
        for (p, a, q) in &self.transitions {
            for i in 0..m {
                if a == &period[i] {
                    edges[node(*p, i)].push(node(*q, (i + 1) % m));
                }
            }
        }
        // Reachable product nodes from the post-stem states at position 0.
        let mut seen = vec![false; self.n_states * m];
        let mut queue = VecDeque::new();
        for &s in &current {
            seen[node(s, 0)] = true;
            queue.push_back(node(s, 0));
        }
        while let Some(v) = queue.pop_front() {
            for &w in &edges[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        // A Büchi product node on a cycle within the reachable part.
        let reach_nodes: Vec<usize> = (0..self.n_states * m).filter(|v| seen[*v]).collect();
        let buchi_nodes: Vec<usize> = reach_nodes
            .iter()
            .copied()
            .filter(|v| self.buchi_accept.contains(&(v / m)))
            .collect();
        // v lies on a cycle iff v is reachable from v in ≥ 1 step.
        for &b in &buchi_nodes {
            let mut seen2 = vec![false; self.n_states * m];
            let mut queue = VecDeque::new();
            for &w in &edges[b] {
                if seen[w] && !seen2[w] {
                    seen2[w] = true;
                    queue.push_back(w);
                }
            }
            while let Some(v) = queue.pop_front() {
                if v == b {
                    return true;
                }
                for &w in &edges[v] {
                    if seen[w] && !seen2[w] {
                        seen2[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            if edges[b].contains(&b) {
                return true;
            }
        }
        false
    }

    /// All accepted finite words of length ≤ `max_len`, and all accepted
    /// lassos with `|stem| + |period| ≤ max_len` (canonicalized, so each
    /// ω-word appears once).
    pub fn enumerate(&self, max_len: usize) -> (BTreeSet<Vec<String>>, BTreeSet<Lasso>) {
        let mut words = BTreeSet::new();
        // BFS over (state-set, word) capped at max_len.
        let mut frontier: Vec<(BTreeSet<usize>, Vec<String>)> =
            vec![(BTreeSet::from([self.initial]), Vec::new())];
        if self.accepts_empty_word() {
            words.insert(Vec::new());
        }
        for _ in 0..max_len {
            let mut next_frontier = Vec::new();
            for (states, word) in &frontier {
                for sym in &self.alphabet {
                    let mut next = BTreeSet::new();
                    for (p, a, q) in &self.transitions {
                        if states.contains(p) && a == sym {
                            next.insert(*q);
                        }
                    }
                    if next.is_empty() {
                        continue;
                    }
                    let mut w = word.clone();
                    w.push(sym.clone());
                    if next.iter().any(|s| self.fin_accept.contains(s)) {
                        words.insert(w.clone());
                    }
                    next_frontier.push((next, w));
                }
            }
            frontier = next_frontier;
        }
        let mut lassos = BTreeSet::new();
        let alphabet: Vec<&String> = self.alphabet.iter().collect();
        if !alphabet.is_empty() {
            // Enumerate candidate (stem, period) pairs and test membership.
            let mut stems: Vec<Vec<String>> = vec![vec![]];
            for stem_len in 0..max_len {
                let mut next_stems = Vec::new();
                for stem in &stems {
                    if stem.len() == stem_len {
                        let mut periods: Vec<Vec<String>> = vec![vec![]];
                        for _ in 0..max_len - stem_len {
                            let mut next_periods = Vec::new();
                            for period in &periods {
                                for sym in &alphabet {
                                    let mut v = period.clone();
                                    v.push((*sym).clone());
                                    let lasso = Lasso::new(stem.clone(), v.clone());
                                    if self.accepts_lasso(&lasso) {
                                        lassos.insert(lasso.canonical());
                                    }
                                    next_periods.push(v);
                                }
                            }
                            periods = next_periods;
                        }
                        for sym in &alphabet {
                            let mut s = stem.clone();
                            s.push((*sym).clone());
                            next_stems.push(s);
                        }
                    }
                }
                stems.extend(next_stems);
            }
        }
        (words, lassos)
    }

    /// Remove states that are unreachable, renumbering the rest.
    pub fn prune(&self) -> EffectAutomaton {
        let reach = self.reachable();
        let mut map = BTreeMap::new();
        for (i, s) in reach.iter().enumerate() {
            map.insert(*s, i);
        }
        EffectAutomaton {
            n_states: reach.len(),
            alphabet: self.alphabet.clone(),
            transitions: self
                .transitions
                .iter()
                .filter(|(p, _, q)| reach.contains(p) && reach.contains(q))
                .map(|(p, a, q)| (map[p], a.clone(), map[q]))
                .collect(),
            initial: map[&self.initial],
            fin_accept: self.fin_accept.iter().filter_map(|s| map.get(s).copied()).collect(),
            buchi_accept: self.buchi_accept.iter().filter_map(|s| map.get(s).copied()).collect(),
            origin: self.origin.clone(),
        }
    }
}

/// Disjointly renumbers `b` after `a`, returning the offset applied to `b`.
fn shift(a: &EffectAutomaton, b: &EffectAutomaton) -> (Vec<(usize, String, usize)>, usize) {
    let off = a.n_states;
    let shifted = b
        .transitions
        .iter()
        .map(|(p, s, q)| (p + off, s.clone(), q + off))
        .collect();
    (shifted, off)
}

/// Language union.
pub fn eff_union(a: &EffectAutomaton, b: &EffectAutomaton) -> EffectAutomaton {
    let (b_trans, off) = shift(a, b);
    // Fresh initial state duplicating the outgoing transitions of both
    // initials. It has no incoming edges, so its Büchi status is irrelevant.
    let fresh = a.n_states + b.n_states;
    let mut transitions = a.transitions.clone();
    transitions.extend(b_trans.iter().cloned());
    for (p, s, q) in &a.transitions {
        if *p == a.initial {
            transitions.push((fresh, s.clone(), *q));
        }
    }
    for (p, s, q) in &b_trans {
        if *p == b.initial + off {
            transitions.push((fresh, s.clone(), *q));
        }
    }
    let mut fin_accept: BTreeSet<usize> = a.fin_accept.clone();
    fin_accept.extend(b.fin_accept.iter().map(|s| s + off));
    if a.accepts_empty_word() || b.accepts_empty_word() {
        fin_accept.insert(fresh);
    }
    let mut buchi_accept = a.buchi_accept.clone();
    buchi_accept.extend(b.buchi_accept.iter().map(|s| s + off));
    let origin = match (&a.origin, &b.origin) {
        (Some(x), Some(y)) => Some(EffectExpr::union(x.clone(), y.clone())),
        _ => None,
    };
    EffectAutomaton {
        n_states: fresh + 1,
        alphabet: a.alphabet.union(&b.alphabet).cloned().collect(),
        transitions,
        initial: fresh,
        fin_accept,
        buchi_accept,
        origin,
    }
    .prune()
}

/// Language composition `{α·β | α ∈ a, β ∈ b}`; infinite α absorb β.
pub fn eff_concat(a: &EffectAutomaton, b: &EffectAutomaton) -> EffectAutomaton {
    let (b_trans, off) = shift(a, b);
    let mut transitions = a.transitions.clone();
    transitions.extend(b_trans.iter().cloned());
    // Bridge: from every finite-accepting state of `a`, mimic the outgoing
    // transitions of `b`'s initial state.
    for (p, s, q) in &b_trans {
        if *p == b.initial + off {
            for &f in &a.fin_accept {
                transitions.push((f, s.clone(), *q));
            }
        }
    }
    let mut fin_accept: BTreeSet<usize> = b.fin_accept.iter().map(|s| s + off).collect();
    if b.accepts_empty_word() {
        fin_accept.extend(a.fin_accept.iter().copied());
    }
    let mut buchi_accept = a.buchi_accept.clone();
    buchi_accept.extend(b.buchi_accept.iter().map(|s| s + off));
    let origin = match (&a.origin, &b.origin) {
        (Some(x), Some(y)) => Some(EffectExpr::concat(x.clone(), y.clone())),
        _ => None,
    };
    EffectAutomaton {
        n_states: a.n_states + b.n_states,
        alphabet: a.alphabet.union(&b.alphabet).cloned().collect(),
        transitions,
        initial: a.initial,
        fin_accept,
        buchi_accept,
        origin,
    }
    .prune()
}

/// All finite iterations: the finite words of `aⁿ` for every `n ≥ 0`.
/// Infinite words of `a` do not survive iteration (the result has no Büchi
/// states).
pub fn eff_star(a: &EffectAutomaton) -> EffectAutomaton {
    let fresh = a.n_states;
    let mut transitions = a.transitions.clone();
    let init_out: Vec<(usize, String, usize)> = a
        .transitions
        .iter()
        .filter(|(p, _, _)| *p == a.initial)
        .cloned()
        .collect();
    for (_, s, q) in &init_out {
        transitions.push((fresh, s.clone(), *q));
        for &f in &a.fin_accept {
            transitions.push((f, s.clone(), *q));
        }
    }
    let mut fin_accept = a.fin_accept.clone();
    fin_accept.insert(fresh);
    let origin = a.origin.clone().map(EffectExpr::star);
    EffectAutomaton {
        n_states: fresh + 1,
        alphabet: a.alphabet.clone(),
        transitions,
        initial: fresh,
        fin_accept,
        buchi_accept: BTreeSet::new(),
        origin,
    }
    .prune()
}

/// Infinite concatenations of the non-ε words of `a` (plus the infinite words
/// of `a` themselves as absorbing tails). If `a` denotes exactly `{ε}`, the
/// result is `{ε}`.
pub fn eff_omega(a: &EffectAutomaton) -> EffectAutomaton {
    // The language is exactly {ε} iff ε is accepted, no infinite word is,
    // and no finite word of positive length is: the latter holds iff no
    // accepting state is reachable through at least one transition.
    let only_eps = a.inf_empty() && a.accepts_empty_word() && {
        let reach = a.reachable();
        let after_one: BTreeSet<usize> = a
            .transitions
            .iter()
            .filter(|(p, _, _)| reach.contains(p))
            .map(|(_, _, q)| *q)
            .collect();
        let live = a.co_reachable(&a.fin_accept);
        after_one.is_disjoint(&live)
    };
    if only_eps {
        let mut out = EffectAutomaton::eps();
        out.origin = a.origin.clone().map(EffectExpr::omega);
        return out;
    }
    // Fresh state `r` marking "a non-ε factor just ended"; Büchi-accepting.
    // Completed factors are rerouted to `r`, which restarts from the initial
    // state's transitions. Büchi states of `a` are kept so that a factor that
    // is itself infinite absorbs the rest.
    let r = a.n_states;
    let mut transitions = a.transitions.clone();
    for (p, s, q) in &a.transitions {
        if a.fin_accept.contains(q) {
            transitions.push((*p, s.clone(), r));
        }
    }
    let init_out: Vec<(usize, String, usize)> = a
        .transitions
        .iter()
        .filter(|(p, _, _)| *p == a.initial)
        .cloned()
        .collect();
    for (_, s, q) in &init_out {
        transitions.push((r, s.clone(), *q));
        if a.fin_accept.contains(q) {
            transitions.push((r, s.clone(), r));
        }
    }
    let mut buchi_accept = a.buchi_accept.clone();
    buchi_accept.insert(r);
    let origin = a.origin.clone().map(EffectExpr::omega);
    EffectAutomaton {
        n_states: r + 1,
        alphabet: a.alphabet.clone(),
        transitions,
        initial: a.initial,
        fin_accept: BTreeSet::new(),
        buchi_accept,
        origin,
    }
    .prune()
}

/// Compiles an effect expression into an automaton denoting the same set of
/// sequences.
pub fn compile(e: &EffectExpr) -> EffectAutomaton {
    let mut out = match e {
        EffectExpr::Eps => EffectAutomaton::eps(),
        EffectExpr::Atom(op) => EffectAutomaton::atom(op.clone()),
        EffectExpr::Concat(a, b) => eff_concat(&compile(a), &compile(b)),
        EffectExpr::Union(a, b) => eff_union(&compile(a), &compile(b)),
        EffectExpr::Star(a) => eff_star(&compile(a)),
        EffectExpr::Omega(a) => eff_omega(&compile(a)),
    };
    out.origin = Some(e.clone());
    debug_assert!(out.is_nonempty());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effect_algebra::expr::parse_effect_expr;

    fn w(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn eps_accepts_only_empty() {
        let a = EffectAutomaton::eps();
        assert!(a.accepts_word::<&str>(&[]));
        assert!(!a.accepts_word(&["choose"]));
        let (words, lassos) = a.enumerate(3);
        assert_eq!(words, BTreeSet::from([vec![]]));
        assert!(lassos.is_empty());
    }

    #[test]
    fn omega_of_two_letter_word() {
        // (write_l . write_l2)^w accepts exactly one infinite word.
        let e = parse_effect_expr("(write_l . write_l2)^w").unwrap();
        let a = compile(&e);
        assert!(a.fin_empty());
        assert!(a.accepts_lasso(&Lasso::new(vec![], w(&["write_l", "write_l2"]))));
        assert!(a.accepts_lasso(&Lasso::new(w(&["write_l"]), w(&["write_l2", "write_l"]))));
        assert!(!a.accepts_lasso(&Lasso::new(vec![], w(&["write_l"]))));
        let (_, lassos) = a.enumerate(4);
        assert_eq!(
            lassos,
            BTreeSet::from([Lasso::new(vec![], w(&["write_l", "write_l2"]))])
        );
    }

    #[test]
    fn star_concat_choose_at_least_once() {
        // choose* . choose = {chooseⁿ | n ≥ 1}.
        let e = parse_effect_expr("choose* . choose").unwrap();
        let a = compile(&e);
        assert!(!a.accepts_word::<&str>(&[]));
        assert!(a.accepts_word(&["choose"]));
        assert!(a.accepts_word(&["choose", "choose"]));
        let (words, lassos) = a.enumerate(2);
        assert_eq!(words, BTreeSet::from([w(&["choose"]), w(&["choose", "choose"])]));
        assert!(lassos.is_empty());
    }

    #[test]
    fn omega_of_eps_is_eps() {
        let e = parse_effect_expr("eps^w").unwrap();
        let a = compile(&e);
        assert!(a.accepts_word::<&str>(&[]));
        assert!(a.inf_empty());
    }

    #[test]
    fn omega_skips_eps_components() {
        // (eps | write_l)^w = {write_l^w}: ε-components are absorbed.
        let e = parse_effect_expr("(eps | write_l)^w").unwrap();
        let a = compile(&e);
        assert!(a.fin_empty());
        assert!(a.accepts_lasso(&Lasso::new(vec![], w(&["write_l"]))));
    }

    #[test]
    fn infinite_factor_absorbs_tail() {
        // {(write_l)^w} . {write_l2} = {(write_l)^w}.
        let inf = compile(&parse_effect_expr("write_l^w").unwrap());
        let tail = EffectAutomaton::atom("write_l2");
        let c = eff_concat(&inf, &tail);
        assert!(c.fin_empty());
        assert!(c.accepts_lasso(&Lasso::new(vec![], w(&["write_l"]))));
        assert!(!c.accepts_lasso(&Lasso::new(w(&["write_l2"]), w(&["write_l"]))));
    }

    #[test]
    fn lasso_canonical_forms() {
        let l1 = Lasso::new(w(&["a"]), w(&["b", "a"]));
        let l2 = Lasso::new(vec![], w(&["a", "b"]));
        assert_eq!(l1.canonical(), l2.canonical());
        let l3 = Lasso::new(vec![], w(&["a", "b", "a", "b"]));
        assert_eq!(l3.canonical(), l2.canonical());
    }
}
