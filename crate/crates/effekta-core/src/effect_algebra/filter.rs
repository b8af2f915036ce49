//! Handler filters: the effect-level transformation a handler induces.
//!
//! A filter carries, for each handled operation, a mode and the effect of the
//! clause body, plus the effect of the final expression. Applying a filter to
//! an effect rewrites every operation sequence in it: handled operations are
//! replaced by their clause effect (severing the rest of the sequence in stop
//! mode), unhandled operations are kept, and the final effect is appended to
//! finite sequences.
//!
//! [`filter_apply`] is an automaton construction; [`reference`] contains a
//! direct word-by-word unrolling of the same transformation used as a test
//! oracle.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::automaton::{eff_concat, eff_omega, eff_star, eff_union, EffectAutomaton, Lasso};

/// Clause mode: continue-clauses splice alternative behaviour and resume the
/// rest of the computation; stop-clauses replace it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClauseMode {
    Continue,
    Stop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterClause {
    pub op: String,
    pub mode: ClauseMode,
    pub effect: EffectAutomaton,
}

/// The filter extracted from a handler: one clause filter per handler clause,
/// plus the effect of the final expression.
#[derive(Debug, Clone, PartialEq)]
pub struct HandlerFilter {
    pub clauses: Vec<FilterClause>,
    pub final_effect: EffectAutomaton,
}

impl HandlerFilter {
    pub fn clause_for(&self, op: &str) -> Option<&FilterClause> {
        self.clauses.iter().find(|c| c.op == op)
    }
}

/// Intermediate automaton with ε-transitions, produced by the splicing step
/// of [`filter_apply`] and resolved by [`ElimNfa::eliminate`].
struct ElimNfa {
    n_states: usize,
    transitions: Vec<(usize, String, usize)>,
    eps: Vec<(usize, usize)>,
    initial: usize,
    fin: BTreeSet<usize>,
    buchi: BTreeSet<usize>,
}

impl ElimNfa {
    /// Copies `a` into this automaton, returning the offset.
    fn import(&mut self, a: &EffectAutomaton) -> usize {
        let off = self.n_states;
        self.n_states += a.n_states;
        for (p, s, q) in &a.transitions {
            self.transitions.push((p + off, s.clone(), q + off));
        }
        off
    }

    fn eps_closures(&self) -> Vec<BTreeSet<usize>> {
        let mut succ = vec![Vec::new(); self.n_states];
        for (p, q) in &self.eps {
            succ[*p].push(*q);
        }
        (0..self.n_states)
            .map(|s| {
                let mut seen = BTreeSet::from([s]);
                let mut queue = VecDeque::from([s]);
                while let Some(x) = queue.pop_front() {
                    for &y in &succ[x] {
                        if seen.insert(y) {
                            queue.push_back(y);
                        }
                    }
                }
                seen
            })
            .collect()
    }

    /// ε-elimination preserving both acceptance conditions.
    ///
    /// - A state is finite-accepting if its ε-closure meets the accepting set,
    ///   or if it can ε-reach an ε-cycle through a Büchi state: an infinite
    ///   run that settles on such a cycle emits only finitely many operations,
    ///   so the word read so far is accepted as a finite one.
    /// - A letter transition whose ε-prefix passes through a Büchi state is
    ///   redirected to a Büchi-marked copy of its target, so Büchi visits on
    ///   ε-paths still count after elimination.
    fn eliminate(&self) -> EffectAutomaton {
        let closure = self.eps_closures();
        // States on an ε-cycle through a Büchi state: b ∈ buchi with an
        // ε-path b → … → b of length ≥ 1.
        let mut diverging_core = BTreeSet::new();
        for &b in &self.buchi {
            // An ε-cycle through b exists iff some ε-edge (p, q) with
            // b →* p and q →* b.
            let cycle = self
                .eps
                .iter()
                .any(|(p, q)| closure[b].contains(p) && closure[*q].contains(&b));
            if cycle {
                diverging_core.insert(b);
            }
        }
        let diverging: BTreeSet<usize> = (0..self.n_states)
            .filter(|s| closure[*s].iter().any(|x| diverging_core.contains(x)))
            .collect();
        let fin: BTreeSet<usize> = (0..self.n_states)
            .filter(|s| closure[*s].iter().any(|x| self.fin.contains(x)) || diverging.contains(s))
            .collect();
        // Base transitions with a passing flag.
        let mut new_trans: Vec<(usize, String, usize, bool)> = Vec::new();
        for s in 0..self.n_states {
            for &x in &closure[s] {
                for (p, sym, t) in &self.transitions {
                    if *p != x {
                        continue;
                    }
                    let passing = self
                        .buchi
                        .iter()
                        .any(|&b| closure[s].contains(&b) && closure[b].contains(&x));
                    new_trans.push((s, sym.clone(), *t, passing));
                }
            }
        }
        // Marked copies: state t duplicated as n + t, Büchi-accepting, same
        // outgoing behaviour as t.
        let n = self.n_states;
        let mut transitions: Vec<(usize, String, usize)> = Vec::new();
        for (s, sym, t, passing) in &new_trans {
            let target = if *passing { n + *t } else { *t };
            transitions.push((*s, sym.clone(), target));
        }
        let extra: Vec<(usize, String, usize)> = transitions
            .iter()
            .filter(|(s, _, _)| *s < n)
            .map(|(s, sym, t)| (n + *s, sym.clone(), *t))
            .collect();
        transitions.extend(extra);
        let mut fin_accept: BTreeSet<usize> = fin.clone();
        fin_accept.extend(fin.iter().map(|s| n + s));
        let mut buchi_accept: BTreeSet<usize> = self.buchi.clone();
        buchi_accept.extend((0..n).map(|s| n + s));
        let alphabet: BTreeSet<String> = transitions.iter().map(|(_, s, _)| s.clone()).collect();
        EffectAutomaton {
            n_states: 2 * n,
            alphabet,
            transitions,
            initial: self.initial,
            fin_accept,
            buchi_accept,
            origin: None,
        }
        .prune()
    }
}

/// Applies a handler filter to an effect.
///
/// For each transition of `e` labelled with a handled operation, a fresh copy
/// of the clause effect is spliced in: between source and target for a
/// continue-clause (with infinite clause words never returning), or dangling
/// with its accepting states becoming accepting for a stop-clause (the
/// continuation is severed). Unhandled operations keep their edge. The final
/// effect is appended after every originally finite-accepting state; original
/// Büchi states stay Büchi, since infinite sequences never reach the final
/// effect.
pub fn filter_apply(h: &HandlerFilter, e: &EffectAutomaton) -> EffectAutomaton {
    let mut nfa = ElimNfa {
        n_states: e.n_states,
        transitions: Vec::new(),
        eps: Vec::new(),
        initial: e.initial,
        fin: BTreeSet::new(),
        buchi: e.buchi_accept.clone(),
    };
    for (p, sym, q) in &e.transitions {
        match h.clause_for(sym) {
            Some(clause) => {
                let off = nfa.import(&clause.effect);
                nfa.eps.push((*p, clause.effect.initial + off));
                for s in &clause.effect.buchi_accept {
                    nfa.buchi.insert(s + off);
                }
                match clause.mode {
                    ClauseMode::Continue => {
                        for f in &clause.effect.fin_accept {
                            nfa.eps.push((f + off, *q));
                        }
                    }
                    ClauseMode::Stop => {
                        for f in &clause.effect.fin_accept {
                            nfa.fin.insert(f + off);
                        }
                    }
                }
            }
            None => nfa.transitions.push((*p, sym.clone(), *q)),
        }
    }
    // Final effect after every originally accepting state.
    let off = nfa.import(&h.final_effect);
    for f in &e.fin_accept {
        nfa.eps.push((*f, h.final_effect.initial + off));
    }
    for s in &h.final_effect.fin_accept {
        nfa.fin.insert(s + off);
    }
    for s in &h.final_effect.buchi_accept {
        nfa.buchi.insert(s + off);
    }
    nfa.eliminate()
}

/// Word-by-word unrolling of the filter transformation, read directly off its
/// coinductive definition. Used as the oracle for [`filter_apply`].
pub mod reference {
    use super::*;

    /// The effect of filtering the single finite sequence `word`.
    pub fn filter_word(h: &HandlerFilter, word: &[String]) -> EffectAutomaton {
        let mut acc = EffectAutomaton::eps();
        for sym in word {
            match h.clause_for(sym) {
                Some(c) if c.mode == ClauseMode::Stop => {
                    return eff_concat(&acc, &c.effect);
                }
                Some(c) => acc = eff_concat(&acc, &c.effect),
                None => acc = eff_concat(&acc, &EffectAutomaton::atom(sym.clone())),
            }
        }
        eff_concat(&acc, &h.final_effect)
    }

    /// The effect of filtering the single ultimately periodic sequence
    /// `stem · period^ω`.
    ///
    /// If a stop-clause is hit, everything after it is severed and the result
    /// is finite-shaped. Otherwise the periodic tail becomes: the infinite
    /// concatenations of the per-cycle effect, plus — when every clause
    /// effect in the cycle admits ε, so that from some point on every handled
    /// operation can contribute nothing — the finite words made of finitely
    /// many full cycles and one partial cycle.
    pub fn filter_lasso(h: &HandlerFilter, lasso: &Lasso) -> EffectAutomaton {
        let mut acc = EffectAutomaton::eps();
        for sym in &lasso.stem {
            match h.clause_for(sym) {
                Some(c) if c.mode == ClauseMode::Stop => {
                    return eff_concat(&acc, &c.effect);
                }
                Some(c) => acc = eff_concat(&acc, &c.effect),
                None => acc = eff_concat(&acc, &EffectAutomaton::atom(sym.clone())),
            }
        }
        // One pass over the period, collecting per-letter effects.
        let mut letter_effects: Vec<EffectAutomaton> = Vec::new();
        for sym in &lasso.period {
            match h.clause_for(sym) {
                Some(c) if c.mode == ClauseMode::Stop => {
                    // The stop fires on the first occurrence in the tail.
                    let mut pre = acc;
                    for e in &letter_effects {
                        pre = eff_concat(&pre, e);
                    }
                    return eff_concat(&pre, &c.effect);
                }
                Some(c) => letter_effects.push(c.effect.clone()),
                None => letter_effects.push(EffectAutomaton::atom(sym.clone())),
            }
        }
        let cycle = letter_effects
            .iter()
            .skip(1)
            .fold(letter_effects[0].clone(), |a, b| eff_concat(&a, b));
        let mut tail = eff_omega(&cycle);
        let all_admit_eps = letter_effects.iter().all(|e| e.accepts_empty_word());
        if all_admit_eps {
            // Finitely many full cycles, then one partial cycle, then ε
            // choices forever.
            let mut partial = EffectAutomaton::eps();
            let mut prefixes = EffectAutomaton::eps();
            for e in letter_effects.iter().take(letter_effects.len().saturating_sub(1)) {
                partial = eff_concat(&partial, e);
                prefixes = eff_union(&prefixes, &partial);
            }
            let finite_tail = eff_concat(&eff_star(&cycle), &prefixes);
            tail = eff_union(&tail, &finite_tail);
        }
        eff_concat(&acc, &tail)
    }
}

/// Builds a map from operation names to clause filters, for callers that
/// need the well-formedness invariant (pairwise distinct operations).
pub fn check_distinct_ops(h: &HandlerFilter) -> Result<BTreeMap<&str, &FilterClause>, String> {
    let mut map = BTreeMap::new();
    for c in &h.clauses {
        if map.insert(c.op.as_str(), c).is_some() {
            return Err(format!("duplicate clause for operation {}", c.op));
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effect_algebra::automaton::compile;
    use crate::effect_algebra::expr::parse_effect_expr;
    use crate::effect_algebra::include::{eff_equal, Inclusion, InclusionBounds};

    fn auto(src: &str) -> EffectAutomaton {
        compile(&parse_effect_expr(src).unwrap())
    }

    fn assert_lang_eq(a: &EffectAutomaton, b: &EffectAutomaton, what: &str) {
        assert_eq!(
            eff_equal(a, b, InclusionBounds::default()),
            Inclusion::Yes,
            "language mismatch: {what}"
        );
    }

    #[test]
    fn no_clauses_on_eps_gives_final_effect() {
        let h = HandlerFilter {
            clauses: vec![],
            final_effect: auto("choose"),
        };
        let out = filter_apply(&h, &EffectAutomaton::eps());
        assert_lang_eq(&out, &auto("choose"), "final effect on eps");
    }

    #[test]
    fn stop_clause_discards_exception() {
        // Clauses: raise_PredZero =s with effect {ε}; final {ε}.
        // Filtering {ε, raise_PredZero} gives {ε}.
        let h = HandlerFilter {
            clauses: vec![FilterClause {
                op: "raise_PredZero".into(),
                mode: ClauseMode::Stop,
                effect: EffectAutomaton::eps(),
            }],
            final_effect: EffectAutomaton::eps(),
        };
        let out = filter_apply(&h, &auto("eps | raise_PredZero"));
        assert_lang_eq(&out, &EffectAutomaton::eps(), "stop clause");
    }

    #[test]
    fn continue_clause_rewrites_omega_word() {
        // write_l2 =c with effect {write_l}: (write_l . write_l2)^w becomes
        // (write_l . write_l)^w.
        let h = HandlerFilter {
            clauses: vec![FilterClause {
                op: "write_l2".into(),
                mode: ClauseMode::Continue,
                effect: auto("write_l"),
            }],
            final_effect: EffectAutomaton::eps(),
        };
        let out = filter_apply(&h, &auto("(write_l . write_l2)^w"));
        assert_lang_eq(&out, &auto("(write_l . write_l)^w"), "h1 on wfun-up effect");
    }

    #[test]
    fn continue_clause_with_eps_choice() {
        // write_l2 =c with effect {ε, write_l}: (write_l . write_l2)^w becomes
        // ((eps | write_l) . write_l)^w — every run still writes infinitely.
        let h = HandlerFilter {
            clauses: vec![FilterClause {
                op: "write_l2".into(),
                mode: ClauseMode::Continue,
                effect: auto("eps | write_l"),
            }],
            final_effect: EffectAutomaton::eps(),
        };
        let out = filter_apply(&h, &auto("(write_l . write_l2)^w"));
        assert_lang_eq(&out, &auto("(write_l . (eps | write_l))^w"), "h2 on wfun-up effect");
    }

    #[test]
    fn eps_cycle_through_buchi_becomes_finite() {
        // choose =c with effect {ε} applied to choose^w: every operation is
        // erased, so the infinitely-filtered sequence emits the finite word ε.
        let h = HandlerFilter {
            clauses: vec![FilterClause {
                op: "choose".into(),
                mode: ClauseMode::Continue,
                effect: EffectAutomaton::eps(),
            }],
            final_effect: EffectAutomaton::eps(),
        };
        let out = filter_apply(&h, &auto("choose^w"));
        assert!(out.accepts_word::<&str>(&[]), "ε accepted");
        assert!(out.inf_empty(), "no infinite word remains");
    }

    #[test]
    fn unhandled_ops_kept_and_final_appended() {
        let h = HandlerFilter {
            clauses: vec![],
            final_effect: auto("wl2"),
        };
        let out = filter_apply(&h, &auto("wl | wl . wl"));
        assert_lang_eq(&out, &auto("wl . wl2 | wl . wl . wl2"), "keep + final");
    }

    #[test]
    fn reference_word_matches_construction() {
        let h = HandlerFilter {
            clauses: vec![FilterClause {
                op: "wl2".into(),
                mode: ClauseMode::Continue,
                effect: auto("eps | wl"),
            }],
            final_effect: auto("eps"),
        };
        let e = auto("wl . wl2 . wl . wl2");
        let out = filter_apply(&h, &e);
        let ref_out = reference::filter_word(
            &h,
            &["wl".into(), "wl2".into(), "wl".into(), "wl2".into()],
        );
        // The source effect has a single word, so both must agree exactly.
        assert_lang_eq(&out, &ref_out, "single word source");
    }
}
