//! Exact explicit-state LTL model checking.
//!
//! [`check`] decides whether every infinite path of a Kripke structure
//! satisfies a formula: the negated property is desugared to the core
//! connective set, simplified, turned into a Büchi automaton over elementary
//! subsets of its closure, and the product with the structure is searched
//! for an accepting cycle by nested depth-first search. A found cycle is
//! returned as a lasso counterexample over Kripke states.
//!
//! [`eval_on_lasso`] is an independent evaluator for ultimately periodic
//! words that shares no code with the automaton path; together with
//! [`enumerate_lassos`] it serves as a cross-check oracle for the checker.

mod buchi;
mod closure;
mod lasso;
mod product;
mod search;
mod simplify;
mod tableau;

pub use buchi::{buchi_accepts_lasso, build_buchi, BuchiAutomaton, BuchiState};
pub use lasso::{enumerate_lassos, eval_on_lasso, LassoError, LassoIter};
pub use product::ProductGraph;

use crate::kripke::KripkeStructure;
use crate::ltl::{desugar, LtlFormula};
use search::{find_accepting_lasso, OmegaGraph};
use tableau::Tableau;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CheckError {
    #[error("formula uses atom index {atom}, but the structure has only {n_props} propositions")]
    AtomOutOfRange { atom: u8, n_props: u8 },
}

/// Ultimately periodic path: a finite prefix followed by a repeated cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<u16>,
    pub cycle: Vec<u16>,
}

/// Outcome of a check. `holds` is true exactly when no counterexample
/// exists; a counterexample is always a valid path of the checked structure,
/// including the prefix-to-cycle seam and the cycle wrap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub counterexample: Option<Lasso>,
}

/// Decide whether every infinite path of `k` from its initial state
/// satisfies `f`.
pub fn check(k: &KripkeStructure, f: &LtlFormula) -> Result<Verdict, CheckError> {
    if let Some(atom) = f.max_atom() {
        if atom >= k.n_props() {
            return Err(CheckError::AtomOutOfRange {
                atom,
                n_props: k.n_props(),
            });
        }
    }
    let negated = LtlFormula::not(f.clone());
    let core = simplify::simplify(&desugar(&negated));
    let mut tab = Tableau::new(&core);
    let mut product = LazyProduct::new(k, &mut tab);
    match find_accepting_lasso(&mut product) {
        Some((prefix, cycle)) => Ok(Verdict {
            holds: false,
            counterexample: Some(Lasso {
                prefix: prefix.into_iter().map(|n| n.0).collect(),
                cycle: cycle.into_iter().map(|n| n.0).collect(),
            }),
        }),
        None => Ok(Verdict {
            holds: true,
            counterexample: None,
        }),
    }
}

/// Product of a Kripke structure with the automaton for the negated
/// property, expanded on demand during the emptiness search. A node pairs a
/// Kripke state with a tableau state whose atom bits were pinned to that
/// Kripke state's label, plus the degeneralization counter.
struct LazyProduct<'a> {
    labels: Vec<u32>,
    succ: Vec<Vec<u16>>,
    initial: u16,
    tab: &'a mut Tableau,
    counters: u16,
}

impl<'a> LazyProduct<'a> {
    fn new(k: &KripkeStructure, tab: &'a mut Tableau) -> Self {
        let counters = tab.n_untils().max(1) as u16;
        LazyProduct {
            labels: k.labels().to_vec(),
            succ: k.successors_sorted(),
            initial: k.initial(),
            tab,
            counters,
        }
    }

    fn next_counter(&self, state: u32, counter: u16) -> u16 {
        if self.tab.n_untils() == 0 {
            return 0;
        }
        if self.tab.in_acceptance_set(state, counter as usize) {
            (counter + 1) % self.counters
        } else {
            counter
        }
    }
}

impl OmegaGraph for LazyProduct<'_> {
    type Node = (u16, u32, u16);

    fn initials(&mut self) -> Vec<Self::Node> {
        let letter = self.labels[self.initial as usize];
        let mut nodes: Vec<Self::Node> = self
            .tab
            .initial_states(letter)
            .into_iter()
            .map(|q| (self.initial, q, 0))
            .collect();
        nodes.sort_unstable();
        nodes
    }

    fn successors(&mut self, (s, q, c): Self::Node) -> Vec<Self::Node> {
        let next = self.next_counter(q, c);
        let mut out = Vec::new();
        for &s2 in &self.succ[s as usize] {
            let letter = self.labels[s2 as usize];
            for q2 in self.tab.successors(q, letter) {
                out.push((s2, q2, next));
            }
        }
        out.sort_unstable();
        out
    }

    fn accepting(&self, (_, q, c): Self::Node) -> bool {
        c == 0 && (self.tab.n_untils() == 0 || self.tab.in_acceptance_set(q, 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::{decode_kripke, random_kripke};
    use crate::ltl::{parse_ltl, random_formula};
    use crate::rng::SplitMix64;

    const K0: &str = "0000100100101110110122124303243";
    const F1: &str = "!X((!F((!p&q|r)U(p|!q|r)))U(F(p&q&!r)))";
    const F2: &str = "X!((F(G!(!p|!q&r)))U((p&q|r)U(!p|q&r)))";

    fn lasso_is_path(k: &KripkeStructure, l: &Lasso) -> bool {
        if l.cycle.is_empty() {
            return false;
        }
        let full: Vec<u16> = l.prefix.iter().chain(&l.cycle).copied().collect();
        if full[0] != k.initial() {
            return false;
        }
        for w in full.windows(2) {
            if !k.has_transition(w[0], w[1]) {
                return false;
            }
        }
        k.has_transition(*l.cycle.last().unwrap(), l.cycle[0])
    }

    #[test]
    fn reference_pair_holds() {
        let k = decode_kripke(K0, 5, 3).unwrap();
        let f = parse_ltl(F1).unwrap();
        let v = check(&k, &f).unwrap();
        assert!(v.holds);
        assert!(v.counterexample.is_none());
    }

    #[test]
    fn reference_pair_fails_with_valid_counterexample() {
        let k = decode_kripke(K0, 5, 3).unwrap();
        let f = parse_ltl(F2).unwrap();
        let v = check(&k, &f).unwrap();
        assert!(!v.holds);
        let ce = v.counterexample.expect("counterexample");
        assert!(lasso_is_path(&k, &ce));
        let ok = eval_on_lasso(&f, &k.labels_of(&ce.prefix), &k.labels_of(&ce.cycle)).unwrap();
        assert!(!ok, "counterexample must violate the formula");
    }

    #[test]
    fn tautology_and_contradiction() {
        let k = decode_kripke(K0, 5, 3).unwrap();
        assert!(check(&k, &parse_ltl("p|!p").unwrap()).unwrap().holds);
        assert!(!check(&k, &parse_ltl("p&!p").unwrap()).unwrap().holds);
    }

    #[test]
    fn globally_on_self_loop() {
        let k = decode_kripke("10000", 1, 3).unwrap();
        assert!(check(&k, &parse_ltl("Gp").unwrap()).unwrap().holds);
        assert!(!check(&k, &parse_ltl("Gq").unwrap()).unwrap().holds);
        assert!(check(&k, &parse_ltl("XXp").unwrap()).unwrap().holds);
    }

    #[test]
    fn repeated_liveness_needs_both_targets() {
        // two states alternating p and q: both GFp and GFq hold
        let k = decode_kripke("1000100110", 2, 3).unwrap();
        assert!(check(&k, &parse_ltl("GFp & GFq").unwrap()).unwrap().holds);
        assert!(!check(&k, &parse_ltl("GFr").unwrap()).unwrap().holds);
        assert!(check(&k, &parse_ltl("G(p|q)").unwrap()).unwrap().holds);
    }

    #[test]
    fn unfair_branch_defeats_liveness() {
        // state 0 (p) may loop forever or move to the q self-loop at 1;
        // GFq fails on the path that never leaves 0
        let k = decode_kripke("100010000111", 2, 3).unwrap();
        let v = check(&k, &parse_ltl("GFq").unwrap()).unwrap();
        assert!(!v.holds);
        let ce = v.counterexample.unwrap();
        assert!(lasso_is_path(&k, &ce));
        // the counterexample must stay inside the p-loop
        assert!(ce.cycle.iter().all(|&s| s == 0));
        // whereas eventually-q does hold on no path? it fails the same way
        assert!(!check(&k, &parse_ltl("Fq").unwrap()).unwrap().holds);
        // and always-p fails via the branch that leaves
        assert!(!check(&k, &parse_ltl("Gp").unwrap()).unwrap().holds);
    }

    #[test]
    fn atom_out_of_range_is_an_error() {
        let k = decode_kripke("1000", 1, 2).unwrap();
        assert_eq!(
            check(&k, &parse_ltl("r").unwrap()),
            Err(CheckError::AtomOutOfRange {
                atom: 2,
                n_props: 2
            })
        );
    }

    #[test]
    fn counterexamples_always_validate() {
        let mut rng = SplitMix64::new(2024);
        for _ in 0..300 {
            let n = 2 + rng.next_below(4) as u16;
            let t = n as usize + rng.next_below(n as u64 + 1) as usize;
            let k = random_kripke(n, 3, t, &mut rng).unwrap();
            let f = random_formula(1 + rng.next_below(9) as usize, 3, &mut rng);
            let v = check(&k, &f).unwrap();
            if let Some(ce) = &v.counterexample {
                assert!(!v.holds);
                assert!(lasso_is_path(&k, ce));
                let sat =
                    eval_on_lasso(&f, &k.labels_of(&ce.prefix), &k.labels_of(&ce.cycle)).unwrap();
                assert!(!sat, "k={:?} f={f}", crate::kripke::encode_kripke(&k));
            }
        }
    }

    #[test]
    fn agrees_with_materialized_product() {
        let mut rng = SplitMix64::new(555);
        for _ in 0..200 {
            let n = 2 + rng.next_below(3) as u16;
            let t = n as usize + rng.next_below(n as u64) as usize;
            let k = random_kripke(n, 3, t, &mut rng).unwrap();
            let f = random_formula(1 + rng.next_below(7) as usize, 3, &mut rng);
            let lazy = check(&k, &f).unwrap().holds;
            let negated = LtlFormula::not(f.clone());
            let automaton = build_buchi(&simplify::simplify(&desugar(&negated)));
            let product = ProductGraph::build(&k, &automaton);
            let materialized = product.find_accepting_lasso().is_none();
            assert_eq!(lazy, materialized, "f={f}");
        }
    }
}
