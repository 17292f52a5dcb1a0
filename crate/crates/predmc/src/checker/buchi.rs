//! Materialized Büchi automaton over elementary closure subsets.
//!
//! [`build_buchi`] runs the tableau construction for a core formula and
//! materializes every state reachable from the initial sets, degeneralizing
//! the one-acceptance-set-per-Until condition with a counter. The automaton
//! accepts exactly the infinite words satisfying the formula; the tests and
//! the acceptance suite validate that against the independent lasso
//! evaluator rather than assuming it.

use super::search::{find_accepting_lasso, OmegaGraph};
use super::tableau::Tableau;
use crate::ltl::CoreFormula;
use std::collections::HashMap;

/// One automaton state: a (tableau state, counter) pair after
/// degeneralization.
#[derive(Debug, Clone)]
pub struct BuchiState {
    /// Letter guard: a label bitmask `a` is readable iff `a & mask == value`.
    pub guard_mask: u32,
    pub guard_value: u32,
    pub successors: Vec<u32>,
    pub accepting: bool,
    /// Degeneralization counter; strictly below the Until count plus one.
    pub counter: u16,
}

#[derive(Debug, Clone)]
pub struct BuchiAutomaton {
    states: Vec<BuchiState>,
    initial: Vec<u32>,
    acceptance_sets: usize,
}

impl BuchiAutomaton {
    pub fn states(&self) -> &[BuchiState] {
        &self.states
    }

    pub fn initial(&self) -> &[u32] {
        &self.initial
    }

    /// Number of generalized acceptance sets (one per Until subformula).
    pub fn acceptance_sets(&self) -> usize {
        self.acceptance_sets
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Whether a state can read a letter.
    pub fn reads(&self, state: u32, letter: u32) -> bool {
        let s = &self.states[state as usize];
        letter & s.guard_mask == s.guard_value
    }
}

/// Build the automaton whose language is exactly the set of infinite words
/// satisfying `f`.
pub fn build_buchi(f: &CoreFormula) -> BuchiAutomaton {
    let mut tab = Tableau::new(f);
    let n_untils = tab.n_untils();
    let counters = n_untils.max(1) as u16;

    let mut ids: HashMap<(u32, u16), u32> = HashMap::new();
    let mut order: Vec<(u32, u16)> = Vec::new();
    let mut intern = |key: (u32, u16), order: &mut Vec<(u32, u16)>| -> u32 {
        *ids.entry(key).or_insert_with(|| {
            order.push(key);
            (order.len() - 1) as u32
        })
    };

    let initial: Vec<u32> = tab
        .initial_states_free()
        .into_iter()
        .map(|q| intern((q, 0), &mut order))
        .collect();

    let mut states: Vec<BuchiState> = Vec::new();
    let mut cursor = 0;
    while cursor < order.len() {
        let (q, c) = order[cursor];
        let next_counter = if n_untils == 0 {
            0
        } else if tab.in_acceptance_set(q, c as usize) {
            (c + 1) % counters
        } else {
            c
        };
        let successors: Vec<u32> = tab
            .successors_free(q)
            .into_iter()
            .map(|q2| intern((q2, next_counter), &mut order))
            .collect();
        let (guard_mask, guard_value) = tab.guard(q);
        let accepting = c == 0 && (n_untils == 0 || tab.in_acceptance_set(q, 0));
        states.push(BuchiState {
            guard_mask,
            guard_value,
            successors,
            accepting,
            counter: c,
        });
        cursor += 1;
    }

    BuchiAutomaton {
        states,
        initial,
        acceptance_sets: n_untils,
    }
}

/// Run the automaton over the ultimately periodic word `prefix . cycle^w`
/// and report acceptance. Panics on an empty cycle.
pub fn buchi_accepts_lasso(a: &BuchiAutomaton, prefix: &[u32], cycle: &[u32]) -> bool {
    assert!(!cycle.is_empty(), "cycle must be nonempty");
    let word: Vec<u32> = prefix.iter().chain(cycle).copied().collect();
    let mut graph = WordProduct {
        automaton: a,
        word,
        loop_back: prefix.len(),
    };
    find_accepting_lasso(&mut graph).is_some()
}

/// Product of an automaton with a single lasso-shaped word; node =
/// (position, automaton state) where the state is about to read the letter
/// at that position.
struct WordProduct<'a> {
    automaton: &'a BuchiAutomaton,
    word: Vec<u32>,
    loop_back: usize,
}

impl OmegaGraph for WordProduct<'_> {
    type Node = (u32, u32);

    fn initials(&mut self) -> Vec<Self::Node> {
        self.automaton.initial().iter().map(|&q| (0, q)).collect()
    }

    fn successors(&mut self, (pos, q): Self::Node) -> Vec<Self::Node> {
        let letter = self.word[pos as usize];
        if !self.automaton.reads(q, letter) {
            return Vec::new();
        }
        let next = if (pos as usize) + 1 < self.word.len() {
            pos + 1
        } else {
            self.loop_back as u32
        };
        self.automaton.states()[q as usize]
            .successors
            .iter()
            .map(|&q2| (next, q2))
            .collect()
    }

    fn accepting(&self, (_, q): Self::Node) -> bool {
        self.automaton.states()[q as usize].accepting
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::eval_on_lasso;
    use crate::ltl::{desugar, parse_ltl, random_formula, LtlFormula};
    use crate::rng::SplitMix64;

    fn automaton_for(text: &str) -> BuchiAutomaton {
        build_buchi(&desugar(&parse_ltl(text).unwrap()))
    }

    #[test]
    fn atom_automaton_checks_first_letter() {
        let a = automaton_for("p");
        assert!(buchi_accepts_lasso(&a, &[], &[0b001]));
        assert!(buchi_accepts_lasso(&a, &[0b001], &[0b000]));
        assert!(!buchi_accepts_lasso(&a, &[], &[0b000]));
        assert!(!buchi_accepts_lasso(&a, &[0b000], &[0b001]));
    }

    #[test]
    fn true_automaton_is_universal() {
        let a = automaton_for("true");
        assert_eq!(a.acceptance_sets(), 0);
        let mut rng = SplitMix64::new(8);
        for _ in 0..50 {
            let cycle: Vec<u32> = (0..1 + rng.next_below(4))
                .map(|_| rng.next_below(8) as u32)
                .collect();
            let prefix: Vec<u32> = (0..rng.next_below(4))
                .map(|_| rng.next_below(8) as u32)
                .collect();
            assert!(buchi_accepts_lasso(&a, &prefix, &cycle));
        }
    }

    #[test]
    fn counter_stays_below_until_count_plus_one() {
        let a = automaton_for("(pUq)&(qUr)");
        assert_eq!(a.acceptance_sets(), 2);
        for s in a.states() {
            assert!((s.counter as usize) < a.acceptance_sets() + 1);
        }
    }

    #[test]
    fn finally_matches_lasso_oracle() {
        let a = automaton_for("F q");
        let f = parse_ltl("F q").unwrap();
        let mut rng = SplitMix64::new(31);
        for _ in 0..1000 {
            let prefix: Vec<u32> = (0..rng.next_below(4))
                .map(|_| rng.next_below(8) as u32)
                .collect();
            let cycle: Vec<u32> = (0..1 + rng.next_below(4))
                .map(|_| rng.next_below(8) as u32)
                .collect();
            let expect = eval_on_lasso(&f, &prefix, &cycle).unwrap();
            assert_eq!(
                buchi_accepts_lasso(&a, &prefix, &cycle),
                expect,
                "prefix={prefix:?} cycle={cycle:?}"
            );
        }
    }

    #[test]
    fn random_formulas_match_lasso_oracle() {
        let mut rng = SplitMix64::new(77);
        for _ in 0..250 {
            let f = random_formula(1 + rng.next_below(7) as usize, 3, &mut rng);
            let a = build_buchi(&desugar(&f));
            for _ in 0..8 {
                let prefix: Vec<u32> = (0..rng.next_below(3))
                    .map(|_| rng.next_below(8) as u32)
                    .collect();
                let cycle: Vec<u32> = (0..1 + rng.next_below(3))
                    .map(|_| rng.next_below(8) as u32)
                    .collect();
                let expect = eval_on_lasso(&f, &prefix, &cycle).unwrap();
                assert_eq!(
                    buchi_accepts_lasso(&a, &prefix, &cycle),
                    expect,
                    "f={f} prefix={prefix:?} cycle={cycle:?}"
                );
            }
        }
    }

    #[test]
    fn negation_has_complementary_language() {
        let mut rng = SplitMix64::new(99);
        for _ in 0..100 {
            let f = random_formula(1 + rng.next_below(6) as usize, 3, &mut rng);
            let a = build_buchi(&desugar(&f));
            let na = build_buchi(&desugar(&LtlFormula::not(f.clone())));
            for _ in 0..6 {
                let prefix: Vec<u32> = (0..rng.next_below(3))
                    .map(|_| rng.next_below(8) as u32)
                    .collect();
                let cycle: Vec<u32> = (0..1 + rng.next_below(3))
                    .map(|_| rng.next_below(8) as u32)
                    .collect();
                assert_ne!(
                    buchi_accepts_lasso(&a, &prefix, &cycle),
                    buchi_accepts_lasso(&na, &prefix, &cycle),
                    "f={f}"
                );
            }
        }
    }
}
