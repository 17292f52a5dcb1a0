//! Materialized product of a Kripke structure with a Büchi automaton.
//!
//! A node pairs a Kripke state with an automaton state; an edge exists when
//! the structure moves, the automaton can read the label of the source
//! Kripke state, and the automaton moves accordingly. Acceptance comes from
//! the automaton side. The product is nonempty (has a reachable accepting
//! cycle) exactly when some path of the structure is accepted.

use super::buchi::BuchiAutomaton;
use super::search::{find_accepting_lasso, FoundLasso, OmegaGraph};
use crate::kripke::KripkeStructure;
use std::collections::HashMap;

#[derive(Debug)]
pub struct ProductGraph {
    nodes: Vec<(u16, u32)>,
    successors: Vec<Vec<u32>>,
    initial: Vec<u32>,
    accepting: Vec<bool>,
}

impl ProductGraph {
    pub fn build(k: &KripkeStructure, automaton: &BuchiAutomaton) -> ProductGraph {
        let k_succ = k.successors_sorted();
        let mut ids: HashMap<(u16, u32), u32> = HashMap::new();
        let mut nodes: Vec<(u16, u32)> = Vec::new();
        let mut intern = |key: (u16, u32), nodes: &mut Vec<(u16, u32)>| -> u32 {
            *ids.entry(key).or_insert_with(|| {
                nodes.push(key);
                (nodes.len() - 1) as u32
            })
        };
        let initial: Vec<u32> = automaton
            .initial()
            .iter()
            .map(|&q| intern((k.initial(), q), &mut nodes))
            .collect();
        let mut successors: Vec<Vec<u32>> = Vec::new();
        let mut cursor = 0;
        while cursor < nodes.len() {
            let (s, q) = nodes[cursor];
            let mut out = Vec::new();
            if automaton.reads(q, k.label(s)) {
                let mut targets: Vec<(u16, u32)> = Vec::new();
                for &s2 in &k_succ[s as usize] {
                    for &q2 in &automaton.states()[q as usize].successors {
                        targets.push((s2, q2));
                    }
                }
                targets.sort_unstable();
                targets.dedup();
                for key in targets {
                    out.push(intern(key, &mut nodes));
                }
            }
            successors.push(out);
            cursor += 1;
        }
        let accepting = nodes
            .iter()
            .map(|&(_, q)| automaton.states()[q as usize].accepting)
            .collect();
        ProductGraph {
            nodes,
            successors,
            initial,
            accepting,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: u32) -> (u16, u32) {
        self.nodes[id as usize]
    }

    /// Search for a reachable accepting cycle; the returned lasso is over
    /// (Kripke state, automaton state) pairs.
    pub fn find_accepting_lasso(&self) -> FoundLasso<(u16, u32)> {
        let mut walker = Walker { graph: self };
        let (prefix, cycle) = find_accepting_lasso(&mut walker)?;
        let project = |ids: Vec<u32>| ids.into_iter().map(|id| self.node(id)).collect();
        Some((project(prefix), project(cycle)))
    }
}

struct Walker<'a> {
    graph: &'a ProductGraph,
}

impl OmegaGraph for Walker<'_> {
    type Node = u32;

    fn initials(&mut self) -> Vec<u32> {
        self.graph.initial.clone()
    }

    fn successors(&mut self, n: u32) -> Vec<u32> {
        self.graph.successors[n as usize].clone()
    }

    fn accepting(&self, n: u32) -> bool {
        self.graph.accepting[n as usize]
    }
}
