//! Nested depth-first search for an accepting cycle, generic over a graph
//! that may expand its nodes on demand.
//!
//! The outer (blue) search explores in the order the graph yields
//! successors; when an accepting node is finished, the inner (red) search
//! looks for a way back onto the blue stack. Red marks persist across inner
//! searches. Finding a blue-stack node closes an accepting cycle, which is
//! returned as a lasso (prefix from an initial node, then the cycle).

use std::collections::HashSet;
use std::hash::Hash;

pub(crate) trait OmegaGraph {
    type Node: Copy + Eq + Hash + Ord;

    fn initials(&mut self) -> Vec<Self::Node>;
    fn successors(&mut self, node: Self::Node) -> Vec<Self::Node>;
    fn accepting(&self, node: Self::Node) -> bool;
}

/// Accepting lasso as (prefix, cycle) node sequences.
pub(crate) type FoundLasso<N> = Option<(Vec<N>, Vec<N>)>;

struct Frame<N> {
    node: N,
    succs: Vec<N>,
    next: usize,
}

pub(crate) fn find_accepting_lasso<G: OmegaGraph>(graph: &mut G) -> FoundLasso<G::Node> {
    let mut cyan: HashSet<G::Node> = HashSet::new();
    let mut blue: HashSet<G::Node> = HashSet::new();
    let mut red: HashSet<G::Node> = HashSet::new();

    for root in graph.initials() {
        if blue.contains(&root) {
            continue;
        }
        let mut stack: Vec<Frame<G::Node>> = Vec::new();
        cyan.insert(root);
        let succs = graph.successors(root);
        stack.push(Frame {
            node: root,
            succs,
            next: 0,
        });
        while let Some(top) = stack.last_mut() {
            if top.next < top.succs.len() {
                let child = top.succs[top.next];
                top.next += 1;
                if !cyan.contains(&child) && !blue.contains(&child) {
                    cyan.insert(child);
                    let succs = graph.successors(child);
                    stack.push(Frame {
                        node: child,
                        succs,
                        next: 0,
                    });
                }
            } else {
                let node = top.node;
                if graph.accepting(node) {
                    if let Some((red_path, hit)) = red_search(graph, node, &cyan, &mut red) {
                        let blue_path: Vec<G::Node> = stack.iter().map(|f| f.node).collect();
                        let at = blue_path
                            .iter()
                            .position(|&n| n == hit)
                            .expect("hit node must be on the blue stack");
                        let mut cycle = blue_path[at..].to_vec();
                        cycle.extend_from_slice(&red_path[1..]);
                        let prefix = blue_path[..at].to_vec();
                        return Some((prefix, cycle));
                    }
                }
                stack.pop();
                cyan.remove(&node);
                blue.insert(node);
            }
        }
    }
    None
}

/// Inner search from an accepting seed; succeeds on reaching any node of the
/// blue stack. Returns the red stack (seed first) and the hit node.
fn red_search<G: OmegaGraph>(
    graph: &mut G,
    seed: G::Node,
    cyan: &HashSet<G::Node>,
    red: &mut HashSet<G::Node>,
) -> Option<(Vec<G::Node>, G::Node)> {
    let mut stack: Vec<Frame<G::Node>> = Vec::new();
    red.insert(seed);
    let succs = graph.successors(seed);
    stack.push(Frame {
        node: seed,
        succs,
        next: 0,
    });
    while let Some(top) = stack.last_mut() {
        if top.next < top.succs.len() {
            let child = top.succs[top.next];
            top.next += 1;
            if cyan.contains(&child) {
                let path: Vec<G::Node> = stack.iter().map(|f| f.node).collect();
                return Some((path, child));
            }
            if red.insert(child) {
                let succs = graph.successors(child);
                stack.push(Frame {
                    node: child,
                    succs,
                    next: 0,
                });
            }
        } else {
            stack.pop();
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Fixed graph for the search itself.
    struct Fixed {
        succs: Vec<Vec<usize>>,
        accepting: Vec<bool>,
        initials: Vec<usize>,
    }

    impl OmegaGraph for Fixed {
        type Node = usize;
        fn initials(&mut self) -> Vec<usize> {
            self.initials.clone()
        }
        fn successors(&mut self, n: usize) -> Vec<usize> {
            self.succs[n].clone()
        }
        fn accepting(&self, n: usize) -> bool {
            self.accepting[n]
        }
    }

    fn lasso_valid(g: &Fixed, prefix: &[usize], cycle: &[usize]) {
        assert!(!cycle.is_empty());
        assert!(cycle.iter().any(|&n| g.accepting(n)));
        let full: Vec<usize> = prefix.iter().chain(cycle).copied().collect();
        assert!(g.initials.contains(&full[0]));
        for w in full.windows(2) {
            assert!(g.succs[w[0]].contains(&w[1]), "missing edge {w:?}");
        }
        assert!(g.succs[*cycle.last().unwrap()].contains(&cycle[0]));
    }

    #[test]
    fn finds_self_loop() {
        let mut g = Fixed {
            succs: vec![vec![1], vec![1]],
            accepting: vec![false, true],
            initials: vec![0],
        };
        let (prefix, cycle) = find_accepting_lasso(&mut g).expect("cycle");
        lasso_valid(&g, &prefix, &cycle);
    }

    #[test]
    fn rejects_non_accepting_cycle() {
        let mut g = Fixed {
            succs: vec![vec![1], vec![0, 2], vec![]],
            accepting: vec![false, false, true],
            initials: vec![0],
        };
        assert!(find_accepting_lasso(&mut g).is_none());
    }

    #[test]
    fn accepting_cycle_behind_prefix() {
        // 0 -> 1 -> 2 -> 3 -> 2, with 3 accepting
        let mut g = Fixed {
            succs: vec![vec![1], vec![2], vec![3], vec![2]],
            accepting: vec![false, false, false, true],
            initials: vec![0],
        };
        let (prefix, cycle) = find_accepting_lasso(&mut g).expect("cycle");
        lasso_valid(&g, &prefix, &cycle);
        assert!(cycle.contains(&3));
    }

    #[test]
    fn accepting_node_without_cycle_is_ignored() {
        // accepting node 1 reaches only a sink cycle that avoids it
        let mut g = Fixed {
            succs: vec![vec![1], vec![2], vec![2]],
            accepting: vec![false, true, false],
            initials: vec![0],
        };
        assert!(find_accepting_lasso(&mut g).is_none());
    }
}
