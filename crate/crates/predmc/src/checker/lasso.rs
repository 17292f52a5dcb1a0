//! Independent oracle utilities over ultimately periodic words.
//!
//! [`eval_on_lasso`] evaluates a formula on `prefix . cycle^w` by fixpoint
//! sweeps over the finitely many positions; it deliberately shares no code
//! with the automaton construction or the product search, so the two can
//! cross-check each other. [`enumerate_lassos`] streams every bounded lasso
//! of a structure for exhaustive refutation at small sizes.

use super::Lasso;
use crate::kripke::KripkeStructure;
use crate::ltl::LtlFormula;
use std::collections::{HashSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LassoError {
    #[error("lasso cycle must be nonempty")]
    EmptyCycle,
}

/// Truth of `f` at position 0 of the word `prefix . cycle^w`, where each
/// letter is a label bitmask.
pub fn eval_on_lasso(f: &LtlFormula, prefix: &[u32], cycle: &[u32]) -> Result<bool, LassoError> {
    if cycle.is_empty() {
        return Err(LassoError::EmptyCycle);
    }
    let word: Vec<u32> = prefix.iter().chain(cycle).copied().collect();
    let n = word.len();
    let succ: Vec<usize> = (0..n)
        .map(|i| if i + 1 < n { i + 1 } else { prefix.len() })
        .collect();
    Ok(truth(f, &word, &succ)[0])
}

/// Per-position truth table, computed bottom-up. Until and Finally are least
/// fixpoints (start from the base case, add positions until stable),
/// Globally is a greatest fixpoint; each sweep runs backwards so acyclic
/// positions settle immediately and the loop iterates at most cycle-length
/// times.
fn truth(f: &LtlFormula, word: &[u32], succ: &[usize]) -> Vec<bool> {
    let n = word.len();
    match f {
        LtlFormula::True => vec![true; n],
        LtlFormula::Atom(p) => word.iter().map(|&a| a >> p & 1 == 1).collect(),
        LtlFormula::Not(g) => truth(g, word, succ).into_iter().map(|v| !v).collect(),
        LtlFormula::And(a, b) => {
            let ta = truth(a, word, succ);
            let tb = truth(b, word, succ);
            ta.into_iter().zip(tb).map(|(x, y)| x && y).collect()
        }
        LtlFormula::Or(a, b) => {
            let ta = truth(a, word, succ);
            let tb = truth(b, word, succ);
            ta.into_iter().zip(tb).map(|(x, y)| x || y).collect()
        }
        LtlFormula::Next(g) => {
            let tg = truth(g, word, succ);
            (0..n).map(|i| tg[succ[i]]).collect()
        }
        LtlFormula::Finally(g) => {
            let tg = truth(g, word, succ);
            let mut v = tg;
            sweep(&mut v, succ, |now, next| now || next)
        }
        LtlFormula::Globally(g) => {
            let tg = truth(g, word, succ);
            let mut v = tg;
            sweep(&mut v, succ, |now, next| now && next)
        }
        LtlFormula::Until(a, b) => {
            let ta = truth(a, word, succ);
            let tb = truth(b, word, succ);
            let mut v = tb.clone();
            loop {
                let mut changed = false;
                for i in (0..v.len()).rev() {
                    let new = tb[i] || (ta[i] && v[succ[i]]);
                    if new != v[i] {
                        v[i] = new;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            v
        }
    }
}

fn sweep(v: &mut Vec<bool>, succ: &[usize], combine: fn(bool, bool) -> bool) -> Vec<bool> {
    loop {
        let mut changed = false;
        for i in (0..v.len()).rev() {
            let new = combine(v[i], v[succ[i]]);
            if new != v[i] {
                v[i] = new;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    std::mem::take(v)
}

/// Stream of every lasso of `k` from the initial state with a prefix of at
/// most `max_prefix` states and a cycle of 1 to `max_cycle` states. Each
/// yielded pair is a valid path including the prefix-to-cycle seam and the
/// cycle wrap; no (prefix, cycle) pair repeats.
pub fn enumerate_lassos(k: &KripkeStructure, max_prefix: usize, max_cycle: usize) -> LassoIter {
    assert!(max_cycle >= 1, "cycle bound must be at least 1");
    LassoIter {
        succ: k.successors_sorted(),
        edges: k.transitions().iter().copied().collect(),
        max_prefix,
        max_cycle,
        path: vec![k.initial()],
        cursors: vec![0],
        pending: VecDeque::new(),
        primed: false,
        done: false,
    }
}

/// Depth-first walk over the spine `prefix ++ cycle`; every split point of
/// the current path with a wrap edge yields one lasso.
pub struct LassoIter {
    succ: Vec<Vec<u16>>,
    edges: HashSet<(u16, u16)>,
    max_prefix: usize,
    max_cycle: usize,
    path: Vec<u16>,
    cursors: Vec<usize>,
    pending: VecDeque<Lasso>,
    primed: bool,
    done: bool,
}

impl LassoIter {
    /// Every split of the current path into prefix and cycle whose wrap edge
    /// exists becomes one lasso.
    fn emit_splits(&mut self) {
        let m = self.path.len();
        let last = self.path[m - 1];
        let lo = m.saturating_sub(self.max_cycle);
        let hi = self.max_prefix.min(m - 1);
        let mut p = lo;
        while p <= hi {
            if self.edges.contains(&(last, self.path[p])) {
                self.pending.push_back(Lasso {
                    prefix: self.path[..p].to_vec(),
                    cycle: self.path[p..].to_vec(),
                });
            }
            p += 1;
        }
    }
}

impl Iterator for LassoIter {
    type Item = Lasso;

    fn next(&mut self) -> Option<Lasso> {
        loop {
            if let Some(l) = self.pending.pop_front() {
                return Some(l);
            }
            if self.done {
                return None;
            }
            if !self.primed {
                self.primed = true;
                self.emit_splits();
                continue;
            }
            if self.path.len() < self.max_prefix + self.max_cycle {
                let here = *self.path.last().unwrap() as usize;
                let cursor = self.cursors.last_mut().unwrap();
                if *cursor < self.succ[here].len() {
                    let next = self.succ[here][*cursor];
                    *cursor += 1;
                    self.path.push(next);
                    self.cursors.push(0);
                    self.emit_splits();
                    continue;
                }
            }
            // children exhausted or depth limit reached
            self.path.pop();
            self.cursors.pop();
            if self.path.is_empty() {
                self.done = true;
            }
        }
    }
}
