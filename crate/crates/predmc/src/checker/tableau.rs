//! Elementary-set tableau for a core formula.
//!
//! States are maximal consistent subsets of the closure, stored as bit
//! vectors over the interned entry table. Boolean entries are forced by
//! their children, so enumeration only branches on atoms, Next and
//! unconstrained Until entries; local Until consistency (`h in B` forces
//! `g U h in B`, and `g U h in B` without `h` forces `g in B`) prunes the
//! rest. States are created on demand and deduplicated, so only the part of
//! the automaton reachable under the letters actually seen is ever built.

use super::closure::{Closure, Entry, Ref};
use crate::ltl::CoreFormula;
use std::collections::HashMap;

/// Fixed-width bit vector keyed by closure entry index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Bits(Box<[u64]>);

impl Bits {
    fn new(len: usize) -> Bits {
        Bits(vec![0u64; len.div_ceil(64)].into_boxed_slice())
    }

    #[inline]
    fn get(&self, i: u32) -> bool {
        self.0[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: u32, v: bool) {
        let word = &mut self.0[(i / 64) as usize];
        if v {
            *word |= 1 << (i % 64);
        } else {
            *word &= !(1 << (i % 64));
        }
    }
}

/// Pinned-atom pattern: one bit per closure atom, in closure-atom order.
/// `None` leaves atoms unconstrained.
type AtomPattern = Option<u32>;

pub(crate) struct Tableau {
    closure: Closure,
    states: Vec<Bits>,
    ids: HashMap<Bits, u32>,
    init_memo: HashMap<AtomPattern, Vec<u32>>,
    succ_memo: HashMap<(u32, AtomPattern), Vec<u32>>,
}

impl Tableau {
    pub fn new(core: &CoreFormula) -> Tableau {
        Tableau {
            closure: Closure::build(core),
            states: Vec::new(),
            ids: HashMap::new(),
            init_memo: HashMap::new(),
            succ_memo: HashMap::new(),
        }
    }

    pub fn n_untils(&self) -> usize {
        self.closure.untils.len()
    }

    /// Truth of a signed reference under a state's assignment.
    #[inline]
    fn val(bits: &Bits, r: Ref) -> bool {
        bits.get(r.idx) == r.pos
    }

    /// Project a label bitmask to the closure-atom pattern used as memo key.
    fn pattern(&self, letter: u32) -> u32 {
        let mut pat = 0u32;
        for (i, &(_, prop)) in self.closure.atoms.iter().enumerate() {
            if letter >> prop & 1 == 1 {
                pat |= 1 << i;
            }
        }
        pat
    }

    fn atom_constraints(&self, pattern: AtomPattern, forced: &mut [Option<bool>]) {
        if let Some(pat) = pattern {
            for (i, &(idx, _)) in self.closure.atoms.iter().enumerate() {
                forced[idx as usize] = Some(pat >> i & 1 == 1);
            }
        }
    }

    /// Initial automaton states; with `letter` pinned these are the states
    /// that can read that letter first.
    pub fn initial_states(&mut self, letter: u32) -> Vec<u32> {
        self.initials_with(Some(self.pattern(letter)))
    }

    /// Initial states with atoms left free.
    pub fn initial_states_free(&mut self) -> Vec<u32> {
        self.initials_with(None)
    }

    fn initials_with(&mut self, pattern: AtomPattern) -> Vec<u32> {
        if let Some(cached) = self.init_memo.get(&pattern) {
            return cached.clone();
        }
        let mut forced = vec![None; self.closure.len()];
        self.atom_constraints(pattern, &mut forced);
        let root = self.closure.root;
        // the root must come out true; conflicts simply yield no states
        let want = Some(root.pos);
        let ids = if forced[root.idx as usize].is_some() && forced[root.idx as usize] != want {
            Vec::new()
        } else {
            forced[root.idx as usize] = want;
            self.enumerate(&forced)
        };
        self.init_memo.insert(pattern, ids.clone());
        ids
    }

    /// Successor states of `state` whose atoms match `letter`.
    pub fn successors(&mut self, state: u32, letter: u32) -> Vec<u32> {
        self.successors_with(state, Some(self.pattern(letter)))
    }

    /// Successor states with atoms left free.
    pub fn successors_free(&mut self, state: u32) -> Vec<u32> {
        self.successors_with(state, None)
    }

    fn successors_with(&mut self, state: u32, pattern: AtomPattern) -> Vec<u32> {
        if let Some(cached) = self.succ_memo.get(&(state, pattern)) {
            return cached.clone();
        }
        let ids = match self.successor_constraints(state, pattern) {
            Some(forced) => self.enumerate(&forced),
            None => Vec::new(),
        };
        self.succ_memo.insert((state, pattern), ids.clone());
        ids
    }

    /// Build the forced-bit table a successor of `state` must satisfy, or
    /// `None` when the constraints conflict outright.
    fn successor_constraints(&self, state: u32, pattern: AtomPattern) -> Option<Vec<Option<bool>>> {
        let bits = &self.states[state as usize];
        let mut forced = vec![None; self.closure.len()];
        self.atom_constraints(pattern, &mut forced);
        let merge = |idx: u32, want: bool, forced: &mut Vec<Option<bool>>| -> bool {
            match forced[idx as usize] {
                Some(v) => v == want,
                None => {
                    forced[idx as usize] = Some(want);
                    true
                }
            }
        };
        // X h in B  <=>  h in B'
        for &nx in &self.closure.nexts {
            let Entry::Next(child) = self.closure.entries[nx as usize] else {
                unreachable!()
            };
            let want_val = bits.get(nx);
            let want_bit = if child.pos { want_val } else { !want_val };
            if !merge(child.idx, want_bit, &mut forced) {
                return None;
            }
        }
        // g U h in B and h not in B   forces the until into B';
        // g U h not in B and g in B   forces it out of B'
        for &ut in &self.closure.untils {
            let Entry::Until(g, h) = self.closure.entries[ut as usize] else {
                unreachable!()
            };
            if bits.get(ut) {
                if !Self::val(bits, h) && !merge(ut, true, &mut forced) {
                    return None;
                }
            } else if Self::val(bits, g) && !merge(ut, false, &mut forced) {
                return None;
            }
        }
        Some(forced)
    }

    /// Enumerate every elementary set consistent with the forced bits, in a
    /// fixed branch order (false before true), interning new states.
    fn enumerate(&mut self, forced: &[Option<bool>]) -> Vec<u32> {
        let mut bits = Bits::new(self.closure.len());
        let mut out = Vec::new();
        self.enumerate_from(0, &mut bits, forced, &mut out);
        out
    }

    fn enumerate_from(
        &mut self,
        i: usize,
        bits: &mut Bits,
        forced: &[Option<bool>],
        out: &mut Vec<u32>,
    ) {
        if i == self.closure.len() {
            out.push(self.intern(bits.clone()));
            return;
        }
        let idx = i as u32;
        match self.closure.entries[i] {
            Entry::True => {
                if forced[i] == Some(false) {
                    return;
                }
                bits.set(idx, true);
                self.enumerate_from(i + 1, bits, forced, out);
            }
            Entry::Atom(_) | Entry::Next(_) => match forced[i] {
                Some(v) => {
                    bits.set(idx, v);
                    self.enumerate_from(i + 1, bits, forced, out);
                }
                None => {
                    bits.set(idx, false);
                    self.enumerate_from(i + 1, bits, forced, out);
                    bits.set(idx, true);
                    self.enumerate_from(i + 1, bits, forced, out);
                }
            },
            Entry::And(a, b) => {
                let v = Self::val(bits, a) && Self::val(bits, b);
                if forced[i].is_some_and(|f| f != v) {
                    return;
                }
                bits.set(idx, v);
                self.enumerate_from(i + 1, bits, forced, out);
            }
            Entry::Or(a, b) => {
                let v = Self::val(bits, a) || Self::val(bits, b);
                if forced[i].is_some_and(|f| f != v) {
                    return;
                }
                bits.set(idx, v);
                self.enumerate_from(i + 1, bits, forced, out);
            }
            Entry::Until(g, h) => {
                let vg = Self::val(bits, g);
                let vh = Self::val(bits, h);
                let local = if vh {
                    Some(true)
                } else if !vg {
                    Some(false)
                } else {
                    None
                };
                match (local, forced[i]) {
                    (Some(v), Some(f)) if v != f => {}
                    (Some(v), _) => {
                        bits.set(idx, v);
                        self.enumerate_from(i + 1, bits, forced, out);
                    }
                    (None, Some(f)) => {
                        bits.set(idx, f);
                        self.enumerate_from(i + 1, bits, forced, out);
                    }
                    (None, None) => {
                        bits.set(idx, false);
                        self.enumerate_from(i + 1, bits, forced, out);
                        bits.set(idx, true);
                        self.enumerate_from(i + 1, bits, forced, out);
                    }
                }
            }
        }
    }

    fn intern(&mut self, bits: Bits) -> u32 {
        if let Some(&id) = self.ids.get(&bits) {
            return id;
        }
        let id = self.states.len() as u32;
        self.states.push(bits.clone());
        self.ids.insert(bits, id);
        id
    }

    /// Membership of `state` in acceptance set `k` (one set per Until):
    /// the until is absent or its right side already holds.
    pub fn in_acceptance_set(&self, state: u32, k: usize) -> bool {
        let ut = self.closure.untils[k];
        let Entry::Until(_, h) = self.closure.entries[ut as usize] else {
            unreachable!()
        };
        let bits = &self.states[state as usize];
        !bits.get(ut) || Self::val(bits, h)
    }

    /// Letter guard of a state as (mask, value) over proposition bits: a
    /// letter is readable iff `letter & mask == value`.
    pub fn guard(&self, state: u32) -> (u32, u32) {
        let bits = &self.states[state as usize];
        let mut mask = 0u32;
        let mut value = 0u32;
        for &(idx, prop) in &self.closure.atoms {
            mask |= 1 << prop;
            if bits.get(idx) {
                value |= 1 << prop;
            }
        }
        (mask, value)
    }
}
