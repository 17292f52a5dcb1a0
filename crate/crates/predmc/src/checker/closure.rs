//! Interned closure table for the tableau construction.
//!
//! The closure of a formula is its set of subformulas together with their
//! negations. Negations are folded into polarities: the table stores one
//! entry per positive subformula, and a [`Ref`] addresses an entry with a
//! sign. Children always precede parents, so a value assignment can be
//! evaluated in one forward pass.

use crate::ltl::CoreFormula;
use std::collections::HashMap;

/// Signed reference to a closure entry; `pos == false` means the negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Ref {
    pub idx: u32,
    pub pos: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Entry {
    True,
    Atom(u8),
    And(Ref, Ref),
    Or(Ref, Ref),
    Next(Ref),
    Until(Ref, Ref),
}

pub(crate) struct Closure {
    pub entries: Vec<Entry>,
    pub root: Ref,
    /// (entry index, proposition) for each distinct atom, ascending index.
    pub atoms: Vec<(u32, u8)>,
    /// Entry indices of Until nodes, ascending; their order fixes the
    /// acceptance-set order.
    pub untils: Vec<u32>,
    /// Entry indices of Next nodes, ascending.
    pub nexts: Vec<u32>,
}

impl Closure {
    pub fn build(f: &CoreFormula) -> Closure {
        let mut builder = Builder {
            map: HashMap::new(),
            entries: Vec::new(),
        };
        let root = builder.intern(f);
        let mut atoms = Vec::new();
        let mut untils = Vec::new();
        let mut nexts = Vec::new();
        for (i, entry) in builder.entries.iter().enumerate() {
            match entry {
                Entry::Atom(p) => atoms.push((i as u32, *p)),
                Entry::Until(_, _) => untils.push(i as u32),
                Entry::Next(_) => nexts.push(i as u32),
                _ => {}
            }
        }
        Closure {
            entries: builder.entries,
            root,
            atoms,
            untils,
            nexts,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

struct Builder {
    map: HashMap<Entry, u32>,
    entries: Vec<Entry>,
}

impl Builder {
    fn intern(&mut self, f: &CoreFormula) -> Ref {
        match f {
            CoreFormula::True => self.put(Entry::True),
            CoreFormula::Atom(p) => self.put(Entry::Atom(*p)),
            CoreFormula::Not(g) => {
                let r = self.intern(g);
                Ref {
                    idx: r.idx,
                    pos: !r.pos,
                }
            }
            CoreFormula::And(a, b) => {
                let (ra, rb) = (self.intern(a), self.intern(b));
                self.put(Entry::And(ra, rb))
            }
            CoreFormula::Or(a, b) => {
                let (ra, rb) = (self.intern(a), self.intern(b));
                self.put(Entry::Or(ra, rb))
            }
            CoreFormula::Next(g) => {
                let r = self.intern(g);
                self.put(Entry::Next(r))
            }
            CoreFormula::Until(a, b) => {
                let (ra, rb) = (self.intern(a), self.intern(b));
                self.put(Entry::Until(ra, rb))
            }
        }
    }

    fn put(&mut self, entry: Entry) -> Ref {
        let idx = *self.map.entry(entry).or_insert_with(|| {
            self.entries.push(entry);
            (self.entries.len() - 1) as u32
        });
        Ref { idx, pos: true }
    }
}
