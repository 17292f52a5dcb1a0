//! Semantics-preserving simplification of core formulas.
//!
//! Applied to the negated property before the automaton construction. The
//! tableau branches on every atom, Next and Until entry of the closure, so
//! the state space is exponential in the number of distinct temporal
//! subformulas; collapsing redundancy here directly shrinks the automaton.
//! `!true` serves as the canonical false.
//!
//! Two layers. The syntactic layer folds constants, flattens and sorts
//! conjunctions and disjunctions, and rewrites temporal identities
//! (`g U true = true`, `false U h = h`, `g U g = g`, `g U (g U h) = g U h`,
//! `(g U h) U h = g U h`, `F F h = F h`, `F (g U h) = F h`, `X!g = !Xg`).
//! The semantic layer assigns each maximal temporal subformula an opaque
//! variable, computes truth tables of boolean combinations over at most
//! eight such variables, and uses them conservatively: constants fold,
//! operands with equal or complementary tables collapse, implied operands
//! drop out of conjunctions and disjunctions, and `g U h` reduces to `h`
//! when `g` implies `h` pointwise. Rules only ever shrink the tree.
//!
//! Every rule is an LTL equivalence over infinite words; the oracle suite
//! exercises the checker end to end on random formulas, so a bad rule here
//! surfaces as a verdict mismatch there.

use crate::ltl::CoreFormula;
use std::collections::HashMap;

const MAX_TABLE_VARS: usize = 8;

/// 256-bit truth table over up to eight variables; bit `a` is the value
/// under assignment `a`, where variable `i` contributes bit `i` of `a`.
type Table = [u64; 4];

fn table_fill(rows: usize, value: bool) -> Table {
    let mut t = [0u64; 4];
    if value {
        for (i, word) in t.iter_mut().enumerate() {
            let lo = i * 64;
            if rows > lo {
                let n = (rows - lo).min(64);
                *word = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            }
        }
    }
    t
}

fn table_get(t: &Table, row: usize) -> bool {
    t[row / 64] >> (row % 64) & 1 == 1
}

fn table_set(t: &mut Table, row: usize, v: bool) {
    if v {
        t[row / 64] |= 1 << (row % 64);
    } else {
        t[row / 64] &= !(1 << (row % 64));
    }
}

/// Semantic view of a subformula: its variables (sorted, deduplicated) and
/// its truth table over them. Atoms and maximal temporal subformulas are
/// the variables.
#[derive(Clone)]
struct Sem {
    vars: Vec<CoreFormula>,
    table: Table,
}

impl Sem {
    fn rows(&self) -> usize {
        1 << self.vars.len()
    }

    fn constant(&self) -> Option<bool> {
        let ones = table_fill(self.rows(), true);
        if self.table == ones {
            Some(true)
        } else if self.table == [0; 4] {
            Some(false)
        } else {
            None
        }
    }

    /// The formula this table equals when it is exactly one variable or its
    /// negation.
    fn single_var(&self) -> Option<CoreFormula> {
        for (i, v) in self.vars.iter().enumerate() {
            let mut proj = table_fill(self.rows(), false);
            for row in 0..self.rows() {
                table_set(&mut proj, row, row >> i & 1 == 1);
            }
            if self.table == proj {
                return Some(v.clone());
            }
            let ones = table_fill(self.rows(), true);
            let complement = [
                !proj[0] & ones[0],
                !proj[1] & ones[1],
                !proj[2] & ones[2],
                !proj[3] & ones[3],
            ];
            if self.table == complement {
                return Some(not(v.clone()));
            }
        }
        None
    }
}

/// Re-express two tables over the union of their variables; `None` when the
/// union exceeds the variable cap.
fn align(a: &Sem, b: &Sem) -> Option<(Vec<CoreFormula>, Table, Table)> {
    let mut vars = a.vars.clone();
    for v in &b.vars {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    vars.sort();
    if vars.len() > MAX_TABLE_VARS {
        return None;
    }
    let expand = |s: &Sem, vars: &[CoreFormula]| -> Table {
        let positions: Vec<usize> = s
            .vars
            .iter()
            .map(|v| vars.iter().position(|u| u == v).expect("var in union"))
            .collect();
        let rows = 1usize << vars.len();
        let mut out = table_fill(rows, false);
        for row in 0..rows {
            let mut local = 0usize;
            for (i, &p) in positions.iter().enumerate() {
                if row >> p & 1 == 1 {
                    local |= 1 << i;
                }
            }
            table_set(&mut out, row, table_get(&s.table, local));
        }
        out
    };
    let ta = expand(a, &vars);
    let tb = expand(b, &vars);
    Some((vars, ta, tb))
}

/// Does `a` imply `b` pointwise over their joint variables?
fn implies(a: &Sem, b: &Sem) -> bool {
    match align(a, b) {
        Some((_, ta, tb)) => (0..4).all(|i| ta[i] & !tb[i] == 0),
        None => false,
    }
}

fn equivalent(a: &Sem, b: &Sem) -> bool {
    match align(a, b) {
        Some((_, ta, tb)) => ta == tb,
        None => false,
    }
}

fn complementary(a: &Sem, b: &Sem) -> bool {
    match align(a, b) {
        Some((vars, ta, tb)) => {
            let ones = table_fill(1 << vars.len(), true);
            (0..4).all(|i| ta[i] ^ tb[i] == ones[i])
        }
        None => false,
    }
}

fn not(f: CoreFormula) -> CoreFormula {
    match f {
        CoreFormula::Not(g) => *g,
        other => CoreFormula::Not(Box::new(other)),
    }
}

fn is_false(f: &CoreFormula) -> bool {
    matches!(f, CoreFormula::Not(g) if **g == CoreFormula::True)
}

fn core_false() -> CoreFormula {
    CoreFormula::not(CoreFormula::True)
}

#[derive(Default)]
struct Simplifier {
    sems: HashMap<CoreFormula, Option<Sem>>,
}

impl Simplifier {
    /// Truth table of an already simplified formula, treating atoms and
    /// temporal nodes as variables. `None` when too many variables meet.
    fn sem(&mut self, f: &CoreFormula) -> Option<Sem> {
        if let Some(cached) = self.sems.get(f) {
            return cached.clone();
        }
        let computed = match f {
            CoreFormula::True => Some(Sem {
                vars: vec![],
                table: table_fill(1, true),
            }),
            CoreFormula::Atom(_) | CoreFormula::Next(_) | CoreFormula::Until(_, _) => Some(Sem {
                vars: vec![f.clone()],
                table: {
                    let mut t = table_fill(2, false);
                    table_set(&mut t, 1, true);
                    t
                },
            }),
            CoreFormula::Not(g) => self.sem(g).map(|s| {
                let ones = table_fill(s.rows(), true);
                Sem {
                    table: [
                        !s.table[0] & ones[0],
                        !s.table[1] & ones[1],
                        !s.table[2] & ones[2],
                        !s.table[3] & ones[3],
                    ],
                    vars: s.vars,
                }
            }),
            CoreFormula::And(a, b) | CoreFormula::Or(a, b) => {
                let conj = matches!(f, CoreFormula::And(..));
                match (self.sem(a), self.sem(b)) {
                    (Some(sa), Some(sb)) => align(&sa, &sb).map(|(vars, ta, tb)| Sem {
                        vars,
                        table: if conj {
                            [ta[0] & tb[0], ta[1] & tb[1], ta[2] & tb[2], ta[3] & tb[3]]
                        } else {
                            [ta[0] | tb[0], ta[1] | tb[1], ta[2] | tb[2], ta[3] | tb[3]]
                        },
                    }),
                    _ => None,
                }
            }
        };
        self.sems.insert(f.clone(), computed.clone());
        computed
    }

    /// Constant folding and single-variable collapse via the truth table.
    fn canonicalize(&mut self, f: CoreFormula) -> CoreFormula {
        if let Some(sem) = self.sem(&f) {
            match sem.constant() {
                Some(true) => return CoreFormula::True,
                Some(false) => return core_false(),
                None => {}
            }
            if let Some(v) = sem.single_var() {
                return v;
            }
        }
        f
    }

    fn simp(&mut self, f: &CoreFormula) -> CoreFormula {
        match f {
            CoreFormula::True | CoreFormula::Atom(_) => f.clone(),
            CoreFormula::Not(g) => not(self.simp(g)),
            CoreFormula::Next(g) => {
                let sg = self.simp(g);
                match sg {
                    // X true = true, X false = false, X!g = !Xg
                    CoreFormula::True => CoreFormula::True,
                    CoreFormula::Not(h) => not(self.simp_next(*h)),
                    other => self.simp_next(other),
                }
            }
            CoreFormula::And(a, b) => {
                let mut operands = Vec::new();
                let sa = self.simp(a);
                let sb = self.simp(b);
                collect(sa, true, &mut operands);
                collect(sb, true, &mut operands);
                self.rebuild(operands, true)
            }
            CoreFormula::Or(a, b) => {
                let mut operands = Vec::new();
                let sa = self.simp(a);
                let sb = self.simp(b);
                collect(sa, false, &mut operands);
                collect(sb, false, &mut operands);
                self.rebuild(operands, false)
            }
            CoreFormula::Until(a, b) => {
                let sa = self.simp(a);
                let sb = self.simp(b);
                self.simp_until(sa, sb)
            }
        }
    }

    fn simp_next(&mut self, g: CoreFormula) -> CoreFormula {
        if is_false(&g) {
            return core_false();
        }
        self.canonicalize(CoreFormula::Next(Box::new(g)))
    }

    fn simp_until(&mut self, g: CoreFormula, h: CoreFormula) -> CoreFormula {
        if h == CoreFormula::True || is_false(&h) {
            // g U true = true, g U false = false
            return h;
        }
        if is_false(&g) {
            // false U h = h
            return h;
        }
        if g == h {
            return h;
        }
        // g U (g U h') = g U h'
        if let CoreFormula::Until(g2, _) = &h {
            if **g2 == g {
                return h;
            }
        }
        // (g' U h) U h = g' U h
        if let CoreFormula::Until(_, h1) = &g {
            if **h1 == h {
                return g;
            }
        }
        // F (g' U h') = F h'
        if g == CoreFormula::True {
            if let CoreFormula::Until(_, h2) = &h {
                let inner = (**h2).clone();
                return self.simp_until(CoreFormula::True, inner);
            }
        }
        // pointwise g => h collapses the until to h
        if let (Some(sg), Some(sh)) = (self.sem(&g), self.sem(&h)) {
            if implies(&sg, &sh) {
                return h;
            }
        }
        self.canonicalize(CoreFormula::until(g, h))
    }

    /// Sort, deduplicate and fold an operand list, dropping operands other
    /// operands imply and collapsing complementary pairs, then rebuild
    /// right-associated.
    fn rebuild(&mut self, mut operands: Vec<CoreFormula>, conj: bool) -> CoreFormula {
        operands.sort();
        operands.dedup();
        let mut kept: Vec<CoreFormula> = Vec::with_capacity(operands.len());
        for op in operands {
            if op == CoreFormula::True {
                if !conj {
                    return CoreFormula::True;
                }
                continue;
            }
            if is_false(&op) {
                if conj {
                    return core_false();
                }
                continue;
            }
            kept.push(op);
        }
        // pairwise semantic pruning; lists stay small after flattening
        let sems: Vec<Option<Sem>> = kept.iter().map(|op| self.sem(op)).collect();
        let mut dropped = vec![false; kept.len()];
        for i in 0..kept.len() {
            if dropped[i] {
                continue;
            }
            for j in 0..kept.len() {
                if i == j || dropped[i] || dropped[j] {
                    continue;
                }
                let (Some(si), Some(sj)) = (&sems[i], &sems[j]) else {
                    continue;
                };
                if complementary(si, sj) {
                    // x with !x decides the whole list
                    return if conj {
                        core_false()
                    } else {
                        CoreFormula::True
                    };
                }
                if equivalent(si, sj) {
                    if i < j {
                        dropped[j] = true;
                    }
                    continue;
                }
                if conj {
                    // in a conjunction, i => j makes j redundant
                    if implies(si, sj) {
                        dropped[j] = true;
                    }
                } else if implies(sj, si) {
                    // in a disjunction, j => i makes j redundant
                    dropped[j] = true;
                }
            }
        }
        let kept: Vec<CoreFormula> = kept
            .into_iter()
            .zip(dropped)
            .filter_map(|(op, d)| (!d).then_some(op))
            .collect();
        let mut iter = kept.into_iter().rev();
        let last = match iter.next() {
            Some(f) => f,
            None => {
                // everything was neutral
                return if conj {
                    CoreFormula::True
                } else {
                    core_false()
                };
            }
        };
        let folded = iter.fold(last, |acc, f| {
            if conj {
                CoreFormula::And(Box::new(f), Box::new(acc))
            } else {
                CoreFormula::Or(Box::new(f), Box::new(acc))
            }
        });
        self.canonicalize(folded)
    }
}

/// Flatten nested conjunctions (`conj == true`) or disjunctions into one
/// operand list.
fn collect(f: CoreFormula, conj: bool, out: &mut Vec<CoreFormula>) {
    match f {
        CoreFormula::And(a, b) if conj => {
            collect(*a, conj, out);
            collect(*b, conj, out);
        }
        CoreFormula::Or(a, b) if !conj => {
            collect(*a, conj, out);
            collect(*b, conj, out);
        }
        other => out.push(other),
    }
}

pub(crate) fn simplify(f: &CoreFormula) -> CoreFormula {
    Simplifier::default().simp(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::eval_on_lasso;
    use crate::ltl::{desugar, parse_ltl, random_formula};
    use crate::rng::SplitMix64;

    fn simp_text(text: &str) -> CoreFormula {
        simplify(&desugar(&parse_ltl(text).unwrap()))
    }

    #[test]
    fn constants_fold() {
        let p = CoreFormula::Atom(0);
        assert_eq!(simp_text("true&p"), p);
        assert_eq!(simp_text("true|p"), CoreFormula::True);
        assert_eq!(simp_text("!!p"), p);
        assert_eq!(simp_text("pUtrue"), CoreFormula::True);
    }

    #[test]
    fn complements_collapse() {
        assert!(is_false(&simp_text("p&!p")));
        assert_eq!(simp_text("!p|p"), CoreFormula::True);
        // distributed tautology needs the semantic layer
        assert_eq!(simp_text("(p&q)|!p|!q"), CoreFormula::True);
    }

    #[test]
    fn nested_untils_collapse() {
        // F F q = F q
        assert_eq!(
            simp_text("F F q"),
            CoreFormula::until(CoreFormula::True, CoreFormula::Atom(1))
        );
        // F (p U q) = F q
        assert_eq!(simp_text("F(pUq)"), simp_text("Fq"));
        // G G p = G p
        assert_eq!(simp_text("GGp"), simp_text("Gp"));
    }

    #[test]
    fn implication_prunes_operands() {
        // p & (p | q) = p
        assert_eq!(simp_text("p&(p|q)"), CoreFormula::Atom(0));
        // p | (p & q) = p
        assert_eq!(simp_text("p|(p&q)"), CoreFormula::Atom(0));
        // (p & q) U p: left implies right, collapses to p
        assert_eq!(simp_text("(p&q)Up"), CoreFormula::Atom(0));
    }

    #[test]
    fn next_polarity_normalizes() {
        assert_eq!(simp_text("X!p"), simp_text("!Xp"));
        assert_eq!(simp_text("Xtrue"), CoreFormula::True);
    }

    #[test]
    fn semantic_duplicates_merge() {
        // (p|q) & (q|p) = p|q regardless of operand order
        assert_eq!(simp_text("(p|q)&(q|p)"), simp_text("p|q"));
        // Xp | !Xp over opaque temporal variables
        assert_eq!(simp_text("Xp|!Xp"), CoreFormula::True);
    }

    #[test]
    fn preserves_semantics_on_random_lassos() {
        let mut rng = SplitMix64::new(4242);
        for _ in 0..800 {
            let f = random_formula(1 + rng.next_below(14) as usize, 3, &mut rng);
            let core = desugar(&f);
            let simp = simplify(&core);
            assert!(
                simp.to_ltl().token_length() <= core.to_ltl().token_length(),
                "simplification grew {f}"
            );
            for _ in 0..4 {
                let pre_len = rng.next_below(3) as usize;
                let cyc_len = 1 + rng.next_below(3) as usize;
                let prefix: Vec<u32> = (0..pre_len).map(|_| rng.next_below(8) as u32).collect();
                let cycle: Vec<u32> = (0..cyc_len).map(|_| rng.next_below(8) as u32).collect();
                let a = eval_on_lasso(&core.to_ltl(), &prefix, &cycle).unwrap();
                let b = eval_on_lasso(&simp.to_ltl(), &prefix, &cycle).unwrap();
                assert_eq!(a, b, "simplification changed {f}");
            }
        }
    }
}
