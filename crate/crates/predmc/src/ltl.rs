//! LTL formulas: AST, parser, canonical rendering, token-length metric,
//! exact-length random generation, and desugaring to the core connective
//! set used by the automaton construction.

mod gen;
mod parse;

pub use gen::random_formula;
pub use parse::{parse_ltl, LtlParseError, LtlParseErrorKind};

use std::fmt;

/// Formula over atomic propositions and `{!, &, |, X, F, G, U}`.
///
/// Atoms are indices into the proposition order of the paired Kripke
/// structure; index 0 renders as `p`, 1 as `q`, and so on.
///
/// The `Display` impl renders the canonical text form: binary operators are
/// always parenthesized, unary operators never are, so parsing the rendering
/// reproduces the tree exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LtlFormula {
    True,
    Atom(u8),
    Not(Box<LtlFormula>),
    And(Box<LtlFormula>, Box<LtlFormula>),
    Or(Box<LtlFormula>, Box<LtlFormula>),
    Next(Box<LtlFormula>),
    Finally(Box<LtlFormula>),
    Globally(Box<LtlFormula>),
    Until(Box<LtlFormula>, Box<LtlFormula>),
}

impl LtlFormula {
    pub fn atom(index: u8) -> Self {
        LtlFormula::Atom(index)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: LtlFormula) -> Self {
        LtlFormula::Not(Box::new(f))
    }

    pub fn and(a: LtlFormula, b: LtlFormula) -> Self {
        LtlFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: LtlFormula, b: LtlFormula) -> Self {
        LtlFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn next(f: LtlFormula) -> Self {
        LtlFormula::Next(Box::new(f))
    }

    pub fn finally(f: LtlFormula) -> Self {
        LtlFormula::Finally(Box::new(f))
    }

    pub fn globally(f: LtlFormula) -> Self {
        LtlFormula::Globally(Box::new(f))
    }

    pub fn until(a: LtlFormula, b: LtlFormula) -> Self {
        LtlFormula::Until(Box::new(a), Box::new(b))
    }

    /// Number of atoms plus operator occurrences; parentheses do not count.
    pub fn token_length(&self) -> usize {
        match self {
            LtlFormula::True | LtlFormula::Atom(_) => 1,
            LtlFormula::Not(f)
            | LtlFormula::Next(f)
            | LtlFormula::Finally(f)
            | LtlFormula::Globally(f) => 1 + f.token_length(),
            LtlFormula::And(a, b) | LtlFormula::Or(a, b) | LtlFormula::Until(a, b) => {
                1 + a.token_length() + b.token_length()
            }
        }
    }

    /// Highest atom index used, if any atom occurs.
    pub fn max_atom(&self) -> Option<u8> {
        match self {
            LtlFormula::True => None,
            LtlFormula::Atom(i) => Some(*i),
            LtlFormula::Not(f)
            | LtlFormula::Next(f)
            | LtlFormula::Finally(f)
            | LtlFormula::Globally(f) => f.max_atom(),
            LtlFormula::And(a, b) | LtlFormula::Or(a, b) | LtlFormula::Until(a, b) => {
                match (a.max_atom(), b.max_atom()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
        }
    }
}

pub(crate) fn atom_name(index: u8) -> char {
    debug_assert!(index <= 10, "atom index {index} has no letter");
    (b'p' + index) as char
}

impl fmt::Display for LtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LtlFormula::True => f.write_str("true"),
            LtlFormula::Atom(i) => write!(f, "{}", atom_name(*i)),
            LtlFormula::Not(g) => write!(f, "!{g}"),
            LtlFormula::Next(g) => write!(f, "X{g}"),
            LtlFormula::Finally(g) => write!(f, "F{g}"),
            LtlFormula::Globally(g) => write!(f, "G{g}"),
            LtlFormula::And(a, b) => write!(f, "({a}&{b})"),
            LtlFormula::Or(a, b) => write!(f, "({a}|{b})"),
            LtlFormula::Until(a, b) => write!(f, "({a}U{b})"),
        }
    }
}

/// Formula restricted to `{atom, true, !, &, |, X, U}`; the normalization
/// target of [`desugar`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoreFormula {
    True,
    Atom(u8),
    Not(Box<CoreFormula>),
    And(Box<CoreFormula>, Box<CoreFormula>),
    Or(Box<CoreFormula>, Box<CoreFormula>),
    Next(Box<CoreFormula>),
    Until(Box<CoreFormula>, Box<CoreFormula>),
}

impl CoreFormula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: CoreFormula) -> Self {
        CoreFormula::Not(Box::new(f))
    }

    pub fn until(a: CoreFormula, b: CoreFormula) -> Self {
        CoreFormula::Until(Box::new(a), Box::new(b))
    }

    /// Inject back into the full formula language.
    pub fn to_ltl(&self) -> LtlFormula {
        match self {
            CoreFormula::True => LtlFormula::True,
            CoreFormula::Atom(i) => LtlFormula::Atom(*i),
            CoreFormula::Not(f) => LtlFormula::not(f.to_ltl()),
            CoreFormula::And(a, b) => LtlFormula::and(a.to_ltl(), b.to_ltl()),
            CoreFormula::Or(a, b) => LtlFormula::or(a.to_ltl(), b.to_ltl()),
            CoreFormula::Next(f) => LtlFormula::next(f.to_ltl()),
            CoreFormula::Until(a, b) => LtlFormula::until(a.to_ltl(), b.to_ltl()),
        }
    }
}

/// Rewrite `F g` to `true U g` and `G g` to `!(true U !g)`.
pub fn desugar(f: &LtlFormula) -> CoreFormula {
    match f {
        LtlFormula::True => CoreFormula::True,
        LtlFormula::Atom(i) => CoreFormula::Atom(*i),
        LtlFormula::Not(g) => CoreFormula::not(desugar(g)),
        LtlFormula::And(a, b) => CoreFormula::And(Box::new(desugar(a)), Box::new(desugar(b))),
        LtlFormula::Or(a, b) => CoreFormula::Or(Box::new(desugar(a)), Box::new(desugar(b))),
        LtlFormula::Next(g) => CoreFormula::Next(Box::new(desugar(g))),
        LtlFormula::Finally(g) => CoreFormula::until(CoreFormula::True, desugar(g)),
        LtlFormula::Globally(g) => CoreFormula::not(CoreFormula::until(
            CoreFormula::True,
            CoreFormula::not(desugar(g)),
        )),
        LtlFormula::Until(a, b) => CoreFormula::until(desugar(a), desugar(b)),
    }
}
