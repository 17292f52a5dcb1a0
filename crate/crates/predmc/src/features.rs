//! Deterministic encoding of a (structure, formula) pair into a fixed-length
//! numeric vector for the tree learner.
//!
//! Layout: label bits in state-major order, then transition pairs flattened
//! in their stored order, then the formula in prefix (Polish) token codes,
//! right-padded with the PAD code. Prefix notation needs no parenthesis
//! tokens, so the encoding is injective for fixed geometry: distinct inputs
//! produce distinct vectors.

use crate::kripke::KripkeStructure;
use crate::ltl::LtlFormula;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Token codes. PAD is 0 by construction; atoms p, q, r take 1..=3.
pub mod vocab {
    pub const PAD: u8 = 0;
    pub const ATOM_BASE: u8 = 1; // p = 1, q = 2, r = 3
    pub const NOT: u8 = 4;
    pub const AND: u8 = 5;
    pub const OR: u8 = 6;
    pub const NEXT: u8 = 7;
    pub const FINALLY: u8 = 8;
    pub const GLOBALLY: u8 = 9;
    pub const UNTIL: u8 = 10;
    pub const TRUE: u8 = 11;
}

/// Largest atom index the vocabulary can express.
pub const MAX_VOCAB_ATOM: u8 = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeatureError {
    #[error("structure geometry ({n_states} states, {n_props} props, {n_transitions} transitions) does not match the feature layout")]
    GeometryMismatch {
        n_states: u16,
        n_props: u8,
        n_transitions: usize,
    },
    #[error("formula has {len} tokens, layout allows {max}")]
    FormulaTooLong { len: usize, max: usize },
    #[error("atom index {atom} has no vocabulary code")]
    AtomUnsupported { atom: u8 },
}

/// Geometry every encoded pair must share, plus the formula pad length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub n_states: u16,
    pub n_props: u8,
    pub n_transitions: usize,
    pub max_formula_tokens: usize,
}

impl FeatureConfig {
    pub fn vector_len(&self) -> usize {
        self.n_states as usize * self.n_props as usize
            + 2 * self.n_transitions
            + self.max_formula_tokens
    }

    /// Stable identifier stored inside trained models; prediction rejects
    /// vectors from a different layout.
    pub fn layout_tag(&self) -> String {
        format!(
            "k{}x{}t{}f{}",
            self.n_states, self.n_props, self.n_transitions, self.max_formula_tokens
        )
    }
}

/// Fixed-length numeric feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Encode one (structure, formula) pair under a layout.
pub fn featurize(
    k: &KripkeStructure,
    f: &LtlFormula,
    cfg: &FeatureConfig,
) -> Result<FeatureVector, FeatureError> {
    if k.n_states() != cfg.n_states
        || k.n_props() != cfg.n_props
        || k.transitions().len() != cfg.n_transitions
    {
        return Err(FeatureError::GeometryMismatch {
            n_states: k.n_states(),
            n_props: k.n_props(),
            n_transitions: k.transitions().len(),
        });
    }
    let tokens = f.token_length();
    if tokens > cfg.max_formula_tokens {
        return Err(FeatureError::FormulaTooLong {
            len: tokens,
            max: cfg.max_formula_tokens,
        });
    }
    if let Some(atom) = f.max_atom() {
        if atom > MAX_VOCAB_ATOM {
            return Err(FeatureError::AtomUnsupported { atom });
        }
    }
    let mut values = Vec::with_capacity(cfg.vector_len());
    for &mask in k.labels() {
        for j in 0..cfg.n_props {
            values.push(f64::from(mask >> j & 1));
        }
    }
    for &(from, to) in k.transitions() {
        values.push(f64::from(from));
        values.push(f64::from(to));
    }
    let mut codes = Vec::with_capacity(tokens);
    prefix_codes(f, &mut codes);
    values.extend(codes.iter().map(|&c| f64::from(c)));
    values.resize(cfg.vector_len(), f64::from(vocab::PAD));
    Ok(FeatureVector(values))
}

/// Prefix (Polish) token codes: operator first, then operands left to right.
fn prefix_codes(f: &LtlFormula, out: &mut Vec<u8>) {
    match f {
        LtlFormula::True => out.push(vocab::TRUE),
        LtlFormula::Atom(i) => out.push(vocab::ATOM_BASE + i),
        LtlFormula::Not(g) => {
            out.push(vocab::NOT);
            prefix_codes(g, out);
        }
        LtlFormula::Next(g) => {
            out.push(vocab::NEXT);
            prefix_codes(g, out);
        }
        LtlFormula::Finally(g) => {
            out.push(vocab::FINALLY);
            prefix_codes(g, out);
        }
        LtlFormula::Globally(g) => {
            out.push(vocab::GLOBALLY);
            prefix_codes(g, out);
        }
        LtlFormula::And(a, b) => {
            out.push(vocab::AND);
            prefix_codes(a, out);
            prefix_codes(b, out);
        }
        LtlFormula::Or(a, b) => {
            out.push(vocab::OR);
            prefix_codes(a, out);
            prefix_codes(b, out);
        }
        LtlFormula::Until(a, b) => {
            out.push(vocab::UNTIL);
            prefix_codes(a, out);
            prefix_codes(b, out);
        }
    }
}
