//! Kripke structures, the single-digit string codec, and a seeded random
//! generator that always yields a total transition relation.
//!
//! The compact text form packs a structure into one digit string: the first
//! `n_states * n_props` characters are the label bits in state-major order
//! (proposition order p, q, r, ...), the rest are transitions written as
//! consecutive digit pairs `from to`. That form caps the state count at 10;
//! larger structures use the self-describing extended form
//! `S:<n_states>x<n_props>:<bits>;T:<from>-<to>,...`.

use crate::rng::SplitMix64;
use std::collections::HashSet;
use thiserror::Error;

/// Largest state count the single-digit text codec can express.
pub const MAX_CODEC_STATES: u16 = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KripkeError {
    #[error("text length {len} cannot encode {n_states} states x {n_props} propositions plus transition digit pairs")]
    LengthMismatch {
        len: usize,
        n_states: u16,
        n_props: u8,
    },
    #[error("invalid character {ch:?} at position {pos}, expected {expected}")]
    InvalidChar {
        pos: usize,
        ch: char,
        expected: &'static str,
    },
    #[error("state digit {state} at position {pos} must be below {n_states}")]
    StateOutOfRange {
        pos: usize,
        state: u16,
        n_states: u16,
    },
    #[error("transition ({from},{to}) references a state outside 0..{n_states}")]
    TransitionOutOfRange { from: u16, to: u16, n_states: u16 },
    #[error("duplicate transition ({from},{to})")]
    DuplicateTransition { from: u16, to: u16 },
    #[error("transition relation is not total: state {state} has no outgoing transition")]
    NotTotal { state: u16 },
    #[error("label of state {state} sets propositions beyond the first {n_props}")]
    LabelOutOfRange { state: u16, n_props: u8 },
    #[error("unsupported geometry: {0}")]
    Geometry(&'static str),
    #[error("{n_states} states exceed the single-digit text format limit of {MAX_CODEC_STATES}")]
    TooManyStates { n_states: u16 },
    #[error("cannot place {requested} distinct transitions over {n_states} states")]
    InfeasibleTransitions { requested: usize, n_states: u16 },
    #[error("malformed extended text: {0}")]
    Extended(String),
}

/// Finite state-transition system with per-state atomic proposition labels.
///
/// Labels are bitmasks with proposition `j` at bit `j` (p = bit 0). The
/// initial state is always state 0. Construction enforces the invariants:
/// every transition endpoint is a valid state, every state has at least one
/// successor, and the transition list holds no duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeStructure {
    n_states: u16,
    n_props: u8,
    labels: Vec<u32>,
    transitions: Vec<(u16, u16)>,
}

impl KripkeStructure {
    pub fn new(
        n_states: u16,
        n_props: u8,
        labels: Vec<u32>,
        transitions: Vec<(u16, u16)>,
    ) -> Result<Self, KripkeError> {
        if n_states == 0 {
            return Err(KripkeError::Geometry("state count must be positive"));
        }
        if n_props == 0 || n_props > 32 {
            return Err(KripkeError::Geometry("proposition count must be in 1..=32"));
        }
        if labels.len() != n_states as usize {
            return Err(KripkeError::Geometry("label count must equal state count"));
        }
        for (s, &mask) in labels.iter().enumerate() {
            if n_props < 32 && mask >> n_props != 0 {
                return Err(KripkeError::LabelOutOfRange {
                    state: s as u16,
                    n_props,
                });
            }
        }
        let mut seen = HashSet::new();
        let mut has_succ = vec![false; n_states as usize];
        for &(from, to) in &transitions {
            if from >= n_states || to >= n_states {
                return Err(KripkeError::TransitionOutOfRange { from, to, n_states });
            }
            if !seen.insert((from, to)) {
                return Err(KripkeError::DuplicateTransition { from, to });
            }
            has_succ[from as usize] = true;
        }
        if let Some(state) = has_succ.iter().position(|&b| !b) {
            return Err(KripkeError::NotTotal {
                state: state as u16,
            });
        }
        Ok(KripkeStructure {
            n_states,
            n_props,
            labels,
            transitions,
        })
    }

    pub fn n_states(&self) -> u16 {
        self.n_states
    }

    pub fn n_props(&self) -> u8 {
        self.n_props
    }

    /// Label bitmask of one state.
    pub fn label(&self, state: u16) -> u32 {
        self.labels[state as usize]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Transitions in their stored order.
    pub fn transitions(&self) -> &[(u16, u16)] {
        &self.transitions
    }

    /// Initial state; fixed to state 0 by convention.
    pub fn initial(&self) -> u16 {
        0
    }

    pub fn has_transition(&self, from: u16, to: u16) -> bool {
        self.transitions.contains(&(from, to))
    }

    /// Successor lists per state, each sorted ascending.
    pub fn successors_sorted(&self) -> Vec<Vec<u16>> {
        let mut succ = vec![Vec::new(); self.n_states as usize];
        for &(from, to) in &self.transitions {
            succ[from as usize].push(to);
        }
        for list in &mut succ {
            list.sort_unstable();
        }
        succ
    }

    /// Label sequence along a sequence of states.
    pub fn labels_of(&self, states: &[u16]) -> Vec<u32> {
        states.iter().map(|&s| self.label(s)).collect()
    }
}

/// Parse the compact digit-string form.
pub fn decode_kripke(
    text: &str,
    n_states: u16,
    n_props: u8,
) -> Result<KripkeStructure, KripkeError> {
    if n_states > MAX_CODEC_STATES {
        return Err(KripkeError::TooManyStates { n_states });
    }
    if n_states == 0 {
        return Err(KripkeError::Geometry("state count must be positive"));
    }
    if n_props == 0 || n_props > 32 {
        return Err(KripkeError::Geometry("proposition count must be in 1..=32"));
    }
    let label_len = n_states as usize * n_props as usize;
    let len = text.len();
    if len < label_len + 2 || !(len - label_len).is_multiple_of(2) {
        return Err(KripkeError::LengthMismatch {
            len,
            n_states,
            n_props,
        });
    }
    let bytes = text.as_bytes();
    let mut labels = vec![0u32; n_states as usize];
    for (pos, &b) in bytes[..label_len].iter().enumerate() {
        match b {
            b'0' => {}
            b'1' => labels[pos / n_props as usize] |= 1 << (pos % n_props as usize),
            _ => {
                return Err(KripkeError::InvalidChar {
                    pos,
                    ch: b as char,
                    expected: "'0' or '1'",
                })
            }
        }
    }
    let mut transitions = Vec::with_capacity((len - label_len) / 2);
    let mut seen = HashSet::new();
    let mut pair = [0u16; 2];
    for (off, &b) in bytes[label_len..].iter().enumerate() {
        let pos = label_len + off;
        if !b.is_ascii_digit() {
            return Err(KripkeError::InvalidChar {
                pos,
                ch: b as char,
                expected: "a decimal digit",
            });
        }
        let digit = (b - b'0') as u16;
        if digit >= n_states {
            return Err(KripkeError::StateOutOfRange {
                pos,
                state: digit,
                n_states,
            });
        }
        pair[off % 2] = digit;
        if off % 2 == 1 {
            let (from, to) = (pair[0], pair[1]);
            if !seen.insert((from, to)) {
                return Err(KripkeError::DuplicateTransition { from, to });
            }
            transitions.push((from, to));
        }
    }
    KripkeStructure::new(n_states, n_props, labels, transitions)
}

/// Render the compact digit-string form; inverse of [`decode_kripke`].
pub fn encode_kripke(k: &KripkeStructure) -> Result<String, KripkeError> {
    if k.n_states > MAX_CODEC_STATES {
        return Err(KripkeError::TooManyStates {
            n_states: k.n_states,
        });
    }
    let mut out =
        String::with_capacity(k.n_states as usize * k.n_props as usize + 2 * k.transitions.len());
    for &mask in &k.labels {
        for j in 0..k.n_props {
            out.push(if mask >> j & 1 == 1 { '1' } else { '0' });
        }
    }
    for &(from, to) in &k.transitions {
        out.push((b'0' + from as u8) as char);
        out.push((b'0' + to as u8) as char);
    }
    Ok(out)
}

/// Self-describing textual form without the 10-state cap.
pub fn encode_kripke_extended(k: &KripkeStructure) -> String {
    let mut out = format!("S:{}x{}:", k.n_states, k.n_props);
    for &mask in &k.labels {
        for j in 0..k.n_props {
            out.push(if mask >> j & 1 == 1 { '1' } else { '0' });
        }
    }
    out.push_str(";T:");
    for (i, &(from, to)) in k.transitions.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("{from}-{to}"));
    }
    out
}

pub fn decode_kripke_extended(text: &str) -> Result<KripkeStructure, KripkeError> {
    let err = |msg: &str| KripkeError::Extended(msg.to_string());
    let rest = text
        .strip_prefix("S:")
        .ok_or_else(|| err("missing 'S:' prefix"))?;
    let (header, rest) = rest
        .split_once(':')
        .ok_or_else(|| err("missing ':' after geometry"))?;
    let (ns, np) = header
        .split_once('x')
        .ok_or_else(|| err("geometry must be '<states>x<props>'"))?;
    let n_states: u16 = ns.parse().map_err(|_| err("bad state count"))?;
    let n_props: u8 = np.parse().map_err(|_| err("bad proposition count"))?;
    let (bits, trans) = rest
        .split_once(";T:")
        .ok_or_else(|| err("missing ';T:' section"))?;
    let label_len = n_states as usize * n_props as usize;
    if bits.len() != label_len {
        return Err(err("label bit count does not match geometry"));
    }
    let mut labels = vec![0u32; n_states as usize];
    for (pos, b) in bits.bytes().enumerate() {
        match b {
            b'0' => {}
            b'1' => labels[pos / n_props as usize] |= 1 << (pos % n_props as usize),
            _ => return Err(err("label bits must be '0' or '1'")),
        }
    }
    let mut transitions = Vec::new();
    for part in trans.split(',') {
        let (f, t) = part
            .split_once('-')
            .ok_or_else(|| err("transition must be '<from>-<to>'"))?;
        let from: u16 = f.parse().map_err(|_| err("bad transition source"))?;
        let to: u16 = t.parse().map_err(|_| err("bad transition target"))?;
        transitions.push((from, to));
    }
    KripkeStructure::new(n_states, n_props, labels, transitions)
}

/// Seeded random structure with exactly `n_transitions` distinct transitions
/// and a total relation. Each state first receives one random successor,
/// then the remaining transitions are drawn without duplicates.
pub fn random_kripke(
    n_states: u16,
    n_props: u8,
    n_transitions: usize,
    rng: &mut SplitMix64,
) -> Result<KripkeStructure, KripkeError> {
    if n_states == 0 {
        return Err(KripkeError::Geometry("state count must be positive"));
    }
    if n_props == 0 || n_props > 32 {
        return Err(KripkeError::Geometry("proposition count must be in 1..=32"));
    }
    let max = n_states as usize * n_states as usize;
    if n_transitions < n_states as usize || n_transitions > max {
        return Err(KripkeError::InfeasibleTransitions {
            requested: n_transitions,
            n_states,
        });
    }
    let mut labels = vec![0u32; n_states as usize];
    for label in labels.iter_mut() {
        for j in 0..n_props {
            if rng.next_bool() {
                *label |= 1 << j;
            }
        }
    }
    let mut transitions = Vec::with_capacity(n_transitions);
    let mut seen = HashSet::with_capacity(n_transitions);
    for from in 0..n_states {
        let to = rng.next_below(n_states as u64) as u16;
        seen.insert((from, to));
        transitions.push((from, to));
    }
    while transitions.len() < n_transitions {
        let from = rng.next_below(n_states as u64) as u16;
        let to = rng.next_below(n_states as u64) as u16;
        if seen.insert((from, to)) {
            transitions.push((from, to));
        }
    }
    KripkeStructure::new(n_states, n_props, labels, transitions)
}
