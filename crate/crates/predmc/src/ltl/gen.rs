//! Seeded random formulas with an exact token length.

use super::LtlFormula;
use crate::rng::SplitMix64;

/// Random formula with `token_length` exactly `length`.
///
/// At every node the constructor is drawn uniformly from the ones that can
/// still spend the remaining budget exactly: an atom costs 1 and closes a
/// branch, a unary operator costs 1 plus its subtree, a binary operator
/// costs 1 plus both subtrees with the remainder split uniformly. Leaves are
/// atoms drawn uniformly from the first `n_props` propositions.
pub fn random_formula(length: usize, n_props: u8, rng: &mut SplitMix64) -> LtlFormula {
    assert!(length >= 1, "formula length must be at least 1");
    assert!(
        (1..=11).contains(&n_props),
        "proposition count must be in 1..=11"
    );
    gen(length, n_props, rng)
}

fn gen(budget: usize, n_props: u8, rng: &mut SplitMix64) -> LtlFormula {
    if budget == 1 {
        return LtlFormula::Atom(rng.next_below(n_props as u64) as u8);
    }
    // budget 2 leaves room for a unary operator only
    let choices = if budget == 2 { 4 } else { 7 };
    match rng.next_below(choices) {
        0 => LtlFormula::not(gen(budget - 1, n_props, rng)),
        1 => LtlFormula::next(gen(budget - 1, n_props, rng)),
        2 => LtlFormula::finally(gen(budget - 1, n_props, rng)),
        3 => LtlFormula::globally(gen(budget - 1, n_props, rng)),
        op => {
            let left = 1 + rng.next_below((budget - 2) as u64) as usize;
            let right = budget - 1 - left;
            let a = gen(left, n_props, rng);
            let b = gen(right, n_props, rng);
            match op {
                4 => LtlFormula::and(a, b),
                5 => LtlFormula::or(a, b),
                _ => LtlFormula::until(a, b),
            }
        }
    }
}
