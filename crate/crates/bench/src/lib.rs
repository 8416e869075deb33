//! Shared inputs for the criterion benchmarks.

use cirquent_core::scaling::{self, Family, Instance};
use cirquent_core::{parse, Formula};

/// Seed used by every randomized benchmark family.
pub const SEED: u64 = 17;

pub fn instances(family: Family, count: usize) -> Vec<Instance> {
    scaling::family(family, count, SEED)
}

/// Formulas with repeated atoms, where witness search has to try matchings.
pub fn matching_heavy() -> Vec<(&'static str, Formula)> {
    [
        ("dup-pair", "(~P | P) & (~P | P)"),
        ("triple", "~P | ~P | P & P & (Q | ~Q)"),
        ("mixed", "(~P & Q | ~Q & P) | (~P | P) & (~Q | Q)"),
    ]
    .into_iter()
    .map(|(name, text)| (name, parse(text).expect("benchmark formula")))
    .collect()
}
