//! Exact and Monte Carlo checks of Littlewood–Offord type anti-concentration
//! and of the row-shuffling classes.

mod atoms;
mod mitm;
mod permutation;
mod shuffle;

pub use atoms::{
    atom_probability, erdos_lo_max_atom, has_j_structure, max_atom, subset_atom, within_ten_over_sqrt,
    SubsetSumAtomQuery, ATOM_EXACT_CAP, ERDOS_EXACT_CAP,
};
pub use mitm::{count_subsets_with_sum, half_table, subset_sum_distribution, SumValue};
pub use permutation::{
    canonical_vector, mismatch_count, mismatch_distribution, permutation_bound, permutation_pair_estimate,
    permutation_pair_exact, PermutationEstimate,
};
pub use shuffle::{shuffle_class_experiment, ShuffleClass, ShuffleClassReport, ShuffleOutcome, SHUFFLE_COMBINATIONS, SHUFFLE_COEFF_RANGE, SHUFFLE_S_CAP};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LoError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("size {size} exceeds the exact cap {cap}; {hint}")]
    SizeCap { size: usize, cap: usize, hint: &'static str },
    #[error("no index set J of size {0} separates the values of v")]
    NoJStructure(usize),
    #[error("x = 0 has empty support")]
    ZeroVector,
    #[error("graph is not in Ω²_ε: minimum pair union {min_union} < 2(1-ε)d")]
    NotInOmega2 { min_union: usize },
}

/// Scales rationals to integers over their common denominator, or `None`
/// if some result needs more than 100 bits.
pub(crate) fn scale_common(values: &[&BigRational]) -> Option<Vec<i128>> {
    let lcm = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    values
        .iter()
        .map(|v| (v.numer() * (&lcm / v.denom())).to_i128().filter(|x| x.unsigned_abs() < 1u128 << 100))
        .collect()
}

pub(crate) fn ser_rational<S: serde::Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub(crate) fn ser_rationals<S: serde::Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

pub(crate) fn ser_ints<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}
