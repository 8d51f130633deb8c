//! Exact atoms of random subset sums and of two-valued random sums.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::mitm::{count_subsets_with_sum, subset_sum_distribution};
use super::{scale_common, LoError};

/// Largest `2d` handled exactly.
pub const ATOM_EXACT_CAP: usize = 32;
/// Largest `m` for the two-valued sum.
pub const ERDOS_EXACT_CAP: usize = 24;
const DISTRIBUTION_WORK_CAP: u64 = 400_000_000;

/// `P(v_B = a)` for `B` a uniform `d`-subset of `[2d]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsetSumAtomQuery {
    #[serde(serialize_with = "super::ser_rationals")]
    pub v: Vec<BigRational>,
    pub k: usize,
    #[serde(serialize_with = "super::ser_rational")]
    pub a: BigRational,
}

/// Whether some `J` with `|J| = k` has `v_i != v_j` for all `i ∈ J`, `j ∉ J`.
///
/// Such a `J` is a union of whole value classes, so this is a subset-sum
/// question over the class sizes.
pub fn has_j_structure(v: &[BigRational], k: usize) -> bool {
    let mut classes: HashMap<&BigRational, usize> = HashMap::new();
    for x in v {
        *classes.entry(x).or_default() += 1;
    }
    let mut reach = vec![false; k + 1];
    reach[0] = true;
    for &c in classes.values() {
        for s in (c..=k).rev() {
            reach[s] |= reach[s - c];
        }
    }
    reach[k]
}

impl SubsetSumAtomQuery {
    pub fn new(v: Vec<BigRational>, k: usize, a: BigRational) -> Result<Self, LoError> {
        if v.is_empty() || v.len() % 2 != 0 {
            return Err(LoError::InvalidParam(format!("v must have even positive length, got {}", v.len())));
        }
        let d = v.len() / 2;
        if k == 0 || k > d {
            return Err(LoError::InvalidParam(format!("k = {k} must lie in 1..={d}")));
        }
        if !has_j_structure(&v, k) {
            return Err(LoError::NoJStructure(k));
        }
        Ok(SubsetSumAtomQuery { v, k, a })
    }

    pub fn d(&self) -> usize {
        self.v.len() / 2
    }
}

fn central_binomial(d: usize) -> BigUint {
    (0..d).fold(BigUint::one(), |acc, i| acc * BigUint::from(2 * d - i) / BigUint::from(i + 1))
}

fn ratio(count: u64, total: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(count), BigInt::from(total.clone()))
}

fn check_cap(len: usize) -> Result<(), LoError> {
    if len > ATOM_EXACT_CAP {
        Err(LoError::SizeCap { size: len, cap: ATOM_EXACT_CAP, hint: "estimate by sampling subsets instead" })
    } else {
        Ok(())
    }
}

/// Exact `P(v_B = a)` for a validated query.
pub fn atom_probability(q: &SubsetSumAtomQuery) -> Result<BigRational, LoError> {
    subset_atom(&q.v, &q.a)
}

/// Exact `P(v_B = a)` without the `J` requirement.
pub fn subset_atom(v: &[BigRational], a: &BigRational) -> Result<BigRational, LoError> {
    if v.is_empty() || v.len() % 2 != 0 {
        return Err(LoError::InvalidParam("v must have even positive length".into()));
    }
    check_cap(v.len())?;
    let d = v.len() / 2;
    let refs: Vec<&BigRational> = v.iter().chain(std::iter::once(a)).collect();
    let count = match scale_common(&refs) {
        Some(mut ints) => {
            let target = ints.pop().expect("a was appended");
            count_subsets_with_sum(&ints, d, &target)
        }
        None => count_subsets_with_sum(v, d, a),
    };
    Ok(ratio(count, &central_binomial(d)))
}

/// `max_a P(v_B = a)` and a value `a` attaining it (the smallest on ties).
pub fn max_atom(v: &[BigRational]) -> Result<(BigRational, BigRational), LoError> {
    if v.is_empty() || v.len() % 2 != 0 {
        return Err(LoError::InvalidParam("v must have even positive length".into()));
    }
    check_cap(v.len())?;
    let d = v.len() / 2;
    let total = central_binomial(d);
    let refs: Vec<&BigRational> = v.iter().collect();
    let too_big = || LoError::SizeCap { size: v.len(), cap: ATOM_EXACT_CAP, hint: "too many distinct sums" };
    let (count, a) = match scale_common(&refs) {
        Some(ints) => {
            let dist = subset_sum_distribution(&ints, d, DISTRIBUTION_WORK_CAP).ok_or_else(too_big)?;
            let (s, c) = dist.into_iter().max_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0))).expect("nonempty");
            let den: BigInt = v.iter().fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
            (c, BigRational::new(BigInt::from(s), den))
        }
        None => {
            let dist = subset_sum_distribution(v, d, DISTRIBUTION_WORK_CAP).ok_or_else(too_big)?;
            let (s, c) = dist.into_iter().max_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0))).expect("nonempty");
            (c, s)
        }
    };
    Ok((ratio(count, &total), a))
}

/// `p <= 10 / sqrt(k)`, decided exactly as `p^2 k <= 100`.
pub fn within_ten_over_sqrt(p: &BigRational, k: usize) -> bool {
    p * p * BigRational::from_integer(k.into()) <= BigRational::from_integer(100.into())
}

/// Exact `sup_a P(Σ ξ_i x_i = a)` for independent two-valued `ξ_i`.
///
/// `values[i]` gives the two equally likely values of `ξ_i`; `None` means `±1`.
pub fn erdos_lo_max_atom(x: &[BigRational], values: Option<&[(BigRational, BigRational)]>) -> Result<BigRational, LoError> {
    let m = x.len();
    if m > ERDOS_EXACT_CAP {
        return Err(LoError::SizeCap { size: m, cap: ERDOS_EXACT_CAP, hint: "estimate by sampling signs instead" });
    }
    if x.iter().all(Zero::is_zero) {
        return Err(LoError::ZeroVector);
    }
    let one = BigRational::one();
    let pm = (one.clone(), -one);
    let pairs: Vec<(BigRational, BigRational)> = match values {
        Some(v) if v.len() != m => return Err(LoError::InvalidParam("one value pair per coordinate".into())),
        Some(v) => v.to_vec(),
        None => vec![pm; m],
    };
    if pairs.iter().any(|(a, b)| a == b) {
        return Err(LoError::InvalidParam("each ξ_i needs two distinct values".into()));
    }
    let terms: Vec<BigRational> =
        x.iter().zip(&pairs).flat_map(|(xi, (a, b))| [xi * a, xi * b]).collect();
    let refs: Vec<&BigRational> = terms.iter().collect();
    let best = match scale_common(&refs) {
        Some(ints) => convolve(&ints),
        None => convolve(&terms),
    };
    Ok(BigRational::new(BigInt::from(best), BigInt::one() << m))
}

/// Largest multiplicity in the distribution of `Σ_i t_{2i + b_i}` over `b ∈ {0,1}^m`.
fn convolve<T: super::mitm::SumValue>(terms: &[T]) -> u64 {
    let mut dist: HashMap<T, u64> = HashMap::from([(T::zero(), 1)]);
    for pair in terms.chunks(2) {
        let mut next: HashMap<T, u64> = HashMap::with_capacity(dist.len() * 2);
        for (s, c) in dist {
            *next.entry(s.clone() + pair[0].clone()).or_default() += c;
            *next.entry(s + pair[1].clone()).or_default() += c;
        }
        dist = next;
    }
    dist.into_values().max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
    }

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn zero_vector_atom_is_one() {
        assert_eq!(subset_atom(&q(&[0, 0, 0, 0]), &r(0, 1)).unwrap(), r(1, 1));
        assert_eq!(max_atom(&q(&[0, 0, 0, 0])).unwrap().0, r(1, 1));
        // A single value class of size 2d admits no J with k <= d.
        assert!(SubsetSumAtomQuery::new(q(&[0, 0, 0, 0]), 1, r(0, 1)).is_err());
    }

    #[test]
    fn hand_enumeration() {
        let query = SubsetSumAtomQuery::new(q(&[1, 1, 0, 0]), 2, r(1, 1)).unwrap();
        assert_eq!(atom_probability(&query).unwrap(), r(2, 3));
        assert_eq!(max_atom(&q(&[1, 1, 0, 0])).unwrap(), (r(2, 3), r(1, 1)));
    }

    #[test]
    fn rational_entries() {
        let v = vec![r(1, 2), r(1, 3), r(1, 6), r(0, 1)];
        // Pairs: 5/6, 2/3, 1/2, 1/2, 1/3, 1/6.
        let query = SubsetSumAtomQuery::new(v.clone(), 1, r(1, 2)).unwrap();
        assert_eq!(atom_probability(&query).unwrap(), r(1, 3));
        assert_eq!(max_atom(&v).unwrap(), (r(1, 3), r(1, 2)));
    }

    #[test]
    fn j_structure() {
        assert!(has_j_structure(&q(&[1, 1, 2, 3]), 1));
        assert!(has_j_structure(&q(&[1, 1, 1, 2, 2, 2]), 3));
        assert!(!has_j_structure(&q(&[1, 1, 1, 2, 2, 2]), 2));
        assert!(matches!(SubsetSumAtomQuery::new(q(&[1, 1, 1, 2, 2, 2]), 2, r(0, 1)), Err(LoError::NoJStructure(2))));
    }

    #[test]
    fn bound_comparison_is_exact() {
        assert!(within_ten_over_sqrt(&r(10, 1), 1));
        assert!(!within_ten_over_sqrt(&r(1001, 100), 1));
        assert!(within_ten_over_sqrt(&r(1, 1), 100));
        assert!(!within_ten_over_sqrt(&r(101, 100), 100));
    }

    #[test]
    fn erdos_examples() {
        assert_eq!(erdos_lo_max_atom(&q(&[0, 5, 0]), None).unwrap(), r(1, 2));
        // x = (1,1,1,1): C(4,2)/16.
        assert_eq!(erdos_lo_max_atom(&q(&[1, 1, 1, 1]), None).unwrap(), r(6, 16));
        assert!(matches!(erdos_lo_max_atom(&q(&[0, 0]), None), Err(LoError::ZeroVector)));
        let x = q(&[1, 2, 3, 4, 5]);
        let scaled: Vec<BigRational> = x.iter().map(|v| v * r(-7, 3)).collect();
        assert_eq!(erdos_lo_max_atom(&x, None).unwrap(), erdos_lo_max_atom(&scaled, None).unwrap());
        // Bernoulli 0/1 variables give the same atoms as ±1 after shifting.
        let pairs = vec![(r(0, 1), r(1, 1)); 4];
        assert_eq!(erdos_lo_max_atom(&q(&[1, 1, 1, 1]), Some(&pairs)).unwrap(), r(6, 16));
    }
}
