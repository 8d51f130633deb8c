//! Mismatched pairs `(x_π(i), x_π(i+d))` under a uniform permutation of `[2d]`.
//!
//! `|E(π)|` counts the indices `i <= d` whose pair is mismatched, the number
//! of genuinely two-valued summands in the shuffled subset sum.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::LoError;
use crate::frac::Frac;
use crate::stats::Proportion;

/// `x = (1, ..., 1, 0, ..., 0)` with `k` ones and length `2d`.
pub fn canonical_vector(k: usize, d: usize) -> Vec<u8> {
    (0..2 * d).map(|i| (i < k) as u8).collect()
}

/// `|E(π)|` for the permutation `perm` of `[2d]`.
pub fn mismatch_count(perm: &[usize], x: &[u8], d: usize) -> usize {
    (0..d).filter(|&i| x[perm[i]] != x[perm[i + d]]).count()
}

fn binom(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Exact law of `|E|` for the canonical vector: entry `m` is `P(|E| = m)`.
///
/// The ones occupy a uniform `k`-subset of the `2d` slots. With `m` mixed
/// pairs the remaining `k - m` ones fill `(k - m)/2` pairs, giving
/// `C(d, m) C(d - m, (k - m)/2) 2^m` placements.
pub fn mismatch_distribution(k: usize, d: usize) -> Vec<BigRational> {
    let total = binom(2 * d, k);
    (0..=k)
        .map(|m| {
            if (k - m) % 2 != 0 || m > d {
                return BigRational::zero();
            }
            let ways = binom(d, m) * binom(d - m, (k - m) / 2) * (BigInt::one() << m);
            BigRational::new(ways, total.clone())
        })
        .collect()
}

fn check(k: usize, d: usize) -> Result<(), LoError> {
    if k == 0 || k > d {
        Err(LoError::InvalidParam(format!("k = {k} must lie in 1..={d}")))
    } else {
        Ok(())
    }
}

/// Exact `P(|E| <= k/50)`, the threshold compared as `50 |E| <= k`.
pub fn permutation_pair_exact(k: usize, d: usize) -> Result<BigRational, LoError> {
    check(k, d)?;
    Ok(mismatch_distribution(k, d).into_iter().enumerate().filter(|(m, _)| 50 * m <= k).map(|(_, p)| p).sum())
}

/// `(k / (1.1 d))^{k/3}`.
pub fn permutation_bound(k: usize, d: usize) -> f64 {
    (k as f64 / (1.1 * d as f64)).powf(k as f64 / 3.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationEstimate {
    pub k: usize,
    pub d: usize,
    pub threshold: Frac,
    pub samples: u64,
    pub hits: u64,
    pub frequency: Proportion,
    pub bound: f64,
}

/// Monte Carlo frequency of `|E(π)| <= k/50` over `samples` uniform permutations.
pub fn permutation_pair_estimate<R: Rng + ?Sized>(
    k: usize,
    d: usize,
    samples: u64,
    rng: &mut R,
) -> Result<PermutationEstimate, LoError> {
    check(k, d)?;
    let x = canonical_vector(k, d);
    let mut perm: Vec<usize> = (0..2 * d).collect();
    let mut hits = 0;
    for _ in 0..samples {
        perm.shuffle(rng);
        if 50 * mismatch_count(&perm, &x, d) <= k {
            hits += 1;
        }
    }
    Ok(PermutationEstimate {
        k,
        d,
        threshold: Frac::new(k as i64, 50),
        samples,
        hits,
        frequency: Proportion::new(hits, samples),
        bound: permutation_bound(k, d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::task_rng;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn distribution_is_a_law() {
        for d in 1..8 {
            for k in 1..=d {
                let total: BigRational = mismatch_distribution(k, d).into_iter().sum();
                assert_eq!(total, BigRational::one(), "k = {k}, d = {d}");
            }
        }
    }

    #[test]
    fn small_cases() {
        // One 1 is always mismatched.
        assert_eq!(permutation_pair_exact(1, 4).unwrap(), r(0, 1));
        // Two ones share a pair with probability d / C(2d, 2) = 4/28.
        assert_eq!(permutation_pair_exact(2, 4).unwrap(), r(1, 7));
        assert_eq!(permutation_pair_exact(4, 4).unwrap(), r(6, 70));
        assert!(permutation_pair_exact(5, 4).is_err());
    }

    #[test]
    fn single_one_never_hits() {
        let e = permutation_pair_estimate(1, 5, 1000, &mut task_rng(1, 0)).unwrap();
        assert_eq!(e.hits, 0);
    }
}
