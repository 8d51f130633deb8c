//! Sweeps over small vertex sets, tracking the union of per-vertex bitsets.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits;

/// How many subsets a sweep may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetBudget {
    /// Enumerate every subset when their total count is at most this.
    pub exhaustive_limit: u64,
    /// Otherwise draw this many uniform subsets of each size.
    pub samples_per_size: u64,
}

impl Default for SubsetBudget {
    fn default() -> Self {
        SubsetBudget { exhaustive_limit: 1_000_000, samples_per_size: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Exhaustive,
    Sampled,
}

/// `C(n, k)` saturating at `u64::MAX`.
pub fn binomial_sat(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Number of nonempty subsets of `[n]` with at most `k_max` elements, saturating.
pub fn subsets_up_to(n: usize, k_max: usize) -> u64 {
    (1..=k_max.min(n)).fold(0u64, |acc, k| acc.saturating_add(binomial_sat(n as u64, k as u64)))
}

/// Visits subsets `S` of `[sets.len()]` with `1 <= |S| <= k_max`, passing `S`
/// and the union of `sets[s]` over `s` in `S`. Returns the mode and the number
/// of subsets visited.
///
/// In sampled mode each size whose subsets fit in `samples_per_size` is still
/// enumerated completely; larger sizes get that many uniform draws.
pub fn sweep_unions<R: Rng + ?Sized>(
    sets: &[&[u64]],
    words: usize,
    k_max: usize,
    budget: SubsetBudget,
    rng: &mut R,
    mut visit: impl FnMut(&[usize], &[u64]),
) -> (SweepMode, u64) {
    let n = sets.len();
    let k_max = k_max.min(n);
    if subsets_up_to(n, k_max) <= budget.exhaustive_limit {
        let tested = enumerate(sets, words, 1, k_max, &mut visit);
        return (SweepMode::Exhaustive, tested);
    }
    let mut tested = 0;
    for k in 1..=k_max {
        if binomial_sat(n as u64, k as u64) <= budget.samples_per_size {
            tested += enumerate(sets, words, k, k, &mut visit);
            continue;
        }
        let mut acc = vec![0u64; words];
        for _ in 0..budget.samples_per_size {
            let mut s = index::sample(rng, n, k).into_vec();
            s.sort_unstable();
            acc.iter_mut().for_each(|w| *w = 0);
            for &v in &s {
                bits::or_into(&mut acc, sets[v]);
            }
            visit(&s, &acc);
            tested += 1;
        }
    }
    (SweepMode::Sampled, tested)
}

/// Depth-first enumeration of all subsets with `k_lo <= |S| <= k_hi`.
fn enumerate(
    sets: &[&[u64]],
    words: usize,
    k_lo: usize,
    k_hi: usize,
    visit: &mut impl FnMut(&[usize], &[u64]),
) -> u64 {
    let mut stack: Vec<usize> = Vec::with_capacity(k_hi);
    let mut acc = vec![vec![0u64; words]; k_hi + 1];
    let mut tested = 0;
    rec(sets, k_lo, k_hi, 0, &mut stack, &mut acc, &mut tested, visit);
    tested
}

#[allow(clippy::too_many_arguments)]
fn rec(
    sets: &[&[u64]],
    k_lo: usize,
    k_hi: usize,
    start: usize,
    stack: &mut Vec<usize>,
    acc: &mut [Vec<u64>],
    tested: &mut u64,
    visit: &mut impl FnMut(&[usize], &[u64]),
) {
    let depth = stack.len();
    if depth == k_hi {
        return;
    }
    for v in start..sets.len() {
        // Not enough vertices left to reach size k_lo.
        if depth + 1 + (sets.len() - v - 1) < k_lo {
            break;
        }
        let (head, tail) = acc.split_at_mut(depth + 1);
        tail[0].copy_from_slice(&head[depth]);
        bits::or_into(&mut tail[0], sets[v]);
        stack.push(v);
        if depth + 1 >= k_lo {
            visit(stack, &acc[depth + 1]);
            *tested += 1;
        }
        rec(sets, k_lo, k_hi, v + 1, stack, acc, tested, visit);
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::task_rng;

    #[test]
    fn binomials() {
        assert_eq!(binomial_sat(6, 3), 20);
        assert_eq!(binomial_sat(200, 5), 2_535_650_040);
        assert_eq!(binomial_sat(1000, 500), u64::MAX);
        assert_eq!(subsets_up_to(4, 4), 15);
    }

    #[test]
    fn exhaustive_visits_every_subset_once() {
        let singles: Vec<Vec<u64>> = (0..5).map(|v| vec![1u64 << v]).collect();
        let sets: Vec<&[u64]> = singles.iter().map(|s| s.as_slice()).collect();
        let mut seen = std::collections::HashSet::new();
        let (mode, tested) = sweep_unions(&sets, 1, 3, SubsetBudget::default(), &mut task_rng(0, 0), |s, u| {
            let mask: u64 = s.iter().map(|&v| 1u64 << v).sum();
            assert_eq!(u[0], mask);
            assert!(seen.insert(mask));
        });
        assert_eq!(mode, SweepMode::Exhaustive);
        assert_eq!(tested, 5 + 10 + 10);
    }

    #[test]
    fn sampled_mode_respects_budget() {
        let singles: Vec<Vec<u64>> = (0..30).map(|v| vec![1u64 << v]).collect();
        let sets: Vec<&[u64]> = singles.iter().map(|s| s.as_slice()).collect();
        let budget = SubsetBudget { exhaustive_limit: 100, samples_per_size: 50 };
        let mut sizes = vec![0u64; 4];
        let (mode, tested) = sweep_unions(&sets, 1, 3, budget, &mut task_rng(0, 1), |s, u| {
            sizes[s.len()] += 1;
            assert_eq!(u[0].count_ones() as usize, s.len());
        });
        assert_eq!(mode, SweepMode::Sampled);
        // Size 1 has 30 <= 50 subsets and is enumerated completely.
        assert_eq!(sizes, vec![0, 30, 50, 50]);
        assert_eq!(tested, 130);
    }
}
