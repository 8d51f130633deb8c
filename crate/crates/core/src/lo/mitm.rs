//! Meet-in-the-middle counting of fixed-size subsets by their sum.

use std::collections::HashMap;
use std::hash::Hash;
use std::ops::{Add, Sub};

use num_traits::Zero;

/// Values usable as exact subset sums.
pub trait SumValue: Clone + Eq + Hash + Zero + Add<Output = Self> + Sub<Output = Self> {}
impl<T: Clone + Eq + Hash + Zero + Add<Output = T> + Sub<Output = T>> SumValue for T {}

/// `tables[s][x]` = number of `s`-subsets of `values` summing to `x`.
pub fn half_table<T: SumValue>(values: &[T]) -> Vec<HashMap<T, u64>> {
    let mut tables: Vec<HashMap<T, u64>> = vec![HashMap::new(); values.len() + 1];
    fn rec<T: SumValue>(values: &[T], i: usize, size: usize, sum: T, tables: &mut [HashMap<T, u64>]) {
        if i == values.len() {
            *tables[size].entry(sum).or_default() += 1;
            return;
        }
        rec(values, i + 1, size + 1, sum.clone() + values[i].clone(), tables);
        rec(values, i + 1, size, sum, tables);
    }
    rec(values, 0, 0, T::zero(), &mut tables);
    tables
}

/// Number of `size`-subsets of `values` with sum exactly `target`.
pub fn count_subsets_with_sum<T: SumValue>(values: &[T], size: usize, target: &T) -> u64 {
    if size > values.len() {
        return 0;
    }
    let (left, right) = values.split_at(values.len() / 2);
    let lt = half_table(left);
    let rt = half_table(right);
    let mut total = 0;
    for (s, lmap) in lt.iter().enumerate() {
        if s > size || size - s >= rt.len() {
            continue;
        }
        let rmap = &rt[size - s];
        for (x, &c) in lmap {
            if let Some(&c2) = rmap.get(&(target.clone() - x.clone())) {
                total += c * c2;
            }
        }
    }
    total
}

/// Full distribution of sums of `size`-subsets, or `None` when the pairwise
/// combination would exceed `work_cap` table lookups.
pub fn subset_sum_distribution<T: SumValue>(values: &[T], size: usize, work_cap: u64) -> Option<HashMap<T, u64>> {
    let (left, right) = values.split_at(values.len() / 2);
    let lt = half_table(left);
    let rt = half_table(right);
    let pairs = |s: usize| -> Option<(&HashMap<T, u64>, &HashMap<T, u64>)> {
        (s <= size && size - s < rt.len()).then(|| (&lt[s], &rt[size - s]))
    };
    let work: u64 = (0..lt.len()).filter_map(pairs).map(|(a, b)| (a.len() * b.len()) as u64).sum();
    if work > work_cap {
        return None;
    }
    let mut dist: HashMap<T, u64> = HashMap::new();
    for (lmap, rmap) in (0..lt.len()).filter_map(pairs) {
        for (x, &c) in lmap {
            for (y, &c2) in rmap {
                *dist.entry(x.clone() + y.clone()).or_default() += c * c2;
            }
        }
    }
    Some(dist)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(values: &[i64], size: usize, target: i64) -> u64 {
        (0u32..1 << values.len())
            .filter(|m| m.count_ones() as usize == size)
            .filter(|m| (0..values.len()).filter(|&i| m >> i & 1 == 1).map(|i| values[i]).sum::<i64>() == target)
            .count() as u64
    }

    #[test]
    fn matches_naive_counts() {
        let v = [3i64, -1, 4, 1, -5, 9, 2, 6, 5, -3];
        for size in 0..=v.len() {
            for target in -10..=25 {
                assert_eq!(count_subsets_with_sum(&v, size, &target), naive(&v, size, target));
            }
        }
    }

    #[test]
    fn distribution_sums_to_binomial() {
        let v = [1i64, 1, 1, 0, 0, 0];
        let dist = subset_sum_distribution(&v, 3, u64::MAX).unwrap();
        assert_eq!(dist.values().sum::<u64>(), 20);
        assert_eq!(dist[&1], 9);
        assert!(subset_sum_distribution(&v, 3, 1).is_none());
    }
}
