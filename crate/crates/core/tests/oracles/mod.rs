//! Brute-force reference implementations, deliberately naive and independent
//! of the library code they check.

#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn binom(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// All `d`-subsets of `[n]` as bitmasks.
fn subsets(n: usize, d: usize) -> Vec<u32> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == d).collect()
}

/// Every 0/1 `n x n` matrix with row and column sums `d`, as sorted rows.
/// Rows are chosen one at a time; a partial choice is dropped as soon as a
/// column exceeds `d`.
pub fn all_regular(n: usize, d: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(n: usize, d: usize, opts: &[u32], col: &mut Vec<usize>, cur: &mut Vec<u32>, out: &mut Vec<Vec<Vec<usize>>>) {
        if cur.len() == n {
            if col.iter().all(|&c| c == d) {
                out.push(cur.iter().map(|&m| (0..n).filter(|&j| m >> j & 1 == 1).collect()).collect());
            }
            return;
        }
        for &m in opts {
            if (0..n).any(|j| m >> j & 1 == 1 && col[j] == d) {
                continue;
            }
            for j in 0..n {
                col[j] += (m >> j & 1) as usize;
            }
            cur.push(m);
            rec(n, d, opts, col, cur, out);
            cur.pop();
            for j in 0..n {
                col[j] -= (m >> j & 1) as usize;
            }
        }
    }
    let opts = subsets(n, d);
    let mut out = Vec::new();
    rec(n, d, &opts, &mut vec![0; n], &mut Vec::new(), &mut out);
    out
}

/// Visits every permutation of `0..n` (Heap's algorithm) with its sign.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize], i64)) {
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut sign = 1i64;
    f(&p, sign);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            sign = -sign;
            f(&p, sign);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Leibniz determinant of a 0/1 matrix given by sorted rows.
pub fn det(rows: &[Vec<usize>]) -> i64 {
    let n = rows.len();
    let mut dense = vec![vec![0i64; n]; n];
    for (i, r) in rows.iter().enumerate() {
        for &j in r {
            dense[i][j] = 1;
        }
    }
    let mut total = 0i64;
    for_each_permutation(n, |p, s| {
        if (0..n).all(|i| dense[i][p[i]] == 1) {
            total += s;
        }
    });
    total
}

/// `max_j C(k, j) C(2d - k, d - j) / C(2d, d)`: the largest atom of the
/// number of ones a uniform `d`-subset picks from `k` ones among `2d`.
pub fn hypergeometric_max_atom(k: usize, d: usize) -> BigRational {
    let best = (0..=k.min(d)).map(|j| binom(k, j) * binom(2 * d - k, d - j)).max().unwrap();
    BigRational::new(BigInt::from(best), BigInt::from(binom(2 * d, d)))
}

/// Sum distribution over all `size`-subsets, by scanning every bitmask.
pub fn naive_subset_sums(values: &[i64], size: usize) -> HashMap<i64, u64> {
    let mut out = HashMap::new();
    for m in subsets(values.len(), size) {
        let s: i64 = (0..values.len()).filter(|&i| m >> i & 1 == 1).map(|i| values[i]).sum();
        *out.entry(s).or_default() += 1;
    }
    out
}

/// Law of the number of mismatched pairs `(x_π(i), x_π(i+d))` over all
/// `(2d)!` permutations, for `x` with `k` leading ones. Entry `m` counts
/// permutations with exactly `m` mismatches.
pub fn mismatch_counts(k: usize, d: usize) -> Vec<u64> {
    let x: Vec<u8> = (0..2 * d).map(|i| (i < k) as u8).collect();
    let mut counts = vec![0u64; d + 1];
    for_each_permutation(2 * d, |p, _| {
        let m = (0..d).filter(|&i| x[p[i]] != x[p[i + d]]).count();
        counts[m] += 1;
    });
    counts
}

/// Is there `I, J` with `|I| >= l`, `|J| >= r` and no edge from `I` to `J`?
/// Tries every pair of subsets.
pub fn has_zero_minor(rows: &[Vec<usize>], l: usize, r: usize) -> bool {
    let n = rows.len();
    let masks: Vec<u32> = rows.iter().map(|r| r.iter().fold(0, |m, &j| m | 1 << j)).collect();
    for i_set in 0u32..1 << n {
        if (i_set.count_ones() as usize) < l {
            continue;
        }
        for j_set in 0u32..1 << n {
            if (j_set.count_ones() as usize) < r {
                continue;
            }
            if (0..n).all(|i| i_set >> i & 1 == 0 || masks[i] & j_set == 0) {
                return true;
            }
        }
    }
    false
}
