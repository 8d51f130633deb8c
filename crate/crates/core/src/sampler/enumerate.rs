//! Exhaustive enumeration of `M_{n,d}` for tiny `n`.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{check_params, SamplerError};
use crate::bits;
use crate::graph::Digraph;

pub const DEFAULT_ENUMERATION_CAP: usize = 6;

/// Calls `visit` once for every element of `M_{n,d}`, in lexicographic row order.
///
/// Row-by-row backtracking over d-subsets; a column whose remaining
/// capacity equals the number of rows left is forced into the current row.
pub fn visit_all(n: usize, d: usize, cap: usize, mut visit: impl FnMut(&Digraph)) -> Result<(), SamplerError> {
    check_params(n, d)?;
    if n > cap {
        return Err(SamplerError::EnumerationCap { n, d, cap, estimated: count_all(n, d).to_string() });
    }
    let words = bits::words_for(n);
    let mut rows = vec![0u64; n * words];
    let mut capacity = vec![d; n];
    let mut chosen = Vec::with_capacity(d);
    fill_row(n, d, 0, &mut rows, &mut capacity, &mut chosen, 0, &mut visit);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn fill_row(
    n: usize,
    d: usize,
    row: usize,
    rows: &mut Vec<u64>,
    capacity: &mut Vec<usize>,
    chosen: &mut Vec<usize>,
    from: usize,
    visit: &mut impl FnMut(&Digraph),
) {
    if row == n {
        visit(&Digraph::from_row_bits(n, d, rows.clone()));
        return;
    }
    let rows_left = n - row;
    if chosen.len() == d {
        // Every column still at full remaining load must have been taken.
        if capacity.iter().any(|&c| c >= rows_left) {
            return;
        }
        let saved = std::mem::take(chosen);
        fill_row(n, d, row + 1, rows, capacity, chosen, 0, visit);
        *chosen = saved;
        return;
    }
    let need = d - chosen.len();
    for j in from..n {
        if n - j < need {
            break;
        }
        if capacity[j] == 0 {
            continue;
        }
        capacity[j] -= 1;
        chosen.push(j);
        let words = bits::words_for(n);
        bits::set(&mut rows[row * words..(row + 1) * words], j);
        fill_row(n, d, row, rows, capacity, chosen, j + 1, visit);
        bits::clear(&mut rows[row * words..(row + 1) * words], j);
        chosen.pop();
        capacity[j] += 1;
        // Skipping a column that must be filled in this row dooms the branch.
        if capacity[j] == rows_left {
            break;
        }
    }
}

/// Materializes the whole of `M_{n,d}` (subject to `cap`).
pub fn enumerate_all(n: usize, d: usize) -> Result<Vec<Digraph>, SamplerError> {
    let mut out = Vec::new();
    visit_all(n, d, DEFAULT_ENUMERATION_CAP, |g| out.push(g.clone()))?;
    Ok(out)
}

/// `|M_{n,d}|` without materializing.
///
/// Columns are exchangeable, so the state is just how many columns have
/// each remaining capacity; a row picks `k_t` columns from capacity class `t`
/// in `prod C(c_t, k_t)` ways.
pub fn count_all(n: usize, d: usize) -> BigUint {
    if n == 0 || d == 0 || d > n {
        return BigUint::zero();
    }
    let mut state = vec![0usize; d + 1];
    state[d] = n;
    let mut memo = HashMap::new();
    count_rec(n, d, &state, &mut memo)
}

fn count_rec(
    rows_left: usize,
    d: usize,
    state: &[usize],
    memo: &mut HashMap<(usize, Vec<usize>), BigUint>,
) -> BigUint {
    if rows_left == 0 {
        return if state[1..].iter().all(|&c| c == 0) { BigUint::one() } else { BigUint::zero() };
    }
    if let Some(v) = memo.get(&(rows_left, state.to_vec())) {
        return v.clone();
    }
    // Columns with capacity > rows_left can never be filled.
    if (rows_left + 1..=d).any(|t| state[t] > 0) {
        memo.insert((rows_left, state.to_vec()), BigUint::zero());
        return BigUint::zero();
    }
    let mut total = BigUint::zero();
    let mut take = vec![0usize; d + 1];
    choose_classes(rows_left, d, state, 1, d, &mut take, BigUint::one(), &mut total, memo);
    memo.insert((rows_left, state.to_vec()), total.clone());
    total
}

#[allow(clippy::too_many_arguments)]
fn choose_classes(
    rows_left: usize,
    d: usize,
    state: &[usize],
    t: usize,
    remaining: usize,
    take: &mut Vec<usize>,
    weight: BigUint,
    total: &mut BigUint,
    memo: &mut HashMap<(usize, Vec<usize>), BigUint>,
) {
    if t > d {
        if remaining != 0 {
            return;
        }
        let mut next = state.to_vec();
        for s in 1..=d {
            next[s] -= take[s];
            next[s - 1] += take[s];
        }
        *total += weight * count_rec(rows_left - 1, d, &next, memo);
        return;
    }
    // Columns at capacity == rows_left must all be taken now.
    let min_k = if t == rows_left { state[t] } else { 0 };
    let max_k = state[t].min(remaining);
    for k in min_k..=max_k {
        take[t] = k;
        let w = &weight * binomial(state[t], k);
        choose_classes(rows_left, d, state, t + 1, remaining - k, take, w, total, memo);
    }
    take[t] = 0;
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut r = BigUint::one();
    for i in 0..k {
        r = r * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutations_of_three() {
        assert_eq!(enumerate_all(3, 1).unwrap().len(), 6);
        assert_eq!(count_all(3, 1), BigUint::from(6u32));
        assert_eq!(count_all(5, 1), BigUint::from(120u32));
    }

    #[test]
    fn complete_is_unique() {
        for k in 1..=5 {
            assert_eq!(enumerate_all(k, k).unwrap().len(), 1);
            assert_eq!(count_all(k, k), BigUint::one());
        }
    }

    #[test]
    fn enumeration_matches_count() {
        for n in 1..=5 {
            for d in 1..=n {
                let mut seen = std::collections::HashSet::new();
                visit_all(n, d, 6, |g| {
                    assert!(g.check_invariants().is_ok());
                    assert!(seen.insert(g.packed_rows().to_vec()));
                })
                .unwrap();
                assert_eq!(BigUint::from(seen.len()), count_all(n, d), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn cap_refusal_reports_size() {
        match visit_all(7, 3, 6, |_| {}) {
            Err(SamplerError::EnumerationCap { estimated, .. }) => {
                assert_eq!(estimated, count_all(7, 3).to_string())
            }
            other => panic!("{other:?}"),
        }
    }
}
