//! Vertex expansion of in-neighborhoods and the isoperimetric number.

use rand::Rng;
use serde::Serialize;

use super::subsets::{sweep_unions, SubsetBudget, SweepMode};
use crate::bits;
use crate::frac::Frac;
use crate::graph::{Digraph, Vertex};

/// Smallest `|∂U| / |U|` seen, with `∂U = N^in(U) \ U`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Isoperimetry {
    /// Largest `|U|` swept, as a fraction of `n`.
    pub lambda: Frac,
    pub value: Frac,
    pub set: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpansionReport {
    pub epsilon: Frac,
    pub k_max: usize,
    /// Minimum of `|N^in(S)| / (d |S|)` over the tested `S`.
    pub worst_ratio: Frac,
    pub worst_set: Vec<Vertex>,
    /// Minimum per size `1..=k_max`.
    pub worst_ratio_by_size: Vec<Frac>,
    pub subsets_tested: u64,
    pub mode: SweepMode,
    /// Some tested `S` has `|N^in(S)| <= (1 - ε) d |S|`.
    pub in_gamma: bool,
    pub isoperimetry: Isoperimetry,
}

/// Sweeps sets `S` with `|S| <= k_max` and reports the weakest expansion.
pub fn expansion_check<R: Rng + ?Sized>(
    g: &Digraph,
    epsilon: Frac,
    k_max: usize,
    budget: SubsetBudget,
    rng: &mut R,
) -> ExpansionReport {
    let (n, d) = (g.n(), g.d());
    let k_max = k_max.clamp(1, n);
    let cols: Vec<&[u64]> = (0..n).map(|j| g.col_bits(j)).collect();

    // Ratios are compared as (num, den) pairs by cross-multiplication.
    let mut worst = (u64::MAX, 1u64);
    let mut worst_set = Vec::new();
    let mut by_size = vec![(u64::MAX, 1u64); k_max + 1];
    let mut iso = (u64::MAX, 1u64);
    let mut iso_set = Vec::new();
    let less = |a: (u64, u64), b: (u64, u64)| (a.0 as u128) * (b.1 as u128) < (b.0 as u128) * (a.1 as u128);

    let (mode, tested) = sweep_unions(&cols, g.words_per_row(), k_max, budget, rng, |s, union| {
        let size = bits::count(union) as u64;
        let r = (size, (d * s.len()) as u64);
        if less(r, worst) {
            worst = r;
            worst_set = s.to_vec();
        }
        if less(r, by_size[s.len()]) {
            by_size[s.len()] = r;
        }
        let inside = s.iter().filter(|&&v| bits::get(union, v)).count() as u64;
        let b = (size - inside, s.len() as u64);
        if less(b, iso) {
            iso = b;
            iso_set = s.to_vec();
        }
    });

    let frac = |(a, b): (u64, u64)| Frac::new(a as i64, b as i64);
    let in_gamma = epsilon.one_minus().bounds_above(worst.0, worst.1);
    ExpansionReport {
        epsilon,
        k_max,
        worst_ratio: frac(worst),
        worst_set,
        worst_ratio_by_size: by_size[1..].iter().map(|&r| frac(r)).collect(),
        subsets_tested: tested,
        mode,
        in_gamma,
        isoperimetry: Isoperimetry { lambda: Frac::new(k_max as i64, n as i64), value: frac(iso), set: iso_set },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::task_rng;

    #[test]
    fn singletons_are_tight() {
        let g = Digraph::circulant(9, &[0, 2, 5]).unwrap();
        let r = expansion_check(&g, Frac::new(1, 2), 1, SubsetBudget::default(), &mut task_rng(0, 0));
        assert_eq!(r.worst_ratio, Frac::from_integer(1));
        assert_eq!(r.subsets_tested, 9);
        assert!(!r.in_gamma);
    }

    #[test]
    fn complete_graph_ratio_is_one_over_k() {
        let g = Digraph::complete(6);
        let r = expansion_check(&g, Frac::new(1, 2), 3, SubsetBudget::default(), &mut task_rng(0, 0));
        assert_eq!(r.worst_ratio, Frac::new(1, 3));
        assert_eq!(r.worst_ratio_by_size, vec![Frac::from_integer(1), Frac::new(1, 2), Frac::new(1, 3)]);
        assert!(r.in_gamma);
        // ∂U = [n] \ U, so |∂U| / |U| = (6 - 3) / 3 at the largest size.
        assert_eq!(r.isoperimetry.value, Frac::from_integer(1));
    }

    #[test]
    fn consecutive_circulant_is_a_poor_expander() {
        // N^in({0,1}) = {0, n-1, n-2}: ratio 3/4.
        let g = Digraph::consecutive_circulant(10, 2).unwrap();
        let r = expansion_check(&g, Frac::new(1, 4), 2, SubsetBudget::default(), &mut task_rng(0, 0));
        assert_eq!(r.worst_ratio, Frac::new(3, 4));
        assert!(r.in_gamma);
        let r = expansion_check(&g, Frac::new(1, 3), 2, SubsetBudget::default(), &mut task_rng(0, 0));
        assert!(!r.in_gamma);
    }
}
