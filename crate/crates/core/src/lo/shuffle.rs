//! The row-shuffling class of a pair of rows.
//!
//! Fix rows `R_0, R_1` (the pair `(1, 2)` in one-based terms) and every other
//! row. All matrices sharing that minor have the same `R_0 + R_1`, hence the
//! same `S_{1,2} = supp R_0 ∪ supp R_1` and `s_{1,2} = supp R_0 ∩ supp R_1`,
//! and differ only in which `d - m_2` elements of `S = S_{1,2} \ s_{1,2}`
//! go to `R_0`. A vector `v` orthogonal to `F = span{R_2, ..., R_{n-1}, R_0 + R_1}`
//! is fixed for the class, and we count the members with `⟨v, R_0⟩ = 0`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use serde::Serialize;

use super::mitm::count_subsets_with_sum;
use super::LoError;
use crate::bits;
use crate::frac::Frac;
use crate::graph::{Digraph, GraphError, Vertex};
use crate::props::min_pair_union;
use crate::rank::{canonicalize, kernel_basis, IntMatrix};
use crate::rng::LabRng;

/// Random combinations of the kernel basis tried when choosing `v`.
pub const SHUFFLE_COMBINATIONS: usize = 200;
/// Their coefficients lie in `[-5, 5]`.
pub const SHUFFLE_COEFF_RANGE: i64 = 5;
/// Largest `|S|` counted exactly.
pub const SHUFFLE_S_CAP: usize = 40;

/// The equivalence class of row-0 supports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShuffleClass {
    pub d: usize,
    /// `s_{1,2}`, sorted.
    pub common: Vec<Vertex>,
    /// `S = S_{1,2} \ s_{1,2}`, sorted.
    pub free: Vec<Vertex>,
    pub v: Vec<BigInt>,
}

fn binom_u64(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

impl ShuffleClass {
    pub fn from_rows(g: &Digraph, v: Vec<BigInt>) -> Self {
        let (a, b) = (g.row_bits(0), g.row_bits(1));
        let common = (0..g.n()).filter(|&j| bits::get(a, j) && bits::get(b, j)).collect();
        let free = (0..g.n()).filter(|&j| bits::get(a, j) != bits::get(b, j)).collect();
        ShuffleClass { d: g.d(), common, free, v }
    }

    /// `d - m_2`, the number of free elements each member puts in row 0.
    pub fn pick(&self) -> usize {
        self.d - self.common.len()
    }

    /// `C(|S|, d - m_2)`.
    pub fn size(&self) -> u64 {
        binom_u64(self.free.len(), self.pick())
    }

    /// `-Σ_{i ∈ s_{1,2}} v_i`.
    pub fn target(&self) -> BigInt {
        -self.common.iter().map(|&i| &self.v[i]).sum::<BigInt>()
    }

    /// Members with `⟨v, R_0⟩ = 0`, counted by meet-in-the-middle.
    pub fn zero_count(&self) -> u64 {
        let vals: Vec<BigInt> = self.free.iter().map(|&i| self.v[i].clone()).collect();
        let target = self.target();
        let small: Option<Vec<i128>> = vals.iter().chain(std::iter::once(&target)).map(|x| x.to_i128()).collect();
        match small {
            // 40 summands of at most 2^100 cannot overflow.
            Some(mut ints) if ints.iter().all(|x| x.unsigned_abs() < 1 << 100) => {
                let t = ints.pop().expect("target appended");
                count_subsets_with_sum(&ints, self.pick(), &t)
            }
            _ => count_subsets_with_sum(&vals, self.pick(), &target),
        }
    }

    /// Visits every member as (`supp R_0` sorted, whether `⟨v, R_0⟩ = 0`).
    pub fn for_each_member(&self, mut f: impl FnMut(&[Vertex], bool)) {
        let k = self.pick();
        let mut idx: Vec<usize> = (0..k).collect();
        let m = self.free.len();
        loop {
            let mut supp: Vec<Vertex> = self.common.clone();
            supp.extend(idx.iter().map(|&i| self.free[i]));
            supp.sort_unstable();
            let dot: BigInt = supp.iter().map(|&i| &self.v[i]).sum();
            f(&supp, dot.is_zero());
            // Next k-combination of 0..m in lexicographic order.
            let Some(p) = (0..k).rev().find(|&p| idx[p] < m - k + p) else {
                return;
            };
            idx[p] += 1;
            for q in p + 1..k {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }

    /// The member of `g`'s class with `supp R_0 = row0`.
    pub fn member_graph(&self, g: &Digraph, row0: &[Vertex]) -> Result<Digraph, GraphError> {
        let mut rows: Vec<Vec<usize>> = (0..g.n()).map(|i| g.out_neighbors(i).iter().map(|&j| j as usize).collect()).collect();
        rows[0] = row0.to_vec();
        let mut r1 = self.common.clone();
        r1.extend(self.free.iter().filter(|j| !row0.contains(j)));
        r1.sort_unstable();
        rows[1] = r1;
        Digraph::new(g.n(), g.d(), rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShuffleClassReport {
    pub q: usize,
    pub epsilon: Frac,
    /// `|s_{1,2}|`.
    pub m2: usize,
    /// `|S|`.
    pub s_size: usize,
    pub class_size: u64,
    pub zero_count: u64,
    #[serde(serialize_with = "super::ser_rational")]
    pub zero_fraction: BigRational,
    /// `10 / sqrt(q - 2εd)`; infinite when `q <= 2εd`.
    pub bound: f64,
    /// `zero_fraction <= bound`, decided exactly.
    pub bound_holds: bool,
    /// `2εd < q <= 2d/3`.
    pub lemma_regime: bool,
    /// `min_λ |{k ∈ S_{1,2} : v_k != λ}|` for the chosen `v`.
    pub score: usize,
    pub kernel_dim: usize,
    pub combinations_tested: usize,
    #[serde(serialize_with = "super::ser_ints")]
    pub v: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ShuffleOutcome {
    Witnessed(ShuffleClassReport),
    /// No `v` reached score `q`: the graph lies outside the conditioning event.
    NotWitnessed { q: usize, best_score: usize },
}

/// `min_λ |{k ∈ idx : v_k != λ}|`.
fn score(v: &[BigInt], idx: &[Vertex]) -> usize {
    let mut mult: HashMap<&BigInt, usize> = HashMap::new();
    for &i in idx {
        *mult.entry(&v[i]).or_default() += 1;
    }
    idx.len() - mult.values().copied().max().unwrap_or(0)
}

/// Chooses `v ⊥ F` maximizing the score (ties: lexicographically smallest
/// canonical vector) and counts the zero members of the class.
pub fn shuffle_class_experiment(g: &Digraph, q: usize, epsilon: Frac, seed: u64) -> Result<ShuffleOutcome, LoError> {
    let (n, d) = (g.n(), g.d());
    if n < 2 {
        return Err(LoError::InvalidParam("need at least two rows".into()));
    }
    if !epsilon.in_open(Frac::from_integer(0), Frac::from_integer(1)) {
        return Err(LoError::InvalidParam(format!("epsilon = {epsilon} must lie in (0, 1)")));
    }
    let min_union = min_pair_union(g);
    if !epsilon.one_minus().bounds_below(min_union as u64, 2 * d as u64) {
        return Err(LoError::NotInOmega2 { min_union });
    }

    let dense = IntMatrix::from(g);
    let mut rows: Vec<Vec<i64>> = (2..n).map(|i| dense.row(i).to_vec()).collect();
    rows.push(dense.row(0).iter().zip(dense.row(1)).map(|(a, b)| a + b).collect());
    let basis = kernel_basis(&IntMatrix::from_rows(&rows));
    let union: Vec<Vertex> = (0..n).filter(|&j| g.has_edge(0, j) || g.has_edge(1, j)).collect();

    let mut best: Option<(usize, Vec<BigInt>)> = None;
    let mut consider = |mut v: Vec<BigInt>| {
        canonicalize(&mut v);
        let s = score(&v, &union);
        let better = match &best {
            None => true,
            Some((bs, bv)) => s > *bs || (s == *bs && v < *bv),
        };
        if better {
            best = Some((s, v));
        }
    };
    for b in &basis {
        consider(b.clone());
    }
    let mut tested = 0;
    if basis.len() >= 2 {
        let mut rng = LabRng::seed_from_u64(seed);
        for _ in 0..SHUFFLE_COMBINATIONS {
            let coeffs: Vec<i64> =
                (0..basis.len()).map(|_| rng.gen_range(-SHUFFLE_COEFF_RANGE..=SHUFFLE_COEFF_RANGE)).collect();
            if coeffs.iter().all(|&c| c == 0) {
                continue;
            }
            tested += 1;
            let mut v = vec![BigInt::zero(); n];
            for (c, b) in coeffs.iter().zip(&basis) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += bi * *c;
                }
            }
            consider(v);
        }
    }
    let (best_score, v) = best.expect("F has fewer rows than columns, so its kernel is nontrivial");
    if best_score < q {
        return Ok(ShuffleOutcome::NotWitnessed { q, best_score });
    }

    let class = ShuffleClass::from_rows(g, v);
    if class.free.len() > SHUFFLE_S_CAP {
        return Err(LoError::SizeCap { size: class.free.len(), cap: SHUFFLE_S_CAP, hint: "class too large to count exactly" });
    }
    let class_size = class.size();
    let zero_count = class.zero_count();
    let zero_fraction = BigRational::new(zero_count.into(), class_size.into());
    // gap = q - 2εd as an exact rational.
    let gap = BigRational::new(
        BigInt::from(q as i64 * epsilon.denom() - 2 * epsilon.numer() * d as i64),
        BigInt::from(epsilon.denom()),
    );
    let positive = gap > BigRational::zero();
    let bound_holds = positive && &zero_fraction * &zero_fraction * &gap <= BigRational::from_integer(100.into());
    let bound = if positive { 10.0 / gap.to_f64().unwrap_or(f64::NAN).sqrt() } else { f64::INFINITY };
    Ok(ShuffleOutcome::Witnessed(ShuffleClassReport {
        q,
        epsilon,
        m2: class.common.len(),
        s_size: class.free.len(),
        class_size,
        zero_count,
        zero_fraction,
        bound,
        bound_holds,
        lemma_regime: positive && 3 * q <= 2 * d,
        score: best_score,
        kernel_dim: basis.len(),
        combinations_tested: tested,
        v: class.v,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_class_has_two_members() {
        let g = Digraph::circulant(5, &[1]).unwrap();
        let class = ShuffleClass::from_rows(&g, vec![BigInt::from(1); 5]);
        assert_eq!(class.free.len(), 2);
        assert_eq!(class.size(), 2);
        let mut seen = 0;
        class.for_each_member(|supp, _| {
            assert_eq!(supp.len(), 1);
            seen += 1;
        });
        assert_eq!(seen, 2);
    }

    #[test]
    fn identical_rows_give_a_single_member() {
        let rows = vec![vec![0, 1], vec![0, 1], vec![2, 3], vec![2, 3], vec![4, 5], vec![4, 5]];
        let g = Digraph::new(6, 2, rows).unwrap();
        let class = ShuffleClass::from_rows(&g, vec![BigInt::from(1); 6]);
        assert_eq!((class.common.len(), class.size()), (2, 1));
        let z = class.zero_count();
        assert!(z <= 1);
    }

    #[test]
    fn class_members_are_valid_and_partition() {
        let g = Digraph::circulant(9, &[0, 1, 3]).unwrap();
        let eps = Frac::new(1, 2);
        let out = shuffle_class_experiment(&g, 1, eps, 7).unwrap();
        let ShuffleOutcome::Witnessed(rep) = out else { panic!("expected a witness") };
        let class = ShuffleClass::from_rows(&g, rep.v.clone());
        let (mut zeros, mut total) = (0u64, 0u64);
        class.for_each_member(|supp, zero| {
            let h = class.member_graph(&g, supp).unwrap();
            assert!(h.check_invariants().is_ok());
            total += 1;
            zeros += zero as u64;
        });
        assert_eq!(total, rep.class_size);
        assert_eq!(zeros, rep.zero_count);
        assert!(rep.zero_fraction <= BigRational::from_integer(1.into()));
    }

    #[test]
    fn outside_omega2_is_refused() {
        let rows = vec![vec![0, 1], vec![0, 1], vec![2, 3], vec![2, 3]];
        let g = Digraph::new(4, 2, rows).unwrap();
        assert!(matches!(shuffle_class_experiment(&g, 1, Frac::new(1, 10), 0), Err(LoError::NotInOmega2 { .. })));
    }
}
