//! Matrix-side events: column-union growth `Ω_ε`, row-pair spread `Ω²_ε`,
//! and row support density on large column sets.

use rand::Rng;
use serde::Serialize;

use super::expansion::expansion_check;
use super::subsets::{SubsetBudget, SweepMode};
use super::PropsError;
use crate::bits;
use crate::frac::Frac;
use crate::graph::{Digraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmegaReport {
    pub epsilon: Frac,
    pub k_max: usize,
    /// `|S_J| >= (1 - ε) d |J|` for every tested `J` with `|J| <= k_max`.
    pub in_omega_eps: bool,
    /// `|supp R_i ∪ supp R_j| >= 2 (1 - ε) d` for every pair `i != j` (exact).
    pub in_omega2: bool,
    /// Minimum of `|S_J| / (d |J|)`.
    pub min_sj_ratio: Frac,
    pub min_pair_union: usize,
    pub mode: SweepMode,
    pub subsets_tested: u64,
}

/// Smallest `|supp R_i ∪ supp R_j|` over distinct rows (`2d` when `n = 1`).
pub fn min_pair_union(g: &Digraph) -> usize {
    let mut best = 2 * g.d();
    for i in 0..g.n() {
        for j in i + 1..g.n() {
            best = best.min(bits::or_count(g.row_bits(i), g.row_bits(j)));
        }
    }
    best
}

/// `Ω²_ε` membership alone.
pub fn in_omega2(g: &Digraph, epsilon: Frac) -> bool {
    epsilon.one_minus().bounds_below(min_pair_union(g) as u64, 2 * g.d() as u64)
}

/// Evaluates `Ω_ε` (through the subset sweep over columns) and `Ω²_ε`.
pub fn omega_events<R: Rng + ?Sized>(
    g: &Digraph,
    epsilon: Frac,
    k_max: usize,
    budget: SubsetBudget,
    rng: &mut R,
) -> Result<OmegaReport, PropsError> {
    if !epsilon.in_open(Frac::from_integer(0), Frac::from_integer(1)) {
        return Err(PropsError::InvalidParam(format!("epsilon = {epsilon} must lie in (0, 1)")));
    }
    // S_J = ∪_{j ∈ J} supp X_j = N^in(J): the same sweep as the expansion check.
    let ex = expansion_check(g, epsilon, k_max, budget, rng);
    let in_omega_eps = epsilon.one_minus().0 <= ex.worst_ratio.0;
    let pair = min_pair_union(g);
    Ok(OmegaReport {
        epsilon,
        k_max: ex.k_max,
        in_omega_eps,
        in_omega2: in_omega2(g, epsilon),
        min_sj_ratio: ex.worst_ratio,
        min_pair_union: pair,
        mode: ex.mode,
        subsets_tested: ex.subsets_tested,
    })
}

/// Number of rows `i` with `|supp R_i ∩ J| >= β / (2α)`.
pub fn row_support_density(g: &Digraph, j_set: &[Vertex], alpha: Frac, beta: Frac) -> Result<usize, PropsError> {
    let n = g.n();
    let unit = Frac::from_integer(0)..Frac::from_integer(1);
    if !alpha.in_open(unit.start, unit.end) || !beta.in_open(unit.start, unit.end) {
        return Err(PropsError::InvalidParam(format!("alpha = {alpha}, beta = {beta} must lie in (0, 1)")));
    }
    if j_set.iter().any(|&j| j >= n) {
        return Err(PropsError::InvalidParam("column index out of range".into()));
    }
    let jb = bits::from_indices(n, j_set.iter().copied());
    if !beta.bounds_below(bits::count(&jb) as u64, n as u64) {
        return Err(PropsError::InvalidParam(format!("|J| = {} is below beta * n", bits::count(&jb))));
    }
    // c >= β/(2α)  <=>  c * 2 * α.num * β.den >= β.num * α.den.
    let lhs = 2 * alpha.numer() as i128 * beta.denom() as i128;
    let rhs = beta.numer() as i128 * alpha.denom() as i128;
    Ok((0..n).filter(|&i| bits::and_count(g.row_bits(i), &jb) as i128 * lhs >= rhs).count())
}
