//! Sampling from `D(I, F)`: graphs whose columns in `I` have prescribed supports.

use serde::{Deserialize, Serialize};

use super::{check_params, ChainConfig, SamplerError, SwitchChain};
use crate::graph::Digraph;
use crate::rng::LabRng;

/// Frozen columns `I` with their fixed supports `F`.
///
/// `f_supports[k]` is the set of rows with a one in column `i_set[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrozenColumnSet {
    pub i_set: Vec<usize>,
    pub f_supports: Vec<Vec<usize>>,
}

impl FrozenColumnSet {
    pub fn empty() -> Self {
        FrozenColumnSet { i_set: vec![], f_supports: vec![] }
    }

    pub fn new(i_set: Vec<usize>, f_supports: Vec<Vec<usize>>) -> Self {
        FrozenColumnSet { i_set, f_supports }
    }

    /// Freezes the given columns of an existing graph.
    pub fn from_graph(g: &Digraph, columns: &[usize]) -> Self {
        FrozenColumnSet {
            i_set: columns.to_vec(),
            f_supports: columns
                .iter()
                .map(|&j| g.in_neighbors(j).iter().map(|&i| i as usize).collect())
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.i_set.is_empty()
    }

    /// Structural checks: sizes, ranges, and at most `d` frozen ones per row.
    pub fn validate(&self, n: usize, d: usize) -> Result<(), SamplerError> {
        let bad = |m: String| Err(SamplerError::MalformedFrozen(m));
        if self.i_set.len() != self.f_supports.len() {
            return bad(format!("{} columns but {} supports", self.i_set.len(), self.f_supports.len()));
        }
        let mut seen_col = vec![false; n];
        let mut row_load = vec![0usize; n];
        for (&j, supp) in self.i_set.iter().zip(&self.f_supports) {
            if j >= n {
                return bad(format!("column {j} out of range"));
            }
            if std::mem::replace(&mut seen_col[j], true) {
                return bad(format!("column {j} frozen twice"));
            }
            if supp.len() != d {
                return bad(format!("column {j} support has {} rows, expected {d}", supp.len()));
            }
            let mut s = supp.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != d {
                return bad(format!("column {j} support repeats a row"));
            }
            for &i in &s {
                if i >= n {
                    return bad(format!("row {i} out of range"));
                }
                row_load[i] += 1;
            }
        }
        if let Some((i, &load)) = row_load.iter().enumerate().find(|(_, &l)| l > d) {
            return Err(SamplerError::Infeasible(format!("row {i} has {load} frozen ones, more than d = {d}")));
        }
        Ok(())
    }
}

/// Gale–Ryser check plus a greedy completion of the free columns.
///
/// Residual row sums `r_i = d - (frozen ones in row i)` must be realizable
/// by a 0/1 matrix on the free columns, each with column sum `d`.
pub fn feasible_completion(n: usize, d: usize, frozen: &FrozenColumnSet) -> Result<Digraph, SamplerError> {
    check_params(n, d)?;
    frozen.validate(n, d)?;
    let mut is_frozen = vec![false; n];
    let mut rows: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
    for (&j, supp) in frozen.i_set.iter().zip(&frozen.f_supports) {
        is_frozen[j] = true;
        for &i in supp {
            rows[i].push(j);
        }
    }
    let free_cols: Vec<usize> = (0..n).filter(|&j| !is_frozen[j]).collect();
    let c = free_cols.len();
    let residual: Vec<usize> = rows.iter().map(|r| d - r.len()).collect();

    if let Some((i, &r)) = residual.iter().enumerate().find(|(_, &r)| r > c) {
        return Err(SamplerError::Infeasible(format!(
            "row {i} needs {r} ones but only {c} free columns exist"
        )));
    }
    let mut sorted = residual.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut prefix = 0usize;
    for (k, &r) in sorted.iter().enumerate() {
        prefix += r;
        let cap = c * d.min(k + 1);
        if prefix > cap {
            return Err(SamplerError::Infeasible(format!(
                "Gale-Ryser fails at k = {}: {prefix} > {cap}",
                k + 1
            )));
        }
    }

    // Ryser's greedy fill: each row takes the free columns with the largest
    // remaining capacity.
    let mut cap: Vec<usize> = vec![d; c];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| residual[b].cmp(&residual[a]).then(a.cmp(&b)));
    for &i in &order {
        let mut idx: Vec<usize> = (0..c).collect();
        idx.sort_by(|&a, &b| cap[b].cmp(&cap[a]).then(a.cmp(&b)));
        for &k in idx.iter().take(residual[i]) {
            if cap[k] == 0 {
                return Err(SamplerError::Infeasible("greedy completion ran out of capacity".into()));
            }
            cap[k] -= 1;
            rows[i].push(free_cols[k]);
        }
    }
    Digraph::new(n, d, rows).map_err(|e| SamplerError::Infeasible(e.to_string()))
}

/// Sample from `D(I, F)` by the switch chain restricted to free columns.
pub fn sample_conditional(
    n: usize,
    d: usize,
    frozen: &FrozenColumnSet,
    cfg: &ChainConfig,
    rng: &mut LabRng,
) -> Result<Digraph, SamplerError> {
    let start = feasible_completion(n, d, frozen)?;
    let mut chain = SwitchChain::with_frozen_columns(&start, &frozen.i_set);
    chain.run(cfg.burn_in(n, d)?, rng);
    let g = chain.to_digraph();
    debug_assert!(frozen
        .i_set
        .iter()
        .zip(&frozen.f_supports)
        .all(|(&j, s)| {
            let mut s = s.clone();
            s.sort_unstable();
            g.in_neighbors(j).iter().map(|&i| i as usize).eq(s)
        }));
    Ok(g)
}
