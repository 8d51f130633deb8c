//! Anti-concentration of `δ^J` estimated from independent samples.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::PropsError;
use crate::graph::Vertex;
use crate::sampler::{ChainConfig, FrozenColumnSet, SampleSource};

/// Advisory checks of the regime `|I| <= d|J|/32`, `8 <= |J| <= 8n/d`
/// (constants taken as 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegimeFlags {
    pub frozen_small: bool,
    pub j_in_range: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnticoncEstimate {
    pub n: usize,
    pub d: usize,
    pub j_set: Vec<Vertex>,
    pub samples: u64,
    /// Frequency of the most common `δ^J`.
    pub max_atom_hat: f64,
    /// Equal unordered pairs over `C(N, 2)`: unbiased for `Σ_v P(δ^J = v)^2`.
    pub collision_hat: f64,
    /// Plug-in standard deviation of `collision_hat`.
    pub sigma: f64,
    pub distinct_values: usize,
    pub collision_pairs: u64,
    /// `max_m C(n, m)^{-1}` over the feasible support sizes
    /// `max(d, |J|) <= m <= min(n, d|J|)`.
    pub support_bound: f64,
    /// `2 exp(-d|J| ln(n / (d|J|)))`, shape only.
    pub shape_bound: f64,
    pub regime: RegimeFlags,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frozen: Option<FrozenColumnSet>,
}

/// `C(n, k)` as a float.
pub fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Variance of the collision U-statistic with `Σp²` and `Σp³` plugged in.
pub fn collision_sigma(s2: f64, s3: f64, samples: u64) -> f64 {
    let n = samples as f64;
    if samples < 2 {
        return f64::INFINITY;
    }
    let pairs = n * (n - 1.0);
    let var = 4.0 * (n - 2.0) / pairs * (s3 - s2 * s2) + 2.0 / pairs * (s2 - s2 * s2);
    var.max(0.0).sqrt()
}

/// Summary statistics of a histogram of `samples` draws.
struct Histogram {
    max_count: u64,
    distinct: usize,
    pairs: u64,
    collision_hat: f64,
    sigma: f64,
}

fn summarize<K>(counts: &HashMap<K, u64>, samples: u64) -> Histogram {
    let n = samples as f64;
    let pairs: u64 = counts.values().map(|&c| c * c.saturating_sub(1) / 2).sum();
    let total_pairs = n * (n - 1.0) / 2.0;
    let collision_hat = if samples < 2 { f64::NAN } else { pairs as f64 / total_pairs };
    // Sum in a fixed order so the result does not depend on hash iteration.
    let mut sorted: Vec<u64> = counts.values().copied().collect();
    sorted.sort_unstable();
    let (s2, s3) = sorted.iter().fold((0.0, 0.0), |(a, b), &c| {
        let p = c as f64 / n;
        (a + p * p, b + p * p * p)
    });
    Histogram {
        max_count: counts.values().copied().max().unwrap_or(0),
        distinct: counts.len(),
        pairs,
        collision_hat,
        sigma: collision_sigma(s2, s3, samples),
    }
}

/// Draws `samples` graphs (from `D(I, F)` when `frozen` is given) and
/// tabulates `δ^J`. Chunk `c` of the run uses seed `mix(master_seed, c)`,
/// so the result does not depend on the rayon pool size.
pub fn delta_anticoncentration(
    n: usize,
    d: usize,
    j_set: &[Vertex],
    samples: u64,
    frozen: Option<FrozenColumnSet>,
    cfg: &ChainConfig,
    master_seed: u64,
) -> Result<AnticoncEstimate, PropsError> {
    let mut j: Vec<Vertex> = j_set.to_vec();
    j.sort_unstable();
    j.dedup();
    if j.is_empty() || j.iter().any(|&v| v >= n) {
        return Err(PropsError::InvalidParam("J must be a nonempty subset of [n]".into()));
    }
    if samples == 0 {
        return Err(PropsError::InvalidParam("need at least one sample".into()));
    }
    let source = match &frozen {
        Some(f) => {
            if f.i_set.iter().any(|i| j.contains(i)) {
                return Err(PropsError::InvalidParam("J must be disjoint from the frozen columns".into()));
            }
            SampleSource::conditional(n, d, f.clone(), cfg)?
        }
        None => SampleSource::new(n, d, cfg)?,
    };
    let counts = (0..source.num_chunks(samples))
        .into_par_iter()
        .map(|c| {
            let mut local: HashMap<Vec<u64>, u64> = HashMap::new();
            source
                .run_chunk(master_seed, c, samples, |_, g| {
                    *local.entry(g.n_in_bits(&j)).or_default() += 1;
                })
                .map(|_| local)
        })
        .try_reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            Ok(a)
        })?;
    let h = summarize(&counts, samples);

    let jl = j.len();
    let m_lo = d.max(jl);
    let m_hi = n.min(d * jl);
    let support_bound = (m_lo..=m_hi).map(|m| 1.0 / binomial_f64(n, m)).fold(0.0, f64::max);
    let dj = (d * jl) as f64;
    let frozen_len = frozen.as_ref().map_or(0, |f| f.i_set.len());
    Ok(AnticoncEstimate {
        n,
        d,
        j_set: j,
        samples,
        max_atom_hat: h.max_count as f64 / samples as f64,
        collision_hat: h.collision_hat,
        sigma: h.sigma,
        distinct_values: h.distinct,
        collision_pairs: h.pairs,
        support_bound,
        shape_bound: 2.0 * (-dj * (n as f64 / dj).ln()).exp(),
        regime: RegimeFlags {
            frozen_small: 32 * frozen_len <= d * jl,
            j_in_range: jl >= 8 && jl * d <= 8 * n,
        },
        frozen,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::Method;

    #[test]
    fn full_j_is_a_single_atom() {
        let cfg = ChainConfig { method: Method::Configuration, ..Default::default() };
        let all: Vec<usize> = (0..6).collect();
        let e = delta_anticoncentration(6, 2, &all, 50, None, &cfg, 3).unwrap();
        assert_eq!(e.max_atom_hat, 1.0);
        assert_eq!(e.collision_hat, 1.0);
        assert_eq!(e.distinct_values, 1);
    }

    #[test]
    fn frozen_overlap_is_rejected() {
        let g = crate::Digraph::consecutive_circulant(6, 2).unwrap();
        let f = FrozenColumnSet::from_graph(&g, &[0]);
        let err = delta_anticoncentration(6, 2, &[0, 1], 10, Some(f), &ChainConfig::default(), 0);
        assert!(matches!(err, Err(PropsError::InvalidParam(_))));
    }

    #[test]
    fn sigma_of_point_mass_is_zero() {
        assert_eq!(collision_sigma(1.0, 1.0, 100), 0.0);
        assert_eq!(binomial_f64(40, 4), 91_390.0);
    }
}
