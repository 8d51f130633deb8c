//! Anti-concentration, Littlewood–Offord, shuffle-class and enumeration runs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::suite::per_sample;
use super::{csv_of, ExperimentConfig, HarnessError, Output};
use crate::frac::Frac;
use crate::lo::{
    canonical_vector, erdos_lo_max_atom, max_atom, permutation_bound, permutation_pair_estimate, permutation_pair_exact,
    shuffle_class_experiment, within_ten_over_sqrt, LoError, ShuffleOutcome,
};
use crate::props::delta_anticoncentration;
use crate::rank::certify_graph;
use crate::rng::{mix, task_rng};
use crate::sampler::{count_all, visit_all, FrozenColumnSet, SampleSource, DEFAULT_ENUMERATION_CAP};
use crate::stats::Proportion;

fn rational_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

// ---------------------------------------------------------------- anticonc

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnticoncParams {
    /// `J = {0, ..., s-1}` for each size `s` (sizes above `n` are dropped).
    pub j_sizes: Vec<usize>,
    /// Condition on the last `frozen_columns` columns of a sampled graph.
    pub frozen_columns: usize,
}

impl Default for AnticoncParams {
    fn default() -> Self {
        AnticoncParams { j_sizes: vec![1, 2, 4, 8], frozen_columns: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnticoncRow {
    pub n: usize,
    pub d: usize,
    pub j_size: usize,
    pub frozen: usize,
    pub samples: u64,
    pub max_atom_hat: f64,
    pub collision_hat: f64,
    pub sigma: f64,
    pub collision_pairs: u64,
    pub distinct_values: usize,
    pub support_bound: f64,
    pub shape_bound: f64,
    pub regime_frozen_small: bool,
    pub regime_j_in_range: bool,
}

pub(crate) fn run_anticonc(cfg: &ExperimentConfig) -> Result<Output, HarnessError> {
    let params: AnticoncParams = cfg.params()?;
    if params.j_sizes.is_empty() || params.j_sizes.contains(&0) {
        return Err(HarnessError::Config("j_sizes must be nonempty and positive".into()));
    }
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (i, &(n, d)) in cfg.grid.iter().enumerate() {
        let seed = mix(cfg.master_seed, i as u64);
        let frozen = if params.frozen_columns == 0 {
            None
        } else {
            let f = params.frozen_columns.min(n);
            let base = SampleSource::new(n, d, &cfg.sampler)
                .and_then(|s| s.sample(mix(seed, u64::MAX), 0))
                .map_err(|e| HarnessError::Infeasible(e.to_string()))?;
            let cols: Vec<usize> = (n - f..n).collect();
            Some(FrozenColumnSet::from_graph(&base, &cols))
        };
        let free = n - frozen.as_ref().map_or(0, |f| f.i_set.len());
        for &s in params.j_sizes.iter().filter(|&&s| s <= free) {
            let j: Vec<usize> = (0..s).collect();
            match delta_anticoncentration(n, d, &j, cfg.n_samples, frozen.clone(), &cfg.sampler, mix(seed, s as u64)) {
                Ok(e) => rows.push(AnticoncRow {
                    n,
                    d,
                    j_size: s,
                    frozen: frozen.as_ref().map_or(0, |f| f.i_set.len()),
                    samples: e.samples,
                    max_atom_hat: e.max_atom_hat,
                    collision_hat: e.collision_hat,
                    sigma: e.sigma,
                    collision_pairs: e.collision_pairs,
                    distinct_values: e.distinct_values,
                    support_bound: e.support_bound,
                    shape_bound: e.shape_bound,
                    regime_frozen_small: e.regime.frozen_small,
                    regime_j_in_range: e.regime.j_in_range,
                }),
                Err(e) => skipped.push(serde_json::json!({"n": n, "d": d, "j_size": s, "reason": e.to_string()})),
            }
        }
    }
    if rows.is_empty() {
        return Err(HarnessError::Infeasible(format!("no estimate could be produced: {skipped:?}")));
    }
    Ok(Output { csv: csv_of(&rows)?, result: serde_json::json!({"params": params, "rows": rows, "skipped": skipped}) })
}

// ---------------------------------------------------------------- lo-suite

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoSuiteParams {
    /// Skip the Monte Carlo permutation estimate.
    pub skip_permutation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoRow {
    /// `subset-atom`, `erdos` or `permutation`.
    pub kind: String,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub samples: u64,
    /// Exact value as a fraction, or the Monte Carlo frequency.
    pub value: String,
    pub value_f64: f64,
    /// Exact probability next to a Monte Carlo value; empty otherwise.
    pub exact: String,
    pub sigma: f64,
    pub bound: f64,
    pub holds: bool,
    pub note: String,
}

impl LoRow {
    fn skipped(kind: &str, n: usize, d: usize, k: usize, e: LoError) -> LoRow {
        LoRow {
            kind: kind.into(),
            n,
            d,
            k,
            samples: 0,
            value: String::new(),
            value_f64: f64::NAN,
            exact: String::new(),
            sigma: 0.0,
            bound: f64::NAN,
            holds: false,
            note: e.to_string(),
        }
    }
}

/// For each `(n, d)`: the subset-sum atoms of the canonical 0/1 vectors of
/// length `2d` for every `k <= d`, the two-valued sum with `x` all ones of
/// length `n`, and the permutation event at `k = d`.
pub(crate) fn run_lo_suite(cfg: &ExperimentConfig) -> Result<Output, HarnessError> {
    let params: LoSuiteParams = cfg.params()?;
    let mut rows = Vec::new();
    for (i, &(n, d)) in cfg.grid.iter().enumerate() {
        for k in 1..=d {
            let v: Vec<BigRational> =
                canonical_vector(k, d).into_iter().map(|b| BigRational::from_integer(BigInt::from(b))).collect();
            let bound = 10.0 / (k as f64).sqrt();
            rows.push(match max_atom(&v) {
                Ok((p, _)) => LoRow {
                    kind: "subset-atom".into(),
                    n,
                    d,
                    k,
                    samples: 0,
                    value: p.to_string(),
                    value_f64: rational_f64(&p),
                    exact: String::new(),
                    sigma: 0.0,
                    bound,
                    holds: within_ten_over_sqrt(&p, k),
                    note: String::new(),
                },
                Err(e) => LoRow::skipped("subset-atom", n, d, k, e),
            });
        }
        let ones = vec![BigRational::from_integer(1.into()); n];
        rows.push(match erdos_lo_max_atom(&ones, None) {
            Ok(p) => LoRow {
                kind: "erdos".into(),
                n,
                d,
                k: n,
                samples: 0,
                value: p.to_string(),
                value_f64: rational_f64(&p),
                exact: String::new(),
                sigma: 0.0,
                bound: 1.0 / (n as f64).sqrt(),
                // p <= n^{-1/2} exactly as p^2 n <= 1.
                holds: &p * &p * BigRational::from_integer(n.into()) <= BigRational::from_integer(1.into()),
                note: String::new(),
            },
            Err(e) => LoRow::skipped("erdos", n, d, n, e),
        });
        if !params.skip_permutation {
            let mut rng = task_rng(mix(cfg.master_seed, i as u64), 0);
            let row = match permutation_pair_estimate(d, d, cfg.n_samples, &mut rng) {
                Ok(e) => {
                    let sigma = e.frequency.std_err();
                    let exact = permutation_pair_exact(d, d).map(|p| p.to_string()).unwrap_or_default();
                    LoRow {
                        kind: "permutation".into(),
                        n,
                        d,
                        k: d,
                        samples: e.samples,
                        value: e.frequency.p_hat.to_string(),
                        value_f64: e.frequency.p_hat,
                        exact,
                        sigma,
                        bound: permutation_bound(d, d),
                        holds: e.frequency.p_hat <= permutation_bound(d, d) + 5.0 * sigma,
                        note: String::new(),
                    }
                }
                Err(e) => LoRow::skipped("permutation", n, d, d, e),
            };
            rows.push(row);
        }
    }
    Ok(Output { csv: csv_of(&rows)?, result: serde_json::json!({"params": params, "rows": rows}) })
}

// ---------------------------------------------------------------- shuffle-suite

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShuffleSuiteParams {
    /// Fixed `q`; by default `q` runs from `floor(2d/3)` down to 1 until a witness appears.
    pub q: Option<usize>,
    /// Fixed `ε`; by default `q / (4d)`, so that `2εd = q/2 < q`.
    pub epsilon: Option<Frac>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShuffleRow {
    pub n: usize,
    pub d: usize,
    pub sample: u64,
    /// `witnessed`, `not-witnessed`, `outside-omega2` or `refused`.
    pub status: String,
    pub q: usize,
    pub epsilon: Frac,
    pub m2: usize,
    pub s_size: usize,
    pub class_size: u64,
    pub zero_count: u64,
    pub zero_fraction: String,
    pub bound: f64,
    pub bound_holds: bool,
    pub lemma_regime: bool,
    pub score: usize,
    pub kernel_dim: usize,
}

fn shuffle_row(g: &crate::graph::Digraph, k: u64, seed: u64, p: &ShuffleSuiteParams) -> ShuffleRow {
    let (n, d) = (g.n(), g.d());
    let qs: Vec<usize> = match p.q {
        Some(q) => vec![q],
        None => (1..=(2 * d / 3).max(1)).rev().collect(),
    };
    let mut row = ShuffleRow {
        n,
        d,
        sample: k,
        status: String::new(),
        q: 0,
        epsilon: Frac::from_integer(0),
        m2: 0,
        s_size: 0,
        class_size: 0,
        zero_count: 0,
        zero_fraction: String::new(),
        bound: f64::NAN,
        bound_holds: false,
        lemma_regime: false,
        score: 0,
        kernel_dim: 0,
    };
    for q in qs {
        let eps = p.epsilon.unwrap_or_else(|| Frac::new(q as i64, 4 * d as i64));
        row.q = q;
        row.epsilon = eps;
        match shuffle_class_experiment(g, q, eps, mix(seed, k)) {
            Ok(ShuffleOutcome::Witnessed(r)) => {
                row.status = "witnessed".into();
                row.m2 = r.m2;
                row.s_size = r.s_size;
                row.class_size = r.class_size;
                row.zero_count = r.zero_count;
                row.zero_fraction = r.zero_fraction.to_string();
                row.bound = r.bound;
                row.bound_holds = r.bound_holds;
                row.lemma_regime = r.lemma_regime;
                row.score = r.score;
                row.kernel_dim = r.kernel_dim;
                return row;
            }
            Ok(ShuffleOutcome::NotWitnessed { best_score, .. }) => {
                row.status = "not-witnessed".into();
                row.score = best_score;
            }
            Err(LoError::NotInOmega2 { .. }) => row.status = "outside-omega2".into(),
            Err(_) => row.status = "refused".into(),
        }
    }
    row
}

pub(crate) fn run_shuffle_suite(cfg: &ExperimentConfig) -> Result<Output, HarnessError> {
    let params: ShuffleSuiteParams = cfg.params()?;
    if let Some(e) = params.epsilon {
        if !e.in_open(Frac::from_integer(0), Frac::from_integer(1)) {
            return Err(HarnessError::Config(format!("epsilon = {e} must lie in (0, 1)")));
        }
    }
    if params.q == Some(0) {
        return Err(HarnessError::Config("q must be positive".into()));
    }
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for (i, &(n, d)) in cfg.grid.iter().enumerate() {
        let seed = mix(cfg.master_seed, i as u64);
        let source = SampleSource::new(n, d, &cfg.sampler).map_err(|e| HarnessError::Infeasible(e.to_string()))?;
        let point = per_sample(&source, cfg.n_samples, seed, |k, g| Ok(shuffle_row(g, k, seed, &params)))?;
        let witnessed: Vec<&ShuffleRow> = point.iter().filter(|r| r.status == "witnessed").collect();
        let rate = Proportion::new(witnessed.len() as u64, point.len() as u64);
        summaries.push(serde_json::json!({
            "n": n,
            "d": d,
            "samples": point.len(),
            "witness_rate": rate,
            "all_bounds_hold": witnessed.iter().all(|r| r.bound_holds),
        }));
        rows.extend(point);
    }
    Ok(Output { csv: csv_of(&rows)?, result: serde_json::json!({"params": params, "summaries": summaries, "rows": rows}) })
}

// ---------------------------------------------------------------- enumerate

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumerateRow {
    pub n: usize,
    pub d: usize,
    /// `|M_{n,d}|` in decimal.
    pub count: String,
    pub enumerated: bool,
    pub singular_count: u64,
    /// Exact singular fraction; empty when not enumerated.
    pub singular_fraction: String,
    pub singular_fraction_f64: f64,
}

pub(crate) fn run_enumerate(cfg: &ExperimentConfig) -> Result<Output, HarnessError> {
    let mut rows = Vec::new();
    for &(n, d) in &cfg.grid {
        let count = count_all(n, d);
        let mut singular = 0u64;
        let mut total = 0u64;
        let enumerated = visit_all(n, d, DEFAULT_ENUMERATION_CAP, |g| {
            total += 1;
            singular += certify_graph(g).singular as u64;
        })
        .is_ok();
        let frac = enumerated.then(|| BigRational::new(BigInt::from(singular), BigInt::from(total)));
        rows.push(EnumerateRow {
            n,
            d,
            count: count.to_string(),
            enumerated,
            singular_count: singular,
            singular_fraction: frac.as_ref().map(|f| f.to_string()).unwrap_or_default(),
            singular_fraction_f64: frac.as_ref().filter(|f| !f.denom().is_zero()).map_or(f64::NAN, rational_f64),
        });
    }
    Ok(Output { csv: csv_of(&rows)?, result: serde_json::json!({"rows": rows}) })
}

#[cfg(test)]
mod tests {
    use crate::harness::{run_experiment, Experiment, ExperimentConfig};

    #[test]
    fn enumerate_reports_counts() {
        let cfg = ExperimentConfig::new(Experiment::Enumerate, vec![(4, 2), (3, 3), (9, 1)], 1, 0);
        let run = run_experiment(&cfg, 2).unwrap();
        let lines: Vec<&str> = run.csv.lines().collect();
        assert!(lines[1].starts_with("4,2,90,true,"), "{}", lines[1]);
        assert!(lines[2].starts_with("3,3,1,true,1,1,1.0"), "{}", lines[2]);
        assert!(lines[3].starts_with("9,1,362880,false,0,,"), "{}", lines[3]);
    }

    #[test]
    fn lo_suite_rows_hold() {
        let mut cfg = ExperimentConfig::new(Experiment::LoSuite, vec![(10, 4)], 2000, 5);
        cfg.params = serde_json::json!({});
        let run = run_experiment(&cfg, 1).unwrap();
        let rows = run.envelope.result["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 4 + 1 + 1);
        assert!(rows.iter().all(|r| r["holds"] == true));
        // C(10,5)/2^10 = 252/1024.
        assert_eq!(rows[4]["value"], "63/256");
    }

    #[test]
    fn shuffle_suite_statuses() {
        let cfg = ExperimentConfig::new(Experiment::ShuffleSuite, vec![(12, 3)], 4, 9);
        let run = run_experiment(&cfg, 2).unwrap();
        for r in run.envelope.result["rows"].as_array().unwrap() {
            let s = r["status"].as_str().unwrap();
            assert!(["witnessed", "not-witnessed", "outside-omega2", "refused"].contains(&s));
            if s == "witnessed" {
                assert_eq!(r["bound_holds"], true);
            }
        }
    }

    #[test]
    fn anticonc_rows_per_j_size() {
        let mut cfg = ExperimentConfig::new(Experiment::Anticonc, vec![(10, 2)], 200, 3);
        cfg.params = serde_json::json!({"j_sizes": [1, 2, 4]});
        let run = run_experiment(&cfg, 2).unwrap();
        assert_eq!(run.csv.lines().count(), 4);
        let bad = ExperimentConfig { params: serde_json::json!({"j_sizes": []}), ..cfg };
        assert!(matches!(run_experiment(&bad, 1), Err(crate::harness::HarnessError::Config(_))));
    }
}
