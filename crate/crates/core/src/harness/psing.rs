//! Singularity frequency sweep.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{csv_of, ExperimentConfig, HarnessError, Output};
use crate::frac::Frac;
use crate::graph::Digraph;
use crate::rank::{certify_graph, eac_event, EacCertainty, IntMatrix};
use crate::rng::mix;
use crate::sampler::SampleSource;
use crate::stats::Proportion;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsingParams {
    /// `p` of the almost-constant check on singular samples.
    pub eac_p: Frac,
    /// Verdicts are memoized per graph up to this `n`.
    pub memo_max_n: usize,
    /// Most graphs remembered per grid point.
    pub memo_entries: usize,
}

impl Default for PsingParams {
    fn default() -> Self {
        PsingParams { eac_p: Frac::new(1, 3), memo_max_n: 64, memo_entries: 1 << 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsingRow {
    pub n: usize,
    pub d: usize,
    pub samples: u64,
    pub singular_count: u64,
    pub p_hat: f64,
    pub wilson_95_lo: f64,
    pub wilson_95_hi: f64,
    pub upper_95: f64,
    /// `ln(d)^3 / sqrt(d)` with unit constant: a shape, not a bound.
    pub reference_bound: f64,
    /// Singular samples with a certified almost-constant null vector.
    pub eac_failures: u64,
    /// Singular samples where the check was only heuristic.
    pub eac_heuristic: u64,
    pub skipped: bool,
    pub note: String,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    singular: u64,
    eac_failures: u64,
    eac_heuristic: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            singular: self.singular + o.singular,
            eac_failures: self.eac_failures + o.eac_failures,
            eac_heuristic: self.eac_heuristic + o.eac_heuristic,
        }
    }
}

/// Returns `(singular, eac certainty when singular)`. The eac seed is fixed,
/// so the verdict is a function of the graph alone.
fn verdict(g: &Digraph, p: Frac, seed: u64) -> Result<(bool, Option<EacCertainty>), HarnessError> {
    if !certify_graph(g).singular {
        return Ok((false, None));
    }
    let out = eac_event(&IntMatrix::from(g), p, seed).map_err(|e| HarnessError::Other(e.to_string()))?;
    Ok((true, Some(out.certainty)))
}

pub fn reference_bound(d: usize) -> f64 {
    let l = (d as f64).ln();
    l * l * l / (d as f64).sqrt()
}

pub(crate) fn psing_point(
    n: usize,
    d: usize,
    samples: u64,
    cfg: &ExperimentConfig,
    point_seed: u64,
    params: &PsingParams,
) -> Result<PsingRow, HarnessError> {
    let skipped = |note: String| PsingRow {
        n,
        d,
        samples: 0,
        singular_count: 0,
        p_hat: 0.0,
        wilson_95_lo: 0.0,
        wilson_95_hi: 1.0,
        upper_95: 1.0,
        reference_bound: reference_bound(d),
        eac_failures: 0,
        eac_heuristic: 0,
        skipped: true,
        note,
    };
    let source = match SampleSource::new(n, d, &cfg.sampler) {
        Ok(s) => s,
        Err(e) => return Ok(skipped(e.to_string())),
    };
    let memo: Option<Mutex<HashMap<Vec<u64>, (bool, Option<EacCertainty>)>>> =
        (n <= params.memo_max_n).then(|| Mutex::new(HashMap::new()));
    let eac_seed = cfg.master_seed;
    let tally = (0..source.num_chunks(samples))
        .into_par_iter()
        .map(|c| {
            let mut t = Tally::default();
            let mut err = None;
            source
                .run_chunk(point_seed, c, samples, |_, g| {
                    if err.is_some() {
                        return;
                    }
                    let v = match &memo {
                        Some(m) => {
                            let key = g.packed_rows().to_vec();
                            let hit = m.lock().expect("memo lock").get(&key).copied();
                            match hit {
                                Some(v) => Ok(v),
                                None => verdict(g, params.eac_p, eac_seed).inspect(|v| {
                                    let mut m = m.lock().expect("memo lock");
                                    if m.len() < params.memo_entries {
                                        m.insert(key, *v);
                                    }
                                }),
                            }
                        }
                        None => verdict(g, params.eac_p, eac_seed),
                    };
                    match v {
                        Ok((sing, eac)) => {
                            t.singular += sing as u64;
                            t.eac_failures += (eac == Some(EacCertainty::CertifiedFalse)) as u64;
                            t.eac_heuristic += (eac == Some(EacCertainty::HeuristicTrue)) as u64;
                        }
                        Err(e) => err = Some(e),
                    }
                })
                .map_err(|e| HarnessError::Other(e.to_string()))?;
            match err {
                Some(e) => Err(e),
                None => Ok(t),
            }
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)));
    let tally = match tally {
        Ok(t) => t,
        Err(e) => return Ok(skipped(e.to_string())),
    };
    let prop = Proportion::new(tally.singular, samples);
    Ok(PsingRow {
        n,
        d,
        samples,
        singular_count: tally.singular,
        p_hat: prop.p_hat,
        wilson_95_lo: prop.lo,
        wilson_95_hi: prop.hi,
        upper_95: prop.upper_95,
        reference_bound: reference_bound(d),
        eac_failures: tally.eac_failures,
        eac_heuristic: tally.eac_heuristic,
        skipped: false,
        note: String::new(),
    })
}

pub(crate) fn run_psing_sweep(cfg: &ExperimentConfig) -> Result<Output, HarnessError> {
    let params: PsingParams = cfg.params()?;
    if !params.eac_p.in_open(Frac::from_integer(0), Frac::new(1, 2)) {
        return Err(HarnessError::Config(format!("eac_p = {} must lie in (0, 1/2)", params.eac_p)));
    }
    let rows = cfg
        .grid
        .iter()
        .enumerate()
        .map(|(i, &(n, d))| psing_point(n, d, cfg.n_samples, cfg, mix(cfg.master_seed, i as u64), &params))
        .collect::<Result<Vec<_>, _>>()?;
    if rows.iter().all(|r| r.skipped) {
        let notes: Vec<&str> = rows.iter().map(|r| r.note.as_str()).collect();
        return Err(HarnessError::Infeasible(format!("no grid point could be sampled: {}", notes.join("; "))));
    }
    let csv = csv_of(&rows)?;
    let result = serde_json::json!({
        "params": params,
        "reference_bound_note": "ln(d)^3 / sqrt(d) with unit constant; shape only",
        "rows": rows,
    });
    Ok(Output { csv, result })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_experiment, Experiment};

    #[test]
    fn d1_is_never_singular_and_n2_d1_matches_exact() {
        // M_{2,1} = {I, swap}: both permutation matrices, never singular.
        let cfg = ExperimentConfig::new(Experiment::PsingSweep, vec![(2, 1), (5, 1)], 50, 7);
        let run = run_experiment(&cfg, 2).unwrap();
        let rows: Vec<&str> = run.csv.lines().collect();
        assert_eq!(rows.len(), 3);
        assert!(rows[1].starts_with("2,1,50,0,0.0,"), "{}", rows[1]);
    }

    #[test]
    fn complete_graph_is_always_singular() {
        let cfg = ExperimentConfig::new(Experiment::PsingSweep, vec![(3, 3)], 10, 1);
        let run = run_experiment(&cfg, 1).unwrap();
        let line = run.csv.lines().nth(1).unwrap();
        assert!(line.starts_with("3,3,10,10,1.0,"), "{line}");
    }

    #[test]
    fn worker_count_does_not_change_rows() {
        let cfg = ExperimentConfig::new(Experiment::PsingSweep, vec![(6, 2), (7, 3)], 40, 11);
        let a = run_experiment(&cfg, 1).unwrap();
        let b = run_experiment(&cfg, 4).unwrap();
        assert_eq!(a.csv, b.csv);
        assert_eq!(a.manifest.rows_sha256, b.manifest.rows_sha256);
    }

    #[test]
    fn reference_shape() {
        assert_eq!(reference_bound(1), 0.0);
        assert!((reference_bound(100) - 100f64.ln().powi(3) / 10.0).abs() < 1e-12);
    }
}
