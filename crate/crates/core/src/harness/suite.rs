//! Structural properties measured on each sampled graph.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{csv_of, ExperimentConfig, HarnessError, Output};
use crate::frac::Frac;
use crate::graph::Digraph;
use crate::props::{expansion_check, independence_number, omega_events, zero_minor_search, SearchMode, SubsetBudget, ZeroMinorOutcome};
use crate::rank::{certify_graph, eac_event, EacCertainty, IntMatrix};
use crate::rng::{mix, stream_rng};
use crate::sampler::SampleSource;

/// Applies `f` to samples `0..samples` of `source` in parallel and returns
/// the results in sample order.
pub(crate) fn per_sample<T: Send>(
    source: &SampleSource,
    samples: u64,
    seed: u64,
    f: impl Fn(u64, &Digraph) -> Result<T, HarnessError> + Sync,
) -> Result<Vec<T>, HarnessError> {
    let chunks: Vec<Vec<T>> = (0..source.num_chunks(samples))
        .into_par_iter()
        .map(|c| {
            let mut out = Vec::new();
            let mut err = None;
            source
                .run_chunk(seed, c, samples, |k, g| {
                    if err.is_none() {
                        match f(k, g) {
                            Ok(v) => out.push(v),
                            Err(e) => err = Some(e),
                        }
                    }
                })
                .map_err(|e| HarnessError::Other(e.to_string()))?;
            err.map_or(Ok(out), Err)
        })
        .collect::<Result<_, _>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropertySuiteParams {
    pub epsilon: Frac,
    /// Largest `|S|` swept for expansion and `Ω_ε`.
    pub k_max: usize,
    /// Zero-minor sizes `l = ceil(α n)`, `r = ceil(β n)`.
    pub alpha: Frac,
    pub beta: Frac,
    pub zero_minor_mode: SearchMode,
    pub eac_p: Frac,
    pub independence_exact_cap: usize,
    pub budget: SubsetBudget,
}

impl Default for PropertySuiteParams {
    fn default() -> Self {
        PropertySuiteParams {
            epsilon: Frac::new(3, 10),
            k_max: 2,
            alpha: Frac::new(1, 10),
            beta: Frac::new(1, 10),
            zero_minor_mode: SearchMode::Heuristic,
            eac_p: Frac::new(1, 3),
            independence_exact_cap: crate::props::DEFAULT_EXACT_CAP,
            budget: SubsetBudget::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyRow {
    pub n: usize,
    pub d: usize,
    pub sample: u64,
    pub in_gamma: bool,
    pub worst_expansion: Frac,
    pub in_omega_eps: bool,
    pub in_omega2: bool,
    pub min_pair_union: usize,
    pub max_codegree: usize,
    pub independence: usize,
    pub independence_exact: bool,
    /// `found`, `absent` or `inconclusive`.
    pub zero_minor: String,
    pub singular: bool,
    /// Certainty of the almost-constant check; empty when nonsingular.
    pub eac: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSummary {
    pub n: usize,
    pub d: usize,
    pub samples: u64,
    pub gamma_rate: f64,
    pub omega_eps_rate: f64,
    pub omega2_rate: f64,
    pub zero_minor_found: u64,
    pub mean_independence: f64,
    pub singular: u64,
    pub eac_failures: u64,
}

fn props_of(g: &Digraph, k: u64, seed: u64, p: &PropertySuiteParams) -> Result<PropertyRow, HarnessError> {
    let (n, d) = (g.n(), g.d());
    let mut rng = stream_rng(seed, k, 1);
    let ex = expansion_check(g, p.epsilon, p.k_max, p.budget, &mut rng);
    let om = omega_events(g, p.epsilon, p.k_max, p.budget, &mut rng).map_err(|e| HarnessError::Config(e.to_string()))?;
    let ind = independence_number(g, p.independence_exact_cap, &mut rng);
    let l = p.alpha.ceil_times(n as u64) as usize;
    let r = p.beta.ceil_times(n as u64) as usize;
    let zm = match zero_minor_search(g, l, r, p.zero_minor_mode, &mut rng) {
        ZeroMinorOutcome::Found { .. } => "found",
        ZeroMinorOutcome::Absent => "absent",
        ZeroMinorOutcome::Inconclusive => "inconclusive",
    };
    let singular = certify_graph(g).singular;
    let eac = if singular {
        let out = eac_event(&IntMatrix::from(g), p.eac_p, seed).map_err(|e| HarnessError::Config(e.to_string()))?;
        serde_json::to_value(out.certainty).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
    } else {
        String::new()
    };
    Ok(PropertyRow {
        n,
        d,
        sample: k,
        in_gamma: ex.in_gamma,
        worst_expansion: ex.worst_ratio,
        in_omega_eps: om.in_omega_eps,
        in_omega2: om.in_omega2,
        min_pair_union: om.min_pair_union,
        max_codegree: g.max_codegree(),
        independence: ind.size,
        independence_exact: ind.exact,
        zero_minor: zm.to_string(),
        singular,
        eac,
    })
}

fn summarize(n: usize, d: usize, rows: &[PropertyRow]) -> PointSummary {
    let total = rows.len() as u64;
    let rate = |f: &dyn Fn(&PropertyRow) -> bool| {
        if total == 0 {
            0.0
        } else {
            rows.iter().filter(|r| f(r)).count() as f64 / total as f64
        }
    };
    let certified_false = serde_json::to_value(EacCertainty::CertifiedFalse).expect("serializes");
    PointSummary {
        n,
        d,
        samples: total,
        gamma_rate: rate(&|r| r.in_gamma),
        omega_eps_rate: rate(&|r| r.in_omega_eps),
        omega2_rate: rate(&|r| r.in_omega2),
        zero_minor_found: rows.iter().filter(|r| r.zero_minor == "found").count() as u64,
        mean_independence: if total == 0 {
            0.0
        } else {
            rows.iter().map(|r| r.independence as f64).sum::<f64>() / total as f64
        },
        singular: rows.iter().filter(|r| r.singular).count() as u64,
        eac_failures: rows.iter().filter(|r| certified_false.as_str() == Some(r.eac.as_str())).count() as u64,
    }
}

pub(crate) fn run_property_suite(cfg: &ExperimentConfig) -> Result<Output, HarnessError> {
    let params: PropertySuiteParams = cfg.params()?;
    if !params.epsilon.in_open(Frac::from_integer(0), Frac::from_integer(1)) {
        return Err(HarnessError::Config(format!("epsilon = {} must lie in (0, 1)", params.epsilon)));
    }
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    let mut skipped = Vec::new();
    for (i, &(n, d)) in cfg.grid.iter().enumerate() {
        let seed = mix(cfg.master_seed, i as u64);
        let source = match SampleSource::new(n, d, &cfg.sampler) {
            Ok(s) => s,
            Err(e) => {
                skipped.push(serde_json::json!({"n": n, "d": d, "reason": e.to_string()}));
                continue;
            }
        };
        let point = per_sample(&source, cfg.n_samples, seed, |k, g| props_of(g, k, seed, &params))?;
        summaries.push(summarize(n, d, &point));
        rows.extend(point);
    }
    if summaries.is_empty() {
        return Err(HarnessError::Infeasible(format!("no grid point could be sampled: {skipped:?}")));
    }
    Ok(Output {
        csv: csv_of(&rows)?,
        result: serde_json::json!({ "params": params, "summaries": summaries, "skipped": skipped, "rows": rows }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_experiment, Experiment};

    #[test]
    fn complete_graph_has_no_zero_minor_and_is_singular() {
        let cfg = ExperimentConfig::new(Experiment::PropertySuite, vec![(5, 5)], 3, 2);
        let run = run_experiment(&cfg, 1).unwrap();
        let s = &run.envelope.result["summaries"][0];
        assert_eq!(s["zero_minor_found"], 0);
        assert_eq!(s["singular"], 3);
        assert_eq!(s["mean_independence"], 0.0);
    }

    #[test]
    fn rows_follow_sample_order() {
        let cfg = ExperimentConfig::new(Experiment::PropertySuite, vec![(8, 2)], 6, 4);
        let run = run_experiment(&cfg, 3).unwrap();
        let samples: Vec<u64> = run.envelope.result["rows"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["sample"].as_u64().unwrap())
            .collect();
        assert_eq!(samples, (0..6).collect::<Vec<_>>());
        assert_eq!(run.csv, run_experiment(&cfg, 1).unwrap().csv);
    }
}
