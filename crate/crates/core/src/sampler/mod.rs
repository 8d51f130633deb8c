//! Uniform samplers on `D_{n,d}` and exhaustive enumeration for tiny `n`.

mod conditional;
mod configuration;
mod enumerate;
mod switch;

pub use conditional::{feasible_completion, sample_conditional, FrozenColumnSet};
pub use configuration::{configuration_acceptance_estimate, sample_configuration};
pub use enumerate::{count_all, enumerate_all, visit_all, DEFAULT_ENUMERATION_CAP};
pub use switch::{sample_switch_chain, SwitchChain};

use serde::{Deserialize, Serialize};

use crate::graph::Digraph;
use crate::rng::{task_rng, LabRng};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("invalid parameters n = {n}, d = {d} (need 1 <= d <= n)")]
    InvalidParams { n: usize, d: usize },
    #[error(
        "configuration model would need about {expected_attempts:.3e} attempts \
         (budget {budget}); use the switch chain instead"
    )]
    RetryBudget { expected_attempts: f64, budget: u64 },
    #[error("frozen column set is infeasible: {0}")]
    Infeasible(String),
    #[error("malformed frozen column set: {0}")]
    MalformedFrozen(String),
    #[error("burn-in {given} is below the floor {floor} for this size")]
    BurnInBelowFloor { given: u64, floor: u64 },
    #[error("enumeration of M_{{{n},{d}}} refused: n exceeds cap {cap} (about {estimated} graphs)")]
    EnumerationCap { n: usize, d: usize, cap: usize, estimated: String },
}

/// Which sampler to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Configuration,
    Switch,
    #[default]
    Auto,
}

/// Markov-chain and sampler settings, embedded in run manifests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Proposals before the first sample; `None` uses [`default_burn_in`].
    #[serde(default)]
    pub burn_in_steps: Option<u64>,
    /// Proposals between consecutive samples of one chain; `None` uses [`default_thinning`].
    #[serde(default)]
    pub thinning: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub method: Method,
    /// Samples drawn per chain before restarting from a fresh seed.
    /// 1 means every sample comes from its own burned-in chain.
    #[serde(default = "default_chunk_len")]
    pub chunk_len: u64,
    /// Maximum configuration-model attempts per sample.
    #[serde(default = "default_retry_budget")]
    pub retry_budget: u64,
}

fn default_chunk_len() -> u64 {
    1
}

fn default_retry_budget() -> u64 {
    1_000_000
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            burn_in_steps: None,
            thinning: None,
            seed: 0,
            method: Method::Auto,
            chunk_len: default_chunk_len(),
            retry_budget: default_retry_budget(),
        }
    }
}

/// `20 · n·d · ln(n·d + 1)` proposals.
pub fn default_burn_in(n: usize, d: usize) -> u64 {
    let nd = (n * d) as f64;
    (20.0 * nd * (nd + 1.0).ln()).ceil() as u64
}

/// `n·d · ln(n·d + 1)` proposals, a twentieth of the burn-in floor.
pub fn default_thinning(n: usize, d: usize) -> u64 {
    let nd = (n * d) as f64;
    ((nd * (nd + 1.0).ln()).ceil() as u64).max(1)
}

impl ChainConfig {
    pub fn with_seed(seed: u64) -> Self {
        ChainConfig { seed, ..Default::default() }
    }

    pub fn burn_in(&self, n: usize, d: usize) -> Result<u64, SamplerError> {
        let floor = default_burn_in(n, d);
        match self.burn_in_steps {
            None => Ok(floor),
            Some(b) if b < floor => Err(SamplerError::BurnInBelowFloor { given: b, floor }),
            Some(b) => Ok(b),
        }
    }

    pub fn thinning_steps(&self, n: usize, d: usize) -> u64 {
        self.thinning.unwrap_or_else(|| default_thinning(n, d)).max(1)
    }

    /// Resolves `Auto`: the configuration model when `min(d, n-d) <= 4`
    /// (estimated acceptance of at least 1%), the switch chain otherwise.
    pub fn resolve_method(&self, n: usize, d: usize) -> Method {
        match self.method {
            Method::Auto => {
                let dd = d.min(n - d);
                if dd <= 4 || configuration_acceptance_estimate(n, d) >= 0.01 {
                    Method::Configuration
                } else {
                    Method::Switch
                }
            }
            m => m,
        }
    }
}

pub(crate) fn check_params(n: usize, d: usize) -> Result<(), SamplerError> {
    if n == 0 || d == 0 || d > n {
        Err(SamplerError::InvalidParams { n, d })
    } else {
        Ok(())
    }
}

/// Deterministic source of sample `k` of a run.
///
/// Samples are grouped in chunks of `chunk_len`; chunk `c` is produced by one
/// generator seeded with `mix(master_seed, c)`, so any partition of chunks
/// across workers yields the same graphs.
#[derive(Debug, Clone)]
pub struct SampleSource {
    n: usize,
    d: usize,
    cfg: ChainConfig,
    method: Method,
    burn_in: u64,
    thinning: u64,
    frozen: Option<FrozenColumnSet>,
    start: Option<Digraph>,
}

impl SampleSource {
    pub fn new(n: usize, d: usize, cfg: &ChainConfig) -> Result<Self, SamplerError> {
        check_params(n, d)?;
        let method = cfg.resolve_method(n, d);
        let burn_in = cfg.burn_in(n, d)?;
        if method == Method::Configuration {
            configuration::check_budget(n, d, cfg.retry_budget)?;
        }
        Ok(SampleSource {
            n,
            d,
            cfg: cfg.clone(),
            method,
            burn_in,
            thinning: cfg.thinning_steps(n, d),
            frozen: None,
            start: None,
        })
    }

    /// Sampling restricted to `D(I, F)`; always uses the column-restricted switch chain.
    pub fn conditional(
        n: usize,
        d: usize,
        frozen: FrozenColumnSet,
        cfg: &ChainConfig,
    ) -> Result<Self, SamplerError> {
        check_params(n, d)?;
        let start = feasible_completion(n, d, &frozen)?;
        Ok(SampleSource {
            n,
            d,
            cfg: cfg.clone(),
            method: Method::Switch,
            burn_in: cfg.burn_in(n, d)?,
            thinning: cfg.thinning_steps(n, d),
            frozen: Some(frozen),
            start: Some(start),
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn is_conditional(&self) -> bool {
        self.frozen.is_some()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn chunk_len(&self) -> u64 {
        self.cfg.chunk_len.max(1)
    }

    /// Runs chunk `c`, producing samples `c*chunk_len .. min((c+1)*chunk_len, total)`.
    pub fn run_chunk(
        &self,
        master_seed: u64,
        chunk: u64,
        total: u64,
        mut visit: impl FnMut(u64, &Digraph),
    ) -> Result<(), SamplerError> {
        let len = self.chunk_len();
        let first = chunk * len;
        let last = ((chunk + 1) * len).min(total);
        if first >= last {
            return Ok(());
        }
        let mut rng = task_rng(master_seed, chunk);
        match self.method {
            Method::Configuration => {
                for k in first..last {
                    let g = configuration::sample_with_budget(self.n, self.d, self.cfg.retry_budget, &mut rng)?;
                    visit(k, &g);
                }
            }
            _ => {
                let start = match &self.start {
                    Some(s) => s.clone(),
                    None => Digraph::consecutive_circulant(self.n, self.d).expect("valid size"),
                };
                let frozen_cols = self.frozen.as_ref().map(|f| f.i_set.as_slice()).unwrap_or(&[]);
                let mut chain = SwitchChain::with_frozen_columns(&start, frozen_cols);
                chain.run(self.burn_in, &mut rng);
                for k in first..last {
                    if k > first {
                        chain.run(self.thinning, &mut rng);
                    }
                    let g = chain.to_digraph();
                    visit(k, &g);
                }
            }
        }
        Ok(())
    }

    pub fn num_chunks(&self, total: u64) -> u64 {
        total.div_ceil(self.chunk_len())
    }

    /// Single sample `k` (runs its whole chunk prefix).
    pub fn sample(&self, master_seed: u64, k: u64) -> Result<Digraph, SamplerError> {
        let chunk = k / self.chunk_len();
        let mut out = None;
        self.run_chunk(master_seed, chunk, k + 1, |idx, g| {
            if idx == k {
                out = Some(g.clone());
            }
        })?;
        Ok(out.expect("sample index inside its chunk"))
    }

    /// Draws one graph from an explicit generator, ignoring chunking.
    pub fn draw(&self, rng: &mut LabRng) -> Result<Digraph, SamplerError> {
        match self.method {
            Method::Configuration => configuration::sample_with_budget(self.n, self.d, self.cfg.retry_budget, rng),
            _ => {
                let start = match &self.start {
                    Some(s) => s.clone(),
                    None => Digraph::consecutive_circulant(self.n, self.d).expect("valid size"),
                };
                let frozen_cols = self.frozen.as_ref().map(|f| f.i_set.as_slice()).unwrap_or(&[]);
                let mut chain = SwitchChain::with_frozen_columns(&start, frozen_cols);
                chain.run(self.burn_in, rng);
                Ok(chain.to_digraph())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_picks_configuration_for_small_degree() {
        let cfg = ChainConfig::default();
        assert_eq!(cfg.resolve_method(40, 4), Method::Configuration);
        assert_eq!(cfg.resolve_method(400, 20), Method::Switch);
        assert_eq!(cfg.resolve_method(10, 8), Method::Configuration);
    }

    #[test]
    fn burn_in_floor_is_enforced() {
        let cfg = ChainConfig { burn_in_steps: Some(5), ..Default::default() };
        assert!(matches!(cfg.burn_in(4, 2), Err(SamplerError::BurnInBelowFloor { .. })));
        assert_eq!(ChainConfig::default().burn_in(4, 2).unwrap(), default_burn_in(4, 2));
        assert_eq!(default_burn_in(4, 2), (160.0f64 * 9f64.ln()).ceil() as u64);
    }

    #[test]
    fn chain_config_json_fields() {
        let cfg: ChainConfig =
            serde_json::from_str(r#"{"burn_in_steps": null, "thinning": 10, "seed": 5, "method": "switch"}"#).unwrap();
        assert_eq!(cfg.method, Method::Switch);
        assert_eq!(cfg.thinning, Some(10));
        assert_eq!(cfg.chunk_len, 1);
        let text = serde_json::to_string(&cfg).unwrap();
        for key in ["burn_in_steps", "thinning", "seed", "method"] {
            assert!(text.contains(key));
        }
    }

    #[test]
    fn chunked_samples_are_reproducible() {
        let cfg = ChainConfig { method: Method::Switch, chunk_len: 4, ..Default::default() };
        let src = SampleSource::new(6, 2, &cfg).unwrap();
        let mut all = Vec::new();
        for c in 0..src.num_chunks(10) {
            src.run_chunk(9, c, 10, |k, g| all.push((k, g.clone()))).unwrap();
        }
        assert_eq!(all.len(), 10);
        assert_eq!(src.sample(9, 6).unwrap(), all[6].1);
    }
}
