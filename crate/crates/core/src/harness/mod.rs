//! Reproducible experiment driver.
//!
//! A run is fully determined by its [`ExperimentConfig`]: every grid point
//! gets the seed `mix(master_seed, point_index)` and every sample chunk inside
//! it `mix(point_seed, chunk)`. Results are reduced with order-insensitive
//! merges, so the CSV body does not depend on the worker count.

mod experiments;
mod psing;
mod suite;

pub use experiments::{AnticoncParams, AnticoncRow, EnumerateRow, LoRow, LoSuiteParams, ShuffleRow, ShuffleSuiteParams};
pub use psing::{PsingParams, PsingRow};
pub use suite::{PointSummary, PropertyRow, PropertySuiteParams};

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::report::Envelope;
use crate::sampler::ChainConfig;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("replay diverged: {0}")]
    Divergence(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Other(String),
}

impl HarnessError {
    /// Process exit code: 2 config, 3 infeasible, 4 divergence, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Infeasible(_) => 3,
            HarnessError::Divergence(_) => 4,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    PsingSweep,
    PropertySuite,
    Anticonc,
    LoSuite,
    ShuffleSuite,
    Enumerate,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::PsingSweep => "psing-sweep",
            Experiment::PropertySuite => "property-suite",
            Experiment::Anticonc => "anticonc",
            Experiment::LoSuite => "lo-suite",
            Experiment::ShuffleSuite => "shuffle-suite",
            Experiment::Enumerate => "enumerate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// `(n, d)` points.
    pub grid: Vec<(usize, usize)>,
    pub n_samples: u64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub sampler: ChainConfig,
    /// Experiment-specific parameters; missing keys take their defaults.
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, grid: Vec<(usize, usize)>, n_samples: u64, master_seed: u64) -> Self {
        ExperimentConfig {
            experiment,
            grid,
            n_samples,
            master_seed,
            sampler: ChainConfig::default(),
            params: serde_json::Value::Null,
            output_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n_samples == 0 {
            return Err(HarnessError::Config("n_samples must be at least 1".into()));
        }
        if self.grid.is_empty() {
            return Err(HarnessError::Config("grid is empty".into()));
        }
        if let Some(&(n, d)) = self.grid.iter().find(|&&(n, d)| d == 0 || d > n) {
            return Err(HarnessError::Config(format!("grid point ({n}, {d}) needs 1 <= d <= n")));
        }
        if let Some(b) = self.sampler.burn_in_steps {
            for &(n, d) in &self.grid {
                let floor = crate::sampler::default_burn_in(n, d);
                if b < floor {
                    return Err(HarnessError::Config(format!(
                        "burn_in_steps {b} is below the floor {floor} at ({n}, {d})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Typed experiment parameters (defaults for anything missing).
    pub fn params<P: DeserializeOwned + Default>(&self) -> Result<P, HarnessError> {
        match &self.params {
            serde_json::Value::Null => Ok(P::default()),
            v => serde_json::from_value(v.clone()).map_err(|e| HarnessError::Config(format!("params: {e}"))),
        }
    }

    /// SHA-256 of the canonical JSON of everything that determines the rows
    /// except `master_seed` (and the output location).
    pub fn digest(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("master_seed");
            obj.remove("output_dir");
        }
        sha256_hex(serde_json::to_string(&v).expect("value serializes").as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub config_digest: String,
    /// SHA-256 of the CSV body.
    pub rows_sha256: String,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub workers: usize,
    pub csv_file: String,
    pub json_file: String,
}

/// Everything a run produced, before anything is written.
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub manifest: Manifest,
    pub csv: String,
    pub envelope: Envelope<serde_json::Value>,
}

fn unix_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

/// Rows as CSV plus the JSON result block.
pub(crate) struct Output {
    pub csv: String,
    pub result: serde_json::Value,
}

pub(crate) fn csv_of<T: Serialize>(rows: &[T]) -> Result<String, HarnessError> {
    crate::report::to_csv(rows).map_err(|e| HarnessError::Other(format!("csv: {e}")))
}

/// Runs `cfg` on a pool of `workers` threads.
pub fn run_experiment(cfg: &ExperimentConfig, workers: usize) -> Result<ExperimentRun, HarnessError> {
    cfg.validate()?;
    let workers = workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Other(format!("thread pool: {e}")))?;
    let started_unix_ms = unix_ms();
    let clock = Instant::now();
    let out = pool.install(|| match cfg.experiment {
        Experiment::PsingSweep => psing::run_psing_sweep(cfg),
        Experiment::PropertySuite => suite::run_property_suite(cfg),
        Experiment::Anticonc => experiments::run_anticonc(cfg),
        Experiment::LoSuite => experiments::run_lo_suite(cfg),
        Experiment::ShuffleSuite => experiments::run_shuffle_suite(cfg),
        Experiment::Enumerate => experiments::run_enumerate(cfg),
    })?;
    let name = cfg.experiment.name();
    let manifest = Manifest {
        tool_version: TOOL_VERSION.to_string(),
        config: cfg.clone(),
        config_digest: cfg.digest(),
        rows_sha256: sha256_hex(out.csv.as_bytes()),
        started_unix_ms,
        finished_unix_ms: unix_ms(),
        workers,
        csv_file: format!("{name}.csv"),
        json_file: format!("{name}.json"),
    };
    let params = serde_json::to_value(cfg).expect("config serializes");
    let envelope = Envelope::new(name, params, cfg.master_seed, cfg.n_samples, out.result, clock);
    Ok(ExperimentRun { manifest, csv: out.csv, envelope })
}

/// Writes `<experiment>.csv`, `<experiment>.json` and `manifest.json` into `dir`.
pub fn write_run(run: &ExperimentRun, dir: &Path) -> Result<PathBuf, HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let write = |name: &str, body: &str| {
        let p = dir.join(name);
        fs::write(&p, body).map_err(io_err(&p))
    };
    write(&run.manifest.csv_file, &run.csv)?;
    write(&run.manifest.json_file, &run.envelope.to_json())?;
    let manifest_path = dir.join("manifest.json");
    write("manifest.json", &serde_json::to_string_pretty(&run.manifest).expect("manifest serializes"))?;
    Ok(manifest_path)
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplayReport {
    pub warnings: Vec<String>,
    pub rows_sha256: String,
    pub rows: usize,
}

/// Re-executes a recorded run and checks that its CSV body is byte-identical.
pub fn replay(manifest_path: &Path, workers: usize) -> Result<(ReplayReport, ExperimentRun), HarnessError> {
    let text = fs::read_to_string(manifest_path).map_err(io_err(manifest_path))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", manifest_path.display())))?;
    let digest = manifest.config.digest();
    if digest != manifest.config_digest {
        return Err(HarnessError::Config(format!(
            "config does not match its recorded digest (recorded {}, actual {digest})",
            manifest.config_digest
        )));
    }
    let mut warnings = Vec::new();
    if manifest.tool_version != TOOL_VERSION {
        warnings.push(format!("manifest written by version {}, replaying with {TOOL_VERSION}", manifest.tool_version));
    }
    let run = run_experiment(&manifest.config, workers)?;
    if run.manifest.rows_sha256 != manifest.rows_sha256 {
        let recorded = manifest_path.parent().map(|p| p.join(&manifest.csv_file));
        let summary = match recorded.and_then(|p| fs::read_to_string(p).ok()) {
            Some(old) => diff_summary(&old, &run.csv),
            None => "recorded CSV not found".to_string(),
        };
        return Err(HarnessError::Divergence(format!(
            "rows hash {} != recorded {}; {summary}",
            run.manifest.rows_sha256, manifest.rows_sha256
        )));
    }
    let report = ReplayReport { warnings, rows_sha256: run.manifest.rows_sha256.clone(), rows: run.csv.lines().count().saturating_sub(1) };
    Ok((report, run))
}

/// First differing line of two CSV bodies.
pub fn diff_summary(old: &str, new: &str) -> String {
    let (a, b): (Vec<&str>, Vec<&str>) = (old.lines().collect(), new.lines().collect());
    let differing = a.iter().zip(&b).filter(|(x, y)| x != y).count() + a.len().abs_diff(b.len());
    match a.iter().zip(&b).position(|(x, y)| x != y) {
        Some(i) => format!("{differing} line(s) differ; first at line {}: {:?} vs {:?}", i + 1, a[i], b[i]),
        None => format!("{} recorded vs {} replayed lines", a.len(), b.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_validation() {
        let text = r#"{"experiment": "psing-sweep", "grid": [[4, 2], [5, 1]], "n_samples": 10, "master_seed": 3}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.grid, vec![(4, 2), (5, 1)]);
        assert_eq!(cfg.sampler, ChainConfig::default());
        let bad = r#"{"experiment": "psing-sweep", "grid": [[4, 5]], "n_samples": 10}"#;
        assert!(matches!(ExperimentConfig::from_json(bad), Err(HarnessError::Config(_))));
        let zero = r#"{"experiment": "enumerate", "grid": [[4, 2]], "n_samples": 0}"#;
        assert!(matches!(ExperimentConfig::from_json(zero), Err(HarnessError::Config(_))));
        let unknown = r#"{"experiment": "nope", "grid": [[4, 2]], "n_samples": 1}"#;
        assert!(ExperimentConfig::from_json(unknown).is_err());
    }

    #[test]
    fn digest_ignores_seed_only() {
        let a = ExperimentConfig::new(Experiment::PsingSweep, vec![(4, 2)], 10, 1);
        let mut b = a.clone();
        b.master_seed = 99;
        b.output_dir = Some("elsewhere".into());
        assert_eq!(a.digest(), b.digest());
        b.n_samples = 11;
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn diff_summary_points_at_first_change() {
        let s = diff_summary("h\n1\n2\n", "h\n1\n3\n");
        assert!(s.contains("line 3"), "{s}");
    }

    fn recorded(dir: &Path) -> PathBuf {
        let cfg = ExperimentConfig::new(Experiment::PsingSweep, vec![(5, 2), (6, 3)], 30, 17);
        write_run(&run_experiment(&cfg, 2).unwrap(), dir).unwrap()
    }

    fn edit_manifest(path: &Path, f: impl FnOnce(&mut Manifest)) {
        let mut m: Manifest = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
        f(&mut m);
        fs::write(path, serde_json::to_string(&m).unwrap()).unwrap();
    }

    #[test]
    fn replay_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = recorded(dir.path());
        let (report, _) = replay(&path, 1).unwrap();
        assert!(report.warnings.is_empty());
        assert_eq!(report.rows, 2);
    }

    #[test]
    fn replay_detects_altered_seed() {
        let dir = tempfile::tempdir().unwrap();
        let path = recorded(dir.path());
        edit_manifest(&path, |m| m.config.master_seed += 1);
        let err = replay(&path, 3).unwrap_err();
        assert_eq!(err.exit_code(), 4, "{err}");
    }

    #[test]
    fn replay_rejects_altered_config_before_running() {
        let dir = tempfile::tempdir().unwrap();
        let path = recorded(dir.path());
        edit_manifest(&path, |m| m.config.n_samples = 10_000_000);
        let err = replay(&path, 1).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{err}");
    }

    #[test]
    fn replay_warns_on_version_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = recorded(dir.path());
        edit_manifest(&path, |m| m.tool_version = "0.0.0-old".into());
        let (report, _) = replay(&path, 1).unwrap();
        assert!(report.warnings[0].contains("0.0.0-old"));
    }

    #[test]
    fn missing_manifest_reports_path() {
        let err = replay(Path::new("/nonexistent/manifest.json"), 1).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("/nonexistent/manifest.json"));
    }
}
