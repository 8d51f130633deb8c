//! JSON envelope and CSV rendering shared by every report.

use std::time::Instant;

use serde::{Deserialize, Serialize};

/// `{op, params, seed, n_samples, result, runtime_ms}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub op: String,
    pub params: serde_json::Value,
    pub seed: u64,
    pub n_samples: u64,
    pub result: T,
    pub runtime_ms: u64,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(op: &str, params: serde_json::Value, seed: u64, n_samples: u64, result: T, started: Instant) -> Self {
        Envelope {
            op: op.to_string(),
            params,
            seed,
            n_samples,
            result,
            runtime_ms: started.elapsed().as_millis() as u64,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Renders flat records as CSV with a header row.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
