//! Structural events measured on sampled graphs: expansion, zero minors,
//! independence, the `Ω` events of the adjacency matrix, and
//! anti-concentration of `δ^J` and of `P_S M y`.

mod anticonc;
mod expansion;
mod independence;
mod omega;
mod projection;
mod subsets;
mod zero_minor;

pub use anticonc::{binomial_f64, collision_sigma, delta_anticoncentration, AnticoncEstimate, RegimeFlags};
pub use expansion::{expansion_check, ExpansionReport, Isoperimetry};
pub use independence::{independence_number, IndependenceResult, DEFAULT_EXACT_CAP};
pub use omega::{in_omega2, min_pair_union, omega_events, row_support_density, OmegaReport};
pub use projection::{
    projection_anticoncentration, rational_vector, Partition, ProjectionEstimate, ProjectionQuery,
};
pub use subsets::{binomial_sat, subsets_up_to, sweep_unions, SubsetBudget, SweepMode};
pub use zero_minor::{
    zero_minor_search, SearchMode, ZeroMinorOutcome, EXACT_ZERO_MINOR_LIMIT, ZERO_MINOR_RESTARTS,
};

use crate::sampler::SamplerError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum PropsError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}
