pub mod bits;
pub mod frac;
pub mod graph;
pub mod harness;
pub mod lo;
pub mod props;
pub mod rank;
pub mod report;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use frac::Frac;
pub use graph::{DeltaVector, Digraph, GraphError, SwitchRejection, SwitchingMove, Vertex};
pub use sampler::{ChainConfig, FrozenColumnSet, Method, SampleSource, SamplerError};
