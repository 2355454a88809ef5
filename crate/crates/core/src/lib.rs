//! Coupled awareness and disease spreading on two-layer multiplex networks
//! where a set of silent (Ω) nodes never takes part in awareness diffusion.
//!
//! - [`graph`]: BA / WS generators, edge-list IO, degree, betweenness and
//!   clustering.
//! - [`dynamics`]: synchronous Monte-Carlo simulation to absorption.
//! - [`mmca`]: the probability iteration, awareness fixed point and
//!   spectral threshold `beta_c = mu / Lambda_max(H)`.
//! - [`selection`]: choosing silent nodes by centrality.
//! - [`experiments`]: replicated heatmaps, time series and sweeps.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod mmca;
pub mod seed;
pub mod selection;

pub use dynamics::{DynamicsParams, NodeState, StateCounts, StateVector, Trajectory};
pub use error::{Error, Result};
pub use experiments::{ExperimentSpec, NetworkSpec, Topology};
pub use graph::{Graph, MultiplexNetwork};
pub use mmca::{MmcaState, ThresholdReport};
pub use selection::{OmegaSize, OmegaSpec, Strategy};
