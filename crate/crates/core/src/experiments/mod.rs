//! Replicated experiment families: `(lambda, beta_u)` heatmaps, fixed-rate
//! time series, and silent-fraction sweeps.
//!
//! Work is split into `(cell, replication)` units that run on the rayon pool
//! and are collected in key order, so outputs are identical for any number
//! of workers.

mod heatmap;
mod sweep;
mod timeseries;

pub use heatmap::{heatmap_experiment, write_heatmap_csv, HeatmapCell, HeatmapResult};
pub use sweep::{omega_ratio_sweep, write_sweep_csv, SweepPoint, SweepResult};
pub use timeseries::{
    plateau_step, timeseries_experiment, write_timeseries_csv, write_timeseries_mean_csv, Curve,
    TimeseriesResult,
};

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::DynamicsParams;
use crate::error::{invalid, Result};
use crate::graph::{build_multiplex, generate_ba, generate_ws, MultiplexNetwork};
use crate::seed::{self, Stream};
use crate::selection::{select_omega_with, Centralities, OmegaSize, OmegaSpec, Strategy};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Layer generator parameters: BA awareness layer, WS contact layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub n: usize,
    pub ba_m: usize,
    pub ws_k: usize,
    pub ws_p: f64,
}

impl Default for NetworkSpec {
    fn default() -> Self {
        Self {
            n: 10_000,
            ba_m: 4,
            ws_k: 4,
            ws_p: 0.1,
        }
    }
}

impl NetworkSpec {
    /// Generates both layers from `seed` (split into one seed per layer).
    pub fn build(&self, seed: u64) -> Result<MultiplexNetwork> {
        let awareness = generate_ba(self.n, self.ba_m, seed::derive(seed, Stream::AwarenessLayer, 0))?;
        let contact = generate_ws(self.n, self.ws_k, self.ws_p, seed::derive(seed, Stream::ContactLayer, 0))?;
        build_multiplex(awareness, contact)
    }
}

/// Whether each replication draws its own network pair or all share one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    #[default]
    Fresh,
    Quenched,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub network: NetworkSpec,
    /// Base rates; `lambda` and `beta_u` are overridden by the grids where an
    /// experiment sweeps them.
    pub dynamics: DynamicsParams,
    pub lambda_grid: Vec<f64>,
    pub beta_grid: Vec<f64>,
    pub omega: OmegaSpec,
    pub replications: usize,
    pub master_seed: u64,
    pub topology: Topology,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            network: NetworkSpec::default(),
            dynamics: DynamicsParams::default(),
            lambda_grid: uniform_grid(21),
            beta_grid: uniform_grid(21),
            omega: OmegaSpec {
                strategy: Strategy::Random,
                size: OmegaSize::Count(20),
                seed: 0,
            },
            replications: 10,
            master_seed: 0,
            topology: Topology::Fresh,
        }
    }
}

/// `points` evenly spaced values over `[0, 1]`.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|i| i as f64 / (points - 1) as f64).collect(),
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.dynamics.validate()?;
        if self.replications == 0 {
            return Err(invalid("replications must be positive"));
        }
        for (name, grid) in [("lambda_grid", &self.lambda_grid), ("beta_grid", &self.beta_grid)] {
            if grid.is_empty() {
                return Err(invalid(format!("{name} is empty")));
            }
            if let Some(v) = grid.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(invalid(format!("{name} value {v} outside [0, 1]")));
            }
        }
        self.omega.size.resolve(self.network.n)?;
        Ok(())
    }

    /// Seed of the network pair used by replication `r`.
    pub fn network_seed(&self, r: usize) -> u64 {
        let r = match self.topology {
            Topology::Fresh => r,
            Topology::Quenched => 0,
        };
        seed::derive(self.master_seed, Stream::Network, r as u64)
    }

    /// Seed of the random silent-node draw on the network of replication `r`.
    pub fn omega_seed(&self, r: usize) -> u64 {
        seed::derive(self.network_seed(r), Stream::Omega, 0)
    }

    /// Seed of the dynamics of replication `r` in cell `cell`.
    pub fn run_seed(&self, cell: usize, r: usize) -> u64 {
        seed::derive(seed::derive(self.master_seed, Stream::Cell, cell as u64), Stream::Replication, r as u64)
    }
}

/// Mean and sample standard deviation over replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub replications: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("cannot average zero replications"));
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            mean,
            std,
            replications: n,
        })
    }
}

/// Element-wise [`Summary`] of equally long per-replication series.
pub fn average_replications(results: &[Vec<f64>]) -> Result<Vec<Summary>> {
    let first = results.first().ok_or_else(|| invalid("cannot average zero replications"))?;
    if results.iter().any(|r| r.len() != first.len()) {
        return Err(invalid("replications have different lengths"));
    }
    let mut column = Vec::with_capacity(results.len());
    (0..first.len())
        .map(|k| {
            column.clear();
            column.extend(results.iter().map(|r| r[k]));
            Summary::of(&column)
        })
        .collect()
}

/// Bookkeeping common to every experiment result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMeta {
    pub replications: usize,
    pub network_seeds: Vec<u64>,
    /// Replications that hit `max_steps` with infected nodes left.
    pub non_absorbed: usize,
    pub wall_time_secs: f64,
}

/// Network pair and scores shared by all runs of one replication.
pub(crate) struct Replica {
    pub net: MultiplexNetwork,
    pub centralities: Centralities,
    pub omega_seed: u64,
}

impl Replica {
    pub fn omega(&self, strategy: Strategy, size: OmegaSize) -> Result<Vec<usize>> {
        let spec = OmegaSpec {
            strategy,
            size,
            seed: self.omega_seed,
        };
        select_omega_with(&spec, self.net.awareness(), &self.centralities)
    }
}

pub(crate) fn build_replicas(spec: &ExperimentSpec, strategies: &[Strategy]) -> Result<Vec<Replica>> {
    let distinct = match spec.topology {
        Topology::Fresh => spec.replications,
        Topology::Quenched => 1,
    };
    let built: Vec<Replica> = (0..distinct)
        .into_par_iter()
        .map(|r| {
            let seed = spec.network_seed(r);
            let net = spec.network.build(seed)?;
            let centralities = Centralities::for_strategies(net.awareness(), strategies);
            Ok(Replica {
                net,
                centralities,
                omega_seed: spec.omega_seed(r),
            })
        })
        .collect::<Result<_>>()?;
    Ok(built)
}

pub(crate) fn replica(replicas: &[Replica], r: usize) -> &Replica {
    &replicas[r.min(replicas.len() - 1)]
}

#[derive(Serialize)]
struct Header<'a, E: Serialize> {
    artifact: &'static str,
    version: &'static str,
    experiment: &'static str,
    spec: &'a ExperimentSpec,
    #[serde(flatten)]
    extra: E,
}

/// Writes the leading `# {...}` comment line identifying the run.
pub(crate) fn write_header<W: Write, E: Serialize>(
    out: &mut W,
    experiment: &'static str,
    spec: &ExperimentSpec,
    extra: E,
) -> Result<()> {
    let header = Header {
        artifact: "muxepi",
        version: VERSION,
        experiment,
        spec,
        extra,
    };
    let json = serde_json::to_string(&header).map_err(|e| invalid(e.to_string()))?;
    writeln!(out, "# {json}")?;
    Ok(())
}
