use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{build_replicas, replica, write_header, ExperimentSpec, RunMeta, Summary};
use crate::dynamics::{run_to_absorption, DynamicsParams};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapCell {
    pub lambda: f64,
    pub beta_u: f64,
    /// Final recovered fraction.
    pub rho_r: Summary,
    /// Post-absorption mean awareness.
    pub rho_a: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapResult {
    /// Row-major over `lambda_grid` then `beta_grid`.
    pub cells: Vec<HeatmapCell>,
    pub meta: RunMeta,
}

impl HeatmapResult {
    pub fn cell(&self, lambda: f64, beta_u: f64) -> Option<&HeatmapCell> {
        self.cells.iter().find(|c| c.lambda == lambda && c.beta_u == beta_u)
    }
}

/// Mean final recovered fraction for every `(lambda, beta_u)` grid point.
pub fn heatmap_experiment(spec: &ExperimentSpec) -> Result<HeatmapResult> {
    spec.validate()?;
    let started = Instant::now();
    let replicas = build_replicas(spec, &[spec.omega.strategy])?;
    let omegas: Vec<Vec<usize>> = replicas
        .iter()
        .map(|rep| rep.omega(spec.omega.strategy, spec.omega.size))
        .collect::<Result<_>>()?;

    let nb = spec.beta_grid.len();
    let reps = spec.replications;
    let cells = spec.lambda_grid.len() * nb;
    let outcomes: Vec<(f64, f64, bool)> = (0..cells * reps)
        .into_par_iter()
        .map(|unit| {
            let (cell, r) = (unit / reps, unit % reps);
            let params = DynamicsParams {
                lambda: spec.lambda_grid[cell / nb],
                beta_u: spec.beta_grid[cell % nb],
                ..spec.dynamics
            };
            let idx = r.min(replicas.len() - 1);
            let traj = run_to_absorption(&replica(&replicas, r).net, &omegas[idx], &params, spec.run_seed(cell, r))?;
            Ok((traj.final_counts().rho_r, traj.tail_mean_rho_a, traj.absorbed()))
        })
        .collect::<Result<_>>()?;

    let mut result_cells = Vec::with_capacity(cells);
    for (cell, chunk) in outcomes.chunks(reps).enumerate() {
        let rho_r: Vec<f64> = chunk.iter().map(|o| o.0).collect();
        let rho_a: Vec<f64> = chunk.iter().map(|o| o.1).collect();
        result_cells.push(HeatmapCell {
            lambda: spec.lambda_grid[cell / nb],
            beta_u: spec.beta_grid[cell % nb],
            rho_r: Summary::of(&rho_r)?,
            rho_a: Summary::of(&rho_a)?,
        });
    }
    Ok(HeatmapResult {
        cells: result_cells,
        meta: RunMeta {
            replications: reps,
            network_seeds: (0..reps).map(|r| spec.network_seed(r)).collect(),
            non_absorbed: outcomes.iter().filter(|o| !o.2).count(),
            wall_time_secs: started.elapsed().as_secs_f64(),
        },
    })
}

#[derive(Serialize)]
struct Row {
    lambda: f64,
    beta_u: f64,
    mean_rho_r: f64,
    std_rho_r: f64,
    replications: usize,
}

/// `lambda,beta_u,mean_rho_r,std_rho_r,replications` after a header comment.
pub fn write_heatmap_csv<W: Write>(mut out: W, spec: &ExperimentSpec, result: &HeatmapResult) -> Result<()> {
    write_header(&mut out, "heatmap", spec, ())?;
    let mut w = csv::Writer::from_writer(out);
    for c in &result.cells {
        w.serialize(Row {
            lambda: c.lambda,
            beta_u: c.beta_u,
            mean_rho_r: c.rho_r.mean,
            std_rho_r: c.rho_r.std,
            replications: c.rho_r.replications,
        })?;
    }
    w.flush()?;
    Ok(())
}
