use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{average_replications, build_replicas, replica, write_header, ExperimentSpec, RunMeta, Summary};
use crate::dynamics::{run_to_absorption, DynamicsParams, StateCounts, Trajectory};
use crate::error::Result;

/// Replication-averaged curves for one `beta_u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub beta_u: f64,
    pub rho_s: Vec<Summary>,
    pub rho_i: Vec<Summary>,
    pub rho_r: Vec<Summary>,
    pub rho_a: Vec<Summary>,
    /// Mean over replications of each run's post-absorption awareness.
    pub plateau_rho_a: Summary,
    /// Per-replication runs, padded to the longest one.
    #[serde(skip)]
    pub runs: Vec<Trajectory>,
}

impl Curve {
    pub fn mean_rho_r(&self) -> Vec<f64> {
        self.rho_r.iter().map(|s| s.mean).collect()
    }

    pub fn mean_rho_a(&self) -> Vec<f64> {
        self.rho_a.iter().map(|s| s.mean).collect()
    }

    pub fn final_rho_r(&self) -> f64 {
        self.rho_r.last().map_or(0.0, |s| s.mean)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeseriesResult {
    pub lambda: f64,
    pub curves: Vec<Curve>,
    pub meta: RunMeta,
}

/// First step at which `series` reaches `level` times its final value.
pub fn plateau_step(series: &[f64], level: f64) -> usize {
    let Some(&last) = series.last() else {
        return 0;
    };
    let target = level * last;
    series.iter().position(|&v| v >= target).unwrap_or(series.len() - 1)
}

fn pad(counts: &mut Vec<StateCounts>, len: usize) {
    if let Some(&last) = counts.last() {
        counts.resize(len, last);
    }
}

/// Mean `rho(t)` curves for each `beta_u` in `betas` at fixed `lambda`.
pub fn timeseries_experiment(spec: &ExperimentSpec, lambda: f64, betas: &[f64]) -> Result<TimeseriesResult> {
    let check = ExperimentSpec {
        lambda_grid: vec![lambda],
        beta_grid: betas.to_vec(),
        ..spec.clone()
    };
    check.validate()?;
    let started = Instant::now();
    let replicas = build_replicas(spec, &[spec.omega.strategy])?;
    let omegas: Vec<Vec<usize>> = replicas
        .iter()
        .map(|rep| rep.omega(spec.omega.strategy, spec.omega.size))
        .collect::<Result<_>>()?;

    let reps = spec.replications;
    let runs: Vec<Trajectory> = (0..betas.len() * reps)
        .into_par_iter()
        .map(|unit| {
            let (cell, r) = (unit / reps, unit % reps);
            let params = DynamicsParams {
                lambda,
                beta_u: betas[cell],
                ..spec.dynamics
            };
            let idx = r.min(replicas.len() - 1);
            run_to_absorption(&replica(&replicas, r).net, &omegas[idx], &params, spec.run_seed(cell, r))
        })
        .collect::<Result<_>>()?;
    let non_absorbed = runs.iter().filter(|t| !t.absorbed()).count();

    let mut curves = Vec::with_capacity(betas.len());
    let mut runs = runs.into_iter();
    for &beta_u in betas {
        let mut group: Vec<Trajectory> = runs.by_ref().take(reps).collect();
        let len = group.iter().map(|t| t.counts.len()).max().unwrap_or(0);
        for t in &mut group {
            pad(&mut t.counts, len);
        }
        let column = |f: fn(&StateCounts) -> f64| -> Result<Vec<Summary>> {
            let series: Vec<Vec<f64>> = group.iter().map(|t| t.counts.iter().map(f).collect()).collect();
            average_replications(&series)
        };
        let plateau: Vec<f64> = group.iter().map(|t| t.tail_mean_rho_a).collect();
        curves.push(Curve {
            beta_u,
            rho_s: column(|c| c.rho_s)?,
            rho_i: column(|c| c.rho_i)?,
            rho_r: column(|c| c.rho_r)?,
            rho_a: column(|c| c.rho_a)?,
            plateau_rho_a: Summary::of(&plateau)?,
            runs: group,
        });
    }

    Ok(TimeseriesResult {
        lambda,
        curves,
        meta: RunMeta {
            replications: reps,
            network_seeds: (0..reps).map(|r| spec.network_seed(r)).collect(),
            non_absorbed,
            wall_time_secs: started.elapsed().as_secs_f64(),
        },
    })
}

#[derive(Serialize)]
struct Extra<'a> {
    lambda: f64,
    betas: &'a [f64],
}

#[derive(Serialize)]
struct RunRow {
    beta_u: f64,
    step: usize,
    #[serde(rename = "rho_S")]
    rho_s: f64,
    #[serde(rename = "rho_I")]
    rho_i: f64,
    #[serde(rename = "rho_R")]
    rho_r: f64,
    #[serde(rename = "rho_A")]
    rho_a: f64,
    replication_id: usize,
    seed: u64,
}

/// Per-replication rows:
/// `beta_u,step,rho_S,rho_I,rho_R,rho_A,replication_id,seed`.
pub fn write_timeseries_csv<W: Write>(mut out: W, spec: &ExperimentSpec, result: &TimeseriesResult) -> Result<()> {
    let betas: Vec<f64> = result.curves.iter().map(|c| c.beta_u).collect();
    write_header(&mut out, "timeseries", spec, Extra { lambda: result.lambda, betas: &betas })?;
    let mut w = csv::Writer::from_writer(out);
    for curve in &result.curves {
        for (replication_id, run) in curve.runs.iter().enumerate() {
            for (step, c) in run.counts.iter().enumerate() {
                w.serialize(RunRow {
                    beta_u: curve.beta_u,
                    step,
                    rho_s: c.rho_s,
                    rho_i: c.rho_i,
                    rho_r: c.rho_r,
                    rho_a: c.rho_a,
                    replication_id,
                    seed: run.seed,
                })?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct MeanRow {
    beta_u: f64,
    step: usize,
    #[serde(rename = "mean_rho_S")]
    rho_s: f64,
    #[serde(rename = "mean_rho_I")]
    rho_i: f64,
    #[serde(rename = "mean_rho_R")]
    rho_r: f64,
    #[serde(rename = "mean_rho_A")]
    rho_a: f64,
    #[serde(rename = "std_rho_R")]
    std_rho_r: f64,
    #[serde(rename = "std_rho_A")]
    std_rho_a: f64,
    replications: usize,
}

/// Averaged curves: `beta_u,step,mean_rho_S,...,std_rho_A,replications`.
pub fn write_timeseries_mean_csv<W: Write>(mut out: W, spec: &ExperimentSpec, result: &TimeseriesResult) -> Result<()> {
    let betas: Vec<f64> = result.curves.iter().map(|c| c.beta_u).collect();
    write_header(&mut out, "timeseries_mean", spec, Extra { lambda: result.lambda, betas: &betas })?;
    let mut w = csv::Writer::from_writer(out);
    for curve in &result.curves {
        for step in 0..curve.rho_r.len() {
            w.serialize(MeanRow {
                beta_u: curve.beta_u,
                step,
                rho_s: curve.rho_s[step].mean,
                rho_i: curve.rho_i[step].mean,
                rho_r: curve.rho_r[step].mean,
                rho_a: curve.rho_a[step].mean,
                std_rho_r: curve.rho_r[step].std,
                std_rho_a: curve.rho_a[step].std,
                replications: curve.rho_r[step].replications,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}
