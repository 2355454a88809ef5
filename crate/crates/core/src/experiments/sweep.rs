use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{build_replicas, replica, write_header, ExperimentSpec, RunMeta, Summary};
use crate::dynamics::run_to_absorption;
use crate::error::{invalid, Result};
use crate::selection::{OmegaSize, Strategy};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub strategy: Strategy,
    pub fraction: f64,
    pub rho_r: Summary,
    pub rho_a: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    /// Ordered by strategy, then fraction.
    pub points: Vec<SweepPoint>,
    pub meta: RunMeta,
}

impl SweepResult {
    /// Mean final recovered fraction along `strategy`'s curve.
    pub fn curve(&self, strategy: Strategy) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter(|p| p.strategy == strategy)
            .map(|p| (p.fraction, p.rho_r.mean))
            .collect()
    }
}

/// Final recovered fraction against the silent-node fraction for each
/// strategy, at the fixed rates in `spec.dynamics`.
///
/// The dynamics seed of a run depends on the fraction and replication but not
/// on the strategy, so strategies are compared under common random numbers
/// and coincide exactly where their silent sets coincide.
pub fn omega_ratio_sweep(spec: &ExperimentSpec, strategies: &[Strategy], fractions: &[f64]) -> Result<SweepResult> {
    spec.validate()?;
    if strategies.is_empty() || fractions.is_empty() {
        return Err(invalid("sweep needs at least one strategy and one fraction"));
    }
    if let Some(f) = fractions.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return Err(invalid(format!("omega fraction {f} outside [0, 1]")));
    }
    let started = Instant::now();
    let replicas = build_replicas(spec, strategies)?;
    let reps = spec.replications;
    let nf = fractions.len();

    let outcomes: Vec<(f64, f64, bool)> = (0..strategies.len() * nf * reps)
        .into_par_iter()
        .map(|unit| {
            let r = unit % reps;
            let f_idx = (unit / reps) % nf;
            let strategy = strategies[unit / (reps * nf)];
            let rep = replica(&replicas, r);
            let omega = rep.omega(strategy, OmegaSize::Fraction(fractions[f_idx]))?;
            let traj = run_to_absorption(&rep.net, &omega, &spec.dynamics, spec.run_seed(f_idx, r))?;
            Ok((traj.final_counts().rho_r, traj.tail_mean_rho_a, traj.absorbed()))
        })
        .collect::<Result<_>>()?;

    let mut points = Vec::with_capacity(strategies.len() * nf);
    for (k, chunk) in outcomes.chunks(reps).enumerate() {
        let rho_r: Vec<f64> = chunk.iter().map(|o| o.0).collect();
        let rho_a: Vec<f64> = chunk.iter().map(|o| o.1).collect();
        points.push(SweepPoint {
            strategy: strategies[k / nf],
            fraction: fractions[k % nf],
            rho_r: Summary::of(&rho_r)?,
            rho_a: Summary::of(&rho_a)?,
        });
    }
    Ok(SweepResult {
        points,
        meta: RunMeta {
            replications: reps,
            network_seeds: (0..reps).map(|r| spec.network_seed(r)).collect(),
            non_absorbed: outcomes.iter().filter(|o| !o.2).count(),
            wall_time_secs: started.elapsed().as_secs_f64(),
        },
    })
}

#[derive(Serialize)]
struct Extra<'a> {
    strategies: &'a [Strategy],
    fractions: Vec<f64>,
}

#[derive(Serialize)]
struct Row {
    strategy: &'static str,
    fraction: f64,
    mean_rho_r: f64,
    std_rho_r: f64,
}

/// `strategy,fraction,mean_rho_r,std_rho_r` after a header comment.
pub fn write_sweep_csv<W: Write>(mut out: W, spec: &ExperimentSpec, result: &SweepResult) -> Result<()> {
    let mut strategies: Vec<Strategy> = Vec::new();
    let mut fractions: Vec<f64> = Vec::new();
    for p in &result.points {
        if !strategies.contains(&p.strategy) {
            strategies.push(p.strategy);
        }
        if !fractions.contains(&p.fraction) {
            fractions.push(p.fraction);
        }
    }
    write_header(&mut out, "sweep", spec, Extra { strategies: &strategies, fractions })?;
    let mut w = csv::Writer::from_writer(out);
    for p in &result.points {
        w.serialize(Row {
            strategy: p.strategy.name(),
            fraction: p.fraction,
            mean_rho_r: p.rho_r.mean,
            std_rho_r: p.rho_r.std,
        })?;
    }
    w.flush()?;
    Ok(())
}
