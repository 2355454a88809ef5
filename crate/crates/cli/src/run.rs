//! Executes a [`RunConfig`]: builds or loads the network, dispatches to the
//! subcommand and writes its files plus `manifest.json` under the output
//! directory.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use muxepi::dynamics::StateCounts;
use muxepi::experiments::{
    heatmap_experiment, omega_ratio_sweep, plateau_step, timeseries_experiment, write_heatmap_csv, write_sweep_csv,
    write_timeseries_csv, write_timeseries_mean_csv, RunMeta, VERSION,
};
use muxepi::graph::{build_multiplex, read_edge_list, write_edge_list};
use muxepi::mmca::{epidemic_threshold, mmca_run, write_fixed_point_csv, write_threshold_csv};
use muxepi::selection::{select_omega, write_omega_set};
use muxepi::{DynamicsParams, MultiplexNetwork, OmegaSpec};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] muxepi::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} run(s) hit max_steps before absorption")]
    NotAbsorbed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// Outputs were written but some runs did not absorb.
    Incomplete,
    Failed,
}

/// Machine-readable record of one invocation.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub artifact: &'static str,
    pub core_version: &'static str,
    pub cli_version: &'static str,
    pub subcommand: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub master_seed: u64,
    pub config: RunConfig,
    pub network_seeds: Vec<u64>,
    pub outputs: Vec<String>,
    pub result: Value,
    pub wall_time_secs: f64,
}

struct Outputs<'a> {
    dir: &'a Path,
    written: Vec<String>,
}

impl<'a> Outputs<'a> {
    fn create(&mut self, name: &str) -> Result<BufWriter<File>, RunError> {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|source| RunError::Io { path, source })?;
        self.written.push(name.to_string());
        Ok(BufWriter::new(file))
    }

    fn finish(&self, mut w: BufWriter<File>, name: &str) -> Result<(), RunError> {
        w.flush().map_err(|source| RunError::Io {
            path: self.dir.join(name),
            source,
        })
    }

    fn write_with<F>(&mut self, name: &str, f: F) -> Result<(), RunError>
    where
        F: FnOnce(&mut BufWriter<File>) -> muxepi::Result<()>,
    {
        let mut w = self.create(name)?;
        f(&mut w)?;
        self.finish(w, name)
    }
}

/// What a subcommand reports back for the manifest.
struct Report {
    network_seeds: Vec<u64>,
    result: Value,
    non_absorbed: usize,
}

/// Runs the configured subcommand inside a worker pool of `config.jobs`
/// threads and always leaves a manifest behind, marked failed on error.
pub fn run(config: &RunConfig) -> (Manifest, Result<(), RunError>) {
    let started = Instant::now();
    let mut outputs = Outputs {
        dir: &config.out_dir,
        written: Vec::new(),
    };
    let outcome = fs::create_dir_all(&config.out_dir)
        .map_err(|source| RunError::Io {
            path: config.out_dir.clone(),
            source,
        })
        .and_then(|_| {
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Some(j) = config.jobs {
                builder = builder.num_threads(j);
            }
            let pool = builder
                .build()
                .map_err(|e| muxepi::Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
            pool.install(|| dispatch(config, &mut outputs))
        });

    let (status, error, report) = match outcome {
        Ok(r) if r.non_absorbed > 0 => (Status::Incomplete, Some(RunError::NotAbsorbed(r.non_absorbed)), Some(r)),
        Ok(r) => (Status::Ok, None, Some(r)),
        Err(e) => (Status::Failed, Some(e), None),
    };
    let mut manifest = Manifest {
        artifact: "muxepi",
        core_version: VERSION,
        cli_version: env!("CARGO_PKG_VERSION"),
        subcommand: config.command.name(),
        status,
        error: error.as_ref().map(|e| e.to_string()),
        master_seed: config.master_seed,
        config: config.clone(),
        network_seeds: report.as_ref().map(|r| r.network_seeds.clone()).unwrap_or_default(),
        outputs: outputs.written.clone(),
        result: report.map(|r| r.result).unwrap_or(Value::Null),
        wall_time_secs: 0.0,
    };
    manifest.wall_time_secs = started.elapsed().as_secs_f64();
    let written = write_manifest(&config.out_dir, &manifest);
    let result = match (error, written) {
        (Some(e), _) => Err(e),
        (None, Err(e)) => Err(e),
        (None, Ok(())) => Ok(()),
    };
    (manifest, result)
}

fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<(), RunError> {
    let path = dir.join(MANIFEST);
    let io = |source| RunError::Io {
        path: path.clone(),
        source,
    };
    let mut w = BufWriter::new(File::create(&path).map_err(io)?);
    serde_json::to_writer_pretty(&mut w, manifest).map_err(|e| io(e.into()))?;
    w.write_all(b"\n").map_err(io)?;
    w.flush().map_err(io)
}

fn dispatch(config: &RunConfig, out: &mut Outputs) -> Result<Report, RunError> {
    match config.command {
        Command::Generate => generate(config, out),
        Command::Mmca => mmca(config, out),
        Command::Threshold => threshold(config, out),
        Command::Heatmap => heatmap(config, out),
        Command::Timeseries => timeseries(config, out),
        Command::Sweep => sweep(config, out),
    }
}

/// The single network pair used by generate / mmca / threshold: loaded from
/// the configured edge lists, or generated from replication 0's seed.
fn single_network(config: &RunConfig) -> Result<(MultiplexNetwork, Vec<u64>), RunError> {
    let load = |path: &PathBuf| -> Result<_, RunError> {
        let file = File::open(path).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(read_edge_list(BufReader::new(file))?)
    };
    match (&config.inputs.awareness, &config.inputs.contact) {
        (Some(a), Some(b)) => Ok((build_multiplex(load(a)?, load(b)?)?, Vec::new())),
        _ => {
            let seed = config.spec.network_seed(0);
            Ok((config.spec.network.build(seed)?, vec![seed]))
        }
    }
}

fn omega_set(config: &RunConfig, net: &MultiplexNetwork, out: &mut Outputs) -> Result<Vec<usize>, RunError> {
    let spec = OmegaSpec {
        seed: config.spec.omega_seed(0),
        ..config.spec.omega
    };
    let set = select_omega(&spec, net.awareness())?;
    out.write_with("omega.txt", |w| write_omega_set(w, &set))?;
    Ok(set)
}

fn generate(config: &RunConfig, out: &mut Outputs) -> Result<Report, RunError> {
    let (net, network_seeds) = single_network(config)?;
    out.write_with("awareness.edges", |w| write_edge_list(net.awareness(), w))?;
    out.write_with("contact.edges", |w| write_edge_list(net.contact(), w))?;
    let omega = omega_set(config, &net, out)?;
    Ok(Report {
        network_seeds,
        result: json!({
            "nodes": net.node_count(),
            "awareness_edges": net.awareness().edge_count(),
            "contact_edges": net.contact().edge_count(),
            "omega_size": omega.len(),
        }),
        non_absorbed: 0,
    })
}

#[derive(Serialize)]
struct CountsRow {
    step: usize,
    #[serde(rename = "rho_S")]
    rho_s: f64,
    #[serde(rename = "rho_I")]
    rho_i: f64,
    #[serde(rename = "rho_R")]
    rho_r: f64,
    #[serde(rename = "rho_A")]
    rho_a: f64,
}

fn write_counts_csv<W: Write>(w: W, counts: &[StateCounts]) -> muxepi::Result<()> {
    let mut w = csv::Writer::from_writer(w);
    for (step, c) in counts.iter().enumerate() {
        w.serialize(CountsRow {
            step,
            rho_s: c.rho_s,
            rho_i: c.rho_i,
            rho_r: c.rho_r,
            rho_a: c.rho_a,
        })?;
    }
    w.flush()?;
    Ok(())
}

fn mmca(config: &RunConfig, out: &mut Outputs) -> Result<Report, RunError> {
    let (net, network_seeds) = single_network(config)?;
    let omega = omega_set(config, &net, out)?;
    let traj = mmca_run(&net, &omega, &config.spec.dynamics, config.mmca.tol, config.mmca.max_steps)?;
    out.write_with("mmca.csv", |w| write_counts_csv(w, &traj.counts))?;
    let last = traj.counts.last().copied().expect("trajectory has the initial state");
    Ok(Report {
        network_seeds,
        result: json!({
            "steps": traj.counts.len() - 1,
            "absorbed": traj.absorbed,
            "final_rho_r": last.rho_r,
            "final_rho_a": last.rho_a,
        }),
        non_absorbed: usize::from(!traj.absorbed),
    })
}

fn threshold(config: &RunConfig, out: &mut Outputs) -> Result<Report, RunError> {
    let (net, network_seeds) = single_network(config)?;
    let omega = omega_set(config, &net, out)?;
    let t = &config.threshold;
    let reports = t
        .gammas
        .iter()
        .map(|&gamma| {
            let params = DynamicsParams {
                gamma,
                ..config.spec.dynamics
            };
            epidemic_threshold(&net, &omega, &params, t.tol, t.max_iter)
        })
        .collect::<muxepi::Result<Vec<_>>>()?;
    out.write_with("threshold.csv", |w| write_threshold_csv(w, &reports))?;
    out.write_with("fixed_point.csv", |w| write_fixed_point_csv(w, &reports[0].p_a))?;
    Ok(Report {
        network_seeds,
        result: json!({
            "beta_c": reports[0].beta_c,
            "lambda_max_h": reports[0].lambda_max_h,
            "reports": reports,
        }),
        non_absorbed: 0,
    })
}

fn meta_json(meta: &RunMeta) -> Value {
    json!({ "replications": meta.replications, "non_absorbed": meta.non_absorbed, "simulation_secs": meta.wall_time_secs })
}

fn heatmap(config: &RunConfig, out: &mut Outputs) -> Result<Report, RunError> {
    let result = heatmap_experiment(&config.spec)?;
    out.write_with("heatmap.csv", |w| write_heatmap_csv(w, &config.spec, &result))?;
    Ok(Report {
        network_seeds: result.meta.network_seeds.clone(),
        result: json!({ "cells": result.cells.len(), "runs": meta_json(&result.meta) }),
        non_absorbed: result.meta.non_absorbed,
    })
}

fn timeseries(config: &RunConfig, out: &mut Outputs) -> Result<Report, RunError> {
    let ts = &config.timeseries;
    let result = timeseries_experiment(&config.spec, ts.lambda, &ts.betas)?;
    out.write_with("timeseries.csv", |w| write_timeseries_csv(w, &config.spec, &result))?;
    out.write_with("timeseries_mean.csv", |w| write_timeseries_mean_csv(w, &config.spec, &result))?;
    let curves: Vec<Value> = result
        .curves
        .iter()
        .map(|c| {
            json!({
                "beta_u": c.beta_u,
                "final_rho_r": c.final_rho_r(),
                "plateau_step_99": plateau_step(&c.mean_rho_r(), 0.99),
                "plateau_rho_a": c.plateau_rho_a.mean,
            })
        })
        .collect();
    Ok(Report {
        network_seeds: result.meta.network_seeds.clone(),
        result: json!({ "lambda": ts.lambda, "curves": curves, "runs": meta_json(&result.meta) }),
        non_absorbed: result.meta.non_absorbed,
    })
}

fn sweep(config: &RunConfig, out: &mut Outputs) -> Result<Report, RunError> {
    let sw = &config.sweep;
    let result = omega_ratio_sweep(&config.spec, &sw.strategies, &sw.fractions)?;
    out.write_with("sweep.csv", |w| write_sweep_csv(w, &config.spec, &result))?;
    Ok(Report {
        network_seeds: result.meta.network_seeds.clone(),
        result: json!({ "points": result.points.len(), "runs": meta_json(&result.meta) }),
        non_absorbed: result.meta.non_absorbed,
    })
}
