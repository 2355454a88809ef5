//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs as a plain binary (`harness = false`) so the lines
//! appear in order and unbuffered.

mod common;

use std::time::{Duration, Instant};

use muxepi::dynamics::run_to_absorption;
use muxepi::experiments::{
    heatmap_experiment, omega_ratio_sweep, plateau_step, timeseries_experiment, write_heatmap_csv, write_sweep_csv,
    write_timeseries_csv, write_timeseries_mean_csv,
};
use muxepi::graph::{betweenness, build_multiplex, generate_ba, generate_ws};
use muxepi::mmca::{
    epidemic_threshold, leading_eigenvalue, mmca_run, mmca_step, DenseMatrix, MmcaState, DEFAULT_MAX_ITER,
    DEFAULT_TOL,
};
use muxepi::{DynamicsParams, ExperimentSpec, NetworkSpec, OmegaSize, OmegaSpec, Strategy, Topology};

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(elapsed: Duration, limit_secs: f64) -> bool {
    elapsed.as_secs_f64() < limit_secs
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Threshold closed form on the k=4 ring with gamma=1.
fn threshold_closed_form() -> Outcome {
    let start = Instant::now();
    let awareness = generate_ba(2000, 4, 1).unwrap();
    let contact = generate_ws(2000, 4, 0.0, 2).unwrap();
    let net = build_multiplex(awareness, contact).unwrap();
    let params = DynamicsParams {
        gamma: 1.0,
        mu: 0.06,
        ..DynamicsParams::default()
    };
    let r = epidemic_threshold(&net, &[], &params, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    let elapsed = start.elapsed();
    let err = (r.beta_c - 0.015).abs();
    Outcome {
        pass: err <= 1e-9 && within(elapsed, 1.0),
        detail: format!("beta_c={:.12} |err|={err:.2e} in {elapsed:.2?}", r.beta_c),
    }
}

fn spectral_oracle() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for data in common::oracle_matrices() {
        let want = common::spectral_radius(20, &data);
        let got = leading_eigenvalue(&DenseMatrix::new(20, data).unwrap(), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        worst = worst.max((got - want).abs());
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-8 && within(elapsed, 1.0),
        detail: format!("50 matrices, max |err|={worst:.2e} in {elapsed:.2?}"),
    }
}

fn betweenness_oracle() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for g in common::oracle_graphs() {
        let want = common::brute_force_betweenness(&g);
        for (a, b) in betweenness(&g).iter().zip(&want) {
            worst = worst.max((a - b).abs() / b.abs().max(1.0));
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-9 && within(elapsed, 10.0),
        detail: format!("50 graphs n<=64, max rel err={worst:.2e} in {elapsed:.2?}"),
    }
}

fn mmca_conservation() -> Outcome {
    let start = Instant::now();
    let net = common::multiplex(500, 5);
    let params = DynamicsParams {
        initial_infected_fraction: 0.05,
        beta_u: 0.3,
        ..DynamicsParams::default()
    };
    let omega: Vec<usize> = (0..500).step_by(10).collect();
    let mut state = MmcaState::initial(&net, &omega, &params).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        state = mmca_step(&state, &net, &params);
        for p in &state.nodes {
            worst = worst.max((p.total() - 1.0).abs());
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-12 && within(elapsed, 30.0),
        detail: format!("500 nodes, 10^4 steps, max drift={worst:.2e} in {elapsed:.2?}"),
    }
}

/// The 3x3 grid lambda, beta in {0.1, 0.5, 0.9}; a point is only kept if it
/// lies outside beta_c(lambda) ± 20%.
fn mmca_mc_agreement() -> Outcome {
    let start = Instant::now();
    let net = NetworkSpec {
        n: 1000,
        ..NetworkSpec::default()
    }
    .build(7)
    .unwrap();
    let grid = [0.1, 0.5, 0.9];
    let mut lines = Vec::new();
    let mut pass = true;
    let mut used = 0;
    for &lambda in &grid {
        let base = DynamicsParams {
            lambda,
            ..DynamicsParams::default()
        };
        let beta_c = epidemic_threshold(&net, &[], &base, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap().beta_c;
        for &beta_u in &grid {
            if (beta_u - beta_c).abs() <= 0.2 * beta_c {
                lines.push(format!("(l={lambda},b={beta_u}) excluded"));
                continue;
            }
            used += 1;
            let p = DynamicsParams { beta_u, ..base };
            let mmca = mmca_run(&net, &[], &p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            let mmca_r = mmca.counts.last().unwrap().rho_r;
            let mc_r = (0..100)
                .map(|r| run_to_absorption(&net, &[], &p, 50_000 + r).unwrap().final_counts().rho_r)
                .sum::<f64>()
                / 100.0;
            let gap = (mmca_r - mc_r).abs();
            pass &= gap <= 0.05;
            lines.push(format!(
                "(l={lambda},b={beta_u},beta_c={beta_c:.4}) mmca={mmca_r:.3} mc={mc_r:.3} gap={gap:.3}"
            ));
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: pass && used == 9 && within(elapsed, 600.0),
        detail: format!("{} in {elapsed:.2?}", lines.join("; ")),
    }
}

fn fig3_spec() -> ExperimentSpec {
    ExperimentSpec {
        network: NetworkSpec {
            n: 2000,
            ..NetworkSpec::default()
        },
        lambda_grid: vec![0.1, 0.5, 0.9],
        beta_grid: vec![0.05, 0.3, 0.9],
        replications: 10,
        master_seed: 3,
        ..ExperimentSpec::default()
    }
}

fn heatmap_onset_and_suppression() -> Outcome {
    let start = Instant::now();
    let result = heatmap_experiment(&fig3_spec()).unwrap();
    let r = |l: f64, b: f64| result.cell(l, b).unwrap().rho_r.mean;
    let (low, high) = (r(0.5, 0.05), r(0.5, 0.3));
    let (quiet, loud) = (r(0.1, 0.9), r(0.9, 0.9));
    let onset = low < 0.02 && high > 0.3;
    let suppression = quiet - loud >= 0.1;
    let elapsed = start.elapsed();
    Outcome {
        pass: onset && suppression && within(elapsed, 600.0),
        detail: format!(
            "(a) {} rho_R(0.5,0.05)={low:.4} rho_R(0.5,0.3)={high:.4}; (b) {} rho_R(0.1,0.9)={quiet:.4} rho_R(0.9,0.9)={loud:.4} diff={:.4}; {elapsed:.2?}",
            verdict(onset),
            verdict(suppression),
            quiet - loud
        ),
    }
}

struct Fig5 {
    /// `(beta_u, final rho_R, 99% plateau step, rho_A plateau)` per strategy.
    top: Vec<(f64, f64, usize, f64)>,
    bottom: Vec<(f64, f64, usize, f64)>,
    elapsed: Duration,
}

fn fig5_runs() -> Fig5 {
    let start = Instant::now();
    let run = |strategy| {
        let spec = ExperimentSpec {
            omega: OmegaSpec {
                strategy,
                size: OmegaSize::Count(20),
                seed: 0,
            },
            replications: 10,
            master_seed: 5,
            ..ExperimentSpec::default()
        };
        timeseries_experiment(&spec, 0.5, &[0.2, 0.5, 0.8])
            .unwrap()
            .curves
            .iter()
            .map(|c| {
                let mean = c.mean_rho_r();
                (c.beta_u, c.final_rho_r(), plateau_step(&mean, 0.99), c.plateau_rho_a.mean)
            })
            .collect::<Vec<_>>()
    };
    let top = run(Strategy::DegreeTop);
    let bottom = run(Strategy::DegreeBottom);
    Fig5 {
        top,
        bottom,
        elapsed: start.elapsed(),
    }
}

fn fig5_silent_hubs(runs: &Fig5) -> Outcome {
    let top = runs.top.iter().find(|c| c.0 == 0.8).unwrap();
    let bottom = runs.bottom.iter().find(|c| c.0 == 0.8).unwrap();
    let checks = [top.1 >= 0.8, bottom.1 <= 0.45, top.2 < 120, bottom.2 > 150];
    Outcome {
        pass: checks.iter().all(|&c| c) && within(runs.elapsed, 900.0),
        detail: format!(
            "degree_top final rho_R={:.4} [{}] plateau={} [{}]; degree_bottom final rho_R={:.4} [{}] plateau={} [{}]; {:.2?}",
            top.1,
            verdict(checks[0]),
            top.2,
            verdict(checks[2]),
            bottom.1,
            verdict(checks[1]),
            bottom.2,
            verdict(checks[3]),
            runs.elapsed
        ),
    }
}

fn fig10_ratio_sweep() -> Outcome {
    let start = Instant::now();
    let spec = ExperimentSpec {
        dynamics: DynamicsParams {
            lambda: 0.3,
            beta_u: 0.2,
            gamma: 0.4,
            ..DynamicsParams::default()
        },
        replications: 10,
        master_seed: 10,
        ..ExperimentSpec::default()
    };
    let fractions = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
    let strategies = [Strategy::DegreeTop, Strategy::Random, Strategy::DegreeBottom];
    let result = omega_ratio_sweep(&spec, &strategies, &fractions).unwrap();
    let curve = |s| result.curve(s).iter().map(|p| p.1).collect::<Vec<f64>>();
    let (top, random, bottom) = (curve(Strategy::DegreeTop), curve(Strategy::Random), curve(Strategy::DegreeBottom));
    let ordered = (0..fractions.len()).all(|i| top[i] >= random[i] - 0.03 && random[i] >= bottom[i] - 0.03);
    let (_, r2) = common::linear_fit(&fractions, &bottom);
    let elapsed = start.elapsed();
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(",");
    Outcome {
        pass: ordered && r2 >= 0.9 && within(elapsed, 1800.0),
        detail: format!(
            "top=[{}] random=[{}] bottom=[{}] ordering {} bottom R^2={r2:.4}; {elapsed:.2?}",
            fmt(&top),
            fmt(&random),
            fmt(&bottom),
            verdict(ordered)
        ),
    }
}

fn awareness_plateau(runs: &Fig5) -> Outcome {
    let spread = |c: &[(f64, f64, usize, f64)]| {
        let a: Vec<f64> = c.iter().map(|x| x.3).collect();
        a.iter().cloned().fold(f64::MIN, f64::max) - a.iter().cloned().fold(f64::MAX, f64::min)
    };
    let (t, b) = (spread(&runs.top), spread(&runs.bottom));
    let fmt = |c: &[(f64, f64, usize, f64)]| c.iter().map(|x| format!("{:.4}", x.3)).collect::<Vec<_>>().join(",");
    Outcome {
        pass: t <= 0.05 && b <= 0.05,
        detail: format!(
            "rho_A plateau over beta_U=0.2,0.5,0.8: degree_top [{}] spread={t:.4}; degree_bottom [{}] spread={b:.4}",
            fmt(&runs.top),
            fmt(&runs.bottom)
        ),
    }
}

/// Renders every experiment CSV once with the given worker count.
fn render_all(threads: usize) -> Vec<Vec<u8>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let spec = ExperimentSpec {
            network: NetworkSpec {
                n: 500,
                ..NetworkSpec::default()
            },
            lambda_grid: vec![0.2, 0.8],
            beta_grid: vec![0.1, 0.6],
            replications: 3,
            master_seed: 42,
            topology: Topology::Fresh,
            ..ExperimentSpec::default()
        };
        let mut out = Vec::new();
        let mut buf = Vec::new();
        write_heatmap_csv(&mut buf, &spec, &heatmap_experiment(&spec).unwrap()).unwrap();
        out.push(buf);
        let ts = timeseries_experiment(&spec, 0.5, &[0.3]).unwrap();
        let mut buf = Vec::new();
        write_timeseries_csv(&mut buf, &spec, &ts).unwrap();
        out.push(buf);
        let mut buf = Vec::new();
        write_timeseries_mean_csv(&mut buf, &spec, &ts).unwrap();
        out.push(buf);
        let sweep = omega_ratio_sweep(&spec, &[Strategy::BetweennessTop, Strategy::Random], &[0.0, 0.2]).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &spec, &sweep).unwrap();
        out.push(buf);
        out
    })
}

fn determinism() -> Outcome {
    let start = Instant::now();
    let a = render_all(1);
    let b = render_all(1);
    let c = render_all(4);
    let same = a == b && a == c;
    Outcome {
        pass: same,
        detail: format!(
            "heatmap, timeseries (runs and means) and sweep CSVs re-rendered with 1, 1 and 4 workers: {} ({} bytes); {:.2?}",
            if same { "byte-identical" } else { "differ" },
            a.iter().map(Vec::len).sum::<usize>(),
            start.elapsed()
        ),
    }
}

fn main() {
    let mut failed = Vec::new();
    let mut report = |id: usize, name: &str, o: Outcome| {
        println!("criterion {id:>2} {} {name}: {}", verdict(o.pass), o.detail);
        if !o.pass {
            failed.push(id);
        }
    };
    report(1, "threshold closed form", threshold_closed_form());
    report(2, "spectral oracle", spectral_oracle());
    report(3, "betweenness oracle", betweenness_oracle());
    report(4, "MMCA conservation", mmca_conservation());
    report(5, "MMCA-MC agreement", mmca_mc_agreement());
    report(6, "heatmap onset and suppression", heatmap_onset_and_suppression());
    let fig5 = fig5_runs();
    report(7, "silent hubs vs silent leaves", fig5_silent_hubs(&fig5));
    report(8, "silent-ratio sweep", fig10_ratio_sweep());
    report(9, "awareness plateau independence", awareness_plateau(&fig5));
    report(10, "determinism", determinism());
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: {} of 10 criteria fail: {failed:?}", failed.len());
        std::process::exit(1);
    }
}
