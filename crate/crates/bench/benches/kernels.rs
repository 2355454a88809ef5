use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use muxepi::dynamics::{init_states, mc_step, NodeStreams};
use muxepi::graph::{betweenness, build_multiplex, generate_ba, generate_ws};
use muxepi::mmca::{build_h_matrix, leading_eigenvalue, mmca_step, uau_steady_state, MmcaState};
use muxepi::{DynamicsParams, MultiplexNetwork};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn network(n: usize) -> MultiplexNetwork {
    build_multiplex(generate_ba(n, 4, 1).unwrap(), generate_ws(n, 4, 0.1, 2).unwrap()).unwrap()
}

fn bench_betweenness(c: &mut Criterion) {
    let mut group = c.benchmark_group("betweenness");
    group.sample_size(10);
    for n in [500, 2000] {
        let g = generate_ba(n, 4, 1).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| b.iter(|| betweenness(black_box(g))));
    }
    group.finish();
}

fn bench_mc_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("mc_step");
    let params = DynamicsParams {
        initial_infected_fraction: 0.1,
        ..DynamicsParams::default()
    };
    for n in [1000, 10_000] {
        let net = network(n);
        let omega: Vec<usize> = (0..n).step_by(20).collect();
        let states = init_states(&net, &omega, &params, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let mut streams = NodeStreams::new(4, n);
        group.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| mc_step(black_box(&states), &net, &params, &mut streams))
        });
    }
    group.finish();
}

fn bench_mmca_step(c: &mut Criterion) {
    let params = DynamicsParams::default();
    let net = network(10_000);
    let state = MmcaState::initial(&net, &[], &params).unwrap();
    c.bench_function("mmca_step/10000", |b| b.iter(|| mmca_step(black_box(&state), &net, &params)));
}

fn bench_power_iteration(c: &mut Criterion) {
    let mut group = c.benchmark_group("leading_eigenvalue");
    group.sample_size(20);
    let params = DynamicsParams::default();
    for n in [1000, 10_000] {
        let net = network(n);
        let p_a = uau_steady_state(&net, &[], &params, 1e-12, 100_000).unwrap();
        let h = build_h_matrix(&p_a, net.contact(), params.gamma).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| {
            b.iter(|| leading_eigenvalue(black_box(h), 1e-10, 100_000).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_betweenness, bench_mc_step, bench_mmca_step, bench_power_iteration);
criterion_main!(benches);
