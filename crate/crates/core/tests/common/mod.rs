//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use muxepi::graph::{build_multiplex, generate_ba, generate_ws, Graph};
use muxepi::MultiplexNetwork;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Erdős–Rényi style graph with `n` nodes and edge probability `p`.
pub fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).expect("valid random graph")
}

/// The 50 graphs used by the betweenness oracle: sizes 2..=64 and densities
/// from sparse (disconnected) to dense.
pub fn oracle_graphs() -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB7E1);
    (0..50)
        .map(|i| {
            let n = if i == 0 { 64 } else { rng.random_range(2..=64) };
            let p = rng.random_range(0.02..0.35);
            random_graph(n, p, &mut rng)
        })
        .collect()
}

/// All-pairs hop distances by Floyd–Warshall (`usize::MAX` = unreachable).
fn all_pairs_distances(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut d = vec![vec![usize::MAX; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        for &j in g.neighbors(i) {
            d[i][j] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == usize::MAX {
                continue;
            }
            for j in 0..n {
                if d[k][j] != usize::MAX && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Betweenness by listing every shortest path explicitly:
/// `B(v) = sum over ordered pairs s != v != t of n_st(v) / g_st`, where
/// `g_st` is the number of shortest s–t paths and `n_st(v)` the number of
/// those passing through `v`.
pub fn brute_force_betweenness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let d = all_pairs_distances(g);
    let mut out = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t || d[s][t] == usize::MAX {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(path) = stack.pop() {
                let last = *path.last().unwrap();
                if last == t {
                    paths.push(path);
                    continue;
                }
                for &next in g.neighbors(last) {
                    if d[s][next] == path.len() && d[next][t] == d[s][t] - path.len() {
                        let mut p = path.clone();
                        p.push(next);
                        stack.push(p);
                    }
                }
            }
            let total = paths.len();
            let mut through = vec![0usize; n];
            for path in &paths {
                for &v in &path[1..path.len() - 1] {
                    through[v] += 1;
                }
            }
            for v in 0..n {
                out[v] += through[v] as f64 / total as f64;
            }
        }
    }
    out
}

/// Spectral radius from the full (complex) spectrum of a dense QR/Schur
/// decomposition; for a non-negative matrix this is its Perron root.
pub fn spectral_radius(n: usize, row_major: &[f64]) -> f64 {
    let m = DMatrix::from_row_slice(n, n, row_major);
    m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// The 50 random 20×20 non-negative matrices of the spectral oracle: dense
/// uniform ones, sparse ones and sparse symmetric ones.
pub fn oracle_matrices() -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EC7);
    (0..50)
        .map(|i| {
            let n = 20;
            let mut m = vec![0.0; n * n];
            match i % 3 {
                0 => m.iter_mut().for_each(|v| *v = rng.random::<f64>()),
                1 => m.iter_mut().for_each(|v| {
                    if rng.random::<f64>() < 0.25 {
                        *v = rng.random::<f64>()
                    }
                }),
                _ => {
                    for r in 0..n {
                        for c in r..n {
                            if rng.random::<f64>() < 0.3 {
                                let v = rng.random_range(0.0..2.0);
                                m[r * n + c] = v;
                                m[c * n + r] = v;
                            }
                        }
                    }
                }
            }
            m
        })
        .collect()
}

/// BA awareness layer over a WS contact layer, with derived seeds.
pub fn multiplex(n: usize, seed: u64) -> MultiplexNetwork {
    let a = generate_ba(n, 4, seed).unwrap();
    let b = generate_ws(n, 4, 0.1, seed ^ 0x9E37_79B9).unwrap();
    build_multiplex(a, b).unwrap()
}

/// Ordinary least squares `y = a + b x`; returns `(slope, r_squared)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}
