use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::error::{invalid, Result};

/// Barabási–Albert preferential attachment.
///
/// Starts from a complete graph on `m` nodes. Every later node attaches to `m`
/// distinct existing nodes, each drawn with probability proportional to its
/// current degree (repeated draws are rejected, giving sampling without
/// replacement). The result has `m(m-1)/2 + (n-m)m` edges.
pub fn generate_ba(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m == 0 || n < m {
        return Err(invalid(format!("BA requires n >= m >= 1, got n={n}, m={m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    // Each node appears once per incident edge end, so a uniform pick is a
    // degree-proportional pick.
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * n * m);

    for a in 0..m {
        for b in (a + 1)..m {
            adjacency[a].push(b);
            adjacency[b].push(a);
            endpoints.push(a);
            endpoints.push(b);
        }
    }

    let mut targets = Vec::with_capacity(m);
    for v in m..n {
        targets.clear();
        while targets.len() < m {
            let t = if endpoints.is_empty() {
                // Only reachable for m = 1, when the seed is a lone node.
                rng.random_range(0..v)
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            adjacency[v].push(t);
            adjacency[t].push(v);
            endpoints.push(v);
            endpoints.push(t);
        }
    }

    for nbrs in &mut adjacency {
        nbrs.sort_unstable();
    }
    Ok(Graph::from_sorted_adjacency(adjacency))
}

/// Watts–Strogatz small world.
///
/// Ring lattice with `k/2` neighbors on each side; then, for each offset
/// `j = 1..=k/2` and each node `u`, the lattice edge `(u, u+j)` has its far
/// endpoint moved with probability `p` to a uniformly drawn node that is
/// neither `u` nor already adjacent to it. Edge count stays `n*k/2`.
pub fn generate_ws(n: usize, k: usize, p: f64, seed: u64) -> Result<Graph> {
    if !k.is_multiple_of(2) {
        return Err(invalid(format!("WS ring degree k must be even, got {k}")));
    }
    if k >= n {
        return Err(invalid(format!("WS requires k < n, got n={n}, k={k}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("WS rewiring probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for u in 0..n {
        for j in 1..=k / 2 {
            let v = (u + j) % n;
            adjacency[u].insert(v);
            adjacency[v].insert(u);
        }
    }

    if p > 0.0 {
        for j in 1..=k / 2 {
            for u in 0..n {
                if rng.random::<f64>() >= p {
                    continue;
                }
                if adjacency[u].len() >= n - 1 {
                    continue;
                }
                let v = (u + j) % n;
                let w = loop {
                    let w = rng.random_range(0..n);
                    if w != u && !adjacency[u].contains(&w) {
                        break w;
                    }
                };
                let removed = adjacency[u].remove(&v);
                debug_assert!(removed, "lattice edge ({u}, {v}) missing");
                adjacency[v].remove(&u);
                adjacency[u].insert(w);
                adjacency[w].insert(u);
            }
        }
    }

    Ok(Graph::from_sorted_adjacency(
        adjacency
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect(),
    ))
}
