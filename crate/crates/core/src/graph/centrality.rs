use std::collections::VecDeque;

use rayon::prelude::*;

use super::Graph;

/// Number of neighbors of each node.
pub fn degree_sequence(g: &Graph) -> Vec<usize> {
    (0..g.node_count()).map(|i| g.degree(i)).collect()
}

const SOURCES_PER_CHUNK: usize = 64;

/// Unnormalized shortest-path betweenness over ordered pairs `(s, t)`,
/// `s != t`, both different from the measured node. Unreachable pairs
/// contribute nothing.
///
/// Brandes accumulation, one BFS per source. Sources are split into fixed-size
/// chunks whose partial sums are added in chunk order, so the result does not
/// depend on how many worker threads ran.
pub fn betweenness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCES_PER_CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            let mut work = BrandesWork::new(n);
            for &s in chunk {
                work.accumulate(g, s, &mut acc);
            }
            acc
        })
        .collect();

    let mut total = vec![0.0; n];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

struct BrandesWork {
    sigma: Vec<f64>,
    dist: Vec<usize>,
    delta: Vec<f64>,
    order: Vec<usize>,
    queue: VecDeque<usize>,
}

impl BrandesWork {
    fn new(n: usize) -> Self {
        Self {
            sigma: vec![0.0; n],
            dist: vec![usize::MAX; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }

    fn accumulate(&mut self, g: &Graph, s: usize, acc: &mut [f64]) {
        for &v in &self.order {
            self.sigma[v] = 0.0;
            self.dist[v] = usize::MAX;
            self.delta[v] = 0.0;
        }
        self.order.clear();

        self.sigma[s] = 1.0;
        self.dist[s] = 0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.order.push(v);
            let next = self.dist[v] + 1;
            for &w in g.neighbors(v) {
                if self.dist[w] == usize::MAX {
                    self.dist[w] = next;
                    self.queue.push_back(w);
                }
                if self.dist[w] == next {
                    self.sigma[w] += self.sigma[v];
                }
            }
        }

        // Predecessors of w are exactly its neighbors one level closer to s.
        for &w in self.order.iter().rev() {
            let dw = self.dist[w];
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for &v in g.neighbors(w) {
                if self.dist[v] != usize::MAX && self.dist[v] + 1 == dw {
                    self.delta[v] += self.sigma[v] * coeff;
                }
            }
            if w != s {
                acc[w] += self.delta[w];
            }
        }
    }
}

/// Local clustering coefficient `2 e_i / (k_i (k_i - 1))`, zero for nodes of
/// degree below two.
pub fn clustering_coefficients(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut mark = vec![false; n];
    (0..n)
        .map(|i| {
            let nbrs = g.neighbors(i);
            let k = nbrs.len();
            if k < 2 {
                return 0.0;
            }
            for &j in nbrs {
                mark[j] = true;
            }
            let mut links = 0usize;
            for &j in nbrs {
                links += g.neighbors(j).iter().filter(|&&l| mark[l]).count();
            }
            for &j in nbrs {
                mark[j] = false;
            }
            // Each neighbor-neighbor edge was seen from both ends.
            links as f64 / (k * (k - 1)) as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_ws;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))).unwrap()
    }

    fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|l| (0, l))).unwrap()
    }

    #[test]
    fn degrees() {
        assert_eq!(degree_sequence(&complete(4)), vec![3, 3, 3, 3]);
        let ring = generate_ws(10, 4, 0.0, 0).unwrap();
        assert_eq!(degree_sequence(&ring), vec![4; 10]);
    }

    #[test]
    fn betweenness_path_counts_ordered_pairs() {
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(betweenness(&path), vec![0.0, 2.0, 0.0]);
    }

    #[test]
    fn betweenness_clique_is_zero() {
        assert_eq!(betweenness(&complete(4)), vec![0.0; 4]);
    }

    #[test]
    fn betweenness_star_hub() {
        // 5 leaves: 20 ordered leaf pairs, all through the hub.
        let bc = betweenness(&star(5));
        assert_eq!(bc[0], 20.0);
        assert!(bc[1..].iter().all(|&b| b == 0.0));
    }

    #[test]
    fn betweenness_splits_over_parallel_paths() {
        // 4-cycle: each opposite pair has two shortest paths.
        let c4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(betweenness(&c4), vec![1.0; 4]);
    }

    #[test]
    fn betweenness_disconnected_pairs_contribute_nothing() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        assert_eq!(betweenness(&g), vec![0.0, 2.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn clustering_known_graphs() {
        assert_eq!(clustering_coefficients(&complete(4)), vec![1.0; 4]);
        assert_eq!(clustering_coefficients(&star(5)), vec![0.0; 6]);
        let ring = generate_ws(10, 4, 0.0, 0).unwrap();
        assert_eq!(clustering_coefficients(&ring), vec![0.5; 10]);
    }

    #[test]
    fn clustering_low_degree_is_zero() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(clustering_coefficients(&g), vec![0.0; 3]);
    }
}
