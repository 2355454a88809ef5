//! Undirected simple graphs, the two-layer multiplex container, and the
//! structural measures used to rank nodes.

mod centrality;
mod generate;
mod io;

pub use centrality::{betweenness, clustering_coefficients, degree_sequence};
pub use generate::{generate_ba, generate_ws};
pub use io::{read_edge_list, write_edge_list};

use crate::error::{invalid, Error, Result};

/// An undirected graph without self-loops over nodes `0..node_count`.
///
/// Neighbor lists are kept sorted, so iteration order (and therefore every
/// computation that walks the graph) is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Rejects self-loops, out-of-range
    /// endpoints and duplicate edges (in either orientation).
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); node_count];
        for (a, b) in edges {
            if a >= node_count || b >= node_count {
                return Err(invalid(format!(
                    "edge ({a}, {b}) out of range for {node_count} nodes"
                )));
            }
            if a == b {
                return Err(invalid(format!("self-loop on node {a}")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let mut edge_count = 0;
        for (i, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if let Some(w) = nbrs.windows(2).find(|w| w[0] == w[1]) {
                return Err(invalid(format!("duplicate edge ({i}, {})", w[0])));
            }
            edge_count += nbrs.len();
        }
        Ok(Self {
            adjacency,
            edge_count: edge_count / 2,
        })
    }

    /// Builds from neighbor sets that are already symmetric and loop-free.
    pub(crate) fn from_sorted_adjacency(adjacency: Vec<Vec<usize>>) -> Self {
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        debug_assert!(adjacency
            .iter()
            .enumerate()
            .all(|(i, n)| n.windows(2).all(|w| w[0] < w[1]) && !n.contains(&i)));
        Self {
            adjacency,
            edge_count,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Edges in canonical `(i, j)` order with `i < j`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, nbrs)| nbrs.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }
}

/// Two layers over the same node set: awareness spreads on one, the disease on
/// the other.
#[derive(Debug, Clone)]
pub struct MultiplexNetwork {
    awareness: Graph,
    contact: Graph,
}

impl MultiplexNetwork {
    pub fn node_count(&self) -> usize {
        self.awareness.node_count()
    }

    pub fn awareness(&self) -> &Graph {
        &self.awareness
    }

    pub fn contact(&self) -> &Graph {
        &self.contact
    }
}

/// Pairs an awareness layer with a contact layer of the same size.
pub fn build_multiplex(awareness: Graph, contact: Graph) -> Result<MultiplexNetwork> {
    if awareness.node_count() != contact.node_count() {
        return Err(Error::SizeMismatch {
            awareness: awareness.node_count(),
            contact: contact.node_count(),
        });
    }
    Ok(MultiplexNetwork { awareness, contact })
}
