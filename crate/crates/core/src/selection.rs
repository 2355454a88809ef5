//! Choosing which nodes are silenced on the awareness layer.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{betweenness, clustering_coefficients, degree_sequence, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Random,
    DegreeTop,
    DegreeBottom,
    BetweennessTop,
    BetweennessBottom,
    ClusteringTop,
    ClusteringBottom,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::Random,
        Strategy::DegreeTop,
        Strategy::DegreeBottom,
        Strategy::BetweennessTop,
        Strategy::BetweennessBottom,
        Strategy::ClusteringTop,
        Strategy::ClusteringBottom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::DegreeTop => "degree_top",
            Strategy::DegreeBottom => "degree_bottom",
            Strategy::BetweennessTop => "betweenness_top",
            Strategy::BetweennessBottom => "betweenness_bottom",
            Strategy::ClusteringTop => "clustering_top",
            Strategy::ClusteringBottom => "clustering_bottom",
        }
    }

    fn measure(self) -> Option<Measure> {
        match self {
            Strategy::Random => None,
            Strategy::DegreeTop | Strategy::DegreeBottom => Some(Measure::Degree),
            Strategy::BetweennessTop | Strategy::BetweennessBottom => Some(Measure::Betweenness),
            Strategy::ClusteringTop | Strategy::ClusteringBottom => Some(Measure::Clustering),
        }
    }

    fn highest_first(self) -> bool {
        matches!(
            self,
            Strategy::DegreeTop | Strategy::BetweennessTop | Strategy::ClusteringTop
        )
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| invalid(format!("unknown omega strategy `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaSize {
    Count(usize),
    Fraction(f64),
}

impl OmegaSize {
    pub fn resolve(self, n: usize) -> Result<usize> {
        match self {
            OmegaSize::Count(c) if c <= n => Ok(c),
            OmegaSize::Count(c) => Err(invalid(format!("omega count {c} exceeds {n} nodes"))),
            OmegaSize::Fraction(f) if (0.0..=1.0).contains(&f) => Ok((f * n as f64).round() as usize),
            OmegaSize::Fraction(f) => Err(invalid(format!("omega fraction {f} outside [0, 1]"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaSpec {
    pub strategy: Strategy,
    pub size: OmegaSize,
    /// Only consulted by [`Strategy::Random`].
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Measure {
    Degree,
    Betweenness,
    Clustering,
}

/// Awareness-layer scores, computed once and shared across selections on the
/// same graph.
#[derive(Debug, Clone, Default)]
pub struct Centralities {
    degree: Option<Vec<f64>>,
    betweenness: Option<Vec<f64>>,
    clustering: Option<Vec<f64>>,
}

impl Centralities {
    /// Computes the measures needed by `strategies`.
    pub fn for_strategies(g: &Graph, strategies: &[Strategy]) -> Self {
        let mut c = Self::default();
        for s in strategies {
            match s.measure() {
                Some(Measure::Degree) if c.degree.is_none() => {
                    c.degree = Some(degree_sequence(g).into_iter().map(|d| d as f64).collect())
                }
                Some(Measure::Betweenness) if c.betweenness.is_none() => c.betweenness = Some(betweenness(g)),
                Some(Measure::Clustering) if c.clustering.is_none() => {
                    c.clustering = Some(clustering_coefficients(g))
                }
                _ => {}
            }
        }
        c
    }

    fn scores(&self, m: Measure) -> Option<&[f64]> {
        match m {
            Measure::Degree => self.degree.as_deref(),
            Measure::Betweenness => self.betweenness.as_deref(),
            Measure::Clustering => self.clustering.as_deref(),
        }
    }
}

/// Nodes ordered by descending score, ties by ascending index. Top-k
/// selections take the head of this order and bottom-k the tail, so the two
/// are complementary.
fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// Selects the silent nodes for `spec` on the awareness layer. The returned
/// set is sorted.
pub fn select_omega(spec: &OmegaSpec, awareness: &Graph) -> Result<Vec<usize>> {
    let centralities = Centralities::for_strategies(awareness, &[spec.strategy]);
    select_omega_with(spec, awareness, &centralities)
}

/// [`select_omega`] reusing precomputed scores. Missing scores are computed
/// on the fly.
pub fn select_omega_with(spec: &OmegaSpec, awareness: &Graph, centralities: &Centralities) -> Result<Vec<usize>> {
    let n = awareness.node_count();
    let k = spec.size.resolve(n)?;
    let mut chosen = match spec.strategy.measure() {
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            index::sample(&mut rng, n, k).into_vec()
        }
        Some(m) => {
            let computed;
            let scores = match centralities.scores(m) {
                Some(s) => s,
                None => {
                    computed = Centralities::for_strategies(awareness, &[spec.strategy]);
                    computed.scores(m).expect("just computed")
                }
            };
            let order = ranking(scores);
            if spec.strategy.highest_first() {
                order[..k].to_vec()
            } else {
                order[n - k..].to_vec()
            }
        }
    };
    chosen.sort_unstable();
    Ok(chosen)
}

/// One node index per line.
pub fn write_omega_set<W: std::io::Write>(mut out: W, set: &[usize]) -> Result<()> {
    for i in set {
        writeln!(out, "{i}")?;
    }
    out.flush()?;
    Ok(())
}
