//! Discrete-time synchronous Monte-Carlo engine for the coupled
//! unaware-aware-unaware / susceptible-infected-recovered process.
//!
//! Each step reads only the time-`t` snapshot. Per node, in order:
//!
//! 1. awareness: an unaware non-silent node is informed by each aware
//!    awareness-layer neighbor with probability `lambda`; an aware susceptible
//!    or recovered node forgets with probability `delta`;
//! 2. infection: a susceptible node is infected by each infected contact
//!    neighbor with probability `beta_a` if aware after step 1, else `beta_u`;
//!    newly infected non-silent nodes become aware;
//! 3. recovery: a node infected at `t` recovers with probability `mu`, and a
//!    recovering non-silent node then forgets with probability `delta`.
//!
//! Silent (Ω) nodes never become aware and never inform anyone.
//!
//! Randomness comes from one ChaCha8 stream per node, all sharing a key
//! derived from the replication seed, so the outcome does not depend on the
//! order in which nodes are visited.

use std::io::Write;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::MultiplexNetwork;
use crate::seed::{self, Stream};

/// Rates and run controls for one simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsParams {
    /// Per-step informing probability per aware neighbor.
    pub lambda: f64,
    /// Per-step forgetting probability.
    pub delta: f64,
    /// Per-step infection probability per infected neighbor, unaware target.
    pub beta_u: f64,
    /// Suppression factor: aware targets are infected with `gamma * beta_u`.
    pub gamma: f64,
    /// Per-step recovery probability.
    pub mu: f64,
    pub initial_infected_fraction: f64,
    /// Safety cap on disease steps before giving up on absorption.
    pub max_steps: usize,
    /// Steps simulated after absorption to average the awareness level.
    pub tail_window: usize,
}

impl Default for DynamicsParams {
    fn default() -> Self {
        Self {
            lambda: 0.5,
            delta: 0.04,
            beta_u: 0.2,
            gamma: 0.5,
            mu: 0.06,
            initial_infected_fraction: 0.001,
            max_steps: 100_000,
            tail_window: 100,
        }
    }
}

impl DynamicsParams {
    pub fn beta_a(&self) -> f64 {
        self.gamma * self.beta_u
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda", self.lambda),
            ("delta", self.delta),
            ("beta_u", self.beta_u),
            ("gamma", self.gamma),
            ("mu", self.mu),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(format!("{name}={v} outside [0, 1]")));
            }
        }
        let f = self.initial_infected_fraction;
        if !(f > 0.0 && f <= 1.0) {
            return Err(invalid(format!(
                "initial_infected_fraction={f} outside (0, 1]"
            )));
        }
        if self.max_steps == 0 {
            return Err(invalid("max_steps must be positive"));
        }
        Ok(())
    }

    /// Number of initially infected nodes in a population of `n`.
    pub fn seed_count(&self, n: usize) -> usize {
        // The small offset keeps 0.001 * 10000 from rounding up to 11.
        ((n as f64 * self.initial_infected_fraction) - 1e-9).ceil().max(0.0) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Disease {
    Susceptible,
    Infected,
    Recovered,
}

/// Joint information and disease state of one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeState {
    pub disease: Disease,
    pub aware: bool,
    pub omega: bool,
}

impl NodeState {
    pub fn is_infected(&self) -> bool {
        self.disease == Disease::Infected
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVector {
    pub nodes: Vec<NodeState>,
    pub step: usize,
}

impl StateVector {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn infected_count(&self) -> usize {
        self.nodes.iter().filter(|s| s.is_infected()).count()
    }
}

/// Population fractions at one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateCounts {
    pub rho_s: f64,
    pub rho_i: f64,
    pub rho_r: f64,
    pub rho_a: f64,
}

/// Fractions from integer tallies. Silent infected nodes count toward
/// `rho_i` but never toward `rho_a`.
pub fn counts(states: &StateVector) -> StateCounts {
    let (mut s, mut i, mut r, mut a) = (0usize, 0usize, 0usize, 0usize);
    for node in &states.nodes {
        match node.disease {
            Disease::Susceptible => s += 1,
            Disease::Infected => i += 1,
            Disease::Recovered => r += 1,
        }
        if node.aware {
            a += 1;
        }
    }
    let n = states.nodes.len().max(1) as f64;
    StateCounts {
        rho_s: s as f64 / n,
        rho_i: i as f64 / n,
        rho_r: r as f64 / n,
        rho_a: a as f64 / n,
    }
}

/// Validates a silent-node set and expands it into a membership mask.
pub fn omega_mask(n: usize, omega_set: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &i in omega_set {
        if i >= n {
            return Err(invalid(format!("omega node {i} out of range for {n} nodes")));
        }
        mask[i] = true;
    }
    Ok(mask)
}

/// Initial condition: `seed_count(N)` uniformly drawn nodes infected (aware
/// unless silent), everyone else unaware and susceptible.
pub fn init_states<R: Rng + ?Sized>(
    net: &MultiplexNetwork,
    omega_set: &[usize],
    params: &DynamicsParams,
    rng: &mut R,
) -> Result<StateVector> {
    let n = net.node_count();
    let mask = omega_mask(n, omega_set)?;
    let f = params.initial_infected_fraction;
    if !(f > 0.0 && f <= 1.0) {
        return Err(invalid(format!("initial_infected_fraction={f} outside (0, 1]")));
    }
    let mut nodes: Vec<NodeState> = mask
        .iter()
        .map(|&omega| NodeState {
            disease: Disease::Susceptible,
            aware: false,
            omega,
        })
        .collect();
    for i in index::sample(rng, n, params.seed_count(n).min(n)) {
        nodes[i].disease = Disease::Infected;
        nodes[i].aware = !nodes[i].omega;
    }
    Ok(StateVector { nodes, step: 0 })
}

/// One independent random stream per node.
#[derive(Debug, Clone)]
pub struct NodeStreams {
    streams: Vec<ChaCha8Rng>,
}

impl NodeStreams {
    pub fn new(seed: u64, n: usize) -> Self {
        let base = ChaCha8Rng::seed_from_u64(seed);
        let streams = (0..n as u64)
            .map(|i| {
                let mut rng = base.clone();
                rng.set_stream(i);
                rng
            })
            .collect();
        Self { streams }
    }

    pub fn get_mut(&mut self, node: usize) -> &mut ChaCha8Rng {
        &mut self.streams[node]
    }
}

/// Advances every node by one synchronous step.
pub fn mc_step(
    states: &StateVector,
    net: &MultiplexNetwork,
    params: &DynamicsParams,
    streams: &mut NodeStreams,
) -> StateVector {
    mc_step_in_order(states, net, params, streams, 0..states.len())
}

/// [`mc_step`] visiting nodes in the given order. Any permutation yields the
/// same result.
pub fn mc_step_in_order<I>(
    states: &StateVector,
    net: &MultiplexNetwork,
    params: &DynamicsParams,
    streams: &mut NodeStreams,
    order: I,
) -> StateVector
where
    I: IntoIterator<Item = usize>,
{
    let mut next = states.nodes.clone();
    for i in order {
        next[i] = update_node(i, states, net, params, streams.get_mut(i));
    }
    StateVector {
        nodes: next,
        step: states.step + 1,
    }
}

fn update_node(
    i: usize,
    prev: &StateVector,
    net: &MultiplexNetwork,
    params: &DynamicsParams,
    rng: &mut ChaCha8Rng,
) -> NodeState {
    let now = prev.nodes[i];
    let mut out = now;

    if !now.omega {
        if !now.aware {
            for &j in net.awareness().neighbors(i) {
                if prev.nodes[j].aware && rng.random::<f64>() < params.lambda {
                    out.aware = true;
                    break;
                }
            }
        } else if now.disease != Disease::Infected && rng.random::<f64>() < params.delta {
            out.aware = false;
        }
    }

    match now.disease {
        Disease::Susceptible => {
            let beta = if out.aware {
                params.beta_a()
            } else {
                params.beta_u
            };
            for &j in net.contact().neighbors(i) {
                if prev.nodes[j].is_infected() && rng.random::<f64>() < beta {
                    out.disease = Disease::Infected;
                    out.aware = !now.omega;
                    break;
                }
            }
        }
        Disease::Infected => {
            if rng.random::<f64>() < params.mu {
                out.disease = Disease::Recovered;
                if !now.omega && rng.random::<f64>() < params.delta {
                    out.aware = false;
                }
            }
        }
        Disease::Recovered => {}
    }
    out
}

/// Per-step fractions of one run, including the post-absorption tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub counts: Vec<StateCounts>,
    /// First step with no infected node, if reached within `max_steps`.
    pub absorbed_at: Option<usize>,
    /// Mean awareness over the tail window (or the last `tail_window` steps
    /// when the run did not absorb).
    pub tail_mean_rho_a: f64,
    pub seed: u64,
}

impl Trajectory {
    pub fn absorbed(&self) -> bool {
        self.absorbed_at.is_some()
    }

    /// Counts at absorption (or at the last simulated disease step).
    pub fn final_counts(&self) -> StateCounts {
        let idx = self.absorbed_at.unwrap_or(self.counts.len() - 1);
        self.counts[idx]
    }
}

/// Simulates from a fresh initial condition until no node is infected, then
/// for `tail_window` more steps.
///
/// `seed` is split into the initial-infection draw and the per-node streams.
/// Hitting `max_steps` is not an error: the trajectory is returned with
/// `absorbed_at = None`.
pub fn run_to_absorption(
    net: &MultiplexNetwork,
    omega_set: &[usize],
    params: &DynamicsParams,
    seed: u64,
) -> Result<Trajectory> {
    params.validate()?;
    let mut init_rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, Stream::Initial, 0));
    let mut state = init_states(net, omega_set, params, &mut init_rng)?;
    let mut streams = NodeStreams::new(seed::derive(seed, Stream::Nodes, 0), net.node_count());

    let mut series = vec![counts(&state)];
    let mut absorbed_at = (state.infected_count() == 0).then_some(0);
    while absorbed_at.is_none() && state.step < params.max_steps {
        state = mc_step(&state, net, params, &mut streams);
        series.push(counts(&state));
        if state.infected_count() == 0 {
            absorbed_at = Some(state.step);
        }
    }
    if absorbed_at.is_some() {
        for _ in 0..params.tail_window {
            state = mc_step(&state, net, params, &mut streams);
            series.push(counts(&state));
        }
    }
    let window = params.tail_window.max(1).min(series.len());
    let tail = &series[series.len() - window..];
    let tail_mean_rho_a = tail.iter().map(|c| c.rho_a).sum::<f64>() / window as f64;

    Ok(Trajectory {
        counts: series,
        absorbed_at,
        tail_mean_rho_a,
        seed,
    })
}

#[derive(Serialize)]
struct TrajectoryRow {
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

/// Writes trajectories as CSV: `step,rho_S,rho_I,rho_R,rho_A,replication_id,seed`.
pub fn write_trajectories_csv<'a, W, I>(out: W, runs: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = (usize, &'a Trajectory)>,
{
    let mut w = csv::Writer::from_writer(out);
    for (replication_id, traj) in runs {
        for (step, c) in traj.counts.iter().enumerate() {
            w.serialize(TrajectoryRow {
                step,
                rho_s: c.rho_s,
                rho_i: c.rho_i,
                rho_r: c.rho_r,
                rho_a: c.rho_a,
                replication_id,
                seed: traj.seed,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}
