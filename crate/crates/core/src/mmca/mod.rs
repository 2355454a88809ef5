//! Microscopic Markov chain iteration of the coupled process, the
//! disease-free awareness fixed point, and the spectral epidemic threshold.

mod spectral;
mod threshold;

pub use spectral::{leading_eigenvalue, power_iteration, DenseMatrix, HMatrix, LinearOperator, PowerOutcome};
pub use threshold::{
    build_h_matrix, epidemic_threshold, uau_steady_state, uau_steady_state_from,
    write_fixed_point_csv, write_threshold_csv, ThresholdReport,
};

use serde::Serialize;

use crate::dynamics::{omega_mask, DynamicsParams, StateCounts};
use crate::error::Result;
use crate::graph::MultiplexNetwork;

/// Fixed-point tolerance used by default for both iterations.
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// State probabilities of one node. `p_ui` is only ever non-zero for silent
/// nodes, which in turn keep `p_as`, `p_ai` and `p_ar` at zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct NodeProbabilities {
    pub p_us: f64,
    pub p_as: f64,
    pub p_ai: f64,
    pub p_ur: f64,
    pub p_ar: f64,
    pub p_ui: f64,
}

impl NodeProbabilities {
    pub fn aware(&self) -> f64 {
        self.p_as + self.p_ai + self.p_ar
    }

    pub fn infected(&self) -> f64 {
        self.p_ai + self.p_ui
    }

    pub fn recovered(&self) -> f64 {
        self.p_ur + self.p_ar
    }

    pub fn susceptible(&self) -> f64 {
        self.p_us + self.p_as
    }

    pub fn total(&self) -> f64 {
        self.p_us + self.p_as + self.p_ai + self.p_ur + self.p_ar + self.p_ui
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmcaState {
    pub nodes: Vec<NodeProbabilities>,
    pub omega: Vec<bool>,
    pub step: usize,
}

impl MmcaState {
    /// Uniform initial condition matching the Monte-Carlo start: every node is
    /// infected with probability `initial_infected_fraction` (aware-infected
    /// for ordinary nodes, unaware-infected for silent ones).
    pub fn initial(net: &MultiplexNetwork, omega_set: &[usize], params: &DynamicsParams) -> Result<Self> {
        let omega = omega_mask(net.node_count(), omega_set)?;
        let f = params.initial_infected_fraction;
        let nodes = omega
            .iter()
            .map(|&silent| {
                let mut p = NodeProbabilities {
                    p_us: 1.0 - f,
                    ..Default::default()
                };
                if silent {
                    p.p_ui = f;
                } else {
                    p.p_ai = f;
                }
                p
            })
            .collect();
        Ok(Self {
            nodes,
            omega,
            step: 0,
        })
    }

    pub fn counts(&self) -> StateCounts {
        let n = self.nodes.len().max(1) as f64;
        let mut c = StateCounts {
            rho_s: 0.0,
            rho_i: 0.0,
            rho_r: 0.0,
            rho_a: 0.0,
        };
        for p in &self.nodes {
            c.rho_s += p.susceptible();
            c.rho_i += p.infected();
            c.rho_r += p.recovered();
            c.rho_a += p.aware();
        }
        c.rho_s /= n;
        c.rho_i /= n;
        c.rho_r /= n;
        c.rho_a /= n;
        c
    }
}

/// Probabilities of *not* being informed (`r`) and of not being infected as
/// an aware (`q_a`) or unaware (`q_u`) susceptible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub r: f64,
    pub q_a: f64,
    pub q_u: f64,
}

/// Products over neighbors of the current state:
/// `r_i = prod_j (1 - a_ji P_j^A lambda)`,
/// `q_i = prod_j (1 - b_ji P_j^I beta)`.
pub fn mmca_rates(state: &MmcaState, net: &MultiplexNetwork, params: &DynamicsParams) -> Vec<Rates> {
    let beta_a = params.beta_a();
    (0..state.nodes.len())
        .map(|i| {
            let r = net
                .awareness()
                .neighbors(i)
                .iter()
                .map(|&j| 1.0 - state.nodes[j].aware() * params.lambda)
                .product();
            let (mut q_a, mut q_u) = (1.0, 1.0);
            for &j in net.contact().neighbors(i) {
                let inf = state.nodes[j].infected();
                q_a *= 1.0 - inf * beta_a;
                q_u *= 1.0 - inf * params.beta_u;
            }
            Rates { r, q_a, q_u }
        })
        .collect()
}

/// One synchronous step of the probability iteration.
pub fn mmca_step(state: &MmcaState, net: &MultiplexNetwork, params: &DynamicsParams) -> MmcaState {
    let rates = mmca_rates(state, net, params);
    let (delta, mu) = (params.delta, params.mu);
    let nodes = state
        .nodes
        .iter()
        .zip(&rates)
        .zip(&state.omega)
        .map(|((p, &Rates { r, q_a, q_u }), &silent)| {
            if silent {
                NodeProbabilities {
                    p_us: p.p_us * q_u,
                    p_ui: p.p_us * (1.0 - q_u) + p.p_ui * (1.0 - mu),
                    p_ur: p.p_ur + p.p_ui * mu,
                    ..Default::default()
                }
            } else {
                NodeProbabilities {
                    p_as: p.p_as * (1.0 - delta) * q_a + p.p_us * (1.0 - r) * q_a,
                    p_us: p.p_as * delta * q_u + p.p_us * r * q_u,
                    p_ai: p.p_as * ((1.0 - delta) * (1.0 - q_a) + delta * (1.0 - q_u))
                        + p.p_us * (r * (1.0 - q_u) + (1.0 - r) * (1.0 - q_a))
                        + p.p_ai * (1.0 - mu),
                    p_ar: p.p_ai * (1.0 - delta) * mu + p.p_ar * (1.0 - delta) + p.p_ur * (1.0 - r),
                    p_ur: p.p_ai * delta * mu + p.p_ar * delta + p.p_ur * r,
                    p_ui: 0.0,
                }
            }
        })
        .collect();
    MmcaState {
        nodes,
        omega: state.omega.clone(),
        step: state.step + 1,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmcaTrajectory {
    pub counts: Vec<StateCounts>,
    pub final_state: MmcaState,
    /// Whether the infected mass fell below the tolerance before the cap.
    pub absorbed: bool,
}

/// Iterates from the uniform initial condition until the mean infection
/// probability drops below `tol` or `max_steps` is reached.
pub fn mmca_run(
    net: &MultiplexNetwork,
    omega_set: &[usize],
    params: &DynamicsParams,
    tol: f64,
    max_steps: usize,
) -> Result<MmcaTrajectory> {
    params.validate()?;
    let mut state = MmcaState::initial(net, omega_set, params)?;
    let mut counts = vec![state.counts()];
    let mut absorbed = counts[0].rho_i < tol;
    while !absorbed && state.step < max_steps {
        state = mmca_step(&state, net, params);
        let c = state.counts();
        absorbed = c.rho_i < tol;
        counts.push(c);
    }
    Ok(MmcaTrajectory {
        counts,
        final_state: state,
        absorbed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_multiplex, generate_ba, generate_ws, Graph};

    fn path3() -> MultiplexNetwork {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        build_multiplex(g.clone(), g).unwrap()
    }

    fn probs(p_us: f64, p_as: f64, p_ai: f64) -> NodeProbabilities {
        NodeProbabilities {
            p_us,
            p_as,
            p_ai,
            p_ur: 1.0 - p_us - p_as - p_ai,
            ..Default::default()
        }
    }

    #[test]
    fn rates_empty_awareness_is_one() {
        let net = path3();
        let state = MmcaState {
            nodes: vec![probs(1.0, 0.0, 0.0); 3],
            omega: vec![false; 3],
            step: 0,
        };
        let rates = mmca_rates(&state, &net, &DynamicsParams::default());
        assert!(rates.iter().all(|r| r.r == 1.0 && r.q_a == 1.0 && r.q_u == 1.0));
    }

    #[test]
    fn rates_single_infected_neighbor() {
        let net = build_multiplex(
            Graph::from_edges(2, []).unwrap(),
            Graph::from_edges(2, [(0, 1)]).unwrap(),
        )
        .unwrap();
        let state = MmcaState {
            nodes: vec![probs(0.0, 0.0, 1.0), probs(1.0, 0.0, 0.0)],
            omega: vec![false; 2],
            step: 0,
        };
        let params = DynamicsParams {
            beta_u: 1.0,
            gamma: 0.5,
            ..Default::default()
        };
        let rates = mmca_rates(&state, &net, &params);
        assert_eq!(rates[1].q_a, 0.5);
        assert_eq!(rates[1].q_u, 0.0);
    }

    #[test]
    fn rates_hand_computed_on_path() {
        // Middle node sees both ends; ends see only the middle.
        let net = path3();
        let state = MmcaState {
            nodes: vec![probs(0.5, 0.2, 0.1), probs(0.3, 0.3, 0.3), probs(0.6, 0.1, 0.25)],
            omega: vec![false; 3],
            step: 0,
        };
        let params = DynamicsParams {
            lambda: 0.4,
            beta_u: 0.6,
            gamma: 0.5,
            ..Default::default()
        };
        let rates = mmca_rates(&state, &net, &params);
        // Hand evaluation: P^A = (0.3, 0.6, 0.35), P^I = (0.1, 0.3, 0.25).
        let expected = [
            (0.76, 1.0 - 0.3 * 0.3, 0.82),
            (0.88 * 0.86, 0.97 * 0.925, 0.94 * 0.85),
            (0.76, 0.91, 0.82),
        ];
        for (got, (r, q_a, q_u)) in rates.iter().zip(expected) {
            assert!((got.r - r).abs() < 1e-15);
            assert!((got.q_a - q_a).abs() < 1e-15);
            assert!((got.q_u - q_u).abs() < 1e-15);
        }
        assert!((rates[1].r - 0.7568).abs() < 1e-15);
        assert!((rates[1].q_a - 0.89725).abs() < 1e-15);
    }

    #[test]
    fn recovered_mass_is_absorbing() {
        let net = path3();
        let state = MmcaState {
            nodes: vec![probs(0.0, 0.0, 0.0); 3],
            omega: vec![false, true, false],
            step: 0,
        };
        let next = mmca_step(&state, &net, &DynamicsParams::default());
        for p in &next.nodes {
            assert_eq!(p.recovered(), 1.0);
        }
    }

    #[test]
    fn isolated_recovery_substitution() {
        let net = path3();
        let mut state = MmcaState {
            nodes: vec![probs(1.0, 0.0, 0.0); 3],
            omega: vec![false; 3],
            step: 0,
        };
        state.nodes[0] = probs(0.0, 0.0, 1.0);
        let params = DynamicsParams {
            lambda: 0.0,
            delta: 0.0,
            beta_u: 0.0,
            mu: 0.3,
            ..Default::default()
        };
        let next = mmca_step(&state, &net, &params);
        assert!((next.nodes[0].p_ai - 0.7).abs() < 1e-15);
        assert!((next.nodes[0].p_ar - 0.3).abs() < 1e-15);
        assert_eq!(next.nodes[0].p_ur, 0.0);
    }

    #[test]
    fn silent_nodes_never_gain_awareness() {
        let net = build_multiplex(generate_ba(200, 4, 1).unwrap(), generate_ws(200, 4, 0.1, 2).unwrap()).unwrap();
        let params = DynamicsParams {
            lambda: 0.9,
            beta_u: 0.5,
            initial_infected_fraction: 0.05,
            ..Default::default()
        };
        let omega: Vec<usize> = (0..20).collect();
        let mut state = MmcaState::initial(&net, &omega, &params).unwrap();
        for _ in 0..200 {
            state = mmca_step(&state, &net, &params);
            for i in 0..20 {
                let p = state.nodes[i];
                assert_eq!((p.p_as, p.p_ai, p.p_ar), (0.0, 0.0, 0.0));
            }
        }
        assert!(state.nodes[0].p_ur > 0.0);
    }

    #[test]
    fn linearized_infection_factor() {
        // Near the threshold q_a ~ 1 - beta_a * sum_j b_ij eps.
        let net = build_multiplex(generate_ba(50, 2, 1).unwrap(), generate_ws(50, 4, 0.2, 3).unwrap()).unwrap();
        let eps = 1e-6;
        let params = DynamicsParams {
            beta_u: 0.8,
            gamma: 0.5,
            ..Default::default()
        };
        let state = MmcaState {
            nodes: vec![probs(1.0 - eps, 0.0, eps); 50],
            omega: vec![false; 50],
            step: 0,
        };
        for (i, rates) in mmca_rates(&state, &net, &params).iter().enumerate() {
            let k = net.contact().degree(i) as f64;
            assert!((rates.q_a - (1.0 - params.beta_a() * k * eps)).abs() < 1e-10);
        }
    }

    #[test]
    fn run_stops_once_infection_vanishes() {
        let net = build_multiplex(generate_ba(300, 4, 1).unwrap(), generate_ws(300, 4, 0.1, 2).unwrap()).unwrap();
        let params = DynamicsParams {
            beta_u: 0.5,
            initial_infected_fraction: 0.01,
            ..Default::default()
        };
        let t = mmca_run(&net, &[], &params, 1e-9, 100_000).unwrap();
        assert!(t.absorbed);
        let last = t.counts.last().unwrap();
        assert!(last.rho_i < 1e-9);
        assert!(last.rho_r > 0.5);
    }
}
