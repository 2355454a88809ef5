use std::io::Write;

use serde::Serialize;

use super::spectral::{leading_eigenvalue, HMatrix};
use crate::dynamics::{omega_mask, DynamicsParams};
use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, MultiplexNetwork};

/// Starting awareness of the disease-free iteration when none is given.
const DEFAULT_INITIAL_AWARENESS: f64 = 0.5;

/// Awareness level of each node at the disease-free fixed point, starting
/// from `p_as = 0.5` on every ordinary node. Silent nodes report 0.
pub fn uau_steady_state(
    net: &MultiplexNetwork,
    omega_set: &[usize],
    params: &DynamicsParams,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    uau_steady_state_from(net, omega_set, params, DEFAULT_INITIAL_AWARENESS, tol, max_iter)
}

/// Iterates `p_as <- p_as (1 - delta) + p_us (1 - r)` with
/// `r_i = prod_j (1 - a_ji P_j^A lambda)` until the max-norm change is below
/// `tol`.
pub fn uau_steady_state_from(
    net: &MultiplexNetwork,
    omega_set: &[usize],
    params: &DynamicsParams,
    initial: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    if !(0.0..=1.0).contains(&initial) {
        return Err(invalid(format!("initial awareness {initial} outside [0, 1]")));
    }
    let omega = omega_mask(net.node_count(), omega_set)?;
    let awareness = net.awareness();
    let mut pa: Vec<f64> = omega.iter().map(|&s| if s { 0.0 } else { initial }).collect();
    let mut next = pa.clone();
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        residual = 0.0;
        for i in 0..pa.len() {
            if omega[i] {
                continue;
            }
            let r: f64 = awareness
                .neighbors(i)
                .iter()
                .map(|&j| 1.0 - pa[j] * params.lambda)
                .product();
            let v = pa[i] * (1.0 - params.delta) + (1.0 - pa[i]) * (1.0 - r);
            residual = residual.max((v - pa[i]).abs());
            next[i] = v;
        }
        std::mem::swap(&mut pa, &mut next);
        if residual < tol {
            return Ok(pa);
        }
    }
    Err(Error::FixedPointNoConvergence {
        iterations: max_iter,
        residual,
        last: pa,
    })
}

/// `h_ij = [1 - (1 - gamma) P_i^A] b_ji`.
pub fn build_h_matrix(p_a: &[f64], contact: &Graph, gamma: f64) -> Result<HMatrix> {
    if p_a.len() != contact.node_count() {
        return Err(invalid(format!(
            "{} awareness values for {} nodes",
            p_a.len(),
            contact.node_count()
        )));
    }
    if let Some(v) = p_a.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(invalid(format!("awareness probability {v} outside [0, 1]")));
    }
    let factors = p_a.iter().map(|&p| 1.0 - (1.0 - gamma) * p).collect();
    Ok(HMatrix::new(factors, contact.clone()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub gamma: f64,
    pub lambda: f64,
    pub delta: f64,
    pub mu: f64,
    pub lambda_max_h: f64,
    pub beta_c: f64,
    #[serde(skip)]
    pub p_a: Vec<f64>,
}

/// `beta_c^U = mu / Lambda_max(H)`, with `H` built from the disease-free
/// awareness fixed point.
pub fn epidemic_threshold(
    net: &MultiplexNetwork,
    omega_set: &[usize],
    params: &DynamicsParams,
    tol: f64,
    max_iter: usize,
) -> Result<ThresholdReport> {
    if !(params.mu > 0.0 && params.mu <= 1.0) {
        return Err(invalid(format!("mu={} outside (0, 1]", params.mu)));
    }
    let p_a = uau_steady_state(net, omega_set, params, tol, max_iter)?;
    let h = build_h_matrix(&p_a, net.contact(), params.gamma)?;
    let lambda_max_h = leading_eigenvalue(&h, tol, max_iter)?;
    Ok(ThresholdReport {
        gamma: params.gamma,
        lambda: params.lambda,
        delta: params.delta,
        mu: params.mu,
        lambda_max_h,
        beta_c: params.mu / lambda_max_h,
        p_a,
    })
}

/// CSV with columns `gamma,lambda,delta,mu,lambda_max_H,beta_c`.
pub fn write_threshold_csv<'a, W, I>(out: W, reports: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a ThresholdReport>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["gamma", "lambda", "delta", "mu", "lambda_max_H", "beta_c"])?;
    for r in reports {
        w.write_record([r.gamma, r.lambda, r.delta, r.mu, r.lambda_max_h, r.beta_c].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Per-node awareness dump: `node,p_a`.
pub fn write_fixed_point_csv<W: Write>(out: W, p_a: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "p_a"])?;
    for (i, p) in p_a.iter().enumerate() {
        w.write_record([i.to_string(), p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
