use crate::error::{invalid, Error, Result};
use crate::graph::Graph;

/// A square matrix that can be applied to a vector.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    /// `y = A x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(invalid(format!(
                "dense matrix of order {n} needs {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n.max(1))
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (yi, row) in y.iter_mut().zip(self.rows()) {
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

/// `h_ij = [1 - (1 - gamma) P_i^A] b_ji`.
///
/// Stored as a per-row factor over the contact adjacency rather than as a
/// dense array; with an undirected contact layer `b_ji = b_ij`, so row `i` is
/// non-zero exactly on the contact neighbors of `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct HMatrix {
    row_factor: Vec<f64>,
    contact: Graph,
}

impl HMatrix {
    pub(crate) fn new(row_factor: Vec<f64>, contact: Graph) -> Self {
        debug_assert_eq!(row_factor.len(), contact.node_count());
        Self { row_factor, contact }
    }

    pub fn row_factor(&self) -> &[f64] {
        &self.row_factor
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if self.contact.has_edge(j, i) {
            self.row_factor[i]
        } else {
            0.0
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.row_factor.len();
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            for &j in self.contact.neighbors(i) {
                m.set(i, j, self.row_factor[i]);
            }
        }
        m
    }
}

impl LinearOperator for HMatrix {
    fn dim(&self) -> usize {
        self.row_factor.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let s: f64 = self.contact.neighbors(i).iter().map(|&j| x[j]).sum();
            *yi = self.row_factor[i] * s;
        }
    }
}

/// Result of one power-iteration attempt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerOutcome {
    Converged { eigenvalue: f64, iterations: usize },
    /// The Rayleigh quotient settled while the iterate kept flipping between
    /// directions, the signature of `-Lambda` sharing the top modulus.
    Oscillating { estimate: f64, iterations: usize },
    Exhausted { estimate: f64, iterations: usize },
}

/// Vector movement above which a settled Rayleigh quotient is treated as an
/// oscillation rather than convergence.
const OSCILLATION_STEP: f64 = 1e-2;

/// Power iteration on `A + shift I` from the all-ones vector. Stops when two
/// successive Rayleigh quotients differ by less than `tol` (relative to
/// `max(1, |estimate|)`) and the residual `|A x - estimate x|` is below the
/// same bound. The returned eigenvalue has the shift removed.
pub fn power_iteration<A: LinearOperator + ?Sized>(
    a: &A,
    shift: f64,
    tol: f64,
    max_iter: usize,
) -> PowerOutcome {
    let n = a.dim();
    if n == 0 {
        return PowerOutcome::Converged {
            eigenvalue: 0.0,
            iterations: 0,
        };
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut y = vec![0.0; n];
    let mut previous: Option<f64> = None;
    let mut estimate = 0.0;

    for it in 1..=max_iter {
        a.apply(&x, &mut y);
        if shift != 0.0 {
            for (yi, xi) in y.iter_mut().zip(&x) {
                *yi += shift * xi;
            }
        }
        estimate = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            // A x = 0 from a positive start: the matrix annihilates the
            // non-negative cone, so the spectral radius is zero.
            return PowerOutcome::Converged {
                eigenvalue: 0.0,
                iterations: it,
            };
        }
        let residual = x
            .iter()
            .zip(&y)
            .map(|(xi, yi)| (yi - estimate * xi) * (yi - estimate * xi))
            .sum::<f64>()
            .sqrt();
        let mut step = 0.0f64;
        for (xi, yi) in x.iter_mut().zip(&y) {
            let next = yi / norm;
            step += (next - *xi) * (next - *xi);
            *xi = next;
        }
        if let Some(prev) = previous {
            let scale = tol * estimate.abs().max(1.0);
            if (estimate - prev).abs() < scale {
                if step.sqrt() > OSCILLATION_STEP {
                    return PowerOutcome::Oscillating {
                        estimate: estimate - shift,
                        iterations: it,
                    };
                }
                // A settled quotient alone can be a momentary pause when the
                // subdominant eigenvalues are complex; the residual is not.
                if residual < scale {
                    return PowerOutcome::Converged {
                        eigenvalue: estimate - shift,
                        iterations: it,
                    };
                }
            }
        }
        previous = Some(estimate);
    }
    PowerOutcome::Exhausted {
        estimate: estimate - shift,
        iterations: max_iter,
    }
}

/// Largest eigenvalue of a non-negative matrix by power iteration, retried
/// with a unit diagonal shift when the plain iteration oscillates.
pub fn leading_eigenvalue<A: LinearOperator + ?Sized>(a: &A, tol: f64, max_iter: usize) -> Result<f64> {
    let mut used = 0;
    for shift in [0.0, 1.0] {
        match power_iteration(a, shift, tol, max_iter - used) {
            PowerOutcome::Converged { eigenvalue, .. } => return Ok(eigenvalue),
            PowerOutcome::Oscillating { iterations, .. } => used += iterations,
            PowerOutcome::Exhausted { estimate, iterations } => {
                return Err(Error::EigenNoConvergence {
                    iterations: used + iterations,
                    estimate,
                })
            }
        }
        if used >= max_iter {
            break;
        }
    }
    Err(Error::EigenNoConvergence {
        iterations: used,
        estimate: f64::NAN,
    })
}
