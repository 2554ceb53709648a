//! Reference element operators on `[0, 1]`.
//!
//! Solution points are the Gauss-Legendre nodes, the solution is represented
//! by its nodal values and the flux correction uses the right/left Radau
//! polynomials (the choice that makes FR coincide with nodal DG).

use crate::error::{Result, SolverError};

/// Highest polynomial degree the solver supports.
pub const MAX_DEGREE: usize = 4;

/// Immutable reference element data for degree `N`.
#[derive(Debug, Clone)]
pub struct ElementOperators {
    pub degree: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Row-major `(N+1) x (N+1)`, `diff[p][q] = l_q'(xi_p)`.
    pub diff: Vec<Vec<f64>>,
    /// Derivative of the left correction function (g_L(0) = 1, g_L(1) = 0).
    pub gl_prime: Vec<f64>,
    /// Derivative of the right correction function (g_R(0) = 0, g_R(1) = 1).
    pub gr_prime: Vec<f64>,
    /// `l_p(0)`
    pub v_left: Vec<f64>,
    /// `l_p(1)`
    pub v_right: Vec<f64>,
    bary: Vec<f64>,
}

/// Legendre polynomial `P_n(x)` and its derivative on `[-1, 1]`.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    let (mut dp_prev, mut dp) = (0.0, 1.0);
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        let dp_next = dp_prev + (2.0 * kf + 1.0) * p;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    (p, dp)
}

/// Gauss-Legendre nodes and weights with `n` points mapped to `[0, 1]`.
///
/// The node set is symmetric bit-for-bit: `nodes[n-1-i] == 1 - nodes[i]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "at least one quadrature point");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Newton from the Chebyshev-like initial guess, descending roots
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        // z is the i-th largest root: its mirror -z is the i-th smallest
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    let mut nodes = vec![0.0; n];
    let weights: Vec<f64> = w.iter().map(|wi| 0.5 * wi).collect();
    for i in 0..half {
        // the upper node lies in [1/2, 1], so both subtractions are exact
        nodes[n - 1 - i] = 0.5 * (1.0 + x[n - 1 - i]);
        nodes[i] = 1.0 - nodes[n - 1 - i];
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.5;
    }
    (nodes, weights)
}

fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(j, xj)| {
            let prod: f64 = nodes
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, xk)| xj - xk)
                .product();
            1.0 / prod
        })
        .collect()
}

impl ElementOperators {
    pub fn new(degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(SolverError::UnsupportedDegree(degree));
        }
        let n = degree + 1;
        let (nodes, weights) = gauss_legendre(n);
        let bary = barycentric_weights(&nodes);

        let mut diff = vec![vec![0.0; n]; n];
        for p in 0..n {
            let mut row_sum = 0.0;
            for q in 0..n {
                if p != q {
                    diff[p][q] = (bary[q] / bary[p]) / (nodes[p] - nodes[q]);
                    row_sum += diff[p][q];
                }
            }
            diff[p][p] = -row_sum;
        }

        // Radau correction functions written on x = 2 xi - 1
        let sign = if (degree + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut gl_prime = vec![0.0; n];
        let mut gr_prime = vec![0.0; n];
        for p in 0..n {
            let x = 2.0 * nodes[p] - 1.0;
            let (_, d_hi) = legendre(degree + 1, x);
            let (_, d_lo) = legendre(degree, x);
            gl_prime[p] = 2.0 * 0.5 * sign * (d_hi - d_lo);
            gr_prime[p] = 2.0 * 0.5 * (d_hi + d_lo);
        }

        let mut ops = ElementOperators {
            degree,
            nodes,
            weights,
            diff,
            gl_prime,
            gr_prime,
            v_left: Vec::new(),
            v_right: Vec::new(),
            bary,
        };
        ops.v_left = ops.lagrange_at(0.0);
        ops.v_right = ops.lagrange_at(1.0);
        Ok(ops)
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.degree + 1
    }

    /// Values `l_q(x)` of every Lagrange basis polynomial at `x`.
    pub fn lagrange_at(&self, x: f64) -> Vec<f64> {
        if let Some(hit) = self.nodes.iter().position(|&xi| xi == x) {
            let mut out = vec![0.0; self.n_nodes()];
            out[hit] = 1.0;
            return out;
        }
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.bary)
            .map(|(xi, b)| b / (x - xi))
            .collect();
        let denom: f64 = terms.iter().sum();
        terms.iter().map(|t| t / denom).collect()
    }

    /// Interpolation matrix from the solution points to `points`.
    pub fn interpolation_matrix(&self, points: &[f64]) -> Vec<Vec<f64>> {
        points.iter().map(|&x| self.lagrange_at(x)).collect()
    }

    /// Evaluate the nodal polynomial at `xi = 0` and `xi = 1`.
    pub fn extrapolate_boundary(&self, coeffs: &[f64]) -> (f64, f64) {
        debug_assert_eq!(coeffs.len(), self.n_nodes());
        let left = self.v_left.iter().zip(coeffs).map(|(v, c)| v * c).sum();
        let right = self.v_right.iter().zip(coeffs).map(|(v, c)| v * c).sum();
        (left, right)
    }

    /// Cell average of nodal values (GL quadrature).
    pub fn average(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}
