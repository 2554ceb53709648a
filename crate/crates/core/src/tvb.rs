//! Component-wise TVB minmod limiter on the nodal polynomials.

use crate::basis::ElementOperators;
use crate::equations::State;
use crate::mesh::{Grid2D, LineTopology, NodalField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvbConfig {
    /// Curvature constant: deviations below `M dx^2` are left alone.
    pub m: f64,
}

pub fn minmod(a: f64, b: f64, c: f64) -> f64 {
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

pub fn tvb_minmod(a: f64, b: f64, c: f64, bound: f64) -> f64 {
    if a.abs() <= bound {
        a
    } else {
        minmod(a, b, c)
    }
}

/// Limited half-jump across one direction of an element. `None` when the
/// polynomial passes the test unmodified.
fn limited_slope(
    mean: f64,
    face_lo: f64,
    face_hi: f64,
    mean_lo: f64,
    mean_hi: f64,
    bound: f64,
) -> (bool, f64) {
    // deviations at round-off level never trigger the limiter
    let bound = bound.max(1e-13 * (mean.abs() + mean_lo.abs() + mean_hi.abs()));
    let dev_hi = face_hi - mean;
    let dev_lo = mean - face_lo;
    let (d_plus, d_minus) = (mean_hi - mean, mean - mean_lo);
    let mod_hi = tvb_minmod(dev_hi, d_plus, d_minus, bound);
    let mod_lo = tvb_minmod(dev_lo, d_plus, d_minus, bound);
    let half = 0.5 * (dev_hi + dev_lo);
    if mod_hi == dev_hi && mod_lo == dev_lo {
        (false, half)
    } else {
        (true, minmod(half, d_plus, d_minus))
    }
}

fn means<const NV: usize>(field: &NodalField<NV>, weights: &[f64]) -> Vec<State<NV>> {
    (0..field.n_elements())
        .map(|e| crate::admissibility::weighted_mean(field.element(e), weights))
        .collect()
}

/// Limit a 1-D field; returns the number of (element, component) pairs
/// replaced by a linear profile.
pub fn tvb_limit_1d<const NV: usize>(
    ops: &ElementOperators,
    field: &mut NodalField<NV>,
    topology: LineTopology,
    dx: &[f64],
    cfg: &TvbConfig,
) -> usize {
    if ops.degree == 0 {
        return 0;
    }
    let avg = means(field, &ops.weights);
    let mut count = 0;
    for e in 0..field.n_elements() {
        let (l, r) = topology.neighbors(e);
        let bound = cfg.m * dx[e] * dx[e];
        let nodes = field.element_mut(e);
        for i in 0..NV {
            let vals: Vec<f64> = nodes.iter().map(|u| u[i]).collect();
            let (lo, hi) = ops.extrapolate_boundary(&vals);
            let (modified, slope) = limited_slope(avg[e][i], lo, hi, avg[l][i], avg[r][i], bound);
            if modified {
                count += 1;
                for (p, u) in nodes.iter_mut().enumerate() {
                    u[i] = avg[e][i] + (2.0 * ops.nodes[p] - 1.0) * slope;
                }
            }
        }
    }
    count
}

/// Tensor-product version: each direction is tested with the transverse
/// averages of the face traces.
pub fn tvb_limit_2d<const NV: usize>(
    ops: &ElementOperators,
    field: &mut NodalField<NV>,
    grid: &Grid2D,
    cfg: &TvbConfig,
) -> usize {
    if ops.degree == 0 {
        return 0;
    }
    let n = ops.n_nodes();
    let weights2: Vec<f64> = (0..n * n)
        .map(|k| ops.weights[k % n] * ops.weights[k / n])
        .collect();
    let avg = means(field, &weights2);
    let (tx, ty) = (grid.topology(0), grid.topology(1));
    let h = [grid.dx(), grid.dy()];
    let mut count = 0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let e = i + grid.nx * j;
            let (xl, xr) = tx.neighbors(i);
            let (yl, yr) = ty.neighbors(j);
            let nb = [
                (xl + grid.nx * j, xr + grid.nx * j),
                (i + grid.nx * yl, i + grid.nx * yr),
            ];
            let nodes = field.element_mut(e);
            for c in 0..NV {
                let mut modified = false;
                let mut slopes = [0.0; 2];
                for axis in 0..2 {
                    let (mut lo, mut hi) = (0.0, 0.0);
                    for line in 0..n {
                        let vals: Vec<f64> = (0..n)
                            .map(|p| {
                                let idx = if axis == 0 {
                                    p + n * line
                                } else {
                                    line + n * p
                                };
                                nodes[idx][c]
                            })
                            .collect();
                        let (a, b) = ops.extrapolate_boundary(&vals);
                        lo += ops.weights[line] * a;
                        hi += ops.weights[line] * b;
                    }
                    let bound = cfg.m * h[axis] * h[axis];
                    let (m, s) = limited_slope(
                        avg[e][c],
                        lo,
                        hi,
                        avg[nb[axis].0][c],
                        avg[nb[axis].1][c],
                        bound,
                    );
                    modified |= m;
                    slopes[axis] = s;
                }
                if modified {
                    count += 1;
                    for (k, u) in nodes.iter_mut().enumerate() {
                        let (xi, eta) = (ops.nodes[k % n], ops.nodes[k / n]);
                        u[c] = avg[e][c]
                            + (2.0 * xi - 1.0) * slopes[0]
                            + (2.0 * eta - 1.0) * slopes[1];
                    }
                }
            }
        }
    }
    count
}
