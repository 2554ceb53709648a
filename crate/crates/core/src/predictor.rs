//! Approximate Lax-Wendroff predictor: element-local time averages of the
//! flux and source.
//!
//! With `g^(k)` an approximation of `dt^k d^k g / dt^k`, the time averages are
//! `F = sum_{m=0}^{N} f^(m) / (m+1)!` and likewise for the source. Each
//! `f^(k)` is a central finite difference in (scaled) time of `f` along the
//! truncated Taylor path `u + sum_{j<=k} tau^j / j! u^(j)`, and
//! `u^(k) = -dt/dx D f^(k-1) + dt s^(k-1)` (summed over directions).

use crate::basis::ElementOperators;
use crate::equations::{ConservationLaw, Direction, State};

const D1_O2: [(f64, f64); 2] = [(-1.0, -0.5), (1.0, 0.5)];
const D1_O4: [(f64, f64); 4] = [
    (-2.0, 1.0 / 12.0),
    (-1.0, -8.0 / 12.0),
    (1.0, 8.0 / 12.0),
    (2.0, -1.0 / 12.0),
];
const D2_O2: [(f64, f64); 3] = [(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)];
const D2_O4: [(f64, f64); 5] = [
    (-2.0, -1.0 / 12.0),
    (-1.0, 16.0 / 12.0),
    (0.0, -30.0 / 12.0),
    (1.0, 16.0 / 12.0),
    (2.0, -1.0 / 12.0),
];
const D3_O2: [(f64, f64); 4] = [(-2.0, -0.5), (-1.0, 1.0), (1.0, -1.0), (2.0, 0.5)];
const D4_O2: [(f64, f64); 5] = [
    (-2.0, 1.0),
    (-1.0, -4.0),
    (0.0, 6.0),
    (1.0, -4.0),
    (2.0, 1.0),
];

/// `(tau, weight)` pairs approximating the `order`-th derivative at `tau = 0`
/// with unit spacing, accurate enough for a degree `degree` scheme.
///
/// Accuracy rule: the stencil for derivative `k` has truncation `O(h^{2q})`
/// with `k + 2q >= degree + 1`, so every `f^(k)` is accurate to
/// `O(dt^{degree+1})`.
pub fn time_stencil(degree: usize, order: usize) -> &'static [(f64, f64)] {
    match (order, degree) {
        (1, 0..=2) => &D1_O2,
        (1, _) => &D1_O4,
        (2, 0..=3) => &D2_O2,
        (2, _) => &D2_O4,
        (3, _) => &D3_O2,
        (4, _) => &D4_O2,
        _ => panic!("no time stencil for derivative order {order}"),
    }
}

/// Point on the truncated Taylor path `u + sum_{j=1}^{k} tau^j/j! u^(j)`.
#[inline]
pub fn taylor_state<const NV: usize>(u: &State<NV>, derivs: &[State<NV>], tau: f64) -> State<NV> {
    let mut out = *u;
    let mut coeff = 1.0;
    for (j, d) in derivs.iter().enumerate() {
        coeff *= tau / (j as f64 + 1.0);
        for i in 0..NV {
            out[i] += coeff * d[i];
        }
    }
    out
}

/// Apply the differentiation matrix along `axis` of a tensor-product element.
pub fn apply_diff<const NV: usize>(
    ops: &ElementOperators,
    dim: usize,
    axis: usize,
    input: &[State<NV>],
    out: &mut [State<NV>],
) {
    let n = ops.n_nodes();
    let lines = if dim == 1 { 1 } else { n };
    for line in 0..lines {
        for p in 0..n {
            let mut acc = [0.0; NV];
            for r in 0..n {
                let d = ops.diff[p][r];
                let src = if axis == 0 {
                    &input[r + n * line]
                } else {
                    &input[line + n * r]
                };
                for i in 0..NV {
                    acc[i] += d * src[i];
                }
            }
            let idx = if axis == 0 {
                p + n * line
            } else {
                line + n * p
            };
            out[idx] = acc;
        }
    }
}

/// Element-local time averages.
#[derive(Debug, Clone)]
pub struct TimeAverages<const NV: usize> {
    /// Time-averaged flux per direction (only the first `dim` entries are used).
    pub flux: [Vec<State<NV>>; 2],
    /// Time-averaged source (empty when the law has no source).
    pub source: Vec<State<NV>>,
    /// `s(u^n, x, t^n)` at the nodes (empty when the law has no source).
    pub source_now: Vec<State<NV>>,
}

impl<const NV: usize> TimeAverages<NV> {
    pub fn new(n_nodes: usize, dim: usize, with_source: bool) -> Self {
        let s = if with_source { n_nodes } else { 0 };
        Self {
            flux: [
                vec![[0.0; NV]; n_nodes],
                vec![[0.0; NV]; if dim == 2 { n_nodes } else { 0 }],
            ],
            source: vec![[0.0; NV]; s],
            source_now: vec![[0.0; NV]; s],
        }
    }
}

/// Per-element geometry needed by the predictor.
#[derive(Debug, Clone, Copy)]
pub struct PredictorInput<'a> {
    pub dt: f64,
    /// Element widths per direction.
    pub dx: [f64; 2],
    /// Physical coordinates of the element nodes.
    pub coords: &'a [[f64; 2]],
    pub time: f64,
}

/// Scratch buffers, reusable across elements.
#[derive(Debug, Clone)]
pub struct PredictorWorkspace<const NV: usize> {
    derivs: Vec<Vec<State<NV>>>,
    flux_k: [Vec<State<NV>>; 2],
    source_k: Vec<State<NV>>,
    flux_0: [Vec<State<NV>>; 2],
    tmp: Vec<State<NV>>,
    path: Vec<State<NV>>,
}

impl<const NV: usize> PredictorWorkspace<NV> {
    pub fn new(n_nodes: usize, degree: usize) -> Self {
        Self {
            derivs: vec![vec![[0.0; NV]; degree]; n_nodes],
            flux_k: [vec![[0.0; NV]; n_nodes], vec![[0.0; NV]; n_nodes]],
            source_k: vec![[0.0; NV]; n_nodes],
            flux_0: [vec![[0.0; NV]; n_nodes], vec![[0.0; NV]; n_nodes]],
            tmp: vec![[0.0; NV]; n_nodes],
            path: Vec::with_capacity(degree),
        }
    }
}

/// Compute the time-averaged flux and source of one element.
///
/// `u` holds the nodal states in tensor order (`p + (N+1) q`).
pub fn predict_time_averages<L, const NV: usize>(
    law: &L,
    ops: &ElementOperators,
    dim: usize,
    u: &[State<NV>],
    input: &PredictorInput<'_>,
    ws: &mut PredictorWorkspace<NV>,
    out: &mut TimeAverages<NV>,
) where
    L: ConservationLaw<NV> + ?Sized,
{
    predict_with_terms(law, ops, dim, u, input, ws, out, |_, _, _| {});
}

/// As [`predict_time_averages`], also reporting every `f^(k)`, `k >= 1`, as
/// `(k, node, [f^(k) along x, f^(k) along y])`.
#[allow(clippy::too_many_arguments)]
pub fn predict_with_terms<L, const NV: usize>(
    law: &L,
    ops: &ElementOperators,
    dim: usize,
    u: &[State<NV>],
    input: &PredictorInput<'_>,
    ws: &mut PredictorWorkspace<NV>,
    out: &mut TimeAverages<NV>,
    mut on_flux_term: impl FnMut(usize, usize, &[State<NV>; 2]),
) where
    L: ConservationLaw<NV> + ?Sized,
{
    let degree = ops.degree;
    let n_nodes = u.len();
    let with_source = law.has_source();
    let dt = input.dt;

    // m = 0 terms
    for (node, state) in u.iter().enumerate() {
        for axis in 0..dim {
            let f = law.flux(state, Direction::from_axis(axis));
            ws.flux_0[axis][node] = f;
            ws.flux_k[axis][node] = f;
            out.flux[axis][node] = f;
        }
        if with_source {
            let s = law.source(state, input.coords[node], input.time);
            ws.source_k[node] = s;
            out.source_now[node] = s;
            out.source[node] = s;
        }
    }

    let mut factorial = 1.0;
    for k in 1..=degree {
        factorial *= (k + 1) as f64;

        // u^(k) = -dt/dx D f^(k-1) + dt s^(k-1)
        for node in 0..n_nodes {
            ws.derivs[node][k - 1] = if with_source {
                let s = ws.source_k[node];
                std::array::from_fn(|i| dt * s[i])
            } else {
                [0.0; NV]
            };
        }
        for axis in 0..dim {
            apply_diff(ops, dim, axis, &ws.flux_k[axis], &mut ws.tmp);
            let scale = -dt / input.dx[axis];
            for node in 0..n_nodes {
                let d = &mut ws.derivs[node][k - 1];
                for i in 0..NV {
                    d[i] += scale * ws.tmp[node][i];
                }
            }
        }

        let stencil = time_stencil(degree, k);
        for node in 0..n_nodes {
            let mut fk = [[0.0; NV]; 2];
            let mut sk = [0.0; NV];
            ws.path.clear();
            ws.path.extend_from_slice(&ws.derivs[node][..k]);
            for &(tau, weight) in stencil {
                if tau == 0.0 {
                    for axis in 0..dim {
                        let f = &ws.flux_0[axis][node];
                        for i in 0..NV {
                            fk[axis][i] += weight * f[i];
                        }
                    }
                    if with_source {
                        let s = &out.source_now[node];
                        for i in 0..NV {
                            sk[i] += weight * s[i];
                        }
                    }
                    continue;
                }
                let state = taylor_state(&u[node], &ws.path, tau);
                for axis in 0..dim {
                    let f = law.flux(&state, Direction::from_axis(axis));
                    for i in 0..NV {
                        fk[axis][i] += weight * f[i];
                    }
                }
                if with_source {
                    let s = law.source(&state, input.coords[node], input.time + tau * dt);
                    for i in 0..NV {
                        sk[i] += weight * s[i];
                    }
                }
            }
            on_flux_term(k, node, &fk);
            for axis in 0..dim {
                ws.flux_k[axis][node] = fk[axis];
                let acc = &mut out.flux[axis][node];
                for i in 0..NV {
                    acc[i] += fk[axis][i] / factorial;
                }
            }
            if with_source {
                ws.source_k[node] = sk;
                let acc = &mut out.source[node];
                for i in 0..NV {
                    acc[i] += sk[i] / factorial;
                }
            }
        }
    }
}
