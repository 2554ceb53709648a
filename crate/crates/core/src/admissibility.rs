//! Admissibility preservation.
//!
//! The cell average update of the scheme equals a convex combination of
//! fictitious first-order updates at the solution points. The interior
//! ones are admissible under a finite volume CFL condition; the two next to
//! the element faces involve the high-order time-averaged flux, which is
//! therefore blended with a first-order flux until those updates are
//! admissible too. The time-averaged source is blended with the pointwise
//! source in the same way, and a final scaling limiter pulls the solution
//! points towards the (admissible) cell average.

use serde::{Deserialize, Serialize};

use crate::equations::{ConservationLaw, Constraint, Direction, State};
use crate::error::Result;
use crate::fr::rusanov_flux;

/// How to find the blending coefficient for a non-concave constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonConcaveSolver {
    /// Bracketed bisection on the exact constraint.
    Bisection,
    /// Apply the concave closed form anyway (no guarantee; for comparison).
    ConcaveFormula,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityConfig {
    /// Blending targets `P_k >= fraction * P_k(low order)`.
    pub tolerance_fraction: f64,
    /// Guard added to the denominator of the closed-form blending coefficient.
    pub division_guard: f64,
    /// Shrink the time step so that every split cell-average update satisfies
    /// the finite volume CFL condition.
    pub strict_cfl: bool,
    pub nonconcave_solver: NonConcaveSolver,
    /// Scaling limiter floor: `min(scaling_floor, scaling_fraction * P_k(mean))`.
    pub scaling_floor: f64,
    pub scaling_fraction: f64,
}

impl Default for AdmissibilityConfig {
    fn default() -> Self {
        Self {
            tolerance_fraction: 0.1,
            division_guard: 1e-13,
            strict_cfl: false,
            nonconcave_solver: NonConcaveSolver::Bisection,
            scaling_floor: 1e-10,
            scaling_fraction: 0.1,
        }
    }
}

#[inline]
fn blend<const NV: usize>(theta: f64, high: &State<NV>, low: &State<NV>) -> State<NV> {
    std::array::from_fn(|i| theta * high[i] + (1.0 - theta) * low[i])
}

/// Closed-form blending coefficient, valid for concave constraints:
/// `min(|target - P_low| / (|P_high - P_low| + guard), 1)`.
///
/// Returns exactly 1 when the high-order value already meets the target.
pub fn blend_theta_concave(p_high: f64, p_low: f64, target: f64, guard: f64) -> f64 {
    if p_high >= target {
        return 1.0;
    }
    if !p_high.is_finite() {
        return 0.0;
    }
    ((target - p_low).abs() / ((p_high - p_low).abs() + guard)).min(1.0)
}

const ROOT_SCAN: usize = 64;
const ROOT_TOL: f64 = 1e-12;

/// Largest `theta` such that `P(t u_high + (1 - t) u_low) >= target` for every
/// `t` in `[0, theta]`.
///
/// Only the admissible interval attached to `u_low` counts: a non-concave
/// constraint such as a determinant can turn positive again on states that
/// are far outside the admissible set. A coarse upward scan brackets the
/// first crossing, which bisection then refines; the returned value always
/// satisfies the constraint.
pub fn blend_theta_root<const NV: usize>(
    eval: impl Fn(&State<NV>) -> f64,
    u_high: &State<NV>,
    u_low: &State<NV>,
    target: f64,
) -> f64 {
    let ok = |theta: f64| eval(&blend(theta, u_high, u_low)) >= target;
    if !ok(0.0) {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = None;
    for j in 1..=ROOT_SCAN {
        let theta = j as f64 / ROOT_SCAN as f64;
        if ok(theta) {
            lo = theta;
        } else {
            hi = Some(theta);
            break;
        }
    }
    let Some(mut hi) = hi else {
        return 1.0;
    };
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn constraint_theta<const NV: usize>(
    constraint: &Constraint<NV>,
    u_high: &State<NV>,
    u_low: &State<NV>,
    target: f64,
    cfg: &AdmissibilityConfig,
) -> f64 {
    let p_high = (constraint.eval)(u_high);
    if p_high >= target {
        return 1.0;
    }
    if constraint.concave || cfg.nonconcave_solver == NonConcaveSolver::ConcaveFormula {
        let p_low = (constraint.eval)(u_low);
        blend_theta_concave(p_high, p_low, target, cfg.division_guard)
    } else {
        blend_theta_root(constraint.eval, u_high, u_low, target)
    }
}

/// First-order fluxes `f_{p+1/2}` between consecutive solution points of a line.
pub fn interior_fluxes<L, const NV: usize>(
    law: &L,
    nodes: &[State<NV>],
    dir: Direction,
) -> Result<Vec<State<NV>>>
where
    L: ConservationLaw<NV> + ?Sized,
{
    nodes
        .windows(2)
        .map(|w| rusanov_flux(law, &w[0], &w[1], dir))
        .collect()
}

/// Fictitious finite volume updates of one line of solution points,
/// `u_p - dt/(w_p dx) (G_{p+1/2} - G_{p-1/2})` with `G` the interior
/// first-order fluxes closed by the two face fluxes.
pub fn fictitious_updates<const NV: usize>(
    nodes: &[State<NV>],
    weights: &[f64],
    interior: &[State<NV>],
    face_left: &State<NV>,
    face_right: &State<NV>,
    dt: f64,
    dx: f64,
) -> Vec<State<NV>> {
    let n = nodes.len();
    debug_assert_eq!(interior.len() + 1, n);
    (0..n)
        .map(|p| {
            let g_minus = if p == 0 { face_left } else { &interior[p - 1] };
            let g_plus = if p + 1 == n { face_right } else { &interior[p] };
            let c = dt / (weights[p] * dx);
            std::array::from_fn(|i| nodes[p][i] - c * (g_plus[i] - g_minus[i]))
        })
        .collect()
}

/// One face-adjacent fictitious update, affine in the face flux:
/// `node + sign * coeff * (F - interior_flux)`.
#[derive(Debug, Clone, Copy)]
pub struct FaceSide<const NV: usize> {
    pub node: State<NV>,
    pub interior_flux: State<NV>,
    pub coeff: f64,
    pub sign: f64,
}

impl<const NV: usize> FaceSide<NV> {
    /// The last solution point of the element to the left of the face.
    pub fn left_of_face(
        node: State<NV>,
        interior_flux: State<NV>,
        dt: f64,
        w: f64,
        dx: f64,
    ) -> Self {
        Self {
            node,
            interior_flux,
            coeff: dt / (w * dx),
            sign: -1.0,
        }
    }

    /// The first solution point of the element to the right of the face.
    pub fn right_of_face(
        node: State<NV>,
        interior_flux: State<NV>,
        dt: f64,
        w: f64,
        dx: f64,
    ) -> Self {
        Self {
            node,
            interior_flux,
            coeff: dt / (w * dx),
            sign: 1.0,
        }
    }

    #[inline]
    pub fn update(&self, face_flux: &State<NV>) -> State<NV> {
        let c = self.sign * self.coeff;
        std::array::from_fn(|i| self.node[i] + c * (face_flux[i] - self.interior_flux[i]))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FluxLimitOutcome<const NV: usize> {
    pub flux: State<NV>,
    /// Product of the per-constraint blending coefficients.
    pub theta: f64,
    /// The first-order updates themselves were inadmissible (CFL too large);
    /// the first-order flux was used.
    pub low_order_inadmissible: bool,
}

/// Blend the high-order interface flux with the first-order one, constraint
/// by constraint, until every face-adjacent fictitious update satisfies
/// `P_k >= fraction * P_k(first-order update)`.
pub fn limit_interface_flux<L, const NV: usize>(
    law: &L,
    high: &State<NV>,
    low: &State<NV>,
    sides: &[FaceSide<NV>],
    cfg: &AdmissibilityConfig,
) -> FluxLimitOutcome<NV>
where
    L: ConservationLaw<NV> + ?Sized,
{
    let constraints = law.constraints();
    let mut out = FluxLimitOutcome {
        flux: *high,
        theta: 1.0,
        low_order_inadmissible: false,
    };
    if constraints.is_empty() || sides.is_empty() {
        return out;
    }
    let mut low_updates = [[0.0; NV]; 2];
    for (slot, side) in low_updates.iter_mut().zip(sides) {
        *slot = side.update(low);
        if law.violated_constraint(slot).is_some() {
            out.flux = *low;
            out.theta = 0.0;
            out.low_order_inadmissible = true;
            return out;
        }
    }
    for constraint in constraints {
        let mut theta: f64 = 1.0;
        for (side, u_low) in sides.iter().zip(&low_updates) {
            let target = cfg.tolerance_fraction * (constraint.eval)(u_low);
            let u_high = side.update(&out.flux);
            theta = theta.min(constraint_theta(constraint, &u_high, u_low, target, cfg));
        }
        if theta < 1.0 {
            out.flux = blend(theta, &out.flux, low);
            out.theta *= theta;
        }
    }
    out
}

/// Weighted mean of nodal states.
pub fn weighted_mean<const NV: usize>(nodes: &[State<NV>], weights: &[f64]) -> State<NV> {
    let mut m = [0.0; NV];
    for (u, w) in nodes.iter().zip(weights) {
        for i in 0..NV {
            m[i] += w * u[i];
        }
    }
    m
}

/// Blend the time-averaged source of one element with `s(u^n)` so that
/// `mean + dt_split * mean(S)` is admissible. Returns the blending
/// coefficient when limiting was applied.
///
/// Fails when the first-order source update `mean + dt_split * mean(s)` is
/// itself inadmissible: the time step is too large for the source.
pub fn limit_source<L, const NV: usize>(
    law: &L,
    source: &mut [State<NV>],
    source_now: &[State<NV>],
    weights: &[f64],
    mean: &State<NV>,
    dt_split: f64,
    cfg: &AdmissibilityConfig,
) -> Result<Option<f64>>
where
    L: ConservationLaw<NV> + ?Sized,
{
    let constraints = law.constraints();
    if constraints.is_empty() {
        return Ok(None);
    }
    let s_bar = weighted_mean(source_now, weights);
    let u_low: State<NV> = std::array::from_fn(|i| mean[i] + dt_split * s_bar[i]);
    law.check_admissible(&u_low, "source_low_order")?;

    let mut total = 1.0;
    for constraint in constraints {
        let big_s_bar = weighted_mean(source, weights);
        let u_high: State<NV> = std::array::from_fn(|i| mean[i] + dt_split * big_s_bar[i]);
        let target = cfg.tolerance_fraction * (constraint.eval)(&u_low);
        let theta = constraint_theta(constraint, &u_high, &u_low, target, cfg);
        if theta < 1.0 {
            for (s, s_now) in source.iter_mut().zip(source_now) {
                *s = blend(theta, s, s_now);
            }
            total *= theta;
        }
    }
    Ok(if total < 1.0 { Some(total) } else { None })
}

/// Squeeze the solution points of one element towards its mean until every
/// constraint holds at every point. Returns the number of points that were
/// below a floor.
pub fn scaling_limiter<L, const NV: usize>(
    law: &L,
    nodes: &mut [State<NV>],
    weights: &[f64],
    cfg: &AdmissibilityConfig,
) -> Result<usize>
where
    L: ConservationLaw<NV> + ?Sized,
{
    let constraints = law.constraints();
    if constraints.is_empty() {
        return Ok(0);
    }
    let mean = weighted_mean(nodes, weights);
    law.check_admissible(&mean, "cell_average")?;
    let mut flagged = vec![false; nodes.len()];
    for constraint in constraints {
        let p_mean = (constraint.eval)(&mean);
        let floor = cfg.scaling_floor.min(cfg.scaling_fraction * p_mean);
        let mut theta: f64 = 1.0;
        for (node, flag) in nodes.iter().zip(flagged.iter_mut()) {
            let p = (constraint.eval)(node);
            if p >= floor {
                continue;
            }
            *flag = true;
            let t = if !p.is_finite() {
                0.0
            } else if constraint.concave {
                (p_mean - floor) / (p_mean - p)
            } else {
                blend_theta_root(constraint.eval, node, &mean, floor)
            };
            theta = theta.min(t);
        }
        if theta < 1.0 {
            for node in nodes.iter_mut() {
                *node = std::array::from_fn(|i| mean[i] + theta * (node[i] - mean[i]));
            }
        }
    }
    Ok(flagged.iter().filter(|f| **f).count())
}
