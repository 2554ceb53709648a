//! Flux reconstruction: interface fluxes and the corrected flux derivative.

use crate::basis::ElementOperators;
use crate::equations::{ConservationLaw, Direction, State};
use crate::error::Result;

/// First-order Rusanov flux between two admissible states.
pub fn rusanov_flux<L, const NV: usize>(
    law: &L,
    left: &State<NV>,
    right: &State<NV>,
    dir: Direction,
) -> Result<State<NV>>
where
    L: ConservationLaw<NV> + ?Sized,
{
    let lambda = law
        .max_wave_speed(left, dir)?
        .max(law.max_wave_speed(right, dir)?);
    let (fl, fr) = (law.flux(left, dir), law.flux(right, dir));
    Ok(std::array::from_fn(|i| {
        0.5 * (fl[i] + fr[i]) - 0.5 * lambda * (right[i] - left[i])
    }))
}

/// Dissipation coefficient for the high-order interface flux.
///
/// Uses the extrapolated traces when they are admissible and always
/// includes the solution points adjacent to the face, which are admissible
/// after the scaling limiter.
pub fn interface_wave_speed<L, const NV: usize>(
    law: &L,
    dir: Direction,
    traces: [&State<NV>; 2],
    nearest_nodes: [&State<NV>; 2],
) -> Result<f64>
where
    L: ConservationLaw<NV> + ?Sized,
{
    let mut lambda: f64 = 0.0;
    for u in nearest_nodes {
        lambda = lambda.max(law.max_wave_speed(u, dir)?);
    }
    for u in traces {
        if law.violated_constraint(u).is_none() {
            lambda = lambda.max(law.max_wave_speed(u, dir)?);
        }
    }
    Ok(lambda)
}

/// Rusanov-type flux of the time averages:
/// `F = (F_L + F_R)/2 - lambda/2 (u_R - u_L)` with time level `n` traces.
#[inline]
pub fn lw_numerical_flux<const NV: usize>(
    flux_left: &State<NV>,
    flux_right: &State<NV>,
    u_left: &State<NV>,
    u_right: &State<NV>,
    lambda: f64,
) -> State<NV> {
    std::array::from_fn(|i| {
        0.5 * (flux_left[i] + flux_right[i]) - 0.5 * lambda * (u_right[i] - u_left[i])
    })
}

/// Extrapolate a line of nodal states to `xi = 0` and `xi = 1`.
pub fn extrapolate_states<const NV: usize>(
    ops: &ElementOperators,
    line: impl Fn(usize) -> State<NV>,
) -> (State<NV>, State<NV>) {
    let mut left = [0.0; NV];
    let mut right = [0.0; NV];
    for p in 0..ops.n_nodes() {
        let u = line(p);
        let (vl, vr) = (ops.v_left[p], ops.v_right[p]);
        for i in 0..NV {
            left[i] += vl * u[i];
            right[i] += vr * u[i];
        }
    }
    (left, right)
}

/// `dF_h/dxi` at the solution points of one line:
/// `D F + (F*_L - F(0)) g_L' + (F*_R - F(1)) g_R'`.
pub fn fr_flux_derivative<const NV: usize>(
    ops: &ElementOperators,
    flux: impl Fn(usize) -> State<NV>,
    trace_left: &State<NV>,
    trace_right: &State<NV>,
    numerical_left: &State<NV>,
    numerical_right: &State<NV>,
    mut out: impl FnMut(usize, State<NV>),
) {
    let n = ops.n_nodes();
    let jump_l: State<NV> = std::array::from_fn(|i| numerical_left[i] - trace_left[i]);
    let jump_r: State<NV> = std::array::from_fn(|i| numerical_right[i] - trace_right[i]);
    let values: Vec<State<NV>> = (0..n).map(&flux).collect();
    for p in 0..n {
        let mut d = [0.0; NV];
        for (r, f) in values.iter().enumerate() {
            let c = ops.diff[p][r];
            for i in 0..NV {
                d[i] += c * f[i];
            }
        }
        for i in 0..NV {
            d[i] += jump_l[i] * ops.gl_prime[p] + jump_r[i] * ops.gr_prime[p];
        }
        out(p, d);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::{primitive_to_conserved, LinearAdvection, TenMoment};

    #[test]
    fn constant_flux_has_zero_derivative() {
        let ops = ElementOperators::new(3).unwrap();
        let c = [2.0, -1.0];
        let mut out = vec![[1.0; 2]; 4];
        fr_flux_derivative(&ops, |_| c, &c, &c, &c, &c, |p, d| out[p] = d);
        for d in out {
            assert!(d[0].abs() < 1e-13 && d[1].abs() < 1e-13);
        }
    }

    #[test]
    fn matching_interface_fluxes_leave_interior_derivative() {
        let ops = ElementOperators::new(2).unwrap();
        let vals: Vec<[f64; 1]> = ops.nodes.iter().map(|x| [x * x * x]).collect();
        let (l, r) = extrapolate_states(&ops, |p| vals[p]);
        let mut out = [[0.0]; 3];
        fr_flux_derivative(&ops, |p| vals[p], &l, &r, &l, &r, |p, d| out[p] = d);
        for p in 0..3 {
            let interior: f64 = (0..3).map(|q| ops.diff[p][q] * vals[q][0]).sum();
            assert!((out[p][0] - interior).abs() < 1e-14);
        }
    }

    #[test]
    fn corrected_derivative_averages_to_flux_difference() {
        for degree in 0..=4 {
            let ops = ElementOperators::new(degree).unwrap();
            let vals: Vec<[f64; 1]> = ops.nodes.iter().map(|x| [(4.0 * x).cos()]).collect();
            let (l, r) = extrapolate_states(&ops, |p| vals[p]);
            let (fl, fr) = ([0.3], [-1.1]);
            let mut avg = 0.0;
            fr_flux_derivative(
                &ops,
                |p| vals[p],
                &l,
                &r,
                &fl,
                &fr,
                |p, d| avg += ops.weights[p] * d[0],
            );
            assert!((avg - (fr[0] - fl[0])).abs() < 1e-13, "degree {degree}");
        }
    }

    #[test]
    fn identical_neighbors_give_trace_flux() {
        let f = [1.0, 2.0];
        let u = [0.5, 0.7];
        assert_eq!(lw_numerical_flux(&f, &f, &u, &u, 3.0), f);
    }

    #[test]
    fn rusanov_is_upwind_for_advection() {
        let law = LinearAdvection::new([2.0, 0.0]);
        let f = rusanov_flux(&law, &[1.0], &[5.0], Direction::X1).unwrap();
        assert_eq!(f, [2.0]);
    }

    #[test]
    fn rusanov_consistency_and_sod_interface() {
        let law = TenMoment::new();
        let l = primitive_to_conserved(&[1.0, 0.0, 0.0, 2.0, 0.05, 0.6]);
        let r = primitive_to_conserved(&[0.125, 0.0, 0.0, 0.2, 0.1, 0.2]);
        let same = rusanov_flux(&law, &l, &l, Direction::X1).unwrap();
        assert_eq!(same, law.flux(&l, Direction::X1));
        let f = rusanov_flux(&law, &l, &r, Direction::X1).unwrap();
        let lam = 6f64.sqrt(); // max(sqrt(3*2/1), sqrt(3*0.2/0.125))
        let (fl, fr) = (law.flux(&l, Direction::X1), law.flux(&r, Direction::X1));
        for i in 0..6 {
            let expect = 0.5 * (fl[i] + fr[i]) - 0.5 * lam * (r[i] - l[i]);
            assert!((f[i] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn inadmissible_trace_is_skipped_but_node_is_not() {
        let law = TenMoment::new();
        let good = primitive_to_conserved(&[1.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
        let bad = [-0.1, 0.0, 0.0, 1.0, 0.0, 1.0];
        let lam = interface_wave_speed(&law, Direction::X1, [&bad, &good], [&good, &good]).unwrap();
        assert!((lam - 3f64.sqrt()).abs() < 1e-15);
        assert!(interface_wave_speed(&law, Direction::X1, [&good, &good], [&bad, &good]).is_err());
    }
}
