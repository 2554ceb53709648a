//! Conservation laws `u_t + f_1(u)_x + f_2(u)_y = s(u, x, t)` and their
//! admissibility sets `{u : P_k(u) > 0}`.

mod advection;
mod ten_moment;

pub use advection::LinearAdvection;
pub use ten_moment::{
    conserved_to_primitive, primitive_to_conserved, QuiverPotential, QuiverSource, TenMoment,
    TEN_MOMENT_VARS,
};

use crate::error::{Result, SolverError};

/// A vector of conserved variables.
pub type State<const NV: usize> = [f64; NV];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    X1,
    X2,
}

impl Direction {
    pub const ALL: [Direction; 2] = [Direction::X1, Direction::X2];

    pub fn axis(self) -> usize {
        match self {
            Direction::X1 => 0,
            Direction::X2 => 1,
        }
    }

    pub fn from_axis(axis: usize) -> Self {
        match axis {
            0 => Direction::X1,
            1 => Direction::X2,
            _ => panic!("axis {axis} out of range"),
        }
    }
}

/// One admissibility constraint `P(u) > 0`.
///
/// Constraints are ordered: `eval` only has to be meaningful when every
/// earlier constraint is positive.
#[derive(Clone, Copy)]
pub struct Constraint<const NV: usize> {
    pub name: &'static str,
    pub eval: fn(&State<NV>) -> f64,
    pub concave: bool,
}

impl<const NV: usize> std::fmt::Debug for Constraint<NV> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Constraint")
            .field("name", &self.name)
            .field("concave", &self.concave)
            .finish()
    }
}

pub trait ConservationLaw<const NV: usize>: Sync + Send {
    fn variable_names(&self) -> [&'static str; NV];

    /// Physical flux in `dir`. Evaluated formally: intermediate predictor
    /// states may lie outside the admissible set.
    fn flux(&self, u: &State<NV>, dir: Direction) -> State<NV>;

    fn has_source(&self) -> bool {
        false
    }

    fn source(&self, _u: &State<NV>, _x: [f64; 2], _t: f64) -> State<NV> {
        [0.0; NV]
    }

    /// Upper bound of the characteristic speeds in `dir`.
    fn max_wave_speed(&self, u: &State<NV>, dir: Direction) -> Result<f64>;

    fn constraints(&self) -> &[Constraint<NV>];

    /// First violated constraint, if any (NaN counts as a violation).
    fn violated_constraint(&self, u: &State<NV>) -> Option<(&'static str, f64)> {
        for c in self.constraints() {
            let v = (c.eval)(u);
            if !(v > 0.0) {
                return Some((c.name, v));
            }
        }
        None
    }

    fn check_admissible(&self, u: &State<NV>, stage: &'static str) -> Result<()> {
        match self.violated_constraint(u) {
            None => Ok(()),
            Some((name, value)) => Err(SolverError::admissibility(name, value, stage)),
        }
    }
}

impl<const NV: usize, L: ConservationLaw<NV> + ?Sized> ConservationLaw<NV> for &L {
    fn variable_names(&self) -> [&'static str; NV] {
        (**self).variable_names()
    }
    fn flux(&self, u: &State<NV>, dir: Direction) -> State<NV> {
        (**self).flux(u, dir)
    }
    fn has_source(&self) -> bool {
        (**self).has_source()
    }
    fn source(&self, u: &State<NV>, x: [f64; 2], t: f64) -> State<NV> {
        (**self).source(u, x, t)
    }
    fn max_wave_speed(&self, u: &State<NV>, dir: Direction) -> Result<f64> {
        (**self).max_wave_speed(u, dir)
    }
    fn constraints(&self) -> &[Constraint<NV>] {
        (**self).constraints()
    }
}
