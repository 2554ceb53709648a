use super::{ConservationLaw, Constraint, Direction, State};
use crate::error::Result;

/// Scalar `u_t + a . grad u = g(x, t)`; used to exercise the discretization
/// against closed-form solutions.
#[derive(Debug, Clone, Copy)]
pub struct LinearAdvection {
    pub velocity: [f64; 2],
    pub forcing: Option<fn([f64; 2], f64) -> f64>,
}

impl LinearAdvection {
    pub fn new(velocity: [f64; 2]) -> Self {
        Self {
            velocity,
            forcing: None,
        }
    }
}

impl ConservationLaw<1> for LinearAdvection {
    fn variable_names(&self) -> [&'static str; 1] {
        ["u"]
    }

    fn flux(&self, u: &State<1>, dir: Direction) -> State<1> {
        [self.velocity[dir.axis()] * u[0]]
    }

    fn has_source(&self) -> bool {
        self.forcing.is_some()
    }

    fn source(&self, _u: &State<1>, x: [f64; 2], t: f64) -> State<1> {
        [self.forcing.map_or(0.0, |g| g(x, t))]
    }

    fn max_wave_speed(&self, _u: &State<1>, dir: Direction) -> Result<f64> {
        Ok(self.velocity[dir.axis()].abs())
    }

    fn constraints(&self) -> &[Constraint<1>] {
        &[]
    }
}
