//! Ten Moment (Gaussian closure) equations with electron quiver source terms.
//!
//! Conserved variables `(rho, rho v1, rho v2, E11, E12, E22)` with the energy
//! tensor `E = p/2 + rho v (x) v / 2`.

use super::{ConservationLaw, Constraint, Direction, State};
use crate::error::{Result, SolverError};

pub const TEN_MOMENT_VARS: usize = 6;

type U = State<TEN_MOMENT_VARS>;

/// `(rho, v1, v2, p11, p12, p22)` to conserved variables.
pub fn primitive_to_conserved(prim: &[f64; 6]) -> U {
    let [rho, v1, v2, p11, p12, p22] = *prim;
    [
        rho,
        rho * v1,
        rho * v2,
        0.5 * p11 + 0.5 * rho * v1 * v1,
        0.5 * p12 + 0.5 * rho * v1 * v2,
        0.5 * p22 + 0.5 * rho * v2 * v2,
    ]
}

/// Conserved to `(rho, v1, v2, p11, p12, p22)`. Formal: no sign checks.
pub fn conserved_to_primitive(u: &U) -> [f64; 6] {
    let rho = u[0];
    let v1 = u[1] / rho;
    let v2 = u[2] / rho;
    let (p11, p12, p22) = pressure(u);
    [rho, v1, v2, p11, p12, p22]
}

#[inline]
fn pressure(u: &U) -> (f64, f64, f64) {
    let rho = u[0];
    let (m1, m2) = (u[1], u[2]);
    let p11 = 2.0 * u[3] - m1 * m1 / rho;
    let p12 = 2.0 * u[4] - m1 * m2 / rho;
    let p22 = 2.0 * u[5] - m2 * m2 / rho;
    (p11, p12, p22)
}

fn density(u: &U) -> f64 {
    u[0]
}

// Pressure is undefined without positive density, so such states rank below
// every admissible one instead of reporting the sign flip through `1 / rho`.
fn pressure_trace(u: &U) -> f64 {
    if !(u[0] > 0.0) {
        return f64::NEG_INFINITY;
    }
    let (p11, _, p22) = pressure(u);
    p11 + p22
}

fn pressure_det(u: &U) -> f64 {
    if !(u[0] > 0.0) {
        return f64::NEG_INFINITY;
    }
    let (p11, p12, p22) = pressure(u);
    p11 * p22 - p12 * p12
}

static CONSTRAINTS: [Constraint<6>; 3] = [
    Constraint {
        name: "density",
        eval: density,
        concave: true,
    },
    Constraint {
        name: "trace",
        eval: pressure_trace,
        concave: true,
    },
    Constraint {
        name: "det",
        eval: pressure_det,
        concave: false,
    },
];

/// Prescribed quiver potential `W(x, y, t)` with closed-form gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuiverPotential {
    /// `W = sin(2 pi (x - t))`
    TravelingSine,
    /// `W = exp(-decay ((x - cx)^2 + (y - cy)^2))`
    Gaussian { center: [f64; 2], decay: f64 },
}

impl QuiverPotential {
    pub fn value(&self, x: [f64; 2], t: f64) -> f64 {
        match *self {
            QuiverPotential::TravelingSine => (2.0 * std::f64::consts::PI * (x[0] - t)).sin(),
            QuiverPotential::Gaussian { center, decay } => {
                let (dx, dy) = (x[0] - center[0], x[1] - center[1]);
                (-decay * (dx * dx + dy * dy)).exp()
            }
        }
    }

    pub fn gradient(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        match *self {
            QuiverPotential::TravelingSine => {
                let k = 2.0 * std::f64::consts::PI;
                [k * (k * (x[0] - t)).cos(), 0.0]
            }
            QuiverPotential::Gaussian { center, decay } => {
                let w = self.value(x, t);
                [
                    -2.0 * decay * (x[0] - center[0]) * w,
                    -2.0 * decay * (x[1] - center[1]) * w,
                ]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuiverSource {
    pub potential: QuiverPotential,
    /// Absorption coefficient of the `E11` energy source.
    pub nu_t: f64,
    /// Whether the `x2` gradient terms are active.
    pub transverse: bool,
}

#[derive(Debug, Clone, Default)]
pub struct TenMoment {
    pub source: Option<QuiverSource>,
}

impl TenMoment {
    pub fn new() -> Self {
        Self { source: None }
    }

    pub fn with_source(source: QuiverSource) -> Self {
        Self {
            source: Some(source),
        }
    }

    /// Flux with the positivity precondition on density enforced.
    pub fn checked_flux(&self, u: &U, dir: Direction) -> Result<U> {
        if !(u[0] > 0.0) {
            return Err(SolverError::admissibility("density", u[0], "flux"));
        }
        Ok(self.flux(u, dir))
    }
}

impl ConservationLaw<6> for TenMoment {
    fn variable_names(&self) -> [&'static str; 6] {
        ["rho", "rho_v1", "rho_v2", "E11", "E12", "E22"]
    }

    #[inline]
    fn flux(&self, u: &U, dir: Direction) -> U {
        let rho = u[0];
        let (m1, m2) = (u[1], u[2]);
        let v1 = m1 / rho;
        let v2 = m2 / rho;
        let rv1v1 = m1 * m1 / rho;
        let rv1v2 = m1 * m2 / rho;
        let rv2v2 = m2 * m2 / rho;
        let p11 = 2.0 * u[3] - rv1v1;
        let p12 = 2.0 * u[4] - rv1v2;
        let p22 = 2.0 * u[5] - rv2v2;
        match dir {
            Direction::X1 => [
                m1,
                p11 + rv1v1,
                p12 + rv1v2,
                (u[3] + p11) * v1,
                u[4] * v1 + 0.5 * (p11 * v2 + p12 * v1),
                u[5] * v1 + p12 * v2,
            ],
            Direction::X2 => [
                m2,
                p12 + rv1v2,
                p22 + rv2v2,
                u[3] * v2 + p12 * v1,
                u[4] * v2 + 0.5 * (p22 * v1 + p12 * v2),
                (u[5] + p22) * v2,
            ],
        }
    }

    fn has_source(&self) -> bool {
        self.source.is_some()
    }

    #[inline]
    fn source(&self, u: &U, x: [f64; 2], t: f64) -> U {
        let Some(src) = &self.source else {
            return [0.0; 6];
        };
        let [wx, wy] = src.potential.gradient(x, t);
        let (rho, m1, m2) = (u[0], u[1], u[2]);
        let mut s = [
            0.0,
            -0.5 * rho * wx,
            0.0,
            -0.5 * m1 * wx,
            -0.25 * m2 * wx,
            0.0,
        ];
        if src.transverse {
            s[2] -= 0.5 * rho * wy;
            s[4] -= 0.25 * m1 * wy;
            s[5] -= 0.5 * m2 * wy;
        }
        if src.nu_t != 0.0 {
            s[3] += src.nu_t * rho * src.potential.value(x, t);
        }
        s
    }

    fn max_wave_speed(&self, u: &U, dir: Direction) -> Result<f64> {
        self.check_admissible(u, "wave_speed")?;
        let rho = u[0];
        let (vn, pnn) = match dir {
            Direction::X1 => (u[1] / rho, 2.0 * u[3] - u[1] * u[1] / rho),
            Direction::X2 => (u[2] / rho, 2.0 * u[5] - u[2] * u[2] / rho),
        };
        Ok(vn.abs() + (3.0 * pnn / rho).sqrt())
    }

    fn constraints(&self) -> &[Constraint<6>] {
        &CONSTRAINTS
    }
}
