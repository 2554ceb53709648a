//! Cartesian meshes and the nodal solution container.

use serde::{Deserialize, Serialize};

use crate::equations::State;
use crate::error::{Result, SolverError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Periodic,
    /// Transmissive: ghost states copy the interior trace.
    Outflow,
}

impl std::str::FromStr for BoundaryCondition {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Self::Periodic),
            "outflow" => Ok(Self::Outflow),
            other => Err(SolverError::Config(format!(
                "unknown boundary condition '{other}' (expected periodic|outflow)"
            ))),
        }
    }
}

/// Connectivity of a row of `n` cells.
///
/// Faces are numbered so that face `e` is the left face of cell `e`. With
/// outflow boundaries there are `n + 1` faces; with periodic ones `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LineTopology {
    pub n: usize,
    pub bc: BoundaryCondition,
}

impl LineTopology {
    pub fn face_count(&self) -> usize {
        match self.bc {
            BoundaryCondition::Periodic => self.n,
            BoundaryCondition::Outflow => self.n + 1,
        }
    }

    /// Cells to the left and right of face `f` (`None` for a ghost).
    pub fn face_cells(&self, f: usize) -> (Option<usize>, Option<usize>) {
        match self.bc {
            BoundaryCondition::Periodic => (Some((f + self.n - 1) % self.n), Some(f)),
            BoundaryCondition::Outflow => {
                (f.checked_sub(1), if f < self.n { Some(f) } else { None })
            }
        }
    }

    /// Left and right face of cell `e`.
    pub fn cell_faces(&self, e: usize) -> (usize, usize) {
        match self.bc {
            BoundaryCondition::Periodic => (e, (e + 1) % self.n),
            BoundaryCondition::Outflow => (e, e + 1),
        }
    }

    /// Neighbor cells; outflow boundaries return the cell itself.
    pub fn neighbors(&self, e: usize) -> (usize, usize) {
        match self.bc {
            BoundaryCondition::Periodic => ((e + self.n - 1) % self.n, (e + 1) % self.n),
            BoundaryCondition::Outflow => (e.saturating_sub(1), (e + 1).min(self.n - 1)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Mesh1D {
    /// Cell interfaces, increasing, `n_cells + 1` entries.
    pub faces: Vec<f64>,
    pub bc: BoundaryCondition,
}

impl Mesh1D {
    pub fn uniform(x_min: f64, x_max: f64, n_cells: usize, bc: BoundaryCondition) -> Result<Self> {
        if n_cells == 0 || !(x_max > x_min) {
            return Err(SolverError::Config(format!(
                "invalid mesh: {n_cells} cells on [{x_min}, {x_max}]"
            )));
        }
        let h = (x_max - x_min) / n_cells as f64;
        let mut faces: Vec<f64> = (0..=n_cells).map(|i| x_min + i as f64 * h).collect();
        faces[n_cells] = x_max;
        Ok(Self { faces, bc })
    }

    pub fn n_cells(&self) -> usize {
        self.faces.len() - 1
    }

    pub fn dx(&self, e: usize) -> f64 {
        self.faces[e + 1] - self.faces[e]
    }

    pub fn min_dx(&self) -> f64 {
        (0..self.n_cells())
            .map(|e| self.dx(e))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn topology(&self) -> LineTopology {
        LineTopology {
            n: self.n_cells(),
            bc: self.bc,
        }
    }

    pub fn node_x(&self, e: usize, xi: f64) -> f64 {
        self.faces[e] + xi * self.dx(e)
    }
}

/// Uniform Cartesian grid; element `(i, j)` has index `i + nx j`.
#[derive(Debug, Clone)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub lower: [f64; 2],
    pub upper: [f64; 2],
    pub bc: [BoundaryCondition; 2],
}

impl Grid2D {
    pub fn new(
        nx: usize,
        ny: usize,
        lower: [f64; 2],
        upper: [f64; 2],
        bc: [BoundaryCondition; 2],
    ) -> Result<Self> {
        if nx == 0 || ny == 0 || !(upper[0] > lower[0]) || !(upper[1] > lower[1]) {
            return Err(SolverError::Config(format!(
                "invalid grid {nx}x{ny} on {lower:?}..{upper:?}"
            )));
        }
        Ok(Self {
            nx,
            ny,
            lower,
            upper,
            bc,
        })
    }

    pub fn dx(&self) -> f64 {
        (self.upper[0] - self.lower[0]) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.upper[1] - self.lower[1]) / self.ny as f64
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn topology(&self, axis: usize) -> LineTopology {
        LineTopology {
            n: if axis == 0 { self.nx } else { self.ny },
            bc: self.bc[axis],
        }
    }

    pub fn node_position(&self, i: usize, j: usize, xi: f64, eta: f64) -> [f64; 2] {
        [
            self.lower[0] + (i as f64 + xi) * self.dx(),
            self.lower[1] + (j as f64 + eta) * self.dy(),
        ]
    }
}

/// Nodal degrees of freedom, element-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField<const NV: usize> {
    pub values: Vec<State<NV>>,
    pub nodes_per_element: usize,
    pub time: f64,
}

impl<const NV: usize> NodalField<NV> {
    pub fn new(n_elements: usize, nodes_per_element: usize) -> Self {
        Self {
            values: vec![[0.0; NV]; n_elements * nodes_per_element],
            nodes_per_element,
            time: 0.0,
        }
    }

    pub fn n_elements(&self) -> usize {
        self.values.len() / self.nodes_per_element
    }

    pub fn element(&self, e: usize) -> &[State<NV>] {
        let n = self.nodes_per_element;
        &self.values[e * n..(e + 1) * n]
    }

    pub fn element_mut(&mut self, e: usize) -> &mut [State<NV>] {
        let n = self.nodes_per_element;
        &mut self.values[e * n..(e + 1) * n]
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|s| s.iter().all(|v| v.is_finite()))
    }
}
