//! Admissibility-preserving Lax-Wendroff flux reconstruction for hyperbolic
//! conservation laws with source terms.

// Node loops index several parallel arrays at once, and `!(x > 0.0)` is the
// intended NaN-rejecting form of a positivity test.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod admissibility;
pub mod basis;
pub mod driver;
pub mod equations;
pub mod error;
pub mod fr;
pub mod io;
pub mod mesh;
pub mod predictor;
pub mod scheme;
pub mod solver1d;
pub mod solver2d;
pub mod tvb;

pub use error::{Result, SolverError};
