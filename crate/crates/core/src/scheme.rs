//! Settings and per-step diagnostics shared by the 1-D and 2-D solvers.

use crate::admissibility::AdmissibilityConfig;
use crate::tvb::TvbConfig;

/// Largest stable `dt * lambda / dx` of the scheme for degree `N`, from
/// Fourier analysis of LWFR with Radau correction and trace dissipation.
/// The first-order scheme is plain upwinding.
pub fn cfl_number(degree: usize) -> f64 {
    const LIMITS: [f64; 5] = [1.0, 0.226, 0.117, 0.072, 0.049];
    LIMITS[degree.min(LIMITS.len() - 1)]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    /// Fraction of the stability limit used for the time step.
    pub cfl_safety: f64,
    pub flux_limiter: bool,
    pub source_limiter: bool,
    pub scaling_limiter: bool,
    pub tvb: Option<TvbConfig>,
    pub admissibility: AdmissibilityConfig,
    /// Record cell-average identity residuals in the step statistics.
    pub verify: bool,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            cfl_safety: 0.95,
            flux_limiter: true,
            source_limiter: true,
            scaling_limiter: true,
            tvb: None,
            admissibility: AdmissibilityConfig::default(),
            verify: false,
        }
    }
}

impl SchemeConfig {
    /// No limiting of any kind.
    pub fn unlimited() -> Self {
        Self {
            flux_limiter: false,
            source_limiter: false,
            scaling_limiter: false,
            tvb: None,
            ..Self::default()
        }
    }
}

/// Limiter activity and consistency residuals of one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub faces_limited: usize,
    /// Smallest flux blending coefficient (1 when nothing was limited).
    pub min_theta: f64,
    pub elements_source_limited: usize,
    pub min_source_theta: f64,
    pub nodes_scaled: usize,
    pub tvb_limited: usize,
    /// Faces where even the first-order fictitious updates were inadmissible.
    pub low_order_fallbacks: usize,
    /// `max |sum_p w_p u_check_p - (mean - dt/dx (F_R - F_L))|` (when verifying).
    pub decomposition_residual: f64,
    /// `max |mean(u^{n+1}) - (mean - dt/dx (F_R - F_L) + dt mean(S))|` (when verifying).
    pub average_residual: f64,
}

impl Default for StepStats {
    fn default() -> Self {
        Self {
            faces_limited: 0,
            min_theta: 1.0,
            elements_source_limited: 0,
            min_source_theta: 1.0,
            nodes_scaled: 0,
            tvb_limited: 0,
            low_order_fallbacks: 0,
            decomposition_residual: 0.0,
            average_residual: 0.0,
        }
    }
}

impl StepStats {
    /// Total number of limiter activations of the admissibility machinery.
    pub fn admissibility_activations(&self) -> usize {
        self.faces_limited + self.elements_source_limited + self.nodes_scaled
    }

    pub fn merge(&mut self, other: &StepStats) {
        self.faces_limited += other.faces_limited;
        self.min_theta = self.min_theta.min(other.min_theta);
        self.elements_source_limited += other.elements_source_limited;
        self.min_source_theta = self.min_source_theta.min(other.min_source_theta);
        self.nodes_scaled += other.nodes_scaled;
        self.tvb_limited += other.tvb_limited;
        self.low_order_fallbacks += other.low_order_fallbacks;
        self.decomposition_residual = self
            .decomposition_residual
            .max(other.decomposition_residual);
        self.average_residual = self.average_residual.max(other.average_residual);
    }
}
