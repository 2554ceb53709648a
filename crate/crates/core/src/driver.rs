//! Test-case registry, time loop and convergence studies.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::admissibility::AdmissibilityConfig;
use crate::basis::gauss_legendre;
use crate::equations::{
    conserved_to_primitive, primitive_to_conserved, ConservationLaw, QuiverPotential, QuiverSource,
    State, TenMoment,
};
use crate::error::{Result, SolverError};
use crate::mesh::{BoundaryCondition, Grid2D, Mesh1D, NodalField};
use crate::scheme::{SchemeConfig, StepStats};
use crate::solver1d::Solver1D;
use crate::solver2d::Solver2D;
use crate::tvb::TvbConfig;

type U = State<6>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestCase {
    Convergence,
    Sod,
    TwoRarefaction,
    ShuOsher,
    #[serde(rename = "near_vacuum_2d")]
    NearVacuum2D,
    Realistic,
}

impl TestCase {
    pub const ALL: [TestCase; 6] = [
        TestCase::Convergence,
        TestCase::Sod,
        TestCase::TwoRarefaction,
        TestCase::ShuOsher,
        TestCase::NearVacuum2D,
        TestCase::Realistic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestCase::Convergence => "convergence",
            TestCase::Sod => "sod",
            TestCase::TwoRarefaction => "two_rarefaction",
            TestCase::ShuOsher => "shu_osher",
            TestCase::NearVacuum2D => "near_vacuum_2d",
            TestCase::Realistic => "realistic",
        }
    }

    pub fn is_2d(self) -> bool {
        matches!(self, TestCase::NearVacuum2D | TestCase::Realistic)
    }

    pub fn has_source(self) -> bool {
        matches!(self, TestCase::Convergence | TestCase::Realistic)
    }

    pub fn default_degree(self) -> usize {
        match self {
            TestCase::ShuOsher | TestCase::Realistic => 4,
            _ => 2,
        }
    }

    pub fn default_cells(self) -> usize {
        match self {
            TestCase::Convergence => 50,
            TestCase::NearVacuum2D | TestCase::Realistic => 100,
            _ => 200,
        }
    }

    pub fn default_t_final(self) -> f64 {
        match self {
            TestCase::Convergence => 0.5,
            TestCase::Sod => 0.1,
            TestCase::TwoRarefaction => 0.05,
            TestCase::ShuOsher => 1.8,
            TestCase::NearVacuum2D => 0.02,
            TestCase::Realistic => 0.5,
        }
    }

    pub fn default_tvb_m(self) -> Option<f64> {
        match self {
            TestCase::Sod | TestCase::TwoRarefaction | TestCase::NearVacuum2D => Some(0.0),
            TestCase::ShuOsher => Some(SHU_OSHER_TVB_M),
            TestCase::Convergence | TestCase::Realistic => None,
        }
    }

    pub fn domain(self) -> ([f64; 2], [f64; 2]) {
        match self {
            TestCase::Convergence | TestCase::Sod | TestCase::TwoRarefaction => {
                ([-0.5, 0.0], [0.5, 1.0])
            }
            TestCase::ShuOsher => ([-5.0, 0.0], [5.0, 1.0]),
            TestCase::NearVacuum2D => ([-1.0, -1.0], [1.0, 1.0]),
            TestCase::Realistic => ([0.0, 0.0], [100.0, 100.0]),
        }
    }

    pub fn boundary(self) -> BoundaryCondition {
        match self {
            TestCase::Convergence => BoundaryCondition::Periodic,
            _ => BoundaryCondition::Outflow,
        }
    }

    pub fn law(self, nu_t: f64) -> TenMoment {
        match self {
            TestCase::Convergence => TenMoment::with_source(QuiverSource {
                potential: QuiverPotential::TravelingSine,
                nu_t: 0.0,
                transverse: false,
            }),
            TestCase::Realistic => TenMoment::with_source(QuiverSource {
                potential: QuiverPotential::Gaussian {
                    center: [50.0, 50.0],
                    decay: 0.01,
                },
                nu_t,
                transverse: false,
            }),
            _ => TenMoment::new(),
        }
    }

    /// Initial data of the 1-D cases.
    pub fn initial_1d(self, x: f64) -> U {
        match self {
            TestCase::Convergence => convergence_exact(x, 0.0),
            TestCase::Sod => primitive_to_conserved(&if x < 0.0 {
                [1.0, 0.0, 0.0, 2.0, 0.05, 0.6]
            } else {
                [0.125, 0.0, 0.0, 0.2, 0.1, 0.2]
            }),
            TestCase::TwoRarefaction => primitive_to_conserved(&if x < 0.0 {
                [1.0, -5.0, 0.0, 2.0, 0.0, 2.0]
            } else {
                [1.0, 5.0, 0.0, 2.0, 0.0, 2.0]
            }),
            TestCase::ShuOsher => primitive_to_conserved(&if x <= -4.0 {
                [3.857143, 2.699369, 0.0, 10.33333, 0.0, 10.33333]
            } else {
                [1.0 + 0.2 * (5.0 * x).sin(), 0.0, 0.0, 1.0, 0.0, 1.0]
            }),
            _ => panic!("{self} is two-dimensional"),
        }
    }

    /// Initial data of the 2-D cases; `dx` enters the velocity smoothing.
    pub fn initial_2d(self, x: [f64; 2], dx: f64) -> U {
        match self {
            TestCase::NearVacuum2D => radial_velocity_ic(x, 0.06 * dx),
            TestCase::Realistic => primitive_to_conserved(&[0.109885, 0.0, 0.0, 1.0, 0.0, 1.0]),
            _ => panic!("{self} is one-dimensional"),
        }
    }
}

/// Our tuning: the smallest round value giving a resolved post-shock
/// oscillation on 200 elements at degree 4.
pub const SHU_OSHER_TVB_M: f64 = 100.0;

impl fmt::Display for TestCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestCase {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self> {
        TestCase::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| SolverError::Config(format!("unknown test case '{s}'")))
    }
}

/// Smoothing of the radial velocity near the origin.
pub fn smoothing_fs(r: f64, s: f64) -> f64 {
    if r < s {
        let q = r / s;
        -2.0 * q * q * q + 3.0 * q * q
    } else {
        1.0
    }
}

/// Unit density and pressure, outward velocity of magnitude `8 f_s(r)`.
pub fn radial_velocity_ic(x: [f64; 2], s: f64) -> U {
    let r = x[0].hypot(x[1]);
    let (v1, v2) = if r > 0.0 {
        let a = 8.0 * smoothing_fs(r, s);
        (a * (x[0] / r), a * (x[1] / r))
    } else {
        (0.0, 0.0)
    };
    primitive_to_conserved(&[1.0, v1, v2, 1.0, 0.0, 1.0])
}

/// Exact solution of the manufactured periodic problem.
pub fn convergence_exact(x: f64, t: f64) -> U {
    let a = 2.0 * std::f64::consts::PI * (x - t);
    let rho = 2.0 + a.sin();
    let p11 = 1.5 + 0.125 * ((2.0 * a).cos() - 8.0 * a.sin());
    primitive_to_conserved(&[rho, 1.0, 0.0, p11, 0.0, 1.0])
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub testcase: TestCase,
    pub degree: usize,
    /// Cells of a 1-D run.
    pub ncells: usize,
    pub nx: usize,
    pub ny: usize,
    pub t_final: f64,
    pub cfl_safety: f64,
    pub tvb_m: Option<f64>,
    pub flux_limiter: bool,
    pub source_limiter: bool,
    pub scaling_limiter: bool,
    pub strict_cfl: bool,
    pub nu_t: f64,
    /// Per-axis override of the case's boundary conditions.
    pub boundary: Option<[BoundaryCondition; 2]>,
    /// Record decomposition residuals every step.
    pub verify: bool,
    /// Keep one diagnostics record per step.
    pub keep_history: bool,
}

impl RunConfig {
    pub fn new(testcase: TestCase) -> Self {
        let n = testcase.default_cells();
        Self {
            testcase,
            degree: testcase.default_degree(),
            ncells: n,
            nx: n,
            ny: n,
            t_final: testcase.default_t_final(),
            cfl_safety: SchemeConfig::default().cfl_safety,
            tvb_m: testcase.default_tvb_m(),
            flux_limiter: true,
            source_limiter: true,
            scaling_limiter: true,
            strict_cfl: false,
            nu_t: 1.0,
            boundary: None,
            verify: false,
            keep_history: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree > crate::basis::MAX_DEGREE {
            return Err(SolverError::UnsupportedDegree(self.degree));
        }
        if !(self.cfl_safety > 0.0) || !self.cfl_safety.is_finite() {
            return Err(SolverError::Config(format!(
                "cfl safety factor must be positive, got {}",
                self.cfl_safety
            )));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(SolverError::Config(format!(
                "invalid final time {}",
                self.t_final
            )));
        }
        if matches!(self.tvb_m, Some(m) if !(m >= 0.0)) {
            return Err(SolverError::Config("tvb M must be non-negative".into()));
        }
        if !(self.nu_t >= 0.0) {
            return Err(SolverError::Config("nu_t must be non-negative".into()));
        }
        let cells = if self.testcase.is_2d() {
            self.nx.min(self.ny)
        } else {
            self.ncells
        };
        if cells == 0 {
            return Err(SolverError::Config("mesh needs at least one cell".into()));
        }
        Ok(())
    }

    pub fn scheme(&self) -> SchemeConfig {
        SchemeConfig {
            cfl_safety: self.cfl_safety,
            flux_limiter: self.flux_limiter,
            source_limiter: self.source_limiter,
            scaling_limiter: self.scaling_limiter,
            tvb: self.tvb_m.map(|m| TvbConfig { m }),
            admissibility: AdmissibilityConfig {
                strict_cfl: self.strict_cfl,
                ..AdmissibilityConfig::default()
            },
            verify: self.verify,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub stats: StepStats,
}

/// Primitive variables at every solution point.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// One coordinate per point in 1-D, two in 2-D.
    pub coords: Vec<[f64; 2]>,
    pub dim: usize,
    /// `(rho, v1, v2, p11, p12, p22)`
    pub primitive: Vec<[f64; 6]>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: RunConfig,
    pub steps: usize,
    pub time: f64,
    pub wall_time: Duration,
    pub history: Vec<StepRecord>,
    /// Counters summed and extrema taken over all steps.
    pub totals: StepStats,
    /// Smallest density, pressure trace and pressure determinant seen at
    /// any solution point of any time level.
    pub min_constraints: [f64; 3],
    /// L2 errors of `rho` and `p11` when the exact solution is known.
    pub l2_errors: Option<[f64; 2]>,
    /// Largest relative drift of a conserved total.
    pub conservation_drift: f64,
    pub solution: Solution,
}

/// Uniform interface over the 1-D and 2-D solvers for the time loop.
trait Stepper {
    fn stable_dt(&self, field: &NodalField<6>) -> Result<f64>;
    fn step(&self, field: &mut NodalField<6>, dt: f64) -> Result<StepStats>;
    fn postprocess(&self, field: &mut NodalField<6>, stats: &mut StepStats) -> Result<()>;
    fn total(&self, field: &NodalField<6>) -> U;
}

impl<L: ConservationLaw<6>> Stepper for Solver1D<L, 6> {
    fn stable_dt(&self, field: &NodalField<6>) -> Result<f64> {
        Solver1D::stable_dt(self, field)
    }
    fn step(&self, field: &mut NodalField<6>, dt: f64) -> Result<StepStats> {
        Solver1D::step(self, field, dt)
    }
    fn postprocess(&self, field: &mut NodalField<6>, stats: &mut StepStats) -> Result<()> {
        Solver1D::postprocess(self, field, stats)
    }
    fn total(&self, field: &NodalField<6>) -> U {
        Solver1D::total(self, field)
    }
}

impl<L: ConservationLaw<6>> Stepper for Solver2D<L, 6> {
    fn stable_dt(&self, field: &NodalField<6>) -> Result<f64> {
        Solver2D::stable_dt(self, field)
    }
    fn step(&self, field: &mut NodalField<6>, dt: f64) -> Result<StepStats> {
        Solver2D::step(self, field, dt)
    }
    fn postprocess(&self, field: &mut NodalField<6>, stats: &mut StepStats) -> Result<()> {
        Solver2D::postprocess(self, field, stats)
    }
    fn total(&self, field: &NodalField<6>) -> U {
        Solver2D::total(self, field)
    }
}

fn constraint_minima(field: &NodalField<6>, acc: &mut [f64; 3]) {
    let law = TenMoment::new();
    for u in &field.values {
        for (slot, c) in acc.iter_mut().zip(law.constraints()) {
            *slot = slot.min((c.eval)(u));
        }
    }
}

struct LoopOutcome {
    steps: usize,
    history: Vec<StepRecord>,
    totals: StepStats,
    min_constraints: [f64; 3],
    drift: f64,
}

fn time_loop(
    stepper: &dyn Stepper,
    field: &mut NodalField<6>,
    t_final: f64,
    keep_history: bool,
    max_steps: Option<usize>,
) -> Result<LoopOutcome> {
    let mut init = StepStats::default();
    stepper.postprocess(field, &mut init)?;
    let mut out = LoopOutcome {
        steps: 0,
        history: Vec::new(),
        totals: init,
        min_constraints: [f64::INFINITY; 3],
        drift: 0.0,
    };
    constraint_minima(field, &mut out.min_constraints);
    let start_total = stepper.total(field);
    while field.time < t_final && max_steps.is_none_or(|m| out.steps < m) {
        let t = field.time;
        let mut dt = stepper
            .stable_dt(field)
            .map_err(|e| e.at_step(out.steps + 1, t))?;
        // land exactly on the final time without a sliver step
        if t + dt >= t_final || t + 1.000001 * dt >= t_final {
            dt = t_final - t;
        }
        let stats = stepper
            .step(field, dt)
            .map_err(|e| e.at_step(out.steps + 1, t))?;
        if t + dt >= t_final {
            field.time = t_final;
        }
        out.steps += 1;
        out.totals.merge(&stats);
        constraint_minima(field, &mut out.min_constraints);
        if keep_history {
            out.history.push(StepRecord {
                step: out.steps,
                t: field.time,
                dt,
                stats,
            });
        }
    }
    let end_total = stepper.total(field);
    let scale = start_total
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    out.drift = start_total
        .iter()
        .zip(&end_total)
        .fold(0.0, |a: f64, (s, e)| a.max((s - e).abs() / scale));
    Ok(out)
}

fn primitive_solution(field: &NodalField<6>, coords: Vec<[f64; 2]>, dim: usize) -> Solution {
    Solution {
        coords,
        dim,
        primitive: field.values.iter().map(conserved_to_primitive).collect(),
    }
}

/// L2 norm of `quantity(numerical) - quantity(exact)` over a 1-D mesh, with a
/// Gauss rule of `N + 5` points per element so the nodal superconvergence
/// does not enter.
pub fn l2_error_1d<L, const NV: usize, const K: usize>(
    solver: &Solver1D<L, NV>,
    field: &NodalField<NV>,
    exact: impl Fn(f64) -> State<NV>,
    quantity: impl Fn(&State<NV>) -> [f64; K],
) -> [f64; K]
where
    L: ConservationLaw<NV>,
{
    let ops = &solver.ops;
    let (qx, qw) = gauss_legendre(ops.n_nodes() + 4);
    let interp = ops.interpolation_matrix(&qx);
    let mut sum = [0.0; K];
    let mut length = 0.0;
    for e in 0..field.n_elements() {
        let dx = solver.mesh.dx(e);
        length += dx;
        let nodes = field.element(e);
        for (row, (xi, w)) in interp.iter().zip(qx.iter().zip(&qw)) {
            let mut u = [0.0; NV];
            for (c, node) in row.iter().zip(nodes) {
                for i in 0..NV {
                    u[i] += c * node[i];
                }
            }
            let a = quantity(&u);
            let b = quantity(&exact(solver.mesh.node_x(e, *xi)));
            for k in 0..K {
                sum[k] += dx * w * (a[k] - b[k]).powi(2);
            }
        }
    }
    sum.map(|s| (s / length).sqrt())
}

fn rho_p11(u: &U) -> [f64; 2] {
    let p = conserved_to_primitive(u);
    [p[0], p[3]]
}

/// Run one configured simulation from `t = 0` to `t_final`.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    run_with_limit(config, None)
}

/// As [`run`], stopping after at most `max_steps` steps.
pub fn run_with_limit(config: &RunConfig, max_steps: Option<usize>) -> Result<RunReport> {
    config.validate()?;
    let clock = Instant::now();
    let tc = config.testcase;
    let law = tc.law(config.nu_t);
    let (lower, upper) = tc.domain();
    let scheme = config.scheme();
    let bc = config.boundary.unwrap_or([tc.boundary(); 2]);

    let (outcome, field, solution, l2_errors) = if tc.is_2d() {
        let grid = Grid2D::new(config.nx, config.ny, lower, upper, bc)?;
        let dx = grid.dx();
        let solver = Solver2D::new(law, config.degree, grid, scheme)?;
        let mut field = solver.project(|x| tc.initial_2d(x, dx));
        let outcome = time_loop(
            &solver,
            &mut field,
            config.t_final,
            config.keep_history,
            max_steps,
        )?;
        let solution = primitive_solution(&field, solver.node_positions().to_vec(), 2);
        (outcome, field, solution, None)
    } else {
        let mesh = Mesh1D::uniform(lower[0], upper[0], config.ncells, bc[0])?;
        let solver = Solver1D::new(law, config.degree, mesh, scheme)?;
        let mut field = solver.project(|x| tc.initial_1d(x));
        let outcome = time_loop(
            &solver,
            &mut field,
            config.t_final,
            config.keep_history,
            max_steps,
        )?;
        let l2 = (tc == TestCase::Convergence).then(|| {
            let t = field.time;
            l2_error_1d(&solver, &field, |x| convergence_exact(x, t), rho_p11)
        });
        let coords = solver.node_positions().map(|x| [x, 0.0]).collect();
        let solution = primitive_solution(&field, coords, 1);
        (outcome, field, solution, l2)
    };

    Ok(RunReport {
        config: config.clone(),
        steps: outcome.steps,
        time: field.time,
        wall_time: clock.elapsed(),
        history: outcome.history,
        totals: outcome.totals,
        min_constraints: outcome.min_constraints,
        l2_errors,
        conservation_drift: outcome.drift,
        solution,
    })
}

/// First-order reference solution of a 1-D case.
pub fn reference_run(testcase: TestCase, ncells: usize, t_final: f64) -> Result<RunReport> {
    let config = RunConfig {
        degree: 0,
        ncells,
        t_final,
        tvb_m: None,
        keep_history: false,
        ..RunConfig::new(testcase)
    };
    run(&config)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub ncells: usize,
    pub dx: f64,
    pub l2_rho: f64,
    pub order_rho: Option<f64>,
    pub l2_p11: f64,
    pub order_p11: Option<f64>,
    /// Faces, elements and points touched by the admissibility limiters.
    pub limiter_activations: usize,
    pub wall_time: Duration,
}

/// `log2(e_coarse / e_fine)` scaled by the actual refinement ratio.
pub fn observed_order(e_coarse: f64, e_fine: f64, dx_coarse: f64, dx_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (dx_coarse / dx_fine).ln()
}

/// Errors and orders of the manufactured problem on a sequence of meshes.
pub fn convergence_study(base: &RunConfig, meshes: &[usize]) -> Result<Vec<ConvergenceRow>> {
    if base.testcase != TestCase::Convergence {
        return Err(SolverError::Config(format!(
            "{} has no exact solution",
            base.testcase
        )));
    }
    let (lower, upper) = base.testcase.domain();
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(meshes.len());
    for &n in meshes {
        let cfg = RunConfig {
            ncells: n,
            keep_history: false,
            ..base.clone()
        };
        let report = run(&cfg)?;
        let [l2_rho, l2_p11] = report.l2_errors.expect("convergence case has errors");
        let dx = (upper[0] - lower[0]) / n as f64;
        let (order_rho, order_p11) = match rows.last() {
            Some(prev) => (
                Some(observed_order(prev.l2_rho, l2_rho, prev.dx, dx)),
                Some(observed_order(prev.l2_p11, l2_p11, prev.dx, dx)),
            ),
            None => (None, None),
        };
        rows.push(ConvergenceRow {
            ncells: n,
            dx,
            l2_rho,
            order_rho,
            l2_p11,
            order_p11,
            limiter_activations: report.totals.admissibility_activations(),
            wall_time: report.wall_time,
        });
    }
    Ok(rows)
}

/// Largest `|rho(x, y) - rho(-y, x)|` over the solution points of a square
/// grid centered at the origin with an even number of cells per side.
pub fn rotation_asymmetry(solver_degree: usize, n: usize, rho: &[f64]) -> f64 {
    let m = solver_degree + 1;
    // point (i, j, p, q) -> global indices
    let idx = |i: usize, j: usize, p: usize, q: usize| (i + n * j) * m * m + p + m * q;
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            for q in 0..m {
                for p in 0..m {
                    // (x, y) -> (-y, x): cell (n-1-j, i), point (m-1-q, p)
                    let a = rho[idx(i, j, p, q)];
                    let b = rho[idx(n - 1 - j, i, m - 1 - q, p)];
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_smoothing_values() {
        let s = 0.2;
        assert_eq!(smoothing_fs(0.0, s), 0.0);
        assert_eq!(smoothing_fs(s, s), 1.0);
        assert!((smoothing_fs(0.5 * s, s) - 0.5).abs() < 1e-15);
        let u = radial_velocity_ic([0.0, 0.0], s);
        assert_eq!(u, primitive_to_conserved(&[1.0, 0.0, 0.0, 1.0, 0.0, 1.0]));
        let p = conserved_to_primitive(&radial_velocity_ic([0.3, -0.4], 0.01));
        assert!((p[1] - 8.0 * 0.6).abs() < 1e-14 && (p[2] + 8.0 * 0.8).abs() < 1e-14);
    }

    #[test]
    fn manufactured_solution_satisfies_the_balance_law() {
        // residual of u_t + f_x - s by centered differences
        let law = TestCase::Convergence.law(0.0);
        let h = 1e-4;
        for &(x, t) in &[(0.1, 0.0), (-0.37, 0.2), (0.44, 0.49)] {
            let ut =
                |i| (convergence_exact(x, t + h)[i] - convergence_exact(x, t - h)[i]) / (2.0 * h);
            let fx = |i| {
                let f = |y| law.flux(&convergence_exact(y, t), crate::equations::Direction::X1)[i];
                (f(x + h) - f(x - h)) / (2.0 * h)
            };
            let s = law.source(&convergence_exact(x, t), [x, 0.0], t);
            for i in 0..6 {
                assert!((ut(i) + fx(i) - s[i]).abs() < 1e-6, "component {i}");
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for tc in TestCase::ALL {
            assert_eq!(tc.name().parse::<TestCase>().unwrap(), tc);
        }
        assert!("blast".parse::<TestCase>().is_err());
    }

    #[test]
    fn zero_final_time_returns_initial_data() {
        let cfg = RunConfig {
            t_final: 0.0,
            ncells: 8,
            ..RunConfig::new(TestCase::Sod)
        };
        let report = run(&cfg).unwrap();
        assert_eq!(report.steps, 0);
        assert_eq!(
            report.solution.primitive[0],
            [1.0, 0.0, 0.0, 2.0, 0.05, 0.6]
        );
    }

    #[test]
    fn final_time_is_hit_exactly() {
        let cfg = RunConfig {
            t_final: 0.013,
            ncells: 20,
            ..RunConfig::new(TestCase::Sod)
        };
        let report = run(&cfg).unwrap();
        assert_eq!(report.time, 0.013);
        let sum: f64 = report.history.iter().map(|r| r.dt).sum();
        assert!((sum - 0.013).abs() < 1e-15);
    }

    #[test]
    fn observed_order_of_exact_power_law() {
        assert!((observed_order(8.0, 1.0, 0.2, 0.1) - 3.0).abs() < 1e-14);
    }
}
