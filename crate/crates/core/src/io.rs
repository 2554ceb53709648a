//! Command line, configuration files and CSV output.
//!
//! Settings are resolved in three layers: test-case defaults, then the TOML
//! file given with `--config`, then command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Deserialize;

use crate::driver::{
    convergence_study, reference_run, run, ConvergenceRow, RunConfig, RunReport, Solution,
    StepRecord, TestCase,
};
use crate::error::{Result, SolverError};
use crate::mesh::BoundaryCondition;

pub const SOLUTION_HEADER_1D: [&str; 7] = ["x", "rho", "v1", "v2", "p11", "p12", "p22"];
pub const SOLUTION_HEADER_2D: [&str; 8] = ["x", "y", "rho", "v1", "v2", "p11", "p12", "p22"];
pub const CONVERGENCE_HEADER: [&str; 6] =
    ["ncells", "dx", "l2_rho", "order_rho", "l2_p11", "order_p11"];
pub const DIAGNOSTICS_HEADER: [&str; 7] = [
    "step",
    "t",
    "dt",
    "faces_limited",
    "min_theta",
    "elements_source_limited",
    "nodes_scaled",
];

#[derive(Debug, Clone, Default, Parser)]
#[command(
    name = "lwfr",
    version,
    about = "Admissibility preserving Lax-Wendroff flux reconstruction for the Ten Moment equations"
)]
pub struct Cli {
    /// convergence | sod | two_rarefaction | shu_osher | near_vacuum_2d | realistic
    #[arg(long)]
    pub testcase: Option<TestCase>,
    /// Polynomial degree, 0..=4.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Cells of a 1-D run (coarsest mesh of a convergence study).
    #[arg(long)]
    pub ncells: Option<usize>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    #[arg(long)]
    pub bc_x: Option<BoundaryCondition>,
    #[arg(long)]
    pub bc_y: Option<BoundaryCondition>,
    #[arg(long)]
    pub tfinal: Option<f64>,
    /// Fraction of the stability limit used for the time step.
    #[arg(long)]
    pub cfl_safety: Option<f64>,
    /// TVB constant M; enables the TVB limiter.
    #[arg(long)]
    pub tvb_m: Option<f64>,
    #[arg(long)]
    pub no_tvb: bool,
    #[arg(long)]
    pub no_flux_limiter: bool,
    #[arg(long)]
    pub no_source_limiter: bool,
    #[arg(long)]
    pub no_scaling_limiter: bool,
    /// Reduce the time step so the admissibility argument holds with the
    /// source split.
    #[arg(long)]
    pub strict_cfl: bool,
    /// Absorption coefficients; one run per value.
    #[arg(long, value_delimiter = ',')]
    pub nu_t: Option<Vec<f64>>,
    #[arg(long)]
    pub outdir: Option<PathBuf>,
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of meshes of a convergence study, each twice as fine.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Also compute a first-order reference solution on this many cells.
    #[arg(long)]
    pub reference_cells: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub testcase: Option<TestCase>,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub limiters: LimiterSection,
    #[serde(default)]
    pub source: SourceSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub degree: Option<usize>,
    pub ncells: Option<usize>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub bc_x: Option<BoundaryCondition>,
    pub bc_y: Option<BoundaryCondition>,
    pub levels: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_final: Option<f64>,
    pub cfl_safety: Option<f64>,
    pub strict_cfl: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimiterSection {
    pub flux: Option<bool>,
    pub source: Option<bool>,
    pub scaling: Option<bool>,
    pub tvb: Option<bool>,
    pub tvb_m: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    pub nu_t: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub outdir: Option<PathBuf>,
    pub reference_cells: Option<usize>,
}

pub fn parse_config_str(text: &str) -> Result<FileConfig> {
    toml::from_str(text).map_err(|e| SolverError::Config(e.message().to_string()))
}

pub fn load_config(path: &Path) -> Result<FileConfig> {
    let text = fs::read_to_string(path).map_err(|source| SolverError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

/// Everything one invocation of the binary will do.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    /// One entry per absorption coefficient (a single run otherwise).
    pub runs: Vec<RunConfig>,
    pub outdir: PathBuf,
    /// Meshes of a convergence study.
    pub levels: usize,
    pub reference_cells: Option<usize>,
}

fn contradiction(msg: &str) -> SolverError {
    SolverError::Config(format!("contradictory settings: {msg}"))
}

/// Merge defaults, file and flags into a validated invocation.
pub fn resolve(cli: &Cli, file: &FileConfig) -> Result<Invocation> {
    let testcase = cli
        .testcase
        .or(file.testcase)
        .ok_or_else(|| SolverError::Config("no test case given (--testcase)".into()))?;
    let mut cfg = RunConfig::new(testcase);

    if cli.tvb_m.is_some() && cli.no_tvb {
        return Err(contradiction("--tvb-m together with --no-tvb"));
    }
    if testcase.is_2d() && cli.ncells.is_some() {
        return Err(contradiction("--ncells for a 2-D case (use --nx/--ny)"));
    }
    if !testcase.is_2d() && (cli.nx.is_some() || cli.ny.is_some() || cli.bc_y.is_some()) {
        return Err(contradiction("--nx/--ny/--bc-y for a 1-D case"));
    }
    if cli.levels.is_some() && testcase != TestCase::Convergence {
        return Err(contradiction("--levels outside a convergence study"));
    }
    if cli.reference_cells.is_some() && testcase.is_2d() {
        return Err(contradiction("reference solutions are 1-D only"));
    }

    let m = &file.mesh;
    let pick =
        |flag: Option<usize>, key: Option<usize>, default: usize| flag.or(key).unwrap_or(default);
    cfg.degree = pick(cli.degree, m.degree, cfg.degree);
    cfg.ncells = pick(cli.ncells, m.ncells, cfg.ncells);
    cfg.nx = pick(cli.nx, m.nx, cfg.nx);
    cfg.ny = pick(cli.ny, m.ny, cfg.ny);
    let bc_x = cli.bc_x.or(m.bc_x);
    let bc_y = cli.bc_y.or(m.bc_y);
    if bc_x.is_some() || bc_y.is_some() {
        let d = testcase.boundary();
        cfg.boundary = Some([bc_x.unwrap_or(d), bc_y.unwrap_or(d)]);
    }

    cfg.t_final = cli.tfinal.or(file.time.t_final).unwrap_or(cfg.t_final);
    cfg.cfl_safety = cli
        .cfl_safety
        .or(file.time.cfl_safety)
        .unwrap_or(cfg.cfl_safety);
    cfg.strict_cfl = cli.strict_cfl || file.time.strict_cfl.unwrap_or(false);

    let l = &file.limiters;
    cfg.flux_limiter = !cli.no_flux_limiter && l.flux.unwrap_or(true);
    cfg.source_limiter = !cli.no_source_limiter && l.source.unwrap_or(true);
    cfg.scaling_limiter = !cli.no_scaling_limiter && l.scaling.unwrap_or(true);
    if let Some(mv) = l.tvb_m {
        cfg.tvb_m = Some(mv);
    }
    if l.tvb == Some(false) {
        cfg.tvb_m = None;
    } else if l.tvb == Some(true) && cfg.tvb_m.is_none() {
        cfg.tvb_m = Some(0.0);
    }
    if let Some(mv) = cli.tvb_m {
        cfg.tvb_m = Some(mv);
    }
    if cli.no_tvb {
        cfg.tvb_m = None;
    }

    let levels = cli.levels.or(m.levels).unwrap_or(4);
    if testcase == TestCase::Convergence && levels < 2 {
        return Err(SolverError::Config(
            "a convergence study needs at least 2 levels".into(),
        ));
    }
    let reference_cells = cli.reference_cells.or(file.output.reference_cells);
    let outdir = cli
        .outdir
        .clone()
        .or_else(|| file.output.outdir.clone())
        .unwrap_or_else(|| PathBuf::from("output"));

    let nus = cli
        .nu_t
        .clone()
        .or_else(|| file.source.nu_t.clone())
        .unwrap_or_else(|| vec![cfg.nu_t]);
    if nus.is_empty() {
        return Err(SolverError::Config("empty nu_t list".into()));
    }
    cfg.validate()?;
    let runs = if testcase == TestCase::Realistic {
        nus.iter()
            .map(|&nu_t| {
                let c = RunConfig {
                    nu_t,
                    ..cfg.clone()
                };
                c.validate().map(|_| c)
            })
            .collect::<Result<_>>()?
    } else {
        vec![cfg]
    };
    Ok(Invocation {
        runs,
        outdir,
        levels,
        reference_cells,
    })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|source| SolverError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> SolverError + '_ {
    move |source| SolverError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn flush(mut w: csv::Writer<fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|source| SolverError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One row per solution point, element-major.
pub fn write_solution(solution: &Solution, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    if solution.dim == 2 {
        w.write_record(SOLUTION_HEADER_2D).map_err(csv_err(path))?;
    } else {
        w.write_record(SOLUTION_HEADER_1D).map_err(csv_err(path))?;
    }
    for (c, p) in solution.coords.iter().zip(&solution.primitive) {
        let mut row: Vec<String> = c[..solution.dim].iter().map(f64::to_string).collect();
        row.extend(p.iter().map(f64::to_string));
        w.write_record(&row).map_err(csv_err(path))?;
    }
    flush(w, path)
}

pub fn write_convergence_table(rows: &[ConvergenceRow], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(CONVERGENCE_HEADER).map_err(csv_err(path))?;
    let opt = |o: Option<f64>| o.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.ncells.to_string(),
            r.dx.to_string(),
            r.l2_rho.to_string(),
            opt(r.order_rho),
            r.l2_p11.to_string(),
            opt(r.order_p11),
        ])
        .map_err(csv_err(path))?;
    }
    flush(w, path)
}

pub fn write_diagnostics(history: &[StepRecord], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(DIAGNOSTICS_HEADER).map_err(csv_err(path))?;
    for r in history {
        w.write_record([
            r.step.to_string(),
            r.t.to_string(),
            r.dt.to_string(),
            r.stats.faces_limited.to_string(),
            r.stats.min_theta.to_string(),
            r.stats.elements_source_limited.to_string(),
            r.stats.nodes_scaled.to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    flush(w, path)
}

fn summary(report: &RunReport) -> String {
    let c = &report.config;
    let [rho, tr, det] = report.min_constraints;
    format!(
        "{} N={} steps={} t={} wall={:.2}s faces_limited={} elements_source_limited={} nodes_scaled={} min_rho={rho:e} min_trace={tr:e} min_det={det:e}",
        c.testcase,
        c.degree,
        report.steps,
        report.time,
        report.wall_time.as_secs_f64(),
        report.totals.faces_limited,
        report.totals.elements_source_limited,
        report.totals.nodes_scaled,
    )
}

/// Carry out an invocation; returns the lines printed to standard output.
pub fn execute(inv: &Invocation) -> Result<Vec<String>> {
    fs::create_dir_all(&inv.outdir).map_err(|source| SolverError::Io {
        path: inv.outdir.clone(),
        source,
    })?;
    let mut lines = Vec::new();
    let multi = inv.runs.len() > 1;
    for cfg in &inv.runs {
        let name = cfg.testcase.name();
        if cfg.testcase == TestCase::Convergence {
            let meshes: Vec<usize> = (0..inv.levels).map(|k| cfg.ncells << k).collect();
            let rows = convergence_study(cfg, &meshes)?;
            let path = inv.outdir.join("convergence.csv");
            write_convergence_table(&rows, &path)?;
            lines.push(CONVERGENCE_HEADER.join(","));
            for r in &rows {
                let o = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3}"));
                lines.push(format!(
                    "{},{:e},{:.6e},{},{:.6e},{}",
                    r.ncells,
                    r.dx,
                    r.l2_rho,
                    o(r.order_rho),
                    r.l2_p11,
                    o(r.order_p11)
                ));
            }
            lines.push(format!("wrote {}", path.display()));
            continue;
        }
        let suffix = if multi {
            format!("_nu{}", cfg.nu_t)
        } else {
            String::new()
        };
        let report = run(cfg)?;
        let sol = inv.outdir.join(format!("{name}_solution{suffix}.csv"));
        let diag = inv.outdir.join(format!("{name}_diagnostics{suffix}.csv"));
        write_solution(&report.solution, &sol)?;
        write_diagnostics(&report.history, &diag)?;
        lines.push(summary(&report));
        lines.push(format!("wrote {} and {}", sol.display(), diag.display()));
        if let Some(cells) = inv.reference_cells {
            let reference = reference_run(cfg.testcase, cells, cfg.t_final)?;
            let path = inv.outdir.join(format!("{name}_reference.csv"));
            write_solution(&reference.solution, &path)?;
            lines.push(format!("wrote {}", path.display()));
        }
    }
    Ok(lines)
}

/// Parse flags, load the optional file and run. Used by the binary.
pub fn run_cli(cli: &Cli) -> Result<Vec<String>> {
    let file = match &cli.config {
        Some(path) => load_config(path)?,
        None => FileConfig::default(),
    };
    let inv = resolve(cli, &file)?;
    execute(&inv)
}
