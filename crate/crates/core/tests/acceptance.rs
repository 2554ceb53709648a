//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --release --test acceptance`. Expensive runs are
//! computed once and shared by the criteria that inspect them.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lwfr::admissibility::blend_theta_root;
use lwfr::basis::ElementOperators;
use lwfr::driver::{
    convergence_exact, convergence_study, l2_error_1d, reference_run, rotation_asymmetry, run,
    ConvergenceRow, RunConfig, RunReport, TestCase,
};
use lwfr::equations::{primitive_to_conserved, ConservationLaw, LinearAdvection, State, TenMoment};
use lwfr::mesh::{BoundaryCondition, Grid2D, Mesh1D};
use lwfr::predictor::{predict_with_terms, PredictorInput, PredictorWorkspace, TimeAverages};
use lwfr::scheme::SchemeConfig;
use lwfr::solver1d::Solver1D;
use lwfr::solver2d::Solver2D;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

const ORDER_TOL: f64 = 0.25;
const DECOMPOSITION_TOL: f64 = 1e-11;
const SYMMETRY_TOL: f64 = 1e-8;
const TRANSPARENCY_TOL: f64 = 0.1;
const PREDICTOR_ORDER_TOL: f64 = 0.3;
const DRIFT_TOL: f64 = 1e-11;
const THETA_TOL: f64 = 1e-3;
const MESHES: [usize; 4] = [25, 50, 100, 200];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Runs shared by several criteria.
struct Shared {
    /// Limited and unlimited studies for N = 1, 2, 3.
    studies: Vec<(usize, Vec<ConvergenceRow>, Vec<ConvergenceRow>, Duration)>,
    /// Verified runs of every case: name, report or failure.
    runs: Vec<(&'static str, Result<RunReport, String>)>,
}

fn verified(mut cfg: RunConfig) -> RunConfig {
    cfg.verify = true;
    cfg.keep_history = true;
    cfg
}

fn max_residual(report: &RunReport) -> f64 {
    report
        .history
        .iter()
        .map(|r| r.stats.decomposition_residual.max(r.stats.average_residual))
        .fold(0.0, f64::max)
}

fn shared() -> Shared {
    let mut studies = Vec::new();
    for degree in 1..=3 {
        let clock = Instant::now();
        let on = verified(RunConfig {
            degree,
            ..RunConfig::new(TestCase::Convergence)
        });
        let limited = convergence_study(&on, &MESHES).expect("limited study");
        let elapsed = clock.elapsed();
        let off = RunConfig {
            flux_limiter: false,
            source_limiter: false,
            scaling_limiter: false,
            ..on.clone()
        };
        let unlimited = convergence_study(&off, &MESHES).expect("unlimited study");
        studies.push((degree, limited, unlimited, elapsed));
    }

    let mut runs = Vec::new();
    let mut go = |label: &'static str, cfg: RunConfig| {
        runs.push((label, run(&verified(cfg)).map_err(|e| e.machine_line())));
    };
    go(
        "convergence",
        RunConfig {
            ncells: 100,
            ..RunConfig::new(TestCase::Convergence)
        },
    );
    go("sod", RunConfig::new(TestCase::Sod));
    go("two_rarefaction", RunConfig::new(TestCase::TwoRarefaction));
    go("shu_osher", RunConfig::new(TestCase::ShuOsher));
    go("near_vacuum_2d", RunConfig::new(TestCase::NearVacuum2D));
    for (label, n, nu) in [
        ("realistic_100_nu0", 100, 0.0),
        ("realistic_100_nu1", 100, 1.0),
        ("realistic_50_nu0", 50, 0.0),
        ("realistic_50_nu1", 50, 1.0),
    ] {
        go(
            label,
            RunConfig {
                nx: n,
                ny: n,
                nu_t: nu,
                ..RunConfig::new(TestCase::Realistic)
            },
        );
    }
    Shared { studies, runs }
}

fn find<'a>(shared: &'a Shared, label: &str) -> &'a Result<RunReport, String> {
    &shared
        .runs
        .iter()
        .find(|(l, _)| *l == label)
        .expect("run recorded")
        .1
}

fn admissible(report: &RunReport) -> bool {
    report.min_constraints.iter().all(|v| *v > 0.0)
}

fn criterion_1(s: &Shared) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (degree, rows, _, elapsed) in &s.studies {
        let last = rows.last().unwrap();
        let (or, op) = (last.order_rho.unwrap(), last.order_p11.unwrap());
        let target = (degree + 1) as f64;
        let ok = (or - target).abs() <= ORDER_TOL
            && (op - target).abs() <= ORDER_TOL
            && elapsed.as_secs() < 120;
        pass &= ok;
        parts.push(format!(
            "N={degree}: rho {or:.3} p11 {op:.3} ({:.1}s)",
            secs(*elapsed)
        ));
    }
    verdict(pass, parts.join("; "))
}

/// Randomized single steps on perturbed smooth data.
fn random_decomposition_residual() -> f64 {
    let mut runner = TestRunner::deterministic();
    let strategy = (
        0.5f64..2.0,
        prop::collection::vec(-0.2f64..0.2, 6),
        prop::collection::vec(1.0f64..6.0, 6),
        1usize..=4,
    );
    let mut worst: f64 = 0.0;
    for _ in 0..40 {
        let (rho0, amp, freq, degree) = strategy.new_tree(&mut runner).unwrap().current();
        let init = move |x: f64| {
            let w = |i: usize| amp[i] * (2.0 * PI * freq[i] * x).sin();
            primitive_to_conserved(&[
                rho0 * (1.0 + w(0)),
                w(1),
                w(2),
                1.0 + w(3),
                0.1 * w(4),
                1.0 + w(5),
            ])
        };
        let mesh = Mesh1D::uniform(0.0, 1.0, 12, BoundaryCondition::Periodic).unwrap();
        let config = SchemeConfig {
            verify: true,
            ..SchemeConfig::default()
        };
        let solver = Solver1D::new(TenMoment::new(), degree, mesh, config).unwrap();
        let mut field = solver.project(init);
        for _ in 0..3 {
            let dt = solver.stable_dt(&field).unwrap();
            let st = solver.step(&mut field, dt).unwrap();
            worst = worst
                .max(st.decomposition_residual)
                .max(st.average_residual);
        }
    }
    worst
}

fn criterion_2(s: &Shared) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut missing = Vec::new();
    for (label, r) in &s.runs {
        match r {
            Ok(rep) => worst = worst.max(max_residual(rep)),
            Err(_) => missing.push(*label),
        }
    }
    let random = random_decomposition_residual();
    let pass = missing.is_empty() && worst <= DECOMPOSITION_TOL && random <= DECOMPOSITION_TOL;
    verdict(
        pass,
        format!(
            "max residual over {} runs {worst:.2e}, randomized {random:.2e}{}",
            s.runs.len(),
            if missing.is_empty() {
                String::new()
            } else {
                format!(", failed runs: {missing:?}")
            }
        ),
    )
}

fn criterion_3(s: &Shared) -> Verdict {
    let limited = find(s, "two_rarefaction");
    let clock = Instant::now();
    let unlimited = run(&RunConfig {
        flux_limiter: false,
        ..RunConfig::new(TestCase::TwoRarefaction)
    });
    let without = secs(clock.elapsed());
    let failure = match &unlimited {
        Err(e) if e.is_admissibility() => e.machine_line(),
        Err(e) => format!("unexpected error {e}"),
        Ok(_) => "no failure".into(),
    };
    match limited {
        Ok(rep) => {
            let pass = admissible(rep)
                && matches!(&unlimited, Err(e) if e.is_admissibility())
                && rep.wall_time.as_secs() < 30;
            let [a, b, c] = rep.min_constraints;
            verdict(
                pass,
                format!(
                    "limited: min rho {a:.3e} trace {b:.3e} det {c:.3e} in {:.1}s; without flux limiter ({without:.1}s): {failure}",
                    secs(rep.wall_time)
                ),
            )
        }
        Err(e) => verdict(false, format!("limited run failed: {e}")),
    }
}

fn criterion_4(s: &Shared) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for label in [
        "realistic_100_nu0",
        "realistic_100_nu1",
        "realistic_50_nu0",
        "realistic_50_nu1",
    ] {
        match find(s, label) {
            Ok(rep) => {
                let fast = !label.contains("_50_") || rep.wall_time.as_secs() < 300;
                pass &= admissible(rep) && fast;
                parts.push(format!(
                    "{label}: min rho {:.4e} det {:.4e} ({:.1}s)",
                    rep.min_constraints[0],
                    rep.min_constraints[2],
                    secs(rep.wall_time)
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{label}: {e}"));
            }
        }
    }
    verdict(pass, parts.join("; "))
}

fn max_rho_in(report: &RunReport, lo: f64, hi: f64) -> f64 {
    report
        .solution
        .coords
        .iter()
        .zip(&report.solution.primitive)
        .filter(|(c, _)| c[0] >= lo && c[0] <= hi)
        .map(|(_, p)| p[0])
        .fold(f64::NEG_INFINITY, f64::max)
}

fn criterion_5(s: &Shared) -> Verdict {
    let reference = reference_run(TestCase::ShuOsher, 10_000, 1.8).map_err(|e| e.machine_line());
    match (find(s, "shu_osher"), &reference) {
        (Ok(rep), Ok(refr)) => {
            let finite = rep
                .solution
                .primitive
                .iter()
                .all(|p| p.iter().all(|v| v.is_finite()));
            let (m, mr) = (max_rho_in(rep, 0.0, 3.0), max_rho_in(refr, 0.0, 3.0));
            let pass =
                finite && admissible(rep) && m > 4.0 && mr > 4.0 && rep.wall_time.as_secs() < 120;
            verdict(
                pass,
                format!(
                    "max rho on [0,3]: {m:.4} (N=4, {:.1}s), first-order reference {mr:.4} ({:.1}s)",
                    secs(rep.wall_time),
                    secs(refr.wall_time)
                ),
            )
        }
        (Err(e), _) | (_, Err(e)) => verdict(false, format!("run failed: {e}")),
    }
}

fn criterion_6(s: &Shared) -> Verdict {
    match find(s, "near_vacuum_2d") {
        Ok(rep) => {
            let rho: Vec<f64> = rep.solution.primitive.iter().map(|p| p[0]).collect();
            let asym = rotation_asymmetry(rep.config.degree, rep.config.nx, &rho);
            let pass = admissible(rep) && asym <= SYMMETRY_TOL && rep.wall_time.as_secs() < 300;
            verdict(
                pass,
                format!(
                    "min rho {:.3e} det {:.3e}, rotation asymmetry {asym:.2e} ({:.1}s)",
                    rep.min_constraints[0],
                    rep.min_constraints[2],
                    secs(rep.wall_time)
                ),
            )
        }
        Err(e) => verdict(false, e.clone()),
    }
}

fn criterion_7(s: &Shared) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (degree, on, off, _) in &s.studies {
        let active: Vec<usize> = on.iter().map(|r| r.limiter_activations).collect();
        let quiet = active[1..].iter().all(|a| *a == 0);
        let mut worst: f64 = 0.0;
        for (a, b) in on.iter().zip(off).skip(1) {
            worst = worst
                .max((a.order_rho.unwrap() - b.order_rho.unwrap()).abs())
                .max((a.order_p11.unwrap() - b.order_p11.unwrap()).abs());
        }
        pass &= quiet && worst < TRANSPARENCY_TOL;
        parts.push(format!(
            "N={degree}: activations {active:?}, max order change {worst:.1e}"
        ));
    }
    verdict(pass, parts.join("; "))
}

/// `max_p |f^(k)_p - dt^k d^k f / dt^k|` for `u_t + u_x = 0`, `u = sin(2 pi x)`
/// on one element of width `h`.
fn predictor_term_error(degree: usize, k: usize, h: f64) -> f64 {
    let ops = ElementOperators::new(degree).unwrap();
    let n = ops.n_nodes();
    let law = LinearAdvection::new([1.0, 0.0]);
    let x0 = 0.1;
    let coords: Vec<[f64; 2]> = ops.nodes.iter().map(|xi| [x0 + xi * h, 0.0]).collect();
    let u: Vec<State<1>> = coords.iter().map(|c| [(2.0 * PI * c[0]).sin()]).collect();
    let dt = 0.1 * h;
    let input = PredictorInput {
        dt,
        dx: [h, 1.0],
        coords: &coords,
        time: 0.0,
    };
    let mut ws = PredictorWorkspace::new(n, degree);
    let mut out = TimeAverages::new(n, 1, false);
    let mut terms = vec![0.0; n];
    predict_with_terms(
        &law,
        &ops,
        1,
        &u,
        &input,
        &mut ws,
        &mut out,
        |order, node, f| {
            if order == k {
                terms[node] = f[0][0];
            }
        },
    );
    // d^k/dt^k sin(2 pi (x - t)) at t = 0
    let w = 2.0 * PI;
    coords
        .iter()
        .zip(&terms)
        .map(|(c, fk)| {
            let exact =
                dt.powi(k as i32) * w.powi(k as i32) * (w * c[0] - k as f64 * PI / 2.0).sin();
            (fk - exact).abs()
        })
        .fold(0.0, f64::max)
}

fn advection_order(degree: usize) -> f64 {
    let mut errors = Vec::new();
    let meshes = [10, 20, 40];
    for &n in &meshes {
        let mesh = Mesh1D::uniform(0.0, 1.0, n, BoundaryCondition::Periodic).unwrap();
        let solver = Solver1D::new(
            LinearAdvection::new([1.0, 0.0]),
            degree,
            mesh,
            SchemeConfig::default(),
        )
        .unwrap();
        let mut field = solver.project(|x| [(2.0 * PI * x).sin()]);
        while field.time < 1.0 {
            let dt = solver.stable_dt(&field).unwrap().min(1.0 - field.time);
            solver.step(&mut field, dt).unwrap();
            if 1.0 - field.time < 1e-14 {
                field.time = 1.0;
            }
        }
        let t = field.time;
        errors.push(
            l2_error_1d(
                &solver,
                &field,
                |x| [(2.0 * PI * (x - t)).sin()],
                |u| [u[0]],
            )[0],
        );
    }
    (errors[1] / errors[2]).log2()
}

fn criterion_8() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for degree in 2..=4 {
        for k in 1..=2 {
            let e: Vec<f64> = [0.2, 0.1, 0.05]
                .iter()
                .map(|h| predictor_term_error(degree, k, *h))
                .collect();
            let rate = (e[1] / e[2]).log2();
            let designed = (degree + 1) as f64;
            pass &= rate >= designed - PREDICTOR_ORDER_TOL;
            parts.push(format!("N={degree} f^({k}) rate {rate:.2}"));
        }
    }
    for degree in 3..=4 {
        let order = advection_order(degree);
        pass &= (order - (degree + 1) as f64).abs() <= PREDICTOR_ORDER_TOL;
        parts.push(format!("advection N={degree} order {order:.2}"));
    }
    verdict(pass, parts.join("; "))
}

fn relative_drift(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter()
        .zip(b)
        .fold(0.0, |m: f64, (x, y)| m.max((x - y).abs() / scale))
}

fn criterion_9() -> Verdict {
    let mesh = Mesh1D::uniform(-0.5, 0.5, 40, BoundaryCondition::Periodic).unwrap();
    let s1 = Solver1D::new(TenMoment::new(), 3, mesh, SchemeConfig::default()).unwrap();
    let mut f1 = s1.project(|x| convergence_exact(x, 0.0));
    let before = s1.total(&f1);
    for _ in 0..1000 {
        let dt = s1.stable_dt(&f1).unwrap();
        s1.step(&mut f1, dt).unwrap();
    }
    let d1 = relative_drift(&before, &s1.total(&f1));

    let grid = Grid2D::new(
        8,
        8,
        [0.0, 0.0],
        [1.0, 1.0],
        [BoundaryCondition::Periodic; 2],
    )
    .unwrap();
    let s2 = Solver2D::new(TenMoment::new(), 2, grid, SchemeConfig::default()).unwrap();
    let mut f2 = s2.project(|x| {
        let a = 2.0 * PI * x[0];
        let b = 2.0 * PI * x[1];
        primitive_to_conserved(&[
            2.0 + a.sin() * b.cos(),
            0.5,
            -0.3,
            1.5 + 0.3 * b.sin(),
            0.1,
            1.2,
        ])
    });
    let before2 = s2.total(&f2);
    for _ in 0..1000 {
        let dt = s2.stable_dt(&f2).unwrap();
        s2.step(&mut f2, dt).unwrap();
    }
    let d2 = relative_drift(&before2, &s2.total(&f2));
    verdict(
        d1 <= DRIFT_TOL && d2 <= DRIFT_TOL,
        format!("relative drift after 1000 steps: 1-D {d1:.2e}, 2-D {d2:.2e}"),
    )
}

fn det(u: &State<6>) -> f64 {
    (TenMoment::new().constraints()[2].eval)(u)
}

fn criterion_10() -> Verdict {
    let mut runner = TestRunner::deterministic();
    let strategy = (
        (
            0.1f64..2.0,
            -2.0f64..2.0,
            -2.0f64..2.0,
            0.1f64..3.0,
            -1.0f64..1.0,
            0.1f64..3.0,
        ),
        prop::collection::vec(-3.0f64..3.0, 6),
    );
    let mut worst: f64 = 0.0;
    let mut violations = 0;
    let mut cases = 0;
    while cases < 1000 {
        let ((rho, v1, v2, p11, c, p22), delta) = strategy.new_tree(&mut runner).unwrap().current();
        // correlation parameter keeps the pressure tensor positive definite
        let p12 = 0.95 * c * (p11 * p22).sqrt();
        let low = primitive_to_conserved(&[rho, v1, v2, p11, p12, p22]);
        let high: State<6> = std::array::from_fn(|i| low[i] + delta[i]);
        let target = 0.1 * det(&low);
        cases += 1;
        let theta = blend_theta_root(det, &high, &low, target);
        let blended: State<6> = std::array::from_fn(|i| theta * high[i] + (1.0 - theta) * low[i]);
        if det(&blended) < target {
            violations += 1;
        }
        // brute force: walk up the grid until the blend first misses the target
        let steps = 10_000;
        let mut scan = 0.0;
        for j in 1..=steps {
            let t = j as f64 / steps as f64;
            let b: State<6> = std::array::from_fn(|i| t * high[i] + (1.0 - t) * low[i]);
            if det(&b) < target {
                break;
            }
            scan = t;
        }
        worst = worst.max((theta - scan).abs());
    }
    verdict(
        worst <= THETA_TOL && violations == 0,
        format!(
            "{cases} cases: max |theta - scan| {worst:.2e}, constraint violations {violations}"
        ),
    )
}

type Criterion<'a> = Box<dyn Fn() -> Verdict + 'a>;

fn main() -> ExitCode {
    let clock = Instant::now();
    let shared = shared();
    println!("shared runs computed in {:.1}s", secs(clock.elapsed()));
    let criteria: Vec<(&str, Criterion)> = vec![
        (
            "convergence order N=1,2,3",
            Box::new(|| criterion_1(&shared)),
        ),
        ("decomposition identity", Box::new(|| criterion_2(&shared))),
        (
            "1-D near vacuum admissibility",
            Box::new(|| criterion_3(&shared)),
        ),
        (
            "admissibility with sources",
            Box::new(|| criterion_4(&shared)),
        ),
        ("Shu-Osher with TVB", Box::new(|| criterion_5(&shared))),
        (
            "2-D near vacuum symmetry",
            Box::new(|| criterion_6(&shared)),
        ),
        ("limiter transparency", Box::new(|| criterion_7(&shared))),
        ("predictor order", Box::new(criterion_8)),
        ("conservation", Box::new(criterion_9)),
        ("theta root solver", Box::new(criterion_10)),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failures += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        criteria.len() - failures,
        criteria.len(),
        secs(clock.elapsed())
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
