//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use ccbf::commands::{cmd_run, GlobalOpts};
use ccbf::scenario::load_config;
use cumulative_cbf::sim::{SimLog, TerminalStatus};
use cumulative_cbf::{
    run, solve, Config, ConstraintLabel, HalfPlaneConstraint, Kernel, Point, QpProblem, Segment,
    Vec2d,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const J_LIMIT: f64 = 0.2;
const BUDGET_SLACK: f64 = 1.01;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.json"))
}

fn load(name: &str) -> Config {
    load_config(&bundled(name)).expect("bundled scenario loads")
}

fn simulate(cfg: &Config) -> SimLog<f64> {
    run(cfg.clone()).expect("valid scenario")
}

fn threads() -> usize {
    thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(4)
        .min(16)
}

/// Runs `f` on `n` seeded work items split across threads and collects
/// results in item order.
fn par_map<R: Send>(n: usize, f: impl Fn(usize) -> R + Sync) -> Vec<R> {
    let t = threads();
    let chunk = n.div_ceil(t);
    thread::scope(|s| {
        let handles: Vec<_> = (0..t)
            .map(|k| {
                let f = &f;
                s.spawn(move || {
                    (k * chunk..((k + 1) * chunk).min(n))
                        .map(f)
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().unwrap())
            .collect()
    })
}

fn c1_obstacle_only_exceeds_budget() -> Outcome {
    let cfg = load("obstacle_only");
    let log = simulate(&cfg);
    let m = log.metrics(cfg.x_goal);
    let min_h = m.min_h_obs.unwrap_or(f64::NEG_INFINITY);
    let pass = log.status == TerminalStatus::ReachedGoal
        && m.final_distance_to_goal <= 0.05
        && min_h >= -1e-3
        && m.max_j_monitor > J_LIMIT;
    outcome(
        pass,
        format!(
            "status {}, distance to goal {:.4} (<= 0.05), min h_obs {min_h:.4} (>= -1e-3), max monitor J {:.4} (> {J_LIMIT})",
            log.status.as_str(),
            m.final_distance_to_goal,
            m.max_j_monitor
        ),
    )
}

fn c2_discretized_protects_samples() -> Outcome {
    let cfg = load("discretized");
    let log = simulate(&cfg);
    let m = log.metrics(cfg.x_goal);
    let n_points = log.final_accumulators.points.len();
    let worst = m.max_j_point.unwrap_or(f64::INFINITY);
    let pass = n_points == 8
        && worst <= J_LIMIT * BUDGET_SLACK
        && log.status == TerminalStatus::ReachedGoal;
    outcome(
        pass,
        format!(
            "{n_points} sample points, max J {worst:.6} (<= {:.3}), status {}",
            J_LIMIT * BUDGET_SLACK,
            log.status.as_str()
        ),
    )
}

fn c3_bound_protects_boundary() -> Outcome {
    let cfg = load("bound");
    let log = simulate(&cfg);
    let m = log.metrics(cfg.x_goal);
    let worst = m.max_j_bar.unwrap_or(f64::INFINITY);
    let edge_max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sandwich_gap = f64::NEG_INFINITY;
    for r in &log.records {
        sandwich_gap = sandwich_gap.max(r.monitor_j_max - edge_max(&r.edge_j_bar));
    }
    let fin = &log.final_accumulators;
    let fin_edges: Vec<f64> = fin.edges.iter().map(|e| e.j_bar).collect();
    sandwich_gap = sandwich_gap.max(fin.monitor_max() - edge_max(&fin_edges));
    let pass = fin.edges.len() == 4
        && worst <= J_LIMIT * BUDGET_SLACK
        && log.status == TerminalStatus::ReachedGoal
        && sandwich_gap <= 1e-9;
    outcome(
        pass,
        format!(
            "max edge J_bar {worst:.6} (<= {:.3}), status {}, max(J_monitor - J_bar) {sandwich_gap:.3e} (<= 1e-9)",
            J_LIMIT * BUDGET_SLACK,
            log.status.as_str()
        ),
    )
}

fn c4_wider_kernel_wider_clearance() -> Outcome {
    let clearance = |name: &str| {
        let cfg = load(name);
        simulate(&cfg)
            .metrics(cfg.x_goal)
            .min_h_obs
            .unwrap_or(f64::NEG_INFINITY)
    };
    let narrow = clearance("bound");
    let wide = clearance("bound_wide_kernel");
    outcome(
        wide > narrow,
        format!("min clearance A=1.0,sigma=0.55: {wide:.4} vs A=0.5,sigma=0.35: {narrow:.4}"),
    )
}

fn c5_saturated_goal_unreachable() -> Outcome {
    let cfg = load("goal_at_boundary");
    let log = simulate(&cfg);
    let m = log.metrics(cfg.x_goal);
    let worst = m.max_j_bar.unwrap_or(f64::INFINITY);
    let pass = log.status == TerminalStatus::MaxSteps
        && m.steps == 500
        && m.final_distance_to_goal > cfg.goal_tolerance
        && worst <= J_LIMIT * BUDGET_SLACK;
    outcome(
        pass,
        format!(
            "status {} after {} steps, distance to goal {:.4}, max J_bar {worst:.6} (<= {:.3})",
            log.status.as_str(),
            m.steps,
            m.final_distance_to_goal,
            J_LIMIT * BUDGET_SLACK
        ),
    )
}

fn random_point(rng: &mut ChaCha8Rng, r: f64) -> Point {
    Vec2d::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn c6_segment_maximum_oracle() -> Outcome {
    const TRIALS: usize = 10_000;
    const SAMPLES: usize = 100_000;
    let results = par_map(TRIALS, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x6000 + i as u64);
        let kernel = Kernel::new(rng.gen_range(0.05..3.0), rng.gen_range(0.05..3.0)).unwrap();
        let (a, b) = loop {
            let (a, b) = (random_point(&mut rng, 3.0), random_point(&mut rng, 3.0));
            if a.distance(b) > 1e-6 {
                break (a, b);
            }
        };
        let seg = Segment::new(a, b).unwrap();
        let x = random_point(&mut rng, 4.0);
        let closed = kernel.argmax_on_segment(&seg, x).p_star;
        let d = b - a;
        let grid = (0..SAMPLES)
            .map(|k| kernel.eval(a + d * (k as f64 / (SAMPLES - 1) as f64), x))
            .fold(f64::NEG_INFINITY, f64::max);
        (closed - grid, (closed - grid).abs())
    });
    let worst_below = results
        .iter()
        .map(|r| -r.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let worst_abs = results.iter().map(|r| r.1).fold(0.0, f64::max);
    outcome(
        worst_below <= 1e-6 && worst_abs <= 1e-6,
        format!("{TRIALS} triples x {SAMPLES} samples: worst grid excess {worst_below:.3e}, worst |diff| {worst_abs:.3e} (<= 1e-6)"),
    )
}

/// Stationarity: `u - k_ref = sum lambda_i a_i` over active rows with
/// `lambda >= 0`, searched over active subsets of size at most two.
fn kkt_residual(p: &QpProblem<f64>, u: Vec2d, active: &[usize]) -> f64 {
    let g = u - p.k_ref;
    if g.norm() <= 1e-12 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    let normals: Vec<Vec2d> = active.iter().map(|&i| p.constraints[i].a).collect();
    for a in &normals {
        let lam = (g.dot(*a) / a.norm_sq()).max(0.0);
        best = best.min((g - *a * lam).norm());
    }
    for (i, a) in normals.iter().enumerate() {
        for b in &normals[i + 1..] {
            let det = a.cross(*b);
            if det.abs() < 1e-12 {
                continue;
            }
            let l1 = g.cross(*b) / det;
            let l2 = a.cross(g) / det;
            if l1 >= -1e-9 && l2 >= -1e-9 {
                best = best.min((g - *a * l1 - *b * l2).norm());
            }
        }
    }
    best
}

struct QpCheck {
    objective_excess: f64,
    worst_slack: f64,
    kkt: f64,
    grid_feasible: bool,
}

fn c7_qp_oracle() -> Outcome {
    const TRIALS: usize = 10_000;
    const GRID: usize = 401;
    let results = par_map(TRIALS, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7000 + i as u64);
        let anchor = random_point(&mut rng, 4.5);
        let n = rng.gen_range(1..=6);
        let constraints: Vec<_> = (0..n)
            .map(|k| {
                let t = rng.gen_range(0.0..std::f64::consts::TAU);
                let a = Vec2d::new(t.cos(), t.sin()) * rng.gen_range(0.2..3.0);
                HalfPlaneConstraint::new(
                    a,
                    a.dot(anchor) - rng.gen_range(0.0..2.0),
                    ConstraintLabel::Point(k),
                )
            })
            .collect();
        let p = QpProblem {
            k_ref: random_point(&mut rng, 6.0),
            constraints,
        };
        let sol = solve(&p).expect("anchored problem is feasible");
        let mut best = f64::INFINITY;
        for gi in 0..GRID {
            let u1 = -5.0 + 10.0 * gi as f64 / (GRID - 1) as f64;
            for gj in 0..GRID {
                let u = Vec2d::new(u1, -5.0 + 10.0 * gj as f64 / (GRID - 1) as f64);
                if p.constraints.iter().all(|c| c.slack(u) >= 0.0) {
                    best = best.min((u - p.k_ref).norm_sq());
                }
            }
        }
        QpCheck {
            objective_excess: if best.is_finite() {
                sol.objective - best
            } else {
                f64::NEG_INFINITY
            },
            worst_slack: p
                .constraints
                .iter()
                .map(|c| c.slack(sol.u))
                .fold(f64::INFINITY, f64::min),
            kkt: kkt_residual(&p, sol.u, &sol.active),
            grid_feasible: best.is_finite(),
        }
    });
    let excess = results
        .iter()
        .map(|r| r.objective_excess)
        .fold(f64::NEG_INFINITY, f64::max);
    let slack = results
        .iter()
        .map(|r| r.worst_slack)
        .fold(f64::INFINITY, f64::min);
    let kkt = results.iter().map(|r| r.kkt).fold(0.0, f64::max);
    let with_grid = results.iter().filter(|r| r.grid_feasible).count();
    outcome(
        excess <= 0.0 && slack >= -1e-9 && kkt <= 1e-9,
        format!(
            "{TRIALS} problems ({with_grid} with feasible grid points): max (objective - grid best) {excess:.3e} (<= 0), worst slack {slack:.3e} (>= -1e-9), worst KKT residual {kkt:.3e}"
        ),
    )
}

fn c8_gradient_check() -> Outcome {
    const TRIALS: usize = 1_000;
    const H: f64 = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(0x8000);
    let mut worst: f64 = 0.0;
    for _ in 0..TRIALS {
        let kernel = Kernel::new(rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0)).unwrap();
        let q = random_point(&mut rng, 2.0);
        let t = rng.gen_range(0.0..std::f64::consts::TAU);
        let x = q + Vec2d::new(t.cos(), t.sin())
            * (kernel.effective_radius() * rng.gen_range(0.0..0.99));
        let g = kernel.grad_x(q, x);
        let e1 = Vec2d::new(H, 0.0);
        let e2 = Vec2d::new(0.0, H);
        let d1 = (kernel.eval(q, x + e1) - kernel.eval(q, x - e1)) / (2.0 * H);
        let d2 = (kernel.eval(q, x + e2) - kernel.eval(q, x - e2)) / (2.0 * H);
        worst = worst.max((g.x1 - d1).abs()).max((g.x2 - d2).abs());
    }
    outcome(
        worst <= 1e-5,
        format!(
            "{TRIALS} interior points: worst |grad - central difference| {worst:.3e} (<= 1e-5)"
        ),
    )
}

fn c9_discretization_convergence() -> Outcome {
    let cfg = load("bound");
    let overshoot: Vec<f64> = [0.1, 0.01, 0.001]
        .iter()
        .map(|&dt| {
            let fine = cfg.clone().with_dt(dt);
            let m = simulate(&fine).metrics(fine.x_goal);
            (m.max_j_bar.unwrap_or(f64::INFINITY) - fine.j_limit).max(0.0)
        })
        .collect();
    let monotone = overshoot.windows(2).all(|w| w[1] <= w[0]);
    outcome(
        monotone && overshoot[2] <= 1e-4,
        format!(
            "J_bar overshoot at dt 0.1/0.01/0.001: {:.3e} / {:.3e} / {:.3e} (non-increasing, last <= 1e-4)",
            overshoot[0], overshoot[1], overshoot[2]
        ),
    )
}

fn c10_determinism() -> Outcome {
    let tmp = tempfile::TempDir::new().expect("temp dir");
    let opts = GlobalOpts {
        quiet: true,
        ..Default::default()
    };
    let names = [
        "obstacle_only",
        "discretized",
        "bound",
        "bound_wide_kernel",
        "goal_at_boundary",
    ];
    let files = [
        "trajectory.csv",
        "accumulators.csv",
        "constraints.csv",
        "trajectory.svg",
        "jcurves.svg",
    ];
    let mut mismatches = Vec::new();
    for name in names {
        let dirs = ["a", "b"].map(|s| tmp.path().join(format!("{name}_{s}")));
        for d in &dirs {
            cmd_run(&bundled(name), d, opts).expect("run succeeds");
        }
        for f in files {
            let a = fs::read(dirs[0].join(f)).expect("output written");
            let b = fs::read(dirs[1].join(f)).expect("output written");
            if a != b {
                mismatches.push(format!("{name}/{f}"));
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!(
            "{} scenarios x {} files compared, mismatches: {}",
            names.len(),
            files.len(),
            if mismatches.is_empty() {
                "none".to_string()
            } else {
                mismatches.join(", ")
            }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "obstacle-only run exceeds the noise budget",
            c1_obstacle_only_exceeds_budget,
        ),
        (
            "discretized mode protects the sample points",
            c2_discretized_protects_samples,
        ),
        (
            "bound mode protects the entire boundary",
            c3_bound_protects_boundary,
        ),
        (
            "wider kernel yields wider clearance",
            c4_wider_kernel_wider_clearance,
        ),
        (
            "saturated goal is unreachable",
            c5_saturated_goal_unreachable,
        ),
        (
            "segment maximum matches grid search",
            c6_segment_maximum_oracle,
        ),
        ("QP matches grid oracle with KKT", c7_qp_oracle),
        (
            "kernel gradient matches finite differences",
            c8_gradient_check,
        ),
        (
            "bound overshoot vanishes as dt shrinks",
            c9_discretization_convergence,
        ),
        ("bundled outputs are byte-identical", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "[{}] {:>2}. {title}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
