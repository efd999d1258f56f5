//! `run`, `compare` and `sweep`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::thread;

use cumulative_cbf::sim::SimLog;
use cumulative_cbf::{run as simulate, ClassK, Config, Kernel};

use crate::error::{CliError, Result, EXIT_FAULT, EXIT_OK};
use crate::report::{self, RunManifest};
use crate::scenario::load_config;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Copy, Default)]
pub struct GlobalOpts {
    pub dt_override: Option<f64>,
    pub seed: Option<u64>,
    pub quiet: bool,
}

impl GlobalOpts {
    fn apply(&self, cfg: Config) -> Config {
        match self.dt_override {
            Some(dt) => cfg.with_dt(dt),
            None => cfg,
        }
    }
}

fn check(cfg: Config, origin: &Path) -> Result<Config> {
    cfg.validate().map_err(|e| CliError::config(origin, e))?;
    Ok(cfg)
}

fn simulate_checked(cfg: &Config, origin: &Path) -> Result<SimLog<f64>> {
    simulate(cfg.clone()).map_err(|e| CliError::config(origin, e))
}

fn summary_line(dir: &Path, m: &RunManifest) -> String {
    let opt = |v: Option<f64>| v.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
    format!(
        "{}: {} after {} steps, min h_obs {}, max J_bar {}, max J_pt {}, max J_monitor {:.4} -> {}",
        m.scenario,
        m.status,
        m.metrics.steps,
        opt(m.metrics.min_h_obs),
        opt(m.metrics.max_j_bar),
        opt(m.metrics.max_j_point),
        m.metrics.max_j_monitor,
        dir.display()
    )
}

fn status_code(log: &SimLog<f64>) -> u8 {
    if log.status.is_fault() {
        EXIT_FAULT
    } else {
        EXIT_OK
    }
}

pub fn cmd_run(config: &Path, out: &Path, opts: GlobalOpts) -> Result<u8> {
    let cfg = check(opts.apply(load_config(config)?), config)?;
    let log = simulate_checked(&cfg, config)?;
    let manifest = report::write_run(out, &cfg, &log, opts.seed)?;
    if !opts.quiet {
        println!("{}", summary_line(out, &manifest));
    }
    Ok(status_code(&log))
}

/// Runs every config on its own thread; results keep input order.
fn run_all(configs: &[(PathBuf, Config)]) -> Vec<Result<SimLog<f64>>> {
    thread::scope(|s| {
        let handles: Vec<_> = configs
            .iter()
            .map(|(path, cfg)| s.spawn(move || simulate_checked(cfg, path)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    })
}

pub const COMPARE_CSV: &str = "compare.csv";
pub const OVERLAY_SVG: &str = "jcurves_overlay.svg";

fn run_tag(index: usize, cfg: &Config) -> String {
    format!("run{index}_{}", cfg.name)
}

/// Time column, the shared limit, then a `J` and `J_monitor_max` column
/// group per run. Shorter runs leave trailing cells empty.
pub fn compare_csv(runs: &[(String, Config, SimLog<f64>)]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string(), "J_limit".to_string()];
    for (tag, _, _) in runs {
        header.push(format!("{tag}:J"));
        header.push(format!("{tag}:J_monitor_max"));
    }
    w.write_record(&header).expect("in-memory write");
    let series: Vec<_> = runs
        .iter()
        .map(|(_, cfg, log)| {
            (
                report::headline_series(cfg, log),
                report::monitor_series(log),
            )
        })
        .collect();
    let rows = series.iter().map(|(h, _)| h.len()).max().unwrap_or(0);
    let (_, cfg0, _) = &runs[0];
    for i in 0..rows {
        let t = cfg0.dt * i as f64;
        let mut row = vec![t.to_string(), cfg0.j_limit.to_string()];
        for (head, mon) in &series {
            let cell = |s: &Vec<(f64, f64)>| s.get(i).map(|p| p.1.to_string()).unwrap_or_default();
            row.push(cell(head));
            row.push(cell(mon));
        }
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory writer")
}

pub fn cmd_compare(configs: &[PathBuf], out: &Path, opts: GlobalOpts) -> Result<u8> {
    if configs.len() < 2 {
        return Err(CliError::Usage("compare needs at least two configs".into()));
    }
    let mut loaded = Vec::with_capacity(configs.len());
    for path in configs {
        let cfg = check(opts.apply(load_config(path)?), path)?;
        loaded.push((path.clone(), cfg));
    }
    let (first_path, first) = &loaded[0];
    for (path, cfg) in &loaded[1..] {
        if cfg.j_limit != first.j_limit {
            return Err(CliError::Usage(format!(
                "J_limit differs: {} in {} vs {} in {}",
                cfg.j_limit,
                path.display(),
                first.j_limit,
                first_path.display()
            )));
        }
        if cfg.dt != first.dt {
            return Err(CliError::Usage(format!(
                "dt differs: {} in {} vs {} in {}",
                cfg.dt,
                path.display(),
                first.dt,
                first_path.display()
            )));
        }
    }
    let logs = run_all(&loaded);
    let mut runs = Vec::with_capacity(loaded.len());
    let mut code = EXIT_OK;
    for (i, ((_, cfg), log)) in loaded.into_iter().zip(logs).enumerate() {
        let log = log?;
        let tag = run_tag(i, &cfg);
        let dir = out.join(&tag);
        let manifest = report::write_run(&dir, &cfg, &log, opts.seed)?;
        if !opts.quiet {
            println!("{}", summary_line(&dir, &manifest));
        }
        code = code.max(status_code(&log));
        runs.push((tag, cfg, log));
    }
    report::write_file(&out.join(COMPARE_CSV), &compare_csv(&runs))?;
    report::write_file(
        &out.join(OVERLAY_SVG),
        report::overlay_figure(&runs).render().as_bytes(),
    )?;
    Ok(code)
}

/// Scalar config fields a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Peak,
    Falloff,
    JLimit,
    Alpha1,
    Alpha2,
    Dt,
}

impl SweepParam {
    pub const ALL: [SweepParam; 6] = [
        Self::Peak,
        Self::Falloff,
        Self::JLimit,
        Self::Alpha1,
        Self::Alpha2,
        Self::Dt,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Peak => "A",
            Self::Falloff => "sigma",
            Self::JLimit => "J_limit",
            Self::Alpha1 => "alpha1",
            Self::Alpha2 => "alpha2",
            Self::Dt => "dt",
        }
    }

    fn valid_names() -> String {
        Self::ALL.map(|p| p.name()).join(", ")
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown sweep parameter `{s}`; valid names: {}",
                    Self::valid_names()
                ))
            })
    }
}

/// Parses `--param A,sigma` and `--values 0.5:0.35,1.0:0.55` into one
/// assignment list per run.
pub fn parse_sweep(param: &str, values: &[String]) -> Result<(Vec<SweepParam>, Vec<Vec<f64>>)> {
    let params = param
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<Result<Vec<SweepParam>>>()?;
    for (i, p) in params.iter().enumerate() {
        if params[..i].contains(p) {
            return Err(CliError::Usage(format!(
                "sweep parameter `{p}` given twice"
            )));
        }
    }
    if values.is_empty() {
        return Err(CliError::Usage("no sweep values given".into()));
    }
    let points = values
        .iter()
        .map(|v| {
            let parts: Vec<&str> = v.split(':').collect();
            if parts.len() != params.len() {
                return Err(CliError::Usage(format!(
                    "sweep value `{v}` has {} components, expected {}",
                    parts.len(),
                    params.len()
                )));
            }
            parts
                .iter()
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Usage(format!("sweep value `{s}` is not a number")))
                })
                .collect()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok((params, points))
}

/// Applies one sweep point to `cfg`.
pub fn apply_sweep(
    mut cfg: Config,
    params: &[SweepParam],
    values: &[f64],
) -> std::result::Result<Config, String> {
    let mut peak = cfg.kernel.peak();
    let mut falloff = cfg.kernel.falloff();
    for (&p, &v) in params.iter().zip(values) {
        match p {
            SweepParam::Peak => peak = v,
            SweepParam::Falloff => falloff = v,
            SweepParam::JLimit => cfg.j_limit = v,
            SweepParam::Alpha1 => {
                cfg.alpha1 = ClassK::new(v).map_err(|e| format!("alpha1: {e}"))?
            }
            SweepParam::Alpha2 => {
                cfg.alpha2 = ClassK::new(v).map_err(|e| format!("alpha2: {e}"))?
            }
            SweepParam::Dt => {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(format!("dt must be positive and finite, got {v}"));
                }
                cfg = cfg.with_dt(v);
            }
        }
    }
    cfg.kernel = Kernel::new(peak, falloff).map_err(|e| e.to_string())?;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn point_label(params: &[SweepParam], values: &[f64]) -> String {
    params
        .iter()
        .zip(values)
        .map(|(p, v)| format!("{p}={v}"))
        .collect::<Vec<_>>()
        .join("_")
}

pub const SUMMARY_CSV: &str = "summary.csv";

pub fn cmd_sweep(
    config: &Path,
    param: &str,
    values: &[String],
    out: &Path,
    opts: GlobalOpts,
) -> Result<u8> {
    let (params, points) = parse_sweep(param, values)?;
    let base = check(opts.apply(load_config(config)?), config)?;
    let mut jobs = Vec::with_capacity(points.len());
    for vals in &points {
        let cfg =
            apply_sweep(base.clone(), &params, vals).map_err(|e| CliError::config(config, e))?;
        jobs.push((config.to_path_buf(), cfg));
    }
    let logs = run_all(&jobs);

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = params.iter().map(|p| p.name().to_string()).collect();
    header.extend(
        [
            "dir",
            "status",
            "steps",
            "min_h_obs",
            "max_J_bar",
            "max_J_pt",
            "max_J_monitor",
            "J_overshoot",
            "final_distance_to_goal",
        ]
        .map(String::from),
    );
    w.write_record(&header).expect("in-memory write");
    let mut code = EXIT_OK;
    for ((vals, (_, cfg)), log) in points.iter().zip(&jobs).zip(logs) {
        let log = log?;
        let label = point_label(&params, vals);
        let dir = out.join(&label);
        let manifest = report::write_run(&dir, cfg, &log, opts.seed)?;
        if !opts.quiet {
            println!("{}", summary_line(&dir, &manifest));
        }
        code = code.max(status_code(&log));
        let m = &manifest.metrics;
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        let constrained = m.max_j_bar.or(m.max_j_point);
        let overshoot = constrained.map(|j| (j - cfg.j_limit).max(0.0));
        let mut row: Vec<String> = vals.iter().map(|v| v.to_string()).collect();
        row.extend([
            label,
            manifest.status.clone(),
            m.steps.to_string(),
            opt(m.min_h_obs),
            opt(m.max_j_bar),
            opt(m.max_j_point),
            m.max_j_monitor.to_string(),
            opt(overshoot),
            m.final_distance_to_goal.to_string(),
        ]);
        w.write_record(&row).expect("in-memory write");
    }
    report::create_dir(out)?;
    report::write_file(
        &out.join(SUMMARY_CSV),
        &w.into_inner().expect("in-memory writer"),
    )?;
    Ok(code)
}
