//! Everything written for a single run: CSV tables, plots and the manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use cumulative_cbf::sim::{QpStatus, SimLog};
use cumulative_cbf::{Config, Metrics, NoiseMode};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::scenario::{canonical_json, config_hash};
use crate::svg::{Figure, Marker, Series, PALETTE};
use crate::tables;

pub const TRAJECTORY_CSV: &str = "trajectory.csv";
pub const ACCUMULATORS_CSV: &str = "accumulators.csv";
pub const CONSTRAINTS_CSV: &str = "constraints.csv";
pub const TRAJECTORY_SVG: &str = "trajectory.svg";
pub const JCURVES_SVG: &str = "jcurves.svg";
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    /// SHA-256 of the canonical config JSON.
    pub config_hash: String,
    /// Canonical config with every field explicit.
    pub config: serde_json::Value,
    /// Output files relative to the manifest's directory.
    pub outputs: BTreeMap<String, String>,
    pub status: String,
    pub infeasible_steps: usize,
    pub seed: Option<u64>,
    pub metrics: Metrics,
}

impl RunManifest {
    pub fn new(cfg: &Config, log: &SimLog<f64>, seed: Option<u64>) -> Self {
        let outputs = [
            ("trajectory_csv", TRAJECTORY_CSV),
            ("accumulators_csv", ACCUMULATORS_CSV),
            ("constraints_csv", CONSTRAINTS_CSV),
            ("trajectory_svg", TRAJECTORY_SVG),
            ("jcurves_svg", JCURVES_SVG),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
        Self {
            scenario: cfg.name.clone(),
            config_hash: config_hash(cfg),
            config: serde_json::from_str(&canonical_json(cfg)).expect("canonical json parses"),
            outputs,
            status: log.status.as_str().to_string(),
            infeasible_steps: log
                .records
                .iter()
                .filter(|r| r.qp_status != QpStatus::Optimal)
                .count(),
            seed,
            metrics: log.metrics(cfg.x_goal),
        }
    }
}

/// Name of the headline exposure series for a noise mode.
pub fn headline_name(cfg: &Config) -> &'static str {
    match cfg.noise_mode {
        NoiseMode::Off => "J_monitor_max",
        NoiseMode::Discretized { .. } => "J_pt_max",
        NoiseMode::Bound => "J_bar_max",
    }
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// The constrained exposure quantity per logged time, including the final
/// state: max over monitors (off), sample points (discretized) or edge
/// bounds (bound).
pub fn headline_series(cfg: &Config, log: &SimLog<f64>) -> Vec<(f64, f64)> {
    let pick = |points: &[f64], edges: &[f64], monitor: f64| match cfg.noise_mode {
        NoiseMode::Off => monitor,
        NoiseMode::Discretized { .. } => max_of(points),
        NoiseMode::Bound => max_of(edges),
    };
    let fin = &log.final_accumulators;
    let fin_points: Vec<f64> = fin.points.iter().map(|a| a.j).collect();
    let fin_edges: Vec<f64> = fin.edges.iter().map(|a| a.j_bar).collect();
    log.records
        .iter()
        .map(|r| (r.t, pick(&r.point_j, &r.edge_j_bar, r.monitor_j_max)))
        .chain(std::iter::once((
            log.final_state.t,
            pick(&fin_points, &fin_edges, fin.monitor_max()),
        )))
        .collect()
}

pub fn monitor_series(log: &SimLog<f64>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = log.records.iter().map(|r| (r.t, r.monitor_j_max)).collect();
    out.push((log.final_state.t, log.final_accumulators.monitor_max()));
    out
}

fn limit_series(j_limit: f64, t_end: f64) -> Series {
    Series::new("J_limit", vec![(0.0, j_limit), (t_end, j_limit)], "#000000").dashed()
}

pub fn trajectory_figure(cfg: &Config, log: &SimLog<f64>) -> Figure {
    let mut path: Vec<(f64, f64)> = log.records.iter().map(|r| (r.x.x1, r.x.x2)).collect();
    path.push((log.final_state.x.x1, log.final_state.x.x2));
    let (lo, hi) = (cfg.obstacle.min_corner(), cfg.obstacle.max_corner());
    Figure {
        title: format!("{}: trajectory ({})", cfg.name, log.status.as_str()),
        x_label: "x1 [m]".into(),
        y_label: "x2 [m]".into(),
        equal_aspect: true,
        series: vec![Series::new("path", path, PALETTE[0])],
        rects: vec![((lo.x1, lo.x2), (hi.x1, hi.x2))],
        markers: vec![
            Marker {
                label: "start".into(),
                at: (cfg.x0.x1, cfg.x0.x2),
                color: PALETTE[2].into(),
            },
            Marker {
                label: "goal".into(),
                at: (cfg.x_goal.x1, cfg.x_goal.x2),
                color: PALETTE[1].into(),
            },
        ],
    }
}

pub fn jcurves_figure(cfg: &Config, log: &SimLog<f64>) -> Figure {
    let fin = &log.final_accumulators;
    let mut series = Vec::new();
    let cols = tables::accumulator_columns(cfg);
    for (i, name) in cols.iter().enumerate() {
        let fin_val = fin
            .points
            .get(i)
            .map(|a| a.j)
            .or_else(|| fin.edges.get(i).map(|a| a.j_bar))
            .unwrap_or(f64::NAN);
        let mut pts: Vec<(f64, f64)> = log
            .records
            .iter()
            .map(|r| {
                (
                    r.t,
                    r.point_j
                        .get(i)
                        .or(r.edge_j_bar.get(i))
                        .copied()
                        .unwrap_or(f64::NAN),
                )
            })
            .collect();
        pts.push((log.final_state.t, fin_val));
        series.push(Series::new(
            name.clone(),
            pts,
            PALETTE[(i + 2) % PALETTE.len()],
        ));
    }
    series.push(Series::new(
        "J_monitor_max",
        monitor_series(log),
        PALETTE[0],
    ));
    series.push(limit_series(cfg.j_limit, log.final_state.t));
    Figure {
        title: format!("{}: accumulated exposure", cfg.name),
        x_label: "t [s]".into(),
        y_label: "J".into(),
        series,
        ..Default::default()
    }
}

/// Overlay of each run's headline series with the shared limit.
pub fn overlay_figure(runs: &[(String, Config, SimLog<f64>)]) -> Figure {
    let mut series: Vec<Series> = runs
        .iter()
        .enumerate()
        .map(|(i, (tag, cfg, log))| {
            Series::new(
                format!("{tag} {}", headline_name(cfg)),
                headline_series(cfg, log),
                PALETTE[i % PALETTE.len()],
            )
        })
        .collect();
    let t_end = runs
        .iter()
        .map(|(_, _, l)| l.final_state.t)
        .fold(0.0, f64::max);
    if let Some((_, cfg, _)) = runs.first() {
        series.push(limit_series(cfg.j_limit, t_end));
    }
    Figure {
        title: "accumulated exposure".into(),
        x_label: "t [s]".into(),
        y_label: "J".into(),
        series,
        ..Default::default()
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

/// Writes all per-run outputs into `dir` and returns the manifest.
pub fn write_run(
    dir: &Path,
    cfg: &Config,
    log: &SimLog<f64>,
    seed: Option<u64>,
) -> Result<RunManifest> {
    create_dir(dir)?;
    write_file(&dir.join(TRAJECTORY_CSV), &tables::trajectory_csv(cfg, log))?;
    write_file(&dir.join(ACCUMULATORS_CSV), &tables::accumulators_csv(log))?;
    write_file(&dir.join(CONSTRAINTS_CSV), &tables::constraints_csv(log))?;
    write_file(
        &dir.join(TRAJECTORY_SVG),
        trajectory_figure(cfg, log).render().as_bytes(),
    )?;
    write_file(
        &dir.join(JCURVES_SVG),
        jcurves_figure(cfg, log).render().as_bytes(),
    )?;
    let manifest = RunManifest::new(cfg, log, seed);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write_file(&dir.join(MANIFEST), text.as_bytes())?;
    Ok(manifest)
}
