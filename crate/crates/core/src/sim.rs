//! Explicit-Euler closed loop: reference controller, constraint assembly,
//! QP filter, then state and accumulator update on the same time grid.

use serde::{Deserialize, Serialize};

use crate::accumulator::{jmax_discretized, PointAccumulator, SegmentBoundAccumulator};
use crate::barrier::{
    h_obstacle, obstacle_constraint, point_noise_constraint, polygon_noise_constraints,
    ConstraintLabel, HalfPlaneConstraint, HocbfGains, NoiseBudget,
};
use crate::config::{InfeasiblePolicy, NoiseMode, ScenarioConfig};
use crate::error::{Error, Result};
use crate::geometry::{Point2, QuadFootprint, Segment2, Vec2};
use crate::qp::{self, QpError, QpProblem};
use crate::scalar::Scalar;

/// Proportional reference controller with unit gain.
pub fn k_ref<T: Scalar>(x: Point2<T>, goal: Point2<T>) -> Vec2<T> {
    goal - x
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimState<T> {
    pub step: usize,
    pub t: T,
    pub x: Point2<T>,
}

/// All exposure accumulators advanced by the loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Accumulators<T> {
    /// Constrained boundary samples (discretized mode only).
    pub points: Vec<PointAccumulator<T>>,
    /// Per-edge bounds (bound mode only).
    pub edges: Vec<SegmentBoundAccumulator<T>>,
    /// Dense observers; never constrained.
    pub monitors: Vec<PointAccumulator<T>>,
}

impl<T: Scalar> Accumulators<T> {
    fn advance(&mut self, sim: &Simulator<T>, x: Point2<T>) {
        let (k, dt) = (&sim.cfg.kernel, sim.cfg.dt);
        for a in self.points.iter_mut().chain(self.monitors.iter_mut()) {
            *a = a.step(k, x, dt);
        }
        for a in self.edges.iter_mut() {
            *a = a.step(k, x, dt);
        }
    }

    pub fn monitor_max(&self) -> T {
        jmax_discretized(&self.monitors).expect("at least one monitor point")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QpStatus {
    Optimal,
    Infeasible,
}

impl QpStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Optimal => "optimal",
            Self::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalStatus {
    ReachedGoal,
    MaxSteps,
    InfeasibleHalt,
    PenetrationFault,
}

impl TerminalStatus {
    pub fn is_fault(&self) -> bool {
        matches!(self, Self::InfeasibleHalt | Self::PenetrationFault)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ReachedGoal => "reached_goal",
            Self::MaxSteps => "max_steps",
            Self::InfeasibleHalt => "infeasible_halt",
            Self::PenetrationFault => "penetration_fault",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintRecord<T> {
    pub label: ConstraintLabel,
    pub a: Vec2<T>,
    pub b: T,
    /// `a · u - b` at the applied input.
    pub slack: T,
}

/// One Euler interval `[t, t + dt]`; all quantities at its left endpoint
/// except the applied input.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<T> {
    pub t: T,
    pub x: Point2<T>,
    pub u_ref: Vec2<T>,
    pub u: Vec2<T>,
    pub h_obs: T,
    pub constraints: Vec<ConstraintRecord<T>>,
    pub active: Vec<ConstraintLabel>,
    pub point_j: Vec<T>,
    pub edge_j_bar: Vec<T>,
    pub monitor_j: Vec<T>,
    pub monitor_j_max: T,
    pub qp_status: QpStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimLog<T> {
    pub records: Vec<StepRecord<T>>,
    pub status: TerminalStatus,
    pub final_state: SimState<T>,
    pub final_accumulators: Accumulators<T>,
    /// `None` after a penetration fault.
    pub final_h_obs: Option<T>,
}

/// Headline numbers over a run, including the terminal state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics<T> {
    pub steps: usize,
    pub min_h_obs: Option<T>,
    pub max_j_bar: Option<T>,
    pub max_j_point: Option<T>,
    pub max_j_monitor: T,
    pub final_distance_to_goal: T,
}

fn fold_max<T: Scalar>(it: impl Iterator<Item = T>) -> Option<T> {
    it.reduce(T::max)
}

impl<T: Scalar> SimLog<T> {
    pub fn metrics(&self, goal: Point2<T>) -> RunMetrics<T> {
        let fin = &self.final_accumulators;
        let min_h_obs = self
            .records
            .iter()
            .map(|r| r.h_obs)
            .chain(self.final_h_obs)
            .reduce(T::min);
        let max_j_bar = fold_max(
            self.records
                .iter()
                .flat_map(|r| r.edge_j_bar.iter().copied())
                .chain(fin.edges.iter().map(|a| a.j_bar)),
        );
        let max_j_point = fold_max(
            self.records
                .iter()
                .flat_map(|r| r.point_j.iter().copied())
                .chain(fin.points.iter().map(|a| a.j)),
        );
        let max_j_monitor = self
            .records
            .iter()
            .map(|r| r.monitor_j_max)
            .fold(fin.monitor_max(), T::max);
        RunMetrics {
            steps: self.records.len(),
            min_h_obs,
            max_j_bar,
            max_j_point,
            max_j_monitor,
            final_distance_to_goal: self.final_state.x.distance(goal),
        }
    }
}

/// Why a step could not be taken.
#[derive(Debug, Clone, PartialEq)]
pub enum StepFault {
    Penetration(Error),
    Infeasible,
    Solver(QpError),
}

/// State, accumulators and record produced by one step.
pub type StepOutput<T> = (SimState<T>, Accumulators<T>, StepRecord<T>);

/// Validated scenario with precomputed geometry.
#[derive(Debug, Clone)]
pub struct Simulator<T> {
    cfg: ScenarioConfig<T>,
    edges: Vec<Segment2<T>>,
    gains: HocbfGains<T>,
    budget: NoiseBudget<T>,
}

impl<T: Scalar> Simulator<T> {
    pub fn new(cfg: ScenarioConfig<T>) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            edges: cfg.obstacle.edges(),
            gains: HocbfGains {
                alpha1: cfg.alpha1,
                alpha2: cfg.alpha2,
                formula: cfg.phi2_formula,
                outside: cfg.outside_support,
            },
            budget: cfg.budget(),
            cfg,
        })
    }

    pub fn config(&self) -> &ScenarioConfig<T> {
        &self.cfg
    }

    pub fn initial_state(&self) -> SimState<T> {
        SimState {
            step: 0,
            t: T::zero(),
            x: self.cfg.x0,
        }
    }

    pub fn initial_accumulators(&self) -> Accumulators<T> {
        let j0 = self.cfg.initial_exposure;
        let points = match self.cfg.noise_mode {
            NoiseMode::Discretized { k } => self
                .cfg
                .obstacle
                .boundary_samples(k)
                .into_iter()
                .map(|q| PointAccumulator::new(q, j0))
                .collect(),
            _ => Vec::new(),
        };
        let edges = match self.cfg.noise_mode {
            NoiseMode::Bound => self
                .edges
                .iter()
                .map(|&e| SegmentBoundAccumulator::new(e, j0))
                .collect(),
            _ => Vec::new(),
        };
        let monitors = self
            .cfg
            .obstacle
            .boundary_samples(self.cfg.monitor_points)
            .into_iter()
            .map(|q| PointAccumulator::new(q, j0))
            .collect();
        Accumulators {
            points,
            edges,
            monitors,
        }
    }

    fn footprint(&self, x: Point2<T>) -> QuadFootprint<T> {
        QuadFootprint::new(x, self.cfg.r_quad).expect("validated radius")
    }

    /// Obstacle row first, then the exposure rows selected by the noise mode.
    pub fn assemble_constraints(
        &self,
        x: Point2<T>,
        accs: &Accumulators<T>,
    ) -> Result<Vec<HalfPlaneConstraint<T>>> {
        let cfg = &self.cfg;
        let mut rows = vec![obstacle_constraint(
            &self.footprint(x),
            &cfg.obstacle,
            cfg.alpha1,
        )?];
        match cfg.noise_mode {
            NoiseMode::Off => {}
            NoiseMode::Discretized { .. } => {
                rows.extend(accs.points.iter().enumerate().map(|(i, acc)| {
                    point_noise_constraint(acc, &cfg.kernel, x, self.budget, &self.gains, i)
                }));
            }
            NoiseMode::Bound => {
                rows.extend(polygon_noise_constraints(
                    &self.edges,
                    &accs.edges,
                    &cfg.kernel,
                    x,
                    self.budget,
                    &self.gains,
                )?);
            }
        }
        Ok(rows)
    }

    pub fn step(
        &self,
        state: &SimState<T>,
        accs: &Accumulators<T>,
    ) -> std::result::Result<StepOutput<T>, StepFault> {
        let cfg = &self.cfg;
        let x = state.x;
        let h_obs =
            h_obstacle(&self.footprint(x), &cfg.obstacle).map_err(StepFault::Penetration)?;
        let constraints = self
            .assemble_constraints(x, accs)
            .map_err(StepFault::Penetration)?;
        let u_ref = k_ref(x, cfg.x_goal);
        let problem = QpProblem {
            k_ref: u_ref,
            constraints,
        };
        let (mut u, active, qp_status) = match qp::solve(&problem) {
            Ok(sol) => (sol.u, sol.active_labels, QpStatus::Optimal),
            Err(QpError::Infeasible) => match cfg.infeasible_policy {
                InfeasiblePolicy::Halt => return Err(StepFault::Infeasible),
                InfeasiblePolicy::ZeroInput => (Vec2::zero(), Vec::new(), QpStatus::Infeasible),
            },
            Err(e) => return Err(StepFault::Solver(e)),
        };
        if let Some(u_max) = cfg.u_max {
            let n = u.norm();
            if n > u_max {
                u = u * (u_max / n);
            }
        }

        let record = StepRecord {
            t: state.t,
            x,
            u_ref,
            u,
            h_obs,
            constraints: problem
                .constraints
                .iter()
                .map(|c| ConstraintRecord {
                    label: c.label,
                    a: c.a,
                    b: c.b,
                    slack: c.slack(u),
                })
                .collect(),
            active,
            point_j: accs.points.iter().map(|a| a.j).collect(),
            edge_j_bar: accs.edges.iter().map(|a| a.j_bar).collect(),
            monitor_j: accs.monitors.iter().map(|a| a.j).collect(),
            monitor_j_max: accs.monitor_max(),
            qp_status,
        };

        let mut next_accs = accs.clone();
        next_accs.advance(self, x);
        let step = state.step + 1;
        let next = SimState {
            step,
            t: T::lit(step as f64) * cfg.dt,
            x: x + u * cfg.dt,
        };
        Ok((next, next_accs, record))
    }

    pub fn run(&self) -> SimLog<T> {
        let cfg = &self.cfg;
        let mut state = self.initial_state();
        let mut accs = self.initial_accumulators();
        let mut records = Vec::new();
        let status = loop {
            if state.x.distance(cfg.x_goal) <= cfg.goal_tolerance {
                break TerminalStatus::ReachedGoal;
            }
            if records.len() >= cfg.max_steps {
                break TerminalStatus::MaxSteps;
            }
            match self.step(&state, &accs) {
                Ok((s, a, r)) => {
                    state = s;
                    accs = a;
                    records.push(r);
                }
                Err(StepFault::Penetration(_)) => break TerminalStatus::PenetrationFault,
                Err(StepFault::Infeasible) | Err(StepFault::Solver(_)) => {
                    break TerminalStatus::InfeasibleHalt
                }
            }
        };
        let final_h_obs = h_obstacle(&self.footprint(state.x), &cfg.obstacle).ok();
        SimLog {
            records,
            status,
            final_state: state,
            final_accumulators: accs,
            final_h_obs,
        }
    }
}

/// Validates `cfg` and runs it to termination.
pub fn run<T: Scalar>(cfg: ScenarioConfig<T>) -> Result<SimLog<T>> {
    Ok(Simulator::new(cfg)?.run())
}
