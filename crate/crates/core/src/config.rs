//! Scenario description consumed by the simulator.

use serde::{Deserialize, Serialize};

use crate::barrier::{ClassK, NoiseBudget, OutsideSupport, Phi2Formula};
use crate::error::{Error, Result};
use crate::geometry::{BoxObstacle, Point2, Vec2};
use crate::kernel::KernelParams;
use crate::qp::MAX_CONSTRAINTS;
use crate::scalar::Scalar;

pub const DEFAULT_MAX_STEPS: usize = 500;
pub const DEFAULT_GOAL_TOLERANCE: f64 = 0.05;
pub const DEFAULT_MONITOR_POINTS: usize = 100;

/// Which exposure constraints enter the QP besides the obstacle barrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum NoiseMode {
    Off,
    /// One point barrier per boundary sample.
    Discretized {
        #[serde(rename = "K")]
        k: usize,
    },
    /// One segment-bound barrier per obstacle edge.
    Bound,
}

/// What to do when the QP has no solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfeasiblePolicy {
    #[default]
    Halt,
    ZeroInput,
}

fn default_max_steps() -> usize {
    DEFAULT_MAX_STEPS
}

fn default_monitor_points() -> usize {
    DEFAULT_MONITOR_POINTS
}

fn default_goal_tolerance<T: Scalar>() -> T {
    T::lit(DEFAULT_GOAL_TOLERANCE)
}

fn zero<T: Scalar>() -> T {
    T::zero()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(
    serialize = "T: Scalar + Serialize",
    deserialize = "T: Scalar + Deserialize<'de>"
))]
pub struct ScenarioConfig<T> {
    pub name: String,
    pub x0: Point2<T>,
    pub x_goal: Point2<T>,
    pub obstacle: BoxObstacle<T>,
    pub r_quad: T,
    pub dt: T,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    pub alpha1: ClassK<T>,
    pub alpha2: ClassK<T>,
    pub kernel: KernelParams<T>,
    #[serde(rename = "J_limit")]
    pub j_limit: T,
    pub noise_mode: NoiseMode,
    #[serde(default = "default_monitor_points")]
    pub monitor_points: usize,
    #[serde(default)]
    pub phi2_formula: Phi2Formula,
    #[serde(default)]
    pub outside_support: OutsideSupport,
    #[serde(default)]
    pub infeasible_policy: InfeasiblePolicy,
    #[serde(default = "default_goal_tolerance")]
    pub goal_tolerance: T,
    /// Uniform exposure already present everywhere at `t = 0`.
    #[serde(default = "zero")]
    pub initial_exposure: T,
    /// Optional cap on `|u|`, applied after the QP. Off when absent.
    #[serde(default)]
    pub u_max: Option<T>,
}

fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field,
        reason: reason.into(),
    }
}

impl<T: Scalar> ScenarioConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: T, field: &'static str| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(
                    field,
                    format!("must be positive and finite, got {v}"),
                ))
            }
        };
        if !self.x0.is_finite() {
            return Err(invalid("x0", "non-finite component"));
        }
        if !self.x_goal.is_finite() {
            return Err(invalid("x_goal", "non-finite component"));
        }
        self.obstacle
            .validate()
            .map_err(|_| invalid("obstacle", "min must be below max componentwise"))?;
        positive(self.r_quad, "r_quad")?;
        positive(self.dt, "dt")?;
        if self.max_steps == 0 {
            return Err(invalid("max_steps", "must be at least 1"));
        }
        positive(self.alpha1.gain(), "alpha1")?;
        positive(self.alpha2.gain(), "alpha2")?;
        positive(self.kernel.peak(), "kernel.A")?;
        positive(self.kernel.falloff(), "kernel.sigma")?;
        positive(self.j_limit, "J_limit")?;
        if let NoiseMode::Discretized { k } = self.noise_mode {
            if k == 0 || k + 1 > MAX_CONSTRAINTS {
                return Err(invalid(
                    "noise_mode.K",
                    format!("must be in 1..={}, got {k}", MAX_CONSTRAINTS - 1),
                ));
            }
        }
        if self.monitor_points == 0 {
            return Err(invalid("monitor_points", "must be at least 1"));
        }
        if !(self.goal_tolerance >= T::zero() && self.goal_tolerance.is_finite()) {
            return Err(invalid("goal_tolerance", "must be nonnegative and finite"));
        }
        if !(self.initial_exposure >= T::zero() && self.initial_exposure.is_finite()) {
            return Err(invalid(
                "initial_exposure",
                "must be nonnegative and finite",
            ));
        }
        if let Some(u_max) = self.u_max {
            positive(u_max, "u_max")?;
        }
        Ok(())
    }

    pub fn budget(&self) -> NoiseBudget<T> {
        NoiseBudget::new(self.j_limit).expect("validated budget")
    }

    /// Changes the time step while keeping the simulated horizon
    /// `max_steps * dt` (rounded up to whole steps).
    pub fn with_dt(mut self, dt: T) -> Self {
        let horizon = self.dt * T::lit(self.max_steps as f64);
        let steps = (horizon / dt - T::lit(1e-6)).ceil();
        self.max_steps = steps.to_usize().unwrap_or(usize::MAX).max(1);
        self.dt = dt;
        self
    }
}

/// Bundled experiments on the unit-square obstacle.
pub mod scenarios {
    use super::*;

    fn base<T: Scalar>(name: &str, noise_mode: NoiseMode) -> ScenarioConfig<T> {
        let l = T::lit;
        ScenarioConfig {
            name: name.to_string(),
            x0: Vec2::new(l(3.0), l(3.0)),
            x_goal: Vec2::new(l(-2.0), l(-1.0)),
            obstacle: BoxObstacle::new(Vec2::new(l(0.0), l(0.0)), Vec2::new(l(1.0), l(1.0)))
                .expect("unit square"),
            r_quad: l(0.1),
            dt: l(0.1),
            max_steps: DEFAULT_MAX_STEPS,
            alpha1: ClassK::new(l(3.0)).expect("gain"),
            alpha2: ClassK::new(l(6.0)).expect("gain"),
            kernel: KernelParams::new(l(0.5), l(0.35)).expect("kernel"),
            j_limit: l(0.2),
            noise_mode,
            monitor_points: DEFAULT_MONITOR_POINTS,
            phi2_formula: Phi2Formula::Recursion,
            outside_support: OutsideSupport::Parabolic,
            infeasible_policy: InfeasiblePolicy::Halt,
            goal_tolerance: l(DEFAULT_GOAL_TOLERANCE),
            initial_exposure: T::zero(),
            u_max: None,
        }
    }

    /// Obstacle barrier only; exposure is monitored but unconstrained.
    pub fn obstacle_only<T: Scalar>() -> ScenarioConfig<T> {
        base("obstacle_only", NoiseMode::Off)
    }

    /// Eight point barriers on the obstacle boundary.
    pub fn discretized<T: Scalar>() -> ScenarioConfig<T> {
        base("discretized", NoiseMode::Discretized { k: 8 })
    }

    /// Segment-bound barriers on all four edges.
    pub fn bound<T: Scalar>() -> ScenarioConfig<T> {
        base("bound", NoiseMode::Bound)
    }

    /// Bound mode with a stronger, wider kernel.
    pub fn bound_wide_kernel<T: Scalar>() -> ScenarioConfig<T> {
        let mut cfg = base("bound_wide_kernel", NoiseMode::Bound);
        cfg.kernel = KernelParams::new(T::lit(1.0), T::lit(0.55)).expect("kernel");
        cfg
    }

    /// Bound mode with the goal on the obstacle's top edge.
    pub fn goal_at_boundary<T: Scalar>() -> ScenarioConfig<T> {
        let mut cfg = base("goal_at_boundary", NoiseMode::Bound);
        cfg.x_goal = Vec2::new(T::lit(0.5), T::lit(1.0));
        cfg
    }

    pub fn all<T: Scalar>() -> Vec<ScenarioConfig<T>> {
        vec![
            obstacle_only(),
            discretized(),
            bound(),
            bound_wide_kernel(),
            goal_at_boundary(),
        ]
    }
}
