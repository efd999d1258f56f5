//! Safety filters that bound the *accumulated* exposure a moving agent's
//! emitted field leaves on points, segments and polygon boundaries.
//!
//! Each control step solves a small QP that minimally modifies a reference
//! velocity subject to an obstacle barrier and second-order barriers on the
//! exposure integrals. All numerics are generic over [`Scalar`] (`f32` or
//! `f64`); the aliases below fix the scalar to `f64`.

pub mod accumulator;
pub mod barrier;
pub mod config;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod qp;
pub mod scalar;
pub mod sim;

pub use accumulator::{jmax_discretized, PointAccumulator, SegmentBoundAccumulator};
pub use barrier::{
    h_obstacle, obstacle_constraint, point_noise_constraint, polygon_noise_constraints,
    segment_noise_constraint, ClassK, ConstraintLabel, HalfPlaneConstraint, HocbfGains,
    NoiseBudget, OutsideSupport, Phi2Formula,
};
pub use config::{scenarios, InfeasiblePolicy, NoiseMode, ScenarioConfig};
pub use error::{Error, Result};
pub use geometry::{polygon_edges, BoxObstacle, Point2, QuadFootprint, Segment2, Vec2};
pub use kernel::{KernelParams, SegmentMax};
pub use qp::{solve, QpError, QpProblem, QpSolution};
pub use scalar::Scalar;
pub use sim::{k_ref, run, RunMetrics, SimLog, Simulator, TerminalStatus};

pub type Vec2d = Vec2<f64>;
pub type Point = Point2<f64>;
pub type Segment = Segment2<f64>;
pub type Obstacle = BoxObstacle<f64>;
pub type Footprint = QuadFootprint<f64>;
pub type Kernel = KernelParams<f64>;
pub type Constraint = HalfPlaneConstraint<f64>;
pub type Problem = QpProblem<f64>;
pub type Solution = QpSolution<f64>;
pub type Config = ScenarioConfig<f64>;
pub type Log = SimLog<f64>;
pub type Metrics = RunMetrics<f64>;
