//! Barrier functions expressed as half-plane constraints `a · u >= b` on the
//! velocity input of a single integrator `x' = u`.
//!
//! Exposure barriers use `h = J_limit - J` with `h' = -p`, so the input first
//! appears in the second derivative:
//!
//! ```text
//! Phi1 = -p + alpha1 * h
//! Phi2 = Phi1' + alpha2 * Phi1 = -grad_x(p) · u - alpha1 * p + alpha2 * Phi1
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::accumulator::{PointAccumulator, SegmentBoundAccumulator};
use crate::error::{Error, Result};
use crate::geometry::{BoxObstacle, Point2, QuadFootprint, Segment2, Vec2};
use crate::kernel::KernelParams;
use crate::scalar::Scalar;

/// Linear class-K function `alpha(h) = gain * h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassK<T> {
    gain: T,
}

impl<T: Scalar> ClassK<T> {
    pub fn new(gain: T) -> Result<Self> {
        let k = Self { gain };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gain > T::zero() && self.gain.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidGain(self.gain.as_f64()))
        }
    }

    pub fn gain(&self) -> T {
        self.gain
    }

    pub fn apply(&self, h: T) -> T {
        self.gain * h
    }
}

/// Maximum permissible accumulated exposure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseBudget<T> {
    limit: T,
}

impl<T: Scalar> NoiseBudget<T> {
    pub fn new(limit: T) -> Result<Self> {
        if limit > T::zero() && limit.is_finite() {
            Ok(Self { limit })
        } else {
            Err(Error::InvalidBudget(limit.as_f64()))
        }
    }

    pub fn limit(&self) -> T {
        self.limit
    }
}

/// Which second-order barrier expression to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phi2Formula {
    /// `Phi1' + alpha2 * Phi1`, including the `-alpha1 * p` term.
    #[default]
    Recursion,
    /// Drops the `-alpha1 * p` term; reproduces trajectories built from the
    /// shortened closed-form expression.
    Truncated,
}

/// How exposure barrier rows treat an agent outside the kernel support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutsideSupport {
    /// Evaluate the unclipped parabola and its gradient everywhere, so the
    /// row starts braking before the agent enters the support.
    #[default]
    Parabolic,
    /// Use the clipped field: `p = 0` and `a = 0` outside the support.
    ZeroRow,
}

/// Gains and formula shared by every exposure barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HocbfGains<T> {
    pub alpha1: ClassK<T>,
    pub alpha2: ClassK<T>,
    pub formula: Phi2Formula,
    pub outside: OutsideSupport,
}

/// Field value and gradient seen by a barrier row for source `q`.
fn field<T: Scalar>(
    kernel: &KernelParams<T>,
    q: Point2<T>,
    x: Point2<T>,
    outside: OutsideSupport,
) -> (T, Vec2<T>) {
    match outside {
        OutsideSupport::Parabolic => (kernel.parabola(q, x), kernel.parabola_grad_x(q, x)),
        OutsideSupport::ZeroRow => (kernel.eval(q, x), kernel.grad_x(q, x)),
    }
}

/// Which barrier produced a constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintLabel {
    Obstacle,
    /// Discretized boundary sample `k`.
    Point(usize),
    /// Segment-bound barrier for polygon edge `i`.
    Edge(usize),
}

impl fmt::Display for ConstraintLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Obstacle => write!(f, "obstacle"),
            Self::Point(k) => write!(f, "point_{k}"),
            Self::Edge(i) => write!(f, "edge_{i}"),
        }
    }
}

/// `a · u >= b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlaneConstraint<T> {
    pub a: Vec2<T>,
    pub b: T,
    pub label: ConstraintLabel,
}

impl<T: Scalar> HalfPlaneConstraint<T> {
    pub fn new(a: Vec2<T>, b: T, label: ConstraintLabel) -> Self {
        Self { a, b, label }
    }

    /// `a · u - b`; nonnegative when satisfied.
    pub fn slack(&self, u: Vec2<T>) -> T {
        self.a.dot(u) - self.b
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }
}

/// Clearance between the nearest propeller disk and the box.
pub fn h_obstacle<T: Scalar>(fp: &QuadFootprint<T>, obstacle: &BoxObstacle<T>) -> Result<T> {
    let (x_quad, x_box) = fp.closest_pair(obstacle)?;
    Ok(x_quad.distance(x_box) - fp.r_quad())
}

/// `h_obs' + alpha1 * h_obs >= 0` for the single integrator.
pub fn obstacle_constraint<T: Scalar>(
    fp: &QuadFootprint<T>,
    obstacle: &BoxObstacle<T>,
    alpha1: ClassK<T>,
) -> Result<HalfPlaneConstraint<T>> {
    let (x_quad, x_box) = fp.closest_pair(obstacle)?;
    let sep = x_quad - x_box;
    let dist = sep.norm();
    if dist <= T::zero() {
        return Err(Error::ZeroSeparation);
    }
    let h = dist - fp.r_quad();
    Ok(HalfPlaneConstraint::new(
        sep * dist.recip(),
        -alpha1.apply(h),
        ConstraintLabel::Obstacle,
    ))
}

/// Second-order exposure barrier row for field value `p`, its gradient, and
/// remaining budget `h`.
fn exposure_row<T: Scalar>(
    p: T,
    grad: Vec2<T>,
    h: T,
    gains: &HocbfGains<T>,
    label: ConstraintLabel,
) -> HalfPlaneConstraint<T> {
    let phi1 = -p + gains.alpha1.apply(h);
    let drift = match gains.formula {
        Phi2Formula::Recursion => gains.alpha1.apply(p),
        Phi2Formula::Truncated => T::zero(),
    };
    HalfPlaneConstraint::new(-grad, drift - gains.alpha2.apply(phi1), label)
}

/// First barrier stage `-p + alpha1 * (J_limit - J)` at a tracked point.
pub fn point_phi1<T: Scalar>(
    acc: &PointAccumulator<T>,
    kernel: &KernelParams<T>,
    x: Point2<T>,
    budget: NoiseBudget<T>,
    alpha1: ClassK<T>,
) -> T {
    -kernel.eval(acc.q, x) + alpha1.apply(budget.limit() - acc.j)
}

/// Exposure barrier for a single tracked point. With
/// [`OutsideSupport::ZeroRow`] the row has `a = 0` outside the kernel support
/// and is satisfied whenever `J <= J_limit`.
pub fn point_noise_constraint<T: Scalar>(
    acc: &PointAccumulator<T>,
    kernel: &KernelParams<T>,
    x: Point2<T>,
    budget: NoiseBudget<T>,
    gains: &HocbfGains<T>,
    index: usize,
) -> HalfPlaneConstraint<T> {
    let (p, grad) = field(kernel, acc.q, x, gains.outside);
    exposure_row(
        p,
        grad,
        budget.limit() - acc.j,
        gains,
        ConstraintLabel::Point(index),
    )
}

/// Exposure barrier on a segment's bound `J̄`, evaluated at the current
/// kernel maximizer. The maximizer is held fixed when differentiating, which
/// is exact to first order by the envelope theorem.
pub fn segment_noise_constraint<T: Scalar>(
    acc: &SegmentBoundAccumulator<T>,
    kernel: &KernelParams<T>,
    x: Point2<T>,
    budget: NoiseBudget<T>,
    gains: &HocbfGains<T>,
    index: usize,
) -> HalfPlaneConstraint<T> {
    let m = kernel.argmax_on_segment(&acc.seg, x);
    let (p, grad) = field(kernel, m.q_star, x, gains.outside);
    exposure_row(
        p,
        grad,
        budget.limit() - acc.j_bar,
        gains,
        ConstraintLabel::Edge(index),
    )
}

/// One segment-bound row per polygon edge.
pub fn polygon_noise_constraints<T: Scalar>(
    edges: &[Segment2<T>],
    accs: &[SegmentBoundAccumulator<T>],
    kernel: &KernelParams<T>,
    x: Point2<T>,
    budget: NoiseBudget<T>,
    gains: &HocbfGains<T>,
) -> Result<Vec<HalfPlaneConstraint<T>>> {
    if edges.len() != accs.len() {
        return Err(Error::LengthMismatch {
            expected: edges.len(),
            found: accs.len(),
        });
    }
    Ok(edges
        .iter()
        .zip(accs)
        .enumerate()
        .map(|(i, (&seg, acc))| {
            let acc = SegmentBoundAccumulator::new(seg, acc.j_bar);
            segment_noise_constraint(&acc, kernel, x, budget, gains, i)
        })
        .collect())
}
