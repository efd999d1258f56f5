//! Time integration of accumulated exposure.
//!
//! Both accumulators use the left-endpoint rectangle rule so that they advance
//! on the same grid as the explicit-Euler state update.

use crate::error::{Error, Result};
use crate::geometry::{Point2, Segment2};
use crate::kernel::KernelParams;
use crate::scalar::Scalar;

/// Accumulated exposure `J(q, t)` at a fixed location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointAccumulator<T> {
    pub q: Point2<T>,
    pub j: T,
}

impl<T: Scalar> PointAccumulator<T> {
    pub fn new(q: Point2<T>, initial: T) -> Self {
        Self { q, j: initial }
    }

    /// Advances by `dt` with the agent held at `x` over the interval.
    pub fn step(self, kernel: &KernelParams<T>, x: Point2<T>, dt: T) -> Self {
        debug_assert!(dt > T::zero());
        Self {
            q: self.q,
            j: self.j + dt * kernel.eval(self.q, x),
        }
    }
}

/// Upper bound `J̄` on the maximum exposure over a segment, driven by the
/// pointwise maximum of the kernel along the segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentBoundAccumulator<T> {
    pub seg: Segment2<T>,
    pub j_bar: T,
}

impl<T: Scalar> SegmentBoundAccumulator<T> {
    /// `initial` must be the maximum exposure over the segment at time zero.
    pub fn new(seg: Segment2<T>, initial: T) -> Self {
        Self {
            seg,
            j_bar: initial,
        }
    }

    pub fn step(self, kernel: &KernelParams<T>, x: Point2<T>, dt: T) -> Self {
        debug_assert!(dt > T::zero());
        Self {
            seg: self.seg,
            j_bar: self.j_bar + dt * kernel.argmax_on_segment(&self.seg, x).p_star,
        }
    }
}

/// Largest exposure among a finite set of tracked points.
pub fn jmax_discretized<T: Scalar>(points: &[PointAccumulator<T>]) -> Result<T> {
    points
        .iter()
        .map(|a| a.j)
        .reduce(T::max)
        .ok_or(Error::EmptyPointSet)
}
