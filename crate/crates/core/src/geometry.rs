//! Planar primitives: vectors, segments, the box obstacle and the
//! four-disk quadrotor footprint.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A vector in the plane. Serialized as a two-element array `[x1, x2]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[T; 2]", into = "[T; 2]")]
#[serde(bound(serialize = "T: Serialize + Copy", deserialize = "T: Deserialize<'de>"))]
pub struct Vec2<T> {
    pub x1: T,
    pub x2: T,
}

/// Positions share the vector representation.
pub type Point2<T> = Vec2<T>;

impl<T> From<[T; 2]> for Vec2<T> {
    fn from([x1, x2]: [T; 2]) -> Self {
        Self { x1, x2 }
    }
}

impl<T> From<Vec2<T>> for [T; 2] {
    fn from(v: Vec2<T>) -> Self {
        [v.x1, v.x2]
    }
}

impl<T: Scalar> Vec2<T> {
    pub fn new(x1: T, x2: T) -> Self {
        Self { x1, x2 }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn dot(self, other: Self) -> T {
        self.x1 * other.x1 + self.x2 * other.x2
    }

    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.x1.hypot(self.x2)
    }

    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    /// 2-D cross product (z component of the 3-D cross product).
    pub fn cross(self, other: Self) -> T {
        self.x1 * other.x2 - self.x2 * other.x1
    }
}

impl<T: Scalar> Add for Vec2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x1 + rhs.x1, self.x2 + rhs.x2)
    }
}

impl<T: Scalar> Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x1 - rhs.x1, self.x2 - rhs.x2)
    }
}

impl<T: Scalar> Mul<T> for Vec2<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self::new(self.x1 * k, self.x2 * k)
    }
}

impl<T: Scalar> Neg for Vec2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x1, -self.x2)
    }
}

/// Closed line segment `[q0, qK]` with positive length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment2<T> {
    q0: Point2<T>,
    qk: Point2<T>,
}

impl<T: Scalar> Segment2<T> {
    pub fn new(q0: Point2<T>, qk: Point2<T>) -> Result<Self> {
        if !q0.is_finite() || !qk.is_finite() || q0 == qk {
            return Err(Error::DegenerateSegment);
        }
        Ok(Self { q0, qk })
    }

    pub fn start(&self) -> Point2<T> {
        self.q0
    }

    pub fn end(&self) -> Point2<T> {
        self.qk
    }

    /// `qK - q0`.
    pub fn direction(&self) -> Vec2<T> {
        self.qk - self.q0
    }

    pub fn length(&self) -> T {
        self.direction().norm()
    }

    /// Point `(1 - s) q0 + s qK` for `s` in `[0, 1]`.
    pub fn param_point(&self, s: T) -> Result<Point2<T>> {
        if !(s >= T::zero() && s <= T::one()) {
            return Err(Error::ParameterOutOfRange(s.as_f64()));
        }
        Ok(self.point_at(s))
    }

    /// Affine combination without the range check.
    pub(crate) fn point_at(&self, s: T) -> Point2<T> {
        self.q0 * (T::one() - s) + self.qk * s
    }
}

/// Static axis-aligned box obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize + Copy", deserialize = "T: Deserialize<'de>"))]
pub struct BoxObstacle<T> {
    #[serde(rename = "min")]
    min_corner: Point2<T>,
    #[serde(rename = "max")]
    max_corner: Point2<T>,
}

impl<T: Scalar> BoxObstacle<T> {
    pub fn new(min_corner: Point2<T>, max_corner: Point2<T>) -> Result<Self> {
        let b = Self {
            min_corner,
            max_corner,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.min_corner.is_finite()
            && self.max_corner.is_finite()
            && self.min_corner.x1 < self.max_corner.x1
            && self.min_corner.x2 < self.max_corner.x2;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidBox)
        }
    }

    pub fn min_corner(&self) -> Point2<T> {
        self.min_corner
    }

    pub fn max_corner(&self) -> Point2<T> {
        self.max_corner
    }

    pub fn contains_strictly(&self, p: Point2<T>) -> bool {
        p.x1 > self.min_corner.x1
            && p.x1 < self.max_corner.x1
            && p.x2 > self.min_corner.x2
            && p.x2 < self.max_corner.x2
    }

    /// Nearest boundary point to an exterior (or boundary) point.
    ///
    /// Interior points are a penetration fault.
    pub fn closest_point(&self, p: Point2<T>) -> Result<Point2<T>> {
        if self.contains_strictly(p) {
            return Err(Error::Penetration(p.x1.as_f64(), p.x2.as_f64()));
        }
        Ok(Vec2::new(
            p.x1.max(self.min_corner.x1).min(self.max_corner.x1),
            p.x2.max(self.min_corner.x2).min(self.max_corner.x2),
        ))
    }

    /// Squared distance from `p` to the box; zero for points inside.
    pub fn distance_sq(&self, p: Point2<T>) -> T {
        let dx = (self.min_corner.x1 - p.x1)
            .max(p.x1 - self.max_corner.x1)
            .max(T::zero());
        let dy = (self.min_corner.x2 - p.x2)
            .max(p.x2 - self.max_corner.x2)
            .max(T::zero());
        dx * dx + dy * dy
    }

    /// Corners counter-clockwise starting at the min corner.
    pub fn vertices(&self) -> [Point2<T>; 4] {
        let (lo, hi) = (self.min_corner, self.max_corner);
        [lo, Vec2::new(hi.x1, lo.x2), hi, Vec2::new(lo.x1, hi.x2)]
    }

    /// Boundary edges: bottom, right, top, left.
    pub fn edges(&self) -> Vec<Segment2<T>> {
        polygon_edges(&self.vertices()).expect("validated box has non-degenerate edges")
    }

    /// `n` points uniformly spaced by arc length along the boundary, walking
    /// counter-clockwise from the min corner.
    pub fn boundary_samples(&self, n: usize) -> Vec<Point2<T>> {
        let edges = self.edges();
        let lengths: Vec<T> = edges.iter().map(Segment2::length).collect();
        let perimeter = lengths.iter().fold(T::zero(), |acc, &l| acc + l);
        let spacing = perimeter / T::lit(n as f64);
        let mut out = Vec::with_capacity(n);
        let mut edge = 0;
        let mut edge_start = T::zero();
        for k in 0..n {
            let arc = spacing * T::lit(k as f64);
            while edge + 1 < edges.len() && arc >= edge_start + lengths[edge] {
                edge_start = edge_start + lengths[edge];
                edge += 1;
            }
            let s = ((arc - edge_start) / lengths[edge])
                .min(T::one())
                .max(T::zero());
            out.push(edges[edge].point_at(s));
        }
        out
    }
}

/// Edges `[v_i, v_{i+1}]` of a closed polygon with wraparound.
pub fn polygon_edges<T: Scalar>(vertices: &[Point2<T>]) -> Result<Vec<Segment2<T>>> {
    let n = vertices.len();
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    (0..n)
        .map(|i| {
            let next = (i + 1) % n;
            Segment2::new(vertices[i], vertices[next]).map_err(|_| Error::RepeatedVertex(next))
        })
        .collect()
}

/// Quadrotor modelled as four mutually tangent propeller disks around `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadFootprint<T> {
    center: Point2<T>,
    r_quad: T,
}

impl<T: Scalar> QuadFootprint<T> {
    pub fn new(center: Point2<T>, r_quad: T) -> Result<Self> {
        if !(r_quad > T::zero() && r_quad.is_finite()) {
            return Err(Error::InvalidFootprint(r_quad.as_f64()));
        }
        Ok(Self { center, r_quad })
    }

    pub fn center(&self) -> Point2<T> {
        self.center
    }

    pub fn r_quad(&self) -> T {
        self.r_quad
    }

    /// Disk centers at `center + (±r, ±r)` in the order `++, +-, -+, --`.
    pub fn propeller_centers(&self) -> [Point2<T>; 4] {
        let r = self.r_quad;
        let c = self.center;
        [
            Vec2::new(c.x1 + r, c.x2 + r),
            Vec2::new(c.x1 + r, c.x2 - r),
            Vec2::new(c.x1 - r, c.x2 + r),
            Vec2::new(c.x1 - r, c.x2 - r),
        ]
    }

    /// Propeller center nearest the box and its closest box point.
    /// Ties go to the earliest center in enumeration order.
    pub fn closest_pair(&self, obstacle: &BoxObstacle<T>) -> Result<(Point2<T>, Point2<T>)> {
        let centers = self.propeller_centers();
        let mut best = centers[0];
        let mut best_d = obstacle.distance_sq(best);
        for &c in &centers[1..] {
            let d = obstacle.distance_sq(c);
            if d < best_d {
                best = c;
                best_d = d;
            }
        }
        let on_box = obstacle.closest_point(best)?;
        Ok((best, on_box))
    }
}
