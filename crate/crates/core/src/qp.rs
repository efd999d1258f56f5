//! Euclidean projection of a reference velocity onto an intersection of
//! half-planes in `R^2`.
//!
//! In two dimensions the minimizer of `|u - k_ref|^2` has at most two
//! linearly independent active constraints, so enumerating the unconstrained
//! point, every single-line projection and every pairwise intersection, and
//! keeping the best feasible candidate, solves the problem exactly.

use thiserror::Error;

use crate::barrier::{ConstraintLabel, HalfPlaneConstraint};
use crate::geometry::Vec2;
use crate::scalar::Scalar;

/// Upper bound on rows accepted by [`solve`].
pub const MAX_CONSTRAINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum QpError {
    #[error("constraint set is empty (no input satisfies every row)")]
    Infeasible,
    #[error("{0} constraints exceeds the limit of {MAX_CONSTRAINTS}")]
    TooManyConstraints(usize),
    #[error("non-finite problem data")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem<T> {
    pub k_ref: Vec2<T>,
    pub constraints: Vec<HalfPlaneConstraint<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution<T> {
    pub u: Vec2<T>,
    /// Indices of rows that hold with equality at `u`.
    pub active: Vec<usize>,
    pub active_labels: Vec<ConstraintLabel>,
    /// `|u - k_ref|^2`
    pub objective: T,
}

/// Feasibility tolerance for a row evaluated at `u`, relative to its magnitude.
fn row_tol<T: Scalar>(c: &HalfPlaneConstraint<T>, u: Vec2<T>) -> T {
    let scale = T::one() + c.b.abs() + c.a.norm() * u.norm();
    T::epsilon() * T::lit(64.0) * scale
}

/// Normals shorter than this are treated as exactly zero.
fn zero_normal<T: Scalar>(a: Vec2<T>) -> bool {
    a.norm_sq() <= T::epsilon() * T::epsilon()
}

pub fn solve<T: Scalar>(problem: &QpProblem<T>) -> Result<QpSolution<T>, QpError> {
    let n = problem.constraints.len();
    if n > MAX_CONSTRAINTS {
        return Err(QpError::TooManyConstraints(n));
    }
    let k = problem.k_ref;
    if !k.is_finite() || problem.constraints.iter().any(|c| !c.is_finite()) {
        return Err(QpError::NonFinite);
    }

    // Zero-normal rows do not depend on u: either always or never satisfied.
    let mut rows = Vec::with_capacity(n);
    for (i, c) in problem.constraints.iter().enumerate() {
        if zero_normal(c.a) {
            if c.b > row_tol(c, Vec2::zero()) {
                return Err(QpError::Infeasible);
            }
        } else {
            rows.push(i);
        }
    }

    let cons = &problem.constraints;
    let feasible = |u: Vec2<T>| {
        rows.iter()
            .all(|&i| cons[i].slack(u) >= -row_tol(&cons[i], u))
    };

    // stage 0 is optimal whenever feasible
    let best = if feasible(k) {
        Some((k, T::zero()))
    } else {
        let mut best: Option<(Vec2<T>, T)> = None;
        let mut consider = |u: Vec2<T>| {
            if !u.is_finite() || !feasible(u) {
                return;
            }
            let obj = (u - k).norm_sq();
            if best.is_none_or(|(_, b)| obj < b) {
                best = Some((u, obj));
            }
        };
        for &i in &rows {
            let c = &cons[i];
            let violation = c.b - c.a.dot(k);
            if violation > T::zero() {
                consider(k + c.a * (violation / c.a.norm_sq()));
            }
        }
        for (pos, &i) in rows.iter().enumerate() {
            for &j in &rows[pos + 1..] {
                if let Some(u) = intersect(&cons[i], &cons[j]) {
                    consider(u);
                }
            }
        }
        best
    };

    let (u, objective) = best.ok_or(QpError::Infeasible)?;
    let active: Vec<usize> = (0..n)
        .filter(|&i| cons[i].slack(u).abs() <= row_tol(&cons[i], u) * T::lit(16.0))
        .collect();
    Ok(QpSolution {
        u,
        active_labels: active.iter().map(|&i| cons[i].label).collect(),
        active,
        objective,
    })
}

/// Point on both boundary lines, or `None` for (near-)parallel normals.
fn intersect<T: Scalar>(
    c1: &HalfPlaneConstraint<T>,
    c2: &HalfPlaneConstraint<T>,
) -> Option<Vec2<T>> {
    let det = c1.a.cross(c2.a);
    if det.abs() <= T::epsilon() * T::lit(16.0) * c1.a.norm() * c2.a.norm() {
        return None;
    }
    Some(Vec2::new(
        (c1.b * c2.a.x2 - c2.b * c1.a.x2) / det,
        (c1.a.x1 * c2.b - c2.a.x1 * c1.b) / det,
    ))
}
