//! Multi-start Newton search for fixed points and their linear stability.

use std::cmp::Ordering;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bloch::{BlochVector, ADMISSIBILITY_SLACK};
use crate::dynamics::{Field, VectorField};
use crate::error::Result;
use crate::models::Model;

/// Residual `|F|` a Newton iterate must reach to count as a fixed point.
pub const NEWTON_TOL: f64 = 1e-12;
pub const MAX_NEWTON_ITERATIONS: usize = 50;
/// Converged points closer than this are merged.
pub const DEDUP_TOL: f64 = 1e-6;
/// Relative finite-difference step of [`jacobian`].
pub const FD_STEP: f64 = 1e-6;
/// Relative threshold under which an eigenvalue's real part counts as zero.
pub const EIGEN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityClass {
    StableNode,
    StableSpiral,
    UnstableNode,
    UnstableSpiral,
    Saddle,
    Marginal,
}

impl StabilityClass {
    pub fn name(self) -> &'static str {
        match self {
            StabilityClass::StableNode => "stable_node",
            StabilityClass::StableSpiral => "stable_spiral",
            StabilityClass::UnstableNode => "unstable_node",
            StabilityClass::UnstableSpiral => "unstable_spiral",
            StabilityClass::Saddle => "saddle",
            StabilityClass::Marginal => "marginal",
        }
    }

    pub fn is_stable(self) -> bool {
        matches!(self, StabilityClass::StableNode | StabilityClass::StableSpiral)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub location: BlochVector,
    /// `|F(location)|`.
    pub residual: f64,
    /// Jacobian eigenvalues, sorted by descending real part.
    pub eigenvalues: [Complex64; 3],
    pub class: StabilityClass,
}

impl FixedPoint {
    pub fn is_admissible(&self) -> bool {
        self.location.is_admissible()
    }

    /// Number of eigenvalues with real part above the zero threshold.
    pub fn unstable_dimension(&self) -> usize {
        let tol = eigen_tol(&self.eigenvalues);
        self.eigenvalues.iter().filter(|e| e.re > tol).count()
    }

    pub fn has_complex_pair(&self) -> bool {
        let tol = eigen_tol(&self.eigenvalues);
        self.eigenvalues.iter().any(|e| e.im.abs() > tol)
    }
}

/// Central-difference Jacobian of an arbitrary field, columns ordered
/// `(x, y, z)`.
pub fn jacobian_of<F: Field + ?Sized>(field: &F, v: BlochVector) -> Matrix3<f64> {
    let mut j = Matrix3::zeros();
    let base = v.to_array();
    for col in 0..3 {
        let h = FD_STEP * base[col].abs().max(1.0);
        let mut plus = base;
        let mut minus = base;
        plus[col] += h;
        minus[col] -= h;
        let fp = field.eval(BlochVector::from_array(plus)).to_array();
        let fm = field.eval(BlochVector::from_array(minus)).to_array();
        for row in 0..3 {
            j[(row, col)] = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    j
}

/// Jacobian of the assembled field of `model` at `v`.
pub fn jacobian(model: &Model, v: BlochVector) -> Matrix3<f64> {
    jacobian_of(&VectorField::new_unchecked(*model), v)
}

/// Eigenvalues sorted by descending real part, then descending imaginary
/// part.
pub fn eigenvalues(j: &Matrix3<f64>) -> [Complex64; 3] {
    let ev = j.complex_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2]];
    out.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap_or(Ordering::Equal)
            .then(b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal))
    });
    out
}

fn eigen_tol(eigs: &[Complex64; 3]) -> f64 {
    let radius = eigs.iter().map(|e| e.norm()).fold(0.0, f64::max);
    EIGEN_TOL * radius.max(1.0)
}

pub fn classify_eigenvalues(eigs: &[Complex64; 3]) -> StabilityClass {
    let tol = eigen_tol(eigs);
    if eigs.iter().any(|e| e.re.abs() <= tol) {
        return StabilityClass::Marginal;
    }
    let spiral = eigs.iter().any(|e| e.im.abs() > tol);
    let negative = eigs.iter().filter(|e| e.re < 0.0).count();
    // A complex pair repelling from an attracting transverse direction is an
    // unstable spiral within the attracting plane.
    let unstable_pair = negative == 1
        && eigs
            .iter()
            .filter(|e| e.re > 0.0)
            .all(|e| e.im.abs() > tol);
    match (negative, spiral) {
        (3, false) => StabilityClass::StableNode,
        (3, true) => StabilityClass::StableSpiral,
        (0, false) => StabilityClass::UnstableNode,
        (0, true) => StabilityClass::UnstableSpiral,
        _ if unstable_pair => StabilityClass::UnstableSpiral,
        _ => StabilityClass::Saddle,
    }
}

/// Linearizes `field` at `location`.
pub fn fixed_point_at<F: Field + ?Sized>(field: &F, location: BlochVector) -> FixedPoint {
    let eigenvalues = eigenvalues(&jacobian_of(field, location));
    FixedPoint {
        location,
        residual: field.eval(location).norm(),
        eigenvalues,
        class: classify_eigenvalues(&eigenvalues),
    }
}

fn newton<F: Field + ?Sized>(field: &F, start: BlochVector, escape_radius: f64) -> Option<BlochVector> {
    let mut v = start;
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let f = field.eval(v);
        if f.max_abs() == 0.0 {
            break;
        }
        let lu = jacobian_of(field, v).lu();
        let step = lu.solve(&Vector3::new(-f.x, -f.y, -f.z))?;
        let step = BlochVector::new(step[0], step[1], step[2]);
        v = v + step;
        if !v.is_finite() || v.norm() > escape_radius {
            return None;
        }
        // Keep iterating past the tolerance so degenerate roots, where
        // Newton is only linear, settle well inside the dedup radius.
        if step.max_abs() <= 1e-15 * (1.0 + v.max_abs()) {
            break;
        }
    }
    (field.eval(v).norm() < NEWTON_TOL).then_some(v)
}

/// Newton search from the origin and a `grid_n^3` lattice over the cube
/// `[-r, r]^3`; keeps roots within radius `r`.
pub fn find_fixed_points_within<F: Field + Sync + ?Sized>(
    field: &F,
    grid_n: usize,
    radius: f64,
) -> Vec<FixedPoint> {
    let n = grid_n.max(1);
    let coord = |i: usize| {
        if n == 1 {
            0.0
        } else {
            radius * (-1.0 + 2.0 * i as f64 / (n - 1) as f64)
        }
    };
    // The centre is always seeded, even lattices miss it.
    let starts = std::iter::once(BlochVector::ORIGIN).chain((0..n * n * n).map(|idx| {
        BlochVector::new(coord(idx / (n * n)), coord(idx / n % n), coord(idx % n))
    }));
    let mut roots: Vec<(f64, BlochVector)> = Vec::new();
    for start in starts {
        if let Some(root) = newton(field, start, 10.0 * radius.max(1.0)) {
            if root.norm() <= radius + ADMISSIBILITY_SLACK {
                roots.push((field.eval(root).norm(), root));
            }
        }
    }
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let mut unique: Vec<BlochVector> = Vec::new();
    for (_, r) in roots {
        if unique.iter().all(|u| (*u - r).norm() > DEDUP_TOL) {
            unique.push(r);
        }
    }
    unique.sort_by(|a, b| {
        (a.z, a.x, a.y)
            .partial_cmp(&(b.z, b.x, b.y))
            .unwrap_or(Ordering::Equal)
    });
    unique.into_iter().map(|v| fixed_point_at(field, v)).collect()
}

/// Fixed points of `model` inside the admissible ball, ordered by `z`.
pub fn find_fixed_points(model: &Model, grid_n: usize) -> Result<Vec<FixedPoint>> {
    let field = VectorField::new(*model)?;
    Ok(find_fixed_points_within(&field, grid_n, 1.0))
}
