//! Bloch-vector and density-matrix algebra for a single qubit.
//!
//! A state is the real triple `(x, y, z)` with
//! `rho = (1 + x sx + y sy + z sz) / 2`; it is a valid density matrix iff
//! `x^2 + y^2 + z^2 <= 1`.

use std::ops::{Add, Mul, Sub};

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack on the unit-ball constraint absorbed as numerical noise.
pub const ADMISSIBILITY_SLACK: f64 = 1e-9;

/// Default tolerance for the principal-minor PSD test.
pub const PSD_TOL: f64 = 1e-12;

/// Tolerance on `rho00 + rho11 = 1`.
pub const TRACE_TOL: f64 = 1e-12;

/// Missing components deserialize as zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ORIGIN: BlochVector = BlochVector { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// `true` if the state lies in the unit ball up to `slack`.
    pub fn is_admissible_within(self, slack: f64) -> bool {
        self.norm() <= 1.0 + slack
    }

    pub fn is_admissible(self) -> bool {
        self.is_admissible_within(ADMISSIBILITY_SLACK)
    }

    /// Returns `self` unchanged, or an [`Error::AdmissibilityViolation`].
    pub fn check_admissible_within(self, slack: f64) -> Result<Self> {
        if self.is_finite() && self.is_admissible_within(slack) {
            Ok(self)
        } else {
            Err(Error::AdmissibilityViolation {
                x: self.x,
                y: self.y,
                z: self.z,
                norm: self.norm(),
            })
        }
    }

    pub fn check_admissible(self) -> Result<Self> {
        self.check_admissible_within(ADMISSIBILITY_SLACK)
    }
}

impl Add for BlochVector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for BlochVector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for BlochVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Qubit density matrix; `rho10` is the conjugate of `rho01`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix2 {
    pub rho00: f64,
    pub rho11: f64,
    pub rho01: Complex64,
}

impl DensityMatrix2 {
    pub fn trace(&self) -> f64 {
        self.rho00 + self.rho11
    }

    pub fn rho10(&self) -> Complex64 {
        self.rho01.conj()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.rho00 + self.rho11);
        let half_gap = (0.25 * (self.rho00 - self.rho11).powi(2) + self.rho01.norm_sqr()).sqrt();
        [mean - half_gap, mean + half_gap]
    }
}

pub fn bloch_to_density(v: BlochVector) -> DensityMatrix2 {
    DensityMatrix2 {
        rho00: 0.5 * (1.0 + v.z),
        rho11: 0.5 * (1.0 - v.z),
        rho01: Complex64::new(0.5 * v.x, -0.5 * v.y),
    }
}

pub fn density_to_bloch(rho: &DensityMatrix2) -> Result<BlochVector> {
    let trace = rho.trace();
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::TraceViolation {
            trace,
            tol: TRACE_TOL,
        });
    }
    Ok(BlochVector::new(
        2.0 * rho.rho01.re,
        -2.0 * rho.rho01.im,
        rho.rho00 - rho.rho11,
    ))
}

/// Sign of the `sigma_z` eigenvalue being projected on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SigmaZ {
    /// `|0>`, eigenvalue +1.
    Plus,
    /// `|1>`, eigenvalue -1.
    Minus,
}

/// Probability of measuring `sigma_z = ±1`, i.e. `(1 ± z) / 2`.
pub fn occupation_probability(v: BlochVector, sign: SigmaZ) -> Result<f64> {
    let v = v.check_admissible()?;
    let p = match sign {
        SigmaZ::Plus => 0.5 * (1.0 + v.z),
        SigmaZ::Minus => 0.5 * (1.0 - v.z),
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Hermitian 3x3 dissipator coefficient matrix; only the upper triangle is
/// stored.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoeffMatrix {
    pub h11: f64,
    pub h22: f64,
    pub h33: f64,
    pub h12: Complex64,
    pub h13: Complex64,
    pub h23: Complex64,
}

impl CoeffMatrix {
    pub fn diagonal(h11: f64, h22: f64, h33: f64) -> Self {
        Self {
            h11,
            h22,
            h33,
            ..Self::default()
        }
    }

    /// Transverse decay rate `(h11 + h22 + 4 h33) / 2`.
    pub fn gamma(&self) -> f64 {
        0.5 * (self.h11 + self.h22 + 4.0 * self.h33)
    }

    pub fn to_matrix(&self) -> Matrix3<Complex64> {
        let re = |v: f64| Complex64::new(v, 0.0);
        Matrix3::new(
            re(self.h11),
            self.h12,
            self.h13,
            self.h12.conj(),
            re(self.h22),
            self.h23,
            self.h13.conj(),
            self.h23.conj(),
            re(self.h33),
        )
    }

    /// Determinant as printed in the principal-minor conditions:
    /// `h11 h22 h33 - h22 |h13|^2 - h11 |h23|^2`. It drops every term
    /// containing `h12`, so it equals the true determinant only when `h12 = 0`.
    pub fn printed_determinant(&self) -> f64 {
        self.h11 * self.h22 * self.h33
            - self.h22 * self.h13.norm_sqr()
            - self.h11 * self.h23.norm_sqr()
    }

    /// Full determinant by LU factorization (real for Hermitian input).
    pub fn determinant(&self) -> f64 {
        self.to_matrix().determinant().re
    }
}

/// Qubit Hamiltonian with `H01 = conj(H10)`, in units with hbar = 1.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Hamiltonian2 {
    pub h00: f64,
    pub h11: f64,
    pub h10: Complex64,
}

impl Hamiltonian2 {
    pub const ZERO: Hamiltonian2 = Hamiltonian2 {
        h00: 0.0,
        h11: 0.0,
        h10: Complex64 { re: 0.0, im: 0.0 },
    };
}

/// Outcome of [`psd_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    /// `h11, h22, h33, h11 h22 - |h12|^2, h11 h33 - |h13|^2,
    /// h22 h33 - |h23|^2`, printed determinant.
    pub minors: [f64; 7],
    /// Full 3x3 determinant.
    pub determinant: f64,
    pub ok: bool,
}

impl PsdReport {
    pub fn min_minor(&self) -> f64 {
        self.minors
            .iter()
            .copied()
            .fold(self.determinant, f64::min)
    }

    /// Difference between the printed and the full determinant.
    pub fn determinant_discrepancy(&self) -> f64 {
        self.minors[6] - self.determinant
    }
}

/// Principal-minor test for positive semi-definiteness. `ok` requires all
/// seven listed minors and the full determinant to be `>= -tol`.
pub fn psd_check(h: &CoeffMatrix, tol: f64) -> PsdReport {
    let minors = [
        h.h11,
        h.h22,
        h.h33,
        h.h11 * h.h22 - h.h12.norm_sqr(),
        h.h11 * h.h33 - h.h13.norm_sqr(),
        h.h22 * h.h33 - h.h23.norm_sqr(),
        h.printed_determinant(),
    ];
    let determinant = h.determinant();
    let ok = minors.iter().all(|&m| m >= -tol) && determinant >= -tol;
    PsdReport {
        minors,
        determinant,
        ok,
    }
}
