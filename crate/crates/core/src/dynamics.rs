//! Right-hand side of the nonlinear Lindblad equation in Bloch coordinates.

use crate::bloch::{BlochVector, CoeffMatrix, Hamiltonian2};
use crate::error::{Error, Result};
use crate::models::{validate_params, Model};
use crate::sampling;

/// Time derivative `(dx, dy, dz)` of the Bloch vector for coefficient
/// matrix `h` and Hamiltonian `ham` (hbar = 1).
pub fn assemble_rhs(h: &CoeffMatrix, ham: &Hamiltonian2, v: BlochVector) -> BlochVector {
    let BlochVector { x, y, z } = v;
    let gamma = h.gamma();
    let sum = h.h23 + h.h13;
    let diff = h.h23 - h.h13;
    let detuning = ham.h00 - ham.h11;

    let dz = (h.h11 - h.h22) - (h.h11 + h.h22) * z + sum.re * x + diff.im * y
        + (-2.0 * ham.h10.im * x + 2.0 * ham.h10.re * y);
    let dx = 2.0 * diff.re + sum.re * z + (h.h12.re - gamma) * x - h.h12.im * y
        + (2.0 * ham.h10.im * z - detuning * y);
    let dy = 2.0 * sum.im + diff.im * z - h.h12.im * x - (h.h12.re + gamma) * y
        + (-2.0 * ham.h10.re * z + detuning * x);
    BlochVector::new(dx, dy, dz)
}

/// Anything that yields a Bloch-vector time derivative.
pub trait Field {
    fn eval(&self, v: BlochVector) -> BlochVector;
}

impl<F: Fn(BlochVector) -> BlochVector> Field for F {
    fn eval(&self, v: BlochVector) -> BlochVector {
        self(v)
    }
}

/// A model bound to the assembled right-hand side. Construction validates
/// the parameters once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorField {
    model: Model,
}

impl VectorField {
    pub fn new(model: Model) -> Result<Self> {
        validate_params(&model).into_result()?;
        Ok(Self { model })
    }

    /// Skips parameter validation; for probing fields outside the admissible
    /// parameter region.
    pub fn new_unchecked(model: Model) -> Self {
        Self { model }
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

}

impl Field for VectorField {
    fn eval(&self, v: BlochVector) -> BlochVector {
        let (h, ham) = self.model.coefficients(v);
        assemble_rhs(&h, &ham, v)
    }
}

/// Hard-coded normal forms the ansätze are built to reproduce.
///
/// Transverse components not fixed by the normal form are the decays implied
/// by the ansatz: `-Gamma x`, `-Gamma y` for the one-dimensional models and
/// `dy/dt = -(delta/2 + x^2 + z^2) y` for Hopf.
pub fn normal_form_rhs(model: &Model, v: BlochVector) -> Result<BlochVector> {
    let BlochVector { x, y, z } = v;
    let out = match *model {
        Model::ConstantH { .. } => return Err(Error::UnsupportedKind("constant_h")),
        Model::Pitchfork { alpha, t } => {
            let gamma = alpha + 0.5 * z * z;
            BlochVector::new(-gamma * x, -gamma * y, -z * (t + z * z))
        }
        Model::SaddleNode { alpha, t, b } => {
            let gamma = alpha + 0.5 * z * z;
            BlochVector::new(-gamma * x, -gamma * y, -z * (t + z * z) + b)
        }
        Model::Transcritical { alpha, c } => {
            let q = 0.5 * (z + 1.0);
            let gamma = 0.5 * (alpha + q);
            BlochVector::new(-gamma * x, -gamma * y, 2.0 * c * q - 2.0 * q * q)
        }
        Model::Hopf { delta, epsilon, b } => {
            let r2 = x * x + z * z;
            BlochVector::new(
                epsilon * x + b * z - x * r2,
                -(0.5 * delta + r2) * y,
                epsilon * z - b * x - z * r2,
            )
        }
        Model::Roessler {
            a,
            b,
            c,
            m,
            epsilon,
        } => BlochVector::new(
            -m * (y + z),
            m * (x - epsilon + a * y),
            b - (c - m * (x - epsilon)) * m * z,
        ),
    };
    Ok(out)
}

/// Largest componentwise gap between the assembled field and the normal form
/// over `n_samples` seeded states (the `y = 0` disk for Hopf, the ball
/// otherwise).
pub fn consistency_check(model: &Model, n_samples: usize, seed: u64) -> Result<f64> {
    let field = VectorField::new(*model)?;
    let mut rng = sampling::rng(seed);
    let planar = matches!(model, Model::Hopf { .. });
    let mut worst = 0.0_f64;
    for _ in 0..n_samples {
        let v = if planar {
            sampling::disk_y0(&mut rng)
        } else {
            sampling::ball(&mut rng)
        };
        let gap = field.eval(v) - normal_form_rhs(model, v)?;
        worst = worst.max(gap.max_abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::roessler_h;
    use num_complex::Complex64;

    const HOPF: Model = Model::Hopf {
        delta: 0.9,
        epsilon: 0.25,
        b: 0.2,
    };
    const ROESSLER: Model = Model::Roessler {
        a: 0.1,
        b: 0.1,
        c: 14.0,
        m: 50.0,
        epsilon: 0.35,
    };

    #[test]
    fn zero_generator_gives_zero_field() {
        let v = BlochVector::new(0.3, -0.2, 0.5);
        let f = assemble_rhs(&CoeffMatrix::default(), &Hamiltonian2::ZERO, v);
        assert_eq!(f, BlochVector::ORIGIN);
    }

    #[test]
    fn diagonal_generator_decouples() {
        let mut rng = sampling::rng(11);
        for _ in 0..1000 {
            let v = sampling::ball(&mut rng);
            let h = CoeffMatrix::diagonal(1.3, 0.4, 0.7);
            let gamma = 0.5 * (1.3 + 0.4 + 4.0 * 0.7);
            let f = assemble_rhs(&h, &Hamiltonian2::ZERO, v);
            assert!((f.z - ((1.3 - 0.4) - (1.3 + 0.4) * v.z)).abs() < 1e-14);
            assert!((f.x + gamma * v.x).abs() < 1e-14);
            assert!((f.y + gamma * v.y).abs() < 1e-14);
        }
    }

    #[test]
    fn hamiltonian_terms() {
        // Pure sigma_z detuning rotates x into y.
        let ham = Hamiltonian2 {
            h00: 0.5,
            h11: -0.5,
            h10: Complex64::new(0.0, 0.0),
        };
        let f = assemble_rhs(&CoeffMatrix::default(), &ham, BlochVector::new(1.0, 0.0, 0.0));
        assert_eq!(f, BlochVector::new(0.0, 1.0, 0.0));
    }

    #[test]
    fn hopf_matches_planar_normal_form() {
        let dev = consistency_check(&HOPF, 10_000, 5).unwrap();
        assert!(dev < 1e-12, "deviation {dev}");
    }

    #[test]
    fn hopf_y_decay_identity_off_plane() {
        let field = VectorField::new(HOPF).unwrap();
        let mut rng = sampling::rng(8);
        for _ in 0..10_000 {
            let v = sampling::ball(&mut rng);
            let r2 = v.x * v.x + v.z * v.z;
            let f = field.eval(v);
            assert!((f.y + (0.45 + r2) * v.y).abs() < 1e-12);
            // Off the plane the in-plane components still follow the normal form.
            let nf = normal_form_rhs(&HOPF, v).unwrap();
            assert!((f - nf).max_abs() < 1e-12);
        }
    }

    #[test]
    fn one_dimensional_models_match_normal_forms() {
        for model in [
            Model::Pitchfork {
                alpha: 0.5,
                t: -0.25,
            },
            Model::SaddleNode {
                alpha: 0.5,
                t: -0.75,
                b: 0.2,
            },
            Model::Transcritical { alpha: 1.0, c: 0.5 },
        ] {
            let dev = consistency_check(&model, 10_000, 1).unwrap();
            assert!(dev < 1e-12, "{model:?}: {dev}");
        }
    }

    #[test]
    fn roessler_matches_rescaled_system() {
        let dev = consistency_check(&ROESSLER, 10_000, 2).unwrap();
        assert!(dev < 1e-9, "deviation {dev}");
    }

    #[test]
    fn roessler_gamma_cancels() {
        let mut rng = sampling::rng(4);
        for _ in 0..10_000 {
            let v = sampling::ball(&mut rng);
            let base = assemble_rhs(&roessler_h(0.1, 0.1, 14.0, 50.0, 0.35, v, 1.0), &Hamiltonian2::ZERO, v);
            for kappa in [0.5, 2.0, 10.0] {
                let scaled = assemble_rhs(
                    &roessler_h(0.1, 0.1, 14.0, 50.0, 0.35, v, kappa),
                    &Hamiltonian2::ZERO,
                    v,
                );
                let dev = (scaled - base).max_abs();
                // Gamma ~ 10^3 enters h13/h23 and cancels in floating point.
                assert!(dev < 1e-12 * (1.0 + kappa) * 1e3, "kappa {kappa}: {dev}");
            }
        }
    }

    #[test]
    fn hopf_boundary_flux_is_inward() {
        let field = VectorField::new(HOPF).unwrap();
        let mut rng = sampling::rng(9);
        for _ in 0..1000 {
            let v = sampling::sphere(&mut rng);
            assert!(v.dot(field.eval(v)) < 0.0);
        }
    }

    #[test]
    fn constant_h_has_no_normal_form() {
        let m = Model::ConstantH {
            h11: 1.0,
            h22: 1.0,
            h33: 0.0,
        };
        assert!(matches!(
            normal_form_rhs(&m, BlochVector::ORIGIN),
            Err(Error::UnsupportedKind(_))
        ));
    }

    #[test]
    fn normal_form_examples() {
        let p = Model::Pitchfork {
            alpha: 0.5,
            t: -0.25,
        };
        assert_eq!(normal_form_rhs(&p, BlochVector::new(0.0, 0.0, 0.5)).unwrap().z, 0.0);
        let f = normal_form_rhs(&ROESSLER, BlochVector::new(0.35, 0.0, 0.0)).unwrap();
        assert_eq!(f, BlochVector::new(0.0, 0.0, 0.1));
        let t = Model::Transcritical { alpha: 1.0, c: 0.5 };
        assert_eq!(normal_form_rhs(&t, BlochVector::ORIGIN).unwrap().z, 0.0);
    }
}
