//! Catalog of state-dependent coefficient matrices.
//!
//! Each [`Model`] maps a Bloch vector to a `(CoeffMatrix, Hamiltonian2)`
//! pair. Substituted into the component equations in [`crate::dynamics`],
//! the one-dimensional models reduce to the pitchfork, saddle-node and
//! transcritical normal forms, `Hopf` to the Hopf normal form in the
//! `(z, x)` plane, and `Roessler` to a rescaled Rössler system.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bloch::{BlochVector, CoeffMatrix, Hamiltonian2};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Model {
    /// State-independent diagonal `h`, no Hamiltonian.
    ConstantH {
        h11: f64,
        h22: f64,
        #[serde(default)]
        h33: f64,
    },
    Pitchfork {
        alpha: f64,
        t: f64,
    },
    SaddleNode {
        alpha: f64,
        t: f64,
        b: f64,
    },
    Transcritical {
        alpha: f64,
        c: f64,
    },
    /// Hopf ansatz with a precession field `b` along the y axis.
    Hopf {
        delta: f64,
        epsilon: f64,
        b: f64,
    },
    /// Rössler system embedded with scale `m` and x-shift `epsilon`.
    Roessler {
        a: f64,
        b: f64,
        c: f64,
        m: f64,
        epsilon: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    ConstantH,
    Pitchfork,
    SaddleNode,
    Transcritical,
    Hopf,
    Roessler,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::ConstantH => "constant_h",
            ModelKind::Pitchfork => "pitchfork",
            ModelKind::SaddleNode => "saddle_node",
            ModelKind::Transcritical => "transcritical",
            ModelKind::Hopf => "hopf",
            ModelKind::Roessler => "roessler",
        }
    }

    /// Number of state variables carrying the interesting dynamics.
    pub fn effective_dimension(self) -> usize {
        match self {
            ModelKind::ConstantH
            | ModelKind::Pitchfork
            | ModelKind::SaddleNode
            | ModelKind::Transcritical => 1,
            ModelKind::Hopf => 2,
            ModelKind::Roessler => 3,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Constraint violations found by [`validate_params`]; empty when valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidParams(self.violations))
        }
    }
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::ConstantH { .. } => ModelKind::ConstantH,
            Model::Pitchfork { .. } => ModelKind::Pitchfork,
            Model::SaddleNode { .. } => ModelKind::SaddleNode,
            Model::Transcritical { .. } => ModelKind::Transcritical,
            Model::Hopf { .. } => ModelKind::Hopf,
            Model::Roessler { .. } => ModelKind::Roessler,
        }
    }

    /// `(name, value)` pairs in declaration order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Model::ConstantH { h11, h22, h33 } => vec![("h11", h11), ("h22", h22), ("h33", h33)],
            Model::Pitchfork { alpha, t } => vec![("alpha", alpha), ("t", t)],
            Model::SaddleNode { alpha, t, b } => vec![("alpha", alpha), ("t", t), ("b", b)],
            Model::Transcritical { alpha, c } => vec![("alpha", alpha), ("c", c)],
            Model::Hopf { delta, epsilon, b } => {
                vec![("delta", delta), ("epsilon", epsilon), ("b", b)]
            }
            Model::Roessler {
                a,
                b,
                c,
                m,
                epsilon,
            } => vec![("a", a), ("b", b), ("c", c), ("m", m), ("epsilon", epsilon)],
        }
    }

    pub fn param(&self, name: &str) -> Result<f64> {
        self.params()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::UnknownParam {
                kind: self.kind().name(),
                name: name.to_string(),
            })
    }

    /// Copy of `self` with parameter `name` replaced.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Model> {
        let mut m = *self;
        let slot = match (&mut m, name) {
            (Model::ConstantH { h11, .. }, "h11") => h11,
            (Model::ConstantH { h22, .. }, "h22") => h22,
            (Model::ConstantH { h33, .. }, "h33") => h33,
            (Model::Pitchfork { alpha, .. }, "alpha") => alpha,
            (Model::Pitchfork { t, .. }, "t") => t,
            (Model::SaddleNode { alpha, .. }, "alpha") => alpha,
            (Model::SaddleNode { t, .. }, "t") => t,
            (Model::SaddleNode { b, .. }, "b") => b,
            (Model::Transcritical { alpha, .. }, "alpha") => alpha,
            (Model::Transcritical { c, .. }, "c") => c,
            (Model::Hopf { delta, .. }, "delta") => delta,
            (Model::Hopf { epsilon, .. }, "epsilon") => epsilon,
            (Model::Hopf { b, .. }, "b") => b,
            (Model::Roessler { a, .. }, "a") => a,
            (Model::Roessler { b, .. }, "b") => b,
            (Model::Roessler { c, .. }, "c") => c,
            (Model::Roessler { m, .. }, "m") => m,
            (Model::Roessler { epsilon, .. }, "epsilon") => epsilon,
            _ => {
                return Err(Error::UnknownParam {
                    kind: self.kind().name(),
                    name: name.to_string(),
                })
            }
        };
        *slot = value;
        Ok(m)
    }

    /// Coefficient matrix and Hamiltonian at `v`, without parameter checks.
    pub fn coefficients(&self, v: BlochVector) -> (CoeffMatrix, Hamiltonian2) {
        match *self {
            Model::ConstantH { h11, h22, h33 } => {
                (CoeffMatrix::diagonal(h11, h22, h33), Hamiltonian2::ZERO)
            }
            Model::Pitchfork { alpha, t } => (saddle_node_h(alpha, t, 0.0, v.z), Hamiltonian2::ZERO),
            Model::SaddleNode { alpha, t, b } => (saddle_node_h(alpha, t, b, v.z), Hamiltonian2::ZERO),
            Model::Transcritical { alpha, c } => {
                let q = 0.5 * (v.z + 1.0);
                let h11 = (c + alpha) * q;
                let h22 = alpha + (1.0 - c - alpha) * q;
                (CoeffMatrix::diagonal(h11, h22, 0.0), Hamiltonian2::ZERO)
            }
            Model::Hopf { delta, epsilon, b } => (hopf_h(delta, epsilon, v), hopf_hamiltonian(b)),
            Model::Roessler {
                a,
                b,
                c,
                m,
                epsilon,
            } => (roessler_h(a, b, c, m, epsilon, v, 1.0), Hamiltonian2::ZERO),
        }
    }
}

fn saddle_node_h(alpha: f64, t: f64, b: f64, z: f64) -> CoeffMatrix {
    let lin = (alpha - 0.5 * t) * z;
    let quad = 0.5 * z * z;
    CoeffMatrix::diagonal(alpha + 0.5 * b + lin + quad, alpha - 0.5 * b - lin + quad, 0.0)
}

fn hopf_h(delta: f64, epsilon: f64, v: BlochVector) -> CoeffMatrix {
    let r2 = v.x * v.x + v.z * v.z;
    let base = 0.5 * (delta - epsilon) + 0.5 * r2;
    CoeffMatrix {
        h11: base + 0.5 * delta * v.z,
        h22: base - 0.5 * delta * v.z,
        h33: 0.25 * r2,
        h12: Complex64::new(0.5 * epsilon, 0.0),
        h13: Complex64::new(-0.125 * delta * v.x, 0.0),
        h23: Complex64::new(0.125 * delta * v.x, 0.0),
    }
}

/// Field along y with `Im H10 = b / 2`, so that the precession terms read
/// `-b x` in dz/dt and `+b z` in dx/dt.
fn hopf_hamiltonian(b: f64) -> Hamiltonian2 {
    Hamiltonian2 {
        h00: 0.0,
        h11: 0.0,
        h10: Complex64::new(0.0, 0.5 * b),
    }
}

/// Rössler coefficient matrix with `h33` multiplied by `h33_scale`.
///
/// `gamma` is recomputed from the diagonal and enters `h13`, `h23`; it cancels
/// from the assembled field for any positive scale.
pub fn roessler_h(
    a: f64,
    b: f64,
    c: f64,
    m: f64,
    epsilon: f64,
    v: BlochVector,
    h33_scale: f64,
) -> CoeffMatrix {
    let base = m * (c + m * epsilon);
    let product = b + m * m * v.x * v.z;
    let h11 = 0.5 * (base + product);
    let h22 = 0.5 * (base - product);
    let h33 = h33_scale * 0.375 * base;
    let gamma = 0.5 * (h11 + h22 + 4.0 * h33);
    let re = 0.25 * (-m * v.y - m * v.z + gamma * v.x);
    let im = 0.25 * (m * (v.x - epsilon) + (a * m + gamma) * v.y);
    CoeffMatrix {
        h11,
        h22,
        h33,
        h12: Complex64::new(0.0, 0.0),
        h13: Complex64::new(-re, im),
        h23: Complex64::new(re, im),
    }
}

/// Checks each model's admissible parameter region.
pub fn validate_params(model: &Model) -> ValidationReport {
    let mut violations = Vec::new();
    for (name, value) in model.params() {
        if !value.is_finite() {
            violations.push(format!("{name} = {value} is not finite"));
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }
    let mut require = |cond: bool, msg: String| {
        if !cond {
            violations.push(msg);
        }
    };
    match *model {
        Model::ConstantH { h11, h22, h33 } => {
            require(h11 >= 0.0, format!("h11 = {h11} must be >= 0"));
            require(h22 >= 0.0, format!("h22 = {h22} must be >= 0"));
            require(h33 >= 0.0, format!("h33 = {h33} must be >= 0"));
        }
        Model::Pitchfork { alpha, t } => {
            check_quadratic_region(alpha, t, &mut require);
        }
        Model::SaddleNode { alpha, t, b } => {
            check_quadratic_region(alpha, t, &mut require);
            require(
                b.abs() <= 2.0 * alpha,
                format!("|b| = {} must be <= 2 alpha = {}", b.abs(), 2.0 * alpha),
            );
        }
        Model::Transcritical { alpha, c } => {
            require(alpha > 0.0, format!("alpha = {alpha} must be > 0"));
            require(
                c > -alpha && c < 1.0,
                format!("c = {c} must lie in (-alpha, 1) = ({}, 1)", -alpha),
            );
        }
        Model::Hopf { delta, epsilon, .. } => {
            require(
                delta > 0.0 && delta < 1.0,
                format!("delta = {delta} must lie in (0, 1)"),
            );
            let bound = (0.5 * delta).min(0.5 * delta * (2.0 - delta));
            require(
                epsilon < bound,
                format!("epsilon = {epsilon} must be < min(delta/2, delta(2-delta)/2) = {bound}"),
            );
        }
        Model::Roessler { m, epsilon, .. } => {
            require(m > 0.0, format!("m = {m} must be > 0"));
            require(epsilon > 0.0, format!("epsilon = {epsilon} must be > 0"));
        }
    }
    ValidationReport { violations }
}

fn check_quadratic_region(alpha: f64, t: f64, require: &mut impl FnMut(bool, String)) {
    require(
        alpha > 0.0 && alpha < 2.0,
        format!("alpha = {alpha} must lie in (0, 2)"),
    );
    if alpha > 0.0 {
        let bound = (8.0 * alpha).sqrt();
        require(
            (t - 2.0 * alpha).abs() <= bound,
            format!("|t - 2 alpha| = {} must be <= sqrt(8 alpha) = {bound}", (t - 2.0 * alpha).abs()),
        );
    }
}

/// Coefficient matrix and Hamiltonian of a validated model at `v`.
pub fn evaluate(model: &Model, v: BlochVector) -> Result<(CoeffMatrix, Hamiltonian2)> {
    validate_params(model).into_result()?;
    Ok(model.coefficients(v))
}

/// Minimum of `h11`, `h22` over `grid_n` uniformly spaced `z` in `[-1, 1]`
/// (equivalently `q` in `[0, 1]` for the transcritical model).
pub fn nonneg_scan(model: &Model, grid_n: usize) -> Result<f64> {
    match model.kind() {
        ModelKind::Pitchfork | ModelKind::SaddleNode | ModelKind::Transcritical => {}
        other => return Err(Error::UnsupportedKind(other.name())),
    }
    let n = grid_n.max(1);
    let min = (0..n)
        .map(|i| {
            let z = if n == 1 {
                0.0
            } else {
                -1.0 + 2.0 * i as f64 / (n - 1) as f64
            };
            let (h, _) = model.coefficients(BlochVector::new(0.0, 0.0, z));
            h.h11.min(h.h22)
        })
        .fold(f64::INFINITY, f64::min);
    Ok(min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{psd_check, PSD_TOL};

    const PITCHFORK: Model = Model::Pitchfork {
        alpha: 0.5,
        t: -0.25,
    };
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
    fn pitchfork_at_center() {
        let (h, ham) = evaluate(&PITCHFORK, BlochVector::ORIGIN).unwrap();
        assert_eq!(h, CoeffMatrix::diagonal(0.5, 0.5, 0.0));
        assert_eq!(ham, Hamiltonian2::ZERO);
    }

    #[test]
    fn hopf_at_origin() {
        let (h, ham) = evaluate(&HOPF, BlochVector::ORIGIN).unwrap();
        assert!((h.h11 - 0.325).abs() < 1e-15);
        assert!((h.h22 - 0.325).abs() < 1e-15);
        assert_eq!(h.h33, 0.0);
        assert_eq!(h.h12, Complex64::new(0.125, 0.0));
        assert_eq!(h.h13.norm(), 0.0);
        assert_eq!(h.h23.norm(), 0.0);
        assert_eq!(ham.h10, Complex64::new(0.0, 0.1));
    }

    #[test]
    fn roessler_at_origin() {
        let (h, ham) = evaluate(&ROESSLER, BlochVector::ORIGIN).unwrap();
        assert!((h.h11 - 787.55).abs() < 1e-10);
        assert!((h.h22 - 787.45).abs() < 1e-10);
        assert!((h.h33 - 590.625).abs() < 1e-10);
        assert_eq!(h.h12.norm(), 0.0);
        assert_eq!(ham, Hamiltonian2::ZERO);
    }

    #[test]
    fn evaluate_rejects_invalid_params() {
        let bad = Model::Hopf {
            delta: 0.9,
            epsilon: 0.5,
            b: 0.2,
        };
        assert!(matches!(
            evaluate(&bad, BlochVector::ORIGIN),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn validation_examples() {
        assert!(validate_params(&PITCHFORK).is_valid());
        let hopf = Model::Hopf {
            delta: 0.9,
            epsilon: 0.5,
            b: 0.2,
        };
        let report = validate_params(&hopf);
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].contains("epsilon"));
        assert!(!validate_params(&Model::Transcritical { alpha: 1.0, c: 1.5 }).is_valid());
        assert!(validate_params(&Model::Transcritical { alpha: 1.0, c: 0.5 }).is_valid());
        assert!(!validate_params(&Model::SaddleNode {
            alpha: 0.5,
            t: -0.75,
            b: 1.2
        })
        .is_valid());
        assert!(!validate_params(&Model::Pitchfork { alpha: 2.0, t: 0.0 }).is_valid());
        assert!(!validate_params(&Model::Roessler {
            a: 0.1,
            b: 0.1,
            c: 14.0,
            m: 0.0,
            epsilon: 0.35
        })
        .is_valid());
        assert!(!validate_params(&Model::ConstantH {
            h11: -1.0,
            h22: 1.0,
            h33: 0.0
        })
        .is_valid());
        assert!(!validate_params(&Model::Pitchfork {
            alpha: f64::NAN,
            t: 0.0
        })
        .is_valid());
    }

    #[test]
    fn nonneg_scan_examples() {
        assert!(nonneg_scan(&PITCHFORK, 1001).unwrap() >= 0.0);

        let tc = Model::Transcritical { alpha: 1.0, c: 0.5 };
        let min = nonneg_scan(&tc, 1001).unwrap();
        assert_eq!(min, 0.0);
        let (h, _) = tc.coefficients(BlochVector::new(0.0, 0.0, -1.0));
        assert_eq!(h.h11, 0.0);

        // b = 2 alpha with t = 2 alpha leaves h22(z) = z^2 / 2.
        let sn = Model::SaddleNode {
            alpha: 0.5,
            t: 1.0,
            b: 1.0,
        };
        assert_eq!(nonneg_scan(&sn, 1001).unwrap(), 0.0);
        let (h, _) = sn.coefficients(BlochVector::ORIGIN);
        assert_eq!(h.h22, 0.0);

        assert!(matches!(
            nonneg_scan(&HOPF, 11),
            Err(Error::UnsupportedKind("hopf"))
        ));
    }

    #[test]
    fn saddle_node_region_is_not_sufficient_near_pole() {
        // Inside the printed region, but h22(1) = (1 + t - b) / 2 < 0.
        let sn = Model::SaddleNode {
            alpha: 0.5,
            t: -0.75,
            b: 0.4,
        };
        assert!(validate_params(&sn).is_valid());
        assert!(nonneg_scan(&sn, 1001).unwrap() < 0.0);
    }

    #[test]
    fn with_param_round_trips() {
        let m = HOPF.with_param("epsilon", -0.1).unwrap();
        assert_eq!(m.param("epsilon").unwrap(), -0.1);
        assert!(HOPF.with_param("alpha", 1.0).is_err());
        assert!(PITCHFORK.param("delta").is_err());
    }

    #[test]
    fn hopf_psd_at_origin() {
        let (h, _) = HOPF.coefficients(BlochVector::ORIGIN);
        assert!(psd_check(&h, PSD_TOL).ok);
    }
}
