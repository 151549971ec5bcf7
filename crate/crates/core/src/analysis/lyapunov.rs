//! Lyapunov spectra by tangent-space integration with periodic
//! Gram–Schmidt re-orthonormalization.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::analysis::fixed_points::jacobian_of;
use crate::bloch::BlochVector;
use crate::dynamics::{Field, VectorField};
use crate::error::{Error, Result};
use crate::models::Model;
use crate::solver::TRAJECTORY_SLACK;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LyapunovConfig {
    /// Length of the whole run, transient included.
    pub total_time: f64,
    /// Initial stretch that aligns the tangent vectors and is not averaged.
    pub transient: f64,
    pub renorm_interval: f64,
    /// Fixed RK4 step.
    pub dt: f64,
}

impl LyapunovConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} = {x} must be positive")))
            }
        };
        positive("total_time", self.total_time)?;
        positive("renorm_interval", self.renorm_interval)?;
        positive("dt", self.dt)?;
        if !(self.transient >= 0.0 && self.transient < self.total_time) {
            return Err(Error::InvalidConfig(format!(
                "transient = {} must lie in [0, total_time)",
                self.transient
            )));
        }
        if self.renorm_interval < self.dt {
            return Err(Error::InvalidConfig("renorm_interval must be >= dt".into()));
        }
        Ok(())
    }

    fn steps(&self, span: f64) -> usize {
        (span / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSpectrum {
    /// Sorted descending, in inverse time units of the field.
    pub exponents: [f64; 3],
    pub transient_discard: f64,
    pub total_time: f64,
    pub renorm_interval: f64,
    /// Time average of the Jacobian trace over the averaging window.
    pub mean_divergence: f64,
    pub final_state: BlochVector,
}

impl LyapunovSpectrum {
    pub fn sum(&self) -> f64 {
        self.exponents.iter().sum()
    }
}

/// Lyapunov spectrum of `model` along the trajectory from `v0`. The run
/// aborts if the trajectory leaves the admissible ball.
pub fn lyapunov_spectrum(model: &Model, v0: BlochVector, cfg: &LyapunovConfig) -> Result<LyapunovSpectrum> {
    let field = VectorField::new(*model)?;
    let v0 = v0.check_admissible()?;
    run(&field, v0, cfg, true)
}

/// Lyapunov spectrum of an arbitrary three-dimensional field, without any
/// admissibility monitoring.
pub fn lyapunov_spectrum_of<F: Field + ?Sized>(
    field: &F,
    v0: BlochVector,
    cfg: &LyapunovConfig,
) -> Result<LyapunovSpectrum> {
    run(field, v0, cfg, false)
}

fn to_vec(v: BlochVector) -> Vector3<f64> {
    Vector3::new(v.x, v.y, v.z)
}

fn from_vec(v: Vector3<f64>) -> BlochVector {
    BlochVector::new(v[0], v[1], v[2])
}

/// Modified Gram–Schmidt in place; returns the stretch of each column.
fn orthonormalize(q: &mut Matrix3<f64>) -> [f64; 3] {
    let mut norms = [0.0; 3];
    for (i, norm) in norms.iter_mut().enumerate() {
        for j in 0..i {
            let proj = q.column(j).dot(&q.column(i));
            let qj = q.column(j).into_owned();
            q.column_mut(i).axpy(-proj, &qj, 1.0);
        }
        *norm = q.column(i).norm();
        q.column_mut(i).unscale_mut(*norm);
    }
    norms
}

fn run<F: Field + ?Sized>(field: &F, v0: BlochVector, cfg: &LyapunovConfig, monitor: bool) -> Result<LyapunovSpectrum> {
    cfg.validate()?;
    let dt = cfg.dt;
    let n_total = cfg.steps(cfg.total_time);
    let n_transient = cfg.steps(cfg.transient);
    let renorm_every = cfg.steps(cfg.renorm_interval).max(1);

    let tangent = |v: Vector3<f64>, q: &Matrix3<f64>| {
        let b = from_vec(v);
        let j = jacobian_of(field, b);
        (to_vec(field.eval(b)), j * q, j.trace())
    };

    let mut v = to_vec(v0);
    let mut q = Matrix3::identity();
    let mut log_sums = [0.0; 3];
    let mut div_sum = 0.0;

    for step in 1..=n_total {
        let (k1, l1, d1) = tangent(v, &q);
        let (k2, l2, d2) = tangent(v + k1 * (0.5 * dt), &(q + l1 * (0.5 * dt)));
        let (k3, l3, d3) = tangent(v + k2 * (0.5 * dt), &(q + l2 * (0.5 * dt)));
        let (k4, l4, d4) = tangent(v + k3 * dt, &(q + l3 * dt));
        v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        q += (l1 + l2 * 2.0 + l3 * 2.0 + l4) * (dt / 6.0);

        let averaging = step > n_transient;
        if averaging {
            div_sum += (d1 + 2.0 * d2 + 2.0 * d3 + d4) / 6.0 * dt;
        }
        if monitor {
            from_vec(v).check_admissible_within(TRAJECTORY_SLACK)?;
        } else if !v.iter().all(|c| c.is_finite()) {
            return Err(Error::DomainError(format!("trajectory diverged at t = {}", step as f64 * dt)));
        }
        if step % renorm_every == 0 || step == n_transient || step == n_total {
            let norms = orthonormalize(&mut q);
            if averaging {
                for (s, n) in log_sums.iter_mut().zip(norms) {
                    *s += n.ln();
                }
            }
        }
    }

    let span = (n_total - n_transient) as f64 * dt;
    let mut exponents = log_sums.map(|s| s / span);
    exponents.sort_by(|a, b| b.total_cmp(a));
    Ok(LyapunovSpectrum {
        exponents,
        transient_discard: n_transient as f64 * dt,
        total_time: n_total as f64 * dt,
        renorm_interval: renorm_every as f64 * dt,
        mean_divergence: div_sum / span,
        final_state: from_vec(v),
    })
}
