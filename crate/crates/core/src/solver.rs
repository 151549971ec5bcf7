//! Time integration of a [`VectorField`] with admissibility monitoring.

use std::ops::ControlFlow;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bloch::{BlochVector, ADMISSIBILITY_SLACK};
use crate::dynamics::{Field, VectorField};
use crate::error::{Error, Result};
use crate::models::Model;
use crate::sampling;

/// States further than this outside the unit ball abort integration.
pub const TRAJECTORY_SLACK: f64 = 10.0 * ADMISSIBILITY_SLACK;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4,
    Rk45,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(default = "default_method")]
    pub method: Method,
    /// RK4 step; initial step for RK45.
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    pub t_end: f64,
}

fn default_method() -> Method {
    Method::Rk45
}

fn default_dt() -> f64 {
    1e-3
}

fn default_tol() -> f64 {
    1e-9
}

fn default_max_steps() -> usize {
    10_000_000
}

impl IntegratorConfig {
    pub fn rk4(dt: f64, t_end: f64) -> Self {
        Self {
            method: Method::Rk4,
            dt,
            abs_tol: default_tol(),
            rel_tol: default_tol(),
            max_steps: usize::MAX,
            t_end,
        }
    }

    pub fn rk45(t_end: f64) -> Self {
        Self {
            method: Method::Rk45,
            dt: default_dt(),
            abs_tol: default_tol(),
            rel_tol: default_tol(),
            max_steps: default_max_steps(),
            t_end,
        }
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if self.max_steps < 1 {
            return bad("max_steps must be >= 1".into());
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end = {} must be finite and >= 0", self.t_end));
        }
        Ok(())
    }
}

/// Accepted steps of one integration run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<BlochVector>,
    /// Field value at each state, kept for Hermite interpolation.
    pub derivatives: Vec<BlochVector>,
    pub model: Model,
    pub config: IntegratorConfig,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> BlochVector {
        *self.states.last().expect("trajectory holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds the initial state")
    }

    pub fn max_norm(&self) -> f64 {
        self.states.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Integrates `model` from `v0`, storing every accepted step.
pub fn integrate(model: &Model, v0: BlochVector, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let field = VectorField::new(*model)?;
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut derivatives = Vec::new();
    integrate_with(&field, v0, 0.0, cfg, |t, v, f| {
        times.push(t);
        states.push(v);
        derivatives.push(f);
        ControlFlow::Continue(())
    })?;
    Ok(Trajectory {
        times,
        states,
        derivatives,
        model: *model,
        config: *cfg,
    })
}

/// Summary of a streamed run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub t: f64,
    pub state: BlochVector,
    pub accepted: usize,
    pub rejected: usize,
}

/// Streams `(t, v, f(v))` at the start point and every accepted step to
/// `observer`, integrating from `t0` to `t0 + cfg.t_end`. The observer can
/// stop the run early with `ControlFlow::Break`.
pub fn integrate_with<V, F>(
    field: &V,
    v0: BlochVector,
    t0: f64,
    cfg: &IntegratorConfig,
    mut observer: F,
) -> Result<RunSummary>
where
    V: Field + ?Sized,
    F: FnMut(f64, BlochVector, BlochVector) -> ControlFlow<()>,
{
    cfg.validate()?;
    let v0 = v0.check_admissible()?;
    let f0 = field.eval(v0);
    let t_stop = t0 + cfg.t_end;
    let mut summary = RunSummary {
        t: t0,
        state: v0,
        accepted: 0,
        rejected: 0,
    };
    if observer(t0, v0, f0).is_break() {
        return Ok(summary);
    }
    match cfg.method {
        Method::Rk4 => run_rk4(field, v0, t0, t_stop, cfg, &mut summary, &mut observer)?,
        Method::Rk45 => run_dopri(field, v0, f0, t0, t_stop, cfg, &mut summary, &mut observer)?,
    }
    Ok(summary)
}

fn accept_state(v: BlochVector) -> Result<BlochVector> {
    v.check_admissible_within(TRAJECTORY_SLACK)
}

/// One classical RK4 step.
pub fn rk4_step<V: Field + ?Sized>(field: &V, v: BlochVector, f: BlochVector, h: f64) -> BlochVector {
    let k1 = f;
    let k2 = field.eval(v + k1 * (0.5 * h));
    let k3 = field.eval(v + k2 * (0.5 * h));
    let k4 = field.eval(v + k3 * h);
    v + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0)
}

fn run_rk4<V, F>(
    field: &V,
    v0: BlochVector,
    t0: f64,
    t_stop: f64,
    cfg: &IntegratorConfig,
    summary: &mut RunSummary,
    observer: &mut F,
) -> Result<()>
where
    V: Field + ?Sized,
    F: FnMut(f64, BlochVector, BlochVector) -> ControlFlow<()>,
{
    // Step count fixed up front so the end point is hit without drift.
    let n_steps = ((t_stop - t0) / cfg.dt).ceil() as usize;
    if n_steps > cfg.max_steps {
        return Err(Error::StepLimitExceeded {
            max_steps: cfg.max_steps,
            t: t0,
        });
    }
    let mut v = v0;
    let mut f = field.eval(v);
    let mut t = t0;
    for i in 0..n_steps {
        let t_next = if i + 1 == n_steps {
            t_stop
        } else {
            t0 + (i + 1) as f64 * cfg.dt
        };
        v = accept_state(rk4_step(field, v, f, t_next - t))?;
        t = t_next;
        f = field.eval(v);
        summary.t = t;
        summary.state = v;
        summary.accepted += 1;
        if observer(t, v, f).is_break() {
            break;
        }
    }
    Ok(())
}

// Dormand-Prince 5(4) tableau; the field is autonomous so the nodes c_i
// are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const PI_BETA: f64 = 0.04;
const PI_ALPHA: f64 = 0.2 - 0.75 * PI_BETA;

#[allow(clippy::too_many_arguments)]
fn run_dopri<V, F>(
    field: &V,
    v0: BlochVector,
    f0: BlochVector,
    t0: f64,
    t_stop: f64,
    cfg: &IntegratorConfig,
    summary: &mut RunSummary,
    observer: &mut F,
) -> Result<()>
where
    V: Field + ?Sized,
    F: FnMut(f64, BlochVector, BlochVector) -> ControlFlow<()>,
{
    let mut t = t0;
    let mut v = v0;
    let mut k1 = f0;
    let mut h = cfg.dt.min(t_stop - t0);
    let mut err_prev = 1e-4_f64;
    let mut attempts = 0usize;
    let mut last_rejected = false;

    while t < t_stop {
        if attempts >= cfg.max_steps {
            return Err(Error::StepLimitExceeded {
                max_steps: cfg.max_steps,
                t,
            });
        }
        attempts += 1;
        let last = t + h >= t_stop;
        if last {
            h = t_stop - t;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t, h });
        }

        let k2 = field.eval(v + k1 * (h * A21));
        let k3 = field.eval(v + (k1 * A31 + k2 * A32) * h);
        let k4 = field.eval(v + (k1 * A41 + k2 * A42 + k3 * A43) * h);
        let k5 = field.eval(v + (k1 * A51 + k2 * A52 + k3 * A53 + k4 * A54) * h);
        let k6 = field.eval(v + (k1 * A61 + k2 * A62 + k3 * A63 + k4 * A64 + k5 * A65) * h);
        let v_new = v + (k1 * A71 + k3 * A73 + k4 * A74 + k5 * A75 + k6 * A76) * h;
        let k7 = field.eval(v_new);
        let err_vec = (k1 * E1 + k3 * E3 + k4 * E4 + k5 * E5 + k6 * E6 + k7 * E7) * h;

        let err = error_norm(v, v_new, err_vec, cfg);
        if !err.is_finite() {
            h *= MIN_FACTOR;
            last_rejected = true;
            summary.rejected += 1;
            continue;
        }
        if err <= 1.0 {
            let v_new = accept_state(v_new)?;
            t = if last { t_stop } else { t + h };
            v = v_new;
            k1 = k7;
            summary.t = t;
            summary.state = v;
            summary.accepted += 1;
            if observer(t, v, k1).is_break() {
                return Ok(());
            }
            let mut factor = SAFETY * err.max(1e-10).powf(-PI_ALPHA) * err_prev.powf(PI_BETA);
            factor = factor.clamp(MIN_FACTOR, MAX_FACTOR);
            if last_rejected {
                factor = factor.min(1.0);
            }
            err_prev = err.max(1e-4);
            h *= factor;
            last_rejected = false;
        } else {
            let factor = (SAFETY * err.powf(-0.2)).max(MIN_FACTOR);
            h *= factor;
            last_rejected = true;
            summary.rejected += 1;
        }
    }
    Ok(())
}

fn error_norm(v: BlochVector, v_new: BlochVector, err: BlochVector, cfg: &IntegratorConfig) -> f64 {
    let scale = |a: f64, b: f64| cfg.abs_tol + cfg.rel_tol * a.abs().max(b.abs());
    let ex = err.x / scale(v.x, v_new.x);
    let ey = err.y / scale(v.y, v_new.y);
    let ez = err.z / scale(v.z, v_new.z);
    ((ex * ex + ey * ey + ez * ez) / 3.0).sqrt()
}

/// Cubic Hermite interpolation between two accepted steps.
pub fn hermite(
    (t0, v0, f0): (f64, BlochVector, BlochVector),
    (t1, v1, f1): (f64, BlochVector, BlochVector),
    t: f64,
) -> BlochVector {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    v0 * h00 + f0 * (h10 * h) + v1 * h01 + f1 * (h11 * h)
}

/// Exact solution for constant diagonal `h`: population `z(t)` and
/// coherence `s(t) = x + i y`.
pub fn closed_form_1d(
    h11: f64,
    h22: f64,
    gamma: f64,
    z0: f64,
    s0: Complex64,
    t: f64,
) -> (f64, Complex64) {
    let rate = h11 + h22;
    let z = if rate == 0.0 {
        z0
    } else {
        let z_inf = (h11 - h22) / rate;
        z_inf + (z0 - z_inf) * (-rate * t).exp()
    };
    (z, s0 * (-gamma * t).exp())
}

/// Maximum of `v . F(v)` over `n` seeded points of the unit sphere; the
/// ball is trapping when this is negative.
pub fn sample_boundary_flux(model: &Model, n: usize, seed: u64) -> Result<f64> {
    let field = VectorField::new(*model)?;
    let mut rng = sampling::rng(seed);
    Ok((0..n)
        .map(|_| {
            let v = sampling::sphere(&mut rng);
            v.dot(field.eval(v))
        })
        .fold(f64::NEG_INFINITY, f64::max))
}
