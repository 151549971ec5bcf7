//! Limit-cycle extraction for the Hopf model by Poincaré crossings of the
//! half-plane `x = 0, z > 0`.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::bloch::BlochVector;
use crate::dynamics::VectorField;
use crate::error::{Error, Result};
use crate::models::{Model, ModelKind};
use crate::solver::{hermite, integrate_with, IntegratorConfig};

const TOL: f64 = 1e-12;
/// Radii below this count as a collapsed orbit.
const MIN_RADIUS: f64 = 1e-6;
/// Allowed relative spread of the crossing radii.
const MAX_DRIFT: f64 = 1e-2;
const BISECTIONS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCycle {
    /// Time-weighted mean of `sqrt(x^2 + z^2)` over the sampled cycles.
    pub radius_mean: f64,
    pub radius_stddev: f64,
    /// Mean time between consecutive crossings.
    pub period: f64,
    pub crossing_times: Vec<f64>,
    pub crossing_radii: Vec<f64>,
}

fn radius(v: BlochVector) -> f64 {
    v.x.hypot(v.z)
}

/// Integrates `model` from `v0` for `transient` time units and then samples
/// `n_crossings` returns to the section `x = 0, z > 0`.
///
/// Returns [`Error::NoCycleDetected`] when the orbit collapses onto a fixed
/// point or does not settle onto a closed curve.
pub fn limit_cycle(model: &Model, v0: BlochVector, transient: f64, n_crossings: usize) -> Result<LimitCycle> {
    if model.kind() != ModelKind::Hopf {
        return Err(Error::UnsupportedKind(model.kind().name()));
    }
    if n_crossings < 2 {
        return Err(Error::InvalidConfig("n_crossings must be >= 2".into()));
    }
    if !(transient >= 0.0 && transient.is_finite()) {
        return Err(Error::InvalidConfig(format!("transient = {transient} must be >= 0")));
    }
    let field = VectorField::new(*model)?;

    let warmup = IntegratorConfig::rk45(transient).with_tolerances(TOL, TOL);
    let start = integrate_with(&field, v0, 0.0, &warmup, |_, _, _| ControlFlow::Continue(()))?;
    if radius(start.state) < MIN_RADIUS {
        return Err(Error::NoCycleDetected(format!(
            "orbit collapsed to radius {:.3e} after the transient",
            radius(start.state)
        )));
    }

    let horizon = 1e4_f64.max(transient);
    let cfg = IntegratorConfig::rk45(horizon).with_tolerances(TOL, TOL);
    let mut crossing_times: Vec<f64> = Vec::new();
    let mut crossing_radii: Vec<f64> = Vec::new();
    let mut prev: Option<(f64, BlochVector, BlochVector)> = None;
    // Running integrals of r and r^2 between the first and last crossing.
    let (mut int_r, mut int_r2) = (0.0, 0.0);
    let mut collapsed = false;

    integrate_with(&field, start.state, start.t, &cfg, |t, v, f| {
        let cur = (t, v, f);
        let Some(p) = prev.replace(cur) else {
            return ControlFlow::Continue(());
        };
        if radius(v) < MIN_RADIUS {
            collapsed = true;
            return ControlFlow::Break(());
        }
        let crossing = if (p.1.x < 0.0) != (v.x < 0.0) {
            locate(p, cur)
        } else {
            None
        };
        let counting = !crossing_times.is_empty();
        let t_from = if counting { p.0 } else { crossing.map_or(t, |c| c.0) };
        let t_to = match crossing {
            Some(c) if crossing_times.len() == n_crossings => c.0,
            _ => t,
        };
        if counting || crossing.is_some() {
            let (a, b) = simpson(p, cur, t_from, t_to);
            int_r += a;
            int_r2 += b;
        }
        if let Some((tc, vc)) = crossing {
            crossing_times.push(tc);
            crossing_radii.push(vc.z);
            if crossing_times.len() > n_crossings {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    })?;

    if collapsed {
        return Err(Error::NoCycleDetected("orbit collapsed onto a fixed point".into()));
    }
    if crossing_times.len() <= n_crossings {
        return Err(Error::NoCycleDetected(format!(
            "only {} section crossings within {horizon} time units",
            crossing_times.len()
        )));
    }
    let r_max = crossing_radii.iter().copied().fold(f64::MIN, f64::max);
    let r_min = crossing_radii.iter().copied().fold(f64::MAX, f64::min);
    if r_max - r_min > MAX_DRIFT * r_max {
        return Err(Error::NoCycleDetected(format!(
            "crossing radii drift from {r_min:.6} to {r_max:.6}"
        )));
    }

    let span = crossing_times[n_crossings] - crossing_times[0];
    let radius_mean = int_r / span;
    let radius_stddev = (int_r2 / span - radius_mean * radius_mean).max(0.0).sqrt();
    Ok(LimitCycle {
        radius_mean,
        radius_stddev,
        period: span / n_crossings as f64,
        crossing_times,
        crossing_radii,
    })
}

type Node = (f64, BlochVector, BlochVector);

/// Crossing of `x = 0` with `z > 0` inside the step `a -> b`.
fn locate(a: Node, b: Node) -> Option<(f64, BlochVector)> {
    let (mut lo, mut hi) = (a.0, b.0);
    let sign_lo = a.1.x < 0.0;
    for _ in 0..BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if (hermite(a, b, mid).x < 0.0) == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tc = 0.5 * (lo + hi);
    let vc = hermite(a, b, tc);
    (vc.z > 0.0).then_some((tc, vc))
}

/// Simpson integrals of `r` and `r^2` over `[t0, t1]` within step `a -> b`.
fn simpson(a: Node, b: Node, t0: f64, t1: f64) -> (f64, f64) {
    let h = t1 - t0;
    if h <= 0.0 {
        return (0.0, 0.0);
    }
    let r = |t: f64| radius(hermite(a, b, t));
    let (r0, rm, r1) = (r(t0), r(0.5 * (t0 + t1)), r(t1));
    (
        h / 6.0 * (r0 + 4.0 * rm + r1),
        h / 6.0 * (r0 * r0 + 4.0 * rm * rm + r1 * r1),
    )
}
