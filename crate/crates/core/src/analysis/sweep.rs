//! One-parameter sweeps with branch tracking and structural bifurcation
//! detection.
//!
//! Branches are followed on the polynomial continuation of the field into a
//! ball of radius [`TRACKING_RADIUS`], so a branch crossing the boundary of
//! the admissible ball is not mistaken for a bifurcation. Between two
//! neighbouring parameter values a change is classified from how branches
//! appear, vanish or change their number of unstable directions:
//!
//! * saddle-node: a pair with unstable dimensions differing by one appears or
//!   vanishes while every persisting branch keeps its stability;
//! * pitchfork: a pair of equal stability appears or vanishes symmetrically
//!   around a persisting branch whose stability flips;
//! * transcritical: two persisting branches exchange stability;
//! * Hopf: a single persisting branch gains or loses a complex unstable pair.
//!
//! A parameter value carrying a marginal fixed point sits on the bifurcation
//! itself. Such values are compared through their regular neighbours and the
//! event bracket collapses onto them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::fixed_points::{find_fixed_points_within, FixedPoint, StabilityClass};
use crate::bloch::BlochVector;
use crate::dynamics::VectorField;
use crate::error::{Error, Result};
use crate::models::{validate_params, Model};

/// Radius of the ball in which sweep branches are tracked.
pub const TRACKING_RADIUS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BifurcationKind {
    SaddleNode,
    Pitchfork,
    Transcritical,
    Hopf,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationEvent {
    pub kind: BifurcationKind,
    /// Closed parameter interval, in sweep order, containing the event.
    pub param_bracket: (f64, f64),
    pub location: BlochVector,
    pub inside_admissible_region: bool,
    pub details: String,
}

impl BifurcationEvent {
    pub fn contains(&self, p: f64) -> bool {
        let (a, b) = self.param_bracket;
        a.min(b) <= p && p <= a.max(b)
    }

    pub fn width(&self) -> f64 {
        (self.param_bracket.1 - self.param_bracket.0).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub branch_id: usize,
    pub fixed_point: FixedPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSlice {
    pub param_value: f64,
    pub points: Vec<BranchPoint>,
}

impl SweepSlice {
    fn is_degenerate(&self) -> bool {
        self.points
            .iter()
            .any(|p| p.fixed_point.class == StabilityClass::Marginal)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub param_name: String,
    pub param_values: Vec<f64>,
    pub slices: Vec<SweepSlice>,
    pub events: Vec<BifurcationEvent>,
}

/// Critical saddle-node forcing `2 (|t| / 3)^(3/2)` for `t < 0`.
pub fn saddle_node_critical_b(t: f64) -> Result<f64> {
    if t < 0.0 {
        Ok(2.0 * (t.abs() / 3.0).powf(1.5))
    } else {
        Err(Error::DomainError(format!(
            "critical b requires t < 0, got t = {t}"
        )))
    }
}

/// Sweeps `param_name` of `model` over `n_steps` evenly spaced values from
/// `range.0` to `range.1` (inclusive), locating fixed points with a
/// `grid_n^3` Newton lattice at every value.
pub fn sweep(
    model: &Model,
    param_name: &str,
    range: (f64, f64),
    n_steps: usize,
    grid_n: usize,
) -> Result<SweepResult> {
    let n = n_steps.max(1);
    let values: Vec<f64> = (0..n)
        .map(|k| {
            if n == 1 {
                range.0
            } else {
                range.0 + (range.1 - range.0) * k as f64 / (n - 1) as f64
            }
        })
        .collect();

    let models = values
        .iter()
        .map(|&p| {
            let m = model.with_param(param_name, p)?;
            let report = validate_params(&m);
            if report.is_valid() {
                Ok(m)
            } else {
                Err(Error::InvalidParams(
                    report
                        .violations
                        .into_iter()
                        .map(|v| format!("{param_name} = {p}: {v}"))
                        .collect(),
                ))
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let found: Vec<Vec<FixedPoint>> = models
        .par_iter()
        .map(|m| find_fixed_points_within(&VectorField::new_unchecked(*m), grid_n, TRACKING_RADIUS))
        .collect();

    let slices = assign_branches(&values, found);
    let events = detect_events(&slices);
    Ok(SweepResult {
        param_name: param_name.to_string(),
        param_values: values,
        slices,
        events,
    })
}

/// Greedy nearest-neighbour matching; returns `(prev_index, next_index)`.
fn link(prev: &[FixedPoint], next: &[FixedPoint]) -> Vec<(usize, usize)> {
    let mut candidates: Vec<(f64, usize, usize)> = prev
        .iter()
        .enumerate()
        .flat_map(|(i, p)| {
            next.iter()
                .enumerate()
                .map(move |(j, q)| ((p.location - q.location).norm(), i, j))
        })
        .collect();
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut used_prev = vec![false; prev.len()];
    let mut used_next = vec![false; next.len()];
    let mut links = Vec::new();
    for (_, i, j) in candidates {
        if !used_prev[i] && !used_next[j] {
            used_prev[i] = true;
            used_next[j] = true;
            links.push((i, j));
        }
    }
    links.sort_unstable();
    links
}

fn assign_branches(values: &[f64], found: Vec<Vec<FixedPoint>>) -> Vec<SweepSlice> {
    let mut slices: Vec<SweepSlice> = Vec::with_capacity(values.len());
    let mut next_id = 0usize;
    for (&p, fps) in values.iter().zip(found) {
        let mut ids = vec![usize::MAX; fps.len()];
        if let Some(prev) = slices.last() {
            let prev_fps: Vec<FixedPoint> = prev.points.iter().map(|b| b.fixed_point).collect();
            for (i, j) in link(&prev_fps, &fps) {
                ids[j] = prev.points[i].branch_id;
            }
        }
        for id in ids.iter_mut().filter(|id| **id == usize::MAX) {
            *id = next_id;
            next_id += 1;
        }
        slices.push(SweepSlice {
            param_value: p,
            points: fps
                .into_iter()
                .zip(ids)
                .map(|(fixed_point, branch_id)| BranchPoint {
                    branch_id,
                    fixed_point,
                })
                .collect(),
        });
    }
    slices
}

fn detect_events(slices: &[SweepSlice]) -> Vec<BifurcationEvent> {
    let regular: Vec<usize> = (0..slices.len())
        .filter(|&k| !slices[k].is_degenerate())
        .collect();
    let mut events = Vec::new();
    for pair in regular.windows(2) {
        let (i, j) = (pair[0], pair[1]);
        let bracket = if j == i + 1 {
            (slices[i].param_value, slices[j].param_value)
        } else {
            (slices[i + 1].param_value, slices[j - 1].param_value)
        };
        let prev: Vec<FixedPoint> = slices[i].points.iter().map(|b| b.fixed_point).collect();
        let next: Vec<FixedPoint> = slices[j].points.iter().map(|b| b.fixed_point).collect();
        if let Some((kind, location, details)) = classify_change(&prev, &next) {
            events.push(BifurcationEvent {
                kind,
                param_bracket: bracket,
                location,
                inside_admissible_region: location.is_admissible(),
                details,
            });
        }
    }
    events
}

fn midpoint(a: BlochVector, b: BlochVector) -> BlochVector {
    (a + b) * 0.5
}

/// Classifies the structural difference between two regular slices.
fn classify_change(
    prev: &[FixedPoint],
    next: &[FixedPoint],
) -> Option<(BifurcationKind, BlochVector, String)> {
    let links = link(prev, next);
    let flips: Vec<(usize, usize)> = links
        .iter()
        .copied()
        .filter(|&(i, j)| prev[i].unstable_dimension() != next[j].unstable_dimension())
        .collect();
    let vanished: Vec<&FixedPoint> = (0..prev.len())
        .filter(|i| links.iter().all(|l| l.0 != *i))
        .map(|i| &prev[i])
        .collect();
    let appeared: Vec<&FixedPoint> = (0..next.len())
        .filter(|j| links.iter().all(|l| l.1 != *j))
        .map(|j| &next[j])
        .collect();

    if flips.is_empty() && vanished.is_empty() && appeared.is_empty() {
        return None;
    }
    let unclassified = |loc: BlochVector| {
        Some((
            BifurcationKind::Unclassified,
            loc,
            format!(
                "{} branch(es) vanished, {} appeared, {} changed stability",
                vanished.len(),
                appeared.len(),
                flips.len()
            ),
        ))
    };

    match (vanished.len(), appeared.len()) {
        (0, 0) => match *flips.as_slice() {
            [(i, j)] => {
                let (a, b) = (&prev[i], &next[j]);
                let crossed = a.unstable_dimension().abs_diff(b.unstable_dimension()) == 2;
                if crossed && a.has_complex_pair() && b.has_complex_pair() {
                    Some((
                        BifurcationKind::Hopf,
                        b.location,
                        format!("complex pair crosses the imaginary axis: {} -> {}", a.class.name(), b.class.name()),
                    ))
                } else {
                    unclassified(b.location)
                }
            }
            [(i1, j1), (i2, j2)] => {
                let d1 = next[j1].unstable_dimension() as i64 - prev[i1].unstable_dimension() as i64;
                let d2 = next[j2].unstable_dimension() as i64 - prev[i2].unstable_dimension() as i64;
                let loc = midpoint(next[j1].location, next[j2].location);
                if d1 == -d2 && d1.abs() == 1 {
                    Some((
                        BifurcationKind::Transcritical,
                        loc,
                        "two branches exchange stability".to_string(),
                    ))
                } else {
                    unclassified(loc)
                }
            }
            _ => unclassified(next[flips[0].1].location),
        },
        (2, 0) | (0, 2) => {
            let pair: Vec<&FixedPoint> = if vanished.len() == 2 { vanished.clone() } else { appeared.clone() };
            let verb = if vanished.len() == 2 { "annihilate" } else { "are created" };
            let (p, q) = (pair[0], pair[1]);
            let mid = midpoint(p.location, q.location);
            let separation = (p.location - q.location).norm();
            match *flips.as_slice() {
                [] if p.unstable_dimension().abs_diff(q.unstable_dimension()) == 1 => Some((
                    BifurcationKind::SaddleNode,
                    mid,
                    format!("{} and {} branches {verb}", p.class.name(), q.class.name()),
                )),
                [(i, j)] => {
                    let center = next[j].location;
                    let symmetric = (center - mid).norm() <= 0.25 * separation + 1e-9;
                    let same = p.unstable_dimension() == q.unstable_dimension();
                    if symmetric && same {
                        Some((
                            BifurcationKind::Pitchfork,
                            center,
                            format!(
                                "symmetric {} pair {verb} around a branch turning {} -> {}",
                                p.class.name(),
                                prev[i].class.name(),
                                next[j].class.name()
                            ),
                        ))
                    } else {
                        unclassified(center)
                    }
                }
                _ => unclassified(mid),
            }
        }
        _ => {
            let loc = vanished
                .first()
                .or(appeared.first())
                .map(|f| f.location)
                .unwrap_or_default();
            unclassified(loc)
        }
    }
}
