//! Subcommand implementations. Each returns the files to write and whether
//! the run passed.

use std::ops::ControlFlow;

use bloch_lindblad::analysis::{find_fixed_points, lyapunov_spectrum, sweep, vector_field_grid, FixedPoint};
use bloch_lindblad::bloch::psd_check;
use bloch_lindblad::dynamics::consistency_check;
use bloch_lindblad::models::{nonneg_scan, validate_params};
use bloch_lindblad::solver::{integrate, integrate_with, sample_boundary_flux, IntegratorConfig};
use bloch_lindblad::{BlochVector, ModelKind, VectorField, VERSION};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{json as to_json, with_suffix, Csv, Field, Outputs};

/// Failure split by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad configuration or failed validation (exit 2).
    Config(anyhow::Error),
    /// Numerical or I/O failure during the run (exit 3).
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "configuration error: {e:#}"),
            Failure::Runtime(e) => write!(f, "runtime error: {e:#}"),
        }
    }
}

impl From<bloch_lindblad::Error> for Failure {
    fn from(e: bloch_lindblad::Error) -> Self {
        use bloch_lindblad::Error as E;
        match e {
            E::InvalidParams(_) | E::UnknownParam { .. } | E::UnsupportedKind(_) | E::InvalidConfig(_) | E::DomainError(_) => {
                Failure::Config(e.into())
            }
            _ => Failure::Runtime(e.into()),
        }
    }
}

fn config_err(msg: impl std::fmt::Display) -> Failure {
    Failure::Config(anyhow::anyhow!("{msg}"))
}

fn runtime(e: anyhow::Error) -> Failure {
    Failure::Runtime(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    FixedPoints,
    Sweep,
    Lyapunov,
    Validate,
    Portrait,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::FixedPoints => "fixed-points",
            Command::Sweep => "sweep",
            Command::Lyapunov => "lyapunov",
            Command::Validate => "validate",
            Command::Portrait => "portrait",
        }
    }
}

pub struct RunOutcome {
    pub outputs: Outputs,
    pub passed: bool,
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<RunOutcome, Failure> {
    if !cfg.initial_state.is_finite() || !cfg.initial_state.is_admissible() {
        return Err(config_err(format!(
            "initial state {:?} lies outside the Bloch ball",
            cfg.initial_state
        )));
    }
    if cmd != Command::Validate {
        validate_params(&cfg.model).into_result()?;
    }
    let prefix = cfg.out_prefix.as_str();
    let mut outputs = Outputs::default();
    let mut passed = true;
    let summary = match cmd {
        Command::Simulate => simulate(cfg, prefix, &mut outputs)?,
        Command::FixedPoints => fixed_points(cfg, prefix, &mut outputs)?,
        Command::Sweep => sweep_cmd(cfg, prefix, &mut outputs)?,
        Command::Lyapunov => lyapunov(cfg, prefix, &mut outputs)?,
        Command::Validate => {
            let report = validate(cfg)?;
            passed = report.ok;
            outputs.add(with_suffix(prefix, ".validate.json"), to_json(&report).map_err(runtime)?);
            json!({ "ok": report.ok })
        }
        Command::Portrait => portrait(cfg, prefix, &mut outputs)?,
    };
    let files: Vec<String> = outputs
        .paths()
        .map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned())
        .collect();
    let meta = json!({
        "command": cmd.name(),
        "library_version": VERSION,
        "model": cfg.model,
        "config": cfg,
        "outputs": files,
        "summary": summary,
    });
    outputs.add(with_suffix(prefix, ".meta.json"), to_json(&meta).map_err(runtime)?);
    Ok(RunOutcome { outputs, passed })
}

fn simulate(cfg: &RunConfig, prefix: &str, out: &mut Outputs) -> Result<Value, Failure> {
    let icfg = cfg
        .integrator
        .ok_or_else(|| config_err("simulate needs an `integrator` section"))?;
    icfg.validate()?;
    let traj = integrate(&cfg.model, cfg.initial_state, &icfg)?;
    let mut csv = Csv::new(&["t", "x", "y", "z"]);
    for (&t, v) in traj.times.iter().zip(&traj.states) {
        csv.row(&[Field::F(t), Field::F(v.x), Field::F(v.y), Field::F(v.z)]);
    }
    out.add(with_suffix(prefix, ".csv"), csv.finish());
    Ok(json!({
        "final_time": traj.final_time(),
        "terminal_state": traj.final_state(),
        "steps": traj.len() - 1,
        "max_norm": traj.max_norm(),
    }))
}

#[derive(Serialize)]
struct FixedPointRecord {
    location: BlochVector,
    eigenvalues: [[f64; 2]; 3],
    class: &'static str,
    residual: f64,
    admissible: bool,
}

impl From<&FixedPoint> for FixedPointRecord {
    fn from(fp: &FixedPoint) -> Self {
        Self {
            location: fp.location,
            eigenvalues: fp.eigenvalues.map(|e| [e.re, e.im]),
            class: fp.class.name(),
            residual: fp.residual,
            admissible: fp.is_admissible(),
        }
    }
}

fn fixed_points(cfg: &RunConfig, prefix: &str, out: &mut Outputs) -> Result<Value, Failure> {
    let fps = find_fixed_points(&cfg.model, cfg.fixed_points.grid_n)?;
    let records: Vec<FixedPointRecord> = fps.iter().map(FixedPointRecord::from).collect();
    out.add(with_suffix(prefix, ".fixed_points.json"), to_json(&records).map_err(runtime)?);
    Ok(json!({ "count": records.len() }))
}

fn sweep_cmd(cfg: &RunConfig, prefix: &str, out: &mut Outputs) -> Result<Value, Failure> {
    let opts = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| config_err("sweep needs a `sweep` section"))?;
    if opts.steps < 2 {
        return Err(config_err("sweep.steps must be >= 2"));
    }
    let result = sweep(&cfg.model, &opts.param, (opts.start, opts.end), opts.steps, opts.grid_n)?;
    let mut csv = Csv::new(&[
        "param",
        "branch_id",
        "x",
        "y",
        "z",
        "re_lambda1",
        "im_lambda1",
        "re_lambda2",
        "im_lambda2",
        "re_lambda3",
        "im_lambda3",
        "class",
    ]);
    for slice in &result.slices {
        for b in &slice.points {
            let fp = &b.fixed_point;
            let e = fp.eigenvalues;
            csv.row(&[
                Field::F(slice.param_value),
                Field::U(b.branch_id),
                Field::F(fp.location.x),
                Field::F(fp.location.y),
                Field::F(fp.location.z),
                Field::F(e[0].re),
                Field::F(e[0].im),
                Field::F(e[1].re),
                Field::F(e[1].im),
                Field::F(e[2].re),
                Field::F(e[2].im),
                Field::S(fp.class.name()),
            ]);
        }
    }
    out.add(with_suffix(prefix, ".branches.csv"), csv.finish());
    out.add(with_suffix(prefix, ".events.json"), to_json(&result.events).map_err(runtime)?);
    Ok(json!({ "param": opts.param, "events": result.events.len() }))
}

fn lyapunov(cfg: &RunConfig, prefix: &str, out: &mut Outputs) -> Result<Value, Failure> {
    let lcfg = cfg
        .lyapunov
        .ok_or_else(|| config_err("lyapunov needs a `lyapunov` section"))?;
    lcfg.validate()?;
    let s = lyapunov_spectrum(&cfg.model, cfg.initial_state, &lcfg)?;
    let report = json!({
        "exponents": s.exponents,
        "sum": s.sum(),
        "mean_divergence": s.mean_divergence,
        "final_state": s.final_state,
        "config": lcfg,
        "initial_state": cfg.initial_state,
    });
    out.add(with_suffix(prefix, ".lyapunov.json"), to_json(&report).map_err(runtime)?);
    Ok(json!({ "exponents": s.exponents }))
}

fn portrait(cfg: &RunConfig, prefix: &str, out: &mut Outputs) -> Result<Value, Failure> {
    let grid = vector_field_grid(&cfg.model, cfg.portrait.plane, cfg.portrait.n)?;
    let mut csv = Csv::new(&["c1", "c2", "dc1", "dc2"]);
    for s in &grid {
        csv.row(&[Field::F(s.c1), Field::F(s.c2), Field::F(s.dc1), Field::F(s.dc2)]);
    }
    out.add(with_suffix(prefix, ".portrait.csv"), csv.finish());
    let (a1, a2) = cfg.portrait.plane.axes();
    Ok(json!({ "rows": grid.len(), "axes": [a1, a2] }))
}

/// Admissibility certificate of a model.
#[derive(Debug, Clone, Serialize)]
pub struct ValidateReport {
    pub param_region_ok: bool,
    pub violations: Vec<String>,
    pub nonneg_scan_min: Option<f64>,
    pub psd_min_minor_over_trajectory: Option<f64>,
    pub trajectory_max_norm: Option<f64>,
    /// Whether the unit sphere must have inward flux everywhere; the
    /// embedded Rössler field only keeps its attractor inside.
    pub trapping_required: bool,
    pub boundary_max_outward: Option<f64>,
    pub consistency_max_dev: Option<f64>,
    pub ok: bool,
}

const TRAJECTORY_NORM_LIMIT: f64 = 1.0 + 1e-8;

fn validate(cfg: &RunConfig) -> Result<ValidateReport, Failure> {
    let opts = cfg.validate;
    let seed = cfg
        .seed
        .ok_or_else(|| config_err("validate samples random states; set `seed`"))?;
    let model = &cfg.model;
    let kind = model.kind();
    let trapping_required = kind != ModelKind::Roessler;
    let violations = validate_params(model).violations;
    let mut report = ValidateReport {
        param_region_ok: violations.is_empty(),
        violations,
        nonneg_scan_min: None,
        psd_min_minor_over_trajectory: None,
        trajectory_max_norm: None,
        trapping_required,
        boundary_max_outward: None,
        consistency_max_dev: None,
        ok: false,
    };
    if !report.param_region_ok {
        return Ok(report);
    }
    let mut ok = true;

    let scanned = matches!(kind, ModelKind::Pitchfork | ModelKind::SaddleNode | ModelKind::Transcritical);
    if scanned {
        let min = nonneg_scan(model, opts.scan_n)?;
        ok &= min >= -opts.psd_tol;
        report.nonneg_scan_min = Some(min);
    } else {
        let field = VectorField::new(*model)?;
        let tcfg = IntegratorConfig::rk45(opts.trajectory_time);
        let mut min_minor = f64::INFINITY;
        let mut max_norm = 0.0_f64;
        integrate_with(&field, cfg.initial_state, 0.0, &tcfg, |_, v, _| {
            let (h, _) = model.coefficients(v);
            min_minor = min_minor.min(psd_check(&h, opts.psd_tol).min_minor());
            max_norm = max_norm.max(v.norm());
            ControlFlow::Continue(())
        })?;
        ok &= min_minor >= -opts.psd_tol && max_norm <= TRAJECTORY_NORM_LIMIT;
        report.psd_min_minor_over_trajectory = Some(min_minor);
        report.trajectory_max_norm = Some(max_norm);
    }

    let flux = sample_boundary_flux(model, opts.n_samples, seed)?;
    if trapping_required {
        ok &= flux < 0.0;
    }
    report.boundary_max_outward = Some(flux);

    if kind != ModelKind::ConstantH {
        let dev = consistency_check(model, opts.n_samples, seed)?;
        let limit = if kind == ModelKind::Roessler { 1e-9 } else { 1e-12 };
        ok &= dev < limit;
        report.consistency_max_dev = Some(dev);
    }
    report.ok = ok;
    Ok(report)
}
