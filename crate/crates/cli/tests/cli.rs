use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const HOPF: &str = r#"{"kind":"hopf","delta":0.9,"epsilon":0.25,"b":0.2}"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bloch-lindblad"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn read_json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: impl AsRef<Path>) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').filter_map(|f| f.parse().ok()).collect())
        .collect();
    (header, rows)
}

fn model(json: &str) -> String {
    format!("model={json}")
}

#[test]
fn simulate_hopf_reaches_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let m = model(HOPF);
    let out = run(
        dir.path(),
        &[
            "simulate",
            "--set",
            &m,
            "--set",
            r#"initial_state={"x":0.01,"y":0.3,"z":0.01}"#,
            "--set",
            "integrator.t_end=400",
            "--out-prefix",
            "h",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(dir.path().join("h.csv"));
    assert_eq!(header, "t,x,y,z");
    let last = rows.last().unwrap();
    assert_eq!(last[0], 400.0);
    assert!((last[1] * last[1] + last[3] * last[3] - 0.25).abs() < 1e-6);
    assert!(last[2].abs() < 1e-10);
    let meta = read_json(dir.path().join("h.meta.json"));
    assert_eq!(meta["command"], "simulate");
    assert_eq!(meta["library_version"], bloch_lindblad::VERSION);
    assert_eq!(meta["summary"]["terminal_state"]["x"].as_f64().unwrap(), last[1]);
}

#[test]
fn simulate_constant_relaxes_to_one_third() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "simulate",
            "--set",
            r#"model={"kind":"constant_h","h11":2,"h22":1}"#,
            "--set",
            "integrator.t_end=40",
            "--out-prefix",
            "c",
        ],
    );
    assert!(out.status.success());
    let (_, rows) = csv_rows(dir.path().join("c.csv"));
    assert!((rows.last().unwrap()[3] - 1.0 / 3.0).abs() < 1e-9);
    // At least 15 significant digits per value.
    let text = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    let second = text.lines().nth(1).unwrap();
    assert!(second.split(',').all(|f| f.split('e').next().unwrap().len() >= 17));
}

#[test]
fn malformed_config_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"model\": ").unwrap();
    let out = run(dir.path(), &["simulate", "--config", "bad.json", "--out-prefix", "o/x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert!(!dir.path().join("o").exists());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let invalid = model(r#"{"kind":"hopf","delta":0.9,"epsilon":0.5,"b":0.2}"#);
    for args in [
        vec!["simulate", "--set", invalid.as_str(), "--set", "integrator.t_end=1"],
        vec!["simulate", "--set", r#"model={"kind":"pitchfork","alpha":0.5,"t":0}"#],
        vec!["sweep", "--set", r#"model={"kind":"pitchfork","alpha":0.5,"t":0}"#],
        vec!["portrait", "--set", r#"model={"kind":"pitchfork","alpha":0.5,"t":0,"b":1}"#],
        vec!["portrait", "--set", "model.kind=pitchfork", "--set", "model.alpha=0.5", "--set", "model.t=0", "--set", "initial_state.z=1.5"],
        vec!["validate", "--set", r#"model={"kind":"pitchfork","alpha":0.5,"t":0}"#],
        vec!["bogus"],
    ] {
        let out = run(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn runtime_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let m = model(HOPF);
    let out = run(
        dir.path(),
        &["simulate", "--set", &m, "--set", r#"integrator={"t_end":10,"max_steps":3}"#],
    );
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn fixed_point_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"kind":"pitchfork","alpha":0.5,"t":-0.25}"#, 3),
        (r#"{"kind":"pitchfork","alpha":0.5,"t":0.25}"#, 1),
        (r#"{"kind":"transcritical","alpha":1,"c":0}"#, 1),
    ];
    for (i, (json, count)) in cases.iter().enumerate() {
        let m = model(json);
        let prefix = format!("fp{i}");
        let out = run(dir.path(), &["fixed-points", "--set", &m, "--out-prefix", &prefix]);
        assert!(out.status.success());
        let report = read_json(dir.path().join(format!("{prefix}.fixed_points.json")));
        let arr = report.as_array().unwrap();
        assert_eq!(arr.len(), *count, "{json}");
        if i == 2 {
            assert_eq!(arr[0]["class"], "marginal");
            assert!((arr[0]["location"]["z"].as_f64().unwrap() + 1.0).abs() < 1e-10);
        }
        assert_eq!(arr[0]["eigenvalues"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn sweeps_report_single_events() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"kind":"pitchfork","alpha":0.5,"t":0}"#, r#"{"param":"t","start":0.5,"end":-0.5,"steps":101}"#, "pitchfork", 0.0, 0.01),
        (HOPF, r#"{"param":"epsilon","start":-0.25,"end":0.25,"steps":101}"#, "hopf", 0.0, 0.005),
        (
            r#"{"kind":"saddle_node","alpha":0.5,"t":-0.75,"b":0}"#,
            r#"{"param":"b","start":0,"end":0.5,"steps":501}"#,
            "saddle_node",
            0.25,
            0.001,
        ),
    ];
    for (i, (m, s, kind, at, width)) in cases.iter().enumerate() {
        let (m, s, prefix) = (model(m), format!("sweep={s}"), format!("s{i}"));
        let out = run(dir.path(), &["sweep", "--set", &m, "--set", &s, "--out-prefix", &prefix]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let events = read_json(dir.path().join(format!("{prefix}.events.json")));
        let events = events.as_array().unwrap();
        assert_eq!(events.len(), 1, "{kind}: {events:?}");
        assert_eq!(events[0]["kind"], *kind);
        let (a, b) = (
            events[0]["param_bracket"][0].as_f64().unwrap(),
            events[0]["param_bracket"][1].as_f64().unwrap(),
        );
        assert!(a.min(b) <= *at && *at <= a.max(b) && (a - b).abs() <= width + 1e-12);
        let text = std::fs::read_to_string(dir.path().join(format!("{prefix}.branches.csv"))).unwrap();
        assert!(text.starts_with(
            "param,branch_id,x,y,z,re_lambda1,im_lambda1,re_lambda2,im_lambda2,re_lambda3,im_lambda3,class\n"
        ));
        assert!(text.lines().skip(1).all(|l| l.split(',').count() == 12));
    }
}

fn lyapunov_run(dir: &Path, m: &str, init: &str, cfg: &str, prefix: &str) -> Vec<f64> {
    let (m, init, cfg) = (model(m), format!("initial_state={init}"), format!("lyapunov={cfg}"));
    let out = run(dir, &["lyapunov", "--set", &m, "--set", &init, "--set", &cfg, "--out-prefix", prefix]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(dir.join(format!("{prefix}.lyapunov.json")));
    assert!(r["config"]["dt"].is_number());
    r["exponents"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect()
}

#[test]
fn lyapunov_reports() {
    let dir = tempfile::tempdir().unwrap();
    let e = lyapunov_run(
        dir.path(),
        r#"{"kind":"constant_h","h11":1,"h22":1}"#,
        r#"{"x":0.2}"#,
        r#"{"total_time":20,"transient":2,"renorm_interval":0.1,"dt":0.01}"#,
        "c",
    );
    for (got, want) in e.iter().zip([-1.0, -1.0, -2.0]) {
        assert!((got - want).abs() < 1e-3, "{e:?}");
    }
    let e = lyapunov_run(
        dir.path(),
        HOPF,
        r#"{"x":0.5}"#,
        r#"{"total_time":500,"transient":50,"renorm_interval":0.5,"dt":0.01}"#,
        "h",
    );
    assert!(e[0].abs() < 1e-2, "{e:?}");
    let e = lyapunov_run(
        dir.path(),
        r#"{"kind":"roessler","a":0.1,"b":0.1,"c":14,"m":50,"epsilon":0.35}"#,
        r#"{"x":0.35}"#,
        r#"{"total_time":100,"transient":2,"renorm_interval":0.002,"dt":0.0002}"#,
        "r",
    );
    assert!(e[0] > 0.0 && e[2] < 0.0, "{e:?}");
}

#[test]
fn validate_reports() {
    let dir = tempfile::tempdir().unwrap();
    let hopf = model(HOPF);
    let out = run(dir.path(), &["validate", "--set", &hopf, "--set", "initial_state.x=0.1", "--seed", "1", "--out-prefix", "ok"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(dir.path().join("ok.validate.json"));
    assert_eq!(r["ok"], true);
    assert!(r["boundary_max_outward"].as_f64().unwrap() < 0.0);
    assert!(r["consistency_max_dev"].as_f64().unwrap() < 1e-12);

    let bad = model(r#"{"kind":"hopf","delta":0.9,"epsilon":0.5,"b":0.2}"#);
    let out = run(dir.path(), &["validate", "--set", &bad, "--seed", "1", "--out-prefix", "bad"]);
    assert_eq!(out.status.code(), Some(2));
    let r = read_json(dir.path().join("bad.validate.json"));
    assert_eq!(r["param_region_ok"], false);
    assert_eq!(r["ok"], false);

    let roessler = model(r#"{"kind":"roessler","a":0.1,"b":0.1,"c":14,"m":50,"epsilon":0.35}"#);
    let out = run(
        dir.path(),
        &["validate", "--set", &roessler, "--set", "initial_state.x=0.35", "--seed", "1", "--out-prefix", "r"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(dir.path().join("r.validate.json"));
    assert!(r["psd_min_minor_over_trajectory"].as_f64().unwrap() >= -1e-9);
    assert!(r["consistency_max_dev"].as_f64().unwrap() < 1e-9);
    assert!(r["trajectory_max_norm"].as_f64().unwrap() <= 1.0 + 1e-8);

    // Saddle-node parameters inside the printed region but with h22 < 0.
    let sn = model(r#"{"kind":"saddle_node","alpha":0.5,"t":-0.75,"b":0.9}"#);
    let out = run(dir.path(), &["validate", "--set", &sn, "--seed", "1", "--out-prefix", "sn"]);
    assert_eq!(out.status.code(), Some(2));
    let r = read_json(dir.path().join("sn.validate.json"));
    assert_eq!(r["param_region_ok"], true);
    assert!(r["nonneg_scan_min"].as_f64().unwrap() < 0.0);
}

#[test]
fn portrait_grids() {
    let dir = tempfile::tempdir().unwrap();
    let hopf = model(HOPF);
    let out = run(dir.path(), &["portrait", "--set", &hopf, "--out-prefix", "h"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(dir.path().join("h.portrait.csv"));
    assert_eq!(header, "c1,c2,dc1,dc2");
    assert_eq!(rows.len(), 441);
    let origin = rows.iter().find(|r| r[0] == 0.0 && r[1] == 0.0).unwrap();
    assert_eq!((origin[2], origin[3]), (0.0, 0.0));

    let p = model(r#"{"kind":"pitchfork","alpha":0.5,"t":-0.25}"#);
    let out = run(dir.path(), &["portrait", "--set", &p, "--set", "portrait.n=5", "--out-prefix", "p"]);
    assert!(out.status.success());
    let (_, rows) = csv_rows(dir.path().join("p.portrait.csv"));
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().filter(|r| r[0] == 0.5).all(|r| r[2].abs() < 1e-15));
}
