//! End-to-end checks of the binary: exit codes, artifact shapes, manifest
//! contents, and bit-identical reruns.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn fsbl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsbl"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    serde_json::from_str(&text).expect("valid json")
}

#[test]
fn usage_errors_exit_1() {
    let tmp = TempDir::new().unwrap();
    let out = fsbl(tmp.path(), &["solve-fs", "--m", "0", "--h", "-1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = fsbl(tmp.path(), &["solve-fs"]);
    assert_eq!(out.status.code(), Some(1));
    let out = fsbl(tmp.path(), &["basin", "--tau", "0"]);
    assert_eq!(out.status.code(), Some(1), "center case has no basin");
    let out = fsbl(tmp.path(), &["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn solve_fs_writes_profile_and_report() {
    let tmp = TempDir::new().unwrap();
    let out = fsbl(tmp.path(), &["solve-fs", "--m", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(tmp.path(), "solve_fs.json");
    let fpp0 = report["fpp0"].as_f64().unwrap();
    assert!((fpp0 - 0.332057).abs() < 1e-4);
    let csv = std::fs::read_to_string(tmp.path().join("solve_fs_profile.csv")).unwrap();
    assert!(csv.starts_with("t,theta,phi,f\n"));
    let manifest = json(tmp.path(), "solve_fs_manifest.json");
    assert_eq!(manifest["seed_free"], serde_json::Value::Bool(true));
    assert_eq!(manifest["parameters"]["m"], serde_json::json!(0.0));
    for name in manifest["artifacts"].as_array().unwrap() {
        assert!(tmp.path().join(name.as_str().unwrap()).exists(), "{name} missing");
    }
}

#[test]
fn solve_fs_bracket_failure_exits_2_with_reason() {
    let tmp = TempDir::new().unwrap();
    // horizon too short for any candidate slope to develop
    let out = fsbl(tmp.path(), &["solve-fs", "--m", "0", "--t-max", "0.05"]);
    assert_eq!(out.status.code(), Some(2));
    let report = json(tmp.path(), "solve_fs.json");
    assert!(report["fpp0"].is_null());
    assert!(report["error"].as_str().unwrap().contains("no sign change"));
}

#[test]
fn solve_pseudo_profiles_match_fig41_regimes() {
    let tmp = TempDir::new().unwrap();
    let out = fsbl(tmp.path(), &["solve-pseudo", "--tau", "0.5", "--zeta", "0.2", "--d", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(tmp.path(), "solve_pseudo.json");
    assert_eq!(report["stop_reason"], "converged");
    assert_eq!(report["classification"], "oscillatory");
    assert!(report["crossings"].as_u64().unwrap() >= 3);
    let energy = report["energy"].as_array().unwrap();
    assert!(energy.len() <= 1001);
    // dissipation: first energy above last
    let first = energy.first().unwrap()["e"].as_f64().unwrap();
    let last = energy.last().unwrap()["e"].as_f64().unwrap();
    assert!(first > last && (last + 2.0 / 3.0).abs() < 1e-6);

    let out = fsbl(tmp.path(), &["solve-pseudo", "--tau", "2.83", "--zeta", "0.2", "--d", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(tmp.path(), "solve_pseudo.json");
    assert_eq!(report["classification"], "monotone");
    assert!(report["crossings"].as_u64().unwrap() <= 1);

    // constant profile from the equilibrium
    let out = fsbl(tmp.path(), &["solve-pseudo", "--tau", "1", "--zeta", "1", "--d", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(tmp.path().join("solve_pseudo_profile.csv")).unwrap();
    let second_row = csv.lines().nth(1).unwrap();
    assert!(second_row.starts_with("0.0000000000000000e0,1.0000000000000000e0"));
}

#[test]
fn solve_pseudo_expect_converge_exits_2_on_divergence() {
    let tmp = TempDir::new().unwrap();
    let out = fsbl(
        tmp.path(),
        &["solve-pseudo", "--tau", "-1", "--zeta", "0.2", "--expect-converge"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected convergence"));
}

#[test]
fn sweep_interval_and_negative_tau() {
    let tmp = TempDir::new().unwrap();
    let out = fsbl(tmp.path(), &["sweep-d", "--tau", "1", "--zeta", "0", "--n", "21"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(tmp.path(), "sweep_d.json");
    assert!((report["analytic_hi"].as_f64().unwrap() - 1.154700).abs() < 1e-6);
    assert!((report["analytic_lo"].as_f64().unwrap() + 1.154700).abs() < 1e-6);

    let out = fsbl(tmp.path(), &["sweep-d", "--tau", "-1", "--zeta", "0.2", "--n", "41"]);
    assert_eq!(out.status.code(), Some(0), "reporting tool exits 0");
    let csv = std::fs::read_to_string(tmp.path().join("sweep_d.csv")).unwrap();
    let converged = csv.lines().skip(1).filter(|l| l.contains(",converged,")).count();
    assert_eq!(converged, 0);
    let report = json(tmp.path(), "sweep_d.json");
    assert!(report["empirical_lo"].is_null());
    assert!(report["empirical_note"].as_str().unwrap().contains("no probe converged"));
}

#[test]
fn basin_raster_has_grid_shape() {
    let tmp = TempDir::new().unwrap();
    let out = fsbl(tmp.path(), &["basin", "--tau", "1", "--nz", "2", "--nd", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(tmp.path().join("basin.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4, "header plus 2x2 cells");
    assert!(csv.starts_with("zeta,d,member,converged\n"));
    let pgm = std::fs::read(tmp.path().join("basin.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n2 2\n255\n"));
    let report = json(tmp.path(), "basin.json");
    assert_eq!(report["violations"], serde_json::json!(0));
}

#[test]
fn field_check_negative_control_exits_3() {
    let tmp = TempDir::new().unwrap();
    let out = fsbl(tmp.path(), &["field-check", "--tau", "1", "--zeta", "0.2"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(tmp.path(), "field_check.json");
    assert!(report["residual"].as_f64().unwrap() < 1e-4);
    assert_eq!(report["passed"], serde_json::Value::Bool(true));
    let csv = std::fs::read_to_string(tmp.path().join("field.csv")).unwrap();
    assert!(csv.starts_with("x,y,psi,u,v\n"));

    let out = fsbl(
        tmp.path(),
        &["field-check", "--tau", "1", "--zeta", "0.2", "--perturb", "0.01"],
    );
    assert_eq!(out.status.code(), Some(3));
    let report = json(tmp.path(), "field_check.json");
    assert!(report["residual"].as_f64().unwrap() > 1e-3);
    assert_eq!(report["passed"], serde_json::Value::Bool(false));
}

#[test]
fn fit_ue_reads_csv_and_validates() {
    let tmp = TempDir::new().unwrap();
    let rows: String = (1..=8)
        .map(|i| {
            let x = i as f64;
            format!("{x},{}\n", (x * x + 1.0).sqrt())
        })
        .collect();
    std::fs::write(tmp.path().join("ue.csv"), format!("x,Ue\n{rows}")).unwrap();
    let out = fsbl(tmp.path(), &["fit-ue", "ue.csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(tmp.path(), "fit_ue.json");
    assert!((report["m"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((report["c2"].as_f64().unwrap() - 1.0).abs() < 1e-6);

    std::fs::write(tmp.path().join("short.csv"), "x,Ue\n1,1\n2,2\n3,3\n").unwrap();
    let out = fsbl(tmp.path(), &["fit-ue", "short.csv"]);
    assert_eq!(out.status.code(), Some(1), "3-row file is a usage error");

    // far-field warning on c2 > 0
    let out = fsbl(tmp.path(), &["fit-ue", "ue.csv", "--far-field"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("c2"));
}

#[test]
fn reruns_are_bit_identical_and_golden_mode_relocates() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let out = fsbl(
            tmp.path(),
            &[
                "solve-pseudo",
                "--tau",
                "1",
                "--zeta",
                "0.2",
                "--out-dir",
                dir.to_str().unwrap(),
            ],
        );
        assert_eq!(out.status.code(), Some(0));
    }
    for name in ["solve_pseudo.json", "solve_pseudo_profile.csv", "solve_pseudo_manifest.json"] {
        let fa = std::fs::read(a.join(name)).unwrap();
        let fb = std::fs::read(b.join(name)).unwrap();
        assert_eq!(fa, fb, "{name} differs between reruns");
    }

    let out = fsbl(
        tmp.path(),
        &["solve-pseudo", "--tau", "1", "--zeta", "0.2", "--golden"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("fixtures/solve-pseudo/solve_pseudo.json").exists());
}

#[test]
fn parallel_jobs_do_not_change_artifacts() {
    let tmp = TempDir::new().unwrap();
    let one = tmp.path().join("j1");
    let four = tmp.path().join("j4");
    for (dir, jobs) in [(&one, "1"), (&four, "4")] {
        let out = fsbl(
            tmp.path(),
            &[
                "basin", "--tau", "1", "--nz", "6", "--nd", "6", "--jobs", jobs, "--out-dir",
                dir.to_str().unwrap(),
            ],
        );
        assert_eq!(out.status.code(), Some(0));
    }
    for name in ["basin.csv", "basin.pgm", "basin.json"] {
        let fa = std::fs::read(one.join(name)).unwrap();
        let fb = std::fs::read(four.join(name)).unwrap();
        assert_eq!(fa, fb, "{name} differs between jobs=1 and jobs=4");
    }
}
