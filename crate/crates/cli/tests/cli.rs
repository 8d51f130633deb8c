use std::fs;
use std::process::Command;

fn singlab() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_singlab"));
    c.env_remove("SINGLAB_WORKERS");
    c
}

fn stdout(c: &mut Command) -> (i32, String, String) {
    let out = c.output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn psing_rows_are_worker_independent() {
    let args = ["psing", "--grid", "6:2,7:3", "--samples", "60", "--seed", "9"];
    let (c1, a, _) = stdout(singlab().args(args).args(["--workers", "1"]));
    let (c2, b, _) = stdout(singlab().args(args).env("SINGLAB_WORKERS", "4"));
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert!(a.starts_with("n,d,samples,singular_count,p_hat,wilson_95_lo,wilson_95_hi"));
}

#[test]
fn config_errors_exit_2() {
    let (code, _, err) = stdout(singlab().args(["psing", "--grid", "3:4"]));
    assert_eq!(code, 2, "{err}");
    let (code, _, _) = stdout(singlab().args(["psing"]));
    assert_eq!(code, 2);
    let (code, _, _) = stdout(singlab().args(["lo", "--grid", "4:2", "--params", "{\"bogus\": 1}"]));
    assert_eq!(code, 2);
}

#[test]
fn infeasible_sampler_exits_3() {
    // Forcing the configuration model at (60, 30) exceeds its retry budget.
    let (code, _, err) = stdout(singlab().args(["sample", "--n", "60", "--d", "30", "--method", "configuration"]));
    assert_eq!(code, 3, "{err}");
}

#[test]
fn replay_round_trip_and_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let (code, _, err) = stdout(singlab().args(["enumerate", "--grid", "4:2,5:2", "--samples", "1", "--out"]).arg(&out));
    assert_eq!(code, 0, "{err}");
    let manifest = out.join("manifest.json");
    let (code, msg, err) = stdout(singlab().arg("replay").arg(&manifest).args(["--workers", "3"]));
    assert_eq!(code, 0, "{err}");
    assert!(msg.starts_with("replay ok"));

    // Tampering with the recorded rows is reported as divergence.
    let csv = out.join("enumerate.csv");
    let body = fs::read_to_string(&csv).unwrap();
    let mut m: serde_json::Value = serde_json::from_str(&fs::read_to_string(&manifest).unwrap()).unwrap();
    m["rows_sha256"] = serde_json::Value::String("0".repeat(64));
    fs::write(&manifest, m.to_string()).unwrap();
    fs::write(&csv, body.replace("90", "91")).unwrap();
    let (code, _, err) = stdout(singlab().arg("replay").arg(&manifest));
    assert_eq!(code, 4, "{err}");
    assert!(err.contains("first at line 2"), "{err}");
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(&path, r#"{"experiment": "enumerate", "grid": [[3, 1]], "n_samples": 1}"#).unwrap();
    let (code, out, _) = stdout(singlab().arg("--config").arg(&path).arg("enumerate"));
    assert_eq!(code, 0);
    assert!(out.contains("3,1,6,true,0,0,0.0"), "{out}");
    let (code, out, _) = stdout(singlab().arg("--config").arg(&path).args(["enumerate", "--grid", "3:3"]));
    assert_eq!(code, 0);
    assert!(out.contains("3,3,1,true,1,1,1.0"), "{out}");
    let (code, _, _) = stdout(singlab().arg("--config").arg(&path).arg("psing"));
    assert_eq!(code, 2);
    let (code, _, err) = stdout(singlab().args(["--config", "/nonexistent.json", "psing"]));
    assert_eq!(code, 1);
    assert!(err.contains("/nonexistent.json"));
}

#[test]
fn sample_then_rank() {
    let (code, text, _) = stdout(singlab().args(["sample", "--n", "5", "--d", "1", "--seed", "2"]));
    assert_eq!(code, 0);
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    fs::write(&g, &text).unwrap();
    let (code, json, _) = stdout(singlab().arg("rank").arg(&g));
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["result"]["certificate"]["singular"], false);
    assert_eq!(v["result"]["certificate"]["rank"], 5);
}
