use std::path::PathBuf;
use std::process::{Command, Output};

fn xychain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xychain"))
        .args(args)
        .env_remove("XYCHAIN_THREADS")
        .output()
        .expect("binary runs")
}

fn scratch_dir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("xychain-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn three_spin_ring_has_one_crossing() {
    let out = xychain(&["crossings", "--n", "3", "--gamma", "0.5", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["count"], 1);
    let x = v["crossings"][0].as_f64().unwrap();
    assert!((x - 1.1547005383792515).abs() < 1e-6, "{x}");
}

#[test]
fn sweep_csv_layout_and_row_order() {
    let out = xychain(&["discord-sweep", "--gamma", "0.5", "--r", "1,3", "--T", "0", "--lambda", "0.5:0.7:0.1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "lambda,r,value,measure");
    assert_eq!(lines.len(), 1 + 3 * 2);
    let keys: Vec<(String, String)> = lines[1..]
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].to_string())
        })
        .collect();
    let expected: Vec<(String, String)> = ["0.5", "0.6", "0.7"]
        .iter()
        .flat_map(|l| ["1", "3"].iter().map(move |r| (l.to_string(), r.to_string())))
        .collect();
    assert_eq!(keys, expected);
    assert!(!text.contains('\r'));
}

#[test]
fn identical_runs_give_identical_files() {
    let dir = scratch_dir("det");
    let (a, b) = (dir.join("a.csv"), dir.join("b.csv"));
    for p in [&a, &b] {
        let out = xychain(&[
            "eof-sweep", "--gamma", "0.3,0.7", "--r", "1:2", "--T", "0.1", "--lambda", "0.8:1.2:0.05",
            "--output", p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    for name in ["gamma0.3_T0.1", "gamma0.7_T0.1"] {
        let fa = std::fs::read(dir.join(format!("a_{name}.csv"))).unwrap();
        let fb = std::fs::read(dir.join(format!("b_{name}.csv"))).unwrap();
        assert!(!fa.is_empty());
        assert_eq!(fa, fb);
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = scratch_dir("cfg");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# correlators\ngamma=0.9\nr=2\nlambda=0:0.2:0.1\nformat=json\n").unwrap();
    let out = xychain(&["correlators", "--config", cfg.to_str().unwrap(), "--gamma", "0.4"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["gamma"], 0.4);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3 * 4);
    assert!(rows.iter().all(|r| r["r"] == 2));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        vec!["discord-sweep", "--lambda", "0:3:0"],
        vec!["discord-sweep", "--gamma", "abc"],
        vec!["crossings", "--gamma", "0.5"],
        vec!["finite-spectrum", "--n", "20"],
        vec!["fidelity-compare", "--n", "6", "--r", "4"],
        vec!["reproduce-figure", "--figure", "8"],
        vec!["eof-sweep", "--format", "xml"],
        vec!["eof-sweep", "--config", "/nonexistent/xychain.cfg"],
    ] {
        let out = xychain(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = Command::new(env!("CARGO_BIN_EXE_xychain"))
        .args(["eof-sweep", "--lambda", "0:0.1:0.1"])
        .env("XYCHAIN_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_one_and_names_the_point() {
    let out = xychain(&["etcp-fit", "--gamma", "0.5", "--r", "2", "--T", "0.1,0.2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("γ=0.5") && err.contains("r=2"), "{err}");
}

#[test]
fn worker_count_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_xychain"))
            .args(["discord-sweep", "--r", "2", "--T", "0.2", "--lambda", "0.9:1.1:0.05"])
            .env("XYCHAIN_THREADS", threads)
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("3"));
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn finite_spectrum_reports_levels() {
    let out = xychain(&["finite-spectrum", "--n", "3", "--gamma", "0.5", "--lambda", "0:0:1", "--levels", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "lambda,level,energy,parity,gap");
    assert_eq!(lines[1], "0,0,-3,-1,0");
    assert_eq!(lines[2], "0,1,-1,1,2");
}

#[test]
fn figure_preset_writes_tables() {
    let dir = scratch_dir("fig5");
    let out = xychain(&["reproduce-figure", "--figure", "5", "--output", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["fig5a", "fig5b", "fig5c", "fig5d"] {
        let text = std::fs::read_to_string(dir.join(format!("{name}.csv"))).unwrap();
        assert!(text.lines().count() > 10, "{name}");
    }
    let d = std::fs::read_to_string(dir.join("fig5d.csv")).unwrap();
    assert!(d.starts_with("lambda,level,energy\n"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn fidelity_compare_rows() {
    let out = xychain(&["fidelity-compare", "--n", "6", "--gamma", "0.4", "--r", "1:3", "--lambda", "0:0.5:0.5", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!((rows[0]["value"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert_eq!(rows[0]["measure"], "fidelity");
}
