use std::path::Path;
use std::process::{Command, Output};

use twistrank::cli::ApRow;
use twistrank::curve::Catalog;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistrank")).args(args).output().unwrap()
}

fn run_ok(args: &[&str]) -> Output {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ap_table_small_limit() {
    let o = run_ok(&["ap-table", "--curve", "1,0,64,1,0,0", "--limit", "10"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "p,a_p,c_p2\n2,0,0\n3,0,-6\n5,2,-6\n7,0,-14\n");
    let o = run_ok(&["ap-table", "--curve", "64a", "--limit", "1"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "p,a_p,c_p2\n");
}

#[test]
fn ap_table_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ap.json");
    run_ok(&["ap-table", "--curve", "11a", "--limit", "200", "--format", "json", "--out", path(&out)]);
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<ApRow> = serde_json::from_str(&text).unwrap();
    assert_eq!(rows.len(), 46);
    let curve = Catalog::builtin().get("11a").unwrap().clone();
    for r in &rows {
        assert_eq!(r.a_p, curve.ap(r.p).unwrap());
    }
    assert_eq!(serde_json::to_string_pretty(&rows).unwrap() + "\n", text);
}

#[test]
fn ef_report_trivial_twist_and_ordering() {
    let o = run_ok(&["ef-report", "--curve", "37a", "--dmin", "1", "--dmax", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let row = &v[0];
    assert_eq!(row["D"], 1);
    assert_eq!(row["root_number"], -1);
    assert!((row["log_conductor"].as_f64().unwrap() - 37f64.ln()).abs() < 1e-12);

    let args = ["ef-report", "--curve", "11a", "--dmin=-60", "--dmax", "60", "--x", "2000"];
    let one = run_ok(&[&args[..], &["--threads", "1"]].concat()).stdout;
    let many = run_ok(&[&args[..], &["--threads", "8"]].concat()).stdout;
    assert_eq!(one, many);
    let text = String::from_utf8(one).unwrap();
    let ds: Vec<i64> = text.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(ds.len(), 120);
    assert!(ds.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn sweep_is_deterministic_and_writes_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "8", "1"].iter().enumerate() {
        let out = dir.path().join(format!("s{i}.json"));
        run_ok(&[
            "sweep", "--curve", "64a", "--x", "500", "--k", "2", "--T", "5000", "--squarefree", "--coprime",
            "--format", "json", "--threads", threads, "--out", path(&out),
        ]);
        let table = std::fs::read(&out).unwrap();
        let side = std::fs::read(dir.path().join(format!("s{i}.sidecar.json"))).unwrap();
        outputs.push((table, side));
    }
    assert_eq!(outputs[0], outputs[2]);
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&outputs[0].0).unwrap();
    let other: Vec<serde_json::Value> = serde_json::from_slice(&outputs[1].0).unwrap();
    assert_eq!(rows.len(), 2);
    for (a, b) in rows.iter().zip(&other) {
        let (x, y) = (a["empirical_moment"].as_f64().unwrap(), b["empirical_moment"].as_f64().unwrap());
        assert!((x - y).abs() <= 1e-10);
    }
    let side: serde_json::Value = serde_json::from_slice(&outputs[0].1).unwrap();
    assert_eq!(side["constants"]["heath_brown_bound"], 1.5);
    assert_eq!(side["constants"]["goldfeld_bound"], 3.25);
    let k2 = side["constants"]["theoretical_moment_bound"][1][1].as_f64().unwrap();
    assert!((k2 - 6.583333333333333).abs() < 1e-12);
    assert!(side["sign_partition"]["plus"]["count"].as_u64().unwrap() > 0);
}

#[test]
fn empty_family_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.csv");
    let o = run(&["sweep", "--curve", "37a", "--x", "1000", "--T", "1", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty family"));
    assert!(!out.exists());
    assert!(!dir.path().join("m.sidecar.json").exists());
}

#[test]
fn verify_filter_and_usage_errors() {
    let o = run_ok(&["verify", "--only", "gauss"]);
    let lines: Vec<serde_json::Value> =
        String::from_utf8(o.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|l| l["group"] == "gauss" && l["pass"] == true));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gauss"));

    assert_eq!(run(&["verify", "--only", "nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["sweep", "--k"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn config_file_and_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small table\ncurve = 37a\nlimit = 20\n").unwrap();
    let o = run_ok(&["ap-table", "--config", path(&cfg)]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 9);
    let o = run_ok(&["ap-table", "--config", path(&cfg), "--limit", "5"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 4);

    std::fs::write(&cfg, "curve = 37a\nlimt = 20\n").unwrap();
    let o = run(&["ap-table", "--config", path(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("\"limt\""));

    let o = run(&["ef-report", "--curve", "99z"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["ap-table", "--curve", "37a", "--catalog", path(&dir.path().join("missing.csv"))]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["sweep", "--curve", "37a", "--support", "0.9:0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("\"support\""));
}
