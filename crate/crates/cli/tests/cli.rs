use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use strongmax::report::ExperimentReport;
use strongmax::LatticeFunction;

fn strongmax(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strongmax"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn report(dir: &Path, name: &str) -> ExperimentReport {
    ExperimentReport::from_json(&fs::read_to_string(dir.join(format!("{name}.json"))).unwrap()).unwrap()
}

#[test]
fn eval_delta_gives_reciprocal_field() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "delta.json", r#"{"dim": 1, "origin": [0], "shape": [1], "values": [1.0]}"#);
    let out = dir.path().join("out");
    let o = strongmax(&["eval", &input, "--query", "-3:3", "--m", "1"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let field = LatticeFunction::from_json(&fs::read_to_string(out.join("field.json")).unwrap()).unwrap();
    for n in -3i64..=3 {
        assert_eq!(field.get(&[n]), 1.0 / (n.abs() as f64 + 1.0));
    }
    let argmax = fs::read_to_string(out.join("argmax.csv")).unwrap();
    let rows: Vec<&str> = argmax.lines().collect();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[0], "-3,-3,0,0.25");
    assert_eq!(rows[3], "0,0,0,1");
}

#[test]
fn eval_csv_input_and_output_in_the_plane() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "delta.csv", "# spike\n0,0,1\n");
    let out = dir.path().join("out");
    let o = strongmax(&["eval", &input, "--query", "-2:2,-1:1", "--m", "2", "--format", "csv", "--threads", "1"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let field = LatticeFunction::read_sparse_csv(fs::File::open(out.join("field.csv")).unwrap(), Some(2)).unwrap();
    for n0 in -2i64..=2 {
        for n1 in -1i64..=1 {
            let expect = 1.0 / ((n0.abs() + 1) * (n1.abs() + 1)) as f64;
            assert_eq!(field.get(&[n0, n1]), expect * expect);
        }
    }
    assert_eq!(fs::read_to_string(out.join("argmax.csv")).unwrap().lines().count(), 15);
}

#[test]
fn eval_input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let bad = write(dir.path(), "bad.json", "{\"dim\": 1, \"origin\": [0]");
    let o = strongmax(&["eval", &bad, "--query", "-3:3"], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());

    let good = write(dir.path(), "delta.json", r#"{"dim": 1, "origin": [0], "shape": [1], "values": [1.0]}"#);
    assert_eq!(strongmax(&["eval", &good, "--query", "3:-3"], &out).status.code(), Some(2));
    assert_eq!(strongmax(&["eval", &good, "--query", "-3:3,0:0"], &out).status.code(), Some(2));
    assert_eq!(strongmax(&["eval", &good, "--query", "-3:3", "--m", "0"], &out).status.code(), Some(2));

    let mixed = write(
        dir.path(),
        "mixed.json",
        r#"[{"dim": 1, "origin": [0], "shape": [1], "values": [1.0]}, {"dim": 2, "origin": [0, 0], "shape": [1, 1], "values": [1.0]}]"#,
    );
    assert_eq!(strongmax(&["eval", &mixed, "--query", "-1:1"], &out).status.code(), Some(2));
    let pair = write(
        dir.path(),
        "pair.json",
        r#"[{"dim": 1, "origin": [0], "shape": [1], "values": [1.0]}, {"dim": 1, "origin": [1], "shape": [1], "values": [2.0]}]"#,
    );
    assert_eq!(strongmax(&["eval", &pair, "--query", "-1:1", "--m", "3"], &out).status.code(), Some(2));
    assert_eq!(strongmax(&["eval", &pair, "--query", "-1:1"], &out).status.code(), Some(0));
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(strongmax(&["verify", "engine", "--seed", "7"], &a).status.code(), Some(0));
    assert_eq!(strongmax(&["verify", "engine", "--seed", "7", "--threads", "2"], &b).status.code(), Some(0));
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 4);
    for name in names {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
    assert_eq!(report(&a, "closed_form_field").seed, 7);
}

#[test]
fn verify_variation_covers_delta_and_sharp_inequalities() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = strongmax(&["verify", "variation", "--format", "csv"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let witness = report(&out, "unboundedness_witness");
    assert!(witness.verdicts.iter().any(|v| v.check == "growth_S32_minus_S8" && v.pass));
    for name in ["sharp_uncentered", "sharp_centered"] {
        let r = report(&out, name);
        assert!(!r.verdicts.is_empty() && r.passed() && r.is_consistent());
    }
    assert!(out.join("unboundedness_witness.partial_variation.csv").exists());
}

#[test]
fn verify_all_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = strongmax(&["verify", "all", "--seed", "1"], &out);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS ")).count(), 16);
}

#[test]
fn verify_unknown_suite_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = strongmax(&["verify", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown suite"));
}

#[test]
fn experiment_delta_counterexample_emits_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"op": "delta_counterexample", "params": {"d": 2, "sizes": [32]}, "seed": 5}"#);
    let out = dir.path().join("out");
    assert_eq!(strongmax(&["experiment", &cfg], &out).status.code(), Some(0));
    let csv = fs::read_to_string(out.join("delta_counterexample.partial_variation.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "N,S,closed_form,field_error");
    let row: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[0], 32.0);
    let harmonic: f64 = (1..=33).map(|k| 1.0 / k as f64).sum();
    let closed = 2.0 * (2.0 * harmonic - 1.0) * (2.0 - 2.0 / 33.0);
    assert!((row[1] - closed).abs() <= 1e-9);
    assert_eq!(report(&out, "delta_counterexample").seed, 5);
}

#[test]
fn experiment_ratio_sweep_emits_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"op": "thm17_ratio", "params": {"sizes": [3, 5], "trials": 4}}"#);
    let out = dir.path().join("out");
    assert_eq!(strongmax(&["experiment", &cfg, "--seed", "2"], &out).status.code(), Some(0));
    let rep = report(&out, "thm17_ratio");
    let rows = &rep.tables["ratios"].rows;
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r[4].0.is_finite() && r[4].0 > 0.0));
    assert_eq!(fs::read_to_string(out.join("thm17_ratio.ratios.csv")).unwrap().lines().count(), 9);
}

#[test]
fn experiment_seminorm_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"op": "besov_seminorm", "params": {"bump": {"kind": "gaussian", "center": [0.0], "sigma": 0.5, "amplitude": 1.0},
            "h": 0.05, "lo": [-3.0], "hi": [3.0], "s": [0.25, 0.5], "p": 2.0, "q": 2.0, "k_min": -1, "k_max": 3}}"#,
    );
    let out = dir.path().join("out");
    let o = strongmax(&["experiment", &cfg], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("besov_seminorm.seminorms.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("s,p,q,k_min,k_max,value"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn experiment_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let unknown = write(dir.path(), "u.json", r#"{"op": "nope", "params": {}}"#);
    assert_eq!(strongmax(&["experiment", &unknown], &out).status.code(), Some(2));
    let bad = write(dir.path(), "b.json", r#"{"op": "delta_counterexample", "params": {"d": "two"}}"#);
    assert_eq!(strongmax(&["experiment", &bad], &out).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(strongmax(&["experiment", missing.to_str().unwrap()], &out).status.code(), Some(2));
}
