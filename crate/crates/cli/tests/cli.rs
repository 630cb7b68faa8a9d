use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn holotent(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holotent"))
        .args(args)
        .env("HOLOTENT_OUT", out)
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn hardy_norm_of_constant_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "one.json", r#"{"n":1,"poly":[[[0],[1.0,0.0]]]}"#);
    let o = holotent(&["norm", &f, "--space", "hardy", "--p", "2", "--seed", "17"], dir.path());
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["seed"], 17);
}

#[test]
fn bergman_norm_of_z_squares_to_one_half() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "z.json", r#"{"n":1,"poly":[[[1],[1.0,0.0]]]}"#);
    let o = holotent(&["norm", &f, "--space", "bergman", "--p", "2", "--beta", "0"], dir.path());
    let v = stdout_json(&o).get("value").unwrap().as_f64().unwrap();
    assert!((v * v - 0.5).abs() < 1e-12);
}

#[test]
fn missing_file_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = holotent(&["norm", "/nonexistent/f.json", "--space", "hardy"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read"));
}

#[test]
fn lattice_verdicts_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["lattice", "--n", "1", "--r", "0.3", "--samples", "3000", "--seed", "4", "--write"];
    let a = holotent(&args, dir.path());
    let b = holotent(&args, dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    let check = &v["lattice"]["check"];
    for key in ["covering_ok", "separation_ok", "multiplicity_ok"] {
        assert_eq!(check[key], true, "{key}");
    }
    assert_eq!(v["seed"], 4);
    assert!(dir.path().join("lattice.json").exists());
}

#[test]
fn lattice_radius_outside_unit_interval_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = holotent(&["lattice", "--r", "1.5"], dir.path());
    assert!(!o.status.success());
    assert!(o.stdout.is_empty());
}

#[test]
fn projection_and_pairing() {
    let dir = tempfile::tempdir().unwrap();
    let sym = write(dir.path(), "sym.json", r#"{"n":1,"terms":[[[2],[1],[1.0,0.0]],[[0],[1],[1.0,0.0]]]}"#);
    let o = holotent(&["project", &sym, "--beta", "0"], dir.path());
    let v = stdout_json(&o);
    // P(z^2 conj z) = (2/3) z and P(conj z) = 0 for the unweighted projection
    let terms = v["function"]["poly"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert!((terms[0][1][0].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-15);

    let z = write(dir.path(), "z.json", r#"{"n":1,"poly":[[[1],[1.0,0.0]]]}"#);
    for method in ["closed", "numeric"] {
        let o = holotent(&["pairing", &z, &z, "--alpha", "0", "--method", method], dir.path());
        let v = stdout_json(&o);
        assert!((v["re"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-8, "{method}: {v}");
    }
}

#[test]
fn fracderiv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", r#"{"n":1,"poly":[[[0],[1.0,0.0]],[[3],[0.0,2.0]]]}"#);
    let o = holotent(&["fracderiv", &f, "--s", "0", "--t", "1.5"], dir.path());
    let d = stdout_json(&o)["function"].clone();
    let g = write(dir.path(), "d.json", &d.to_string());
    let back = stdout_json(&holotent(&["fracderiv", &g, "--s", "0", "--t", "1.5", "--integral"], dir.path()));
    let terms = back["function"]["poly"].as_array().unwrap();
    assert!((terms[1][1][1].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn atoms_lists_one_coefficient_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", r#"{"n":1,"poly":[[[0],[1.0,0.0]],[[1],[1.0,0.0]]]}"#);
    let o = holotent(&["atoms", &f, "--r", "0.4", "--eps", "0.1"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert!(!v["atoms"].as_array().unwrap().is_empty());
}

#[test]
fn empty_suite_passes_with_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let suite = write(dir.path(), "suite.json", r#"{"experiments": []}"#);
    let out = dir.path().join("reports");
    let o = holotent(&["verify", &suite], &out);
    assert!(o.status.success());
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(report["experiments"].as_array().unwrap().is_empty());
    assert_eq!(fs::read_to_string(out.join("report.csv")).unwrap().lines().count(), 1);
}

#[test]
fn hypothesis_violation_is_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let suite = write(
        dir.path(),
        "suite.json",
        r#"{"experiments": [{"name": "bad", "kind": "forelli_rudin", "n": 1, "t": 0.0, "s": [-1.0], "min_gap": 0.1}]}"#,
    );
    let o = holotent(&["verify", &suite], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout_json(&o)["outcomes"]["bad"], "skipped");
    let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().contains(",skipped,"));
}

#[test]
fn htchar_check_passes_and_failures_set_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let suite = write(
        dir.path(),
        "suite.json",
        r#"{"experiments": [
            {"name": "htchar", "kind": "equivalence", "theorem": "HTchar",
             "params": [{"n": 1, "p": 2.0, "q": 2.0, "s": 0.0, "t": 1.0}],
             "family": {"kind": "atoms", "exponent": 2.0, "min_gap": 0.01},
             "band": {"band": 50.0}}
        ]}"#,
    );
    let o = holotent(&["verify", &suite, "--seed", "3"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["outcomes"]["htchar"], "pass");
    assert_eq!(v["seed"], 3);

    let failing = write(
        dir.path(),
        "fail.json",
        r#"{"experiments": [{"name": "tight", "kind": "frac_oracle", "cases": [[1, 0.0, 1.0]], "kmax": 5, "degree": 4, "trials": 1},
                            {"name": "huge", "kind": "lattice", "n": 1, "r": 0.3, "eps": 0.1, "samples": 500, "max_obs": 1}]}"#,
    );
    let o = holotent(&["verify", &failing], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["outcomes"]["huge"], "fail");
}

#[test]
fn report_summarizes_a_written_directory() {
    let dir = tempfile::tempdir().unwrap();
    let suite = write(
        dir.path(),
        "suite.json",
        r#"{"experiments": [{"name": "frac", "kind": "frac_oracle", "cases": [[1, 0.0, 1.0]], "kmax": 5, "degree": 4, "trials": 1}]}"#,
    );
    assert!(holotent(&["verify", &suite], dir.path()).status.success());
    let o = holotent(&["report"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout_json(&o)["experiments"][0]["outcome"], "pass");
    assert_eq!(fs::read_to_string(dir.path().join("summary.csv")).unwrap(), "name,outcome\nfrac,pass\n");
    assert_eq!(holotent(&["report", "/nonexistent"], dir.path()).status.code(), Some(2));
}
