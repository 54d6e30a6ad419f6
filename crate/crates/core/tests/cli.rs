use std::f64::consts::FRAC_PI_4;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unruh-steering"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn analyze(args: &[&str]) -> Value {
    let out = run(&[&["analyze"], args].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn num(v: &Value, key: &str) -> f64 {
    v[key]
        .as_f64()
        .unwrap_or_else(|| panic!("{key} missing or not a number: {}", v[key]))
}

fn triple(v: &Value, key: &str) -> [f64; 3] {
    let a = v[key].as_array().unwrap_or_else(|| panic!("{key} missing"));
    [a[0].as_f64().unwrap(), a[1].as_f64().unwrap(), a[2].as_f64().unwrap()]
}

fn sweep(args: &[&str]) -> Vec<Vec<String>> {
    let out = run(&[&["sweep"], args].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn column(rows: &[Vec<String>], name: &str) -> usize {
    rows[0]
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn analyze_bell_point() {
    let v = analyze(&["--p", "1", "--r", "0"]);
    assert!((num(&v, "concurrence_wootters") - 1.0).abs() < 1e-12);
    assert!((num(&v, "chsh_m") - 2.0).abs() < 1e-12);
    assert!((num(&v, "msc") - 1.0).abs() < 1e-12);
    assert!((num(&v, "r_c") - 0.5).abs() < 1e-12);
    assert_eq!(v["r_c_method"], "analytic");
    assert_eq!(v["msc_method"], "closed_form");
    assert!(v.get("msc_oracle").is_none());
}

#[test]
fn analyze_with_fractional_r() {
    let v = analyze(&["--p", "0.5", "--r-frac", "0.5"]);
    assert!((num(&v, "r") - FRAC_PI_4 / 2.0).abs() < 1e-15);
    let semiaxes = triple(&v, "ellipsoid_first_semiaxes");
    let center = triple(&v, "ellipsoid_first_center");
    let s2 = (FRAC_PI_4 / 2.0).sin().powi(2);
    let long = 0.5 / (1.0 + s2).sqrt();
    for (got, want) in semiaxes.iter().zip([long, long, 0.5 / (1.0 + s2)]) {
        assert!((got - want).abs() < 1e-12, "{semiaxes:?}");
    }
    assert!((center[2] - 0.5 * s2 / (1.0 + s2)).abs() < 1e-12, "{center:?}");
    // Commonly quoted five-digit values.
    for (got, want) in semiaxes.iter().zip([0.46698, 0.46698, 0.43613]) {
        assert!((got - want).abs() < 1e-5, "{semiaxes:?}");
    }
    assert!((center[2] - 0.06387).abs() < 1e-5, "{center:?}");
    assert!(num(&v, "eq17_gap").is_finite());
}

#[test]
fn analyze_maximally_mixed_point() {
    let v = analyze(&["--p", "0", "--r", "0.3"]);
    for key in [
        "concurrence_wootters",
        "concurrence_eq17",
        "chsh_m",
        "b_max",
        "msc",
        "msc_second",
    ] {
        assert_eq!(num(&v, key), 0.0, "{key}");
    }
    assert_eq!(v["r_c"], "inf");
    assert_eq!(v["unsteerable"], true);
}

#[test]
fn analyze_with_oracles_reports_them() {
    let v = analyze(&["--p", "0.8", "--r", "0.5", "--with-oracles"]);
    assert!((num(&v, "msc_oracle") - num(&v, "msc")).abs() < 1e-4);
    assert!((num(&v, "msc_second_oracle") - num(&v, "msc_second")).abs() < 1e-4);
    assert!((num(&v, "r_c_quadrature") - num(&v, "r_c")).abs() < 1e-6);
}

#[test]
fn bad_parameters_fail() {
    for args in [
        vec!["analyze", "--p", "1.5", "--r", "0"],
        vec!["analyze", "--p", "0.5", "--r", "1.0"],
        vec!["analyze", "--p", "0.5", "--r-frac", "2"],
        vec!["analyze", "--p", "0.5"],
        vec!["sweep", "--grid", "0x3"],
        vec!["sweep", "--grid", "abc"],
        vec!["sweep", "--quantities", "entropy"],
        vec!["ellipsoid", "--p", "0.5", "--r", "0.2", "--samples", "3"],
        vec!["ellipsoid", "--p", "0.5", "--r", "0.2", "--steered", "third"],
    ] {
        let out = run(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty(), "{args:?} should explain");
    }
}

#[test]
fn unwritable_output_fails() {
    let out = run(&["sweep", "--grid", "2x2", "--out", "/nonexistent-dir/x.csv"]);
    assert!(!out.status.success());
}

#[test]
fn single_cell_sweep_matches_analyze() {
    let rows = sweep(&["--grid", "1x1", "--p-min", "0.7", "--r-min", "0.4"]);
    assert_eq!(rows.len(), 2);
    let v = analyze(&["--p", "0.7", "--r", "0.4"]);
    let pairs = [
        ("concurrence", "concurrence_wootters"),
        ("concurrence_eq17", "concurrence_eq17"),
        ("chsh_M", "chsh_m"),
        ("b_max", "b_max"),
        ("msc", "msc"),
        ("r_c", "r_c"),
        ("sep_threshold", "sep_threshold"),
        ("bell_threshold", "bell_threshold"),
        ("steer_threshold", "steer_threshold"),
    ];
    for (csv_key, json_key) in pairs {
        let got: f64 = rows[1][column(&rows, csv_key)].parse().unwrap();
        let want = num(&v, json_key);
        assert!(
            (got - want).abs() <= 1e-8 * want.abs().max(1.0),
            "{csv_key}: {got} vs {want}"
        );
    }
}

#[test]
fn sweep_has_expected_layout() {
    let rows = sweep(&["--grid", "3x4"]);
    assert_eq!(
        rows[0].join(","),
        "p,r,concurrence,concurrence_eq17,chsh_M,b_max,msc,r_c,sep_threshold,bell_threshold,steer_threshold"
    );
    assert_eq!(rows.len(), 1 + 12);
    // p outer, r inner
    let ps: Vec<&str> = rows[1..].iter().map(|r| r[0].as_str()).collect();
    assert_eq!(ps, ["0", "0", "0", "0", "0.5", "0.5", "0.5", "0.5", "1", "1", "1", "1"]);
    assert_eq!(rows[1][7], "inf");
}

#[test]
fn separable_region_at_full_acceleration() {
    let rows = sweep(&[
        "--grid",
        "43x1",
        "--r-min",
        &FRAC_PI_4.to_string(),
        "--quantities",
        "concurrence",
    ]);
    let c = column(&rows, "concurrence");
    for row in &rows[1..] {
        let p: f64 = row[0].parse().unwrap();
        let conc: f64 = row[c].parse().unwrap();
        if p <= 3.0 / 7.0 {
            assert_eq!(conc, 0.0, "p={p}");
        } else {
            assert!(conc > 0.0, "p={p}");
        }
    }
}

#[test]
fn sweep_columns_are_monotone_in_r() {
    let rows = sweep(&["--grid", "6x12"]);
    let idx = |name| column(&rows, name);
    let (c, m, sep, steer) = (
        idx("concurrence"),
        idx("msc"),
        idx("sep_threshold"),
        idx("steer_threshold"),
    );
    for group in rows[1..].chunks(12) {
        let val = |row: &Vec<String>, k: usize| row[k].parse::<f64>().unwrap();
        for w in group.windows(2) {
            assert!(val(&w[1], c) <= val(&w[0], c));
            assert!(val(&w[1], m) <= val(&w[0], m));
            assert!(val(&w[1], sep) >= val(&w[0], sep));
            assert!(val(&w[1], steer) >= val(&w[0], steer));
        }
        let p = val(&group[0], 0);
        assert!((val(&group[0], m) - p).abs() < 1e-8);
        assert!((val(&group[11], m) - (2.0f64 / 3.0).sqrt() * p).abs() < 1e-8);
    }
}

#[test]
fn ellipsoid_export() {
    let out = run(&[
        "ellipsoid",
        "--p",
        "0.3",
        "--r",
        &FRAC_PI_4.to_string(),
        "--samples",
        "8",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with('#'));
    assert!(
        lines[0].contains("semiaxes=0.244948974 0.244948974 0.2"),
        "{}",
        lines[0]
    );
    assert!(lines[0].contains("center=0 0 0.1"), "{}", lines[0]);
    assert_eq!(lines[1], "x,y,z");
    assert_eq!(lines.len() - 2, 8);
}

#[test]
fn ellipsoid_points_stay_in_bloch_ball() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    for steered in ["first", "second"] {
        let out = run(&[
            "ellipsoid",
            "--p",
            "1",
            "--r-frac",
            "0.7",
            "--steered",
            steered,
            "--samples",
            "200",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let text = std::fs::read_to_string(&path).unwrap();
        let points: Vec<Vec<f64>> = text
            .lines()
            .skip(2)
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect();
        assert_eq!(points.len(), 200);
        for pt in points {
            let norm2: f64 = pt.iter().map(|x| x * x).sum();
            assert!(norm2 <= 1.0 + 1e-9, "{pt:?}");
        }
    }
}

#[test]
fn werner_sphere_export() {
    let out = run(&["ellipsoid", "--p", "0.9", "--r", "0", "--samples", "50"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(2) {
        let norm: f64 = line
            .split(',')
            .map(|x| x.parse::<f64>().unwrap().powi(2))
            .sum::<f64>()
            .sqrt();
        assert!((norm - 0.9).abs() < 1e-8);
    }
}

#[test]
fn json_survives_reparsing() {
    let out = run(&["analyze", "--p", "0.37", "--r", "0.61"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(v, again);
    let c = num(&v, "concurrence_wootters");
    let c9: f64 = format!("{c:.8e}").parse().unwrap();
    assert!((c - c9).abs() <= 1e-9 * c.abs().max(1e-300));
}
