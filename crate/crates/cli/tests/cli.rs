use std::f64::consts::TAU;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

const BIN: &str = env!("CARGO_BIN_EXE_annulus-dilation");

fn run(args: &[&str], input: &Value, dir: &Path) -> Output {
    let path = dir.join("input.json");
    std::fs::write(&path, input.to_string()).unwrap();
    Command::new(BIN)
        .args(args)
        .arg("--input")
        .arg(&path)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    assert!(
        out.status.code().is_some(),
        "killed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad report ({e}): {}", String::from_utf8_lossy(&out.stderr)))
}

fn matrix(rows: &[&[(f64, f64)]]) -> Value {
    json!(rows.iter().map(|r| r.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn misra_matrix() -> Value {
    matrix(&[&[(0.8, 0.0), (0.1404, 0.0)], &[(0.0, 0.0), (0.8, 0.0)]])
}

/// Face samples in the documented layout: bit `j` of the face puts axis `j`
/// on the inner circle, last axis fastest.
fn faces(dim: usize, per_axis: usize, r: f64, f: impl Fn(&[(f64, f64)]) -> (f64, f64)) -> Value {
    let total = per_axis.pow(dim as u32);
    let out: Vec<Vec<Value>> = (0..1usize << dim)
        .map(|face| {
            (0..total)
                .map(|mut flat| {
                    let mut z = vec![(0.0, 0.0); dim];
                    for axis in (0..dim).rev() {
                        let th = TAU * (flat % per_axis) as f64 / per_axis as f64;
                        flat /= per_axis;
                        let rho = if (face >> axis) & 1 == 1 { r } else { 1.0 };
                        z[axis] = (rho * th.cos(), rho * th.sin());
                    }
                    let (re, im) = f(&z);
                    json!([re, im])
                })
                .collect()
        })
        .collect();
    json!(out)
}

fn table_values(rep: &Value) -> Vec<Vec<f64>> {
    rep["table"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect())
        .collect()
}

#[test]
fn check_reports_ar_unitary_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let m = matrix(&[&[(0.0, 1.0), (0.0, 0.0)], &[(0.0, 0.0), (-0.5, 0.0)]]);
    let out = run(&["check"], &json!({ "schema": "annulus-dilation/v1", "matrix": m }), dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep["ar_unitary"], json!(true));
    assert_eq!(rep["config"]["r"], json!(0.5));
}

#[test]
fn check_certifies_misra_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["check"], &json!({ "matrix": misra_matrix() }), dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep["ar_contraction"], json!("yes"));
    assert_eq!(rep["misra"]["verdict"], json!("yes"));
}

#[test]
fn check_rejects_singular_input() {
    let dir = tempfile::tempdir().unwrap();
    let m = matrix(&[&[(0.0, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (0.7, 0.0)]]);
    let out = run(&["check"], &json!({ "matrix": m }), dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spectrum contains 0"));
}

#[test]
fn parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["check"], &json!({ "matrix": [[1, 2]] }), dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["check"], &json!({ "schema": "other/v9", "matrix": misra_matrix() }), dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["check", "--r", "1.5"], &json!({ "matrix": misra_matrix() }), dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dirichlet_constant_data() {
    let dir = tempfile::tempdir().unwrap();
    let input = json!({ "dim": 2, "faces": faces(2, 8, 0.5, |_| (1.0, 0.0)) });
    let out = run(&["dirichlet", "--eval-grid", "4"], &input, dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    for row in table_values(&rep) {
        assert!((row[4] - 1.0).abs() < 1e-12 && row[5].abs() < 1e-12, "{row:?}");
    }
}

#[test]
fn dirichlet_reproduces_pluriharmonic_data() {
    let dir = tempfile::tempdir().unwrap();
    let re_z1z2 = |z: &[(f64, f64)]| (z[0].0 * z[1].0 - z[0].1 * z[1].1, 0.0);
    let input = json!({ "dim": 2, "faces": faces(2, 8, 0.5, re_z1z2) });
    let csv_path = dir.path().join("table.csv");
    let out = run(
        &["dirichlet", "--eval-grid", "5", "--table", csv_path.to_str().unwrap()],
        &input,
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep["max_mod_ok"], json!(true));

    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["rho_1", "rho_2", "theta_1", "theta_2", "re", "im"]);
    let mut rows = 0;
    for rec in reader.records() {
        let v: Vec<f64> = rec.unwrap().iter().map(|s| s.parse().unwrap()).collect();
        let z1 = (v[0] * v[2].cos(), v[0] * v[2].sin());
        let z2 = (v[1] * v[3].cos(), v[1] * v[3].sin());
        assert!((v[4] - re_z1z2(&[z1, z2]).0).abs() < 1e-9, "{v:?}");
        rows += 1;
    }
    assert_eq!(rows, 625);
}

#[test]
fn dirichlet_random_trig_data_satisfies_max_modulus() {
    let dir = tempfile::tempdir().unwrap();
    // fixed pseudo-random coefficients for cos/sin modes up to degree 2
    let coef = |i: usize| ((i * 7919 % 97) as f64 / 48.5) - 1.0;
    let f = |z: &[(f64, f64)]| {
        let t0 = z[0].1.atan2(z[0].0);
        let t1 = z[1].1.atan2(z[1].0);
        let inner = usize::from(z[0].0.hypot(z[0].1) < 0.75) + 2 * usize::from(z[1].0.hypot(z[1].1) < 0.75);
        let mut v = 0.0;
        for a in -2i32..=2 {
            for b in -2i32..=2 {
                let i = inner * 25 + ((a + 2) * 5 + b + 2) as usize;
                v += coef(i) * (a as f64 * t0 + b as f64 * t1).cos();
            }
        }
        (v, 0.0)
    };
    let input = json!({ "dim": 2, "faces": faces(2, 8, 0.5, f) });
    let out = run(&["dirichlet", "--eval-grid", "4"], &input, dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["max_mod_ok"], json!(true));
}

#[test]
fn dirichlet_face_mismatch_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut f = faces(2, 4, 0.5, |_| (1.0, 0.0));
    f.as_array_mut().unwrap().pop();
    let out = run(&["dirichlet"], &json!({ "dim": 2, "faces": f }), dir.path());
    assert_eq!(out.status.code(), Some(2));
    let f = json!([[[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]], [[0.0, 0.0]], [[0.0, 0.0]]]);
    let out = run(&["dirichlet"], &json!({ "dim": 2, "faces": f }), dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dilate_ar_unitary_pair_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let a = matrix(&[&[(1.0, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (0.0, 0.5)]]);
    let b = matrix(&[&[(0.0, -0.5), (0.0, 0.0)], &[(0.0, 0.0), (-1.0, 0.0)]]);
    let out = run(&["dilate", "--tol", "1e-12"], &json!({ "tuple": [a, b] }), dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert!(rep["verification"]["max_residual"].as_f64().unwrap() <= 1e-12);
    let atoms = rep["bundle"]["atoms"].as_array().unwrap();
    for atom in atoms {
        for u in atom["u"].as_array().unwrap() {
            let m = u[0].as_f64().unwrap().hypot(u[1].as_f64().unwrap());
            assert!((m - 1.0).abs() < 1e-15 || (m - 0.5).abs() < 1e-15);
        }
    }
}

#[test]
fn dilate_scalar_passes_at_default_grid() {
    let dir = tempfile::tempdir().unwrap();
    let input = json!({ "tuple": [matrix(&[&[(0.7, 0.0)]])] });
    let out = run(&["dilate", "--grid-m", "512", "--box-k", "3", "--tol", "1e-6"], &input, dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep["passed"], json!(true));
    assert_eq!(rep["path"], json!("normal"));
}

#[test]
fn dilate_residual_above_tolerance_exits_five() {
    let dir = tempfile::tempdir().unwrap();
    let input = json!({ "tuple": [matrix(&[&[(0.7, 0.0)]])] });
    let out = run(&["dilate", "--grid-m", "8", "--freq-n", "3", "--tol", "1e-12"], &input, dir.path());
    assert_eq!(out.status.code(), Some(5));
    assert_eq!(report(&out)["passed"], json!(false));
}

#[test]
fn dilate_non_normal_dc2_member_has_no_constructive_path() {
    let dir = tempfile::tempdir().unwrap();
    let scalar = matrix(&[&[(0.7, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (0.7, 0.0)]]);
    let out = run(&["dilate"], &json!({ "tuple": [misra_matrix(), scalar] }), dir.path());
    assert_eq!(out.status.code(), Some(4));
    let rep = report(&out);
    assert_eq!(rep["path"], json!("dc2"));
    assert_eq!(rep["certificate"]["ar_contraction"], json!("yes"));

    let other = matrix(&[&[(0.7, 0.0), (0.1, 0.0)], &[(0.0, 0.0), (0.7, 0.0)]]);
    let out = run(&["dilate"], &json!({ "tuple": [misra_matrix(), other] }), dir.path());
    assert_eq!(out.status.code(), Some(4));
    assert!(report(&out)["witness"].as_str().unwrap().contains("doubly commuting"));
}

#[test]
fn kernel_examples() {
    let out = Command::new(BIN).args(["kernel", "--w", "0.8"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert!(rep["k_hat"].as_f64().unwrap() <= rep["comparison"].as_f64().unwrap());
    assert_eq!(rep["within_comparison"], json!(true));

    let out = Command::new(BIN).args(["kernel", "--w", "0,1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));

    let out = Command::new(BIN).args(["kernel", "--w", "0.9999", "--misra-terms", "50"]).output().unwrap();
    assert_eq!(report(&out)["truncation_large"], json!(true));

    let w = 0.5f64.sqrt().to_string();
    let out = Command::new(BIN).args(["kernel", "--w", &w]).output().unwrap();
    assert_eq!(report(&out)["symmetric"], json!(true));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = matrix(&[&[(0.6, 0.1), (0.0, 0.0)], &[(0.0, 0.0), (-0.3, 0.7)]]);
    let b = matrix(&[&[(0.0, 0.9), (0.0, 0.0)], &[(0.0, 0.0), (0.55, 0.0)]]);
    let input = json!({ "tuple": [a, b] });
    let args = ["dilate", "--grid-m", "64", "--freq-n", "16", "--seed", "7"];
    let first = run(&args, &input, dir.path());
    let second = run(&args, &input, dir.path());
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, json!({ "schema": "annulus-dilation/v1", "r": 0.4, "seed": 9 }).to_string()).unwrap();
    let out_path = dir.path().join("report.json");
    let input = json!({ "matrix": misra_matrix() });
    let out = run(
        &["check", "--config", cfg.to_str().unwrap(), "--r", "0.5", "--out", out_path.to_str().unwrap()],
        &input,
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(rep["config"]["r"], json!(0.5));
    assert_eq!(rep["config"]["seed"], json!(9));

    std::fs::write(&cfg, json!({ "bogus": 1 }).to_string()).unwrap();
    let out = run(&["check", "--config", cfg.to_str().unwrap()], &input, dir.path());
    assert_eq!(out.status.code(), Some(2));
}
