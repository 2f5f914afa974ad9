mod common;

use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use sparse_irls::cli::{run_from, solve_exit_code, EXIT_ERROR, EXIT_MAX_ITER, EXIT_NSP_VIOLATED, EXIT_OK};
use sparse_irls::io::{read_matrix, read_vector, write_matrix, write_vector};
use sparse_irls::irls::run_irls_cs;
use sparse_irls::numkernel::DenseMatrix;
use sparse_irls::rng::Rng;
use sparse_irls::{CsInstance, IrlsConfig, Variant};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparse-irls"))
        .args(args)
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn solve_on_identity_exits_zero_with_the_data() {
    let dir = tempfile::tempdir().unwrap();
    let phi = dir.path().join("phi.csv");
    let y = dir.path().join("y.csv");
    let out = dir.path().join("x.csv");
    let trace = dir.path().join("trace.csv");
    write_matrix(&phi, &DenseMatrix::identity(4)).unwrap();
    write_vector(&y, &[1.0, -2.0, 0.0, 3.5]).unwrap();
    let o = bin(&[
        "solve",
        p(&phi),
        p(&y),
        "--K",
        "2",
        "--out",
        p(&out),
        "--trace-out",
        p(&trace),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&o.stderr));
    let x = read_vector(&out).unwrap();
    assert!(common::dist2(&x, &[1.0, -2.0, 0.0, 3.5]) <= 1e-12);
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("n,eps,J,err1,err2,step_w,status"));
}

#[test]
fn stalled_counterexample_solve_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["counterexample", "--k", "3", "--out-dir", p(dir.path())]);
    assert_eq!(o.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&o.stderr));
    let a = read_matrix(dir.path().join("A.csv")).unwrap();
    assert_eq!(a.shape(), (21, 3));
    assert!(dir.path().join("A_tilde.csv").exists());
    let phi = dir.path().join("Phi.csv");
    let y = dir.path().join("y.csv");
    assert!(phi.exists() && y.exists());
    let o = bin(&[
        "solve",
        p(&phi),
        p(&y),
        "--variant",
        "ddfg",
        "--K",
        "3",
        "--max-iter",
        "300",
    ]);
    assert_eq!(
        o.status.code(),
        Some(EXIT_MAX_ITER),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn counterexample_below_critical_gamma_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&[
        "counterexample",
        "--k",
        "5",
        "--gamma",
        "0.5",
        "--out-dir",
        p(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_ERROR));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("alpha") && err.contains("nu"), "{err}");
}

#[test]
fn counterexample_oracle_converges_to_one_half() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&[
        "counterexample",
        "--run",
        "oracle",
        "--steps",
        "400000",
        "--out-dir",
        p(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let csv = std::fs::read_to_string(dir.path().join("oracle.csv")).unwrap();
    assert!(csv.starts_with("n,s,eps,z1"));
    let last: Vec<f64> = csv
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(last[0], 400000.0);
    assert!((last[1] - 0.5).abs() <= 1e-9, "{}", last[1]);
}

#[test]
fn nsp_check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    bin(&["counterexample", "--k", "2", "--out-dir", p(dir.path())]);
    let tilde = dir.path().join("A_tilde.csv");
    let ok = bin(&["nsp-check", p(&tilde), "--K", "2", "--gamma", "0.7", "--samples", "500"]);
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    let bad = bin(&["nsp-check", p(&tilde), "--K", "2", "--gamma", "0.6", "--samples", "500"]);
    assert_eq!(bad.status.code(), Some(EXIT_NSP_VIOLATED));
    let wide = bin(&["nsp-check", p(&tilde), "--K", "6", "--gamma", "0.9", "--samples", "10"]);
    assert!(String::from_utf8_lossy(&wide.stderr).to_lowercase().contains("warning"));
}

#[test]
fn malformed_input_exits_one_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let phi = dir.path().join("phi.csv");
    let y = dir.path().join("y.csv");
    std::fs::write(&phi, "1,0\n0,abc\n").unwrap();
    std::fs::write(&y, "1\n1\n").unwrap();
    let o = bin(&["solve", p(&phi), p(&y)]);
    assert_eq!(o.status.code(), Some(EXIT_ERROR));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("phi.csv") && err.contains('2'), "{err}");
    let missing = bin(&["solve", "/nonexistent/phi.csv", p(&y)]);
    assert_eq!(missing.status.code(), Some(EXIT_ERROR));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(EXIT_ERROR));
    assert_eq!(bin(&["experiment", "--id", "E9"]).status.code(), Some(EXIT_ERROR));
    let help = bin(&["solve", "--help"]);
    assert_eq!(help.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&help.stdout).contains("Exit codes"));
    let describe = bin(&["describe", "--id", "E4"]);
    assert_eq!(describe.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&describe.stdout).contains("60"));
}

#[test]
fn small_experiment_writes_its_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&[
        "experiment",
        "--id",
        "E4",
        "--out",
        p(dir.path()),
        "--Ks",
        "10",
        "--gammas",
        "0.9",
        "--m",
        "20",
        "--N",
        "40",
        "--sparsities",
        "3",
        "--trials",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&o.stderr));
    let root = dir.path().join("E4").join("desk");
    for f in ["trials.csv", "aggregate.csv", "metadata.txt"] {
        assert!(root.join(f).exists(), "{f}");
    }
    let trials = std::fs::read_to_string(root.join("trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 1 + 2 * 2);
}

fn random_system(seed: u64, m: usize, n: usize) -> (DenseMatrix, Vec<f64>) {
    let mut rng = Rng::seed_from(seed);
    let phi = rng.gaussian_matrix(m, n);
    let mut x = vec![0.0; n];
    x[0] = rng.normal();
    x[n - 1] = rng.normal();
    let y = phi.mul_vec(&x).unwrap();
    (phi, y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solve_exit_code_matches_the_solver_status(
        seed in 0u64..1000,
        m in 3usize..8,
        extra in 1usize..8,
        max_iter in 1usize..40,
        modified in any::<bool>(),
    ) {
        let n = m + extra;
        let (phi, y) = random_system(seed, m, n);
        let dir = tempfile::tempdir().unwrap();
        let phi_path = dir.path().join("phi.csv");
        let y_path = dir.path().join("y.csv");
        write_matrix(&phi_path, &phi).unwrap();
        write_vector(&y_path, &y).unwrap();
        let variant = if modified { Variant::Modified } else { Variant::Ddfg };
        let k = 2.min(n - 1);
        // the library run sees the matrix and data exactly as read back from disk
        let inst = CsInstance::new(read_matrix(&phi_path).unwrap(), read_vector(&y_path).unwrap()).unwrap();
        let cfg = IrlsConfig::new(variant).with_k(k).with_max_iter(max_iter);
        let expected = match run_irls_cs(&inst, &cfg) {
            Ok(r) => solve_exit_code(r.status),
            Err(_) => EXIT_ERROR,
        };
        let k_arg = k.to_string();
        let iter_arg = max_iter.to_string();
        let code = run_from([
            "sparse-irls", "solve", p(&phi_path), p(&y_path), "--variant", variant.as_str(), "--K", &k_arg,
            "--max-iter", &iter_arg, "--out", p(&dir.path().join("x.csv")),
        ]);
        prop_assert_eq!(code, expected);
        prop_assert!([EXIT_OK, EXIT_ERROR, EXIT_MAX_ITER].contains(&code));
    }
}
