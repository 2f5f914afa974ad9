mod common;

use common::dist2;
use sparse_irls::instances::{
    build_a_gamma, build_counterexample, build_tilde_a, critical_gamma, feasible_bound_diagnostic, nsp_check,
    random_positive_z_star, row_count, scalar_recursion_oracle, CounterexampleInstance, CounterexampleParams,
};
use sparse_irls::irls::{run_irls_cs, run_irls_l1r_observed};
use sparse_irls::rng::Rng;
use sparse_irls::{IrlsConfig, Variant};

fn instance(k: usize, seed: u64) -> CounterexampleInstance {
    let z_star = random_positive_z_star(k, &mut Rng::seed_from(seed));
    build_counterexample(CounterexampleParams::critical(k, z_star).unwrap(), 0.5).unwrap()
}

#[test]
fn critical_constants_match_exact_rationals() {
    // c = k(2k+1); ν² = (4c²+1)/(4c²+4); ξ² − 1 = ν²(1 + 1/c²) − 1, reduced by hand.
    for k in 1..=6u64 {
        let c = k * (2 * k + 1);
        let num = 4 * c * c + 1;
        let den = 4 * c * c + 4;
        let nu = (num as f64 / den as f64).sqrt();
        assert!((critical_gamma(k as usize) - nu).abs() <= 1e-15);
        // ν²(c²+1)/c² − 1 = (num(c²+1) − den·c²)/(den·c²), numerator and denominator in integers
        let top = num as i128 * (c * c + 1) as i128 - den as i128 * (c * c) as i128;
        let bottom = den as i128 * (c * c) as i128;
        let s_star = c as f64 * (top as f64 / bottom as f64).sqrt();
        let inst = instance(k as usize, 3);
        assert!(
            (inst.s_star - s_star).abs() <= 1e-9,
            "k={k}: {} vs {s_star}",
            inst.s_star
        );
        assert!((inst.alpha - nu * (k + 1) as f64 / k as f64).abs() <= 1e-15);
    }
    // k = 5: ξ² − 1 = 1/12100 exactly, so s* = 55/110.
    let inst = instance(5, 3);
    assert_eq!(format!("{:.6}", inst.nu), "0.999876");
    assert!((inst.s_star - 0.5).abs() <= 1e-11);
    let nu = (12101.0f64 / 12104.0).sqrt();
    let gap = 55.0 * 0.5 / (1.0 + 1.2 * nu * 0.5);
    assert!((inst.limit_gap - gap).abs() <= 1e-9);
    assert!((gap - 17.1883).abs() < 1e-4);
}

#[test]
fn optimal_residual_is_the_marked_rows() {
    for k in 1..=4 {
        let inst = instance(k, 8);
        let x = inst.x_star();
        assert_eq!(x.len(), row_count(k));
        for (i, v) in x.iter().enumerate() {
            let marked = i < k * k && i % k == 0;
            let want = if marked { -inst.params.delta } else { 0.0 };
            assert!((v - want).abs() <= 1e-12 * inst.params.delta, "row {i}");
        }
        assert!(inst.params.z_star.iter().all(|v| *v > 0.0));
        let (lo, hi) = inst.z0_window;
        assert!(lo < inst.z0[0] && inst.z0[0] < hi);
    }
}

#[test]
fn classical_schedule_follows_the_scalar_recursion() {
    for k in [2usize, 3, 5] {
        let inst = instance(k, 17);
        let steps = 2000;
        let oracle = scalar_recursion_oracle(&inst, steps);
        let z_star = inst.params.z_star.clone();
        let mut seen = Vec::new();
        let cfg = IrlsConfig::new(Variant::Ddfg)
            .with_k(k)
            .with_max_iter(steps)
            .with_step_tol(0.0);
        let run = run_irls_l1r_observed(&inst.regression(), &cfg, inst.z0.clone(), &mut |n, _x, z| {
            let z = z.unwrap();
            seen.push((n, z[0]));
            // coordinates beyond the first never move
            for i in 1..k {
                assert!((z[i] - z_star[i]).abs() <= 1e-12 * z_star[i], "k={k} n={n} i={i}");
            }
            // the sign pattern the stall argument relies on
            assert!(
                z[0] - inst.b[k * k] > 0.0 && inst.b[0] - inst.alpha * z[0] > 0.0,
                "k={k} n={n}"
            );
        })
        .unwrap();
        assert_eq!(seen.len(), steps + 1);
        for (&(n, z1), o) in seen.iter().zip(&oracle).skip(1) {
            assert_eq!(n, o.n);
            let s = inst.s_of(z1);
            assert!((s - o.s).abs() <= 1e-9, "k={k} n={n}: {s} vs {}", o.s);
            let eps = run.trace.records[n].eps;
            assert!((eps - o.eps).abs() <= 1e-12 * o.eps, "k={k} n={n}: {eps} vs {}", o.eps);
        }
        for w in oracle[1..].windows(2) {
            assert!(w[1].s <= w[0].s && w[1].s >= inst.s_star - 1e-12);
        }
    }
}

#[test]
fn compressed_sensing_form_reproduces_the_stall() {
    let inst = instance(3, 4);
    let cs = inst.cs_instance().unwrap();
    let cfg = IrlsConfig::new(Variant::Ddfg)
        .with_k(3)
        .with_max_iter(150)
        .with_step_tol(0.0)
        .with_store_every(1);
    let rc = run_irls_cs(&cs, &cfg).unwrap();
    let rr = sparse_irls::irls::run_irls_l1r(&inst.regression(), &cfg).unwrap();
    for (a, b) in rc.trace.snapshots.iter().zip(&rr.trace.snapshots) {
        assert!(dist2(&a.x, &b.x) <= 1e-6 * (1.0 + common::l1(&b.x)), "n={}", a.n);
    }
}

#[test]
fn modified_family_has_null_space_constant_gamma() {
    for k in 1..=4 {
        let lower = k as f64 / (k as f64 + 1.0);
        let mut gammas = vec![critical_gamma(k), 0.999];
        if lower < 0.9 {
            gammas.push(0.9);
        }
        for gamma in gammas {
            let a = build_a_gamma(k, gamma).unwrap();
            let report = nsp_check(&a, k, gamma, 2000, 1_000_000, 1).unwrap();
            assert!(
                report.gamma_estimate <= gamma + 1e-12,
                "k={k} gamma={gamma}: {}",
                report.gamma_estimate
            );
            // e₁ puts α on k rows and 1 on the other k+1: ratio kα/(k+1) = γ
            assert!((report.gamma_estimate - gamma).abs() <= 1e-12);
        }
    }
}

#[test]
fn stacked_identity_has_constant_k_over_k_plus_one() {
    for k in 1..=3 {
        let want = k as f64 / (k as f64 + 1.0);
        let r = nsp_check(&build_tilde_a(k).unwrap(), k, 0.99, 2000, 1_000_000, 5).unwrap();
        assert!(r.exhaustive);
        assert!((r.gamma_estimate - want).abs() <= 1e-12, "k={k}");
        assert!(r.passed());
        let tight = nsp_check(&build_tilde_a(k).unwrap(), k, want - 1e-6, 100, 1_000_000, 5).unwrap();
        assert!(!tight.passed() && tight.witness.is_some());
    }
}

#[test]
fn feasible_set_distance_bound_constants() {
    // Null space range(Ã); the anchor is k-sparse and the unique ℓ1 minimizer of its coset.
    let k = 2;
    let basis = build_tilde_a(k).unwrap();
    let gamma = k as f64 / (k as f64 + 1.0) + 1e-9;
    let mut anchor = vec![0.0; row_count(k)];
    anchor[0] = -3.0;
    anchor[3] = 1.5;
    let d = feasible_bound_diagnostic(&basis, &anchor, k, gamma, 5000, 2).unwrap();
    assert_eq!(d.pairs, 5000);
    assert!(d.large_constant_holds(), "slack {}", d.min_slack_large_constant);
    assert!(!d.small_constant_holds(), "slack {}", d.min_slack_small_constant);
}

#[test]
fn out_of_range_parameters_are_rejected() {
    let z = vec![1.0; 5];
    assert!(CounterexampleParams::new(5, 0.5, 55.0, z.clone()).is_err());
    assert!(CounterexampleParams::new(5, 1.0, 55.0, z.clone()).is_err());
    assert!(CounterexampleParams::new(5, critical_gamma(5), 56.0, z.clone()).is_err());
    assert!(CounterexampleParams::new(5, critical_gamma(5), 0.0, z.clone()).is_err());
    assert!(CounterexampleParams::new(5, critical_gamma(5), 55.0, vec![1.0; 4]).is_err());
    let err = CounterexampleParams::new(5, 0.5, 55.0, z).unwrap_err().to_string();
    assert!(err.contains("alpha") && err.contains("xi"), "{err}");
}
