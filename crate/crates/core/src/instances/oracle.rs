//! Closed-form dynamics of the classical schedule on a counterexample instance.
//!
//! With `ε̃_n = z^n_1 − z*_1` and `s_n = ε̃_n/(δ − αε̃_n)`:
//!
//! * `s_0` comes from the initialization,
//! * `s_1 = γ √((ε̃_0² + ε_0²)/((δ − αε̃_0)² + ε_0²))`,
//! * `s_{n+1} = ξ s_n / √(1 + s_n²/(k(2k+1))²)` for `n ≥ 1`,
//!
//! and `ε̃_n = δs_n/(1 + αs_n)`, `ε_n = ε̃_n/(k(2k+1))` for `n ≥ 1`.

use crate::instances::counterexample::{row_count, CounterexampleInstance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleStep {
    pub n: usize,
    pub s: f64,
    pub eps: f64,
    pub z1: f64,
}

pub fn scalar_recursion_oracle(instance: &CounterexampleInstance, n_steps: usize) -> Vec<OracleStep> {
    let c = row_count(instance.k()) as f64;
    let delta = instance.params.delta;
    let alpha = instance.alpha;
    let gamma = instance.params.gamma;
    let z_star1 = instance.params.z_star[0];
    let gap = |s: f64| delta * s / (1.0 + alpha * s);

    let gap0 = instance.z0[0] - z_star1;
    let s0 = gap0 / (delta - alpha * gap0);
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(OracleStep {
        n: 0,
        s: s0,
        eps: instance.eps0,
        z1: instance.z0[0],
    });
    if n_steps == 0 {
        return out;
    }
    let e0sq = instance.eps0 * instance.eps0;
    let mut s = gamma * ((gap0 * gap0 + e0sq) / ((delta - alpha * gap0).powi(2) + e0sq)).sqrt();
    for n in 1..=n_steps {
        if n > 1 {
            s = instance.xi * s / (1.0 + s * s / (c * c)).sqrt();
        }
        let g = gap(s);
        out.push(OracleStep {
            n,
            s,
            eps: g / c,
            z1: z_star1 + g,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::counterexample::{build_counterexample, CounterexampleParams};

    fn k5() -> CounterexampleInstance {
        build_counterexample(
            CounterexampleParams::critical(5, vec![0.5, 1.0, 1.5, 2.0, 2.5]).unwrap(),
            0.5,
        )
        .unwrap()
    }

    #[test]
    fn s_decreases_to_half_and_stays_above() {
        let inst = k5();
        let steps = scalar_recursion_oracle(&inst, 400_000);
        let lower = inst.s_star;
        for w in steps[1..].windows(2) {
            assert!(w[1].s <= w[0].s);
            assert!(w[1].s >= lower - 1e-12);
        }
        let last = steps.last().unwrap();
        assert!((last.s - 0.5).abs() < 1e-9, "s = {}", last.s);
        assert!((last.z1 - inst.params.z_star[0] - inst.limit_gap).abs() < 1e-8);
    }

    #[test]
    fn initial_ratio_lies_in_window() {
        let inst = k5();
        let steps = scalar_recursion_oracle(&inst, 1);
        let s0 = steps[0].s;
        assert!(s0 > inst.s_star / inst.params.gamma && s0 < 1.0);
        assert!(steps[1].s <= inst.params.gamma);
        assert!(steps[1].s > inst.s_star);
        assert!((steps[0].s - inst.s_of(inst.z0[0])).abs() < 1e-14);
    }
}
