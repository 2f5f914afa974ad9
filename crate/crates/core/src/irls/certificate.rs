//! Empirical check of the local linear contraction of the off-support error.

use crate::error::{Error, Result};
use crate::irls::trace::IterationTrace;

/// Errors at or below this level are treated as solver precision.
pub const DEFAULT_PRECISION_FLOOR: f64 = 1e-12;

/// `μ = γ(1 + η(1−γ)) / (1 − ρ)`.
pub fn contraction_factor(gamma: f64, eta: f64, rho: f64) -> f64 {
    gamma * (1.0 + eta * (1.0 - gamma)) / (1.0 - rho)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearRateReport {
    pub mu: f64,
    /// First stored iteration inside the local regime, if any.
    pub n0: Option<usize>,
    /// Number of consecutive-snapshot pairs checked after `n0`.
    pub checked: usize,
    /// Largest observed `e_{n+1}/e_n` among checked pairs above the floor.
    pub worst_ratio: f64,
    /// Iterations `n` where `e_{n+1} > μ e_n` and `e_{n+1}` is above the floor.
    pub violations: Vec<usize>,
}

impl LinearRateReport {
    pub fn entered_local_regime(&self) -> bool {
        self.n0.is_some()
    }

    pub fn holds(&self) -> bool {
        self.n0.is_some() && self.violations.is_empty()
    }
}

/// Locates the first stored iterate with `‖(x^n − x*)_{T^c}‖₁ ≤ ρ·min_{i∈T}|x*_i|`
/// and checks `‖(x^{n+1} − x*)_{T^c}‖₁ ≤ μ‖(x^n − x*)_{T^c}‖₁` for every later pair
/// of stored iterates (using `μ^gap` when snapshots are not consecutive).
/// Pairs whose later error is at most `floor` pass unconditionally.
pub fn linear_rate_certificate(
    trace: &IterationTrace,
    x_star: &[f64],
    support: &[usize],
    gamma: f64,
    eta: f64,
    rho: f64,
    floor: f64,
) -> Result<LinearRateReport> {
    if !(gamma > 0.0 && gamma < 1.0 && eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid("gamma and eta must lie in (0,1)"));
    }
    let rho_max = 1.0 - gamma * (1.0 + eta * (1.0 - gamma));
    if !(rho > 0.0 && rho < rho_max) {
        return Err(Error::invalid(format!(
            "rho must lie in (0, {rho_max}) for these gamma and eta, got {rho}"
        )));
    }
    if support.is_empty() {
        return Err(Error::invalid("support T is empty"));
    }
    if let Some(&i) = support.iter().find(|&&i| i >= x_star.len()) {
        return Err(Error::invalid(format!("support index {i} out of range")));
    }
    let mu = contraction_factor(gamma, eta, rho);
    let mut on_support = vec![false; x_star.len()];
    support.iter().for_each(|&i| on_support[i] = true);
    let threshold = rho * support.iter().map(|&i| x_star[i].abs()).fold(f64::INFINITY, f64::min);

    let tail_err = |x: &[f64]| -> f64 {
        x.iter()
            .zip(x_star)
            .zip(&on_support)
            .filter(|(_, on)| !**on)
            .map(|((a, b), _)| (a - b).abs())
            .sum()
    };
    let errs: Vec<(usize, f64)> = trace
        .snapshots
        .iter()
        .map(|s| {
            if s.x.len() != x_star.len() {
                Err(Error::invalid("snapshot length differs from x*"))
            } else {
                Ok((s.n, tail_err(&s.x)))
            }
        })
        .collect::<Result<_>>()?;

    let start = errs.iter().position(|&(_, e)| e <= threshold);
    let mut report = LinearRateReport {
        mu,
        n0: start.map(|i| errs[i].0),
        checked: 0,
        worst_ratio: 0.0,
        violations: Vec::new(),
    };
    let Some(start) = start else {
        return Ok(report);
    };
    for pair in errs[start..].windows(2) {
        let ((n, e), (m, e_next)) = (pair[0], pair[1]);
        report.checked += 1;
        if e_next <= floor {
            continue;
        }
        let ratio = if e > 0.0 { e_next / e } else { f64::INFINITY };
        report.worst_ratio = report.worst_ratio.max(ratio);
        if e_next > mu.powi((m - n) as i32) * e {
            report.violations.push(n);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::irls::trace::Snapshot;

    #[test]
    fn mu_example() {
        let mu = contraction_factor(0.9, 0.9, 0.005);
        assert!((mu - 0.9 * 1.09 / 0.995).abs() < 1e-15);
        assert!((mu - 0.985_929_648_241_206).abs() < 1e-12);
    }

    fn trace_of(xs: Vec<Vec<f64>>) -> IterationTrace {
        IterationTrace {
            records: Vec::new(),
            snapshots: xs
                .into_iter()
                .enumerate()
                .map(|(n, x)| Snapshot { n, x, z: None })
                .collect(),
        }
    }

    #[test]
    fn already_at_solution() {
        let x_star = vec![1.0, 0.0, -2.0];
        let t = trace_of(vec![x_star.clone(); 4]);
        let r = linear_rate_certificate(&t, &x_star, &[0, 2], 0.9, 0.9, 0.005, 0.0).unwrap();
        assert_eq!(r.n0, Some(0));
        assert_eq!(r.checked, 3);
        assert!(r.holds());
    }

    #[test]
    fn detects_entry_and_violation() {
        let x_star = vec![1.0, 0.0, 0.0];
        let t = trace_of(vec![
            vec![1.0, 0.5, 0.0],
            vec![1.0, 0.004, 0.0],
            vec![1.0, 0.002, 0.0],
            vec![1.0, 0.00199, 0.0],
        ]);
        let r = linear_rate_certificate(&t, &x_star, &[0], 0.9, 0.9, 0.005, 0.0).unwrap();
        assert_eq!(r.n0, Some(1));
        assert_eq!(r.violations, vec![2]);
        assert!(!r.holds());
        let never = trace_of(vec![vec![1.0, 0.5, 0.0]]);
        let r = linear_rate_certificate(&never, &x_star, &[0], 0.9, 0.9, 0.005, 0.0).unwrap();
        assert!(!r.entered_local_regime());
    }

    #[test]
    fn floor_absorbs_precision_noise() {
        let x_star = vec![1.0, 0.0];
        let t = trace_of(vec![vec![1.0, 1e-3], vec![1.0, 1e-13], vec![1.0, 5e-13]]);
        let r = linear_rate_certificate(&t, &x_star, &[0], 0.9, 0.9, 0.005, 1e-12).unwrap();
        assert!(r.holds());
    }

    #[test]
    fn rejects_rho_outside_range() {
        let t = trace_of(vec![vec![1.0]]);
        assert!(linear_rate_certificate(&t, &[1.0], &[0], 0.9, 0.9, 0.02, 0.0).is_err());
        assert!(linear_rate_certificate(&t, &[1.0], &[0], 0.9, 0.9, 0.0, 0.0).is_err());
    }
}
