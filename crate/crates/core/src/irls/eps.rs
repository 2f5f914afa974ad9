//! Weights and the two smoothing-parameter schedules.

use crate::error::{Error, Result};
use crate::numkernel::{rearrangement_entry, sigma_tail, WeightVector};

/// `w_i = (x_i² + ε²)^{-1/2}`.
pub fn weights_from_iterate(x: &[f64], eps: f64) -> Result<WeightVector> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("weights need eps > 0, got {eps}")));
    }
    WeightVector::new(x.iter().map(|v| 1.0 / v.hypot(eps)).collect())
}

fn check_len(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::invalid(format!(
            "iterate has length {}, expected N = {n}",
            x.len()
        )));
    }
    Ok(())
}

/// `min{ε, r_{K+1}(x)/N}`.
pub fn eps_update_ddfg(eps: f64, x_next: &[f64], k: usize, n: usize) -> Result<f64> {
    check_len(x_next, n)?;
    if k + 1 > n {
        return Err(Error::invalid(format!("DDFG update needs K+1 <= N, got K={k}, N={n}")));
    }
    let r = rearrangement_entry(x_next, k + 1)?;
    Ok(eps.min(r / n as f64))
}

/// `min{ε, η(1−γ)σ_K(x)/N}`.
pub fn eps_update_modified(eps: f64, x_next: &[f64], k: usize, n: usize, gamma: f64, eta: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid(format!("gamma must lie in (0,1), got {gamma}")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid(format!("eta must lie in (0,1), got {eta}")));
    }
    eps_update_scaled(eps, x_next, k, n, eta * (1.0 - gamma))
}

/// The Modified update with the product `η(1−γ)` supplied directly.
pub fn eps_update_scaled(eps: f64, x_next: &[f64], k: usize, n: usize, factor: f64) -> Result<f64> {
    check_len(x_next, n)?;
    if k > n {
        return Err(Error::invalid(format!("K={k} exceeds N={n}")));
    }
    if !(factor > 0.0 && factor < 1.0) {
        return Err(Error::invalid(format!("eta*(1-gamma) must lie in (0,1), got {factor}")));
    }
    let sigma = sigma_tail(x_next, k)?;
    Ok(eps.min(factor * sigma / n as f64))
}

/// A resolved ε-update rule for a problem of fixed dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsPolicy {
    Ddfg { k: usize, n: usize },
    Modified { k: usize, n: usize, factor: f64 },
}

impl EpsPolicy {
    pub fn next(&self, eps: f64, x_next: &[f64]) -> Result<f64> {
        match *self {
            EpsPolicy::Ddfg { k, n } => eps_update_ddfg(eps, x_next, k, n),
            EpsPolicy::Modified { k, n, factor } => eps_update_scaled(eps, x_next, k, n, factor),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_examples() {
        assert_eq!(&*weights_from_iterate(&[0.0, 0.0], 1.0).unwrap(), &[1.0, 1.0]);
        let w = weights_from_iterate(&[3.0, 0.0], 4.0).unwrap();
        assert!((w[0] - 0.2).abs() < 1e-15 && (w[1] - 0.25).abs() < 1e-15);
        let w = weights_from_iterate(&[-7.0, 1e-3, 2.5], 0.3).unwrap();
        assert!(w.iter().all(|wi| *wi > 0.0 && *wi <= 1.0 / 0.3));
        assert!(weights_from_iterate(&[1.0], 0.0).is_err());
        assert!(weights_from_iterate(&[1.0], -1.0).is_err());
    }

    #[test]
    fn ddfg_examples() {
        let x = [5.0, 3.0, 2.0, 1.0];
        assert_eq!(eps_update_ddfg(1.0, &x, 1, 4).unwrap(), 0.75);
        assert_eq!(eps_update_ddfg(1.0, &[4.0, 0.0, 0.0, 0.0], 1, 4).unwrap(), 0.0);
        assert_eq!(eps_update_ddfg(1e-6, &x, 1, 4).unwrap(), 1e-6);
        assert!(eps_update_ddfg(1.0, &x, 4, 4).is_err());
    }

    #[test]
    fn modified_examples() {
        assert_eq!(
            eps_update_modified(1.0, &[5.0, 3.0, 0.0, 0.0], 2, 4, 0.5, 0.9).unwrap(),
            0.0
        );
        let e = eps_update_modified(1.0, &[5.0, 3.0, 2.0, 1.0], 1, 4, 0.5, 0.9).unwrap();
        assert!((e - 0.675).abs() < 1e-15);
        assert_eq!(
            eps_update_modified(0.01, &[5.0, 3.0, 2.0, 1.0], 1, 4, 0.5, 0.9).unwrap(),
            0.01
        );
        assert!(eps_update_modified(1.0, &[1.0; 4], 1, 4, 1.0, 0.9).is_err());
        assert!(eps_update_modified(1.0, &[1.0; 4], 1, 4, 0.5, 0.0).is_err());
        assert!(eps_update_modified(1.0, &[1.0; 4], 5, 4, 0.5, 0.5).is_err());
    }

    #[test]
    fn policies_are_nonincreasing_in_eps() {
        let x = [0.3, -2.0, 0.01, 4.0, 0.0];
        let ddfg = EpsPolicy::Ddfg { k: 2, n: 5 };
        let modified = EpsPolicy::Modified {
            k: 2,
            n: 5,
            factor: 0.09,
        };
        for p in [ddfg, modified] {
            let mut last = 0.0;
            for e in [1e-6, 1e-3, 0.01, 0.1, 1.0] {
                let v = p.next(e, &x).unwrap();
                assert!(v <= e && v >= last);
                last = v;
            }
        }
    }
}
