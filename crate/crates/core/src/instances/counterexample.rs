//! The ℓ1-regression family on which the classical ε schedule stalls.
//!
//! `Ã ∈ ℝ^{(2k²+k)×k}` stacks `2k+1` copies of `I_k`. `A_γ` equals `Ã` except
//! that the `(1,1)` entry of each of the first `k` blocks is replaced by
//! `α = γ(k+1)/k`. With `b = A_γ z* + δẽ`, where `ẽ` marks those `k` rows, the
//! residual `x* = A_γ z* − b = −δẽ` is `k`-sparse and `z*` is the unique
//! ℓ1-regression solution, yet the classical schedule started in the window
//! below leaves `z^n_1 − z*_1` bounded away from zero.
//!
//! Row indices are 0-based here: the marked rows are `i·k` for `i < k` and the
//! first row of block `k` (`b_{k²+1}` in 1-based terms) is row `k²`.

use log::warn;

use crate::error::{Error, Result};
use crate::numkernel::{orthogonal_complement, DenseMatrix};
use crate::problem::{CsInstance, RegressionInstance};
use crate::rng::Rng;

/// Row count of `Ã`: `k(2k+1) = 2k²+k`.
pub fn row_count(k: usize) -> usize {
    k * (2 * k + 1)
}

/// `ν(k) = √((4k²(2k+1)²+1)/(4k²(2k+1)²+4))`, the smallest γ for which the
/// stall is guaranteed.
pub fn critical_gamma(k: usize) -> f64 {
    let c = row_count(k) as f64;
    let q = 4.0 * c * c;
    ((q + 1.0) / (q + 4.0)).sqrt()
}

/// `Σ_{j<k} e_{jk}` (0-based) in `ℝ^{2k²+k}`.
pub fn marked_rows_indicator(k: usize) -> Vec<f64> {
    let mut e = vec![0.0; row_count(k)];
    for j in 0..k {
        e[j * k] = 1.0;
    }
    e
}

pub fn build_tilde_a(k: usize) -> Result<DenseMatrix> {
    if k == 0 {
        return Err(Error::invalid("block size k must be positive"));
    }
    Ok(DenseMatrix::from_fn(row_count(k), k, |i, j| {
        if i % k == j {
            1.0
        } else {
            0.0
        }
    }))
}

pub fn build_a_gamma(k: usize, gamma: f64) -> Result<DenseMatrix> {
    let mut a = build_tilde_a(k)?;
    let lower = k as f64 / (k as f64 + 1.0);
    if !(gamma > lower && gamma < 1.0) {
        return Err(Error::invalid(format!(
            "gamma must lie in (k/(k+1), 1) = ({lower}, 1), got {gamma}"
        )));
    }
    let alpha = gamma * (k as f64 + 1.0) / k as f64;
    for i in 0..k {
        a.set(i * k, 0, alpha);
    }
    Ok(a)
}

/// Replaces a `z*` that is not entrywise positive: nonpositive entries become
/// `|z_i| + 0.1`.
pub fn enforce_positive(z_star: &[f64]) -> Vec<f64> {
    if z_star.iter().any(|v| *v <= 0.0) {
        warn!("z* has nonpositive entries; replacing them by |z_i| + 0.1");
    }
    z_star
        .iter()
        .map(|&v| if v > 0.0 { v } else { v.abs() + 0.1 })
        .collect()
}

/// Random `z* ∈ ℝ^k_{++}`: `|N(0,1)| + 0.1` entrywise.
pub fn random_positive_z_star(k: usize, rng: &mut Rng) -> Vec<f64> {
    (0..k).map(|_| rng.normal().abs() + 0.1).collect()
}

/// `b = A z* + δẽ`.
pub fn rhs_for(a: &DenseMatrix, k: usize, z_star: &[f64], delta: f64) -> Result<Vec<f64>> {
    let mut b = a.mul_vec(z_star)?;
    for j in 0..k {
        b[j * k] += delta;
    }
    Ok(b)
}

/// The regression problem `(A_γ, b)` without the stall preconditions on γ.
pub fn build_regression_family(k: usize, gamma: f64, delta: f64, z_star: &[f64]) -> Result<RegressionInstance> {
    if z_star.len() != k {
        return Err(Error::invalid(format!("z* must have length k = {k}")));
    }
    let a = build_a_gamma(k, gamma)?;
    let b = rhs_for(&a, k, z_star, delta)?;
    let mut inst = RegressionInstance::new(a, b)?;
    inst.z_star = Some(z_star.to_vec());
    Ok(inst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleParams {
    pub k: usize,
    pub gamma: f64,
    pub delta: f64,
    pub z_star: Vec<f64>,
}

/// `(α, ξ, γ/(k(2k+1)√(ξ²−1)))` for the given `k`, `γ`.
pub fn derived_constants(k: usize, gamma: f64) -> (f64, f64, f64) {
    let c = row_count(k) as f64;
    let alpha = gamma * (k as f64 + 1.0) / k as f64;
    let xi_sq_minus_one = (gamma * gamma - 1.0) + gamma * gamma / (c * c);
    let xi = (1.0 + xi_sq_minus_one).sqrt();
    let window = gamma / (c * xi_sq_minus_one.max(0.0).sqrt());
    (alpha, xi, window)
}

fn violated_inequalities(k: usize, gamma: f64) -> Vec<String> {
    let (alpha, xi, window) = derived_constants(k, gamma);
    let mut bad = Vec::new();
    if !(alpha > 1.0) {
        bad.push(format!("alpha = gamma(k+1)/k > 1 fails (alpha = {alpha})"));
    }
    if !(xi > 1.0) {
        bad.push(format!("xi = gamma*sqrt(1 + 1/(k^2(2k+1)^2)) > 1 fails (xi = {xi})"));
    }
    if !(window > 1.0) {
        bad.push(format!("gamma/(k(2k+1)sqrt(xi^2-1)) > 1 fails (value = {window})"));
    }
    bad
}

impl CounterexampleParams {
    pub fn new(k: usize, gamma: f64, delta: f64, z_star: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("block size k must be positive"));
        }
        let nu = critical_gamma(k);
        if !(gamma >= nu && gamma < 1.0) {
            let mut msg = format!("gamma must lie in [nu(k), 1) = [{nu:.17}, 1), got {gamma}");
            for v in violated_inequalities(k, gamma) {
                msg.push_str("; ");
                msg.push_str(&v);
            }
            return Err(Error::invalid(msg));
        }
        let c = row_count(k) as f64;
        if !(delta > 0.0 && delta <= c) {
            return Err(Error::invalid(format!(
                "delta must lie in (0, k(2k+1)] = (0, {c}], got {delta}"
            )));
        }
        if z_star.len() != k {
            return Err(Error::invalid(format!(
                "z* has length {}, expected k = {k}",
                z_star.len()
            )));
        }
        if z_star.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("z* has non-finite entries"));
        }
        let z_star = enforce_positive(&z_star);
        Ok(Self {
            k,
            gamma,
            delta,
            z_star,
        })
    }

    /// `γ = ν(k)`, `δ = k(2k+1)`.
    pub fn critical(k: usize, z_star: Vec<f64>) -> Result<Self> {
        Self::new(k, critical_gamma(k), row_count(k) as f64, z_star)
    }
}

#[derive(Debug, Clone)]
pub struct CounterexampleInstance {
    pub params: CounterexampleParams,
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub z0: Vec<f64>,
    /// Smoothing parameter the stall argument starts from.
    pub eps0: f64,
    pub alpha: f64,
    pub xi: f64,
    pub nu: f64,
    /// Limit of the ratio `s_n`: `k(2k+1)√(ξ²−1)`.
    pub s_star: f64,
    /// Limit of `z^n_1 − z*_1`: `δs*/(1+αs*)`.
    pub limit_gap: f64,
    /// Open window for `z⁰_1`.
    pub z0_window: (f64, f64),
}

pub fn build_counterexample(params: CounterexampleParams, z0_position: f64) -> Result<CounterexampleInstance> {
    if !(0.0..=1.0).contains(&z0_position) {
        return Err(Error::invalid(format!(
            "z0 position must lie in [0,1], got {z0_position}"
        )));
    }
    let CounterexampleParams { k, gamma, delta, .. } = params;
    let bad = violated_inequalities(k, gamma);
    if !bad.is_empty() {
        return Err(Error::Internal(format!(
            "stall inequalities fail for admissible parameters: {}",
            bad.join("; ")
        )));
    }
    let (alpha, xi, _) = derived_constants(k, gamma);
    let c = row_count(k) as f64;
    let s_star = c * ((gamma * gamma - 1.0) + gamma * gamma / (c * c)).sqrt();
    let a = build_a_gamma(k, gamma)?;
    let b = rhs_for(&a, k, &params.z_star, delta)?;
    let z1 = params.z_star[0];
    let lo = z1 + delta / (alpha + gamma / s_star);
    let hi = z1 + delta / (alpha + 1.0);
    if !(lo < hi) {
        return Err(Error::Internal(format!("empty initialization window ({lo}, {hi})")));
    }
    let mut z0 = params.z_star.clone();
    z0[0] = lo + z0_position * (hi - lo);
    Ok(CounterexampleInstance {
        a,
        b,
        z0,
        eps0: 1.0,
        alpha,
        xi,
        nu: critical_gamma(k),
        s_star,
        limit_gap: delta * s_star / (1.0 + alpha * s_star),
        z0_window: (lo, hi),
        params,
    })
}

impl CounterexampleInstance {
    pub fn k(&self) -> usize {
        self.params.k
    }

    /// `x* = A z* − b = −δẽ`.
    pub fn x_star(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.b.len()];
        for (xi, (ax, b)) in x
            .iter_mut()
            .zip(self.a.mul_vec(&self.params.z_star).expect("shape").iter().zip(&self.b))
        {
            *xi = ax - b;
        }
        x
    }

    /// `s = (z_1 − b_{k²+1})/(b_1 − αz_1)`.
    pub fn s_of(&self, z1: f64) -> f64 {
        let k = self.k();
        (z1 - self.b[k * k]) / (self.b[0] - self.alpha * z1)
    }

    /// The regression problem with `z*` and the window initialization attached.
    pub fn regression(&self) -> RegressionInstance {
        RegressionInstance {
            a: self.a.clone(),
            b: self.b.clone(),
            z_star: Some(self.params.z_star.clone()),
            z0: Some(self.z0.clone()),
        }
    }

    /// The equivalent compressed-sensing problem: `Φ` has orthonormal rows with
    /// `Null(Φ) = range(A_γ)`, `y = −Φb`, and `x⁰ = A_γ z⁰ − b`.
    pub fn cs_instance(&self) -> Result<CsInstance> {
        let phi = orthogonal_complement(&self.a)?;
        let y: Vec<f64> = phi.mul_vec(&self.b)?.into_iter().map(|v| -v).collect();
        let mut inst = CsInstance::new(phi, y)?.with_truth(self.x_star())?;
        inst.x0 = Some(self.regression().residual(&self.z0)?);
        Ok(inst)
    }
}
