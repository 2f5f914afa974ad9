//! Scalar functionals on vectors: rearrangements, tail sums, the smoothed
//! ℓ1 objective and weighted inner products.

use std::ops::Deref;

use crate::error::{Error, Result};

/// A vector of strictly positive, finite weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(i) = entries.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::invalid(format!(
                "weight {i} is {}, weights must be positive and finite",
                entries[i]
            )));
        }
        Ok(Self(entries))
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for WeightVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Absolute values of `x` sorted into nonincreasing order.
pub fn nonincreasing_rearrangement(x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::invalid("rearrangement of an empty vector"));
    }
    let mut r: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    r.sort_unstable_by(|a, b| b.total_cmp(a));
    Ok(r)
}

/// The `i`-th largest magnitude of `x`, 1-based; `r_{N+1}` and beyond are zero.
pub fn rearrangement_entry(x: &[f64], i: usize) -> Result<f64> {
    if i == 0 {
        return Err(Error::invalid("rearrangement index is 1-based"));
    }
    let r = nonincreasing_rearrangement(x)?;
    Ok(r.get(i - 1).copied().unwrap_or(0.0))
}

/// `σ_j(x)`: sum of all but the `j` largest magnitudes of `x`.
pub fn sigma_tail(x: &[f64], j: usize) -> Result<f64> {
    if j > x.len() {
        return Err(Error::invalid(format!(
            "tail index {j} exceeds vector length {}",
            x.len()
        )));
    }
    if x.is_empty() {
        return Ok(0.0);
    }
    let r = nonincreasing_rearrangement(x)?;
    // smallest first, for a tighter sum
    Ok(r[j..].iter().rev().fold(0.0, |acc, v| acc + v))
}

/// `J(x, ε) = Σ √(x_i² + ε²)`.
pub fn smoothed_objective(x: &[f64], eps: f64) -> Result<f64> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("smoothing parameter must be >= 0, got {eps}")));
    }
    Ok(x.iter().map(|v| v.hypot(eps)).sum())
}

pub fn weighted_inner(u: &[f64], v: &[f64], w: &[f64]) -> Result<f64> {
    if u.len() != v.len() || u.len() != w.len() {
        return Err(Error::invalid(format!(
            "length mismatch in weighted inner product: {}, {}, {}",
            u.len(),
            v.len(),
            w.len()
        )));
    }
    Ok(u.iter().zip(v).zip(w).map(|((a, b), c)| c * (a * b)).sum())
}

pub fn weighted_norm(u: &[f64], w: &[f64]) -> Result<f64> {
    weighted_inner(u, u, w).map(f64::sqrt)
}
