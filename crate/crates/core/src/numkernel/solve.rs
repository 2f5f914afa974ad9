//! The two weighted least-squares solves used by the IRLS iterations, plus an
//! orthonormal complement used to move between the regression and the
//! compressed-sensing forms of a problem.

use crate::error::{Error, Result};
use crate::numkernel::functionals::WeightVector;
use crate::numkernel::matrix::{dot, norm_inf};
use crate::numkernel::{Cholesky, DenseMatrix};

/// Relative bound on `‖Φx̂ − y‖∞` accepted after a constrained solve.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-8;

/// Minimizer of `‖x‖²_w` subject to `Φx = y`.
///
/// Computed as `x̂ = D Φᵀ (Φ D Φᵀ)⁻¹ y` with `D = diag(1/w)`. The Gram matrix is
/// factored by Cholesky; a pivot below the relative threshold is reported as
/// [`Error::Singular`] rather than regularized. Feasibility of `y` is not
/// checked in advance, only of the returned point.
pub fn constrained_weighted_ls(phi: &DenseMatrix, y: &[f64], w: &WeightVector) -> Result<Vec<f64>> {
    let (m, n) = phi.shape();
    if y.len() != m {
        return Err(Error::invalid(format!(
            "measurement vector has length {}, matrix has {m} rows",
            y.len()
        )));
    }
    if w.len() != n {
        return Err(Error::invalid(format!(
            "weight vector has length {}, matrix has {n} columns",
            w.len()
        )));
    }
    let d: Vec<f64> = w.iter().map(|wi| 1.0 / wi).collect();
    let scaled: Vec<Vec<f64>> = (0..m)
        .map(|a| phi.row(a).iter().zip(&d).map(|(p, di)| p * di).collect())
        .collect();
    let mut gram = DenseMatrix::zeros(m, m);
    for a in 0..m {
        for b in 0..=a {
            let v = dot(&scaled[a], phi.row(b));
            gram.set(a, b, v);
            gram.set(b, a, v);
        }
    }
    let lambda = Cholesky::factor(&gram)?.solve(y)?;
    let mut x = vec![0.0; n];
    for (row, l) in scaled.iter().zip(&lambda) {
        for (xi, s) in x.iter_mut().zip(row) {
            *xi += s * l;
        }
    }
    let residual = phi
        .mul_vec(&x)?
        .iter()
        .zip(y)
        .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
    let bound = FEASIBILITY_TOLERANCE * (1.0 + norm_inf(y));
    if !(residual <= bound) {
        return Err(Error::Infeasible { residual, bound });
    }
    Ok(x)
}

/// Minimizer of `Σ θ_i (a_iᵀz − b_i)²`, from the normal equations
/// `(Aᵀ diag(θ) A) z = Aᵀ diag(θ) b`.
pub fn weighted_regression_ls(a: &DenseMatrix, b: &[f64], theta: &WeightVector) -> Result<Vec<f64>> {
    let (rows, cols) = a.shape();
    if b.len() != rows || theta.len() != rows {
        return Err(Error::invalid(format!(
            "regression with {rows} rows got b of length {} and weights of length {}",
            b.len(),
            theta.len()
        )));
    }
    let mut normal = DenseMatrix::zeros(cols, cols);
    let mut rhs = vec![0.0; cols];
    for i in 0..rows {
        let row = a.row(i);
        let t = theta[i];
        for p in 0..cols {
            let tp = t * row[p];
            if tp == 0.0 {
                continue;
            }
            rhs[p] += tp * b[i];
            for q in 0..=p {
                let v = normal.get(p, q) + tp * row[q];
                normal.set(p, q, v);
            }
        }
    }
    for p in 0..cols {
        for q in 0..p {
            normal.set(q, p, normal.get(p, q));
        }
    }
    Cholesky::factor(&normal)?.solve(&rhs)
}

/// Rows spanning the orthogonal complement of `range(a)`.
///
/// For `a` of shape `N×k` with full column rank, returns an `(N−k)×N` matrix
/// with orthonormal rows whose null space is exactly `range(a)`. Uses a full
/// Householder QR of `a`.
pub fn orthogonal_complement(a: &DenseMatrix) -> Result<DenseMatrix> {
    let (n, k) = a.shape();
    if k >= n {
        return Err(Error::invalid(format!(
            "matrix {n}x{k} has no proper column-space complement"
        )));
    }
    let scale = a.as_slice().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    // working copy, column-major for the reflector sweeps
    let mut cols: Vec<Vec<f64>> = (0..k).map(|j| a.column(j)).collect();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    for j in 0..k {
        let x = &cols[j][j..];
        let alpha = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if alpha <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Singular {
                pivot: j,
                value: alpha,
                threshold: 1e-12 * scale,
            });
        }
        let mut v = x.to_vec();
        v[0] += alpha.copysign(x[0]);
        let vnorm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        v.iter_mut().for_each(|t| *t /= vnorm);
        for col in cols.iter_mut().skip(j) {
            let tail = &mut col[j..];
            let proj = 2.0 * dot(&v, tail);
            tail.iter_mut().zip(&v).for_each(|(t, vi)| *t -= proj * vi);
        }
        reflectors.push(v);
    }
    // Q = H_0 H_1 … H_{k-1}; columns k..n of Q are e_c pushed through the reflectors in reverse.
    let mut out = DenseMatrix::zeros(n - k, n);
    for c in k..n {
        let mut q = vec![0.0; n];
        q[c] = 1.0;
        for (j, v) in reflectors.iter().enumerate().rev() {
            let tail = &mut q[j..];
            let proj = 2.0 * dot(v, tail);
            tail.iter_mut().zip(v).for_each(|(t, vi)| *t -= proj * vi);
        }
        for (i, qi) in q.into_iter().enumerate() {
            out.set(c - k, i, qi);
        }
    }
    Ok(out)
}
