use crate::error::{Error, Result};
use crate::numkernel::DenseMatrix;

/// Pivots below this fraction of their own diagonal entry are treated as zero.
///
/// This is the largest-diagonal rule applied to the Jacobi-equilibrated matrix
/// `D^{-1/2} M D^{-1/2}`, whose diagonal is all ones. It keeps badly scaled
/// but well-conditioned systems (IRLS weights spanning many decades) from
/// being reported as singular.
pub const PIVOT_RELATIVE_THRESHOLD: f64 = 1e-12;

/// Lower-triangular Cholesky factor `L` of a symmetric positive-definite matrix,
/// `M = L Lᵀ`. Only the lower triangle of `M` is read.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    // row-major, lower triangle populated
    l: Vec<f64>,
}

impl Cholesky {
    pub fn factor(m: &DenseMatrix) -> Result<Self> {
        let n = m.rows();
        if m.cols() != n {
            return Err(Error::invalid(format!(
                "Cholesky needs a square matrix, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let threshold = PIVOT_RELATIVE_THRESHOLD * m.get(j, j);
            let pivot = m.get(j, j) - l[j * n..j * n + j].iter().map(|v| v * v).sum::<f64>();
            if !(pivot > threshold) {
                return Err(Error::Singular {
                    pivot: j,
                    value: pivot,
                    threshold,
                });
            }
            let ljj = pivot.sqrt();
            l[j * n + j] = ljj;
            for i in (j + 1)..n {
                let s: f64 = (0..j).map(|p| l[i * n + p] * l[j * n + p]).sum();
                l[i * n + j] = (m.get(i, j) - s) / ljj;
            }
        }
        Ok(Self { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `L Lᵀ x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if rhs.len() != n {
            return Err(Error::invalid(format!(
                "right-hand side has length {}, system has dimension {n}",
                rhs.len()
            )));
        }
        let mut y = rhs.to_vec();
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s: f64 = row.iter().zip(&y[..i]).map(|(a, b)| a * b).sum();
            y[i] = (y[i] - s) / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        Ok(y)
    }
}
