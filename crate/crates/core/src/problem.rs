use crate::error::{Error, Result};
use crate::numkernel::{sub, DenseMatrix};

/// A compressed-sensing problem `Φx = y`, optionally with the sparse solution
/// that generated it.
#[derive(Debug, Clone)]
pub struct CsInstance {
    pub phi: DenseMatrix,
    pub y: Vec<f64>,
    pub x_star: Option<Vec<f64>>,
    pub support: Option<Vec<usize>>,
    /// Starting point; `None` means the minimum ℓ2-norm feasible point.
    pub x0: Option<Vec<f64>>,
}

impl CsInstance {
    pub fn new(phi: DenseMatrix, y: Vec<f64>) -> Result<Self> {
        if y.len() != phi.rows() {
            return Err(Error::invalid(format!(
                "y has length {}, Φ has {} rows",
                y.len(),
                phi.rows()
            )));
        }
        Ok(Self {
            phi,
            y,
            x_star: None,
            support: None,
            x0: None,
        })
    }

    pub fn with_truth(mut self, x_star: Vec<f64>) -> Result<Self> {
        if x_star.len() != self.phi.cols() {
            return Err(Error::invalid(format!(
                "x* has length {}, Φ has {} columns",
                x_star.len(),
                self.phi.cols()
            )));
        }
        self.support = Some(support_of(&x_star));
        self.x_star = Some(x_star);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.phi.cols()
    }
}

/// An ℓ1-regression problem `min_z ‖Az − b‖₁`. Its residual `x = Az − b` is the
/// compressed-sensing iterate of the corresponding problem whose null space is
/// `range(A)`.
#[derive(Debug, Clone)]
pub struct RegressionInstance {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub z_star: Option<Vec<f64>>,
    /// Starting point; `None` means the unweighted least-squares fit.
    pub z0: Option<Vec<f64>>,
}

impl RegressionInstance {
    pub fn new(a: DenseMatrix, b: Vec<f64>) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::invalid(format!(
                "b has length {}, A has {} rows",
                b.len(),
                a.rows()
            )));
        }
        Ok(Self {
            a,
            b,
            z_star: None,
            z0: None,
        })
    }

    pub fn residual(&self, z: &[f64]) -> Result<Vec<f64>> {
        Ok(sub(&self.a.mul_vec(z)?, &self.b))
    }

    /// `x* = A z* − b`, when `z*` is known.
    pub fn x_star(&self) -> Result<Option<Vec<f64>>> {
        self.z_star.as_deref().map(|z| self.residual(z)).transpose()
    }
}

/// Indices of the nonzero entries.
pub fn support_of(x: &[f64]) -> Vec<usize> {
    x.iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, _)| i)
        .collect()
}
