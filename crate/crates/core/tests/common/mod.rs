#![allow(dead_code)]

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use sparse_irls::instances::random_gaussian_instance_from;
use sparse_irls::numkernel::DenseMatrix;
use sparse_irls::rng::Rng;
use sparse_irls::CsInstance;

/// Basis pursuit `min ‖x‖₁ s.t. Φx = y` as an LP in `x = u − v`, `u, v ≥ 0`.
pub fn basis_pursuit(phi: &DenseMatrix, y: &[f64]) -> Vec<f64> {
    let (m, n) = phi.shape();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let u: Vec<_> = (0..n).map(|_| lp.add_var(1.0, (0.0, f64::INFINITY))).collect();
    let v: Vec<_> = (0..n).map(|_| lp.add_var(1.0, (0.0, f64::INFINITY))).collect();
    for i in 0..m {
        let mut row = Vec::with_capacity(2 * n);
        for j in 0..n {
            row.push((u[j], phi.get(i, j)));
            row.push((v[j], -phi.get(i, j)));
        }
        lp.add_constraint(&row[..], ComparisonOp::Eq, y[i]);
    }
    let sol = lp.solve().expect("basis pursuit LP is feasible and bounded");
    (0..n).map(|j| sol[u[j]] - sol[v[j]]).collect()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

pub fn l1(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

/// `Σ √(x_i² + ε²)`, written out independently of the library.
pub fn smoothed(x: &[f64], eps: f64) -> f64 {
    x.iter().map(|v| (v * v + eps * eps).sqrt()).sum()
}

pub fn weights(x: &[f64], eps: f64) -> Vec<f64> {
    x.iter().map(|v| 1.0 / (v * v + eps * eps).sqrt()).collect()
}

/// Gaussian instance with the start point `x0 = 10·N(0, I)` drawn right after it.
pub fn gaussian_with_start(m: usize, n: usize, s: usize, seed: u64, stream: u64) -> CsInstance {
    let mut rng = Rng::with_stream(seed, stream);
    let mut inst = random_gaussian_instance_from(m, n, s, 1.0, &mut rng).unwrap();
    inst.x0 = Some(rng.gaussian_vec(n).into_iter().map(|v| 10.0 * v).collect());
    inst
}

/// Shifts a random `10·N(0, I)` draw onto `{Φx = y}` along the row space of `Φ`.
pub fn feasible_start(inst: &CsInstance, seed: u64) -> Vec<f64> {
    let g: Vec<f64> = Rng::seed_from(seed)
        .gaussian_vec(inst.dim())
        .into_iter()
        .map(|v| 10.0 * v)
        .collect();
    let r: Vec<f64> = inst
        .y
        .iter()
        .zip(inst.phi.mul_vec(&g).unwrap())
        .map(|(a, b)| a - b)
        .collect();
    let shift = sparse_irls::numkernel::constrained_weighted_ls(
        &inst.phi,
        &r,
        &sparse_irls::numkernel::WeightVector::ones(inst.dim()),
    )
    .unwrap();
    g.iter().zip(shift).map(|(a, b)| a + b).collect()
}
