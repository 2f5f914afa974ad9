use crate::error::{Error, Result};
use crate::instances::counterexample::{rhs_for, CounterexampleInstance};
use crate::problem::{CsInstance, RegressionInstance};
use crate::rng::Rng;

/// `Φ ∈ ℝ^{m×N}` with i.i.d. `N(0,1)` entries and `x*` supported on the first
/// `sparsity` coordinates with i.i.d. `N(0, value_std²)` values; `y = Φx*`.
///
/// Draw order: `Φ` row by row, then the nonzero entries of `x*`.
pub fn random_gaussian_instance(m: usize, n: usize, sparsity: usize, value_std: f64, seed: u64) -> Result<CsInstance> {
    random_gaussian_instance_from(m, n, sparsity, value_std, &mut Rng::seed_from(seed))
}

pub fn random_gaussian_instance_from(
    m: usize,
    n: usize,
    sparsity: usize,
    value_std: f64,
    rng: &mut Rng,
) -> Result<CsInstance> {
    if !(sparsity <= m && m < n) || m == 0 {
        return Err(Error::invalid(format!(
            "need sparsity <= m < N and m > 0, got sparsity={sparsity}, m={m}, N={n}"
        )));
    }
    if !(value_std > 0.0 && value_std.is_finite()) {
        return Err(Error::invalid(format!("value_std must be positive, got {value_std}")));
    }
    let phi = rng.gaussian_matrix(m, n);
    let mut x_star = vec![0.0; n];
    for v in x_star.iter_mut().take(sparsity) {
        *v = value_std * rng.normal();
    }
    let y = phi.mul_vec(&x_star)?;
    let mut inst = CsInstance::new(phi, y)?;
    inst.support = Some((0..sparsity).collect());
    inst.x_star = Some(x_star);
    Ok(inst)
}

/// `A_{γ,σ} = A_γ + σR` with `R` i.i.d. `N(0,1)`, and `b_σ = A_{γ,σ} z* + δẽ`.
/// `σ = 0` reproduces the instance exactly.
pub fn perturb_counterexample(instance: &CounterexampleInstance, sigma: f64, seed: u64) -> Result<RegressionInstance> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("sigma must be nonnegative, got {sigma}")));
    }
    let mut out = instance.regression();
    if sigma == 0.0 {
        return Ok(out);
    }
    let (rows, cols) = instance.a.shape();
    let noise = Rng::seed_from(seed).gaussian_matrix(rows, cols);
    out.a = instance.a.add_scaled(sigma, &noise)?;
    out.b = rhs_for(&out.a, instance.k(), &instance.params.z_star, instance.params.delta)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::counterexample::{build_counterexample, CounterexampleParams};

    #[test]
    fn gaussian_instance_shape_and_determinism() {
        let a = random_gaussian_instance(6, 10, 3, 1.0, 4).unwrap();
        let b = random_gaussian_instance(6, 10, 3, 1.0, 4).unwrap();
        assert_eq!(a.phi, b.phi);
        assert_eq!(a.x_star, b.x_star);
        let x = a.x_star.as_ref().unwrap();
        assert!(x[3..].iter().all(|v| *v == 0.0));
        assert_eq!(a.support.as_deref(), Some(&[0, 1, 2][..]));
        let y = a.phi.mul_vec(x).unwrap();
        assert_eq!(y, a.y);
    }

    #[test]
    fn zero_sparsity_gives_zero_measurements() {
        let a = random_gaussian_instance(6, 10, 0, 1.0, 1).unwrap();
        assert!(a.y.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn dimension_checks() {
        assert!(random_gaussian_instance(10, 10, 3, 1.0, 0).is_err());
        assert!(random_gaussian_instance(5, 10, 6, 1.0, 0).is_err());
        assert!(random_gaussian_instance(5, 10, 2, 0.0, 0).is_err());
    }

    #[test]
    fn zero_perturbation_is_identity() {
        let inst = build_counterexample(CounterexampleParams::critical(3, vec![1.0, 2.0, 3.0]).unwrap(), 0.5).unwrap();
        let p = perturb_counterexample(&inst, 0.0, 9).unwrap();
        assert_eq!(p.a, inst.a);
        assert_eq!(p.b, inst.b);
        let p = perturb_counterexample(&inst, 1e-2, 9).unwrap();
        assert_ne!(p.a, inst.a);
        // x* = A_σ z* − b_σ stays −δẽ
        let x = p.x_star().unwrap().unwrap();
        let expected = inst.x_star();
        for (a, b) in x.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
