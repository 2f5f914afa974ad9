//! Sampling checks of the null space property in its regression form:
//! `‖(Az)_T‖₁ ≤ γ‖(Az)_{T^c}‖₁` for all `z` and all `|T| ≤ K`.
//!
//! Only finitely many `z` are tried, so a pass is evidence, not proof; a
//! failure comes with a witness `(z, T)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numkernel::{norm1, sigma_tail, DenseMatrix};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct NspWitness {
    pub z: Vec<f64>,
    pub support: Vec<usize>,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NspReport {
    pub order_k: usize,
    pub gamma: f64,
    /// Largest observed `‖(Az)_T‖₁ / ‖(Az)_{T^c}‖₁`.
    pub gamma_estimate: f64,
    /// Random unit vectors tried, in addition to the coordinate vectors.
    pub samples: usize,
    /// All size-`K` supports were enumerated for every probe.
    pub exhaustive: bool,
    pub witness: Option<NspWitness>,
}

impl NspReport {
    pub fn passed(&self) -> bool {
        self.gamma_estimate <= self.gamma
    }
}

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

fn ratio(on: f64, total: f64) -> f64 {
    let off = total - on;
    if off > 0.0 {
        on / off
    } else if on > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Best support for `v` among the `k` largest magnitudes.
fn top_k(v: &[f64], k: usize) -> (f64, Vec<usize>) {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b)));
    idx.truncate(k);
    idx.sort_unstable();
    let on: f64 = idx.iter().map(|&i| v[i].abs()).sum();
    (ratio(on, norm1(v)), idx)
}

/// Best support for `v` over all size-`k` subsets.
fn enumerate_k(v: &[f64], k: usize) -> (f64, Vec<usize>) {
    let n = v.len();
    let total = norm1(v);
    let mut best = (f64::NEG_INFINITY, Vec::new());
    if k == 0 {
        return (ratio(0.0, total), Vec::new());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let on: f64 = idx.iter().map(|&i| v[i].abs()).sum();
        let r = ratio(on, total);
        if r > best.0 {
            best = (r, idx.clone());
        }
        // advance to the next combination in lexicographic order
        let mut p = k;
        while p > 0 && idx[p - 1] == n - k + p - 1 {
            p -= 1;
        }
        if p == 0 {
            break;
        }
        idx[p - 1] += 1;
        for q in p..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
    best
}

pub fn nsp_check(
    a: &DenseMatrix,
    k: usize,
    gamma: f64,
    samples: usize,
    exhaustive_cap: u64,
    seed: u64,
) -> Result<NspReport> {
    let (rows, cols) = a.shape();
    if k == 0 || k > rows {
        return Err(Error::invalid(format!("order K must lie in [1, {rows}], got {k}")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid(format!("gamma must lie in (0,1), got {gamma}")));
    }
    let exhaustive = binomial(rows, k) <= exhaustive_cap;

    let mut probes: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            e
        })
        .collect();
    let mut rng = Rng::seed_from(seed);
    probes.extend((0..samples).map(|_| rng.unit_vector(cols)));

    let evaluated: Vec<(f64, Vec<usize>)> = probes
        .par_iter()
        .map(|z| {
            let v = a.mul_vec(z).expect("probe length matches column count");
            if v.iter().all(|x| *x == 0.0) {
                return (0.0, Vec::new());
            }
            if exhaustive {
                enumerate_k(&v, k)
            } else {
                top_k(&v, k)
            }
        })
        .collect();

    // first index wins ties, so the merge is order independent of scheduling
    let (best_i, best) =
        evaluated.iter().enumerate().fold(
            (0usize, f64::NEG_INFINITY),
            |(bi, br), (i, (r, _))| {
                if *r > br {
                    (i, *r)
                } else {
                    (bi, br)
                }
            },
        );
    let gamma_estimate = best.max(0.0);
    let witness = (gamma_estimate > gamma).then(|| NspWitness {
        z: probes[best_i].clone(),
        support: evaluated[best_i].1.clone(),
        ratio: gamma_estimate,
    });
    Ok(NspReport {
        order_k: k,
        gamma,
        gamma_estimate,
        samples,
        exhaustive,
        witness,
    })
}

/// Outcome of checking `‖z − z′‖₁ ≤ C[‖z′‖₁ − ‖z‖₁ + 2σ_K(z)]` on random pairs
/// of points in one affine feasible set, for the two candidate constants.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleBoundDiagnostic {
    pub pairs: usize,
    /// Smallest slack `C·bracket − ‖z − z′‖₁` with `C = (1−γ)/(1+γ)`.
    pub min_slack_small_constant: f64,
    /// Smallest slack with `C = (1+γ)/(1−γ)`.
    pub min_slack_large_constant: f64,
}

impl FeasibleBoundDiagnostic {
    pub fn small_constant_holds(&self) -> bool {
        self.min_slack_small_constant >= 0.0
    }

    pub fn large_constant_holds(&self) -> bool {
        self.min_slack_large_constant >= 0.0
    }
}

/// Draws pairs `z = anchor + Bc`, `z′ = anchor + Bc′` with `B`'s columns
/// spanning the null space, and records the slack of the ℓ1 distance bound
/// for both constants. One of the pair is kept near `anchor` so that sparse
/// anchors exercise the `σ_K` term.
pub fn feasible_bound_diagnostic(
    null_basis: &DenseMatrix,
    anchor: &[f64],
    k: usize,
    gamma: f64,
    pairs: usize,
    seed: u64,
) -> Result<FeasibleBoundDiagnostic> {
    if null_basis.rows() != anchor.len() {
        return Err(Error::invalid("null basis rows must match the anchor length"));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid("gamma must lie in (0,1)"));
    }
    let small = (1.0 - gamma) / (1.0 + gamma);
    let large = (1.0 + gamma) / (1.0 - gamma);
    let mut rng = Rng::seed_from(seed);
    let scale = norm1(anchor).max(1.0);
    let mut out = FeasibleBoundDiagnostic {
        pairs,
        min_slack_small_constant: f64::INFINITY,
        min_slack_large_constant: f64::INFINITY,
    };
    for p in 0..pairs {
        let near = 10f64.powi(-((p % 6) as i32));
        let c1: Vec<f64> = rng.gaussian_vec(null_basis.cols()).iter().map(|v| v * near).collect();
        let c2 = rng.gaussian_vec(null_basis.cols());
        let z: Vec<f64> = anchor
            .iter()
            .zip(null_basis.mul_vec(&c1)?)
            .map(|(a, d)| a + d)
            .collect();
        let zp: Vec<f64> = anchor
            .iter()
            .zip(null_basis.mul_vec(&c2)?)
            .map(|(a, d)| a + d)
            .collect();
        let lhs: f64 = z.iter().zip(&zp).map(|(a, b)| (a - b).abs()).sum();
        let bracket = norm1(&zp) - norm1(&z) + 2.0 * sigma_tail(&z, k.min(z.len()))?;
        let tol = 1e-12 * scale;
        out.min_slack_small_constant = out.min_slack_small_constant.min(small * bracket - lhs + tol);
        out.min_slack_large_constant = out.min_slack_large_constant.min(large * bracket - lhs + tol);
    }
    Ok(out)
}
