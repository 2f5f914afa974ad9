use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::DEFAULT_SEED;

/// Which smoothing-parameter schedule drives the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `ε ← min{ε, r_{K+1}(x)/N}`.
    Ddfg,
    /// `ε ← min{ε, η(1−γ)σ_K(x)/N}`.
    Modified,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Ddfg, Variant::Modified];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Ddfg => "ddfg",
            Variant::Modified => "modified",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ddfg" => Ok(Variant::Ddfg),
            "modified" | "mod" => Ok(Variant::Modified),
            other => Err(Error::invalid(format!(
                "unknown variant {other:?} (expected ddfg or modified)"
            ))),
        }
    }
}

pub const DEFAULT_GAMMA: f64 = 0.9;
pub const DEFAULT_ETA: f64 = 0.9;
pub const DEFAULT_EPS0: f64 = 1.0;
pub const DEFAULT_MAX_ITER: usize = 100_000;
pub const DEFAULT_STEP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct IrlsConfig {
    pub variant: Variant,
    /// NSP order. `None` resolves to `⌊N/2⌋`.
    pub k: Option<usize>,
    pub gamma: f64,
    pub eta: f64,
    /// Overrides `η(1−γ)` in the Modified update when set.
    pub eta_one_minus_gamma: Option<f64>,
    pub eps0: f64,
    pub max_iter: usize,
    /// Stop once `‖x^{n+1} − x^n‖₂ ≤ step_tol`.
    pub step_tol: f64,
    /// Stop once `‖x^n − x*‖₂ ≤ success_tol`; only used when ground truth is known.
    pub success_tol: Option<f64>,
    /// Keep the full iterate every `store_every` iterations (the last one is always kept).
    pub store_every: usize,
    pub seed: u64,
}

impl Default for IrlsConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Modified,
            k: None,
            gamma: DEFAULT_GAMMA,
            eta: DEFAULT_ETA,
            eta_one_minus_gamma: None,
            eps0: DEFAULT_EPS0,
            max_iter: DEFAULT_MAX_ITER,
            step_tol: DEFAULT_STEP_TOL,
            success_tol: None,
            store_every: 1,
            seed: DEFAULT_SEED,
        }
    }
}

impl IrlsConfig {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_step_tol(mut self, step_tol: f64) -> Self {
        self.step_tol = step_tol;
        self
    }

    pub fn with_success_tol(mut self, tol: f64) -> Self {
        self.success_tol = Some(tol);
        self
    }

    pub fn with_store_every(mut self, every: usize) -> Self {
        self.store_every = every;
        self
    }

    /// NSP order for a problem of dimension `n`.
    pub fn resolved_k(&self, n: usize) -> usize {
        self.k.unwrap_or(n / 2)
    }

    /// Factor multiplying `σ_K(x)/N` in the Modified update.
    pub fn shrink_factor(&self) -> f64 {
        self.eta_one_minus_gamma.unwrap_or(self.eta * (1.0 - self.gamma))
    }

    /// Checks parameter ranges for a problem of dimension `n`; returns the resolved `K`.
    pub fn validate(&self, n: usize) -> Result<usize> {
        let k = self.resolved_k(n);
        if k == 0 {
            return Err(Error::invalid(format!("NSP order K must be positive (N = {n})")));
        }
        match self.variant {
            Variant::Ddfg if k + 1 > n => {
                return Err(Error::invalid(format!("DDFG update needs K+1 <= N, got K={k}, N={n}")))
            }
            Variant::Modified if k > n => return Err(Error::invalid(format!("K={k} exceeds N={n}"))),
            _ => {}
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::invalid(format!("gamma must lie in (0,1), got {}", self.gamma)));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::invalid(format!("eta must lie in (0,1), got {}", self.eta)));
        }
        if let Some(p) = self.eta_one_minus_gamma {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::invalid(format!("eta*(1-gamma) must lie in (0,1), got {p}")));
            }
        }
        if !(self.eps0 > 0.0 && self.eps0.is_finite()) {
            return Err(Error::invalid(format!("eps0 must be positive, got {}", self.eps0)));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be positive"));
        }
        if !(self.step_tol >= 0.0) {
            return Err(Error::invalid("step_tol must be nonnegative"));
        }
        if self.store_every == 0 {
            return Err(Error::invalid("store_every must be positive"));
        }
        Ok(k)
    }

    /// Sets one field from its textual `key = value` form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |e: &dyn fmt::Display| Error::invalid(format!("{key} = {value}: {e}"));
        let float = |v: &str| v.trim().parse::<f64>().map_err(|e| bad(&e));
        let int = |v: &str| v.trim().parse::<usize>().map_err(|e| bad(&e));
        match key.trim() {
            "variant" => self.variant = value.trim().parse()?,
            "K" | "k" => self.k = Some(int(value)?),
            "gamma" => self.gamma = float(value)?,
            "eta" => self.eta = float(value)?,
            "eta_times_one_minus_gamma" | "eta-times-one-minus-gamma" => self.eta_one_minus_gamma = Some(float(value)?),
            "eps0" => self.eps0 = float(value)?,
            "max_iter" | "max-iter" => self.max_iter = int(value)?,
            "step_tol" | "step-tol" => self.step_tol = float(value)?,
            "success_tol" | "success-tol" => self.success_tol = Some(float(value)?),
            "store_every" | "store-every" => self.store_every = int(value)?,
            "seed" => self.seed = value.trim().parse().map_err(|e| bad(&e))?,
            other => return Err(Error::invalid(format!("unknown configuration key {other:?}"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("line {}: expected key = value", i + 1)))?;
            self.set(key, value)
                .map_err(|e| Error::invalid(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    /// The resolved configuration as `key = value` lines.
    pub fn describe(&self, n: Option<usize>) -> String {
        let k = match (self.k, n) {
            (Some(k), _) => k.to_string(),
            (None, Some(n)) => format!("{} (floor(N/2))", n / 2),
            (None, None) => "floor(N/2)".to_string(),
        };
        let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| x.to_string());
        format!(
            "variant = {}\nK = {k}\ngamma = {}\neta = {}\neta_times_one_minus_gamma = {}\n\
             eps0 = {}\nmax_iter = {}\nstep_tol = {:e}\nsuccess_tol = {}\nstore_every = {}\nseed = {}\n",
            self.variant,
            self.gamma,
            self.eta,
            self.eta_one_minus_gamma
                .map_or_else(|| format!("none ({})", self.shrink_factor()), |p| p.to_string()),
            self.eps0,
            self.max_iter,
            self.step_tol,
            opt(self.success_tol),
            self.store_every,
            self.seed,
        )
    }
}
