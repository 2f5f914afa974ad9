use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::instances::critical_gamma;
use crate::rng::DEFAULT_SEED;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentId {
    E1,
    E2,
    E3,
    E4,
    E5,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 5] = [Self::E1, Self::E2, Self::E3, Self::E4, Self::E5];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::E1 => "E1",
            Self::E2 => "E2",
            Self::E3 => "E3",
            Self::E4 => "E4",
            Self::E5 => "E5",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Self::E1 => "classical vs modified schedule on the stall instance",
            Self::E2 => "sensitivity of the classical schedule to gamma near the critical value",
            Self::E3 => "robustness of the stall to random perturbations of A",
            Self::E4 => "robustness of both schedules to the choice of (K, gamma)",
            Self::E5 => "recovery rate and error decay on random instances",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        let t = t.strip_prefix('E').unwrap_or(&t);
        match t {
            "1" => Ok(Self::E1),
            "2" => Ok(Self::E2),
            "3" => Ok(Self::E3),
            "4" => Ok(Self::E4),
            "5" => Ok(Self::E5),
            _ => Err(Error::invalid(format!("unknown experiment id '{s}', expected E1..E5"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scale {
    /// Small problems and budgets that finish in minutes on one core.
    Desk,
    /// The original problem sizes, trial counts and iteration caps.
    Full,
}

impl Scale {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Desk => "desk",
            Self::Full => "full",
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "desk" => Ok(Self::Desk),
            "full" => Ok(Self::Full),
            _ => Err(Error::invalid(format!("unknown scale '{s}', expected desk or full"))),
        }
    }
}

/// Optional replacements for the per-experiment defaults. Fields that an
/// experiment does not use are ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    /// Column count `k` of the stall instance (E1–E3).
    pub k: Option<usize>,
    pub gammas: Option<Vec<f64>>,
    pub sigmas: Option<Vec<f64>>,
    /// Sparsity orders `K` (E4).
    pub orders: Option<Vec<usize>>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub sparsities: Option<Vec<usize>>,
    pub max_iter: Option<usize>,
    pub success_tol: Option<f64>,
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    pub scale: Scale,
    /// Master seeds; the whole experiment is replicated once per seed, and
    /// trial `t` under seed `s` draws from stream `t` of `s`.
    pub seeds: Vec<u64>,
    pub overrides: Overrides,
}

impl ExperimentSpec {
    pub fn new(id: ExperimentId, scale: Scale) -> Self {
        Self {
            id,
            scale,
            seeds: vec![DEFAULT_SEED],
            overrides: Overrides::default(),
        }
    }

    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn with_overrides(mut self, overrides: Overrides) -> Self {
        self.overrides = overrides;
        self
    }

    /// Fills in defaults and validates every parameter.
    pub fn resolve(&self) -> Result<ResolvedSpec> {
        ResolvedSpec::from_spec(self)
    }
}

/// `η` used by the modified schedule throughout.
pub const EXPERIMENT_ETA: f64 = 0.9;
pub const DEFAULT_SUCCESS_TOL: f64 = 1e-3;
pub const FULL_MAX_ITER: usize = 100_000;
pub const DESK_MAX_ITER: usize = 20_000;

/// The γ sweep of E2 for `k`, with the critical value in sorted position.
pub fn gamma_sweep(k: usize) -> Vec<f64> {
    let mut g: Vec<f64> = [1.0, 2.0, 3.0, 3.3, 3.6, 4.0, 5.0]
        .iter()
        .map(|e: &f64| 1.0 - 10f64.powf(-e))
        .collect();
    g.push(critical_gamma(k));
    g.sort_by(f64::total_cmp);
    g
}

/// Every parameter an experiment run uses, after defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSpec {
    pub id: ExperimentId,
    pub scale: Scale,
    pub seeds: Vec<u64>,
    pub k: usize,
    pub gammas: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub orders: Vec<usize>,
    pub m: usize,
    pub n: usize,
    pub sparsities: Vec<usize>,
    pub value_std: f64,
    pub eta: f64,
    pub max_iter: usize,
    pub success_tol: f64,
    pub trials: usize,
}

impl ResolvedSpec {
    fn from_spec(spec: &ExperimentSpec) -> Result<Self> {
        let o = &spec.overrides;
        let full = spec.scale == Scale::Full;
        let k = o.k.unwrap_or(5);
        let (m, n) = match spec.id {
            ExperimentId::E4 | ExperimentId::E5 if full => (300, 500),
            ExperimentId::E4 | ExperimentId::E5 => (60, 100),
            _ => (0, 0),
        };
        let m = o.m.unwrap_or(m);
        let n = o.n.unwrap_or(n);
        let gammas = o.gammas.clone().unwrap_or_else(|| match spec.id {
            ExperimentId::E1 | ExperimentId::E3 => vec![critical_gamma(k)],
            ExperimentId::E2 => gamma_sweep(k),
            ExperimentId::E4 => vec![0.1, 0.5, 0.9],
            ExperimentId::E5 => vec![0.9],
        });
        let sigmas = o.sigmas.clone().unwrap_or_else(|| match spec.id {
            ExperimentId::E3 => vec![1e-1, 1e-2, 1e-3, 1e-4],
            _ => Vec::new(),
        });
        let orders = o.orders.clone().unwrap_or_else(|| match spec.id {
            ExperimentId::E4 if full => vec![99, 100, 150, 200, 250, 300],
            ExperimentId::E4 => vec![9, 10, 30, 50, 60],
            ExperimentId::E5 => vec![n / 2],
            _ => vec![k],
        });
        let sparsities = o.sparsities.clone().unwrap_or_else(|| match spec.id {
            ExperimentId::E4 if full => vec![100],
            ExperimentId::E4 => vec![10],
            ExperimentId::E5 if full => vec![50, 100, 120],
            ExperimentId::E5 => vec![10, 20, 24],
            _ => vec![k],
        });
        let trials = o.trials.unwrap_or(match (spec.id, full) {
            (ExperimentId::E1, _) => 1,
            (ExperimentId::E2, _) => 20,
            (ExperimentId::E3, true) => 50,
            (ExperimentId::E3, false) => 10,
            (ExperimentId::E4, true) => 100,
            (ExperimentId::E5, true) => 50,
            (_, false) => 20,
        });
        // E1 and E3 make claims about 1e5 iterations, so they keep the full cap.
        let max_iter = o.max_iter.unwrap_or(match spec.id {
            ExperimentId::E1 | ExperimentId::E3 => FULL_MAX_ITER,
            _ if full => FULL_MAX_ITER,
            _ => DESK_MAX_ITER,
        });
        let r = Self {
            id: spec.id,
            scale: spec.scale,
            seeds: spec.seeds.clone(),
            k,
            gammas,
            sigmas,
            orders,
            m,
            n,
            sparsities,
            value_std: if spec.id == ExperimentId::E5 { 10.0 } else { 1.0 },
            eta: EXPERIMENT_ETA,
            max_iter,
            success_tol: o.success_tol.unwrap_or(DEFAULT_SUCCESS_TOL),
            trials,
        };
        r.validate()?;
        Ok(r)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::invalid(format!("{}: {msg}", self.id)));
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if self.trials == 0 {
            return bad("trial count must be positive".into());
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        if !(self.success_tol > 0.0 && self.success_tol.is_finite()) {
            return bad(format!("success_tol must be positive, got {}", self.success_tol));
        }
        if self.gammas.is_empty() || self.gammas.iter().any(|g| !(*g > 0.0 && *g < 1.0)) {
            return bad(format!(
                "gammas must be a nonempty list in (0,1), got {:?}",
                self.gammas
            ));
        }
        match self.id {
            ExperimentId::E1 | ExperimentId::E2 | ExperimentId::E3 => {
                if self.k == 0 {
                    return bad("k must be positive".into());
                }
                let lo = self.k as f64 / (self.k as f64 + 1.0);
                if let Some(g) = self.gammas.iter().find(|g| **g <= lo) {
                    return bad(format!("gamma {g} must exceed k/(k+1) = {lo}"));
                }
                if self.id == ExperimentId::E3
                    && (self.sigmas.is_empty() || self.sigmas.iter().any(|s| !(*s >= 0.0 && s.is_finite())))
                {
                    return bad(format!(
                        "sigmas must be a nonempty list of nonnegative values, got {:?}",
                        self.sigmas
                    ));
                }
            }
            ExperimentId::E4 | ExperimentId::E5 => {
                if !(self.m > 0 && self.m < self.n) {
                    return bad(format!("need 0 < m < N, got m={}, N={}", self.m, self.n));
                }
                if let Some(s) = self.sparsities.iter().find(|s| **s > self.m) {
                    return bad(format!("sparsity {s} exceeds m={}", self.m));
                }
                if self.sparsities.is_empty() || self.orders.is_empty() {
                    return bad("sparsity and order lists must be nonempty".into());
                }
                if let Some(k) = self.orders.iter().find(|k| **k == 0 || **k >= self.n) {
                    return bad(format!("order K={k} must lie in [1, N-1]"));
                }
            }
        }
        Ok(())
    }

    /// `key = value` lines describing every parameter.
    pub fn describe(&self) -> Vec<(String, String)> {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",");
        let ulist = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut out = vec![
            ("experiment".to_string(), self.id.to_string()),
            ("title".to_string(), self.id.title().to_string()),
            ("scale".to_string(), self.scale.to_string()),
            (
                "seeds".to_string(),
                self.seeds.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","),
            ),
            ("trials".to_string(), self.trials.to_string()),
            ("max_iter".to_string(), self.max_iter.to_string()),
            ("success_tol".to_string(), format!("{:e}", self.success_tol)),
            ("gammas".to_string(), list(&self.gammas)),
        ];
        match self.id {
            ExperimentId::E1 | ExperimentId::E2 | ExperimentId::E3 => {
                out.push(("k".into(), self.k.to_string()));
                out.push(("delta".into(), (self.k * (2 * self.k + 1)).to_string()));
                out.push(("critical_gamma".into(), format!("{:e}", critical_gamma(self.k))));
                if self.id == ExperimentId::E3 {
                    out.push(("sigmas".into(), list(&self.sigmas)));
                }
                if self.id != ExperimentId::E2 {
                    out.push(("eta".into(), format!("{:e}", self.eta)));
                }
            }
            ExperimentId::E4 | ExperimentId::E5 => {
                out.push(("m".into(), self.m.to_string()));
                out.push(("N".into(), self.n.to_string()));
                out.push(("orders_K".into(), ulist(&self.orders)));
                out.push(("sparsities".into(), ulist(&self.sparsities)));
                out.push(("value_std".into(), format!("{:e}", self.value_std)));
                out.push(("eta".into(), format!("{:e}", self.eta)));
            }
        }
        out
    }
}
