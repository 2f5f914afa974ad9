//! Writes instances to a directory of CSV files plus a `params.txt` of
//! `key = value` lines (reals with 17 significant digits).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::instances::counterexample::CounterexampleInstance;
use crate::io::{write_matrix, write_text, write_vector};
use crate::problem::{CsInstance, RegressionInstance};

pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn params_text(entries: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in entries {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}

pub fn write_cs_instance(dir: &Path, inst: &CsInstance, params: &[(&str, String)]) -> Result<()> {
    write_matrix(dir.join("Phi.csv"), &inst.phi)?;
    write_vector(dir.join("y.csv"), &inst.y)?;
    if let Some(x) = &inst.x_star {
        write_vector(dir.join("xstar.csv"), x)?;
    }
    if let Some(x0) = &inst.x0 {
        write_vector(dir.join("x0.csv"), x0)?;
    }
    write_text(dir.join("params.txt"), &params_text(params))
}

pub fn write_regression_instance(dir: &Path, inst: &RegressionInstance, params: &[(&str, String)]) -> Result<()> {
    write_matrix(dir.join("A.csv"), &inst.a)?;
    write_vector(dir.join("b.csv"), &inst.b)?;
    if let Some(z) = &inst.z_star {
        write_vector(dir.join("zstar.csv"), z)?;
    }
    if let Some(z0) = &inst.z0 {
        write_vector(dir.join("z0.csv"), z0)?;
    }
    write_text(dir.join("params.txt"), &params_text(params))
}

pub fn counterexample_params(inst: &CounterexampleInstance, seed: Option<u64>) -> Vec<(&'static str, String)> {
    let mut p = vec![
        ("k", inst.k().to_string()),
        ("gamma", fmt17(inst.params.gamma)),
        ("delta", fmt17(inst.params.delta)),
    ];
    if let Some(s) = seed {
        p.push(("seed", s.to_string()));
    }
    p.extend([
        ("nu", fmt17(inst.nu)),
        ("alpha", fmt17(inst.alpha)),
        ("xi", fmt17(inst.xi)),
        ("s_star", fmt17(inst.s_star)),
        ("limit_gap", fmt17(inst.limit_gap)),
        ("z0_window_lo", fmt17(inst.z0_window.0)),
        ("z0_window_hi", fmt17(inst.z0_window.1)),
        ("eps0", fmt17(inst.eps0)),
    ]);
    p
}

/// Both forms: `A.csv`, `b.csv`, `zstar.csv`, `z0.csv` and `Phi.csv`, `y.csv`,
/// `xstar.csv`, `x0.csv`, sharing one `params.txt`.
pub fn write_counterexample(dir: &Path, inst: &CounterexampleInstance, seed: Option<u64>) -> Result<()> {
    let params = counterexample_params(inst, seed);
    write_regression_instance(dir, &inst.regression(), &params)?;
    write_cs_instance(dir, &inst.cs_instance()?, &params)
}
