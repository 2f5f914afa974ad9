//! Trial generation and execution for E1–E5.
//!
//! Every trial is a pure function of `(master seed, trial index, cell)`, so
//! trials run in parallel and are merged back in job order.

use std::fmt::Write as _;

use log::{info, warn};
use rayon::prelude::*;

use crate::error::Result;
use crate::experiments::report::{aggregate, CellKey, ExperimentReport, TrialRow, TrialStatus};
use crate::experiments::spec::{ExperimentId, ExperimentSpec, ResolvedSpec};
use crate::instances::{
    build_counterexample, build_regression_family, critical_gamma, perturb_counterexample,
    random_gaussian_instance_from, random_positive_z_star, row_count, scalar_recursion_oracle, CounterexampleInstance,
    CounterexampleParams,
};
use crate::irls::{run_irls_cs, run_irls_l1r, run_irls_l1r_observed, IrlsConfig, IrlsResult, IterationTrace, Variant};
use crate::problem::RegressionInstance;
use crate::rng::Rng;

/// Standard deviation of random starting points, `N(0, 100 I)`.
pub const START_STD: f64 = 10.0;

/// Stream 0 of each master seed is reserved for quantities shared by all
/// trials (the stall instance's `z*`); trial `t` of E1–E3 uses stream `t + 1`.
const SHARED_STREAM: u64 = 0;

#[derive(Debug, Clone, Copy)]
enum Job {
    /// E1: the stall instance with the window initialization.
    Stall { seed: u64, variant: Variant },
    /// E2: `(A_γ, b)` for a swept γ, random `z⁰`.
    Sweep { seed: u64, trial: usize, gamma: f64 },
    /// E3: perturbed stall instance, random `z⁰`.
    Perturbed { seed: u64, trial: usize, sigma: f64 },
    /// E4, E5: Gaussian compressed-sensing instance, random `x⁰`.
    Random {
        seed: u64,
        trial: usize,
        variant: Variant,
        order_k: usize,
        gamma: Option<f64>,
        sparsity: usize,
    },
}

struct Outcome {
    row: TrialRow,
    curve: Option<Vec<f64>>,
    trace: Option<(String, IterationTrace)>,
    extra: Option<(String, String)>,
}

fn jobs(spec: &ResolvedSpec) -> Vec<Job> {
    let mut out = Vec::new();
    for &seed in &spec.seeds {
        match spec.id {
            ExperimentId::E1 => {
                for variant in Variant::ALL {
                    out.push(Job::Stall { seed, variant });
                }
            }
            ExperimentId::E2 => {
                for &gamma in &spec.gammas {
                    out.extend((0..spec.trials).map(|trial| Job::Sweep { seed, trial, gamma }));
                }
            }
            ExperimentId::E3 => {
                for &sigma in &spec.sigmas {
                    out.extend((0..spec.trials).map(|trial| Job::Perturbed { seed, trial, sigma }));
                }
            }
            ExperimentId::E4 | ExperimentId::E5 => {
                for &sparsity in &spec.sparsities {
                    for &order_k in &spec.orders {
                        let mut cells = vec![(Variant::Ddfg, None)];
                        cells.extend(spec.gammas.iter().map(|g| (Variant::Modified, Some(*g))));
                        for (variant, gamma) in cells {
                            out.extend((0..spec.trials).map(|trial| Job::Random {
                                seed,
                                trial,
                                variant,
                                order_k,
                                gamma,
                                sparsity,
                            }));
                        }
                    }
                }
            }
        }
    }
    out
}

fn config(spec: &ResolvedSpec, variant: Variant, order_k: usize, gamma: f64) -> IrlsConfig {
    IrlsConfig::new(variant)
        .with_k(order_k)
        .with_gamma(gamma)
        .with_eta(spec.eta)
        .with_max_iter(spec.max_iter)
        .with_success_tol(spec.success_tol)
        // only the final iterate is needed; records are kept every step
        .with_store_every(spec.max_iter)
}

fn shared_z_star(spec: &ResolvedSpec, seed: u64) -> Vec<f64> {
    random_positive_z_star(spec.k, &mut Rng::with_stream(seed, SHARED_STREAM))
}

fn stall_instance(spec: &ResolvedSpec, seed: u64) -> Result<CounterexampleInstance> {
    let delta = row_count(spec.k) as f64;
    let params = CounterexampleParams::new(spec.k, spec.gammas[0], delta, shared_z_star(spec, seed))?;
    build_counterexample(params, 0.5)
}

fn random_start(rng: &mut Rng, n: usize) -> Vec<f64> {
    rng.gaussian_vec(n).into_iter().map(|v| START_STD * v).collect()
}

fn outcome(
    spec: &ResolvedSpec,
    seed: u64,
    trial: usize,
    cell: CellKey,
    result: Result<IrlsResult>,
    keep_trace: bool,
) -> Outcome {
    match result {
        Ok(r) => {
            let final_error = r.trace.last().and_then(|rec| rec.err2);
            let row = TrialRow {
                seed,
                trial,
                cell,
                status: TrialStatus::Finished(r.status),
                iterations: r.iterations_used,
                final_error,
                success: final_error.is_some_and(|e| e <= spec.success_tol),
            };
            let curve = keep_trace.then(|| r.trace.records.iter().filter_map(|rec| rec.err2).collect());
            let with_sparsity = matches!(spec.id, ExperimentId::E4 | ExperimentId::E5);
            let trace = keep_trace.then(|| (row.label(with_sparsity), r.trace));
            Outcome {
                row,
                curve,
                trace,
                extra: None,
            }
        }
        Err(e) => {
            warn!("{} seed {seed} trial {trial} ({}): {e}", spec.id, cell.variant);
            Outcome {
                row: TrialRow {
                    seed,
                    trial,
                    cell,
                    status: TrialStatus::Failed(e.to_string()),
                    iterations: 0,
                    final_error: None,
                    success: false,
                },
                curve: None,
                trace: None,
                extra: None,
            }
        }
    }
}

/// `n, s_irls, s_oracle, eps_irls, eps_oracle` for the classical run of E1.
fn s_comparison_csv(inst: &CounterexampleInstance, s_irls: &[f64], trace: &IterationTrace) -> String {
    let oracle = scalar_recursion_oracle(inst, s_irls.len().saturating_sub(1));
    let mut out = String::from("n,s_irls,s_oracle,eps_irls,eps_oracle\n");
    for (n, (s, o)) in s_irls.iter().zip(&oracle).enumerate() {
        let eps = trace.records.get(n).map(|r| format!("{:e}", r.eps)).unwrap_or_default();
        let _ = writeln!(out, "{n},{s:e},{:e},{eps},{:e}", o.s, o.eps);
    }
    out
}

fn run_job(spec: &ResolvedSpec, job: Job) -> Outcome {
    let k = spec.k;
    match job {
        Job::Stall { seed, variant } => {
            let gamma = spec.gammas[0];
            let cell = CellKey {
                variant,
                order_k: k,
                gamma: Some(gamma),
                sigma: None,
                sparsity: k,
            };
            let inst = match stall_instance(spec, seed) {
                Ok(i) => i,
                Err(e) => return outcome(spec, seed, 0, cell, Err(e), false),
            };
            let cfg = config(spec, variant, k, gamma);
            let mut s_irls = Vec::new();
            let result = run_irls_l1r_observed(&inst.regression(), &cfg, inst.z0.clone(), &mut |_, _, z| {
                if let Some(z) = z {
                    s_irls.push(inst.s_of(z[0]));
                }
            });
            let mut out = outcome(spec, seed, 0, cell, result, true);
            if variant == Variant::Ddfg {
                if let Some((_, trace)) = &out.trace {
                    out.extra = Some((
                        format!("s_comparison_{seed}.csv"),
                        s_comparison_csv(&inst, &s_irls, trace),
                    ));
                }
            }
            out
        }
        Job::Sweep { seed, trial, gamma } => {
            let cell = CellKey {
                variant: Variant::Ddfg,
                order_k: k,
                gamma: Some(gamma),
                sigma: None,
                sparsity: k,
            };
            let result = (|| {
                let delta = row_count(k) as f64;
                let mut inst: RegressionInstance =
                    build_regression_family(k, gamma, delta, &shared_z_star(spec, seed))?;
                inst.z0 = Some(random_start(&mut Rng::with_stream(seed, trial as u64 + 1), k));
                run_irls_l1r(&inst, &config(spec, Variant::Ddfg, k, gamma))
            })();
            outcome(spec, seed, trial, cell, result, false)
        }
        Job::Perturbed { seed, trial, sigma } => {
            let gamma = spec.gammas[0];
            let cell = CellKey {
                variant: Variant::Ddfg,
                order_k: k,
                gamma: Some(gamma),
                sigma: Some(sigma),
                sparsity: k,
            };
            let result = (|| {
                let base = stall_instance(spec, seed)?;
                let mut rng = Rng::with_stream(seed, trial as u64 + 1);
                let z0 = random_start(&mut rng, k);
                // the same R is reused across σ for a given trial
                let mut inst = perturb_counterexample(&base, sigma, rng.next_seed())?;
                inst.z0 = Some(z0);
                run_irls_l1r(&inst, &config(spec, Variant::Ddfg, k, gamma))
            })();
            outcome(spec, seed, trial, cell, result, false)
        }
        Job::Random {
            seed,
            trial,
            variant,
            order_k,
            gamma,
            sparsity,
        } => {
            let cell = CellKey {
                variant,
                order_k,
                gamma,
                sigma: None,
                sparsity,
            };
            let result = (|| {
                let mut rng = Rng::with_stream(seed, trial as u64);
                let mut inst = random_gaussian_instance_from(spec.m, spec.n, sparsity, spec.value_std, &mut rng)?;
                inst.x0 = Some(random_start(&mut rng, spec.n));
                let g = gamma.unwrap_or(crate::irls::DEFAULT_GAMMA);
                run_irls_cs(&inst, &config(spec, variant, order_k, g))
            })();
            outcome(spec, seed, trial, cell, result, spec.id == ExperimentId::E5)
        }
    }
}

fn notes(spec: &ResolvedSpec) -> Result<Vec<(String, String)>> {
    let mut n: Vec<(String, String)> = Vec::new();
    let mut push = |k: &str, v: String| n.push((k.to_string(), v));
    match spec.id {
        ExperimentId::E1 | ExperimentId::E3 => {
            for &seed in &spec.seeds {
                let inst = stall_instance(spec, seed)?;
                let zs = inst.params.z_star.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>();
                push(&format!("seed.{seed}.z_star"), zs.join(","));
                push(&format!("seed.{seed}.z0_1"), format!("{:e}", inst.z0[0]));
                push(&format!("seed.{seed}.limit_gap"), format!("{:e}", inst.limit_gap));
            }
            let inst = stall_instance(spec, spec.seeds[0])?;
            push("alpha", format!("{:e}", inst.alpha));
            push("xi", format!("{:e}", inst.xi));
            push("s_star", format!("{:e}", inst.s_star));
            push("gamma_printed", format!("{:.6}", inst.params.gamma));
        }
        ExperimentId::E2 => {
            push(
                "gamma_note",
                format!(
                    "the sweep entry written 1-10^(-gamma0) is taken to be gamma0 = {:e} itself",
                    critical_gamma(spec.k)
                ),
            );
        }
        ExperimentId::E4 | ExperimentId::E5 => {
            push(
                "x0",
                "i.i.d. N(0, 100) per trial, shared by every cell of that trial".into(),
            );
            push(
                "ddfg_gamma",
                "unused by the classical schedule; column left empty".into(),
            );
        }
    }
    if matches!(spec.id, ExperimentId::E1 | ExperimentId::E2 | ExperimentId::E3) {
        push(
            "z_star",
            "|N(0,1)| + 0.1 entrywise, one draw per master seed, shared by all trials".into(),
        );
    }
    if matches!(spec.id, ExperimentId::E2 | ExperimentId::E3) {
        push("z0", "i.i.d. N(0, 100) per trial".into());
    }
    if spec.id == ExperimentId::E5 {
        push(
            "labels",
            "outputs are labelled by the sparsity actually used (column sparsity, suffix _k<s>)".into(),
        );
    }
    Ok(n)
}

/// Runs every trial of `spec`. Solver failures are recorded per trial; only an
/// invalid spec is an error.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let resolved = spec.resolve()?;
    let notes = notes(&resolved)?;
    let jobs = jobs(&resolved);
    info!("{}: {} trials at {} scale", resolved.id, jobs.len(), resolved.scale);
    let outcomes: Vec<Outcome> = jobs.par_iter().map(|job| run_job(&resolved, *job)).collect();

    let mut rows = Vec::with_capacity(outcomes.len());
    let mut curves = Vec::with_capacity(outcomes.len());
    let mut traces = Vec::new();
    let mut extra_files = Vec::new();
    for o in outcomes {
        rows.push(o.row);
        curves.push(o.curve);
        traces.extend(o.trace);
        extra_files.extend(o.extra);
    }
    Ok(ExperimentReport {
        aggregates: aggregate(&rows),
        spec: resolved,
        rows,
        curves,
        traces,
        extra_files,
        notes,
    })
}
