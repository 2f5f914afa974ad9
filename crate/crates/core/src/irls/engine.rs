use crate::error::{Error, Result};
use crate::irls::config::{IrlsConfig, Variant};
use crate::irls::eps::{weights_from_iterate, EpsPolicy};
use crate::irls::trace::{IterRecord, IterationTrace, Snapshot, Status};
use crate::numkernel::{
    constrained_weighted_ls, norm1, norm2, smoothed_objective, sub, weighted_norm, weighted_regression_ls, WeightVector,
};
use crate::problem::{CsInstance, RegressionInstance};

#[derive(Debug, Clone)]
pub struct IrlsResult {
    pub final_x: Vec<f64>,
    /// Final regression variable, for runs in the regression form.
    pub final_z: Option<Vec<f64>>,
    pub trace: IterationTrace,
    pub status: Status,
    pub iterations_used: usize,
}

/// One weighted least-squares update: new iterate `x` (and `z` in the regression form).
trait Form {
    fn dim(&self) -> usize;
    fn solve(&self, w: &WeightVector) -> Result<(Vec<f64>, Option<Vec<f64>>)>;
}

struct CsForm<'a>(&'a CsInstance);

impl Form for CsForm<'_> {
    fn dim(&self) -> usize {
        self.0.phi.cols()
    }

    fn solve(&self, w: &WeightVector) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
        Ok((constrained_weighted_ls(&self.0.phi, &self.0.y, w)?, None))
    }
}

struct RegressionForm<'a>(&'a RegressionInstance);

impl Form for RegressionForm<'_> {
    fn dim(&self) -> usize {
        self.0.a.rows()
    }

    fn solve(&self, w: &WeightVector) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
        let z = weighted_regression_ls(&self.0.a, &self.0.b, w)?;
        let x = self.0.residual(&z)?;
        Ok((x, Some(z)))
    }
}

fn policy(config: &IrlsConfig, n: usize) -> Result<EpsPolicy> {
    let k = config.validate(n)?;
    Ok(match config.variant {
        Variant::Ddfg => EpsPolicy::Ddfg { k, n },
        Variant::Modified => EpsPolicy::Modified {
            k,
            n,
            factor: config.shrink_factor(),
        },
    })
}

fn record(n: usize, x: &[f64], eps: f64, x_star: Option<&[f64]>) -> Result<IterRecord> {
    let (err1, err2) = match x_star {
        Some(t) => {
            let d = sub(x, t);
            (Some(norm1(&d)), Some(norm2(&d)))
        }
        None => (None, None),
    };
    Ok(IterRecord {
        n,
        eps,
        objective: smoothed_objective(x, eps)?,
        err1,
        err2,
        step_w: None,
        step2: None,
        status: Status::Running,
    })
}

/// Called with `(n, x^n, z^n)` for every iterate, including `n = 0`.
pub type Observer<'a> = &'a mut dyn FnMut(usize, &[f64], Option<&[f64]>);

fn run<F: Form>(
    form: &F,
    config: &IrlsConfig,
    x0: Vec<f64>,
    z0: Option<Vec<f64>>,
    x_star: Option<&[f64]>,
    observe: Observer<'_>,
) -> Result<IrlsResult> {
    let n_dim = form.dim();
    let policy = policy(config, n_dim)?;
    if x0.len() != n_dim {
        return Err(Error::invalid(format!(
            "initial iterate has length {}, expected {n_dim}",
            x0.len()
        )));
    }
    if let Some(t) = x_star {
        if t.len() != n_dim {
            return Err(Error::invalid(format!(
                "ground truth has length {}, expected {n_dim}",
                t.len()
            )));
        }
    }

    let mut trace = IterationTrace::default();
    let mut x = x0;
    let mut z = z0;
    let mut eps = config.eps0;
    let mut n = 0usize;
    trace.records.push(record(0, &x, eps, x_star)?);
    observe(0, &x, z.as_deref());
    trace.snapshots.push(Snapshot {
        n: 0,
        x: x.clone(),
        z: z.clone(),
    });

    let status = loop {
        if n >= config.max_iter {
            break Status::MaxIter;
        }
        // termination always precedes a weight computation with ε = 0
        assert!(eps > 0.0, "weights requested with eps = {eps}");
        let w = weights_from_iterate(&x, eps)?;
        let (x_next, z_next) = form.solve(&w)?;
        let step = sub(&x_next, &x);
        let step2 = norm2(&step);
        {
            let last = trace.records.last_mut().expect("trace has a record for x^n");
            last.step_w = Some(weighted_norm(&step, &w)?);
            last.step2 = Some(step2);
        }
        eps = policy.next(eps, &x_next)?;
        n += 1;
        x = x_next;
        z = z_next;
        let rec = record(n, &x, eps, x_star)?;
        let err2 = rec.err2;
        trace.records.push(rec);
        observe(n, &x, z.as_deref());
        if n % config.store_every == 0 {
            trace.snapshots.push(Snapshot {
                n,
                x: x.clone(),
                z: z.clone(),
            });
        }

        if eps == 0.0 {
            break Status::EpsZero;
        }
        if let (Some(tol), Some(e)) = (config.success_tol, err2) {
            if e <= tol {
                break Status::Target;
            }
        }
        if step2 <= config.step_tol {
            break Status::StepTol;
        }
    };

    if trace.snapshots.last().map(|s| s.n) != Some(n) {
        trace.snapshots.push(Snapshot {
            n,
            x: x.clone(),
            z: z.clone(),
        });
    }
    trace.records.last_mut().expect("nonempty trace").status = status;
    Ok(IrlsResult {
        final_x: x,
        final_z: z,
        trace,
        status,
        iterations_used: n,
    })
}

/// Runs IRLS on `Φx = y`, starting from `instance.x0` or the minimum ℓ2-norm
/// feasible point.
pub fn run_irls_cs(instance: &CsInstance, config: &IrlsConfig) -> Result<IrlsResult> {
    let x0 = match &instance.x0 {
        Some(x0) => x0.clone(),
        None => constrained_weighted_ls(&instance.phi, &instance.y, &WeightVector::ones(instance.dim()))?,
    };
    run_irls_cs_from(instance, config, x0)
}

pub fn run_irls_cs_from(instance: &CsInstance, config: &IrlsConfig, x0: Vec<f64>) -> Result<IrlsResult> {
    run(
        &CsForm(instance),
        config,
        x0,
        None,
        instance.x_star.as_deref(),
        &mut |_, _, _| {},
    )
}

/// Runs the ℓ1-regression form on `min ‖Az − b‖₁`: the residual `x = Az − b`
/// drives the weights and the ε-update. Starts from `instance.z0` or the
/// unweighted least-squares fit.
pub fn run_irls_l1r(instance: &RegressionInstance, config: &IrlsConfig) -> Result<IrlsResult> {
    let z0 = match &instance.z0 {
        Some(z0) => z0.clone(),
        None => weighted_regression_ls(&instance.a, &instance.b, &WeightVector::ones(instance.a.rows()))?,
    };
    run_irls_l1r_from(instance, config, z0)
}

pub fn run_irls_l1r_from(instance: &RegressionInstance, config: &IrlsConfig, z0: Vec<f64>) -> Result<IrlsResult> {
    run_irls_l1r_observed(instance, config, z0, &mut |_, _, _| {})
}

/// [`run_irls_l1r_from`] with a per-iterate callback, for quantities that are
/// too costly to snapshot at every step.
pub fn run_irls_l1r_observed(
    instance: &RegressionInstance,
    config: &IrlsConfig,
    z0: Vec<f64>,
    observe: Observer<'_>,
) -> Result<IrlsResult> {
    if z0.len() != instance.a.cols() {
        return Err(Error::invalid(format!(
            "initial z has length {}, A has {} columns",
            z0.len(),
            instance.a.cols()
        )));
    }
    let x0 = instance.residual(&z0)?;
    let x_star = instance.x_star()?;
    run(
        &RegressionForm(instance),
        config,
        x0,
        Some(z0),
        x_star.as_deref(),
        observe,
    )
}
