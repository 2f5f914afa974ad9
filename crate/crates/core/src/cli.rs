//! Command-line front end.
//!
//! Exit codes: 0 success, 1 error (bad input, I/O, invalid parameters),
//! 2 iteration cap reached without convergence (`solve`), 3 null space
//! property violated (`nsp-check`).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::experiments::{run_experiment, write_report, ExperimentId, ExperimentSpec, Overrides, Scale};
use crate::instances::{
    build_counterexample, build_tilde_a, critical_gamma, random_positive_z_star, row_count, scalar_recursion_oracle,
    write_counterexample, CounterexampleInstance, CounterexampleParams,
};
use crate::io::{format_vector, read_matrix, read_vector, write_matrix, write_text, write_vector};
use crate::irls::{run_irls_cs_from, run_irls_l1r_observed, IrlsConfig, IrlsResult, Status, Variant, TRACE_CSV_HEADER};
use crate::numkernel::{constrained_weighted_ls, orthogonal_complement, WeightVector};
use crate::problem::CsInstance;
use crate::rng::{Rng, DEFAULT_SEED};

/// `println!` that ignores a closed stdout, so piping into `head` is not an error.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_MAX_ITER: i32 = 2;
pub const EXIT_NSP_VIOLATED: i32 = 3;

const EXIT_CODES: &str = "Exit codes:
  0  success (solve: eps reached 0, step below tolerance, or target error reached)
  1  error: unreadable or malformed input, invalid parameters, failed solve
  2  solve: iteration cap reached without meeting a stopping rule
  3  nsp-check: a vector violating the null space property was found";

/// Iteratively reweighted least squares for sparse recovery.
#[derive(Debug, Parser)]
#[command(name = "sparse-irls", version, after_help = EXIT_CODES)]
pub struct Cli {
    /// Log progress (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve Φx = y by IRLS and write the final iterate.
    #[command(after_help = EXIT_CODES)]
    Solve(SolveArgs),
    /// Build the ℓ1-regression instance on which the classical schedule stalls.
    #[command(after_help = EXIT_CODES)]
    Counterexample(CounterexampleArgs),
    /// Estimate the null space property constant of a matrix by sampling.
    #[command(name = "nsp-check", after_help = EXIT_CODES)]
    NspCheck(NspArgs),
    /// Run one of the experiments E1-E5 and write CSV outputs.
    #[command(after_help = EXIT_CODES)]
    Experiment(ExperimentArgs),
    /// Print every default.
    #[command(after_help = EXIT_CODES)]
    Describe(DescribeArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Measurement matrix Φ (CSV, one row per line).
    pub phi: PathBuf,
    /// Measurements y (CSV, one row or one column).
    pub y: PathBuf,
    /// Key = value configuration file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub variant: Option<Variant>,
    /// NSP order K [default: floor(N/2)].
    #[arg(long = "K", visible_alias = "order")]
    pub order: Option<usize>,
    /// NSP constant γ [default: 0.9].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// η in the modified schedule [default: 0.9].
    #[arg(long)]
    pub eta: Option<f64>,
    /// The product η(1-γ), replacing --eta and --gamma in the modified schedule.
    #[arg(long)]
    pub eta_times_one_minus_gamma: Option<f64>,
    /// Initial smoothing ε₀ [default: 1].
    #[arg(long)]
    pub eps0: Option<f64>,
    /// [default: 100000]
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Stop when ‖x^{n+1} - x^n‖₂ falls below this [default: 1e-10].
    #[arg(long)]
    pub step_tol: Option<f64>,
    /// Stop when ‖x^n - x*‖₂ falls below this (needs --xstar).
    #[arg(long)]
    pub success_tol: Option<f64>,
    /// Known solution, used for error columns in the trace.
    #[arg(long)]
    pub xstar: Option<PathBuf>,
    /// Starting point [default: minimum ℓ2-norm solution].
    #[arg(long)]
    pub x0: Option<PathBuf>,
    /// Write the per-iteration trace CSV here.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    /// Write the final iterate here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RunChoice {
    None,
    Ddfg,
    Modified,
    Both,
    Oracle,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    /// Number of columns k of A.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// γ, which must lie in [ν(k), 1).
    #[arg(long, conflicts_with = "gamma_critical")]
    pub gamma: Option<f64>,
    /// Use the critical value γ = ν(k) (the default).
    #[arg(long)]
    pub gamma_critical: bool,
    /// δ in (0, k(2k+1)] [default: k(2k+1)].
    #[arg(long)]
    pub delta: Option<f64>,
    /// Position of z⁰₁ inside its admissible window, in [0, 1].
    #[arg(long, default_value_t = 0.5)]
    pub z0_pos: f64,
    /// Iterations for solver runs and oracle steps.
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
    /// η for the modified run.
    #[arg(long, default_value_t = 0.9)]
    pub eta: f64,
    #[arg(long, default_value = "out/counterexample")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = RunChoice::None)]
    pub run: RunChoice,
    /// Seed for the random z*.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct NspArgs {
    /// Matrix A whose range is tested (CSV).
    pub matrix: PathBuf,
    /// Treat the matrix as Φ and test its null space instead of its range.
    #[arg(long)]
    pub phi: bool,
    /// Order K.
    #[arg(long = "K", visible_alias = "order")]
    pub order: usize,
    #[arg(long, default_value_t = 0.9)]
    pub gamma: f64,
    /// Random unit vectors tried in addition to the coordinate vectors.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Enumerate all supports when C(rows, K) is at most this.
    #[arg(long, default_value_t = 1_000_000)]
    pub exhaustive_cap: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// E1, E2, E3, E4 or E5.
    #[arg(long)]
    pub id: ExperimentId,
    /// desk or full.
    #[arg(long, default_value = "desk")]
    pub scale: Scale,
    /// Comma-separated master seeds.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    /// Output root; files go to <out>/<id>/<scale>/.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Option<Vec<f64>>,
    /// Comma-separated NSP orders K.
    #[arg(long = "Ks", visible_alias = "orders", value_delimiter = ',')]
    pub orders: Option<Vec<usize>>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub sparsities: Option<Vec<usize>>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub success_tol: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DescribeArgs {
    /// Only describe this experiment.
    #[arg(long)]
    pub id: Option<ExperimentId>,
    #[arg(long, default_value = "desk")]
    pub scale: Scale,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    init_logging(cli.verbose);
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
}

pub fn execute(command: &Command) -> Result<i32> {
    match command {
        Command::Solve(a) => cmd_solve(a),
        Command::Counterexample(a) => cmd_counterexample(a),
        Command::NspCheck(a) => cmd_nsp_check(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Describe(a) => cmd_describe(a),
    }
}

fn print_block(title: &str, body: &str) {
    out!("# {title}");
    for line in body.lines() {
        out!("  {line}");
    }
}

fn solve_config(a: &SolveArgs) -> Result<IrlsConfig> {
    let mut cfg = IrlsConfig::default();
    if let Some(path) = &a.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        cfg.apply_text(&text)
            .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
    }
    if let Some(v) = a.variant {
        cfg.variant = v;
    }
    cfg.k = a.order.or(cfg.k);
    cfg.gamma = a.gamma.unwrap_or(cfg.gamma);
    cfg.eta = a.eta.unwrap_or(cfg.eta);
    cfg.eta_one_minus_gamma = a.eta_times_one_minus_gamma.or(cfg.eta_one_minus_gamma);
    cfg.eps0 = a.eps0.unwrap_or(cfg.eps0);
    cfg.max_iter = a.max_iter.unwrap_or(cfg.max_iter);
    cfg.step_tol = a.step_tol.unwrap_or(cfg.step_tol);
    cfg.success_tol = a.success_tol.or(cfg.success_tol);
    // only the final iterate is written
    cfg.store_every = cfg.max_iter;
    Ok(cfg)
}

/// Maps a finished run to its exit code.
pub fn solve_exit_code(status: Status) -> i32 {
    match status {
        Status::MaxIter => EXIT_MAX_ITER,
        Status::Running => EXIT_ERROR,
        Status::EpsZero | Status::StepTol | Status::Target => EXIT_OK,
    }
}

fn summarize(label: &str, r: &IrlsResult) {
    let last = r.trace.last().expect("trace is never empty");
    let mut s = format!(
        "status = {}\niterations = {}\neps = {:e}\nJ = {:e}",
        r.status, r.iterations_used, last.eps, last.objective
    );
    if let Some(e) = last.err2 {
        let _ = write!(s, "\nerr2 = {e:e}");
    }
    print_block(label, &s);
}

fn cmd_solve(a: &SolveArgs) -> Result<i32> {
    let phi = read_matrix(&a.phi)?;
    let y = read_vector(&a.y)?;
    let mut inst = CsInstance::new(phi, y)?;
    if let Some(p) = &a.xstar {
        inst = inst.with_truth(read_vector(p)?)?;
    }
    let cfg = solve_config(a)?;
    let n = inst.dim();
    print_block(
        "configuration",
        &format!(
            "phi = {}\ny = {}\nshape = {}x{n}\n{}",
            a.phi.display(),
            a.y.display(),
            inst.phi.rows(),
            cfg.describe(Some(n))
        ),
    );
    cfg.validate(n)?;
    let x0 = match &a.x0 {
        Some(p) => read_vector(p)?,
        None => constrained_weighted_ls(&inst.phi, &inst.y, &WeightVector::ones(n))?,
    };
    let r = run_irls_cs_from(&inst, &cfg, x0)?;
    if let Some(p) = &a.trace_out {
        write_text(p, &r.trace.to_csv())?;
    }
    match &a.out {
        Some(p) => write_vector(p, &r.final_x)?,
        None => out!("{}", format_vector(&r.final_x).trim_end()),
    }
    summarize("result", &r);
    Ok(solve_exit_code(r.status))
}

fn counterexample_instance(a: &CounterexampleArgs) -> Result<CounterexampleInstance> {
    let z_star = random_positive_z_star(a.k, &mut Rng::seed_from(a.seed));
    let gamma = a.gamma.unwrap_or_else(|| critical_gamma(a.k));
    let delta = a.delta.unwrap_or(row_count(a.k) as f64);
    build_counterexample(CounterexampleParams::new(a.k, gamma, delta, z_star)?, a.z0_pos)
}

/// Classical or modified run on the regression form, with the `s_n` column.
fn counterexample_run(
    inst: &CounterexampleInstance,
    variant: Variant,
    a: &CounterexampleArgs,
    dir: &Path,
) -> Result<IrlsResult> {
    let cfg = IrlsConfig::new(variant)
        .with_k(inst.k())
        .with_gamma(inst.params.gamma)
        .with_eta(a.eta)
        .with_max_iter(a.steps)
        .with_store_every(a.steps.max(1));
    let mut s = Vec::new();
    let r = run_irls_l1r_observed(&inst.regression(), &cfg, inst.z0.clone(), &mut |_, _, z| {
        if let Some(z) = z {
            s.push(inst.s_of(z[0]));
        }
    })?;
    let csv = r.trace.to_csv();
    let mut out = format!("{TRACE_CSV_HEADER},s\n");
    for (line, s) in csv.lines().skip(1).zip(&s) {
        let _ = writeln!(out, "{line},{s:e}");
    }
    write_text(dir.join(format!("trace_{variant}.csv")), &out)?;
    summarize(&format!("{variant} run"), &r);
    if let Some(z) = &r.final_z {
        out!("  s_final = {:e}", inst.s_of(z[0]));
        out!("  z1_gap = {:e}", z[0] - inst.params.z_star[0]);
    }
    Ok(r)
}

fn cmd_counterexample(a: &CounterexampleArgs) -> Result<i32> {
    let delta = a.delta.unwrap_or(row_count(a.k) as f64);
    print_block(
        "configuration",
        &format!(
            "k = {}\ngamma = {}\ndelta = {delta}\nz0_pos = {}\nsteps = {}\neta = {}\nrun = {:?}\nseed = {}\nout_dir = {}",
            a.k,
            a.gamma.map_or_else(|| format!("critical ({:.6})", critical_gamma(a.k)), |g| g.to_string()),
            a.z0_pos,
            a.steps,
            a.eta,
            a.run,
            a.seed,
            a.out_dir.display()
        ),
    );
    let inst = counterexample_instance(a)?;
    write_counterexample(&a.out_dir, &inst, Some(a.seed))?;
    write_matrix(a.out_dir.join("A_tilde.csv"), &build_tilde_a(a.k)?)?;
    print_block(
        "instance",
        &format!(
            "nu = {:.6} ({:e})\nalpha = {:e}\nxi = {:e}\ns_star = {:e}\nlimit_gap = {:e}\nz0_window = ({:e}, {:e})\nz0_1 = {:e}",
            inst.nu,
            inst.nu,
            inst.alpha,
            inst.xi,
            inst.s_star,
            inst.limit_gap,
            inst.z0_window.0,
            inst.z0_window.1,
            inst.z0[0]
        ),
    );
    if matches!(a.run, RunChoice::Oracle | RunChoice::Both) {
        let steps = scalar_recursion_oracle(&inst, a.steps);
        let mut csv = String::from("n,s,eps,z1\n");
        for st in &steps {
            let _ = writeln!(csv, "{},{:e},{:e},{:e}", st.n, st.s, st.eps, st.z1);
        }
        write_text(a.out_dir.join("oracle.csv"), &csv)?;
        let last = steps.last().expect("oracle has n = 0");
        print_block(
            "oracle",
            &format!(
                "n = {}\ns = {:e}\neps = {:e}\nz1_gap = {:e}",
                last.n,
                last.s,
                last.eps,
                last.z1 - inst.params.z_star[0]
            ),
        );
    }
    if matches!(a.run, RunChoice::Ddfg | RunChoice::Both) {
        counterexample_run(&inst, Variant::Ddfg, a, &a.out_dir)?;
    }
    if matches!(a.run, RunChoice::Modified | RunChoice::Both) {
        counterexample_run(&inst, Variant::Modified, a, &a.out_dir)?;
    }
    out!("wrote {}", a.out_dir.display());
    Ok(EXIT_OK)
}

fn cmd_nsp_check(a: &NspArgs) -> Result<i32> {
    let m = read_matrix(&a.matrix)?;
    let tested = if a.phi {
        orthogonal_complement(&m.transpose())?.transpose()
    } else {
        m
    };
    let rows = tested.rows();
    print_block(
        "configuration",
        &format!(
            "matrix = {}\nform = {}\ntested_shape = {}x{}\nK = {}\ngamma = {}\nsamples = {}\nexhaustive_cap = {}\nseed = {}",
            a.matrix.display(),
            if a.phi { "null space of Phi" } else { "range of A" },
            rows,
            tested.cols(),
            a.order,
            a.gamma,
            a.samples,
            a.exhaustive_cap,
            a.seed
        ),
    );
    if 2 * a.order >= rows {
        eprintln!(
            "warning: K = {} >= N/2 = {}; the null space property of this order cannot hold",
            a.order,
            rows as f64 / 2.0
        );
    }
    let r = crate::instances::nsp_check(&tested, a.order, a.gamma, a.samples, a.exhaustive_cap, a.seed)?;
    print_block(
        "report",
        &format!(
            "gamma_estimate = {:e}\nexhaustive = {}\npassed = {}",
            r.gamma_estimate,
            r.exhaustive,
            r.passed()
        ),
    );
    match &r.witness {
        Some(w) => {
            let t: Vec<String> = w.support.iter().map(|i| i.to_string()).collect();
            print_block(
                "witness",
                &format!(
                    "ratio = {:e}\nT = {}\nz = {}",
                    w.ratio,
                    t.join(","),
                    format_vector(&w.z).trim_end().replace('\n', ",")
                ),
            );
            Ok(EXIT_NSP_VIOLATED)
        }
        None => Ok(EXIT_OK),
    }
}

fn cmd_experiment(a: &ExperimentArgs) -> Result<i32> {
    let mut spec = ExperimentSpec::new(a.id, a.scale).with_overrides(Overrides {
        k: a.k,
        gammas: a.gammas.clone(),
        sigmas: a.sigmas.clone(),
        orders: a.orders.clone(),
        m: a.m,
        n: a.n,
        sparsities: a.sparsities.clone(),
        max_iter: a.max_iter,
        success_tol: a.success_tol,
        trials: a.trials,
    });
    if !a.seeds.is_empty() {
        spec = spec.with_seeds(a.seeds.clone());
    }
    let resolved = spec.resolve()?;
    let body: String = resolved
        .describe()
        .iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect();
    print_block("configuration", &format!("{body}out = {}", a.out.display()));
    let report = run_experiment(&spec)?;
    let dir = write_report(&report, &a.out)?;
    let mut table = String::from("variant K gamma sigma sparsity success/trials mean_iters\n");
    for g in &report.aggregates {
        let _ = writeln!(
            table,
            "{} {} {} {} {} {}/{} {}",
            g.cell.variant,
            g.cell.order_k,
            g.cell.gamma.map_or("-".into(), |v| format!("{v:.6}")),
            g.cell.sigma.map_or("-".into(), |v| format!("{v:e}")),
            g.cell.sparsity,
            g.successes,
            g.trials,
            g.mean_iterations_success.map_or("-".into(), |v| format!("{v:.1}"))
        );
    }
    print_block("aggregate", &table);
    out!("wrote {}", dir.display());
    Ok(EXIT_OK)
}

fn cmd_describe(a: &DescribeArgs) -> Result<i32> {
    print_block("solver defaults", &IrlsConfig::default().describe(None));
    let ids: Vec<ExperimentId> = match a.id {
        Some(id) => vec![id],
        None => ExperimentId::ALL.to_vec(),
    };
    for id in ids {
        let r = ExperimentSpec::new(id, a.scale).resolve()?;
        let body: String = r.describe().iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        print_block(&format!("experiment {id} ({})", a.scale), &body);
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn unknown_flags_and_bad_values_exit_one() {
        assert_eq!(run_from(["sparse-irls", "describe", "--bogus"]), EXIT_ERROR);
        assert_eq!(run_from(["sparse-irls", "experiment", "--id", "E9"]), EXIT_ERROR);
        assert_eq!(run_from(["sparse-irls", "--help"]), EXIT_OK);
    }

    #[test]
    fn exit_code_mapping() {
        assert_eq!(solve_exit_code(Status::EpsZero), 0);
        assert_eq!(solve_exit_code(Status::StepTol), 0);
        assert_eq!(solve_exit_code(Status::Target), 0);
        assert_eq!(solve_exit_code(Status::MaxIter), 2);
    }
}
