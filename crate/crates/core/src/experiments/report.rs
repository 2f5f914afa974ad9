use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::experiments::spec::ResolvedSpec;
use crate::io::write_text;
use crate::irls::{IterationTrace, Status, Variant};

#[derive(Debug, Clone, PartialEq)]
pub enum TrialStatus {
    Finished(Status),
    /// The solver raised an error; the batch continues.
    Failed(String),
}

impl TrialStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Finished(s) => s.as_str(),
            Self::Failed(_) => "error",
        }
    }
}

/// Parameters that identify one cell of an experiment grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellKey {
    pub variant: Variant,
    pub order_k: usize,
    /// `None` where the schedule does not use γ.
    pub gamma: Option<f64>,
    pub sigma: Option<f64>,
    pub sparsity: usize,
}

impl CellKey {
    fn same(&self, other: &CellKey) -> bool {
        let bits = |v: Option<f64>| v.map(f64::to_bits);
        self.variant == other.variant
            && self.order_k == other.order_k
            && bits(self.gamma) == bits(other.gamma)
            && bits(self.sigma) == bits(other.sigma)
            && self.sparsity == other.sparsity
    }

    fn csv_fields(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.variant,
            self.order_k,
            opt(self.gamma),
            opt(self.sigma),
            self.sparsity
        )
    }
}

const CELL_HEADER: &str = "variant,K,gamma,sigma,sparsity";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub seed: u64,
    pub trial: usize,
    pub cell: CellKey,
    pub status: TrialStatus,
    pub iterations: usize,
    pub final_error: Option<f64>,
    /// `final_error ≤ success_tol`.
    pub success: bool,
}

impl TrialRow {
    /// File-name label `<seed>_<trial>_<variant>[_k<sparsity>]`.
    pub fn label(&self, with_sparsity: bool) -> String {
        let mut s = format!("{}_{}_{}", self.seed, self.trial, self.cell.variant);
        if with_sparsity {
            let _ = write!(s, "_k{}", self.cell.sparsity);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub cell: CellKey,
    pub trials: usize,
    pub successes: usize,
    pub errors: usize,
    pub success_rate: f64,
    /// Mean iteration count over successful trials.
    pub mean_iterations_success: Option<f64>,
    /// Mean final `‖x − x*‖₂` over trials that finished.
    pub mean_final_error: Option<f64>,
}

/// Groups rows by cell, in order of first appearance.
pub fn aggregate(rows: &[TrialRow]) -> Vec<AggregateRow> {
    let mut cells: Vec<CellKey> = Vec::new();
    for r in rows {
        if !cells.iter().any(|c| c.same(&r.cell)) {
            cells.push(r.cell);
        }
    }
    cells
        .into_iter()
        .map(|cell| {
            let group: Vec<&TrialRow> = rows.iter().filter(|r| r.cell.same(&cell)).collect();
            let succ: Vec<&&TrialRow> = group.iter().filter(|r| r.success).collect();
            let errs: Vec<f64> = group.iter().filter_map(|r| r.final_error).collect();
            let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
            let iters: Vec<f64> = succ.iter().map(|r| r.iterations as f64).collect();
            AggregateRow {
                cell,
                trials: group.len(),
                successes: succ.len(),
                errors: group
                    .iter()
                    .filter(|r| matches!(r.status, TrialStatus::Failed(_)))
                    .count(),
                success_rate: succ.len() as f64 / group.len() as f64,
                mean_iterations_success: mean(&iters),
                mean_final_error: mean(&errs),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryPoint {
    pub cell: CellKey,
    pub n: usize,
    /// Fraction of the cell's trials that have succeeded by iteration `n`.
    pub recovered_fraction: f64,
    /// `(1/T) Σ_i ‖x^n_i − x*_i‖₂`, with stopped trials held at their last
    /// value; `None` unless every trial of the cell kept its error curve.
    pub mean_error: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub spec: ResolvedSpec,
    pub rows: Vec<TrialRow>,
    pub aggregates: Vec<AggregateRow>,
    /// Per-row `‖x^n − x*‖₂` for `n = 0..=iterations`, when kept.
    pub curves: Vec<Option<Vec<f64>>>,
    /// Full traces kept for plotting, keyed by trial label.
    pub traces: Vec<(String, IterationTrace)>,
    /// Additional CSV files as `(file name, contents)`.
    pub extra_files: Vec<(String, String)>,
    /// Derived constants and notes, written to the metadata file.
    pub notes: Vec<(String, String)>,
}

/// Cumulative recovery fraction and mean error per iteration, per cell.
pub fn recovery_statistics(report: &ExperimentReport) -> Vec<RecoveryPoint> {
    let mut out = Vec::new();
    for agg in &report.aggregates {
        let idx: Vec<usize> = (0..report.rows.len())
            .filter(|&i| report.rows[i].cell.same(&agg.cell))
            .collect();
        let horizon = idx.iter().map(|&i| report.rows[i].iterations).max().unwrap_or(0);
        let all_curves = idx
            .iter()
            .all(|&i| matches!(&report.curves.get(i), Some(Some(c)) if !c.is_empty()));
        let t = idx.len() as f64;
        for n in 0..=horizon {
            let recovered = idx
                .iter()
                .filter(|&&i| report.rows[i].success && report.rows[i].iterations <= n)
                .count();
            let mean_error = all_curves.then(|| {
                idx.iter()
                    .map(|&i| {
                        let c = report.curves[i].as_ref().expect("checked above");
                        c[n.min(c.len() - 1)]
                    })
                    .sum::<f64>()
                    / t
            });
            out.push(RecoveryPoint {
                cell: agg.cell,
                n,
                recovered_fraction: recovered as f64 / t,
                mean_error,
            });
        }
    }
    out
}

pub fn trials_csv(rows: &[TrialRow]) -> String {
    let mut s = format!("seed,trial,{CELL_HEADER},status,success,iterations,final_err2\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.seed,
            r.trial,
            r.cell.csv_fields(),
            r.status.as_str(),
            u8::from(r.success),
            r.iterations,
            opt(r.final_error)
        );
    }
    s
}

pub fn aggregate_csv(aggs: &[AggregateRow]) -> String {
    let mut s = format!("{CELL_HEADER},trials,successes,errors,success_rate,mean_iterations_success,mean_final_err2\n");
    for a in aggs {
        let _ = writeln!(
            s,
            "{},{},{},{},{:e},{},{}",
            a.cell.csv_fields(),
            a.trials,
            a.successes,
            a.errors,
            a.success_rate,
            opt(a.mean_iterations_success),
            opt(a.mean_final_error)
        );
    }
    s
}

pub fn recovery_csv(points: &[RecoveryPoint]) -> String {
    let mut s = format!("{CELL_HEADER},n,recovered_fraction,mean_err2\n");
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{:e},{}",
            p.cell.csv_fields(),
            p.n,
            p.recovered_fraction,
            opt(p.mean_error)
        );
    }
    s
}

impl ExperimentReport {
    pub fn metadata_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "tool = {} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"));
        for (k, v) in self.spec.describe().iter().chain(&self.notes) {
            let _ = writeln!(s, "{k} = {v}");
        }
        for r in &self.rows {
            if let TrialStatus::Failed(msg) = &r.status {
                let _ = writeln!(s, "trial_error.{} = {msg}", r.label(true));
            }
        }
        s
    }

    /// Directory `root/<id>/<scale>` that [`write_report`] fills.
    pub fn output_dir(&self, root: &Path) -> PathBuf {
        root.join(self.spec.id.as_str()).join(self.spec.scale.as_str())
    }

    pub fn success_rate(&self) -> f64 {
        self.rows.iter().filter(|r| r.success).count() as f64 / self.rows.len().max(1) as f64
    }
}

/// Writes `trials.csv`, `aggregate.csv`, `metadata.txt`, one
/// `trace_<label>.csv` per kept trace, `recovery.csv` when error curves were
/// kept, and any extra files. Nothing time-dependent is written, so equal
/// reports produce identical bytes.
pub fn write_report(report: &ExperimentReport, root: &Path) -> Result<PathBuf> {
    let dir = report.output_dir(root);
    write_text(dir.join("trials.csv"), &trials_csv(&report.rows))?;
    write_text(dir.join("aggregate.csv"), &aggregate_csv(&report.aggregates))?;
    write_text(dir.join("metadata.txt"), &report.metadata_text())?;
    if report.curves.iter().any(Option::is_some) {
        write_text(dir.join("recovery.csv"), &recovery_csv(&recovery_statistics(report)))?;
    }
    for (label, trace) in &report.traces {
        write_text(dir.join(format!("trace_{label}.csv")), &trace.to_csv())?;
    }
    for (name, text) in &report.extra_files {
        write_text(dir.join(name), text)?;
    }
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::spec::{ExperimentId, ExperimentSpec, Scale};

    fn row(trial: usize, variant: Variant, success: bool, iterations: usize) -> TrialRow {
        TrialRow {
            seed: 1,
            trial,
            cell: CellKey {
                variant,
                order_k: 3,
                gamma: Some(0.9),
                sigma: None,
                sparsity: 2,
            },
            status: TrialStatus::Finished(if success { Status::Target } else { Status::MaxIter }),
            iterations,
            final_error: Some(if success { 1e-4 } else { 0.5 }),
            success,
        }
    }

    fn report(rows: Vec<TrialRow>, curves: Vec<Option<Vec<f64>>>) -> ExperimentReport {
        ExperimentReport {
            spec: ExperimentSpec::new(ExperimentId::E5, Scale::Desk).resolve().unwrap(),
            aggregates: aggregate(&rows),
            rows,
            curves,
            traces: Vec::new(),
            extra_files: Vec::new(),
            notes: Vec::new(),
        }
    }

    #[test]
    fn aggregates_match_rows() {
        let rows = vec![
            row(0, Variant::Ddfg, true, 10),
            row(1, Variant::Ddfg, false, 50),
            row(0, Variant::Modified, true, 12),
            row(1, Variant::Modified, true, 14),
        ];
        let a = aggregate(&rows);
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].cell.variant, Variant::Ddfg);
        assert_eq!((a[0].trials, a[0].successes), (2, 1));
        assert_eq!(a[0].success_rate, 0.5);
        assert_eq!(a[0].mean_iterations_success, Some(10.0));
        assert_eq!(a[1].mean_iterations_success, Some(13.0));
        assert_eq!(a[1].success_rate, 1.0);
    }

    #[test]
    fn all_succeed_at_one_is_a_step() {
        let rows = vec![row(0, Variant::Modified, true, 1), row(1, Variant::Modified, true, 1)];
        let curves = vec![Some(vec![2.0, 1e-4]), Some(vec![4.0, 1e-4])];
        let pts = recovery_statistics(&report(rows, curves));
        assert_eq!(pts.len(), 2);
        assert_eq!((pts[0].n, pts[0].recovered_fraction), (0, 0.0));
        assert_eq!((pts[1].n, pts[1].recovered_fraction), (1, 1.0));
        assert_eq!(pts[0].mean_error, Some(3.0));
    }

    #[test]
    fn stopped_trials_hold_their_last_error() {
        let rows = vec![row(0, Variant::Ddfg, true, 1), row(1, Variant::Ddfg, false, 3)];
        let curves = vec![Some(vec![1.0, 0.0]), Some(vec![1.0, 1.0, 1.0, 1.0])];
        let pts = recovery_statistics(&report(rows, curves));
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[3].mean_error, Some(0.5));
        assert_eq!(pts[3].recovered_fraction, 0.5);
        let no_curves = recovery_statistics(&report(vec![row(0, Variant::Ddfg, true, 2)], vec![None]));
        assert!(no_curves.iter().all(|p| p.mean_error.is_none()));
    }

    #[test]
    fn csv_layouts() {
        let rows = vec![row(0, Variant::Ddfg, true, 10)];
        let t = trials_csv(&rows);
        assert_eq!(
            t,
            "seed,trial,variant,K,gamma,sigma,sparsity,status,success,iterations,final_err2\n\
             1,0,ddfg,3,9e-1,,2,target,1,10,1e-4\n"
        );
        let a = aggregate_csv(&aggregate(&rows));
        assert_eq!(a.lines().nth(1).unwrap(), "ddfg,3,9e-1,,2,1,1,0,1e0,1e1,1e-4");
    }
}
