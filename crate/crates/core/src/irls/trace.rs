use std::fmt::{self, Write as _};

/// Termination state of a run. Every record except the last is `Running`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Running,
    /// The ε-update returned exactly zero (the iterate is K-sparse or r_{K+1} vanished).
    EpsZero,
    StepTol,
    MaxIter,
    /// The error to the known ground truth fell below `success_tol`.
    Target,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Running => "running",
            Status::EpsZero => "eps_zero",
            Status::StepTol => "step_tol",
            Status::MaxIter => "max_iter",
            Status::Target => "target",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Scalars for iterate `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterRecord {
    pub n: usize,
    pub eps: f64,
    /// `J(x^n, ε_n)`.
    pub objective: f64,
    pub err1: Option<f64>,
    pub err2: Option<f64>,
    /// `‖x^{n+1} − x^n‖_{w^n}`; absent on the final record.
    pub step_w: Option<f64>,
    /// `‖x^{n+1} − x^n‖₂`; absent on the final record.
    pub step2: Option<f64>,
    pub status: Status,
}

/// A stored iterate. For regression runs `z` holds the regression variable and
/// `x = Az − b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: usize,
    pub x: Vec<f64>,
    pub z: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<IterRecord>,
    pub snapshots: Vec<Snapshot>,
}

pub const TRACE_CSV_HEADER: &str = "n,eps,J,err1,err2,step_w,status";

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterRecord> {
        self.records.last()
    }

    pub fn snapshot(&self, n: usize) -> Option<&Snapshot> {
        self.snapshots
            .binary_search_by_key(&n, |s| s.n)
            .ok()
            .map(|i| &self.snapshots[i])
    }

    /// First iteration whose ℓ2 error is at most `tol`.
    pub fn first_below(&self, tol: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.err2.is_some_and(|e| e <= tol))
            .map(|r| r.n)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(TRACE_CSV_HEADER);
        out.push('\n');
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:e}"));
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{:e},{:e},{},{},{},{}",
                r.n,
                r.eps,
                r.objective,
                opt(r.err1),
                opt(r.err2),
                opt(r.step_w),
                r.status
            );
        }
        out
    }
}
