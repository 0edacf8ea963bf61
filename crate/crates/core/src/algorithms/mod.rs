//! Greedy, local search and GSEMO.

mod greedy;
mod gsemo;
mod local_search;
mod population;

pub use greedy::{greedy_evaluations, greedy_min, greedy_mst, greedy_sum};
pub use gsemo::{gsemo, gsemo_min_pipeline};
pub use local_search::{local_search, LocalSearchConfig};
pub use population::Population;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::subset::{ItemId, Subset};

/// How long a run may go.
///
/// For GSEMO one iteration costs one evaluation, so both kinds coincide; for
/// local search `Iterations` counts sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Iterations(u64),
    Evaluations(u64),
}

impl Budget {
    pub fn amount(self) -> u64 {
        match self {
            Self::Iterations(t) | Self::Evaluations(t) => t,
        }
    }
}

/// Initial solution of an iterative algorithm.
#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    /// GSEMO starts from `∅`; local search from the best feasible pair.
    Cold,
    /// Continue from a given feasible solution.
    Warm(Subset),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub budget: Budget,
    pub stream: RngStream,
    /// Record a trace point every this many evaluations; 0 keeps only the
    /// endpoints.
    pub trace_stride: u64,
    /// Check the population invariants after every GSEMO iteration (always on
    /// in debug builds).
    pub check_invariants: bool,
}

impl RunConfig {
    pub fn new(budget: Budget, stream: RngStream) -> Self {
        Self {
            budget,
            stream,
            trace_stride: 0,
            check_invariants: false,
        }
    }

    pub fn with_trace_stride(mut self, stride: u64) -> Self {
        self.trace_stride = stride;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub evaluations: u64,
    /// Best objective seen up to this point.
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub best: Subset,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perm: Option<Vec<ItemId>>,
    /// `f(X) + λ·div(X)` of `best`.
    pub objective: f64,
    pub evaluations: u64,
    /// Whether `best` satisfies the original constraint.
    pub feasible: bool,
    pub trace_stride: u64,
    pub trace: Vec<TracePoint>,
}

/// Best-so-far trace recorder.
#[derive(Debug, Clone)]
pub(crate) struct Tracer {
    stride: u64,
    best: f64,
    points: Vec<TracePoint>,
}

impl Tracer {
    pub(crate) fn new(stride: u64) -> Self {
        Self {
            stride,
            best: f64::NEG_INFINITY,
            points: Vec::new(),
        }
    }

    pub(crate) fn stride(&self) -> u64 {
        self.stride
    }

    /// Whether `evaluations` falls on the recording grid.
    pub(crate) fn due(&self, evaluations: u64) -> bool {
        self.stride > 0 && evaluations % self.stride == 0
    }

    pub(crate) fn record(&mut self, evaluations: u64, objective: f64) {
        self.best = self.best.max(objective);
        match self.points.last_mut() {
            Some(last) if last.evaluations == evaluations => last.best = self.best,
            _ => self.points.push(TracePoint {
                evaluations,
                best: self.best,
            }),
        }
    }

    pub(crate) fn finish(self) -> Vec<TracePoint> {
        self.points
    }
}

/// `⌈x⌉` as an iteration count, at least 1.
pub(crate) fn ceil_budget(x: f64) -> u64 {
    (x.ceil() as u64).max(1)
}

/// `⌈e·n·k³/2⌉`, the GSEMO budget for the scaled sum formulation.
pub fn default_gsemo_budget(n: usize, k: usize) -> u64 {
    ceil_budget(std::f64::consts::E * n as f64 * (k as f64).powi(3) / 2.0)
}

/// `(⌈e·n·k(k+1)⌉, ⌈e·n·k²⌉)` for the two min-diversity phases.
pub fn default_min_pipeline_budgets(n: usize, k: usize) -> (u64, u64) {
    let (n, k) = (n as f64, k as f64);
    let e = std::f64::consts::E;
    (ceil_budget(e * n * k * (k + 1.0)), ceil_budget(e * n * k * k))
}

/// `⌈e·n·k(k+1)⌉` for the mst-permutation formulation.
pub fn default_mst_budget(n: usize, k: usize) -> u64 {
    default_min_pipeline_budgets(n, k).0
}

/// Iteration cap used for the matroid formulation.
pub const MATROID_BUDGET_CAP: u64 = 1_000_000;

/// `min(⌈e·r·n³·(n + r·log2(r)/ε)⌉, cap)` for the matroid formulation with rank `r`.
pub fn default_matroid_budget(n: usize, r: usize, epsilon: f64) -> u64 {
    let (nf, rf) = (n as f64, r as f64);
    let log = if r > 1 { rf.log2() } else { 0.0 };
    let t = std::f64::consts::E * rf * nf.powi(3) * (nf + rf * log / epsilon);
    if t.is_finite() {
        ceil_budget(t).min(MATROID_BUDGET_CAP)
    } else {
        MATROID_BUDGET_CAP
    }
}

pub(crate) fn require_k(inst: &crate::Instance, what: &str) -> Result<usize> {
    let k = inst.k().ok_or_else(|| {
        Error::Unsupported(format!("{what} needs a cardinality constraint"))
    })?;
    if k > inst.n() {
        return Err(Error::BudgetExceedsGroundSet { k, n: inst.n() });
    }
    Ok(k)
}
