//! Named algorithms with their default budgets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algorithms::{
    default_gsemo_budget, default_matroid_budget, default_min_pipeline_budgets, default_mst_budget,
    greedy_min, greedy_mst, greedy_sum, gsemo, gsemo_min_pipeline, local_search, require_k, Budget,
    LocalSearchConfig, RunConfig, RunResult, Start, TracePoint,
};
use crate::error::{Error, Result};
use crate::formulations::Formulation;
use crate::instance::{DiversityKind, Instance};
use crate::rng::RngStream;

/// Epsilon used for the matroid GSEMO budget when none is given.
pub const DEFAULT_MATROID_EPSILON: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// The greedy matching the instance's diversity kind.
    Greedy,
    GreedyMin,
    GreedyMst,
    /// Swap local search from the best pair.
    LocalSearch,
    /// Swap local search started from the greedy solution.
    LocalSearchWarm,
    Gsemo,
    GsemoPlain,
    GsemoMin,
    GsemoMst,
    GsemoMatroid,
}

impl Algorithm {
    pub const ALL: [Algorithm; 10] = [
        Self::Greedy,
        Self::GreedyMin,
        Self::GreedyMst,
        Self::LocalSearch,
        Self::LocalSearchWarm,
        Self::Gsemo,
        Self::GsemoPlain,
        Self::GsemoMin,
        Self::GsemoMst,
        Self::GsemoMatroid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Greedy => "greedy",
            Self::GreedyMin => "greedy-min",
            Self::GreedyMst => "greedy-mst",
            Self::LocalSearch => "local-search",
            Self::LocalSearchWarm => "local-search-warm",
            Self::Gsemo => "gsemo",
            Self::GsemoPlain => "gsemo-plain",
            Self::GsemoMin => "gsemo-min",
            Self::GsemoMst => "gsemo-mst",
            Self::GsemoMatroid => "gsemo-matroid",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(
            self,
            Self::Gsemo | Self::GsemoPlain | Self::GsemoMin | Self::GsemoMst | Self::GsemoMatroid
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = Self::ALL.iter().map(|a| a.name()).collect();
                Error::Unsupported(format!("unknown algorithm `{s}` (known: {})", known.join(", ")))
            })
    }
}

/// An algorithm plus optional overrides of its defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub name: Algorithm,
    /// GSEMO iterations (each phase of `gsemo-min`) or local-search evaluations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    /// Local-search improvement factor, or the matroid GSEMO budget's epsilon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_swaps: Option<u8>,
}

impl From<Algorithm> for AlgorithmConfig {
    fn from(name: Algorithm) -> Self {
        Self {
            name,
            budget: None,
            epsilon: None,
            max_swaps: None,
        }
    }
}

impl AlgorithmConfig {
    /// The GSEMO iteration budget this config would use on `inst`.
    pub fn gsemo_budget(&self, inst: &Instance) -> Result<u64> {
        if let Some(b) = self.budget {
            if b == 0 {
                return Err(Error::InvalidBudget("budget must be positive".into()));
            }
            return Ok(b);
        }
        let n = inst.n();
        Ok(match self.name {
            Algorithm::Gsemo | Algorithm::GsemoPlain => default_gsemo_budget(n, require_k(inst, "gsemo")?),
            Algorithm::GsemoMst => default_mst_budget(n, require_k(inst, "gsemo-mst")?),
            Algorithm::GsemoMin => {
                let (t1, t2) = default_min_pipeline_budgets(n, require_k(inst, "gsemo-min")?);
                t1 + t2
            }
            Algorithm::GsemoMatroid => default_matroid_budget(
                n,
                inst.constraint().rank(n).0,
                self.epsilon.unwrap_or(DEFAULT_MATROID_EPSILON),
            ),
            other => {
                return Err(Error::Unsupported(format!("{other} has no iteration budget")))
            }
        })
    }

    fn local_search(&self, start: Start, trace_stride: u64) -> LocalSearchConfig {
        LocalSearchConfig {
            start,
            epsilon: self.epsilon.unwrap_or(0.0),
            max_swaps: self.max_swaps.unwrap_or(1),
            budget: self.budget.map(Budget::Evaluations),
            trace_stride,
        }
    }

    /// Runs the algorithm on `inst`; randomized algorithms draw from `stream`.
    pub fn run(&self, inst: &Instance, stream: RngStream, trace_stride: u64) -> Result<RunResult> {
        let gsemo_with = |form| {
            let cfg = RunConfig::new(Budget::Iterations(self.gsemo_budget(inst)?), stream)
                .with_trace_stride(trace_stride);
            gsemo(inst, form, &cfg, &Start::Cold)
        };
        match self.name {
            Algorithm::Greedy => match inst.diversity() {
                DiversityKind::Sum => greedy_sum(inst),
                DiversityKind::Min => greedy_min(inst),
                DiversityKind::Mst => greedy_mst(inst),
            },
            Algorithm::GreedyMin => greedy_min(inst),
            Algorithm::GreedyMst => greedy_mst(inst),
            Algorithm::LocalSearch => local_search(inst, &self.local_search(Start::Cold, trace_stride)),
            Algorithm::LocalSearchWarm => {
                let g = greedy_sum(inst)?;
                let ls = local_search(inst, &self.local_search(Start::Warm(g.best.clone()), trace_stride))?;
                Ok(chain(g, ls))
            }
            Algorithm::Gsemo => gsemo_with(Formulation::ScaledCardinalitySum),
            Algorithm::GsemoPlain => gsemo_with(Formulation::PlainCardinalitySum),
            Algorithm::GsemoMst => gsemo_with(Formulation::MstPermutation),
            Algorithm::GsemoMatroid => gsemo_with(Formulation::MatroidSum),
            Algorithm::GsemoMin => {
                let (t1, t2) = match self.budget {
                    Some(b) => (b, b),
                    None => default_min_pipeline_budgets(inst.n(), require_k(inst, "gsemo-min")?),
                };
                gsemo_min_pipeline(inst, t1, t2, stream, trace_stride)
            }
        }
    }
}

/// `second` continued from `first`: evaluations add up and the trace of
/// `second` is shifted past the end of `first`.
fn chain(first: RunResult, second: RunResult) -> RunResult {
    let offset = first.evaluations;
    let mut trace = first.trace;
    let mut best = trace.last().map_or(f64::NEG_INFINITY, |p| p.best);
    for p in second.trace {
        best = best.max(p.best);
        let point = TracePoint {
            evaluations: p.evaluations + offset,
            best,
        };
        match trace.last_mut() {
            Some(last) if last.evaluations == point.evaluations => *last = point,
            _ => trace.push(point),
        }
    }
    RunResult {
        evaluations: offset + second.evaluations,
        trace,
        ..second
    }
}
