//! Mean best-so-far curves across trials.

use std::collections::BTreeSet;

use crate::algorithms::{RunResult, TracePoint};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub algorithm: String,
    pub trials: usize,
    pub points: Vec<TracePoint>,
}

impl Curve {
    /// `(evaluations / unit, mean best)` pairs, e.g. with `unit = k·n`.
    pub fn scaled(&self, unit: f64) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .map(|p| (p.evaluations as f64 / unit, p.best))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("evaluations,mean_best_objective\n");
        for p in &self.points {
            out.push_str(&format!("{},{}\n", p.evaluations, p.best));
        }
        out
    }
}

/// Best value of `trace` at `evaluations`, carrying the last point forward.
fn value_at(trace: &[TracePoint], evaluations: u64) -> f64 {
    let i = trace.partition_point(|p| p.evaluations <= evaluations);
    trace[i.saturating_sub(1)].best
}

/// Averages the best-so-far traces of several trials of one algorithm.
///
/// All trials must share one stride. With a positive stride the grid is every
/// multiple of it plus each trial's final count; with stride 0 it is the union
/// of all recorded counts. Trials that stopped early keep their last value.
pub fn trace_export(algorithm: &str, runs: &[&RunResult]) -> Result<Curve> {
    let Some(first) = runs.first() else {
        return Err(Error::Inconsistent(format!("no trials for {algorithm}")));
    };
    let stride = first.trace_stride;
    if let Some(r) = runs.iter().find(|r| r.trace_stride != stride) {
        return Err(Error::Inconsistent(format!(
            "{algorithm}: trace stride {} differs from {stride}",
            r.trace_stride
        )));
    }
    if runs.iter().any(|r| r.trace.is_empty()) {
        return Err(Error::Inconsistent(format!("{algorithm}: empty trace")));
    }
    let mut grid = BTreeSet::new();
    for r in runs {
        if stride == 0 {
            grid.extend(r.trace.iter().map(|p| p.evaluations));
        } else {
            grid.extend(r.trace.iter().map(|p| p.evaluations).filter(|e| e % stride == 0));
        }
        grid.insert(r.trace.last().expect("nonempty").evaluations);
    }
    let trials = runs.len() as f64;
    let points = grid
        .into_iter()
        .map(|e| TracePoint {
            evaluations: e,
            best: runs.iter().map(|r| value_at(&r.trace, e)).sum::<f64>() / trials,
        })
        .collect();
    Ok(Curve {
        algorithm: algorithm.to_string(),
        trials: runs.len(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subset::Subset;

    fn run(stride: u64, pts: &[(u64, f64)]) -> RunResult {
        RunResult {
            best: Subset::empty(1),
            perm: None,
            objective: pts.last().unwrap().1,
            evaluations: pts.last().unwrap().0,
            feasible: true,
            trace_stride: stride,
            trace: pts.iter().map(|&(evaluations, best)| TracePoint { evaluations, best }).collect(),
        }
    }

    #[test]
    fn single_trial_is_its_trace() {
        let r = run(10, &[(0, 0.0), (10, 1.0), (20, 1.5), (25, 2.0)]);
        let c = trace_export("g", &[&r]).unwrap();
        assert_eq!(c.points, r.trace);
    }

    #[test]
    fn forward_fill_and_mean() {
        let a = run(10, &[(0, 0.0), (10, 1.0), (20, 3.0)]);
        let b = run(10, &[(0, 1.0), (10, 2.0)]);
        let c = trace_export("g", &[&a, &b]).unwrap();
        let got: Vec<_> = c.points.iter().map(|p| (p.evaluations, p.best)).collect();
        assert_eq!(got, vec![(0, 0.5), (10, 1.5), (20, 2.5)]);
        assert!(c.points.windows(2).all(|w| w[0].best <= w[1].best));
        assert_eq!(c.scaled(10.0)[2], (2.0, 2.5));
        assert!(c.to_csv().starts_with("evaluations,mean_best_objective\n0,0.5\n"));
    }

    #[test]
    fn stride_mismatch() {
        let a = run(10, &[(0, 0.0)]);
        let b = run(5, &[(0, 0.0)]);
        assert!(trace_export("g", &[&a, &b]).is_err());
        assert!(trace_export("g", &[]).is_err());
    }
}
