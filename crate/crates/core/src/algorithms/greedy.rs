//! Greedy heuristics for sum, min and MST diversity.
//!
//! Every step scans all unselected items, charging one evaluation per
//! candidate; ties go to the lowest index.

use super::{require_k, RunResult, Tracer};
use crate::error::{Error, Result};
use crate::instance::{DiversityKind, Instance};
use crate::objectives::{objective_value, EvaluationCounter, QualityOracle};
use crate::subset::{ItemId, Subset};

/// `k` steps over `n` items cost `n + (n-1) + ... + (n-k+1)` evaluations.
pub fn greedy_evaluations(n: usize, k: usize) -> u64 {
    let (n, k) = (n as u64, k as u64);
    k * n - k * k.saturating_sub(1) / 2
}

fn require_kind(inst: &Instance, kind: DiversityKind, what: &str) -> Result<usize> {
    if inst.diversity() != kind {
        return Err(Error::Unsupported(format!(
            "{what} needs a {}-diversity instance",
            kind.as_str()
        )));
    }
    require_k(inst, what)
}

/// Index of the maximum of `score` over `candidates`; lowest index on ties.
fn argmax(candidates: impl Iterator<Item = ItemId>, mut score: impl FnMut(ItemId) -> f64) -> ItemId {
    let mut best: Option<(ItemId, f64)> = None;
    for u in candidates {
        let s = score(u);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((u, s));
        }
    }
    best.expect("a candidate is left").0
}

fn finish(inst: &Instance, x: Subset, counter: EvaluationCounter, tracer: Tracer) -> RunResult {
    RunResult {
        objective: objective_value(&x, inst),
        feasible: inst.constraint().is_feasible_final(&x),
        best: x,
        perm: None,
        evaluations: counter.count(),
        trace_stride: tracer.stride(),
        trace: tracer.finish(),
    }
}

/// Repeatedly adds the item maximizing `(f(X+u) - f(X))/2 + λ·Σ_{v∈X} d(u,v)`.
///
/// Under a partition matroid only items keeping `X` independent are scanned,
/// and the run stops at a basis.
pub fn greedy_sum(inst: &Instance) -> Result<RunResult> {
    if inst.diversity() != DiversityKind::Sum {
        return Err(Error::Unsupported("greedy_sum needs a sum-diversity instance".into()));
    }
    if inst.k().is_some() {
        require_k(inst, "greedy_sum")?;
    }
    let n = inst.n();
    let d = inst.distance();
    let lambda = inst.lambda();
    let q = inst.quality();
    let mut x = Subset::empty(n);
    // Σ_{v∈X} d(u, v) for every u
    let mut attach = vec![0.0; n];
    let mut counter = EvaluationCounter::new();
    let mut tracer = Tracer::new(0);
    tracer.record(0, 0.0);
    loop {
        let candidates = inst.constraint().addable(&x);
        if candidates.is_empty() {
            break;
        }
        counter.charge(candidates.len() as u64);
        let u = argmax(candidates.into_iter(), |u| q.marginal(&x, u) / 2.0 + lambda * attach[u]);
        x.insert(u);
        for (a, du) in attach.iter_mut().zip(d.row(u)) {
            *a += du;
        }
        tracer.record(counter.count(), objective_value(&x, inst));
    }
    Ok(finish(inst, x, counter, tracer))
}

/// Runs the quality chain `argmax f(X+u) - f(X)` and the farthest-point chain
/// `argmax min_{v∈Y} d(u,v)` side by side and returns the better final set.
///
/// The farthest-point rule is undefined for `Y = ∅`; by convention the first
/// pick is item 0. Ties between the two chains go to the quality chain.
pub fn greedy_min(inst: &Instance) -> Result<RunResult> {
    let k = require_kind(inst, DiversityKind::Min, "greedy_min")?;
    let n = inst.n();
    let d = inst.distance();
    let q = inst.quality();
    let mut x = Subset::empty(n);
    let mut y = Subset::empty(n);
    let mut nearest = vec![f64::INFINITY; n];
    let mut counter = EvaluationCounter::new();
    let mut tracer = Tracer::new(0);
    tracer.record(0, 0.0);
    for step in 0..k {
        counter.charge((n - x.len()) as u64);
        let u1 = argmax(x.complement_iter(), |u| q.marginal(&x, u));
        x.insert(u1);

        counter.charge((n - y.len()) as u64);
        let u2 = if step == 0 {
            0
        } else {
            argmax(y.complement_iter(), |u| nearest[u])
        };
        y.insert(u2);
        for (m, du) in nearest.iter_mut().zip(d.row(u2)) {
            *m = m.min(*du);
        }
        let progress = objective_value(&x, inst).max(objective_value(&y, inst));
        tracer.record(counter.count(), progress);
    }
    counter.charge(2);
    let (fx, fy) = (objective_value(&x, inst), objective_value(&y, inst));
    tracer.record(counter.count(), fx.max(fy));
    let best = if fx >= fy { x } else { y };
    Ok(finish(inst, best, counter, tracer))
}

/// Repeatedly adds the item maximizing `f(X+u) - f(X) + λ·min_{v∈X} d(u,v)`,
/// with the minimum over `∅` taken as 0.
pub fn greedy_mst(inst: &Instance) -> Result<RunResult> {
    let k = require_kind(inst, DiversityKind::Mst, "greedy_mst")?;
    let n = inst.n();
    let d = inst.distance();
    let lambda = inst.lambda();
    let q = inst.quality();
    let mut x = Subset::empty(n);
    let mut nearest = vec![f64::INFINITY; n];
    let mut counter = EvaluationCounter::new();
    let mut tracer = Tracer::new(0);
    tracer.record(0, 0.0);
    for _ in 0..k {
        counter.charge((n - x.len()) as u64);
        let empty = x.is_empty();
        let u = argmax(x.complement_iter(), |u| {
            let link = if empty { 0.0 } else { nearest[u] };
            q.marginal(&x, u) + lambda * link
        });
        x.insert(u);
        for (m, du) in nearest.iter_mut().zip(d.row(u)) {
            *m = m.min(*du);
        }
        tracer.record(counter.count(), objective_value(&x, inst));
    }
    Ok(finish(inst, x, counter, tracer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::ConstraintSpec;
    use crate::distance::DistanceMatrix;
    use crate::objectives::{ModularQuality, Quality};

    fn three(lambda: f64) -> Instance {
        let d = DistanceMatrix::new(3, vec![0.0, 1.0, 1.2, 1.0, 0.0, 1.0, 1.2, 1.0, 0.0]).unwrap();
        Instance::new(
            Quality::Modular(ModularQuality::new(vec![0.5, 0.2, 0.1]).unwrap()),
            d,
            lambda,
            DiversityKind::Sum,
            ConstraintSpec::at_most(2),
        )
        .unwrap()
    }

    #[test]
    fn greedy_sum_hand_trace() {
        let r = greedy_sum(&three(1.0)).unwrap();
        assert_eq!(r.best.to_vec(), vec![0, 2]);
        assert!((r.objective - 1.8).abs() < 1e-12);
        assert_eq!(r.evaluations, 3 + 2);
        assert_eq!(r.evaluations, greedy_evaluations(3, 2));
    }

    #[test]
    fn greedy_sum_full_and_too_large() {
        let inst = three(1.0).with_constraint(ConstraintSpec::at_most(3)).unwrap();
        assert_eq!(greedy_sum(&inst).unwrap().best, Subset::full(3));
        let inst = three(1.0).with_constraint(ConstraintSpec::at_most(4)).unwrap();
        assert!(matches!(greedy_sum(&inst), Err(Error::BudgetExceedsGroundSet { .. })));
    }

    #[test]
    fn greedy_sum_partition_reaches_basis() {
        let c = ConstraintSpec::partition(3, vec![vec![0, 1], vec![2]], vec![1, 1]).unwrap();
        let inst = three(1.0).with_constraint(c).unwrap();
        let r = greedy_sum(&inst).unwrap();
        // 0 first, then 2 (1 is blocked by the cap on {0, 1})
        assert_eq!(r.best.to_vec(), vec![0, 2]);
        assert_eq!(r.evaluations, 3 + 1);
    }

    #[test]
    fn greedy_sum_zero_lambda_is_quality_greedy() {
        let r = greedy_sum(&three(0.0)).unwrap();
        assert_eq!(r.best.to_vec(), vec![0, 1]);
    }

    fn square(weights: Vec<f64>, kind: DiversityKind, k: usize, lambda: f64) -> Instance {
        // four items; 1 and 3 are the far pair
        let d = DistanceMatrix::new(
            4,
            vec![
                0.0, 1.0, 1.0, 1.5, //
                1.0, 0.0, 1.0, 1.9, //
                1.0, 1.0, 0.0, 1.0, //
                1.5, 1.9, 1.0, 0.0,
            ],
        )
        .unwrap();
        Instance::new(
            Quality::Modular(ModularQuality::new(weights).unwrap()),
            d,
            lambda,
            kind,
            ConstraintSpec::exactly(k),
        )
        .unwrap()
    }

    #[test]
    fn greedy_min_zero_quality_pair() {
        let inst = square(vec![0.0; 4], DiversityKind::Min, 2, 1.0);
        let r = greedy_min(&inst).unwrap();
        // first pick 0, farthest from 0 is 3
        assert_eq!(r.best.to_vec(), vec![0, 3]);
        assert!((r.objective - 1.5).abs() < 1e-12);
        assert_eq!(r.evaluations, 2 * greedy_evaluations(4, 2) + 2);
    }

    #[test]
    fn greedy_min_zero_lambda_keeps_quality_chain() {
        let inst = square(vec![0.1, 0.9, 0.8, 0.2], DiversityKind::Min, 2, 0.0);
        let r = greedy_min(&inst).unwrap();
        assert_eq!(r.best.to_vec(), vec![1, 2]);
    }

    #[test]
    fn greedy_min_uniform_distances_prefers_quality_chain() {
        let d = DistanceMatrix::from_fn(5, |_, _| 1.0).unwrap();
        let inst = Instance::new(
            Quality::Modular(ModularQuality::new(vec![0.0, 0.0, 0.0, 0.5, 0.0]).unwrap()),
            d,
            1.0,
            DiversityKind::Min,
            ConstraintSpec::exactly(2),
        )
        .unwrap();
        let r = greedy_min(&inst).unwrap();
        assert_eq!(r.best.to_vec(), vec![0, 3]);
        let inst = inst.with_lambda(0.5).unwrap();
        assert!(greedy_min(&inst).unwrap().best.contains(3));
    }

    #[test]
    fn greedy_mst_steps() {
        let inst = square(vec![0.0, 0.0, 0.3, 0.0], DiversityKind::Mst, 2, 1.0);
        let r = greedy_mst(&inst).unwrap();
        // step 1 is pure quality, step 2 the farthest item from 2
        assert_eq!(r.best.to_vec(), vec![0, 2]);
        let inst = square(vec![0.0; 4], DiversityKind::Mst, 2, 1.0);
        let r = greedy_mst(&inst).unwrap();
        assert_eq!(r.best.to_vec(), vec![0, 3]);
    }

    #[test]
    fn kinds_are_checked() {
        let inst = square(vec![0.0; 4], DiversityKind::Mst, 2, 1.0);
        assert!(greedy_sum(&inst).is_err());
        assert!(greedy_min(&inst).is_err());
    }
}
