//! GSEMO: uniform parent selection, bit-wise mutation, Pareto archive update.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{require_k, Budget, Population, RunConfig, RunResult, Start, Tracer};
use crate::error::{Error, Result};
use crate::formulations::{
    extract_final, mutate_permutation, offspring_feasible, Formulation, Individual,
};
use crate::instance::{DiversityKind, Instance};
use crate::objectives::{objective_value, EvaluationCounter};
use crate::rng::RngStream;
use crate::subset::ItemId;

/// Positions flipped by bit-wise mutation with rate `1/n`, in ascending order.
///
/// Draws geometric gaps between flips instead of `n` coin tosses.
fn flip_positions(rng: &mut ChaCha8Rng, n: usize, out: &mut Vec<ItemId>) {
    out.clear();
    if n == 0 {
        return;
    }
    if n == 1 {
        out.push(0);
        return;
    }
    let log_q = (1.0 - 1.0 / n as f64).ln();
    let mut pos = 0usize;
    loop {
        // u in (0, 1]
        let u: f64 = 1.0 - rng.random::<f64>();
        let gap = (u.ln() / log_q).floor();
        if gap >= (n - pos) as f64 {
            return;
        }
        pos += gap as usize;
        out.push(pos);
        pos += 1;
        if pos >= n {
            return;
        }
    }
}

/// Runs GSEMO on `form` for the configured number of iterations.
///
/// Every iteration costs one evaluation, including offspring discarded as
/// infeasible. The cold start seeds the archive with `∅`; a warm start seeds it
/// with the given solution only. Neither seed is charged.
pub fn gsemo(inst: &Instance, form: Formulation, cfg: &RunConfig, start: &Start) -> Result<RunResult> {
    form.check(inst)?;
    let n = inst.n();
    let iterations = cfg.budget.amount();
    let mut scratch = EvaluationCounter::new();
    let seed = match start {
        Start::Cold => Individual::empty(form, inst),
        Start::Warm(x) => {
            if x.universe() != n {
                return Err(Error::DimensionMismatch(format!(
                    "warm start over {} items, instance has {n}",
                    x.universe()
                )));
            }
            if !offspring_feasible(form, x, inst) {
                return Err(Error::NotIndependent);
            }
            let perm = form.uses_permutation().then(|| x.to_vec());
            Individual::evaluated(form, x.clone(), perm, inst, &mut scratch)?
        }
    };
    let mut pop = Population::new(seed);
    let mut rng = cfg.stream.rng();
    let mut counter = EvaluationCounter::new();
    let mut tracer = Tracer::new(cfg.trace_stride);
    tracer.record(0, extract_final(form, pop.members(), inst).objective);
    let check = cfg.check_invariants || cfg!(debug_assertions);
    let size_cap = match (form, inst.k()) {
        (Formulation::MatroidSum, _) | (_, None) => None,
        (_, Some(k)) => Some(k),
    };
    let mut flips = Vec::new();

    for _ in 0..iterations {
        let parent = pop.get(rng.random_range(0..pop.len()));
        flip_positions(&mut rng, n, &mut flips);
        let size = flips.iter().fold(parent.subset.len() as isize, |s, &v| {
            if parent.subset.contains(v) {
                s - 1
            } else {
                s + 1
            }
        }) as usize;
        let keep = if size_cap.is_some_and(|k| size > k) {
            None
        } else {
            let mut child = parent.subset.clone();
            for &v in &flips {
                child.toggle(v);
            }
            offspring_feasible(form, &child, inst).then(|| {
                let perm = parent.perm.as_deref().map(|p| mutate_permutation(p, &child));
                (child, perm)
            })
        };
        let changed = match keep {
            Some((child, perm)) => {
                let ind = Individual::evaluated(form, child, perm, inst, &mut counter)?;
                pop.offer(ind)
            }
            None => {
                counter.charge(1);
                false
            }
        };
        if check && changed {
            if let Err(e) = pop.check_invariants(form, inst) {
                panic!("population invariant broken: {e}");
            }
        }
        if tracer.due(counter.count()) {
            tracer.record(counter.count(), extract_final(form, pop.members(), inst).objective);
        }
    }

    let out = extract_final(form, pop.members(), inst);
    tracer.record(counter.count(), out.objective);
    Ok(RunResult {
        best: out.subset,
        perm: out.perm,
        objective: out.objective,
        evaluations: counter.count(),
        feasible: out.feasible,
        trace_stride: tracer.stride(),
        trace: tracer.finish(),
    })
}

/// Two GSEMO runs for min-diversity: the quality phase for `t1` iterations and
/// the diversity phase for `t2`, on independent streams. Returns the better
/// of the two extracted solutions under `f + λ·min_div`, preferring the
/// quality phase on ties or when the diversity phase has no size-`k` member.
pub fn gsemo_min_pipeline(
    inst: &Instance,
    t1: u64,
    t2: u64,
    stream: RngStream,
    trace_stride: u64,
) -> Result<RunResult> {
    if inst.diversity() != DiversityKind::Min {
        return Err(Error::Unsupported("the min pipeline needs a min-diversity instance".into()));
    }
    require_k(inst, "the min pipeline")?;
    let phase = |form, t, label| {
        let cfg = RunConfig::new(Budget::Iterations(t), stream.derive(label))
            .with_trace_stride(trace_stride);
        gsemo(inst, form, &cfg, &Start::Cold)
    };
    let a = phase(Formulation::MinQualityPhase, t1, "quality-phase")?;
    let b = phase(Formulation::MinDiversityPhase, t2, "diversity-phase")?;

    let mut tracer = Tracer::new(trace_stride);
    for p in &a.trace {
        tracer.record(p.evaluations, p.best);
    }
    let a_best = a.objective;
    for p in &b.trace {
        let value = if b.feasible || p.evaluations == 0 { p.best } else { f64::NEG_INFINITY };
        tracer.record(a.evaluations + p.evaluations, value.max(a_best));
    }
    let evaluations = a.evaluations + b.evaluations;
    let winner = if b.feasible && b.objective > a.objective { b } else { a };
    debug_assert!((objective_value(&winner.best, inst) - winner.objective).abs() < 1e-9);
    tracer.record(evaluations, winner.objective);
    Ok(RunResult {
        evaluations,
        trace_stride: trace_stride,
        trace: tracer.finish(),
        best: winner.best,
        perm: None,
        objective: winner.objective,
        feasible: winner.feasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subset::Subset;
    use crate::constraints::ConstraintSpec;
    use crate::distance::DistanceMatrix;
    use crate::objectives::{ModularQuality, Quality};
    use rand::SeedableRng;

    #[test]
    fn flip_rate_is_one_over_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut out = Vec::new();
        let n = 20;
        let trials = 200_000;
        let mut hits = vec![0u32; n];
        let mut zero = 0;
        for _ in 0..trials {
            flip_positions(&mut rng, n, &mut out);
            assert!(out.windows(2).all(|w| w[0] < w[1]));
            zero += out.is_empty() as u32;
            for &v in &out {
                hits[v] += 1;
            }
        }
        for h in hits {
            let rate = h as f64 / trials as f64;
            assert!((rate - 0.05).abs() < 0.003, "rate {rate}");
        }
        // P(no flip) = (1 - 1/n)^n
        let p0 = zero as f64 / trials as f64;
        assert!((p0 - 0.95f64.powi(20)).abs() < 0.005);
    }

    fn small(n: usize, k: usize, seed: u64) -> Instance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = (0..n).map(|_| rng.random()).collect();
        let d = DistanceMatrix::from_fn(n, |_, _| rng.random_range(1.0..2.0)).unwrap();
        Instance::new(
            Quality::Modular(ModularQuality::new(w).unwrap()),
            d,
            1.0,
            DiversityKind::Sum,
            ConstraintSpec::at_most(k),
        )
        .unwrap()
    }

    #[test]
    fn single_item() {
        let inst = Instance::new(
            Quality::Modular(ModularQuality::new(vec![0.7]).unwrap()),
            DistanceMatrix::new(1, vec![0.0]).unwrap(),
            0.0,
            DiversityKind::Sum,
            ConstraintSpec::at_most(1),
        )
        .unwrap();
        let cfg = RunConfig::new(Budget::Iterations(10), RngStream::new(1, 0));
        let r = gsemo(&inst, Formulation::ScaledCardinalitySum, &cfg, &Start::Cold).unwrap();
        assert_eq!(r.best.to_vec(), vec![0]);
        assert_eq!(r.objective, 0.7);
        assert_eq!(r.evaluations, 10);
    }

    #[test]
    fn deterministic_under_fixed_stream() {
        let inst = small(12, 3, 4);
        let cfg = RunConfig::new(Budget::Iterations(2000), RngStream::new(9, 3)).with_trace_stride(50);
        let a = gsemo(&inst, Formulation::ScaledCardinalitySum, &cfg, &Start::Cold).unwrap();
        let b = gsemo(&inst, Formulation::ScaledCardinalitySum, &cfg, &Start::Cold).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.evaluations, 2000);
        assert!(a.trace.windows(2).all(|w| w[0].evaluations < w[1].evaluations && w[0].best <= w[1].best));
        assert_eq!(a.trace.len(), 2000 / 50 + 1);
    }

    #[test]
    fn long_run_finds_optimum() {
        let inst = small(8, 3, 5);
        let mut opt = 0.0f64;
        for mask in 0u64..256 {
            let x = Subset::from_mask(8, mask);
            if x.len() <= 3 {
                opt = opt.max(objective_value(&x, &inst));
            }
        }
        let cfg = RunConfig::new(Budget::Iterations(200_000), RngStream::new(2, 0));
        let r = gsemo(&inst, Formulation::PlainCardinalitySum, &cfg, &Start::Cold).unwrap();
        assert!((r.objective - opt).abs() < 1e-9);
    }

    #[test]
    fn warm_start_must_be_feasible() {
        let inst = small(6, 2, 1);
        let cfg = RunConfig::new(Budget::Iterations(5), RngStream::new(2, 0));
        let big = Start::Warm(Subset::from_items(6, [0, 1, 2]).unwrap());
        assert!(gsemo(&inst, Formulation::ScaledCardinalitySum, &cfg, &big).is_err());
        let ok = Start::Warm(Subset::from_items(6, [0, 1]).unwrap());
        let r = gsemo(&inst, Formulation::MatroidSum, &cfg, &ok).unwrap();
        assert!(r.objective >= objective_value(&Subset::from_items(6, [0, 1]).unwrap(), &inst));
    }

    #[test]
    fn pipeline_sums_budgets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 10;
        let w = (0..n).map(|_| rng.random()).collect();
        let d = DistanceMatrix::from_fn(n, |_, _| rng.random_range(1.0..2.0)).unwrap();
        let inst = Instance::new(
            Quality::Modular(ModularQuality::new(w).unwrap()),
            d,
            1.0,
            DiversityKind::Min,
            ConstraintSpec::exactly(3),
        )
        .unwrap();
        let r = gsemo_min_pipeline(&inst, 400, 300, RngStream::new(1, 1), 0).unwrap();
        assert_eq!(r.evaluations, 700);
        assert_eq!(r.best.len(), 3);
        assert!(r.feasible);
        let zero = inst.with_lambda(0.0).unwrap();
        let r0 = gsemo_min_pipeline(&zero, 400, 300, RngStream::new(1, 1), 0).unwrap();
        let cfg = RunConfig::new(Budget::Iterations(400), RngStream::new(1, 1).derive("quality-phase"));
        let q = gsemo(&zero, Formulation::MinQualityPhase, &cfg, &Start::Cold).unwrap();
        assert_eq!(r0.best, q.best);
    }
}
