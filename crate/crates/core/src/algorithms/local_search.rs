//! Best-improvement swap local search over bases of the constraint.

use super::{Budget, RunResult, Start, Tracer};
use crate::error::{Error, Result};
use crate::instance::{DiversityKind, Instance};
use crate::objectives::{objective_value, sum_diversity, EvaluationCounter, QualityOracle};
use crate::subset::{ItemId, Subset};

/// Relative slack under which two objective values count as equal.
const IMPROVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSearchConfig {
    pub start: Start,
    /// A move is taken only if it beats the current value by a factor `1 + epsilon`.
    pub epsilon: f64,
    /// 1 for single swaps, 2 to also try exchanging two pairs at once.
    pub max_swaps: u8,
    /// `None` runs until a local optimum.
    pub budget: Option<Budget>,
    pub trace_stride: u64,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        Self {
            start: Start::Cold,
            epsilon: 0.0,
            max_swaps: 1,
            budget: None,
            trace_stride: 0,
        }
    }
}

struct Candidate {
    value: f64,
    outs: [ItemId; 2],
    ins: [ItemId; 2],
    width: usize,
}

/// Local search for `f + λ·sum_div` under the instance's matroid constraint.
///
/// A cold start takes the best feasible pair `argmax f({u,v}) + λ·d(u,v)` (or
/// the best singleton when no pair is independent) and extends it to a basis
/// in ascending index order; a warm start extends the given set the same way.
/// Each sweep scans the whole swap neighbourhood, one evaluation per
/// candidate, and applies the best move if it clears the `epsilon`
/// threshold. When the evaluation budget runs out mid-sweep the best move found
/// so far is still applied.
pub fn local_search(inst: &Instance, cfg: &LocalSearchConfig) -> Result<RunResult> {
    if inst.diversity() != DiversityKind::Sum {
        return Err(Error::Unsupported("local search needs a sum-diversity instance".into()));
    }
    if !(cfg.epsilon >= 0.0 && cfg.epsilon.is_finite()) {
        return Err(Error::InvalidBudget(format!("epsilon = {} must be >= 0", cfg.epsilon)));
    }
    if !matches!(cfg.max_swaps, 1 | 2) {
        return Err(Error::InvalidBudget(format!(
            "max_swaps = {} must be 1 or 2",
            cfg.max_swaps
        )));
    }
    if let Some(Budget::Iterations(0) | Budget::Evaluations(0)) = cfg.budget {
        return Err(Error::InvalidBudget("local search budget must be positive".into()));
    }
    let c = inst.constraint();
    let n = inst.n();
    let d = inst.distance();
    let lambda = inst.lambda();
    let q = inst.quality();
    let mut counter = EvaluationCounter::new();
    let mut tracer = Tracer::new(cfg.trace_stride);

    let seed = match &cfg.start {
        Start::Warm(x) => {
            if x.universe() != n {
                return Err(Error::DimensionMismatch(format!(
                    "warm start over {} items, instance has {n}",
                    x.universe()
                )));
            }
            if !c.is_independent(x) {
                return Err(Error::NotIndependent);
            }
            x.clone()
        }
        Start::Cold => best_pair(inst, &mut counter),
    };
    let mut x = c.extend_to_basis_ascending(&seed)?;
    let mut current = objective_value(&x, inst);
    tracer.record(counter.count(), current);

    let eval_cap = match cfg.budget {
        Some(Budget::Evaluations(t)) => t,
        _ => u64::MAX,
    };
    let sweep_cap = match cfg.budget {
        Some(Budget::Iterations(t)) => t,
        _ => u64::MAX,
    };
    let mut sweeps = 0;
    let mut attach = vec![0.0; n];
    while sweeps < sweep_cap && counter.count() < eval_cap {
        sweeps += 1;
        let div = sum_diversity(&x, d);
        for (u, a) in attach.iter_mut().enumerate() {
            *a = x.iter().map(|v| d.get(u, v)).sum();
        }
        let threshold = current * (1.0 + cfg.epsilon) + IMPROVE_TOL * current.abs().max(1.0);
        let mut best: Option<Candidate> = None;
        let mut trial = x.clone();
        let mut consider = |value: f64, outs: [ItemId; 2], ins: [ItemId; 2], width: usize| {
            if value > threshold && best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(Candidate { value, outs, ins, width });
            }
        };

        let mut exhausted = false;
        'scan: {
            for (o, i) in c.feasible_swaps(&x)? {
                if counter.count() >= eval_cap {
                    exhausted = true;
                    break 'scan;
                }
                counter.charge(1);
                trial.remove(o);
                trial.insert(i);
                let value = q.value(&trial) + lambda * (div + attach[i] - d.get(i, o) - attach[o]);
                trial.remove(i);
                trial.insert(o);
                consider(value, [o, o], [i, i], 1);
            }
            if cfg.max_swaps == 2 {
                let members = x.to_vec();
                let others: Vec<ItemId> = x.complement_iter().collect();
                for (a, &o1) in members.iter().enumerate() {
                    for &o2 in &members[a + 1..] {
                        for (b, &i1) in others.iter().enumerate() {
                            for &i2 in &others[b + 1..] {
                                if !c.exchange_independent(&x, &[o1, o2], &[i1, i2]) {
                                    continue;
                                }
                                if counter.count() >= eval_cap {
                                    exhausted = true;
                                    break 'scan;
                                }
                                counter.charge(1);
                                for v in [o1, o2] {
                                    trial.remove(v);
                                }
                                for v in [i1, i2] {
                                    trial.insert(v);
                                }
                                let gained = attach[i1] + attach[i2]
                                    - d.get(i1, o1)
                                    - d.get(i1, o2)
                                    - d.get(i2, o1)
                                    - d.get(i2, o2)
                                    + d.get(i1, i2);
                                let lost = attach[o1] + attach[o2] - d.get(o1, o2);
                                let value = q.value(&trial) + lambda * (div + gained - lost);
                                for v in [i1, i2] {
                                    trial.remove(v);
                                }
                                for v in [o1, o2] {
                                    trial.insert(v);
                                }
                                consider(value, [o1, o2], [i1, i2], 2);
                            }
                        }
                    }
                }
            }
        }

        let Some(mv) = best else {
            tracer.record(counter.count(), current);
            break;
        };
        for &o in &mv.outs[..mv.width] {
            x.remove(o);
        }
        for &i in &mv.ins[..mv.width] {
            x.insert(i);
        }
        debug_assert!(c.is_independent(&x));
        current = objective_value(&x, inst);
        tracer.record(counter.count(), current);
        if exhausted {
            break;
        }
    }

    Ok(RunResult {
        objective: current,
        feasible: c.is_feasible_final(&x),
        best: x,
        perm: None,
        evaluations: counter.count(),
        trace_stride: tracer.stride(),
        trace: tracer.finish(),
    })
}

/// `argmax_{u<v, {u,v}∈F} f({u,v}) + λ·d(u,v)`, falling back to the best
/// singleton (or `∅`) when the rank is below 2.
fn best_pair(inst: &Instance, counter: &mut EvaluationCounter) -> Subset {
    let n = inst.n();
    let c = inst.constraint();
    let mut best: Option<(f64, Subset)> = None;
    let mut pair = Subset::empty(n);
    for u in 0..n {
        pair.insert(u);
        for v in u + 1..n {
            pair.insert(v);
            if c.is_independent(&pair) {
                counter.charge(1);
                let value = objective_value(&pair, inst);
                if best.as_ref().is_none_or(|(b, _)| value > *b) {
                    best = Some((value, pair.clone()));
                }
            }
            pair.remove(v);
        }
        pair.remove(u);
    }
    if let Some((_, x)) = best {
        return x;
    }
    for u in 0..n {
        pair.insert(u);
        if c.is_independent(&pair) {
            counter.charge(1);
            let value = objective_value(&pair, inst);
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, pair.clone()));
            }
        }
        pair.remove(u);
    }
    best.map_or_else(|| Subset::empty(n), |(_, x)| x)
}
