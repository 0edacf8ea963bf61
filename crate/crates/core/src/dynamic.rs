//! Objective perturbations and warm-started re-optimization.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::algorithms::{gsemo, local_search, Budget, LocalSearchConfig, RunConfig, Start};
use crate::error::{Error, Result};
use crate::formulations::Formulation;
use crate::instance::Instance;
use crate::objectives::{ModularQuality, Quality};
use crate::rng::RngStream;
use crate::subset::{ItemId, Subset};

/// One random change to the objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Perturbation {
    /// New weight in `[0, 1]` for one item.
    RelevanceReset { item: ItemId, weight: f64 },
    /// New distance in `[1, 2]` for one unordered pair.
    DistanceReset { i: ItemId, j: ItemId, distance: f64 },
}

/// A fixed sequence of change batches and the evaluation budget granted to each
/// algorithm after every change.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicSchedule {
    pub batches: Vec<Vec<Perturbation>>,
    pub t: u64,
}

impl DynamicSchedule {
    /// Draws `changes` batches of `m` perturbations each for `inst`.
    pub fn sample(
        stream: RngStream,
        inst: &Instance,
        changes: usize,
        m: usize,
        t: u64,
    ) -> Result<Self> {
        if m == 0 || t == 0 {
            return Err(Error::InvalidBudget(format!(
                "dynamic schedule needs m >= 1 and t >= 1, got m = {m}, t = {t}"
            )));
        }
        let mut rng = stream.rng();
        let batches = (0..changes)
            .map(|_| sample_change(&mut rng, inst, m))
            .collect::<Result<_>>()?;
        Ok(Self { batches, t })
    }
}

fn check_domain(inst: &Instance) -> Result<()> {
    if !matches!(inst.quality(), Quality::Modular(_)) {
        return Err(Error::Unsupported("perturbations need a modular quality".into()));
    }
    if inst.n() < 2 {
        return Err(Error::Unsupported("perturbations need at least two items".into()));
    }
    match inst.distance().off_diagonal_range() {
        Some((lo, hi)) if lo >= 1.0 && hi <= 2.0 => Ok(()),
        _ => Err(Error::Unsupported(
            "perturbations need all distances in [1, 2]".into(),
        )),
    }
}

/// `m` independent perturbations: a fair coin picks the kind, then the item
/// (or unordered pair) and the new value are uniform.
pub fn sample_change<R: Rng + ?Sized>(rng: &mut R, inst: &Instance, m: usize) -> Result<Vec<Perturbation>> {
    check_domain(inst)?;
    let n = inst.n();
    Ok((0..m)
        .map(|_| {
            if rng.random_bool(0.5) {
                Perturbation::RelevanceReset {
                    item: rng.random_range(0..n),
                    weight: rng.random_range(0.0..=1.0),
                }
            } else {
                let i = rng.random_range(0..n);
                let mut j = rng.random_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                Perturbation::DistanceReset {
                    i: i.min(j),
                    j: i.max(j),
                    distance: rng.random_range(1.0..=2.0),
                }
            }
        })
        .collect())
}

/// The instance after `batch`, applied in order. Unchanged parts stay shared.
pub fn apply(inst: &Instance, batch: &[Perturbation]) -> Result<Instance> {
    let mut weights: Option<ModularQuality> = None;
    let mut pairs = Vec::new();
    for p in batch {
        match *p {
            Perturbation::RelevanceReset { item, weight } => {
                if item >= inst.n() || !(0.0..=1.0).contains(&weight) {
                    return Err(Error::Inconsistent(format!("invalid relevance reset {p:?}")));
                }
                let q = match (&mut weights, inst.quality()) {
                    (Some(q), _) => q,
                    (None, Quality::Modular(q)) => weights.insert(q.clone()),
                    (None, Quality::TopPMi(_)) => {
                        return Err(Error::Unsupported(
                            "relevance resets need a modular quality".into(),
                        ))
                    }
                };
                q.set_weight(item, weight);
            }
            Perturbation::DistanceReset { i, j, distance } => {
                if i == j || !(1.0..=2.0).contains(&distance) {
                    return Err(Error::Inconsistent(format!("invalid distance reset {p:?}")));
                }
                pairs.push((i, j, distance));
            }
        }
    }
    let quality = match weights {
        Some(q) => Arc::new(Quality::Modular(q)),
        None => inst.quality_arc().clone(),
    };
    let distance = if pairs.is_empty() {
        inst.distance_arc().clone()
    } else {
        Arc::new(inst.distance().with_pairs(&pairs)?)
    };
    inst.with_parts(quality, distance)
}

/// An algorithm taking part in the dynamic protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicAlgorithm {
    Gsemo(Formulation),
    LocalSearch { max_swaps: u8 },
}

impl DynamicAlgorithm {
    pub fn name(&self) -> String {
        match self {
            Self::Gsemo(f) => format!("gsemo-{}", f.name()),
            Self::LocalSearch { max_swaps: 1 } => "local-search".into(),
            Self::LocalSearch { max_swaps } => format!("local-search-{max_swaps}swap"),
        }
    }
}

/// Outcome of one algorithm after one change.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicRecord {
    pub change_index: usize,
    pub algorithm: String,
    pub objective: f64,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicRun {
    pub records: Vec<DynamicRecord>,
    /// Final solution of each algorithm, in input order.
    pub solutions: Vec<Subset>,
    /// The instance after the last change.
    pub instance: Instance,
}

/// Applies each batch in turn; after every change each algorithm resumes from
/// its own previous solution (initially `initial`) with `t` evaluations.
///
/// GSEMO is seeded with the previous solution alone. Local search stops early
/// at a local optimum, so it may use fewer than `t` evaluations.
pub fn run_dynamic(
    inst0: &Instance,
    schedule: &DynamicSchedule,
    algorithms: &[DynamicAlgorithm],
    initial: &Subset,
    stream: RngStream,
) -> Result<DynamicRun> {
    if schedule.t == 0 {
        return Err(Error::InvalidBudget("t must cover at least one GSEMO iteration".into()));
    }
    if !inst0.constraint().is_independent(initial) {
        return Err(Error::NotIndependent);
    }
    let mut inst = inst0.clone();
    let mut solutions = vec![initial.clone(); algorithms.len()];
    let mut records = Vec::with_capacity(schedule.batches.len() * algorithms.len());
    for (change_index, batch) in schedule.batches.iter().enumerate() {
        inst = apply(&inst, batch)?;
        for (alg, sol) in algorithms.iter().zip(solutions.iter_mut()) {
            let start = Start::Warm(sol.clone());
            let result = match *alg {
                DynamicAlgorithm::Gsemo(form) => {
                    let label = format!("{}#{change_index}", alg.name());
                    let cfg = RunConfig::new(Budget::Evaluations(schedule.t), stream.derive(&label));
                    gsemo(&inst, form, &cfg, &start)?
                }
                DynamicAlgorithm::LocalSearch { max_swaps } => {
                    let cfg = LocalSearchConfig {
                        start,
                        max_swaps,
                        budget: Some(Budget::Evaluations(schedule.t)),
                        ..Default::default()
                    };
                    local_search(&inst, &cfg)?
                }
            };
            assert!(
                inst.constraint().is_independent(&result.best),
                "constraints never change, so warm starts stay feasible"
            );
            records.push(DynamicRecord {
                change_index,
                algorithm: alg.name(),
                objective: result.objective,
                evaluations: result.evaluations,
            });
            *sol = result.best;
        }
    }
    Ok(DynamicRun {
        records,
        solutions,
        instance: inst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::greedy_sum;
    use crate::constraints::ConstraintSpec;
    use crate::distance::DistanceMatrix;
    use crate::instance::DiversityKind;
    use crate::objectives::{objective_value, ModularQuality, QualityOracle};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn web(n: usize, k: usize, seed: u64) -> Instance {
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
    fn relevance_only_batch() {
        let inst = web(6, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // find a draw that resets a relevance
        let batch = loop {
            let b = sample_change(&mut rng, &inst, 1).unwrap();
            if matches!(b[0], Perturbation::RelevanceReset { .. }) {
                break b;
            }
        };
        let Perturbation::RelevanceReset { item, weight } = batch[0] else { unreachable!() };
        assert!((0.0..=1.0).contains(&weight));
        let next = apply(&inst, &batch).unwrap();
        let mut x = Subset::empty(6);
        x.insert(item);
        let old_w = inst.quality().value(&x);
        let delta = objective_value(&x, &next) - objective_value(&x, &inst);
        assert!((delta - (weight - old_w)).abs() < 1e-12);
    }

    #[test]
    fn batches_keep_metric_and_are_reproducible() {
        let inst = web(10, 3, 2);
        let s1 = DynamicSchedule::sample(RngStream::new(4, 0), &inst, 5, 7, 10).unwrap();
        let s2 = DynamicSchedule::sample(RngStream::new(4, 0), &inst, 5, 7, 10).unwrap();
        assert_eq!(s1, s2);
        let mut cur = inst;
        for b in &s1.batches {
            assert_eq!(b.len(), 7);
            cur = apply(&cur, b).unwrap();
            assert!(cur.distance().is_metric());
        }
    }

    #[test]
    fn distance_reset_is_symmetric() {
        let inst = web(5, 2, 3);
        let batch = [Perturbation::DistanceReset { i: 1, j: 3, distance: 1.25 }];
        let next = apply(&inst, &batch).unwrap();
        assert_eq!(next.distance().get(1, 3), 1.25);
        assert_eq!(next.distance().get(3, 1), 1.25);
        // untouched original
        assert_ne!(inst.distance().get(1, 3), 1.25);
    }

    #[test]
    fn empty_batch_is_identity() {
        let inst = web(5, 2, 3);
        assert_eq!(apply(&inst, &[]).unwrap(), inst);
    }

    #[test]
    fn domain_checks() {
        let inst = web(5, 2, 3);
        let far = inst
            .with_parts(inst.quality_arc().clone(), Arc::new(DistanceMatrix::from_fn(5, |_, _| 3.0).unwrap()))
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_change(&mut rng, &far, 1).is_err());
        assert!(DynamicSchedule::sample(RngStream::new(1, 1), &inst, 1, 0, 5).is_err());
    }

    #[test]
    fn no_changes_means_no_records() {
        let inst = web(8, 3, 4);
        let g = greedy_sum(&inst).unwrap();
        let schedule = DynamicSchedule { batches: vec![], t: 10 };
        let algs = [DynamicAlgorithm::Gsemo(Formulation::MatroidSum), DynamicAlgorithm::LocalSearch { max_swaps: 1 }];
        let run = run_dynamic(&inst, &schedule, &algs, &g.best, RngStream::new(0, 0)).unwrap();
        assert!(run.records.is_empty());
        assert!(run.solutions.iter().all(|s| *s == g.best));
    }

    #[test]
    fn noop_change_keeps_local_optimum() {
        let inst = web(9, 3, 5);
        let ls = local_search(&inst, &LocalSearchConfig::default()).unwrap();
        let w = match inst.quality() {
            Quality::Modular(q) => q.weight(0),
            _ => unreachable!(),
        };
        let schedule = DynamicSchedule {
            batches: vec![vec![Perturbation::RelevanceReset { item: 0, weight: w }]],
            t: 500,
        };
        let algs = [DynamicAlgorithm::LocalSearch { max_swaps: 1 }];
        let run = run_dynamic(&inst, &schedule, &algs, &ls.best, RngStream::new(0, 0)).unwrap();
        assert_eq!(run.solutions[0], ls.best);
    }

    #[test]
    fn budgets_are_audited() {
        let inst = web(12, 3, 6);
        let g = greedy_sum(&inst).unwrap();
        let schedule = DynamicSchedule::sample(RngStream::new(8, 1), &inst, 4, 3, 360).unwrap();
        let algs = [DynamicAlgorithm::Gsemo(Formulation::MatroidSum), DynamicAlgorithm::LocalSearch { max_swaps: 1 }];
        let run = run_dynamic(&inst, &schedule, &algs, &g.best, RngStream::new(3, 3)).unwrap();
        assert_eq!(run.records.len(), 8);
        for r in &run.records {
            if r.algorithm.starts_with("gsemo") {
                assert_eq!(r.evaluations, 360);
            } else {
                assert!(r.evaluations <= 360);
            }
        }
        for s in &run.solutions {
            assert!(inst.constraint().is_independent(s));
        }
    }
}
