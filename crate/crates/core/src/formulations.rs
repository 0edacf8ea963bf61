//! Bi-objective reformulations maximized by GSEMO, Pareto domination, and
//! extraction of the final solution from a population.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintSpec;
use crate::error::{Error, Result};
use crate::instance::{DiversityKind, Instance};
use crate::objectives::{
    diversity, min_diversity, objective_value, permutation_mst_proxy, sum_diversity,
    EvaluationCounter, QualityOracle, Score,
};
use crate::subset::{ItemId, Subset};

/// Which `(f1, f2)` pair GSEMO maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// `f1 = ½(1 + |x|/k)·f + λ·sum_div`, `f2 = -|x|`.
    ScaledCardinalitySum,
    /// `f1 = f + λ·div`, `f2 = -|x|`.
    PlainCardinalitySum,
    /// `f1 = f`, `f2 = -|x|`.
    MinQualityPhase,
    /// `f1 = min_div` (`+∞` for `|x| <= 1`), `f2 = |x|`.
    MinDiversityPhase,
    /// `f1 = f + λ·proxy(perm)`, `f2 = -|x|`.
    MstPermutation,
    /// `f1 = f + λ·sum_div`, `f2 = |x|`.
    MatroidSum,
}

impl Formulation {
    pub const ALL: [Formulation; 6] = [
        Self::ScaledCardinalitySum,
        Self::PlainCardinalitySum,
        Self::MinQualityPhase,
        Self::MinDiversityPhase,
        Self::MstPermutation,
        Self::MatroidSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ScaledCardinalitySum => "scaled",
            Self::PlainCardinalitySum => "plain",
            Self::MinQualityPhase => "min-quality",
            Self::MinDiversityPhase => "min-diversity",
            Self::MstPermutation => "mst-perm",
            Self::MatroidSum => "matroid",
        }
    }

    pub fn uses_permutation(self) -> bool {
        self == Self::MstPermutation
    }

    fn needs_cardinality(self) -> bool {
        self != Self::MatroidSum
    }

    /// Checks that the formulation can run on `inst`.
    pub fn check(self, inst: &Instance) -> Result<()> {
        if self.needs_cardinality() && inst.k().is_none() {
            return Err(Error::Unsupported(format!(
                "formulation {} needs a cardinality constraint",
                self.name()
            )));
        }
        if self == Self::ScaledCardinalitySum && inst.k() == Some(0) {
            return Err(Error::InvalidBudget("scaled formulation needs k >= 1".into()));
        }
        Ok(())
    }

    /// `f2` as the population key.
    pub fn f2(self, size: usize) -> i64 {
        match self {
            Self::MinDiversityPhase | Self::MatroidSum => size as i64,
            _ => -(size as i64),
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown formulation `{s}`")))
    }
}

/// The objective vector `(f1, f2)`; `f1` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiObjectiveValue {
    pub f1: Score,
    pub f2: i64,
}

impl BiObjectiveValue {
    pub fn new(f1: impl Into<Score>, f2: i64) -> Self {
        Self { f1: f1.into(), f2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dominance {
    pub weak: bool,
    pub strict: bool,
    pub incomparable: bool,
}

/// Compares `a` against `b`: `weak` iff `a ⪰ b`, `strict` iff `a ≻ b`, and
/// `incomparable` iff neither weakly dominates the other.
pub fn dominates(a: &BiObjectiveValue, b: &BiObjectiveValue) -> Dominance {
    let ge1 = a.f1 >= b.f1;
    let gt1 = a.f1 > b.f1;
    let weak = ge1 && a.f2 >= b.f2;
    let strict = weak && (gt1 || a.f2 > b.f2);
    let back = b.f1 >= a.f1 && b.f2 >= a.f2;
    Dominance {
        weak,
        strict,
        incomparable: !weak && !back,
    }
}

/// A population member.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub subset: Subset,
    pub value: BiObjectiveValue,
    /// Insertion order of the members; only for [`Formulation::MstPermutation`].
    pub perm: Option<Vec<ItemId>>,
}

impl Individual {
    /// Evaluates `subset` (and `perm`) under `form`, charging one evaluation.
    pub fn evaluated(
        form: Formulation,
        subset: Subset,
        perm: Option<Vec<ItemId>>,
        inst: &Instance,
        counter: &mut EvaluationCounter,
    ) -> Result<Self> {
        let value = evaluate(form, &subset, perm.as_deref(), inst, counter)?;
        Ok(Self { subset, value, perm })
    }

    /// The empty solution with its `(f1, f2)`, not charged.
    pub fn empty(form: Formulation, inst: &Instance) -> Self {
        let perm = form.uses_permutation().then(Vec::new);
        let mut scratch = EvaluationCounter::new();
        Self::evaluated(form, Subset::empty(inst.n()), perm, inst, &mut scratch)
            .expect("empty set evaluates under every formulation")
    }
}

/// `(f1, f2)` of `x` under `form`; counts one evaluation.
pub fn evaluate(
    form: Formulation,
    x: &Subset,
    perm: Option<&[ItemId]>,
    inst: &Instance,
    counter: &mut EvaluationCounter,
) -> Result<BiObjectiveValue> {
    let size = x.len();
    let f2 = form.f2(size);
    let q = || inst.quality().value(x);
    let lambda = inst.lambda();
    let d = inst.distance();
    let f1 = match form {
        Formulation::ScaledCardinalitySum => {
            let k = inst.k().ok_or_else(|| {
                Error::Unsupported("scaled formulation needs a cardinality constraint".into())
            })?;
            Score::Finite(0.5 * (1.0 + size as f64 / k as f64) * q() + lambda * sum_diversity(x, d))
        }
        Formulation::PlainCardinalitySum => Score::Finite(q() + lambda * diversity(x, inst)),
        Formulation::MinQualityPhase => Score::Finite(q()),
        Formulation::MinDiversityPhase => min_diversity(x, d),
        Formulation::MstPermutation => {
            let perm = perm.ok_or_else(|| {
                Error::Inconsistent("mst-permutation formulation needs a permutation".into())
            })?;
            if perm.len() != size || perm.iter().any(|&v| !x.contains(v)) {
                return Err(Error::Inconsistent(
                    "permutation does not match the subset".into(),
                ));
            }
            Score::Finite(q() + lambda * permutation_mst_proxy(perm, d))
        }
        Formulation::MatroidSum => Score::Finite(q() + lambda * sum_diversity(x, d)),
    };
    counter.charge(1);
    Ok(BiObjectiveValue { f1, f2 })
}

/// Whether GSEMO keeps an offspring at all: `|x| <= k` for the cardinality
/// formulations, independence for [`Formulation::MatroidSum`].
pub fn offspring_feasible(form: Formulation, x: &Subset, inst: &Instance) -> bool {
    match (form, inst.constraint()) {
        (Formulation::MatroidSum, c) => c.is_independent(x),
        (_, ConstraintSpec::Cardinality { k, .. }) => x.len() <= *k,
        (_, c) => c.is_independent(x),
    }
}

/// The solution reported for a population.
#[derive(Debug, Clone, PartialEq)]
pub struct Extracted {
    pub subset: Subset,
    pub perm: Option<Vec<ItemId>>,
    /// `f(X) + λ·div(X)` under the instance's diversity measure.
    pub objective: f64,
    /// Whether `subset` satisfies the original constraint (including `|X| = k`
    /// in exact mode).
    pub feasible: bool,
}

fn pad_ascending(x: &Subset, k: usize) -> (Subset, Vec<ItemId>) {
    let mut padded = x.clone();
    let missing = k.saturating_sub(x.len());
    let added: Vec<ItemId> = x.complement_iter().take(missing).collect();
    for &v in &added {
        padded.insert(v);
    }
    (padded, added)
}

fn largest(population: &[Individual]) -> &Individual {
    // first of the largest size wins
    let mut best = &population[0];
    for ind in &population[1..] {
        if ind.subset.len() > best.subset.len() {
            best = ind;
        }
    }
    best
}

/// Picks the final solution out of a nonempty population.
///
/// Sum formulations return the best member by `f + λ·div`, preferring members
/// that are feasible for the original problem; ties go to the earlier member.
/// The min and mst phases take the largest member and pad it to `k` with the
/// lowest-index unselected items (the diversity phase does not pad and flags a
/// short result instead).
pub fn extract_final(form: Formulation, population: &[Individual], inst: &Instance) -> Extracted {
    assert!(!population.is_empty(), "extract_final on an empty population");
    let c = inst.constraint();
    let k = inst.k().unwrap_or(usize::MAX);
    match form {
        Formulation::ScaledCardinalitySum
        | Formulation::PlainCardinalitySum
        | Formulation::MatroidSum => {
            let any_feasible = population.iter().any(|i| c.is_feasible_final(&i.subset));
            let mut best: Option<(f64, &Individual)> = None;
            for ind in population {
                if any_feasible && !c.is_feasible_final(&ind.subset) {
                    continue;
                }
                let v = objective_value(&ind.subset, inst);
                if best.is_none_or(|(b, _)| v > b) {
                    best = Some((v, ind));
                }
            }
            let (objective, ind) = best.expect("population is nonempty");
            Extracted {
                subset: ind.subset.clone(),
                perm: ind.perm.clone(),
                objective,
                feasible: any_feasible,
            }
        }
        Formulation::MinQualityPhase | Formulation::MstPermutation => {
            let ind = largest(population);
            let (subset, added) = pad_ascending(&ind.subset, k);
            let perm = ind.perm.as_ref().map(|p| {
                let mut p = p.clone();
                p.extend(added);
                p
            });
            Extracted {
                objective: objective_value(&subset, inst),
                feasible: c.is_feasible_final(&subset),
                subset,
                perm,
            }
        }
        Formulation::MinDiversityPhase => {
            let ind = population
                .iter()
                .find(|i| i.subset.len() == k)
                .unwrap_or_else(|| largest(population));
            Extracted {
                subset: ind.subset.clone(),
                perm: ind.perm.clone(),
                objective: objective_value(&ind.subset, inst),
                feasible: c.is_feasible_final(&ind.subset),
            }
        }
    }
}

/// Offspring permutation: survivors keep their order, removed items drop out,
/// new items are appended in ascending index order.
pub fn mutate_permutation(parent: &[ItemId], offspring: &Subset) -> Vec<ItemId> {
    let mut perm: Vec<ItemId> = parent.iter().copied().filter(|&v| offspring.contains(v)).collect();
    let kept = perm.len();
    perm.extend(offspring.iter().filter(|v| !parent.contains(v)));
    debug_assert_eq!(perm.len(), offspring.len());
    debug_assert!(perm[kept..].windows(2).all(|w| w[0] < w[1]));
    perm
}

/// Whether `form` matches the instance's diversity measure in the sense used by
/// its theory (sum formulations on sum instances and so on).
pub fn natural_for(form: Formulation, kind: DiversityKind) -> bool {
    match form {
        Formulation::ScaledCardinalitySum | Formulation::MatroidSum => kind == DiversityKind::Sum,
        Formulation::PlainCardinalitySum => true,
        Formulation::MinQualityPhase | Formulation::MinDiversityPhase => kind == DiversityKind::Min,
        Formulation::MstPermutation => kind == DiversityKind::Mst,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::DistanceMatrix;
    use crate::objectives::{ModularQuality, Quality};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inst(n: usize, weights: Vec<f64>, kind: DiversityKind, c: ConstraintSpec) -> Instance {
        let d = DistanceMatrix::from_fn(n, |i, j| 1.0 + ((i * 7 + j * 3) % 5) as f64 / 5.0).unwrap();
        Instance::new(Quality::Modular(ModularQuality::new(weights).unwrap()), d, 1.0, kind, c)
            .unwrap()
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Instance {
        let w = (0..n).map(|_| rng.random()).collect();
        let d = DistanceMatrix::from_fn(n, |_, _| rng.random_range(1.0..2.0)).unwrap();
        Instance::new(
            Quality::Modular(ModularQuality::new(w).unwrap()),
            d,
            rng.random_range(0.0..2.0),
            DiversityKind::Sum,
            ConstraintSpec::at_most(k),
        )
        .unwrap()
    }

    #[test]
    fn scaled_singleton() {
        let i = inst(2, vec![0.5, 0.3], DiversityKind::Sum, ConstraintSpec::at_most(2));
        let mut c = EvaluationCounter::new();
        let x = Subset::from_items(2, [0]).unwrap();
        let v = evaluate(Formulation::ScaledCardinalitySum, &x, None, &i, &mut c).unwrap();
        assert_eq!(v, BiObjectiveValue::new(0.375, -1));
        assert_eq!(c.count(), 1);
    }

    #[test]
    fn empty_set_values() {
        let i = inst(4, vec![0.1; 4], DiversityKind::Min, ConstraintSpec::exactly(2));
        let mut c = EvaluationCounter::new();
        let e = Subset::empty(4);
        let v = evaluate(Formulation::MinDiversityPhase, &e, None, &i, &mut c).unwrap();
        assert_eq!(v, BiObjectiveValue { f1: Score::Infinite, f2: 0 });
        let v = evaluate(Formulation::MatroidSum, &e, None, &i, &mut c).unwrap();
        assert_eq!(v, BiObjectiveValue::new(0.0, 0));
    }

    #[test]
    fn mst_needs_permutation() {
        let i = inst(4, vec![0.1; 4], DiversityKind::Mst, ConstraintSpec::exactly(2));
        let mut c = EvaluationCounter::new();
        let x = Subset::from_items(4, [1, 2]).unwrap();
        assert!(evaluate(Formulation::MstPermutation, &x, None, &i, &mut c).is_err());
        assert!(evaluate(Formulation::MstPermutation, &x, Some(&[1, 3]), &i, &mut c).is_err());
        let v = evaluate(Formulation::MstPermutation, &x, Some(&[2, 1]), &i, &mut c).unwrap();
        let expect = 0.2 + i.distance().get(1, 2);
        assert!((v.f1.finite().unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn domination_examples() {
        let a = BiObjectiveValue::new(2.0, -1);
        let b = BiObjectiveValue::new(1.0, -2);
        assert!(dominates(&a, &b).strict);
        let c = BiObjectiveValue::new(2.0, -3);
        assert!(dominates(&c, &b).incomparable);
        let x = BiObjectiveValue { f1: Score::Infinite, f2: 0 };
        let y = BiObjectiveValue { f1: Score::Infinite, f2: 1 };
        let yx = dominates(&y, &x);
        assert!(yx.weak && yx.strict);
        assert!(!dominates(&x, &y).weak);
        let self_cmp = dominates(&a, &a);
        assert!(self_cmp.weak && !self_cmp.strict && !self_cmp.incomparable);
    }

    #[test]
    fn feasibility_filter() {
        let i = inst(4, vec![0.1; 4], DiversityKind::Sum, ConstraintSpec::at_most(2));
        let big = Subset::from_items(4, [0, 1, 2]).unwrap();
        assert!(!offspring_feasible(Formulation::ScaledCardinalitySum, &big, &i));
        let p = ConstraintSpec::partition(4, vec![vec![0, 1], vec![2, 3]], vec![1, 1]).unwrap();
        let ip = i.with_constraint(p).unwrap();
        let bad = Subset::from_items(4, [0, 1]).unwrap();
        assert!(!offspring_feasible(Formulation::MatroidSum, &bad, &ip));
        for f in Formulation::ALL {
            assert!(offspring_feasible(f, &Subset::empty(4), &i));
            assert!(offspring_feasible(f, &Subset::empty(4), &ip));
        }
    }

    fn member(form: Formulation, inst: &Instance, items: &[ItemId]) -> Individual {
        let x = Subset::from_items(inst.n(), items.iter().copied()).unwrap();
        let perm = form.uses_permutation().then(|| items.to_vec());
        Individual::evaluated(form, x, perm, inst, &mut EvaluationCounter::new()).unwrap()
    }

    #[test]
    fn extract_empty_population() {
        let i = inst(3, vec![0.5, 0.2, 0.1], DiversityKind::Sum, ConstraintSpec::at_most(2));
        let p = vec![Individual::empty(Formulation::ScaledCardinalitySum, &i)];
        let e = extract_final(Formulation::ScaledCardinalitySum, &p, &i);
        assert!(e.subset.is_empty());
        assert_eq!(e.objective, 0.0);
        assert!(e.feasible);
    }

    #[test]
    fn extract_picks_best_objective() {
        let d = DistanceMatrix::new(3, vec![0.0, 1.0, 1.2, 1.0, 0.0, 1.0, 1.2, 1.0, 0.0]).unwrap();
        let i = Instance::new(
            Quality::Modular(ModularQuality::new(vec![0.5, 0.2, 0.1]).unwrap()),
            d,
            1.0,
            DiversityKind::Sum,
            ConstraintSpec::at_most(2),
        )
        .unwrap();
        let f = Formulation::PlainCardinalitySum;
        let p = vec![member(f, &i, &[0, 1]), member(f, &i, &[0, 2])];
        let e = extract_final(f, &p, &i);
        assert_eq!(e.subset.to_vec(), vec![0, 2]);
        assert!((e.objective - 1.8).abs() < 1e-12);
    }

    #[test]
    fn min_quality_pads_ascending() {
        let i = inst(4, vec![0.1, 0.4, 0.2, 0.3], DiversityKind::Min, ConstraintSpec::exactly(3));
        let f = Formulation::MinQualityPhase;
        let p = vec![member(f, &i, &[]), member(f, &i, &[1]), member(f, &i, &[1, 3])];
        let e = extract_final(f, &p, &i);
        assert_eq!(e.subset.to_vec(), vec![0, 1, 3]);
        assert!(e.feasible);
    }

    #[test]
    fn min_diversity_flags_short_result() {
        let i = inst(5, vec![0.1; 5], DiversityKind::Min, ConstraintSpec::exactly(3));
        let f = Formulation::MinDiversityPhase;
        let p = vec![member(f, &i, &[2]), member(f, &i, &[2, 4])];
        let e = extract_final(f, &p, &i);
        assert_eq!(e.subset.to_vec(), vec![2, 4]);
        assert!(!e.feasible);
        let p = vec![member(f, &i, &[2, 4]), member(f, &i, &[0, 2, 4])];
        assert!(extract_final(f, &p, &i).feasible);
    }

    #[test]
    fn mst_extraction_extends_permutation() {
        let i = inst(5, vec![0.1; 5], DiversityKind::Mst, ConstraintSpec::exactly(4));
        let f = Formulation::MstPermutation;
        let p = vec![member(f, &i, &[3, 1])];
        let e = extract_final(f, &p, &i);
        assert_eq!(e.perm.unwrap(), vec![3, 1, 0, 2]);
        assert_eq!(e.subset.to_vec(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn permutation_mutation() {
        let (a, b, c) = (0, 1, 2);
        let s = |v: &[ItemId]| Subset::from_items(3, v.iter().copied()).unwrap();
        assert_eq!(mutate_permutation(&[c, a], &s(&[a, b, c])), vec![c, a, b]);
        assert_eq!(mutate_permutation(&[c, a, b], &s(&[b, c])), vec![c, b]);
        assert_eq!(mutate_permutation(&[a], &s(&[a])), vec![a]);
    }

    #[test]
    fn domination_is_a_preorder() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let draw = |rng: &mut ChaCha8Rng| BiObjectiveValue {
            f1: if rng.random_bool(0.1) {
                Score::Infinite
            } else {
                Score::Finite(rng.random_range(0..4) as f64)
            },
            f2: rng.random_range(-3..3),
        };
        for _ in 0..10_000 {
            let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            assert!(dominates(&a, &a).weak);
            if dominates(&a, &b).weak && dominates(&b, &c).weak {
                assert!(dominates(&a, &c).weak);
            }
            // same f2 means comparable
            if a.f2 == b.f2 {
                assert!(!dominates(&a, &b).incomparable);
            }
        }
    }

    #[test]
    fn scaled_f1_is_below_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let n = rng.random_range(2..12);
            let k = rng.random_range(1..=n);
            let i = random_instance(&mut rng, n, k);
            let size = rng.random_range(0..=k);
            let mut items: Vec<ItemId> = (0..n).collect();
            for j in 0..size {
                let s = rng.random_range(j..n);
                items.swap(j, s);
            }
            let x = Subset::from_items(n, items[..size].iter().copied()).unwrap();
            let f1 = evaluate(Formulation::ScaledCardinalitySum, &x, None, &i, &mut EvaluationCounter::new())
                .unwrap()
                .f1
                .finite()
                .unwrap();
            assert!(f1 <= objective_value(&x, &i) + 1e-12);
        }
    }

    proptest! {
        #[test]
        fn extract_prefers_feasible(seed in any::<u64>(), n in 3usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = rng.random_range(2..=n);
            let w = (0..n).map(|_| rng.random()).collect();
            let i = inst(n, w, DiversityKind::Min, ConstraintSpec::exactly(k));
            for f in [Formulation::PlainCardinalitySum, Formulation::MinQualityPhase, Formulation::MinDiversityPhase] {
                // one member per size 0..=k, as GSEMO would keep
                let pop: Vec<Individual> = (0..=k)
                    .filter(|_| rng.random_bool(0.6))
                    .map(|s| member(f, &i, &(0..s).collect::<Vec<_>>()))
                    .collect();
                if pop.is_empty() {
                    continue;
                }
                let has_feasible = pop.iter().any(|m| i.constraint().is_feasible_final(&m.subset));
                let e = extract_final(f, &pop, &i);
                if has_feasible {
                    prop_assert!(e.feasible);
                    prop_assert!(i.constraint().is_feasible_final(&e.subset));
                }
            }
        }
    }
}
