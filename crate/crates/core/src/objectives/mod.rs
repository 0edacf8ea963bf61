//! Quality oracles, diversity measures, and the combined objective `f + λ·div`.

mod diversity;
mod mi;
mod quality;

pub use diversity::{
    min_diversity, mst_diversity, permutation_mst_proxy, sum_diversity, sum_diversity_marginal,
    DiversityValue, Score,
};
pub use mi::{
    entropy, information_distance, joint_entropy, mutual_information, normalized_mi,
    normalized_mi_from_data, MiData,
};
pub use quality::{ModularQuality, Quality, QualityOracle, TopPMiQuality};

use crate::instance::{DiversityKind, Instance};
use crate::subset::Subset;

/// Number of objective evaluations charged to one run.
///
/// Cost model: one combined objective call, one GSEMO iteration, or one scanned
/// greedy/local-search candidate each cost one evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct EvaluationCounter {
    count: u64,
}

impl EvaluationCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, evaluations: u64) {
        self.count += evaluations;
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

/// The diversity term under the instance's measure, as a finite number.
///
/// Min-diversity of `|X| <= 1` is undefined; it contributes 0 here, and such sets
/// are never final-feasible for min-diversity instances anyway.
pub fn diversity(x: &Subset, inst: &Instance) -> f64 {
    let d = inst.distance();
    match inst.diversity() {
        DiversityKind::Sum => sum_diversity(x, d),
        DiversityKind::Min => min_diversity(x, d).finite().unwrap_or(0.0),
        DiversityKind::Mst => mst_diversity(x, d),
    }
}

/// `f(X) + λ·div(X)` without touching any counter.
pub fn objective_value(x: &Subset, inst: &Instance) -> f64 {
    inst.quality().value(x) + inst.lambda() * diversity(x, inst)
}

/// `f(X) + λ·div(X)`, charging one evaluation.
pub fn objective(x: &Subset, inst: &Instance, counter: &mut EvaluationCounter) -> f64 {
    counter.charge(1);
    objective_value(x, inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::ConstraintSpec;
    use crate::distance::DistanceMatrix;

    fn three() -> Instance {
        let d = DistanceMatrix::new(3, vec![0.0, 1.0, 1.2, 1.0, 0.0, 1.0, 1.2, 1.0, 0.0]).unwrap();
        Instance::new(
            Quality::Modular(ModularQuality::new(vec![0.5, 0.2, 0.1]).unwrap()),
            d,
            1.0,
            DiversityKind::Sum,
            ConstraintSpec::at_most(2),
        )
        .unwrap()
    }

    #[test]
    fn combined_objective() {
        let inst = three();
        let mut c = EvaluationCounter::new();
        let x = Subset::from_items(3, [0, 2]).unwrap();
        assert!((objective(&x, &inst, &mut c) - 1.8).abs() < 1e-12);
        assert_eq!(objective(&Subset::empty(3), &inst, &mut c), 0.0);
        assert_eq!(c.count(), 2);
    }

    #[test]
    fn zero_lambda_is_quality() {
        let inst = three().with_lambda(0.0).unwrap();
        for mask in 0..8 {
            let x = Subset::from_mask(3, mask);
            assert_eq!(objective_value(&x, &inst), inst.quality().value(&x));
        }
    }
}
