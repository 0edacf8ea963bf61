//! Problem instances and their JSON file format.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constraints::{CardinalityMode, ConstraintSpec};
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::objectives::{ModularQuality, Quality, QualityOracle, TopPMiQuality};
use crate::subset::ItemId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiversityKind {
    Sum,
    Min,
    Mst,
}

impl DiversityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Sum => "sum",
            Self::Min => "min",
            Self::Mst => "mst",
        }
    }
}

/// One optimization problem: maximize `f(X) + λ·div(X)` subject to a constraint.
///
/// Immutable once built; quality and distances sit behind `Arc` so perturbed
/// copies share whatever they do not change.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    n: usize,
    quality: Arc<Quality>,
    distance: Arc<DistanceMatrix>,
    lambda: f64,
    diversity: DiversityKind,
    constraint: ConstraintSpec,
    names: Option<Vec<String>>,
}

impl Instance {
    pub fn new(
        quality: Quality,
        distance: DistanceMatrix,
        lambda: f64,
        diversity: DiversityKind,
        constraint: ConstraintSpec,
    ) -> Result<Self> {
        Self::from_parts(
            Arc::new(quality),
            Arc::new(distance),
            lambda,
            diversity,
            constraint,
            None,
        )
    }

    pub(crate) fn from_parts(
        quality: Arc<Quality>,
        distance: Arc<DistanceMatrix>,
        lambda: f64,
        diversity: DiversityKind,
        constraint: ConstraintSpec,
        names: Option<Vec<String>>,
    ) -> Result<Self> {
        let n = distance.len();
        if quality.ground_size() != n {
            return Err(Error::DimensionMismatch(format!(
                "quality covers {} items, distance matrix {n}",
                quality.ground_size()
            )));
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::Inconsistent(format!(
                "lambda = {lambda} must be finite and nonnegative"
            )));
        }
        if let ConstraintSpec::Partition(p) = &constraint {
            if p.universe() != n {
                return Err(Error::DimensionMismatch(format!(
                    "partition covers {} items, instance has {n}",
                    p.universe()
                )));
            }
        }
        if let Some(names) = &names {
            if names.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{} names for {n} items",
                    names.len()
                )));
            }
        }
        if diversity != DiversityKind::Sum {
            match constraint {
                ConstraintSpec::Cardinality {
                    k,
                    mode: CardinalityMode::Exact,
                } if k >= 2 => {}
                _ => {
                    return Err(Error::Inconsistent(format!(
                        "{}-diversity requires an exact cardinality constraint with k >= 2",
                        diversity.as_str()
                    )))
                }
            }
        }
        Ok(Self {
            n,
            quality,
            distance,
            lambda,
            diversity,
            constraint,
            names,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn quality(&self) -> &Quality {
        &self.quality
    }

    pub fn distance(&self) -> &DistanceMatrix {
        &self.distance
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn diversity(&self) -> DiversityKind {
        self.diversity
    }

    pub fn constraint(&self) -> &ConstraintSpec {
        &self.constraint
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Index of an item by external name.
    pub fn item_by_name(&self, name: &str) -> Option<ItemId> {
        self.names.as_ref()?.iter().position(|s| s == name)
    }

    /// Cardinality budget `k` (None for partition constraints).
    pub fn k(&self) -> Option<usize> {
        self.constraint.cardinality()
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::from_parts(
            self.quality.clone(),
            self.distance.clone(),
            lambda,
            self.diversity,
            self.constraint.clone(),
            self.names.clone(),
        )
    }

    pub fn with_constraint(&self, constraint: ConstraintSpec) -> Result<Self> {
        Self::from_parts(
            self.quality.clone(),
            self.distance.clone(),
            self.lambda,
            self.diversity,
            constraint,
            self.names.clone(),
        )
    }

    pub fn with_diversity(&self, diversity: DiversityKind, constraint: ConstraintSpec) -> Result<Self> {
        Self::from_parts(
            self.quality.clone(),
            self.distance.clone(),
            self.lambda,
            diversity,
            constraint,
            self.names.clone(),
        )
    }

    pub(crate) fn with_parts(&self, quality: Arc<Quality>, distance: Arc<DistanceMatrix>) -> Result<Self> {
        Self::from_parts(
            quality,
            distance,
            self.lambda,
            self.diversity,
            self.constraint.clone(),
            self.names.clone(),
        )
    }

    pub(crate) fn quality_arc(&self) -> &Arc<Quality> {
        &self.quality
    }

    pub(crate) fn distance_arc(&self) -> &Arc<DistanceMatrix> {
        &self.distance
    }

    /// Parses and validates an instance document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        doc.into_instance()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&InstanceDoc::from(self)).expect("instance serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// Parses an instance document; see [`Instance::from_json`].
pub fn load_instance(text: &str) -> Result<Instance> {
    Instance::from_json(text)
}

// ---- file schema ----

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    n: usize,
    lambda: f64,
    diversity: DiversityKind,
    quality: QualityDoc,
    distance: DistanceDoc,
    constraint: ConstraintDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum QualityDoc {
    Modular { weights: Vec<f64> },
    TopPMi { p: usize, mi: MiBlock },
}

/// `n x L` values, either as `n` rows or flattened row-major.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum MiBlock {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum DistanceDoc {
    Dense { values: Vec<f64> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ConstraintDoc {
    Cardinality { k: usize, mode: CardinalityMode },
    Partition { parts: Vec<Vec<ItemId>>, caps: Vec<usize> },
}

impl InstanceDoc {
    fn into_instance(self) -> Result<Instance> {
        let n = self.n;
        let quality = match self.quality {
            QualityDoc::Modular { weights } => {
                if weights.len() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "{} weights for n = {n}",
                        weights.len()
                    )));
                }
                Quality::Modular(ModularQuality::new(weights)?)
            }
            QualityDoc::TopPMi { p, mi } => {
                let (labels, flat) = match mi {
                    MiBlock::Rows(rows) => {
                        if rows.len() != n {
                            return Err(Error::DimensionMismatch(format!(
                                "{} mi rows for n = {n}",
                                rows.len()
                            )));
                        }
                        let labels = rows.first().map_or(0, Vec::len);
                        if rows.iter().any(|r| r.len() != labels) {
                            return Err(Error::DimensionMismatch("ragged mi rows".into()));
                        }
                        (labels, rows.concat())
                    }
                    MiBlock::Flat(flat) => {
                        if n == 0 || flat.len() % n != 0 {
                            return Err(Error::DimensionMismatch(format!(
                                "{} mi values is not a multiple of n = {n}",
                                flat.len()
                            )));
                        }
                        (flat.len() / n, flat)
                    }
                };
                Quality::TopPMi(TopPMiQuality::new(n, labels, p, flat)?)
            }
        };
        let DistanceDoc::Dense { values } = self.distance;
        if values.len() != n.checked_mul(n).unwrap_or(usize::MAX) {
            return Err(Error::DimensionMismatch(format!(
                "distance block has {} values, expected n² = {}",
                values.len(),
                n.saturating_mul(n)
            )));
        }
        let distance = DistanceMatrix::new(n, values)?;
        let constraint = match self.constraint {
            ConstraintDoc::Cardinality { k, mode } => ConstraintSpec::Cardinality { k, mode },
            ConstraintDoc::Partition { parts, caps } => ConstraintSpec::partition(n, parts, caps)?,
        };
        Instance::from_parts(
            Arc::new(quality),
            Arc::new(distance),
            self.lambda,
            self.diversity,
            constraint,
            self.names,
        )
    }
}

impl From<&Instance> for InstanceDoc {
    fn from(inst: &Instance) -> Self {
        let quality = match inst.quality() {
            Quality::Modular(q) => QualityDoc::Modular {
                weights: q.weights().to_vec(),
            },
            Quality::TopPMi(q) => QualityDoc::TopPMi {
                p: q.p(),
                mi: MiBlock::Rows(
                    (0..inst.n)
                        .map(|v| (0..q.labels()).map(|l| q.get(v, l)).collect())
                        .collect(),
                ),
            },
        };
        let constraint = match inst.constraint() {
            ConstraintSpec::Cardinality { k, mode } => ConstraintDoc::Cardinality { k: *k, mode: *mode },
            ConstraintSpec::Partition(p) => ConstraintDoc::Partition {
                parts: p.parts().to_vec(),
                caps: p.caps().to_vec(),
            },
        };
        Self {
            n: inst.n,
            lambda: inst.lambda,
            diversity: inst.diversity,
            quality,
            distance: DistanceDoc::Dense {
                values: inst.distance().values().to_vec(),
            },
            constraint,
            names: inst.names.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MINIMAL: &str = r#"{
        "n": 3, "lambda": 1.0, "diversity": "sum",
        "quality": {"kind": "modular", "weights": [0.5, 0.2, 1e-1]},
        "distance": {"kind": "dense", "values": [0, 1, 1.2, 1, 0, 1, 1.2, 1, 0]},
        "constraint": {"kind": "cardinality", "k": 2, "mode": "at_most"}
    }"#;

    #[test]
    fn loads_minimal_document() {
        let inst = load_instance(MINIMAL).unwrap();
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.k(), Some(2));
        assert!(inst.distance().is_metric());
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn short_distance_block() {
        let doc = MINIMAL.replace("1.2, 1, 0]", "1.2, 1]");
        assert!(matches!(load_instance(&doc), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn min_diversity_needs_exact_mode() {
        let doc = MINIMAL.replace("\"sum\"", "\"min\"");
        assert!(matches!(load_instance(&doc), Err(Error::Inconsistent(_))));
        let ok = doc.replace("at_most", "exact");
        assert!(load_instance(&ok).is_ok());
    }

    #[test]
    fn schema_violations() {
        assert!(load_instance("{}").is_err());
        assert!(load_instance(&MINIMAL.replace("modular", "cubic")).is_err());
        assert!(load_instance(&MINIMAL.replace("\"lambda\": 1.0", "\"lambda\": -1")).is_err());
        assert!(load_instance(&MINIMAL.replace("0.5, 0.2, 1e-1", "0.5, 0.2")).is_err());
        assert!(load_instance(&MINIMAL.replace("\"n\": 3", "\"n\": 3, \"extra\": 1")).is_err());
    }

    #[test]
    fn partition_and_names() {
        let doc = MINIMAL
            .replace(
                r#"{"kind": "cardinality", "k": 2, "mode": "at_most"}"#,
                r#"{"kind": "partition", "parts": [[0, 1], [2]], "caps": [1, 1]}"#,
            )
            .replace("\"n\": 3,", "\"n\": 3, \"names\": [\"a\", \"b\", \"c\"],");
        let inst = load_instance(&doc).unwrap();
        assert_eq!(inst.item_by_name("c"), Some(2));
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn top_p_mi_flat_and_rows() {
        let rows = MINIMAL.replace(
            r#"{"kind": "modular", "weights": [0.5, 0.2, 1e-1]}"#,
            r#"{"kind": "top_p_mi", "p": 1, "mi": [[0.1, 0.2], [0.3, 0.4], [0.5, 0.6]]}"#,
        );
        let flat = MINIMAL.replace(
            r#"{"kind": "modular", "weights": [0.5, 0.2, 1e-1]}"#,
            r#"{"kind": "top_p_mi", "p": 1, "mi": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]}"#,
        );
        let a = load_instance(&rows).unwrap();
        assert_eq!(a, load_instance(&flat).unwrap());
        assert_eq!(Instance::from_json(&a.to_json()).unwrap(), a);
    }

    proptest! {
        #[test]
        fn save_load_roundtrip(
            n in 2usize..7,
            seed in any::<u64>(),
            lambda in 0.0f64..5.0,
            k in 0usize..7,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let weights: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            let d = DistanceMatrix::from_fn(n, |_, _| rng.random_range(1.0..2.0)).unwrap();
            let inst = Instance::new(
                Quality::Modular(ModularQuality::new(weights).unwrap()),
                d,
                lambda,
                DiversityKind::Sum,
                ConstraintSpec::at_most(k),
            ).unwrap();
            let back = Instance::from_json(&inst.to_json()).unwrap();
            prop_assert_eq!(back, inst);
        }
    }
}
