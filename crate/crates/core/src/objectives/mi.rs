//! Plug-in entropy and mutual-information estimates for discrete columns.
//!
//! Natural logarithms throughout; both outputs are ratios of information
//! quantities, so the base cancels.

use std::collections::BTreeMap;

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};

/// Normalized mutual information between features and labels, plus the
/// feature-feature distance `1 - I(a, b) / H(a, b)`.
#[derive(Debug, Clone)]
pub struct MiData {
    pub features: usize,
    pub labels: usize,
    /// Row-major `features x labels`, entries in `[0, 1]`.
    pub mi: Vec<f64>,
    pub feature_distance: DistanceMatrix,
}

fn entropy_of_counts<I: IntoIterator<Item = usize>>(counts: I, total: f64) -> f64 {
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum()
}

/// Empirical entropy `H(a)`.
pub fn entropy(a: &[i64]) -> f64 {
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for &v in a {
        *counts.entry(v).or_default() += 1;
    }
    entropy_of_counts(counts.into_values(), a.len() as f64)
}

/// Empirical joint entropy `H(a, b)`.
pub fn joint_entropy(a: &[i64], b: &[i64]) -> f64 {
    let mut counts: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *counts.entry((x, y)).or_default() += 1;
    }
    entropy_of_counts(counts.into_values(), a.len() as f64)
}

/// Empirical mutual information `I(a; b) = H(a) + H(b) - H(a, b)`, floored at 0.
pub fn mutual_information(a: &[i64], b: &[i64]) -> f64 {
    (entropy(a) + entropy(b) - joint_entropy(a, b)).max(0.0)
}

/// `I(v, l) / sqrt(H(v) H(l))`, or 0 when either entropy vanishes.
pub fn normalized_mi(v: &[i64], l: &[i64]) -> f64 {
    let (hv, hl) = (entropy(v), entropy(l));
    if hv <= 0.0 || hl <= 0.0 {
        return 0.0;
    }
    (mutual_information(v, l) / (hv * hl).sqrt()).clamp(0.0, 1.0)
}

/// `1 - I(a, b) / H(a, b)`, defined as 0 when `H(a, b) = 0`.
pub fn information_distance(a: &[i64], b: &[i64]) -> f64 {
    let h = joint_entropy(a, b);
    if h <= 0.0 {
        return 0.0;
    }
    let d = (1.0 - mutual_information(a, b) / h).clamp(0.0, 1.0);
    // Equivalent columns should land on exactly zero, not on rounding noise.
    if d < ZERO_SNAP {
        0.0
    } else {
        d
    }
}

const ZERO_SNAP: f64 = 1e-12;

/// Computes the MI matrix and feature distances from column-major data: each inner
/// vector is one column over the same `m >= 1` samples.
pub fn normalized_mi_from_data(features: &[Vec<i64>], labels: &[Vec<i64>]) -> Result<MiData> {
    let m = features
        .first()
        .or(labels.first())
        .map(Vec::len)
        .unwrap_or(0);
    if m == 0 {
        return Err(Error::DimensionMismatch("no samples".into()));
    }
    if let Some(c) = features.iter().chain(labels).find(|c| c.len() != m) {
        return Err(Error::DimensionMismatch(format!(
            "column length {} differs from {m}",
            c.len()
        )));
    }
    let n = features.len();
    let l = labels.len();
    let mut mi = Vec::with_capacity(n * l);
    for f in features {
        for lab in labels {
            mi.push(normalized_mi(f, lab));
        }
    }
    let feature_distance =
        DistanceMatrix::from_fn(n, |i, j| information_distance(&features[i], &features[j]))?;
    Ok(MiData {
        features: n,
        labels: l,
        mi,
        feature_distance,
    })
}
