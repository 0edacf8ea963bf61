//! Sum, min and MST diversity, plus the permutation-based MST surrogate.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distance::DistanceMatrix;
use crate::subset::{ItemId, Subset};

/// A real value extended with an explicit `+∞`.
///
/// `Infinite` compares greater than every finite value and equal to itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Score {
    Finite(f64),
    Infinite,
}

/// Value of a diversity measure; `Infinite` only for min-diversity of `|X| <= 1`.
pub type DiversityValue = Score;

impl Score {
    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinite)
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Self::Infinite, Self::Infinite) => Some(Ordering::Equal),
            (Self::Infinite, Self::Finite(_)) => Some(Ordering::Greater),
            (Self::Finite(_), Self::Infinite) => Some(Ordering::Less),
            (Self::Finite(a), Self::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl From<f64> for Score {
    fn from(v: f64) -> Self {
        Self::Finite(v)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

/// Sum of `d(u, v)` over unordered pairs in `X`.
pub fn sum_diversity(x: &Subset, d: &DistanceMatrix) -> f64 {
    let members: Vec<ItemId> = x.iter().collect();
    let mut total = 0.0;
    for (a, &u) in members.iter().enumerate() {
        let row = d.row(u);
        total += members[a + 1..].iter().map(|&v| row[v]).sum::<f64>();
    }
    total
}

/// `Σ_{v ∈ X} d(u, v)`, the increase in sum-diversity from adding `u ∉ X`.
///
/// Panics if `u ∈ X`.
pub fn sum_diversity_marginal(x: &Subset, u: ItemId, d: &DistanceMatrix) -> f64 {
    assert!(!x.contains(u), "sum_diversity_marginal: item {u} already in X");
    let row = d.row(u);
    x.iter().map(|v| row[v]).sum()
}

/// Minimum pairwise distance; `Infinite` when `|X| <= 1`.
pub fn min_diversity(x: &Subset, d: &DistanceMatrix) -> DiversityValue {
    let members: Vec<ItemId> = x.iter().collect();
    let mut best = f64::INFINITY;
    for (a, &u) in members.iter().enumerate() {
        for &v in &members[a + 1..] {
            best = best.min(d.get(u, v));
        }
    }
    if members.len() <= 1 {
        Score::Infinite
    } else {
        Score::Finite(best)
    }
}

/// Weight of a minimum spanning tree of the complete graph on `X` (dense Prim).
pub fn mst_diversity(x: &Subset, d: &DistanceMatrix) -> f64 {
    let members: Vec<ItemId> = x.iter().collect();
    mst_weight(&members, d)
}

fn mst_weight(members: &[ItemId], d: &DistanceMatrix) -> f64 {
    let m = members.len();
    if m <= 1 {
        return 0.0;
    }
    let mut in_tree = vec![false; m];
    let mut link = vec![f64::INFINITY; m];
    link[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..m {
        let (next, _) = link
            .iter()
            .enumerate()
            .filter(|(i, _)| !in_tree[*i])
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("at least one vertex outside the tree");
        in_tree[next] = true;
        total += link[next];
        let row = d.row(members[next]);
        for (i, l) in link.iter_mut().enumerate() {
            if !in_tree[i] {
                *l = l.min(row[members[i]]);
            }
        }
    }
    total
}

/// `Σ_{i >= 2} min_{j < i} d(perm[i], perm[j])`: the cost of attaching each item
/// to its nearest predecessor.
///
/// Panics if `perm` contains duplicates.
pub fn permutation_mst_proxy(perm: &[ItemId], d: &DistanceMatrix) -> f64 {
    let mut seen = Subset::empty(d.len());
    for &u in perm {
        assert!(seen.insert(u), "permutation_mst_proxy: duplicate item {u}");
    }
    let mut total = 0.0;
    for i in 1..perm.len() {
        let row = d.row(perm[i]);
        total += perm[..i]
            .iter()
            .map(|&v| row[v])
            .fold(f64::INFINITY, f64::min);
    }
    total
}
