//! Cardinality (uniform matroid) and partition-matroid feasibility oracles.
//!
//! Algorithms only talk to [`ConstraintSpec`] through independence tests, rank,
//! basis extension and swap enumeration, so another matroid would slot in here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subset::{ItemId, Subset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CardinalityMode {
    /// `|X| <= k`
    AtMost,
    /// `|X| = k` for the final solution; `|X| <= k` while searching.
    Exact,
}

/// Partition matroid: at most `caps[i]` items from each part `parts[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionMatroid {
    parts: Vec<Vec<ItemId>>,
    caps: Vec<usize>,
    part_of: Vec<usize>,
}

impl PartitionMatroid {
    /// Parts must be disjoint and cover `0..n`.
    pub fn new(n: usize, parts: Vec<Vec<ItemId>>, caps: Vec<usize>) -> Result<Self> {
        if parts.len() != caps.len() {
            return Err(Error::InvalidConstraint(format!(
                "{} parts but {} caps",
                parts.len(),
                caps.len()
            )));
        }
        let mut part_of = vec![usize::MAX; n];
        for (p, items) in parts.iter().enumerate() {
            for &i in items {
                if i >= n {
                    return Err(Error::ItemOutOfRange { item: i, n });
                }
                if part_of[i] != usize::MAX {
                    return Err(Error::InvalidConstraint(format!(
                        "item {i} appears in more than one part"
                    )));
                }
                part_of[i] = p;
            }
        }
        if let Some(i) = part_of.iter().position(|&p| p == usize::MAX) {
            return Err(Error::InvalidConstraint(format!(
                "item {i} is not covered by any part"
            )));
        }
        Ok(Self {
            parts,
            caps,
            part_of,
        })
    }

    pub fn parts(&self) -> &[Vec<ItemId>] {
        &self.parts
    }

    pub fn caps(&self) -> &[usize] {
        &self.caps
    }

    pub fn part_of(&self, item: ItemId) -> usize {
        self.part_of[item]
    }

    pub fn universe(&self) -> usize {
        self.part_of.len()
    }

    fn counts(&self, x: &Subset) -> Vec<usize> {
        let mut c = vec![0; self.parts.len()];
        for i in x.iter() {
            c[self.part_of[i]] += 1;
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintSpec {
    Cardinality { k: usize, mode: CardinalityMode },
    Partition(PartitionMatroid),
}

/// Rank of a matroid: the common size of its bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct MatroidRank(pub usize);

impl ConstraintSpec {
    pub fn at_most(k: usize) -> Self {
        Self::Cardinality {
            k,
            mode: CardinalityMode::AtMost,
        }
    }

    pub fn exactly(k: usize) -> Self {
        Self::Cardinality {
            k,
            mode: CardinalityMode::Exact,
        }
    }

    pub fn partition(n: usize, parts: Vec<Vec<ItemId>>, caps: Vec<usize>) -> Result<Self> {
        PartitionMatroid::new(n, parts, caps).map(Self::Partition)
    }

    /// The cardinality budget `k`, if this is a cardinality constraint.
    pub fn cardinality(&self) -> Option<usize> {
        match self {
            Self::Cardinality { k, .. } => Some(*k),
            Self::Partition(_) => None,
        }
    }

    /// Membership in the independence family `F`.
    pub fn is_independent(&self, x: &Subset) -> bool {
        match self {
            Self::Cardinality { k, .. } => x.len() <= *k,
            Self::Partition(p) => p
                .counts(x)
                .iter()
                .zip(&p.caps)
                .all(|(c, cap)| c <= cap),
        }
    }

    /// Items `u ∉ X` with `X + u` independent, in ascending order. `X` must be independent.
    pub fn addable(&self, x: &Subset) -> Vec<ItemId> {
        match self {
            Self::Cardinality { k, .. } if x.len() >= *k => Vec::new(),
            Self::Cardinality { .. } => x.complement_iter().collect(),
            Self::Partition(p) => {
                let counts = p.counts(x);
                x.complement_iter()
                    .filter(|&u| counts[p.part_of[u]] < p.caps[p.part_of[u]])
                    .collect()
            }
        }
    }

    /// Feasibility for the original problem: independence, plus `|X| = k` in exact mode.
    pub fn is_feasible_final(&self, x: &Subset) -> bool {
        match self {
            Self::Cardinality {
                k,
                mode: CardinalityMode::Exact,
            } => x.len() == *k,
            _ => self.is_independent(x),
        }
    }

    pub fn rank(&self, n: usize) -> MatroidRank {
        match self {
            Self::Cardinality { k, .. } => MatroidRank((*k).min(n)),
            Self::Partition(p) => MatroidRank(
                p.parts
                    .iter()
                    .zip(&p.caps)
                    .map(|(part, &cap)| part.len().min(cap))
                    .sum(),
            ),
        }
    }

    pub fn is_basis(&self, x: &Subset) -> bool {
        self.is_independent(x) && x.len() == self.rank(x.universe()).0
    }

    /// Greedily grows an independent `x` into a basis, scanning `order` and keeping
    /// each item whose addition preserves independence.
    pub fn extend_to_basis(&self, x: &Subset, order: &[ItemId]) -> Result<Subset> {
        if !self.is_independent(x) {
            return Err(Error::NotIndependent);
        }
        let n = x.universe();
        let rank = self.rank(n).0;
        let mut out = x.clone();
        let mut counts = match self {
            Self::Partition(p) => p.counts(x),
            Self::Cardinality { .. } => Vec::new(),
        };
        for &i in order {
            if out.len() >= rank {
                break;
            }
            if i >= n {
                return Err(Error::ItemOutOfRange { item: i, n });
            }
            if out.contains(i) {
                continue;
            }
            match self {
                Self::Cardinality { .. } => {
                    out.insert(i);
                }
                Self::Partition(p) => {
                    let part = p.part_of[i];
                    if counts[part] < p.caps[part] {
                        counts[part] += 1;
                        out.insert(i);
                    }
                }
            }
        }
        Ok(out)
    }

    /// [`ConstraintSpec::extend_to_basis`] with ascending index order.
    pub fn extend_to_basis_ascending(&self, x: &Subset) -> Result<Subset> {
        let order: Vec<ItemId> = (0..x.universe()).collect();
        self.extend_to_basis(x, &order)
    }

    /// All `(out, in)` pairs with `out ∈ X`, `in ∉ X` such that `X - out + in` stays
    /// independent, in ascending `(out, in)` order.
    pub fn feasible_swaps(&self, x: &Subset) -> Result<Vec<(ItemId, ItemId)>> {
        if !self.is_basis(x) {
            return Err(Error::NotBasis);
        }
        let outside: Vec<ItemId> = x.complement_iter().collect();
        let mut swaps = Vec::new();
        match self {
            Self::Cardinality { .. } => {
                for o in x.iter() {
                    swaps.extend(outside.iter().map(|&i| (o, i)));
                }
            }
            Self::Partition(p) => {
                let counts = p.counts(x);
                for o in x.iter() {
                    let po = p.part_of[o];
                    for &i in &outside {
                        let pi = p.part_of[i];
                        if pi == po || counts[pi] < p.caps[pi] {
                            swaps.push((o, i));
                        }
                    }
                }
            }
        }
        Ok(swaps)
    }

    /// Whether `X - outs + ins` is independent, for `outs ⊆ X` and `ins` disjoint from `X`.
    pub fn exchange_independent(&self, x: &Subset, outs: &[ItemId], ins: &[ItemId]) -> bool {
        match self {
            Self::Cardinality { k, .. } => x.len() + ins.len() - outs.len() <= *k,
            Self::Partition(p) => {
                let mut counts = p.counts(x);
                for &o in outs {
                    counts[p.part_of[o]] -= 1;
                }
                for &i in ins {
                    counts[p.part_of[i]] += 1;
                }
                counts.iter().zip(&p.caps).all(|(c, cap)| c <= cap)
            }
        }
    }
}
