//! Monotone submodular quality functions.

use crate::error::{Error, Result};
use crate::subset::{ItemId, Subset};

/// A normalized monotone submodular set function `f: 2^V -> R+`.
pub trait QualityOracle {
    /// Size of the ground set the oracle is defined on.
    fn ground_size(&self) -> usize;

    fn value(&self, x: &Subset) -> f64;

    /// `f(X ∪ {v}) - f(X)`.
    fn marginal(&self, x: &Subset, v: ItemId) -> f64 {
        if x.contains(v) {
            return 0.0;
        }
        let mut y = x.clone();
        y.insert(v);
        self.value(&y) - self.value(x)
    }
}

/// `f(X) = sum of weights[v] over v in X`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularQuality {
    weights: Vec<f64>,
}

impl ModularQuality {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::Inconsistent(format!(
                "modular weight {i} = {w} must be finite and nonnegative"
            )));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, v: ItemId) -> f64 {
        self.weights[v]
    }

    pub(crate) fn set_weight(&mut self, v: ItemId, w: f64) {
        self.weights[v] = w;
    }
}

impl QualityOracle for ModularQuality {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, x: &Subset) -> f64 {
        x.iter().map(|v| self.weights[v]).sum()
    }

    fn marginal(&self, x: &Subset, v: ItemId) -> f64 {
        if x.contains(v) {
            0.0
        } else {
            self.weights[v]
        }
    }
}

/// `f(X) = Σ_l (sum of the p largest mi[v][l] over v ∈ X)`, summing everything
/// available when `|X| < p`.
#[derive(Debug, Clone, PartialEq)]
pub struct TopPMiQuality {
    n: usize,
    labels: usize,
    p: usize,
    // row-major n x labels
    mi: Vec<f64>,
}

impl TopPMiQuality {
    pub fn new(n: usize, labels: usize, p: usize, mi: Vec<f64>) -> Result<Self> {
        if p == 0 {
            return Err(Error::Inconsistent("top-p quality needs p >= 1".into()));
        }
        if mi.len() != n * labels {
            return Err(Error::DimensionMismatch(format!(
                "mi block has {} values, expected {n} x {labels}",
                mi.len()
            )));
        }
        if let Some(v) = mi.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Inconsistent(format!(
                "mutual information value {v} must be finite and nonnegative"
            )));
        }
        Ok(Self { n, labels, p, mi })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    /// Row-major `n x labels` matrix.
    pub fn mi(&self) -> &[f64] {
        &self.mi
    }

    pub fn get(&self, v: ItemId, l: usize) -> f64 {
        self.mi[v * self.labels + l]
    }
}

impl QualityOracle for TopPMiQuality {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Subset) -> f64 {
        let members: Vec<ItemId> = x.iter().collect();
        if members.len() <= self.p {
            return members
                .iter()
                .map(|&v| self.mi[v * self.labels..(v + 1) * self.labels].iter().sum::<f64>())
                .sum();
        }
        let mut column = Vec::with_capacity(members.len());
        let mut total = 0.0;
        for l in 0..self.labels {
            column.clear();
            column.extend(members.iter().map(|&v| self.get(v, l)));
            column.select_nth_unstable_by(self.p - 1, |a, b| b.total_cmp(a));
            total += column[..self.p].iter().sum::<f64>();
        }
        total
    }
}

/// The quality oracles an [`Instance`](crate::Instance) can carry.
#[derive(Debug, Clone, PartialEq)]
pub enum Quality {
    Modular(ModularQuality),
    TopPMi(TopPMiQuality),
}

impl QualityOracle for Quality {
    fn ground_size(&self) -> usize {
        match self {
            Self::Modular(q) => q.ground_size(),
            Self::TopPMi(q) => q.ground_size(),
        }
    }

    fn value(&self, x: &Subset) -> f64 {
        match self {
            Self::Modular(q) => q.value(x),
            Self::TopPMi(q) => q.value(x),
        }
    }

    fn marginal(&self, x: &Subset, v: ItemId) -> f64 {
        match self {
            Self::Modular(q) => q.marginal(x, v),
            Self::TopPMi(q) => q.marginal(x, v),
        }
    }
}
