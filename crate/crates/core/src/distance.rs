//! Dense symmetric distance matrices and the (relaxed) triangle-inequality check.

use crate::error::{Error, Result};
use crate::subset::ItemId;

/// Absolute tolerance for symmetry and zero-diagonal checks.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// `alpha <= 1 + METRIC_TOL` counts as a metric.
pub const METRIC_TOL: f64 = 1e-12;

/// Outcome of [`validate_metric`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub metric: bool,
    /// Smallest `alpha >= 1` with `alpha * (d(u,v) + d(v,w)) >= d(u,w)` for all triples.
    pub alpha: f64,
    /// A maximizing triple `(u, v, w)` when the matrix is not a metric.
    pub witness: Option<(ItemId, ItemId, ItemId)>,
}

/// Symmetric `n x n` matrix of nonnegative distances with a zero diagonal.
///
/// Validated on construction; `alpha` is computed eagerly.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
    report: MetricReport,
}

impl DistanceMatrix {
    /// Builds a matrix from `n * n` row-major values.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "distance block has {} values, expected {}",
                values.len(),
                n * n
            )));
        }
        for i in 0..n {
            let dii = values[i * n + i];
            if !dii.is_finite() || dii.abs() > SYMMETRY_TOL {
                return Err(Error::InvalidDistance(format!(
                    "nonzero diagonal d({i},{i}) = {dii}"
                )));
            }
            for j in 0..n {
                let dij = values[i * n + j];
                if !dij.is_finite() || dij < 0.0 {
                    return Err(Error::InvalidDistance(format!(
                        "entry d({i},{j}) = {dij} is negative or not finite"
                    )));
                }
                if j > i && (dij - values[j * n + i]).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidDistance(format!(
                        "asymmetric pair d({i},{j}) = {dij}, d({j},{i}) = {}",
                        values[j * n + i]
                    )));
                }
            }
        }
        let mut m = Self {
            n,
            values,
            report: MetricReport {
                metric: true,
                alpha: 1.0,
                witness: None,
            },
        };
        m.report = scan_alpha(&m);
        Ok(m)
    }

    /// Builds a matrix from a function on unordered pairs `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(ItemId, ItemId) -> f64) -> Result<Self> {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Self::new(n, values)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: ItemId, j: ItemId) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: ItemId) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    /// Row-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn alpha(&self) -> f64 {
        self.report.alpha
    }

    pub fn is_metric(&self) -> bool {
        self.report.metric
    }

    pub fn metric_report(&self) -> MetricReport {
        self.report
    }

    /// Returns a copy with `d(i,j) = d(j,i) = value`, revalidated.
    pub fn with_pair(&self, i: ItemId, j: ItemId, value: f64) -> Result<Self> {
        let mut values = self.values.clone();
        values[i * self.n + j] = value;
        values[j * self.n + i] = value;
        Self::new(self.n, values)
    }

    /// Returns a copy with every `(i, j, value)` written symmetrically, revalidated.
    pub fn with_pairs(&self, updates: &[(ItemId, ItemId, f64)]) -> Result<Self> {
        let mut values = self.values.clone();
        for &(i, j, value) in updates {
            if i >= self.n || j >= self.n {
                return Err(Error::ItemOutOfRange { item: i.max(j), n: self.n });
            }
            values[i * self.n + j] = value;
            values[j * self.n + i] = value;
        }
        Self::new(self.n, values)
    }

    /// Smallest and largest off-diagonal entries.
    pub fn off_diagonal_range(&self) -> Option<(f64, f64)> {
        let mut range: Option<(f64, f64)> = None;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let v = self.get(i, j);
                range = Some(match range {
                    None => (v, v),
                    Some((lo, hi)) => (lo.min(v), hi.max(v)),
                });
            }
        }
        range
    }
}

/// Computes the triangle-inequality report of a validated matrix.
pub fn validate_metric(d: &DistanceMatrix) -> MetricReport {
    d.metric_report()
}

fn scan_alpha(d: &DistanceMatrix) -> MetricReport {
    let n = d.len();
    // If every side is at most twice every other side, no triple can violate.
    if let Some((lo, hi)) = d.off_diagonal_range() {
        if lo > 0.0 && hi <= 2.0 * lo {
            return MetricReport {
                metric: true,
                alpha: 1.0,
                witness: None,
            };
        }
    }
    let mut alpha = 1.0f64;
    let mut witness = None;
    for u in 0..n {
        for w in 0..n {
            let duw = d.get(u, w);
            if u == w || duw == 0.0 {
                continue;
            }
            for v in 0..n {
                let denom = d.get(u, v) + d.get(v, w);
                let ratio = if denom == 0.0 {
                    f64::INFINITY
                } else {
                    duw / denom
                };
                if ratio > alpha {
                    alpha = ratio;
                    witness = Some((u, v, w));
                }
            }
        }
    }
    let metric = alpha <= 1.0 + METRIC_TOL;
    MetricReport {
        metric,
        alpha: alpha.max(1.0),
        witness: if metric { None } else { witness },
    }
}
