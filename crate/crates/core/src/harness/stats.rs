//! Summary statistics and Wilcoxon tests (normal approximation).

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator); 0 for a single trial.
    pub std: f64,
    pub trials: usize,
}

pub fn summarize(xs: &[f64]) -> Result<Summary> {
    if xs.is_empty() {
        return Err(Error::Inconsistent("no trials to summarize".into()));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(Summary {
        mean,
        std,
        trials: xs.len(),
    })
}

/// Fewest nonzero differences for which the signed-rank test reports a p-value.
pub const SIGNED_RANK_MIN_PAIRS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SignedRank {
    /// Too few nonzero differences.
    Inconclusive { nonzero: usize },
    Test {
        /// `min(w_plus, w_minus)`.
        w: f64,
        w_plus: f64,
        w_minus: f64,
        nonzero: usize,
        p_two_sided: f64,
    },
}

impl SignedRank {
    pub fn p_value(&self) -> Option<f64> {
        match *self {
            Self::Test { p_two_sided, .. } => Some(p_two_sided),
            Self::Inconclusive { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankSum {
    /// Mann-Whitney `U` for the first sample.
    pub u: f64,
    pub p_two_sided: f64,
}

/// Midranks (1-based) of `xs`, plus `Σ (t³ - t)` over tie groups.
fn midranks(xs: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &o in &order[i..j] {
            ranks[o] = rank;
        }
        let t = (j - i) as f64;
        ties += t * t * t - t;
        i = j;
    }
    (ranks, ties)
}

/// Two-sided p-value of `|stat - mean|` with a continuity correction of 1/2.
fn normal_p(stat: f64, mean: f64, var: f64) -> f64 {
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((stat - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let phi = Normal::standard().cdf(z);
    (2.0 * (1.0 - phi)).clamp(0.0, 1.0)
}

/// Paired two-sided signed-rank test. Zero differences are dropped.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<SignedRank> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "paired samples of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n < SIGNED_RANK_MIN_PAIRS {
        return Ok(SignedRank::Inconclusive { nonzero: n });
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = midranks(&abs);
    let w_plus: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let nf = n as f64;
    let total = nf * (nf + 1.0) / 2.0;
    let w_minus = total - w_plus;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - ties / 48.0;
    Ok(SignedRank::Test {
        w: w_plus.min(w_minus),
        w_plus,
        w_minus,
        nonzero: n,
        p_two_sided: normal_p(w_plus, total / 2.0, var),
    })
}

/// Unpaired two-sided rank-sum (Mann-Whitney) test.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<RankSum> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Inconsistent("rank-sum test needs two nonempty samples".into()));
    }
    let all: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&all);
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let big_n = n1 + n2;
    let r1: f64 = ranks[..a.len()].iter().sum();
    let u = r1 - n1 * (n1 + 1.0) / 2.0;
    let var = n1 * n2 / 12.0 * ((big_n + 1.0) - ties / (big_n * (big_n - 1.0)));
    Ok(RankSum {
        u,
        p_two_sided: normal_p(u, n1 * n2 / 2.0, var),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn summary_matches_hand_values() {
        let s = summarize(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert_eq!(s.mean, 5.0);
        assert!((s.std - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert_eq!(summarize(&[3.0]).unwrap().std, 0.0);
        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn midranks_with_ties() {
        let (r, t) = midranks(&[3.0, 1.0, 3.0, 2.0]);
        assert_eq!(r, vec![3.5, 1.0, 3.5, 2.0]);
        assert_eq!(t, 6.0);
    }

    #[test]
    fn equal_samples_are_inconclusive() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        assert_eq!(wilcoxon_signed_rank(&a, &a).unwrap(), SignedRank::Inconclusive { nonzero: 0 });
        assert!(wilcoxon_signed_rank(&a, &a[..3]).is_err());
    }

    #[test]
    fn five_positive_pairs() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = wilcoxon_signed_rank(&a, &[0.0; 5]).unwrap();
        let SignedRank::Test { w, w_plus, p_two_sided, .. } = r else { panic!() };
        assert_eq!((w, w_plus), (0.0, 15.0));
        assert!((p_two_sided - 0.0625).abs() <= 0.03, "p = {p_two_sided}");
    }

    #[test]
    fn rank_sum_extremes() {
        let a: Vec<f64> = (10..20).map(f64::from).collect();
        let b: Vec<f64> = (0..10).map(f64::from).collect();
        let r = wilcoxon_rank_sum(&a, &b).unwrap();
        assert_eq!(r.u, 100.0);
        assert!(r.p_two_sided < 0.001);
        let same = wilcoxon_rank_sum(&a, &a).unwrap();
        assert_eq!(same.u, 50.0);
        assert!(same.p_two_sided > 0.99);
        let tied = wilcoxon_rank_sum(&[1.0, 1.0], &[1.0]).unwrap();
        assert_eq!(tied.p_two_sided, 1.0);
    }

    proptest! {
        #[test]
        fn signed_rank_symmetry(pairs in prop::collection::vec((-20i32..20, -20i32..20), 0..30)) {
            let a: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
            let b: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
            let ab = wilcoxon_signed_rank(&a, &b).unwrap();
            let ba = wilcoxon_signed_rank(&b, &a).unwrap();
            match (ab, ba) {
                (SignedRank::Test { w_plus: p1, w_minus: m1, p_two_sided: q1, .. },
                 SignedRank::Test { w_plus: p2, w_minus: m2, p_two_sided: q2, .. }) => {
                    prop_assert_eq!(p1, m2);
                    prop_assert_eq!(m1, p2);
                    prop_assert!((q1 - q2).abs() < 1e-12);
                    prop_assert!((0.0..=1.0).contains(&q1));
                }
                (x, y) => prop_assert_eq!(x, y),
            }
        }

        #[test]
        fn rank_sum_swap(a in prop::collection::vec(-5i32..5, 1..15), b in prop::collection::vec(-5i32..5, 1..15)) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let x = wilcoxon_rank_sum(&a, &b).unwrap();
            let y = wilcoxon_rank_sum(&b, &a).unwrap();
            prop_assert!((x.u + y.u - (a.len() * b.len()) as f64).abs() < 1e-9);
            prop_assert!((x.p_two_sided - y.p_two_sided).abs() < 1e-12);
        }

        #[test]
        fn summary_two_pass(xs in prop::collection::vec(-1e3f64..1e3, 2..40)) {
            let s = summarize(&xs).unwrap();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64;
            prop_assert!((s.mean - mean).abs() <= 1e-12 * mean.abs().max(1.0));
            prop_assert!((s.std - var.sqrt()).abs() <= 1e-12 * var.sqrt().max(1.0));
        }
    }
}
