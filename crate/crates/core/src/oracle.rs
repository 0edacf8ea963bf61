//! Brute-force ground truth and property checkers for small instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::{CardinalityMode, ConstraintSpec};
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::instance::{DiversityKind, Instance};
use crate::objectives::{objective_value, ModularQuality, Quality, QualityOracle};
use crate::subset::Subset;

/// Largest ground set [`brute_force_opt`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Largest ground set [`SubmodularityMode::Exhaustive`] accepts.
pub const EXHAUSTIVE_SUBMODULAR_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub opt_value: f64,
    pub opt_subset: Subset,
    /// Number of feasible subsets examined.
    pub enumerated: u64,
}

/// Enumeration order for [`brute_force_opt_ordered`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Forward,
    Reverse,
}

/// Exact optimum of `f + λ·div` over the final-feasible family.
pub fn brute_force_opt(inst: &Instance) -> Result<OptResult> {
    brute_force_opt_ordered(inst, Order::Forward)
}

/// As [`brute_force_opt`], with a choice of enumeration order. Ties keep the
/// first subset met.
pub fn brute_force_opt_ordered(inst: &Instance, order: Order) -> Result<OptResult> {
    let n = inst.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::GuardViolation { n, limit: BRUTE_FORCE_LIMIT });
    }
    let c = inst.constraint();
    let mut masks: Vec<u64> = match c {
        ConstraintSpec::Cardinality { k, mode } => {
            let k = (*k).min(n);
            let sizes = match mode {
                CardinalityMode::AtMost => 0..=k,
                CardinalityMode::Exact => k..=k,
            };
            sizes.flat_map(|s| masks_of_size(n, s)).collect()
        }
        ConstraintSpec::Partition(_) => (0..1u64 << n)
            .filter(|&m| c.is_independent(&Subset::from_mask(n, m)))
            .collect(),
    };
    if order == Order::Reverse {
        masks.reverse();
    }
    let mut best: Option<(f64, u64)> = None;
    for &m in &masks {
        let x = Subset::from_mask(n, m);
        debug_assert!(c.is_feasible_final(&x));
        let v = objective_value(&x, inst);
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, m));
        }
    }
    let (opt_value, mask) = best.ok_or_else(|| {
        Error::Inconsistent("the feasible family is empty".into())
    })?;
    Ok(OptResult {
        opt_value,
        opt_subset: Subset::from_mask(n, mask),
        enumerated: masks.len() as u64,
    })
}

/// All `n`-bit masks with `s` bits set, ascending (Gosper's hack).
fn masks_of_size(n: usize, s: usize) -> Vec<u64> {
    if s > n {
        return Vec::new();
    }
    if s == 0 {
        return vec![0];
    }
    let limit = 1u64 << n;
    let mut out = Vec::new();
    let mut m: u64 = (1u64 << s) - 1;
    while m < limit {
        out.push(m);
        let low = m & m.wrapping_neg();
        let ripple = m + low;
        m = (((ripple ^ m) >> 2) / low) | ripple;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioCheck {
    pub pass: bool,
    /// `objective / OPT`, or 1 when `OPT = 0`.
    pub achieved: f64,
    pub opt: f64,
}

/// Compares an achieved objective against `ratio·OPT` (slack `1e-9` on the ratio).
pub fn verify_ratio(objective: f64, inst: &Instance, ratio: f64) -> Result<RatioCheck> {
    let opt = brute_force_opt(inst)?.opt_value;
    Ok(ratio_against(objective, opt, ratio))
}

/// [`verify_ratio`] with a known optimum.
pub fn ratio_against(objective: f64, opt: f64, ratio: f64) -> RatioCheck {
    let achieved = if opt == 0.0 { 1.0 } else { objective / opt };
    RatioCheck {
        pass: achieved >= ratio - 1e-9,
        achieved,
        opt,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubmodularityMode {
    /// Every `X ⊆ Y ⊆ V` and `v ∉ Y`; needs `n <= 16`.
    Exhaustive,
    /// Random nested pairs.
    Sampled { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularityReport {
    pub checked: u64,
    pub violations: u64,
    /// Largest `Δ(v | Y) - Δ(v | X)` seen.
    pub worst_excess: f64,
    /// `(X, Y, v)` attaining `worst_excess` when it is a violation.
    pub counterexample: Option<(Subset, Subset, usize)>,
}

const SUBMODULAR_TOL: f64 = 1e-12;

/// Checks `f(X+v) - f(X) >= f(Y+v) - f(Y)` for nested `X ⊆ Y`, `v ∉ Y`.
pub fn check_submodular(
    oracle: &dyn QualityOracle,
    n: usize,
    mode: SubmodularityMode,
) -> Result<SubmodularityReport> {
    let mut report = SubmodularityReport {
        checked: 0,
        violations: 0,
        worst_excess: f64::NEG_INFINITY,
        counterexample: None,
    };
    let mut note = |x: u64, y: u64, v: usize, dx: f64, dy: f64| {
        report.checked += 1;
        let excess = dy - dx;
        if excess > SUBMODULAR_TOL {
            report.violations += 1;
        }
        if excess > report.worst_excess {
            report.worst_excess = excess;
            report.counterexample = (excess > SUBMODULAR_TOL)
                .then(|| (Subset::from_mask(n, x), Subset::from_mask(n, y), v));
        }
    };
    match mode {
        SubmodularityMode::Exhaustive => {
            if n > EXHAUSTIVE_SUBMODULAR_LIMIT {
                return Err(Error::GuardViolation {
                    n,
                    limit: EXHAUSTIVE_SUBMODULAR_LIMIT,
                });
            }
            let table: Vec<f64> = (0..1u64 << n)
                .map(|m| oracle.value(&Subset::from_mask(n, m)))
                .collect();
            for y in 0..1u64 << n {
                // every submask x of y
                let mut x = y;
                loop {
                    for v in (0..n).filter(|&v| y >> v & 1 == 0) {
                        let bit = 1u64 << v;
                        let dx = table[(x | bit) as usize] - table[x as usize];
                        let dy = table[(y | bit) as usize] - table[y as usize];
                        note(x, y, v, dx, dy);
                    }
                    if x == 0 {
                        break;
                    }
                    x = (x - 1) & y;
                }
            }
        }
        SubmodularityMode::Sampled { trials, seed } => {
            if n == 0 {
                return Ok(report);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                let mut xs = Subset::empty(n);
                let mut ys = Subset::empty(n);
                let v = rng.random_range(0..n);
                for u in (0..n).filter(|&u| u != v) {
                    if rng.random_bool(0.5) {
                        ys.insert(u);
                        if rng.random_bool(0.5) {
                            xs.insert(u);
                        }
                    }
                }
                let dx = oracle.marginal(&xs, v);
                let dy = oracle.marginal(&ys, v);
                report.checked += 1;
                let excess = dy - dx;
                if excess > SUBMODULAR_TOL {
                    report.violations += 1;
                }
                if excess > report.worst_excess {
                    report.worst_excess = excess;
                    report.counterexample = (excess > SUBMODULAR_TOL).then(|| (xs, ys, v));
                }
            }
        }
    }
    Ok(report)
}

/// Counts random `(X, v)` draws with `f(X+v) < f(X) - 1e-12`.
pub fn check_monotone(oracle: &dyn QualityOracle, n: usize, trials: u64, seed: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    for _ in 0..trials {
        let mut x = Subset::empty(n);
        for u in 0..n {
            if rng.random_bool(0.5) {
                x.insert(u);
            }
        }
        let v = rng.random_range(0..n);
        if oracle.marginal(&x, v) < -SUBMODULAR_TOL {
            violations += 1;
        }
    }
    violations
}

/// The trap instance for GSEMO on `f + λ·min_div`.
///
/// Items `0..n/2` have weight 1 and the rest weight 0. Item 0 sits at distance
/// `n/9` from every other item; all other distances are 1. `λ = 1`, `k = n/2`,
/// exact cardinality. The pair `{0, v}` with `v < n/2` scores `2 + n/9` while the
/// optimum is `n/2 + 1`.
pub fn hard_min_instance(n: usize) -> Result<Instance> {
    if n == 0 || n % 18 != 0 {
        return Err(Error::Inconsistent(format!(
            "hard instance needs n divisible by 18, got {n}"
        )));
    }
    let far = (n / 9) as f64;
    let weights = (0..n).map(|v| if v < n / 2 { 1.0 } else { 0.0 }).collect();
    let d = DistanceMatrix::from_fn(n, |i, _| if i == 0 { far } else { 1.0 })?;
    Instance::new(
        Quality::Modular(ModularQuality::new(weights)?),
        d,
        1.0,
        DiversityKind::Min,
        ConstraintSpec::exactly(n / 2),
    )
}
