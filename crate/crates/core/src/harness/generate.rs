//! Random instance generators.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::constraints::ConstraintSpec;
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::instance::{DiversityKind, Instance};
use crate::objectives::{ModularQuality, Quality};
use crate::rng::RngStream;

/// Weights drawn from `U[0,1]` and distances from `U[1,2]`, which is always a
/// metric since any two distances sum to at least 2.
pub fn web_parts(n: usize, stream: RngStream) -> Result<(ModularQuality, DistanceMatrix)> {
    if n < 2 {
        return Err(Error::Inconsistent(format!("need at least 2 documents, got {n}")));
    }
    let mut rng = stream.rng();
    let weights = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
    let d = DistanceMatrix::from_fn(n, |_, _| rng.random_range(1.0..=2.0))?;
    Ok((ModularQuality::new(weights)?, d))
}

/// A synthetic web-search instance: sum diversity, at most `k` documents.
pub fn gen_synthetic_web(n: usize, k: usize, lambda: f64, seed: u64) -> Result<Instance> {
    gen_web(n, lambda, DiversityKind::Sum, ConstraintSpec::at_most(k), RngStream::new(seed, 0))
}

/// Web-style weights and distances under any diversity kind and constraint.
pub fn gen_web(
    n: usize,
    lambda: f64,
    diversity: DiversityKind,
    constraint: ConstraintSpec,
    stream: RngStream,
) -> Result<Instance> {
    let (q, d) = web_parts(n, stream)?;
    Instance::new(Quality::Modular(q), d, lambda, diversity, constraint)
}

/// Splits `0..n` into `parts` random nonempty blocks and draws each cap from
/// `1..=max_cap` (capped at the block size).
pub fn random_partition(
    n: usize,
    parts: usize,
    max_cap: usize,
    stream: RngStream,
) -> Result<ConstraintSpec> {
    if parts == 0 || parts > n || max_cap == 0 {
        return Err(Error::InvalidConstraint(format!(
            "cannot split {n} items into {parts} parts with caps up to {max_cap}"
        )));
    }
    let mut rng = stream.rng();
    let mut items: Vec<usize> = (0..n).collect();
    items.shuffle(&mut rng);
    let mut blocks = vec![Vec::new(); parts];
    for (i, v) in items.into_iter().enumerate() {
        let b = if i < parts { i } else { rng.random_range(0..parts) };
        blocks[b].push(v);
    }
    for b in &mut blocks {
        b.sort_unstable();
    }
    let caps = blocks
        .iter()
        .map(|b| rng.random_range(1..=max_cap.min(b.len())))
        .collect();
    ConstraintSpec::partition(n, blocks, caps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::validate_metric;

    #[test]
    fn web_is_metric_and_reproducible() {
        for seed in 0..20 {
            let a = gen_synthetic_web(30, 5, 1.0, seed).unwrap();
            assert!(validate_metric(a.distance()).metric);
            assert_eq!(a, gen_synthetic_web(30, 5, 1.0, seed).unwrap());
            let (lo, hi) = a.distance().off_diagonal_range().unwrap();
            assert!(lo >= 1.0 && hi <= 2.0);
        }
        assert_ne!(gen_synthetic_web(30, 5, 1.0, 0).unwrap(), gen_synthetic_web(30, 5, 1.0, 1).unwrap());
        assert!(gen_synthetic_web(1, 1, 1.0, 0).is_err());
    }

    #[test]
    fn partitions_cover_everything() {
        for s in 0..30 {
            let c = random_partition(12, 3, 2, RngStream::new(s, 1)).unwrap();
            let ConstraintSpec::Partition(p) = &c else { panic!() };
            let mut all: Vec<_> = p.parts().iter().flatten().copied().collect();
            all.sort_unstable();
            assert_eq!(all, (0..12).collect::<Vec<_>>());
            assert!(p.caps().iter().all(|&c| (1..=2).contains(&c)));
            assert!(c.rank(12).0 <= 6);
        }
    }
}
