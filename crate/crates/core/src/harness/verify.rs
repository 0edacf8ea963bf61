//! Small instances checked against brute-force optima at each algorithm's
//! guaranteed ratio.

use serde::Serialize;

use super::algorithm::{Algorithm, AlgorithmConfig, DEFAULT_MATROID_EPSILON};
use super::bench::cell_stream;
use super::generate::{gen_web, random_partition};
use crate::constraints::ConstraintSpec;
use crate::error::Result;
use crate::instance::{DiversityKind, Instance};
use crate::oracle::{brute_force_opt, ratio_against};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRow {
    pub instance_id: String,
    pub algorithm: Algorithm,
    pub ratio: f64,
    pub objective: f64,
    pub opt: f64,
    pub achieved: f64,
    pub pass: bool,
}

/// The guaranteed fraction of the optimum for `alg` on `inst`, if known.
pub fn guaranteed_ratio(alg: Algorithm, inst: &Instance) -> Option<f64> {
    let log_k = || inst.k().map(|k| (k as f64).log2()).filter(|l| *l > 0.0);
    let e = std::f64::consts::E;
    let kind = inst.diversity();
    let cardinality = inst.k().is_some();
    match (alg, kind) {
        (Algorithm::Greedy, DiversityKind::Sum) if cardinality => Some(0.5),
        (Algorithm::Greedy | Algorithm::GreedyMin, DiversityKind::Min) => Some(0.25),
        (Algorithm::Greedy | Algorithm::GreedyMst, DiversityKind::Mst) => log_k().map(|l| 1.0 / (3.0 * l)),
        (Algorithm::LocalSearch | Algorithm::LocalSearchWarm, DiversityKind::Sum) => Some(0.5),
        (Algorithm::Gsemo, DiversityKind::Sum) if cardinality => Some(0.5),
        (Algorithm::GsemoMin, DiversityKind::Min) => Some(0.25),
        (Algorithm::GsemoMst, DiversityKind::Mst) => log_k().map(|l| (1.0 - 1.0 / e) / (2.0 * l)),
        (Algorithm::GsemoMatroid, DiversityKind::Sum) => {
            Some(0.5 - DEFAULT_MATROID_EPSILON / (4.0 * inst.n() as f64))
        }
        _ => None,
    }
}

/// The bundled instances: three per problem family.
pub fn verify_instances(seed: u64) -> Result<Vec<(String, Instance, Vec<Algorithm>)>> {
    let root = RngStream::new(seed, 0);
    let mut out = Vec::new();
    for i in 0..3 {
        let s = |what: &str| root.derive(&format!("{what}-{i}"));
        let lambda = [0.5, 1.0, 2.0][i];
        out.push((
            format!("sum{i}"),
            gen_web(10, lambda, DiversityKind::Sum, ConstraintSpec::at_most(3), s("sum"))?,
            vec![Algorithm::Greedy, Algorithm::LocalSearch, Algorithm::Gsemo],
        ));
        out.push((
            format!("min{i}"),
            gen_web(10, lambda, DiversityKind::Min, ConstraintSpec::exactly(3), s("min"))?,
            vec![Algorithm::GreedyMin, Algorithm::GsemoMin],
        ));
        out.push((
            format!("mst{i}"),
            gen_web(10, lambda, DiversityKind::Mst, ConstraintSpec::exactly(4), s("mst"))?,
            vec![Algorithm::GreedyMst, Algorithm::GsemoMst],
        ));
        let partition = random_partition(11, 3, 2, s("partition"))?;
        out.push((
            format!("matroid{i}"),
            gen_web(11, lambda, DiversityKind::Sum, partition, s("matroid"))?,
            vec![Algorithm::LocalSearch, Algorithm::GsemoMatroid],
        ));
    }
    Ok(out)
}

/// Runs every bundled (instance, algorithm) pair once and checks its ratio.
pub fn run_verify(seed: u64) -> Result<Vec<VerifyRow>> {
    let mut rows = Vec::new();
    for (id, inst, algs) in verify_instances(seed)? {
        let opt = brute_force_opt(&inst)?.opt_value;
        for alg in algs {
            let ratio = guaranteed_ratio(alg, &inst).expect("bundled pairs have known ratios");
            let result = AlgorithmConfig::from(alg).run(&inst, cell_stream(seed, &id, alg, 0), 0)?;
            let check = ratio_against(result.objective, opt, ratio);
            rows.push(VerifyRow {
                instance_id: id.clone(),
                algorithm: alg,
                ratio,
                objective: result.objective,
                opt,
                achieved: check.achieved,
                pass: check.pass && result.feasible,
            });
        }
    }
    Ok(rows)
}
