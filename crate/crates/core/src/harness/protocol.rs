//! Repeated dynamic runs from greedy starts.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::generate::gen_web;
use crate::algorithms::greedy_sum;
use crate::constraints::ConstraintSpec;
use crate::dynamic::{run_dynamic, DynamicAlgorithm, DynamicSchedule};
use crate::error::{Error, Result};
use crate::formulations::Formulation;
use crate::instance::{DiversityKind, Instance};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicProtocol {
    /// Used for fresh web instances when no base instance is given.
    pub n: usize,
    pub k: usize,
    pub lambda: f64,
    /// Perturbations per change.
    pub m: usize,
    /// Evaluations per change; `10·r·n` when absent, `r` being the rank.
    pub t: Option<u64>,
    pub changes: usize,
    pub trials: u64,
    pub seed: u64,
}

impl DynamicProtocol {
    pub const ALGORITHMS: [DynamicAlgorithm; 2] = [
        DynamicAlgorithm::Gsemo(Formulation::MatroidSum),
        DynamicAlgorithm::LocalSearch { max_swaps: 1 },
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolRow {
    pub trial: u64,
    pub change_index: usize,
    pub algorithm: String,
    pub objective: f64,
    pub evaluations: u64,
}

fn run_trial(p: &DynamicProtocol, base: Option<&Instance>, trial: u64) -> Result<Vec<ProtocolRow>> {
    let inst0 = match base {
        Some(inst) => inst.clone(),
        None => gen_web(
            p.n,
            p.lambda,
            DiversityKind::Sum,
            ConstraintSpec::at_most(p.k),
            RngStream::for_cell(p.seed, trial, "instance"),
        )?,
    };
    let rank = inst0.constraint().rank(inst0.n()).0 as u64;
    let t = p.t.unwrap_or(10 * rank * inst0.n() as u64);
    let schedule = DynamicSchedule::sample(
        RngStream::for_cell(p.seed, trial, "schedule"),
        &inst0,
        p.changes,
        p.m,
        t,
    )?;
    let initial = greedy_sum(&inst0)?.best;
    let run = run_dynamic(
        &inst0,
        &schedule,
        &DynamicProtocol::ALGORITHMS,
        &initial,
        RngStream::for_cell(p.seed, trial, "search"),
    )?;
    Ok(run
        .records
        .into_iter()
        .map(|r| ProtocolRow {
            trial,
            change_index: r.change_index,
            algorithm: r.algorithm,
            objective: r.objective,
            evaluations: r.evaluations,
        })
        .collect())
}

/// Runs every trial (in parallel) and returns rows ordered by trial, change
/// and algorithm.
pub fn run_dynamic_protocol(p: &DynamicProtocol, base: Option<&Instance>) -> Result<Vec<ProtocolRow>> {
    if p.trials == 0 {
        return Err(Error::InvalidBudget("need at least one trial".into()));
    }
    let per_trial: Vec<Result<Vec<ProtocolRow>>> =
        (0..p.trials).into_par_iter().map(|i| run_trial(p, base, i)).collect();
    Ok(per_trial.into_iter().collect::<Result<Vec<_>>>()?.concat())
}

/// Mean objective per `(change_index, algorithm)` across trials.
pub fn protocol_means(rows: &[ProtocolRow]) -> BTreeMap<(usize, String), f64> {
    let mut acc: BTreeMap<(usize, String), (f64, usize)> = BTreeMap::new();
    for r in rows {
        let e = acc.entry((r.change_index, r.algorithm.clone())).or_default();
        e.0 += r.objective;
        e.1 += 1;
    }
    acc.into_iter().map(|(key, (s, c))| (key, s / c as f64)).collect()
}

pub fn protocol_csv(rows: &[ProtocolRow]) -> String {
    let mut out = String::from("trial,change_index,algorithm,objective,evaluations\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.trial, r.change_index, r.algorithm, r.objective, r.evaluations
        ));
    }
    out
}
