//! Benchmark plans: instances × algorithms × seeds, run in parallel.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::algorithm::{Algorithm, AlgorithmConfig};
use super::generate::web_parts;
use super::stats::{summarize, wilcoxon_signed_rank, SignedRank, Summary};
use super::trace::{trace_export, Curve};
use crate::algorithms::RunResult;
use crate::constraints::ConstraintSpec;
use crate::error::{Error, Result};
use crate::instance::{DiversityKind, Instance};
use crate::objectives::Quality;
use crate::rng::RngStream;

pub const RESULTS_HEADER: [&str; 8] = [
    "instance_id",
    "algorithm",
    "seed",
    "k",
    "lambda",
    "objective",
    "evaluations",
    "wallclock_ms",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSource {
    /// `count` fresh web instances with `n` documents each.
    SyntheticWeb { n: usize, count: usize },
    /// Instance files; relative paths resolve against the plan's directory.
    Files(Vec<PathBuf>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchPlan {
    pub instances: InstanceSource,
    pub algorithms: Vec<AlgorithmConfig>,
    /// Trials per (instance, algorithm) cell; trial `i` is reported as seed `i`.
    #[serde(default = "one")]
    pub seeds: u64,
    #[serde(default)]
    pub master_seed: u64,
    /// Cardinality sweep; empty keeps each file's own constraint.
    #[serde(default)]
    pub k: Vec<usize>,
    /// Tradeoff sweep; empty keeps each file's own value.
    #[serde(default)]
    pub lambda: Vec<f64>,
    #[serde(default)]
    pub trace_stride: u64,
    /// Worker threads; all cores when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Output directory, unless given on the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn one() -> u64 {
    1
}

impl BenchPlan {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut plan = Self::from_json(&std::fs::read_to_string(path)?)?;
        if let (InstanceSource::Files(files), Some(dir)) = (&mut plan.instances, path.parent()) {
            for f in files.iter_mut().filter(|f| f.is_relative()) {
                *f = dir.join(&*f);
            }
        }
        Ok(plan)
    }

    fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::Inconsistent("plan lists no algorithms".into()));
        }
        if self.seeds == 0 {
            return Err(Error::InvalidBudget("plan needs at least one seed".into()));
        }
        if let Some(&l) = self.lambda.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return Err(Error::Inconsistent(format!("lambda = {l} must be finite and >= 0")));
        }
        if matches!(self.instances, InstanceSource::SyntheticWeb { .. })
            && (self.k.is_empty() || self.lambda.is_empty())
        {
            return Err(Error::Inconsistent("synthetic instances need k and lambda axes".into()));
        }
        Ok(())
    }

    /// Every instance of the plan with its id, in plan order.
    pub fn instances(&self) -> Result<Vec<(String, Instance)>> {
        self.validate()?;
        let mut out = Vec::new();
        match &self.instances {
            InstanceSource::SyntheticWeb { n, count } => {
                for i in 0..*count {
                    let stream = RngStream::new(self.master_seed, 0).derive(&format!("web-{i}"));
                    let (q, d) = web_parts(*n, stream)?;
                    let base = Instance::new(
                        Quality::Modular(q),
                        d,
                        0.0,
                        DiversityKind::Sum,
                        ConstraintSpec::at_most(0),
                    )?;
                    self.sweep(&format!("web{i}"), &base, &mut out)?;
                }
            }
            InstanceSource::Files(files) => {
                for f in files {
                    let stem = f
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| f.display().to_string());
                    self.sweep(&stem, &Instance::load(f)?, &mut out)?;
                }
            }
        }
        Ok(out)
    }

    fn sweep(&self, base_id: &str, base: &Instance, out: &mut Vec<(String, Instance)>) -> Result<()> {
        let ks: Vec<Option<usize>> = if self.k.is_empty() {
            vec![None]
        } else {
            self.k.iter().copied().map(Some).collect()
        };
        let lambdas: Vec<Option<f64>> = if self.lambda.is_empty() {
            vec![None]
        } else {
            self.lambda.iter().copied().map(Some).collect()
        };
        for &k in &ks {
            let with_k = match k {
                None => base.clone(),
                Some(k) => {
                    let c = match base.constraint() {
                        ConstraintSpec::Cardinality { mode, .. } => ConstraintSpec::Cardinality { k, mode: *mode },
                        ConstraintSpec::Partition(_) => {
                            return Err(Error::Inconsistent(format!(
                                "{base_id}: a k axis needs a cardinality constraint"
                            )))
                        }
                    };
                    base.with_constraint(c)?
                }
            };
            for &l in &lambdas {
                let inst = match l {
                    None => with_k.clone(),
                    Some(l) => with_k.with_lambda(l)?,
                };
                let mut id = base_id.to_string();
                if let Some(k) = k {
                    id.push_str(&format!("_k{k}"));
                }
                if let Some(l) = l {
                    id.push_str(&format!("_l{l}"));
                }
                out.push((id, inst));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance_id: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    /// Cardinality, or the matroid rank for partition constraints.
    pub k: usize,
    pub lambda: f64,
    pub objective: f64,
    pub evaluations: u64,
    pub wallclock_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// The full result behind each row.
    pub runs: Vec<RunResult>,
    /// Algorithm order of the plan; the first is the reference in comparisons.
    pub algorithms: Vec<Algorithm>,
}

/// Stream for one cell; depends only on the master seed and the cell's coordinates.
pub fn cell_stream(master_seed: u64, instance_id: &str, algorithm: Algorithm, seed: u64) -> RngStream {
    RngStream::for_cell(master_seed, seed, &format!("{instance_id}/{algorithm}"))
}

pub fn run_bench(plan: &BenchPlan) -> Result<BenchReport> {
    let instances = plan.instances()?;
    let mut seen = std::collections::HashSet::new();
    if let Some(a) = plan.algorithms.iter().find(|a| !seen.insert(a.name)) {
        return Err(Error::Inconsistent(format!("{} is listed twice", a.name)));
    }
    let jobs: Vec<(usize, &AlgorithmConfig, u64)> = (0..instances.len())
        .flat_map(|i| {
            plan.algorithms
                .iter()
                .flat_map(move |a| (0..plan.seeds).map(move |s| (i, a, s)))
        })
        .collect();
    let run_job = |&(i, alg, seed): &(usize, &AlgorithmConfig, u64)| -> Result<(BenchRow, RunResult)> {
        let (id, inst) = &instances[i];
        let stream = cell_stream(plan.master_seed, id, alg.name, seed);
        let started = Instant::now();
        let result = alg.run(inst, stream, plan.trace_stride)?;
        let wallclock_ms = started.elapsed().as_secs_f64() * 1e3;
        let row = BenchRow {
            instance_id: id.clone(),
            algorithm: alg.name,
            seed,
            k: inst.k().unwrap_or_else(|| inst.constraint().rank(inst.n()).0),
            lambda: inst.lambda(),
            objective: result.objective,
            evaluations: result.evaluations,
            wallclock_ms,
        };
        Ok((row, result))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Inconsistent(format!("thread pool: {e}")))?;
    let done: Vec<Result<(BenchRow, RunResult)>> = pool.install(|| jobs.par_iter().map(run_job).collect());
    let (rows, runs) = done.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    Ok(BenchReport {
        rows,
        runs,
        algorithms: plan.algorithms.iter().map(|a| a.name).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellStats {
    pub instance_id: String,
    pub algorithm: Algorithm,
    pub summary: Summary,
    /// Signed-rank test of the reference algorithm against this one, paired by seed.
    pub versus_reference: Option<SignedRank>,
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w).map_err(|e| Error::Parse(e.to_string()))?;
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

impl BenchReport {
    fn cells(&self) -> Vec<(&str, Algorithm, Vec<usize>)> {
        let mut cells: Vec<(&str, Algorithm, Vec<usize>)> = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            match cells.last_mut() {
                Some((id, a, idx)) if *id == r.instance_id && *a == r.algorithm => idx.push(i),
                _ => cells.push((&r.instance_id, r.algorithm, vec![i])),
            }
        }
        cells
    }

    pub fn stats(&self) -> Result<Vec<CellStats>> {
        let cells = self.cells();
        let objectives = |idx: &[usize]| -> Vec<f64> { idx.iter().map(|&i| self.rows[i].objective).collect() };
        let mut out = Vec::with_capacity(cells.len());
        for (id, alg, idx) in &cells {
            let xs = objectives(idx);
            let reference = self.algorithms.first().copied();
            let versus_reference = match reference {
                Some(r) if r != *alg => {
                    let ref_idx = &cells
                        .iter()
                        .find(|(cid, a, _)| cid == id && *a == r)
                        .expect("every cell is run")
                        .2;
                    Some(wilcoxon_signed_rank(&objectives(ref_idx), &xs)?)
                }
                _ => None,
            };
            out.push(CellStats {
                instance_id: id.to_string(),
                algorithm: *alg,
                summary: summarize(&xs)?,
                versus_reference,
            });
        }
        Ok(out)
    }

    pub fn results_csv(&self) -> Result<String> {
        csv_string(|w| {
            w.write_record(RESULTS_HEADER)?;
            for r in &self.rows {
                w.write_record([
                    r.instance_id.clone(),
                    r.algorithm.to_string(),
                    r.seed.to_string(),
                    r.k.to_string(),
                    r.lambda.to_string(),
                    r.objective.to_string(),
                    r.evaluations.to_string(),
                    format!("{:.3}", r.wallclock_ms),
                ])?;
            }
            Ok(())
        })
    }

    pub fn stats_csv(&self) -> Result<String> {
        let stats = self.stats()?;
        let reference = self.algorithms.first().map(|a| a.to_string()).unwrap_or_default();
        csv_string(|w| {
            w.write_record(["instance_id", "algorithm", "trials", "mean", "std", "reference", "w", "p_value"])?;
            for s in &stats {
                let (refname, wstat, p) = match s.versus_reference {
                    None => (String::new(), String::new(), String::new()),
                    Some(SignedRank::Inconclusive { .. }) => (reference.clone(), String::new(), "inconclusive".into()),
                    Some(SignedRank::Test { w, p_two_sided, .. }) => {
                        (reference.clone(), w.to_string(), p_two_sided.to_string())
                    }
                };
                w.write_record([
                    s.instance_id.clone(),
                    s.algorithm.to_string(),
                    s.summary.trials.to_string(),
                    s.summary.mean.to_string(),
                    s.summary.std.to_string(),
                    refname,
                    wstat,
                    p,
                ])?;
            }
            Ok(())
        })
    }

    /// One mean curve per (instance, algorithm) cell.
    pub fn curves(&self) -> Result<Vec<(String, Curve)>> {
        self.cells()
            .into_iter()
            .map(|(id, alg, idx)| {
                let runs: Vec<&RunResult> = idx.iter().map(|&i| &self.runs[i]).collect();
                Ok((id.to_string(), trace_export(alg.name(), &runs)?))
            })
            .collect()
    }
}
