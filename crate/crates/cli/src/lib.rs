//! Argument parsing and subcommands for the `diversify` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use diversify::harness::{
    gen_web, protocol_csv, protocol_means, run_bench, run_dynamic_protocol, run_verify, Algorithm,
    AlgorithmConfig, BenchPlan, DynamicProtocol,
};
use diversify::ingest::{mi_instance, parse_table};
use diversify::oracle::hard_min_instance;
use diversify::{ConstraintSpec, DiversityKind, Instance, RngStream};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "diversify", version, about = "Quality-plus-diversity subset selection")]
struct Cli {
    /// Master seed for generators and randomized algorithms.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (a directory for `bench`); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record a best-so-far trace point every this many evaluations (0 = off).
    #[arg(long, global = true)]
    trace_stride: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Sum,
    Min,
    Mst,
}

impl From<Kind> for DiversityKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Sum => DiversityKind::Sum,
            Kind::Min => DiversityKind::Min,
            Kind::Mst => DiversityKind::Mst,
        }
    }
}

#[derive(Debug, Args)]
struct Shape {
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic web-search instance.
    Gen {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[command(flatten)]
        shape: Shape,
        #[arg(long, value_enum, default_value_t = Kind::Sum)]
        diversity: Kind,
        /// Require exactly k items (implied for min and mst).
        #[arg(long)]
        exact: bool,
    },
    /// Build a feature-selection instance from feature and label tables.
    Featurize {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        /// Labels counted per feature in the quality function.
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[command(flatten)]
        shape: Shape,
    },
    /// Run one algorithm on one instance and print the result as JSON.
    Run {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "gsemo")]
        algorithm: String,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        max_swaps: Option<u8>,
    },
    /// Run a benchmark plan and write results, statistics and traces.
    Bench {
        #[arg(long)]
        plan: PathBuf,
    },
    /// Perturb the objective repeatedly and re-optimize from warm starts.
    Dynamic {
        /// Base instance; fresh web instances are drawn per trial when absent.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[command(flatten)]
        shape: Shape,
        /// Perturbations per change.
        #[arg(long, default_value_t = 50)]
        m: usize,
        /// Evaluations per change (default 10·k·n).
        #[arg(long)]
        t: Option<u64>,
        #[arg(long, default_value_t = 10)]
        changes: usize,
        #[arg(long, default_value_t = 10)]
        trials: u64,
    },
    /// Check every algorithm's guaranteed ratio on small bundled instances.
    Verify,
    /// Write the min-diversity instance on which plain GSEMO gets stuck.
    Hard {
        #[arg(long, default_value_t = 18)]
        n: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<diversify::Error> for Failure {
    fn from(e: diversify::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

/// Parses `argv` (program name first) and runs the subcommand, returning the
/// process exit code.
pub fn cli_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    cli_dispatch_to(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`cli_dispatch`] with explicit output streams.
pub fn cli_dispatch_to<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\nFor more information, try '--help'.");
            EXIT_USAGE
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_DATA
        }
    }
}

fn at(path: &Path) -> impl Fn(diversify::Error) -> Failure + '_ {
    move |e| Failure::Data(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn emit(out_path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match out_path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_instance(out_path: Option<&Path>, inst: &Instance, out: &mut dyn Write) -> Result<(), Failure> {
    emit(out_path, &(inst.to_json() + "\n"), out)
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let seed = cli.seed.unwrap_or(0);
    let out_path = cli.out.as_deref();
    let stride = cli.trace_stride.unwrap_or(0);
    match cli.command {
        Command::Gen {
            n,
            shape,
            diversity,
            exact,
        } => {
            let kind = DiversityKind::from(diversity);
            let constraint = if exact || kind != DiversityKind::Sum {
                ConstraintSpec::exactly(shape.k)
            } else {
                ConstraintSpec::at_most(shape.k)
            };
            let inst = gen_web(n, shape.lambda, kind, constraint, RngStream::new(seed, 0))?;
            emit_instance(out_path, &inst, out)?;
        }
        Command::Featurize {
            features,
            labels,
            p,
            shape,
        } => {
            let f = parse_table(&read(&features)?).map_err(at(&features))?;
            let l = parse_table(&read(&labels)?).map_err(at(&labels))?;
            let inst = mi_instance(&f, &l, p, shape.lambda, ConstraintSpec::at_most(shape.k))?;
            emit_instance(out_path, &inst, out)?;
        }
        Command::Run {
            instance,
            algorithm,
            budget,
            epsilon,
            max_swaps,
        } => {
            let name: Algorithm = algorithm.parse().map_err(|e: diversify::Error| Failure::Usage(e.to_string()))?;
            let inst = Instance::load(&instance).map_err(at(&instance))?;
            let cfg = AlgorithmConfig {
                name,
                budget,
                epsilon,
                max_swaps,
            };
            let result = cfg.run(&inst, RngStream::for_cell(seed, 0, name.name()), stride)?;
            let json = serde_json::to_string_pretty(&result).map_err(|e| Failure::Data(e.to_string()))?;
            emit(out_path, &(json + "\n"), out)?;
        }
        Command::Bench { plan } => {
            let mut plan = BenchPlan::load(&plan).map_err(at(&plan))?;
            if let Some(s) = cli.seed {
                plan.master_seed = s;
            }
            if let Some(s) = cli.trace_stride {
                plan.trace_stride = s;
            }
            let dir = cli
                .out
                .clone()
                .or_else(|| plan.out.clone())
                .ok_or_else(|| Failure::Usage("bench needs --out or an `out` entry in the plan".into()))?;
            let report = run_bench(&plan)?;
            fs::create_dir_all(&dir)?;
            fs::write(dir.join("results.csv"), report.results_csv()?)?;
            fs::write(dir.join("stats.csv"), report.stats_csv()?)?;
            if plan.trace_stride > 0 {
                let traces = dir.join("traces");
                fs::create_dir_all(&traces)?;
                for (id, curve) in report.curves()? {
                    fs::write(traces.join(format!("{id}__{}.csv", curve.algorithm)), curve.to_csv())?;
                }
            }
            writeln!(out, "{} rows written to {}", report.rows.len(), dir.display())?;
        }
        Command::Dynamic {
            instance,
            n,
            shape,
            m,
            t,
            changes,
            trials,
        } => {
            let base = match instance.as_deref() {
                Some(p) => Some(Instance::load(p).map_err(at(p))?),
                None => None,
            };
            let protocol = DynamicProtocol {
                n,
                k: shape.k,
                lambda: shape.lambda,
                m,
                t,
                changes,
                trials,
                seed,
            };
            let rows = run_dynamic_protocol(&protocol, base.as_ref())?;
            let csv = protocol_csv(&rows);
            match out_path {
                Some(p) => {
                    fs::write(p, csv)?;
                    writeln!(out, "change_index,algorithm,mean_objective")?;
                    for ((change, alg), mean) in protocol_means(&rows) {
                        writeln!(out, "{change},{alg},{mean}")?;
                    }
                }
                None => out.write_all(csv.as_bytes())?,
            }
        }
        Command::Verify => {
            let rows = run_verify(seed)?;
            let mut text = String::from("instance_id,algorithm,ratio,achieved,status\n");
            for r in &rows {
                text.push_str(&format!(
                    "{},{},{:.6},{:.6},{}\n",
                    r.instance_id,
                    r.algorithm,
                    r.ratio,
                    r.achieved,
                    if r.pass { "PASS" } else { "FAIL" }
                ));
            }
            emit(out_path, &text, out)?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            if failed > 0 {
                return Err(Failure::Data(format!("{failed} of {} checks failed", rows.len())));
            }
        }
        Command::Hard { n } => {
            let inst = hard_min_instance(n)?;
            emit_instance(out_path, &inst, out)?;
        }
    }
    Ok(EXIT_OK)
}
