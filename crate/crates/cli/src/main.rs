use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use invariant_entropy::blowup::{build_schedule, sample_blowup, BlowupSchedule, GammaTable, TailRule};
use invariant_entropy::entropy::{
    entropy_curve, exact_entropy_with_budget, mc_entropy, uniform_nr_entropy, CurvePoint, Method, DEFAULT_BUDGET,
};
use invariant_entropy::hypergraphon::{hypergraphon_from_json, StepHypergraphon};
use invariant_entropy::interdef::{FunctionElimination, Interdefinition, RedundancyElimination};
use invariant_entropy::rado::RadoHypergraph;
use invariant_entropy::sampler::sample;
use invariant_entropy::types::{ArityProfile, FiniteStructure, RedundantStructure};
use invariant_entropy::Error;

#[derive(Parser)]
#[command(name = "invent", version, about = "Invariant random structures and their entropy functions")]
struct Cli {
    /// Worker threads (defaults to all cores); results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tail {
    Zero,
    NonIncreasing,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Functions,
    Redundancy,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one structure from G(n, W).
    Sample {
        #[arg(long)]
        hypergraphon: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entropy h(n) of G(n, W) in bits.
    Entropy {
        #[arg(long)]
        hypergraphon: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "exact")]
        method: MethodArg,
        /// Monte Carlo sample count.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Required for the Monte Carlo method.
        #[arg(long)]
        seed: Option<u64>,
        /// Operation budget for a single exact evaluation (not the CSV curve).
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Write the curve for k ≤ n' ≤ n as CSV (n,h_bits,method,stderr).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Entropy of the uniform non-redundant measure, e.g. `--profile 1:2,2:1`.
    UniformEntropy {
        #[arg(long)]
        profile: ArityProfile,
        #[arg(long)]
        n: usize,
    },
    /// The explicit generations of the Rado k-hypergraph as JSON.
    Rado {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        gens: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Block sizes and masses of a blow-up schedule from a gamma table.
    BlowupSchedule {
        #[arg(long)]
        k: usize,
        /// CSV with columns n,gamma.
        #[arg(long)]
        gamma: PathBuf,
        #[arg(long)]
        rmax: usize,
        #[arg(long, value_enum, default_value = "zero")]
        tail: Tail,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw one structure from a blow-up of the Rado hypergraph.
    BlowupSample {
        #[arg(long)]
        sched: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eliminate selector functions or repeated-entry tuples (or undo it).
    Interdef {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        inverse: bool,
    },
    /// Check a hypergraphon for coherence; lists every violation.
    Validate {
        #[arg(long)]
        hypergraphon: PathBuf,
    },
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Other(String),
    Invalid(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn other(e: impl std::fmt::Display) -> Failure {
    Failure::Other(e.to_string())
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| other(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| other(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n")).map_err(|e| other(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn emit_json(value: &Value, out: Option<&Path>) -> Result<(), Failure> {
    emit(&serde_json::to_string_pretty(value).expect("JSON values serialize"), out)
}

fn load_hypergraphon(path: &Path) -> Result<StepHypergraphon, Failure> {
    Ok(hypergraphon_from_json(&read_json(path)?)?)
}

fn read_gamma(path: &Path, tail: Tail) -> Result<GammaTable, Failure> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| other(format!("{}: {e}", path.display())))?;
    let headers = reader.headers().map_err(other)?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| other(format!("{}: missing column `{name}`", path.display())))
    };
    let (n_col, g_col) = (col("n")?, col("gamma")?);
    let mut values = Vec::new();
    for row in reader.records() {
        let row = row.map_err(other)?;
        let n: u64 = row[n_col].trim().parse().map_err(|e| other(format!("bad n `{}`: {e}", &row[n_col])))?;
        let g: f64 = row[g_col].trim().parse().map_err(|e| other(format!("bad gamma `{}`: {e}", &row[g_col])))?;
        values.push((n, g));
    }
    let tail = match tail {
        Tail::Zero => TailRule::Zero,
        Tail::NonIncreasing => TailRule::NonIncreasing,
    };
    Ok(GammaTable::new(values, tail)?)
}

fn write_curve(path: &Path, points: &[CurvePoint]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| other(format!("{}: {e}", path.display())))?;
    w.write_record(["n", "h_bits", "method", "stderr"]).map_err(other)?;
    for p in points {
        let stderr = p.stderr.map(|s| format!("{s:?}")).unwrap_or_default();
        w.write_record([p.n.to_string(), format!("{:?}", p.h_bits), p.method.name().to_string(), stderr])
            .map_err(other)?;
    }
    w.flush().map_err(other)
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Sample { hypergraphon, n, seed, out } => {
            let w = load_hypergraphon(&hypergraphon)?;
            emit_json(&sample(&w, n, seed)?.to_json(), out.as_deref())
        }
        Command::Entropy { hypergraphon, n, method, samples, seed, budget, csv } => {
            let w = load_hypergraphon(&hypergraphon)?;
            let method = match method {
                MethodArg::Exact => Method::Exact,
                MethodArg::Mc => Method::MonteCarlo {
                    samples,
                    seed: seed.ok_or_else(|| other("--seed is required with --method mc"))?,
                },
            };
            if let Some(path) = csv {
                let curve = entropy_curve(&w, n, method)?;
                write_curve(&path, &curve.points)?;
                let last = curve.points.last().expect("n ≥ k");
                return emit(&format!("{:?}", last.h_bits), None);
            }
            match method {
                Method::Exact => emit(&format!("{:?}", exact_entropy_with_budget(&w, n, budget)?), None),
                Method::MonteCarlo { samples, seed } => {
                    let e = mc_entropy(&w, n, samples, seed)?;
                    emit(&format!("{:?} {:?}", e.estimate, e.stderr), None)
                }
            }
        }
        Command::UniformEntropy { profile, n } => emit(&uniform_nr_entropy(&profile, n).to_string(), None),
        Command::Rado { k, gens, out } => {
            let rado = match gens {
                Some(g) => RadoHypergraph::new(k, g)?,
                None => RadoHypergraph::with_default_generations(k)?,
            };
            emit_json(&rado.to_json(), out.as_deref())
        }
        Command::BlowupSchedule { k, gamma, rmax, tail, out } => {
            let table = read_gamma(&gamma, tail)?;
            emit_json(&build_schedule(&table, k, rmax)?.to_json(), out.as_deref())
        }
        Command::BlowupSample { sched, n, seed, out } => {
            let sched = BlowupSchedule::from_json(&read_json(&sched)?)?;
            let rado = RadoHypergraph::with_default_generations(sched.k())?;
            emit_json(&sample_blowup(&sched, &rado, n, seed)?.to_json(), out.as_deref())
        }
        Command::Interdef { kind, input, out, inverse } => {
            let value = read_json(&input)?;
            let result = match (kind, inverse) {
                (Kind::Functions, false) => {
                    let m = FiniteStructure::from_json(&value)?;
                    FunctionElimination::new(m.signature().clone())?.forward(&m)?.to_json()
                }
                (Kind::Functions, true) => {
                    let m = RedundantStructure::from_json(&value)?;
                    FunctionElimination::from_target(m.signature())?.backward(&m)?.to_json()
                }
                (Kind::Redundancy, false) => {
                    let m = RedundantStructure::from_json(&value)?;
                    RedundancyElimination::new(m.signature().clone())?.forward(&m)?.to_json()
                }
                (Kind::Redundancy, true) => {
                    let m = FiniteStructure::from_json(&value)?;
                    RedundancyElimination::from_target(m.signature())?.backward(&m)?.to_json()
                }
            };
            emit_json(&result, out.as_deref())
        }
        Command::Validate { hypergraphon } => {
            let w = load_hypergraphon(&hypergraphon)?;
            let violations = w.validate();
            if violations.is_empty() {
                emit("coherent", None)
            } else {
                Err(Failure::Invalid(violations.iter().map(ToString::to_string).collect()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .expect("thread pool is configured once");
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let mut stderr = std::io::stderr().lock();
            let code = match failure {
                Failure::Lib(e @ Error::ResourceLimit { .. }) => {
                    let _ = writeln!(stderr, "error: {e}");
                    2
                }
                Failure::Lib(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    1
                }
                Failure::Other(msg) => {
                    let _ = writeln!(stderr, "error: {msg}");
                    1
                }
                Failure::Invalid(lines) => {
                    let _ = writeln!(stderr, "incoherent: {} violations", lines.len());
                    for l in lines {
                        let _ = writeln!(stderr, "{l}");
                    }
                    1
                }
            };
            ExitCode::from(code)
        }
    }
}
