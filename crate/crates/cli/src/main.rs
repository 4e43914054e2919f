//! Batch experiment runner for planar last-passage percolation.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 runtime failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lpp_cli::config::{self, parse_count, DistSpec, ExperimentSpec, Family, MethodKind, OutputFormat};
use lpp_cli::runner::{self, CliError};
use lpp_cli::{report, rows};

#[derive(Parser)]
#[command(
    name = "lpp",
    version,
    about = "Last-passage percolation experiments: passage values, geodesics, and tail rates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the dynamic program against brute-force path enumeration
    Verify(RunArgs),
    /// Estimate the growth constant G/n in a fixed direction
    Shape(RunArgs),
    /// Estimate P(G >= r n) in a fixed direction
    Tail(RunArgs),
    /// Subadditive upper bounds -log(p)/n across scales
    Fekete(RunArgs),
    /// Midpoint transversal tail P(Mid . e1 >= floor(n/2 + t n))
    Midpoint(RunArgs),
    /// Point-to-line endpoint tail
    Endpoint(RunArgs),
    /// Exact-location corner event P(Mid . e1 = floor(n/2 + t n)), t = 1/2 by default
    Corner(RunArgs),
    /// Cross-check the transversal rate against the passage-value rate
    Identity(RunArgs),
    /// Down-tilted left-tail scan P(G <= (mu0 - eps) n)
    LeftTail(RunArgs),
    /// Exact midpoint law of the uniformly random up-right walk
    UniformWalk(RunArgs),
    /// Summarize emitted rows; fits the rate slope where applicable
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat TOML config; flags override its keys
    #[arg(long)]
    config: Option<PathBuf>,
    /// Weight law: exp:RATE or gamma:SHAPE:RATE
    #[arg(long)]
    dist: Option<String>,
    /// Direction parameter in [0, 1/2]
    #[arg(long)]
    t: Option<f64>,
    /// Tail level in units of n
    #[arg(long)]
    r: Option<f64>,
    /// Left-tail depth below mu0
    #[arg(long)]
    eps: Option<f64>,
    /// Single lattice scale
    #[arg(long, conflicts_with = "n_list")]
    n: Option<u32>,
    /// Scales as an inclusive range a..b:step
    #[arg(long = "n-list")]
    n_list: Option<String>,
    /// Midpoint offset for uniform-walk (defaults to the corner n/2)
    #[arg(long, allow_hyphen_values = true)]
    k: Option<i64>,
    /// Replicates per cell; accepts scientific notation (1e6)
    #[arg(long, value_parser = parse_count)]
    samples: Option<u64>,
    /// Replicates per side for identity
    #[arg(long, value_parser = parse_count)]
    budget: Option<u64>,
    /// Largest scale for verify
    #[arg(long = "max-n")]
    max_n: Option<u32>,
    /// Random fields per scale for verify
    #[arg(long, value_parser = parse_count)]
    fields: Option<u64>,
    /// direct or tilted
    #[arg(long)]
    method: Option<String>,
    /// Tilt parameter; defaults to the Cramér-style solution for (t, r)
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Corridor halfwidth; defaults to the capped fluctuation scale
    #[arg(long)]
    halfwidth: Option<u32>,
    /// Diagonal growth constant when the law has no closed form
    #[arg(long)]
    mu0: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 or unset means all cores (env LPP_WORKERS)
    #[arg(long)]
    workers: Option<usize>,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or jsonl
    #[arg(long)]
    format: Option<String>,
    /// Record wall-clock time per row (breaks byte-identical reruns)
    #[arg(long)]
    timing: bool,
    /// Write the resolved configuration to a file and exit
    #[arg(long = "emit-config")]
    emit_config: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// CSV emitted by a run
    #[arg(long = "in")]
    input: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Report(args) => match report::report(&args.input) {
            Ok(text) => {
                print!("{text}");
                Ok(())
            }
            Err(e) => Err(e),
        },
        other => {
            let (family, args) = match other {
                Command::Verify(a) => (Family::Verify, a),
                Command::Shape(a) => (Family::Shape, a),
                Command::Tail(a) => (Family::Tail, a),
                Command::Fekete(a) => (Family::Fekete, a),
                Command::Midpoint(a) => (Family::Midpoint, a),
                Command::Endpoint(a) => (Family::Endpoint, a),
                Command::Corner(a) => (Family::Corner, a),
                Command::Identity(a) => (Family::Identity, a),
                Command::LeftTail(a) => (Family::LeftTail, a),
                Command::UniformWalk(a) => (Family::UniformWalk, a),
                Command::Report(_) => unreachable!(),
            };
            build_and_run(family, args)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CliError::Validation(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e @ CliError::Runtime(_)) => {
            eprintln!("{e}");
            ExitCode::from(3)
        }
    }
}

fn build_and_run(family: Family, args: RunArgs) -> Result<(), CliError> {
    let spec = resolve_spec(family, args)?;
    let rows = runner::run(&spec)?;
    if rows.is_empty() {
        return Ok(());
    }
    let encoded = match spec.format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            rows::write_csv(&mut buf, &rows).map_err(CliError::Runtime)?;
            buf
        }
        OutputFormat::Jsonl => {
            let mut buf = Vec::new();
            rows::write_jsonl(&mut buf, &rows).map_err(CliError::Runtime)?;
            buf
        }
    };
    match &spec.out {
        Some(path) => std::fs::write(path, encoded)
            .map_err(|e| CliError::Runtime(format!("cannot write {path:?}: {e}")))?,
        None => {
            std::io::stdout()
                .write_all(&encoded)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
        }
    }
    Ok(())
}

fn resolve_spec(family: Family, args: RunArgs) -> Result<ExperimentSpec, CliError> {
    let mut spec = match &args.config {
        Some(path) => {
            let loaded = ExperimentSpec::load(path).map_err(CliError::Validation)?;
            if loaded.experiment != family {
                return Err(CliError::Validation(format!(
                    "config is for `{}` but the `{family}` subcommand was invoked",
                    loaded.experiment
                )));
            }
            loaded
        }
        None => ExperimentSpec {
            experiment: family,
            distribution: DistSpec::default(),
            t: None,
            r: None,
            eps: None,
            n_list: None,
            k: None,
            samples: None,
            budget: None,
            max_n: None,
            fields: None,
            method: None,
            lambda: None,
            halfwidth: None,
            mu0: None,
            seed: 1,
            workers: default_workers(),
            out: None,
            format: OutputFormat::Csv,
            timing: false,
        },
    };
    if let Some(d) = &args.dist {
        spec.distribution = DistSpec::parse_compact(d).map_err(CliError::Validation)?;
    }
    merge(&mut spec.t, args.t);
    merge(&mut spec.r, args.r);
    merge(&mut spec.eps, args.eps);
    merge(&mut spec.k, args.k);
    merge(&mut spec.samples, args.samples);
    merge(&mut spec.budget, args.budget);
    merge(&mut spec.max_n, args.max_n);
    merge(&mut spec.fields, args.fields);
    merge(&mut spec.lambda, args.lambda);
    merge(&mut spec.halfwidth, args.halfwidth);
    merge(&mut spec.mu0, args.mu0);
    if let Some(n) = args.n {
        spec.n_list = Some(n.to_string());
    }
    if let Some(list) = &args.n_list {
        config::parse_n_list(list).map_err(CliError::Validation)?;
        spec.n_list = Some(list.clone());
    }
    if let Some(m) = &args.method {
        spec.method = Some(match m.as_str() {
            "direct" => MethodKind::Direct,
            "tilted" => MethodKind::Tilted,
            other => {
                return Err(CliError::Validation(format!(
                    "unknown method `{other}` (direct|tilted)"
                )))
            }
        });
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(w) = args.workers {
        spec.workers = w;
    }
    if let Some(out) = args.out {
        spec.out = Some(out);
    }
    if let Some(f) = &args.format {
        spec.format = match f.as_str() {
            "csv" => OutputFormat::Csv,
            "jsonl" => OutputFormat::Jsonl,
            other => {
                return Err(CliError::Validation(format!(
                    "unknown format `{other}` (csv|jsonl)"
                )))
            }
        };
    }
    if args.timing {
        spec.timing = true;
    }
    if let Some(path) = &args.emit_config {
        std::fs::write(path, spec.emit())
            .map_err(|e| CliError::Runtime(format!("cannot write {path:?}: {e}")))?;
        eprintln!("wrote resolved config to {path:?}");
        std::process::exit(0);
    }
    Ok(spec)
}

fn merge<T>(slot: &mut Option<T>, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = Some(v);
    }
}

fn default_workers() -> usize {
    std::env::var("LPP_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}
