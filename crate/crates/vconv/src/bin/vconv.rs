//! Command-line driver for the verification suites and ad-hoc evaluations.
//!
//! The exit code is 0 exactly when every case of the requested run passes.

use clap::{Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use vconv::report::{emit, EmitFormat, ExperimentConfig, FunctionConfig, ValuationConfig};
use vconv::suites::{list_suites, run_suite};

#[derive(Parser)]
#[command(
    name = "vconv",
    about = "verification suites for unitarily invariant valuations on convex functions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named suite and write its residual report.
    Run {
        /// Suite name (see `list-suites`).
        #[arg(long)]
        suite: String,
        /// JSON experiment configuration; defaults are used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the configuration seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format: record (JSON lines) or table (TSV).
        #[arg(long, default_value = "record")]
        format: String,
    },
    /// List the available suites.
    ListSuites,
    /// Evaluate a valuation described in JSON on a convex function described
    /// in JSON.
    Eval {
        /// Path to a ValuationConfig JSON document.
        #[arg(long)]
        valuation: PathBuf,
        /// Path to a FunctionConfig JSON document.
        #[arg(long)]
        function: PathBuf,
        /// Per-axis quadrature order.
        #[arg(long, default_value_t = 24)]
        order: usize,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run() -> vconv::Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            suite,
            config,
            seed,
            out,
            format,
        } => {
            let mut config = match config {
                Some(path) => ExperimentConfig::from_path(&path)?,
                None => ExperimentConfig::default(),
            };
            if let Some(seed) = seed {
                config.seed = seed;
            }
            let format = EmitFormat::parse(&format)?;
            let report = run_suite(&suite, &config)?;
            let out = out.or_else(|| config.out.clone().map(PathBuf::from));
            match out {
                Some(path) => {
                    let mut file = std::fs::File::create(&path)?;
                    emit(&report, format, &mut file)?;
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    emit(&report, format, &mut lock)?;
                }
            }
            eprintln!(
                "suite {}: {} ({} cases, max |residual| {:.3e}, {} ms)",
                report.suite,
                if report.passed { "PASS" } else { "FAIL" },
                report.cases.len(),
                report.max_abs_residual(),
                report.wall_ms
            );
            Ok(report.passed)
        }
        Command::ListSuites => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for (name, description) in list_suites() {
                writeln!(lock, "{name:10}  {description}")?;
            }
            Ok(true)
        }
        Command::Eval {
            valuation,
            function,
            order,
        } => {
            let vtext = std::fs::read_to_string(&valuation)?;
            let vconfig: ValuationConfig = serde_json::from_str(&vtext)?;
            let ftext = std::fs::read_to_string(&function)?;
            let fconfig: FunctionConfig = serde_json::from_str(&ftext)?;
            let spec = vconfig.build()?;
            let f = fconfig.build()?;
            let value = spec.evaluate(&f, order)?;
            println!("{value:.17e}");
            Ok(true)
        }
    }
}
