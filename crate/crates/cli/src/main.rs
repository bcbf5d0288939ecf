use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use robust_mallows::estimator::EstimatorConfig;
use robust_mallows_cli::commands::{self, CentralSpec, ModelSpec};
use robust_mallows_cli::experiment::{self, ExperimentSpec};
use robust_mallows_cli::io::{self, Truth};
use robust_mallows_cli::{exit, exit_code};

#[derive(Parser)]
#[command(name = "robust-mallows", version, about = "Robust Mallows model estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a Mallows dataset (JSONL) and its `.truth.json` sidecar.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        phi: f64,
        /// `random`, `identity`, or a comma-separated order.
        #[arg(long, default_value = "random")]
        central: CentralSpec,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replace a fraction of a dataset and write a `.mask.json` sidecar.
    Corrupt {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        /// uniform_junk, reversal, targeted_shift, mean_attack or coalition.
        #[arg(long)]
        strategy: String,
        /// Strategy parameters as a JSON object, e.g. '{"preferred": [2, 1, 3]}'.
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the robust estimator and write its report.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        /// Estimator config JSON; flags below override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Treat the dispersion as known.
        #[arg(long)]
        phi: Option<f64>,
        /// Truth sidecar; only used to fill error fields of the report.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Also report the naive coordinate-mean estimate.
        #[arg(long)]
        baseline: bool,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a report with the truth.
    Evaluate {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one exact-enumeration check suite.
    OracleCheck {
        /// pmf, tv-sandwich, inversion, blocks, moments or impossibility.
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an ε × strategy grid from a spec file.
    Experiment {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn emit(out: Option<&Path>, json: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, json).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().lock().write_all(json.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Sample {
            n,
            phi,
            central,
            samples,
            seed,
            out,
        } => {
            let (draws, truth) = commands::sample(&ModelSpec { n, phi, central }, samples, seed)?;
            io::write_jsonl(&out, &draws)?;
            io::write_json(&io::sidecar(&out, "truth"), &truth)?;
        }
        Command::Corrupt {
            input,
            eps,
            strategy,
            params,
            seed,
            out,
        } => {
            let honest = io::read_jsonl(&input)?;
            let strategy = commands::parse_strategy(&strategy, params.as_deref())?;
            let (samples, mask) = commands::corrupt_samples(&honest, eps, &strategy, seed)?;
            io::write_jsonl(&out, &samples)?;
            io::write_json(&io::sidecar(&out, "mask"), &mask)?;
        }
        Command::Estimate {
            input,
            config,
            eps,
            seed,
            phi,
            truth,
            baseline,
            out,
        } => {
            let samples = io::read_jsonl(&input)?;
            let mut cfg: EstimatorConfig = match &config {
                Some(path) => io::read_json(path)?,
                None => EstimatorConfig::default(),
            };
            if let Some(eps) = eps {
                cfg.eps = eps;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if phi.is_some() {
                cfg.phi = phi;
            }
            let truth = truth.map(|p| io::read_json::<Truth>(&p)).transpose()?;
            let model = truth.as_ref().map(Truth::model).transpose()?;
            let report = commands::estimate(&samples, &cfg, model.as_ref(), baseline)?;
            emit(out.as_deref(), &io::to_json_string(&report)?)?;
        }
        Command::Evaluate { report, truth, out } => {
            let report: commands::EstimateOutput = io::read_json(&report)?;
            let truth: Truth = io::read_json(&truth)?;
            let r = &report.report;
            let metrics = commands::evaluate(&r.central_hat, r.phi_hat, &truth, r.eps)?;
            emit(out.as_deref(), &io::to_json_string(&metrics)?)?;
        }
        Command::OracleCheck { suite, out } => {
            let report = commands::oracle_check(&suite)?;
            emit(out.as_deref(), &io::to_json_string(&report)?)?;
            if !report.passed {
                return Ok(exit::CHECK_FAILED);
            }
        }
        Command::Experiment {
            spec,
            seed,
            out_dir,
            threads,
        } => {
            let spec: ExperimentSpec = io::read_json(&spec)?;
            let threads = threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            experiment::run(&spec, seed, &out_dir, threads)?;
        }
    }
    Ok(exit::OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
