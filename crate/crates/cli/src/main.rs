use std::fs::File;
use std::io::BufWriter;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use cde_cli::commands::{self, Outcome, Property, SolveArgs, Status};
use cde_cli::experiment::{run_experiment, summarize, write_csv, ExperimentConfig};
use cde_core::instance::MAX_CLIENTS;
use cde_core::{Algorithm, EnumeratedRegion, RateVector, DEFAULT_FIELD};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "cde",
    version,
    about = "Fairest transmission strategies for cooperative data exchange"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Sda,
    Da,
}

#[derive(Subcommand)]
enum Command {
    /// Find the fairest strategy at a given sum-rate.
    #[command(group(ArgGroup::new("budget").required(true).args(["alpha", "min_sum_rate"])))]
    Solve {
        instance: PathBuf,
        #[arg(long)]
        alpha: Option<u32>,
        /// Use the minimum sum-rate as the budget.
        #[arg(long)]
        min_sum_rate: bool,
        /// uniform | jain | proportional | weighted:w1,..,wK
        #[arg(long, default_value = "uniform")]
        objective: String,
        #[arg(long, value_enum, default_value = "sda")]
        algorithm: AlgorithmArg,
        /// Feasible starting strategy for SDA, e.g. 3,1,0.
        #[arg(long)]
        start: Option<String>,
        /// Write the iterate trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// List every feasible strategy at a sum-rate as CSV.
    Enumerate {
        instance: PathBuf,
        #[arg(long)]
        alpha: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the minimum sum-rate and a witness strategy.
    MinSumRate { instance: PathBuf },
    /// Check structural properties of the feasible region.
    Check {
        instance: PathBuf,
        #[arg(long)]
        alpha: u32,
        /// Comma-separated subset of exc,mconvex,lemma1,supmap,submod.
        #[arg(long, default_value = "exc,mconvex,lemma1,supmap,submod")]
        properties: String,
        /// Check this region CSV instead of the enumerated one.
        #[arg(long)]
        region: Option<PathBuf>,
    },
    /// Simulate random linear coding and check every client decodes.
    Verify {
        instance: PathBuf,
        #[arg(long)]
        rates: String,
        #[arg(long, default_value_t = DEFAULT_FIELD)]
        field: u64,
        #[arg(long, default_value_t = 10)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare SDA and DA at the minimum sum-rate on random instances.
    Experiment {
        #[arg(long, default_value = "3..10", value_parser = parse_range)]
        k_range: RangeInclusive<usize>,
        #[arg(long, default_value = "6..30", value_parser = parse_range)]
        n_range: RangeInclusive<usize>,
        #[arg(long, default_value_t = 6)]
        n_step: usize,
        #[arg(long, default_value_t = 20)]
        reps: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write per-(K, N) averages.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

/// `a..b`, inclusive on both ends.
fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a..b, got `{s}`"))?;
    let a: usize = a
        .trim()
        .parse()
        .map_err(|_| format!("invalid bound `{a}`"))?;
    let b: usize = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| format!("invalid bound `{b}`"))?;
    if a > b {
        return Err(format!("empty range `{s}`"));
    }
    Ok(a..=b)
}

fn input_error(message: impl std::fmt::Display) -> Outcome {
    Outcome {
        status: Status::InputError,
        output: format!("error: {message}\n"),
    }
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), Outcome> {
    std::fs::write(path, contents)
        .map_err(|e| input_error(format!("writing {}: {e}", path.display())))
}

fn run(command: Command) -> Result<Outcome, Outcome> {
    let library_guard = cde_cli::max_clients(MAX_CLIENTS);
    match command {
        Command::Solve {
            instance,
            alpha,
            min_sum_rate: _,
            objective,
            algorithm,
            start,
            trace,
        } => {
            let inst = commands::load_instance(&instance)?;
            commands::guard(&inst, library_guard)?;
            let objective = commands::parse_objective(&objective).map_err(input_error)?;
            let start = start
                .map(|s| s.parse::<RateVector>())
                .transpose()
                .map_err(|e| Outcome::error(&e))?;
            let args = SolveArgs {
                alpha,
                objective,
                algorithm: match algorithm {
                    AlgorithmArg::Sda => Algorithm::Sda,
                    AlgorithmArg::Da => Algorithm::Da,
                },
                start,
            };
            let (outcome, solver_trace) = commands::solve(&inst, &args);
            if let (Some(path), Some(t)) = (trace, solver_trace) {
                write_file(&path, &t.to_csv())?;
            }
            Ok(outcome)
        }
        Command::Enumerate {
            instance,
            alpha,
            out,
        } => {
            let inst = commands::load_instance(&instance)?;
            commands::guard(&inst, library_guard)?;
            let (outcome, _) = commands::enumerate(&inst, alpha);
            match out {
                Some(path) if outcome.status == Status::Success => {
                    write_file(&path, &outcome.output)?;
                    Ok(Outcome {
                        status: Status::Success,
                        output: String::new(),
                    })
                }
                _ => Ok(outcome),
            }
        }
        Command::MinSumRate { instance } => {
            let inst = commands::load_instance(&instance)?;
            commands::guard(&inst, library_guard)?;
            Ok(commands::min_sum_rate_report(&inst))
        }
        Command::Check {
            instance,
            alpha,
            properties,
            region,
        } => {
            let inst = commands::load_instance(&instance)?;
            commands::guard(&inst, library_guard)?;
            let properties = properties
                .split(',')
                .map(Property::parse)
                .collect::<Result<Vec<_>, _>>()
                .map_err(input_error)?;
            let region = match region {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| input_error(format!("reading {}: {e}", path.display())))?;
                    Some(EnumeratedRegion::from_csv(&text).map_err(|e| Outcome::error(&e))?)
                }
                None => None,
            };
            Ok(commands::check(&inst, alpha, &properties, region))
        }
        Command::Verify {
            instance,
            rates,
            field,
            trials,
            seed,
        } => {
            let inst = commands::load_instance(&instance)?;
            commands::guard(&inst, library_guard)?;
            let rates: RateVector = rates.parse().map_err(|e| Outcome::error(&e))?;
            Ok(commands::verify(&inst, &rates, field, trials, seed))
        }
        Command::Experiment {
            k_range,
            n_range,
            n_step,
            reps,
            seed,
            out,
            summary,
        } => {
            let config = ExperimentConfig {
                clients: k_range,
                packets: n_range,
                packet_step: n_step,
                reps,
                seed,
            };
            let guard = cde_cli::max_clients(cde_cli::DEFAULT_EXPERIMENT_MAX_K).min(MAX_CLIENTS);
            let result = (|| -> anyhow::Result<usize> {
                let rows = run_experiment(&config, guard)?;
                let file =
                    File::create(&out).with_context(|| format!("creating {}", out.display()))?;
                write_csv(BufWriter::new(file), &rows)?;
                if let Some(path) = &summary {
                    let file = File::create(path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    write_csv(BufWriter::new(file), &summarize(&rows))?;
                }
                Ok(rows.len())
            })();
            match result {
                Ok(n) => Ok(Outcome {
                    status: Status::Success,
                    output: format!("wrote {n} rows to {}\n", out.display()),
                }),
                Err(e) => Err(input_error(format!("{e:#}"))),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(cli.command).unwrap_or_else(|e| e);
    match outcome.status {
        Status::Success | Status::VerificationFailed => print!("{}", outcome.output),
        Status::InputError | Status::Infeasible => eprint!("{}", outcome.output),
    }
    ExitCode::from(outcome.status as u8)
}
