use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pcapp::metrics::DistanceNorm;
use pcapp::theory::{fixed_aspect_error, growing_spike_error};
use pcapp_harness::runner::run_sweep_with_progress;
use pcapp_harness::{emit_csv, emit_summary, parse_config, preset, HarnessError, CATALOG};

#[derive(Parser)]
#[command(
    name = "pcapp-bench",
    version,
    about = "Monte-Carlo benchmarks for contrastive subspace recovery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Regime {
    Fixed,
    Growing,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Operator,
    Frobenius,
}

#[derive(Subcommand)]
enum Command {
    /// Print the predicted PCA++ error.
    Theory {
        #[arg(long, value_enum)]
        regime: Regime,
        /// Weakest signal spike. In the growing regime `c_A = c / lambda`.
        #[arg(long)]
        lambda: Option<f64>,
        /// Aspect ratio d/n.
        #[arg(long)]
        c: f64,
    },
    /// Run a preset or a config file and write CSV output.
    Simulate {
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        preset: Option<String>,
        /// `key = value` file; a `preset = <name>` line picks the base.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        norm: Option<NormArg>,
        /// Sample size override (the table presets default to 5000).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        summary: Option<PathBuf>,
        /// No progress output on stderr.
        #[arg(long)]
        quiet: bool,
    },
    /// List the compiled-in presets.
    ListPresets,
}

fn theory(regime: Regime, lambda: Option<f64>, c: f64) -> Result<(), HarnessError> {
    let invalid = |e: pcapp::Error| HarnessError::Config(e.to_string());
    let dist = match regime {
        Regime::Fixed => {
            let lambda = lambda.ok_or_else(|| {
                HarnessError::Config("--lambda is required for the fixed regime".into())
            })?;
            fixed_aspect_error(lambda, c).map_err(invalid)?.dist
        }
        Regime::Growing => {
            let lambda = lambda.unwrap_or(1.0);
            if !(lambda > 0.0) {
                return Err(HarnessError::Config("--lambda must be positive".into()));
            }
            growing_spike_error(c / lambda).map_err(invalid)?
        }
    };
    println!("{dist:.5}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    preset_name: Option<String>,
    config_path: Option<PathBuf>,
    trials: Option<usize>,
    seed: Option<u64>,
    norm: Option<NormArg>,
    n: Option<usize>,
    out: PathBuf,
    summary: Option<PathBuf>,
    quiet: bool,
) -> Result<(), HarnessError> {
    let mut config = match (preset_name, config_path) {
        (Some(name), _) => preset(&name)?,
        (None, Some(path)) => {
            let text = fs::read_to_string(&path).map_err(|e| {
                HarnessError::Config(format!("cannot read {}: {e}", path.display()))
            })?;
            parse_config(&text)?
        }
        (None, None) => {
            return Err(HarnessError::Config(
                "one of --preset or --config is required".into(),
            ))
        }
    };
    if let Some(t) = trials {
        config.trials = t;
    }
    if let Some(s) = seed {
        config.base_seed = s;
    }
    if let Some(n) = n {
        config.n = n;
    }
    if let Some(norm) = norm {
        config.norm = match norm {
            NormArg::Operator => DistanceNorm::Operator,
            NormArg::Frobenius => DistanceNorm::Frobenius,
        };
    }
    let result = run_sweep_with_progress(&config, |done, total| {
        if !quiet {
            eprint!("\r{}: {done}/{total} datasets", config.name);
            if done == total {
                eprintln!();
            }
            let _ = std::io::stderr().flush();
        }
    })?;
    emit_csv(&result.records, &out)?;
    if let Some(path) = summary {
        emit_summary(&result.summary, &path)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Theory { regime, lambda, c } => theory(regime, lambda, c),
        Command::Simulate {
            preset,
            config,
            trials,
            seed,
            norm,
            n,
            out,
            summary,
            quiet,
        } => simulate(preset, config, trials, seed, norm, n, out, summary, quiet),
        Command::ListPresets => {
            let mut out = std::io::stdout().lock();
            for (name, description) in CATALOG {
                if writeln!(out, "{name:<36}{description}").is_err() {
                    break;
                }
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
