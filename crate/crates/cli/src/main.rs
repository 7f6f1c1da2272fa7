use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use decohere::capacity::OptimizerOptions;
use decohere::channels::{ChannelSpec, Family};
use decohere_cli::row::{rows_to_csv, CurveRow, CSV_HEADER};
use decohere_cli::sweep::{curve, write_figures};
use decohere_cli::verify::{run_verify, VerifyConfig};
use decohere_cli::CliError;

/// Capacities of decohering quantum channels.
#[derive(Debug, Parser)]
#[command(name = "decohere", version)]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Capacity at a single noise level.
    Capacity {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Noise level in [0, 1].
        #[arg(long)]
        x: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Capacity on an evenly spaced noise grid.
    Curve {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Number of grid points, including both endpoints.
        #[arg(long, default_value_t = 101)]
        x_steps: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write fig1/fig2 CSV and SVG files.
    Figures {
        #[arg(long, default_value = "figures")]
        out_dir: PathBuf,
        /// Run the optimizer on every n-th point (0 disables).
        #[arg(long, default_value_t = 10)]
        numeric_every: usize,
    },
    /// Run the structural and numerical checks.
    Verify {
        #[arg(long, default_value_t = 6)]
        max_d: usize,
        /// Optimizer objective tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, hide = true)]
        corrupt: bool,
    },
}

#[derive(Debug, Args)]
struct ChannelArgs {
    /// fully, block or weak.
    #[arg(long)]
    family: Family,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Also maximize coherent information numerically.
    #[arg(long)]
    numeric: bool,
    /// Emit JSON instead of CSV.
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
}

impl OutputArgs {
    fn optimizer(&self) -> OptimizerOptions {
        OptimizerOptions {
            tol: self.tol,
            max_iters: self.max_iters,
            ..OptimizerOptions::default()
        }
    }
}

fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Capacity { channel, x, output } => {
            let spec = ChannelSpec::new(channel.family, channel.d, channel.k, x)?;
            let opts = output.optimizer();
            let row = CurveRow::compute(&spec, output.numeric.then_some(&opts))?;
            if output.json {
                emit(&format!("{}\n", serde_json::to_string(&row)?))?;
            } else {
                emit(&format!("{CSV_HEADER}\n{}\n", row.to_csv()))?;
            }
        }
        Command::Curve {
            channel,
            x_steps,
            output,
        } => {
            let opts = output.optimizer();
            let rows = curve(
                channel.family,
                channel.d,
                channel.k,
                x_steps,
                output.numeric.then_some(1),
                &opts,
            )?;
            if output.json {
                emit(&format!("{}\n", serde_json::to_string_pretty(&rows)?))?;
            } else {
                emit(&rows_to_csv(&rows))?;
            }
        }
        Command::Figures {
            out_dir,
            numeric_every,
        } => {
            let every = (numeric_every > 0).then_some(numeric_every);
            for path in write_figures(&out_dir, every, &OptimizerOptions::default())? {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Verify {
            max_d,
            tol,
            corrupt,
        } => {
            let cfg = VerifyConfig {
                max_d,
                tol,
                seed: cli.seed,
                corrupt,
                ..VerifyConfig::default()
            };
            let report = run_verify(&cfg)?;
            emit(&report.to_table())?;
            if !report.passed {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
