use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod input;

use commands::{CellFiles, Failure, FitPriorArgs, SimulateArgs};

/// Bayesian operational-risk estimates from internal data, industry priors
/// and expert opinions.
#[derive(Parser)]
#[command(name = "opbayes", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a Gamma prior from a mean and interval probability, a mean and
    /// coefficient of variation, or a file of industry samples.
    FitPrior {
        #[arg(long)]
        mean: Option<f64>,
        /// Interval `lo,hi` whose prior probability is given by --prob.
        #[arg(long, value_parser = commands::parse_interval)]
        interval: Option<(f64, f64)>,
        /// Interval probability, as a decimal or a fraction like `2/3`.
        #[arg(long, value_parser = input::parse_fraction)]
        prob: Option<f64>,
        /// Coefficient of variation of the prior.
        #[arg(long)]
        vco: Option<f64>,
        /// CSV with header `value`, one industry sample per row.
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Estimator trajectory k = 0..K as CSV: k,bayes,two_source,mle.
    ///
    /// For Pareto cells the expert opinions are about the tail index; for
    /// lognormal cells they are about the location of ln X.
    Trajectory {
        #[arg(long)]
        config: PathBuf,
        /// Counts (`year,count`) or severities (`index,severity`); overrides `data` in the config.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Opinions (`expert_id,opinion`); overrides `experts` in the config.
        #[arg(long)]
        experts: Option<PathBuf>,
    },
    /// Predictive VaR per cell and their sum.
    SimulateVar {
        /// `frequency.cfg,severity.cfg`; repeat for more cells.
        #[arg(long = "cell", required = true, value_parser = commands::parse_cell)]
        cells: Vec<CellFiles>,
        /// Quantile level in (0, 1).
        #[arg(long, value_parser = commands::parse_level)]
        level: f64,
        #[arg(long, default_value_t = 100_000)]
        sims: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Threads; results do not depend on this.
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
        /// Fix parameters at their posterior means instead of redrawing them.
        #[arg(long)]
        fixed_parameters: bool,
    },
    /// Draw from GIG(nu, omega, phi), one value per line.
    SampleGig {
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        phi: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn run(cli: Cli, out: &mut impl Write) -> commands::CmdResult {
    match cli.command {
        Command::FitPrior {
            mean,
            interval,
            prob,
            vco,
            samples,
        } => commands::fit_prior(
            FitPriorArgs {
                mean,
                interval,
                prob,
                vco,
                samples,
            },
            out,
        ),
        Command::Trajectory {
            config,
            data,
            experts,
        } => commands::trajectory(&config, data.as_deref(), experts.as_deref(), out),
        Command::SimulateVar {
            cells,
            level,
            sims,
            seed,
            workers,
            fixed_parameters,
        } => commands::simulate_var(
            SimulateArgs {
                cells,
                level,
                sims,
                seed,
                workers,
                parameter_uncertainty: !fixed_parameters,
            },
            out,
        ),
        Command::SampleGig {
            nu,
            omega,
            phi,
            n,
            seed,
        } => commands::sample_gig(nu, omega, phi, n, seed, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut buf = Vec::new();
    let result = run(cli, &mut buf);
    match result {
        Ok(()) => {
            let mut stdout = BufWriter::new(io::stdout().lock());
            if stdout.write_all(&buf).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `opbayes --help` for usage");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
