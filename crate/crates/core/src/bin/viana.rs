use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use viana::config::{Experiment, ExperimentConfig};
use viana::report::{write_report, ExperimentReport};
use viana::sampling::Workers;
use viana::verify::{verify_all, Suite};
use viana::Error;

/// Environment variable that overrides the output directory.
const OUT_ENV: &str = "VIANA_OUT";

#[derive(Parser)]
#[command(name = "viana", version, about = "Experiments on quadratic skew products over expanding maps")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML experiment config; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory; overrides VIANA_OUT and the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Admissible curves, strips, distortion and displacement.
    Curves,
    /// Critical recurrence: deep returns, first times and the return ladder.
    Recurrence {
        #[arg(long, value_delimiter = ',')]
        alpha_ladder: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        n_grid: Option<Vec<usize>>,
        #[arg(long)]
        samples: Option<usize>,
    },
    Lyapunov,
    Density,
    Correlations,
    Ldp,
    Clt,
    /// Trap certification and statistics of a fibered hyperbolic map.
    Fibered,
    /// Bump-tuned coexistence of an attracting fiber and positive exponents.
    Coexistence,
    /// The acceptance battery.
    Verify {
        /// fast or full
        #[arg(default_value = "fast")]
        suite: String,
    },
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Inconsistent(_) | Error::Escape { .. } | Error::Degenerate(_) => 3,
        _ => 2,
    }
}

fn execute(cli: Cli) -> Result<bool, Error> {
    let mut cfg = match &cli.global.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.global.seed {
        cfg.seed = s;
    }
    if cli.global.workers.is_some() {
        cfg.workers = cli.global.workers;
    }
    let out = cli
        .global
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let exp = match &cli.command {
        Command::Curves => Experiment::Curves,
        Command::Recurrence { alpha_ladder, n_grid, samples } => {
            if let Some(a) = alpha_ladder {
                cfg.recurrence.alpha_ladder = a.clone();
            }
            if let Some(n) = n_grid {
                cfg.recurrence.n_grid = n.clone();
            }
            if let Some(s) = samples {
                cfg.recurrence.samples = *s;
            }
            Experiment::Recurrence
        }
        Command::Lyapunov => Experiment::Lyapunov,
        Command::Density => Experiment::Density,
        Command::Correlations => Experiment::Correlations,
        Command::Ldp => Experiment::Ldp,
        Command::Clt => Experiment::Clt,
        Command::Fibered => Experiment::Fibered,
        Command::Coexistence => Experiment::Coexistence,
        Command::Verify { .. } => Experiment::Verify,
    };
    cfg.validate(exp)?;
    let suite = match &cli.command {
        Command::Verify { suite } => Some(suite.parse::<Suite>()?),
        _ => None,
    };
    let workers = cfg.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = Workers::new(workers).map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let (cfg, report): (ExperimentConfig, ExperimentReport) = match suite {
        Some(s) => pool.install(|| verify_all(cfg.seed, s))?,
        None => {
            let r = pool.install(|| viana::runner::run(&cfg, exp))?;
            (cfg, r)
        }
    };
    for c in &report.checks {
        println!("{}", c.line());
    }
    for p in write_report(&report, &cfg, &out)? {
        eprintln!("wrote {}", p.display());
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
