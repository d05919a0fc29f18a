//! Command-line driver for exact approximation experiments.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::Out;
use config::{ExperimentConfig, Preset};

#[derive(Parser, Debug)]
#[command(
    name = "exact-approx",
    version,
    about = "Exactly psi-approximable points over F_q((1/X))"
)]
struct Cli {
    /// TOML experiment config; overrides --preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "desk")]
    preset: Preset,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// c_x(t) against r_psi and the template.
    Trajectory {
        /// zero, xstar, random, @FILE or coordinates separated by ';'.
        #[arg(long, default_value = "xstar")]
        x: String,
        #[arg(long)]
        horizon: Option<i64>,
    },
    /// Template breakpoints and slope checks.
    Template {
        #[arg(long)]
        horizon: Option<i64>,
    },
    /// Epoch table and predicate checks.
    Schedule,
    /// Build, verify and measure the Cantor tree.
    Construct {
        #[arg(long)]
        depth: Option<i64>,
    },
    /// Both clauses of exact approximation for one point.
    Verify {
        #[arg(long)]
        point: Option<PathBuf>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        d_max: Option<i64>,
    },
    /// Best approximations by denominator degree.
    Bestapprox {
        #[arg(long)]
        point: Option<PathBuf>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        d_max: Option<i64>,
    },
    /// Branching statistics and dimension estimates.
    Dimension {
        #[arg(long)]
        depth: Option<i64>,
    },
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ExperimentConfig::from_toml(&text)?
        }
        None => ExperimentConfig::preset(cli.preset),
    };
    if let Some(seed) = cli.seed {
        cfg.run.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()?;
    }
    let cfg = load(cli)?;
    let out = Out::new(&cli.out, &cfg)?;
    let report = match &cli.cmd {
        Cmd::Trajectory { x, horizon } => {
            commands::cmd_trajectory(&cfg, &out, x, horizon.unwrap_or(cfg.run.horizon))?
        }
        Cmd::Template { horizon } => commands::cmd_template(&cfg, &out, *horizon)?,
        Cmd::Schedule => commands::cmd_schedule(&cfg, &out)?,
        Cmd::Construct { depth } => commands::cmd_construct(&cfg, &out, *depth)?,
        Cmd::Verify { point, x, d_max } => {
            commands::cmd_verify(&cfg, &out, point.as_deref(), x.as_deref(), *d_max)?
        }
        Cmd::Bestapprox { point, x, d_max } => {
            commands::cmd_bestapprox(&cfg, &out, point.as_deref(), x.as_deref(), *d_max)?
        }
        Cmd::Dimension { depth } => commands::cmd_dimension(&cfg, &out, *depth)?,
    };
    print!("{}", report.summary);
    Ok(report.ok)
}

/// 2: verification failure, 3: unsatisfiable schedule, 4: precision or
/// budget exhausted.
fn exit_code(e: &anyhow::Error) -> u8 {
    use exact_approx::Error as E;
    match e.downcast_ref::<E>() {
        Some(E::Verification { .. } | E::UncertifiableCube { .. }) => 2,
        Some(E::UnsatisfiablePredicate { .. }) => 3,
        Some(E::PrecisionExhausted { .. } | E::BudgetExceeded { .. }) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
