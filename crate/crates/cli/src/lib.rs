//! Batch front-end: solvers and falsifiers driven by flags and TOML problem files.

pub mod config;
pub mod demo;
pub mod error;
pub mod maps;
pub mod run;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use mdist::spaces::FwLevel;

pub use error::CliError;
pub use run::{Artifacts, Driver, Outcome};

/// Exit status for a run that could not start or finish because of its input or environment.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mdist", version, about = "Fixed-point solvers and axiom falsifiers over monoid-valued distance spaces")]
pub struct Cli {
    /// Directory for artifacts.
    #[arg(long, global = true, default_value = "mdist-out")]
    pub out: PathBuf,
    /// Seed for every sampled check; overrides a seed in a config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Iteration budget; overrides a budget in a config file.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a discretized Fredholm equation described by a TOML file.
    SolveFredholm {
        /// TOML problem file.
        config: PathBuf,
    },
    /// Iterate a named real map with one of the drivers.
    SolveMap {
        /// halve, affine{c,b}, half_cosine, identity, shift or triple.
        #[arg(long)]
        map: String,
        #[arg(long, value_enum)]
        driver: Driver,
        /// Starting point.
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
    },
    /// Solve a coupled fixed-point problem described by a TOML file.
    SolveCoupled {
        /// TOML problem file.
        config: PathBuf,
    },
    /// Validate a catalog space and optionally search for Fréchet–Wilson counterexamples.
    CheckSpace {
        /// Catalog name, for example `squared` or `product{sigma,real_abs,snowflake}`.
        name: String,
        /// Run the axiom suite (the default when `--fw` is absent).
        #[arg(long)]
        axioms: bool,
        /// Search for a counterexample at this level: weak, standard or strong.
        #[arg(long, value_parser = parse_level)]
        fw: Option<FwLevel>,
        /// Sampled tuples per axiom and falsifier trials.
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Run a built-in demonstration.
    Demo {
        /// omega_counterexample, fredholm_ts, fredholm_constant, coupled, driver_agreement or lambda_sequences.
        name: String,
    },
}

fn parse_level(s: &str) -> Result<FwLevel, String> {
    FwLevel::parse(s).ok_or_else(|| format!("expected weak, standard or strong, got `{s}`"))
}

/// Runs one command; `Ok` carries the run outcome, `Err` a configuration problem.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let out = Artifacts::new(&cli.out);
    let seed = cli.seed.unwrap_or(0);
    if cli.budget == Some(0) {
        return Err(CliError::field("--budget", "must be positive"));
    }
    match &cli.command {
        Command::SolveFredholm { config } => {
            let c: config::FredholmConfig = config::load(config)?;
            let p = c.build(cli.seed, cli.budget)?;
            Ok(run::solve_fredholm_problem(&out, &p)?.0)
        }
        Command::SolveMap { map, driver, x0 } => run::solve_map(&out, map, *driver, *x0, seed, cli.budget.unwrap_or(10_000)),
        Command::SolveCoupled { config } => {
            let c: config::CoupledConfig = config::load(config)?;
            let p = c.build(cli.budget)?;
            Ok(run::solve_coupled_problem(&out, &p)?.0)
        }
        Command::CheckSpace { name, axioms, fw, trials } => {
            if *trials == 0 {
                return Err(CliError::field("--trials", "must be positive"));
            }
            run::check_space(&out, &run::CheckSpaceArgs { name: name.clone(), axioms: *axioms, fw: *fw, trials: *trials, seed })
        }
        Command::Demo { name } => demo::run(name, &out, seed, cli.budget),
    }
}

/// Maps a finished run to the process exit status.
pub fn exit_code(result: &Result<Outcome, CliError>) -> i32 {
    match result {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::Failure) => 1,
        Err(_) => EXIT_CONFIG,
    }
}
