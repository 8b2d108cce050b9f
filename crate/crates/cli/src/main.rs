//! `mmr`: evaluate decision rules by maximum regret and reproduce the
//! published regret tables.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{EvalRequest, Family};
use config::{CommonArgs, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "mmr", version, about = "Maximum-regret evaluation of statistical decision rules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Recompute one of the tables 1a, 1b, 2a, 2b, 3a, 3b, 4a, 4b
    Reproduce {
        table: String,
        /// Compare against the bundled reference values
        #[arg(long)]
        check: bool,
        /// Compare against a reference CSV (columns table,n,column,value)
        #[arg(long, value_name = "FILE")]
        reference: Option<PathBuf>,
    },
    /// Risk of one rule at a single state, or maximum regret over a grid
    Eval {
        /// predict, treat, or trial
        #[arg(long)]
        family: String,
        /// Rule id, e.g. midpoint, hodges-lehmann, ammr, es, z_nu, es-trial, np-test
        #[arg(long)]
        rule: String,
        /// Single state as name=value pairs, e.g. `q1=0.5,q0=1,p_obs=0.3`
        #[arg(long)]
        state: Option<String>,
        /// Use exact enumeration (total sample of at most 12)
        #[arg(long)]
        exact: bool,
        /// Prediction only: observe exactly N outcomes
        #[arg(long)]
        fixed_responses: bool,
    },
    /// Worked sentencing example
    Sentencing,
    /// Maximum regret of the ES rule versus a one-sided z-test rule
    CompareTrial,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = RunConfig::resolve(&cli.common)?;
    let output = match &cli.command {
        Command::Reproduce {
            table,
            check,
            reference,
        } => commands::reproduce(&config, table, *check, reference.as_deref())?,
        Command::Eval {
            family,
            rule,
            state,
            exact,
            fixed_responses,
        } => commands::eval(
            &config,
            &EvalRequest {
                family: Family::parse(family)?,
                rule,
                state: state.as_deref(),
                exact: *exact,
                fixed_responses: *fixed_responses,
            },
        )?,
        Command::Sentencing => commands::sentencing(),
        Command::CompareTrial => commands::compare_trial(&config)?,
    };
    commands::emit(&config, &output)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mmr: {e}");
            e.exit_code()
        }
    }
}
