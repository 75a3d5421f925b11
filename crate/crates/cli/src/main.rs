use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use reidzeta::oracle::DEFAULT_CELL_BUDGET;
use reidzeta_cli::report::{to_json, to_table};
use reidzeta_cli::run::{run, Command};
use reidzeta_cli::CliError;

/// Exact Reidemeister numbers and coincidence zeta functions on S-arithmetic groups.
#[derive(Debug, Parser)]
#[command(name = "reidzeta", version)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// R(phi^n, psi^n) for n = 1..N.
    Compute {
        spec: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_n: u64,
    },
    /// Coefficients a_0..a_M of the zeta function and a recurrence for R_n.
    Zeta {
        spec: PathBuf,
        #[arg(long, default_value_t = 20)]
        terms: u64,
        #[arg(long)]
        max_order: Option<usize>,
    },
    /// Rational or natural boundary.
    Classify {
        spec: PathBuf,
        #[arg(long, default_value_t = 40)]
        terms: usize,
        #[arg(long, default_value_t = 12)]
        max_order: usize,
    },
    /// Compare against brute-force class counting on (Z/N)^d.
    OracleCheck {
        spec: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_n: u64,
        #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
        budget: u64,
    },
}

fn apply_bit_limit() -> Result<(), CliError> {
    match std::env::var("REIDZETA_BIT_LIMIT") {
        Ok(v) => {
            let bits: u64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("REIDZETA_BIT_LIMIT={v:?} is not a bit count")))?;
            reidzeta::arith::set_bit_limit(bits);
            Ok(())
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(CliError::Validation(format!("REIDZETA_BIT_LIMIT: {e}"))),
    }
}

fn main_inner(cli: Cli) -> Result<Option<CliError>, CliError> {
    apply_bit_limit()?;
    let (spec, command) = match cli.command {
        Sub::Compute { spec, max_n } => (spec, Command::Compute { max_n }),
        Sub::Zeta { spec, terms, max_order } => (spec, Command::Zeta { terms, max_order }),
        Sub::Classify { spec, terms, max_order } => (spec, Command::Classify { terms, max_order }),
        Sub::OracleCheck { spec, max_n, budget } => (spec, Command::OracleCheck { max_n, budget }),
    };
    let text = std::fs::read_to_string(&spec)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", spec.display())))?;
    let outcome = run(command, &text)?;
    let rendered = match cli.format {
        Format::Json => to_json(&outcome.report),
        Format::Table => to_table(&outcome.report),
    };
    match &cli.output {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{rendered}"),
    }
    Ok(outcome.failure)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let failure = match main_inner(cli) {
        Ok(f) => f,
        Err(e) => Some(e),
    };
    match failure {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
