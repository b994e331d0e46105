//! mignotte - Mignotte threshold secret sharing and coalition analysis
//!
//! Usage:
//!   mignotte deal --moduli 7,9,11,13,17 --threshold 3 --secret 330 --out shares.txt
//!   mignotte reconstruct --shares shares.txt --ids 1,2,4
//!   mignotte attack --shares shares.txt --ids 1,2 [--range 221:693 | --positive] [--limit 5]
//!   mignotte audit --moduli 7,9,11,13,17 --threshold 3 --secret 330 --size 2
//!   mignotte emit-smt --shares shares.txt --ids 1,2 --positive --out query.smt2
//!   mignotte solve-smt --script query.smt2 --solver-cmd "z3 -in" --limit 5
//!
//! Exit codes: 0 success, 1 domain or usage error, 2 I/O error, 3 empty
//! result, 4 missing optional solver.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mignotte_core::{ShareFormat, ValidationMode};
use num_bigint::BigUint;

mod commands;
mod error;

use error::CliError;

#[derive(Parser)]
#[command(name = "mignotte", version)]
#[command(about = "Mignotte secret sharing: deal, reconstruct, and measure what small coalitions learn")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Shares-file layout written by `deal`; reading detects the layout
    #[arg(long, global = true, default_value = "structured")]
    format: ShareFormat,

    /// Coprimality check: all pairs (strict) or neighbours only (lax)
    #[arg(long, global = true, default_value = "strict")]
    mode: ValidationMode,

    /// Emit a JSON document instead of plain text
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the sequence and split a secret into shares
    Deal {
        /// Comma separated, strictly increasing moduli
        #[arg(long, value_delimiter = ',', required = true)]
        moduli: Vec<BigUint>,
        #[arg(long, short = 't')]
        threshold: usize,
        #[arg(long)]
        secret: BigUint,
        /// Shares file to write
        #[arg(long, short = 'o')]
        out: PathBuf,
    },

    /// Recover the secret from at least `threshold` shares
    Reconstruct {
        #[command(flatten)]
        coalition: CoalitionArgs,
    },

    /// Enumerate every secret consistent with a coalition's shares
    Attack {
        #[command(flatten)]
        coalition: CoalitionArgs,
        #[command(flatten)]
        search: SearchArgs,
    },

    /// Candidate counts for every coalition of a given size
    Audit {
        #[arg(long, value_delimiter = ',', required = true)]
        moduli: Vec<BigUint>,
        #[arg(long, short = 't')]
        threshold: usize,
        #[arg(long)]
        secret: BigUint,
        /// Coalition size
        #[arg(long, short = 's')]
        size: usize,
    },

    /// Write the coalition's attack as an SMT-LIB2 script
    EmitSmt {
        #[command(flatten)]
        coalition: CoalitionArgs,
        #[command(flatten)]
        search: SearchArgs,
        /// Output path; standard output when omitted
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
    },

    /// Enumerate models of a script with an external solver
    SolveSmt {
        /// Script produced by `emit-smt`
        #[arg(long)]
        script: PathBuf,
        /// Solver invocation reading SMT-LIB2 from standard input
        #[arg(long, default_value = "z3 -in")]
        solver_cmd: String,
        /// Stop after this many models
        #[arg(long, default_value_t = mignotte_core::attack::DEFAULT_POSITIVE_LIMIT)]
        limit: usize,
        /// Per-call timeout in seconds
        #[arg(long, default_value_t = 10)]
        timeout: u64,
    },
}

#[derive(Args)]
struct CoalitionArgs {
    /// Shares file (paper or structured layout)
    #[arg(long)]
    shares: PathBuf,
    /// Comma separated participant ids, 0-based
    #[arg(long, value_delimiter = ',', required = true)]
    ids: Vec<usize>,
    /// Threshold; required for paper-layout files, which do not record it
    #[arg(long, short = 't')]
    threshold: Option<usize>,
}

#[derive(Args)]
struct SearchArgs {
    /// Candidates strictly between BETA and ALPHA (default: public bounds)
    #[arg(long, value_name = "BETA:ALPHA", conflicts_with = "positive")]
    range: Option<String>,
    /// Ignore the bounds and list positive solutions
    #[arg(long)]
    positive: bool,
    /// Number of positive-mode candidates
    #[arg(long, default_value_t = mignotte_core::attack::DEFAULT_POSITIVE_LIMIT)]
    limit: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(CliError::USAGE);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = match commands::run(cli, &mut out) {
        Ok(code) => code,
        Err(CliError::Closed) => 0,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code)
}
