//! `ltdr`: JSON verification reports for the period-matrix toolkit.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 bad flags,
//! 3 rank rejection, 4 indeterminate verdict, 5 integrality failure.

mod commands;
mod pretty;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "ltdr", version, about = "Period-matrix verification reports")]
pub struct Cli {
    /// Render the report as an aligned key/value table instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dump D(H), D(G), Φ, Δ and their slope reports.
    Models {
        #[arg(long)]
        n: usize,
        #[arg(long, env = "PADIC_PRECISION", default_value_t = 32)]
        precision: u32,
        #[arg(long, default_value_t = 2)]
        p: u64,
    },
    /// Sample or load a period matrix and check the transpose correspondence.
    #[command(group(ArgGroup::new("source").required(true).args(["seed", "matrix"])))]
    Correspond {
        #[arg(long, requires_all = ["m", "seed"])]
        n: Option<usize>,
        #[arg(long, requires_all = ["n", "seed"])]
        m: Option<usize>,
        #[arg(long, requires_all = ["n", "m"])]
        seed: Option<u64>,
        /// A matrix in the padic JSON form.
        #[arg(long, conflicts_with_all = ["n", "m", "seed"])]
        matrix: Option<PathBuf>,
        #[arg(long, env = "PADIC_PRECISION", default_value_t = 32)]
        precision: u32,
        #[arg(long, default_value_t = 2)]
        p: u64,
    },
    /// CM period valuations or the height ledger.
    #[command(group(ArgGroup::new("mode").required(true).args(["i0", "heights"])))]
    Ledger {
        #[arg(long, requires_all = ["h", "i0"])]
        p: Option<u64>,
        #[arg(long, requires_all = ["p", "i0"])]
        h: Option<u32>,
        #[arg(long, requires_all = ["p", "h"])]
        i0: Option<usize>,
        /// `n,htH,htG,htDelta`
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["p", "h", "i0"])]
        heights: Option<Vec<i64>>,
    },
    /// Lubin–Tate formal group law, [p]-series, height and μ_{p^h−1} action.
    FormalGroup {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        h: u32,
        /// Truncation degree; defaults to p^h + p.
        #[arg(long = "D")]
        d: Option<u32>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = commands::run(&cli.command);
    let text = if cli.pretty {
        pretty::render(&outcome.report)
    } else {
        serde_json::to_string(&outcome.report).expect("reports serialize")
    };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
    if let Some(msg) = &outcome.diagnostic {
        eprintln!("ltdr: {msg}");
    }
    ExitCode::from(outcome.code)
}
