//! `circtab`: batch interface over the circuit toolkit.
//!
//! Every subcommand reads and writes the stable text and binary formats from
//! the library crate, writes outputs atomically (write to a sibling temp
//! file, then rename - no partial files on error), and reports failures as a
//! single machine-parseable line `error: <code>: <detail>` with a nonzero
//! exit status. Identical inputs and flags produce byte-identical outputs.

mod commands;
mod io;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use circtab::census::CensusError;
use circtab::circuit::CircuitError;
use circtab::codec::CodecError;
use circtab::mcsp::McspError;
use circtab::sat::SatError;
use circtab::table::TableError;

#[derive(Parser)]
#[command(
    name = "circtab",
    version,
    about = "Synthesize, encode, minimize, and census Boolean circuits"
)]
pub struct Cli {
    /// Seed recorded in artifact headers and driving any sampled series.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// External SAT solver command template; `{cnf}` marks the DIMACS path
    /// (appended when absent). Defaults to the built-in solver.
    #[arg(long, global = true, env = "CIRCTAB_SOLVER")]
    pub solver: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Evaluate a circuit on all inputs, recovering its truth table.
    Eval {
        #[arg(long)]
        circuit: PathBuf,
        /// Output table file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Arity cap for whole-table evaluation.
        #[arg(long, default_value_t = circtab::circuit::DEFAULT_EVAL_ARITY_CAP)]
        cap: u8,
    },
    /// Synthesize the canonical detector-per-row lookup circuit.
    SynthDnf {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize via shared-equality-bank block expansion.
    SynthLupanov {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Remaining arity at which the recursion emits its final layer.
        #[arg(long, default_value_t = circtab::synth::DEFAULT_LEAF_THRESHOLD)]
        leaf_threshold: u8,
    },
    /// Find the minimal circuit for a table (exact, arity up to 4).
    Minimize {
        #[arg(long)]
        table: PathBuf,
        /// Witness circuit file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Search cap in gates; exceeding it is an error, not a guess.
        #[arg(long, default_value_t = circtab::mcsp::DEFAULT_SEARCH_CAP)]
        cap: u32,
    },
    /// Verify a claimed circuit against a table and size bound.
    McspVerify {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        size: u32,
    },
    /// Emit the DIMACS CNF stating "some circuit with fewer than SIZE gates
    /// computes the table"; optionally solve it.
    DescCnf {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        size: u32,
        #[arg(long)]
        out: PathBuf,
        /// Solve after writing (built-in solver unless --solver is given).
        #[arg(long)]
        solve: bool,
        /// Where to write the decoded witness when satisfiable.
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Run the exhaustive census for one arity (up to 4).
    Census {
        #[arg(long)]
        arity: u8,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the compressor-table artifacts for one arity (up to 3).
    CompressorTable {
        #[arg(long)]
        arity: u8,
        #[arg(long)]
        out_csv: PathBuf,
        #[arg(long)]
        out_pack: PathBuf,
    },
    /// Encode a circuit into the bit-exact binary format.
    Encode {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write a hex dump instead of raw bytes.
        #[arg(long)]
        hex: bool,
    },
    /// Decode a binary (or hex-dump) encoding back into circuit text.
    Decode {
        #[arg(long)]
        encoded: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Treat the input as a hex dump.
        #[arg(long)]
        hex: bool,
    },
    /// Derive plot-ready CSV series from census CSVs.
    Report {
        /// Census CSV files (any arities).
        #[arg(long, num_args = 1.., required = true)]
        census: Vec<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Solve a DIMACS CNF with the built-in solver, printing s/v lines.
    /// Exits 10 on sat and 20 on unsat, following solver convention.
    Sat {
        #[arg(long)]
        cnf: PathBuf,
    },
    /// Export a circuit as GraphViz DOT.
    Dot {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Search cap exhausted before the table was reached.
#[derive(Debug)]
pub struct CapExceeded {
    pub cap: u32,
}

impl std::fmt::Display for CapExceeded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "no circuit found within the {}-gate cap", self.cap)
    }
}

impl std::error::Error for CapExceeded {}

fn error_code(err: &anyhow::Error) -> &'static str {
    if err.downcast_ref::<TableError>().is_some() {
        return "malformed-table";
    }
    if let Some(e) = err.downcast_ref::<CircuitError>() {
        return match e {
            CircuitError::ArityOverCap { .. } => "arity-over-cap",
            CircuitError::ArityMismatch { .. } => "arity-mismatch",
            _ => "malformed-circuit",
        };
    }
    if err.downcast_ref::<CodecError>().is_some() {
        return "malformed-encoding";
    }
    if let Some(e) = err.downcast_ref::<McspError>() {
        return match e {
            McspError::SolverMissing { .. } => "solver-missing",
            McspError::ArityTooLarge { .. } => "arity-over-cap",
            McspError::ArityMismatch { .. } => "arity-mismatch",
            McspError::BoundTooSmall(_) => "bad-size-bound",
            McspError::SolverFailed(_) => "solver-failed",
            McspError::ModelInvalid(_) | McspError::ModelVerificationFailed(_) => {
                "solver-model-rejected"
            }
            _ => "mcsp",
        };
    }
    if let Some(e) = err.downcast_ref::<CensusError>() {
        return match e {
            CensusError::ArityTooLarge { .. } | CensusError::CompressorArity { .. } => {
                "arity-over-cap"
            }
            _ => "malformed-artifact",
        };
    }
    if err.downcast_ref::<SatError>().is_some() {
        return "malformed-cnf";
    }
    if err.downcast_ref::<CapExceeded>().is_some() {
        return "cap-exceeded";
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return "io";
    }
    "error"
}

fn main() {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {}: {:#}", error_code(&err), err);
            std::process::exit(1);
        }
    }
}
