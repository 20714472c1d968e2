//! Solver drivers for [`CnfInstance`]s.
//!
//! The external path writes DIMACS to a temp file, substitutes it into a
//! whitespace-split command template (`{cnf}` marks the path; appended when
//! absent), and parses the conventional `s`/`v` result lines from stdout.
//! Either way, a sat model is decoded and re-verified against the instance's
//! table and bound before it is returned; a decoded circuit that fails
//! verification is an encoder bug by contract and comes back as an error.

use std::process::Command;

use crate::circuit::Circuit;
use crate::sat::{self, SatOutcome};

use super::{verify, CnfInstance, McspError, McspInstance};

/// Which solver to run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatBackend {
    /// The crate's own CDCL solver, in process.
    Builtin,
    /// An external command template, e.g. `"kissat -q {cnf}"`.
    External(String),
}

impl SatBackend {
    pub fn external(template: impl Into<String>) -> SatBackend {
        SatBackend::External(template.into())
    }
}

/// Verdict for one instance; sat carries the decoded, verified witness.
#[derive(Debug, Clone)]
pub enum SolveOutcome {
    Sat { model: Vec<bool>, witness: Circuit },
    Unsat,
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat { .. })
    }
}

/// Solves the instance and, on sat, decodes and verifies the witness.
pub fn solve_cnf(cnf: &CnfInstance, backend: &SatBackend) -> Result<SolveOutcome, McspError> {
    let outcome = match backend {
        SatBackend::Builtin => sat::solve(cnf.num_vars(), cnf.clauses())?,
        SatBackend::External(template) => run_external(cnf, template)?,
    };
    match outcome {
        SatOutcome::Unsat => Ok(SolveOutcome::Unsat),
        SatOutcome::Sat(model) => {
            let witness = cnf.decode_model(&model)?;
            let instance = McspInstance::new(cnf.table().clone(), cnf.bound() - 1);
            match verify(&witness, &instance)? {
                super::Verdict::Accept => Ok(SolveOutcome::Sat { model, witness }),
                super::Verdict::Reject(reason) => Err(McspError::ModelVerificationFailed(
                    format!("{reason:?}"),
                )),
            }
        }
    }
}

fn run_external(cnf: &CnfInstance, template: &str) -> Result<SatOutcome, McspError> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("instance.cnf");
    std::fs::write(&path, cnf.to_dimacs())?;
    let path_str = path.to_string_lossy().into_owned();

    let mut parts: Vec<String> = template.split_whitespace().map(String::from).collect();
    if parts.is_empty() {
        return Err(McspError::SolverMissing {
            command: template.into(),
            detail: "empty solver command".into(),
        });
    }
    let mut substituted = false;
    for part in &mut parts {
        if part.contains("{cnf}") {
            *part = part.replace("{cnf}", &path_str);
            substituted = true;
        }
    }
    if !substituted {
        parts.push(path_str);
    }

    let output = Command::new(&parts[0]).args(&parts[1..]).output().map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            McspError::SolverMissing {
                command: parts[0].clone(),
                detail: e.to_string(),
            }
        } else {
            McspError::Io(e)
        }
    })?;
    let stdout = String::from_utf8_lossy(&output.stdout);
    parse_solver_output(&stdout, cnf.num_vars()).ok_or_else(|| {
        McspError::SolverFailed(format!(
            "no verdict in solver output (exit {:?}, {} bytes of stdout)",
            output.status.code(),
            stdout.len()
        ))
    })
}

/// Parses conventional solver output: an `s SATISFIABLE`/`s UNSATISFIABLE`
/// verdict line (bare verdicts accepted too) and `v` literal lines ending
/// at 0. Returns `None` when no verdict is present.
pub(crate) fn parse_solver_output(text: &str, num_vars: usize) -> Option<SatOutcome> {
    let mut satisfiable: Option<bool> = None;
    let mut model = vec![false; num_vars];
    let mut saw_model = false;
    for raw in text.lines() {
        let line = raw.trim();
        let verdict = line.strip_prefix("s ").unwrap_or(line);
        match verdict {
            "SATISFIABLE" => satisfiable = Some(true),
            "UNSATISFIABLE" => satisfiable = Some(false),
            _ => {}
        }
        if let Some(rest) = line.strip_prefix("v ") {
            for tok in rest.split_whitespace() {
                let lit: i64 = match tok.parse() {
                    Ok(l) => l,
                    Err(_) => continue,
                };
                if lit == 0 {
                    continue;
                }
                saw_model = true;
                let var = lit.unsigned_abs() as usize;
                if var <= num_vars {
                    model[var - 1] = lit > 0;
                }
            }
        }
    }
    match satisfiable {
        Some(true) if saw_model => Some(SatOutcome::Sat(model)),
        Some(true) => None,
        Some(false) => Some(SatOutcome::Unsat),
        None => None,
    }
}
