//! Minimum-circuit-size machinery.
//!
//! * [`verify`] - the NP-style check: a claimed circuit is accepted when it
//!   fits the size bound and its evaluation reproduces the table row for row.
//! * [`minimize`] / [`Frontier`] - exact minimization by a breadth-first
//!   frontier sweep over truth-table space. One shared sweep answers every
//!   table of the arity, which is what makes exhaustive censuses tractable.
//! * [`encode_desc_cnf`] - a propositional encoding of "some circuit with
//!   fewer than `s` gates computes `T`", emitted as DIMACS for any external
//!   solver, plus a model decoder.
//! * [`solve_cnf`] - solver drivers: the built-in CDCL solver or an external
//!   command. Decoded models are always re-verified before being returned; a
//!   model that fails verification is reported as an encoder defect, never
//!   accepted.

mod cnf;
mod frontier;
mod solve;

pub use cnf::{encode_desc_cnf, CnfInstance};
pub use frontier::{Frontier, MAX_SEARCH_ARITY};
pub use solve::{solve_cnf, SatBackend, SolveOutcome};

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError};
use crate::table::TruthTable;

/// Default gate cap for minimization searches.
pub const DEFAULT_SEARCH_CAP: u32 = 12;

/// Cap that always exhausts the table space for supported arities.
pub const EXHAUSTIVE_CAP: u32 = 254;

/// Largest arity where minimization descends below the frontier value with
/// SAT calls. The frontier sweep prices the two operand cones of every gate
/// independently, so on a few tables (at arity 3 and up) a circuit that
/// shares an interior wire between the cones beats the sweep's value; the
/// propositional route has no such restriction and closes the gap. Beyond
/// this arity the descent's unsatisfiability proofs outgrow desk scale and
/// results carry frontier semantics (exact over sharing-free circuits, an
/// upper bound in general).
pub const REFINE_MAX_ARITY: u8 = 3;

#[derive(Debug, Error)]
pub enum McspError {
    #[error("circuit arity {circuit} does not match table arity {table}")]
    ArityMismatch { circuit: u16, table: u8 },
    #[error("arity {n} over the exhaustive-search limit {max}")]
    ArityTooLarge { n: u8, max: u8 },
    #[error("size bound {0} too small to encode (need s >= 1)")]
    BoundTooSmall(u32),
    #[error("invalid circuit: {0}")]
    Circuit(#[from] CircuitError),
    #[error("solver missing: {command}: {detail}")]
    SolverMissing { command: String, detail: String },
    #[error("solver failed: {0}")]
    SolverFailed(String),
    #[error("solver model invalid: {0}")]
    ModelInvalid(String),
    #[error("encoder defect: decoded model failed verification: {0}")]
    ModelVerificationFailed(String),
    #[error("solver io: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver output: {0}")]
    Dimacs(#[from] crate::sat::SatError),
}

/// One decision-problem instance: a table and a gate budget.
#[derive(Debug, Clone)]
pub struct McspInstance {
    pub table: TruthTable,
    pub size_bound: u32,
}

impl McspInstance {
    pub fn new(table: TruthTable, size_bound: u32) -> McspInstance {
        McspInstance { table, size_bound }
    }
}

/// Why a certificate was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    SizeExceeded { size: u32, bound: u32 },
    /// First row where the circuit and the table disagree.
    Mismatch { row: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

/// Checks a certificate circuit against an instance: accept exactly when the
/// gate count fits the bound and all `2^n` rows match. Runs in
/// `O(2^n * size)`.
pub fn verify(circuit: &Circuit, instance: &McspInstance) -> Result<Verdict, McspError> {
    if circuit.n() as u32 != instance.table.n() as u32 {
        return Err(McspError::ArityMismatch {
            circuit: circuit.n(),
            table: instance.table.n(),
        });
    }
    let size = circuit.size() as u32;
    if size > instance.size_bound {
        return Ok(Verdict::Reject(RejectReason::SizeExceeded {
            size,
            bound: instance.size_bound,
        }));
    }
    let table = circuit.evaluate_all_with_cap(instance.table.n())?;
    for row in 0..table.rows() {
        if table.get(row) != instance.table.get(row) {
            return Ok(Verdict::Reject(RejectReason::Mismatch { row }));
        }
    }
    Ok(Verdict::Accept)
}

/// Outcome of an exact minimization.
///
/// When `search_cap_hit` is false, `minimal_size` is the least gate count
/// reachable by the frontier sweep and `witness` is the canonical circuit of
/// exactly that size; the witness always verifies against its own table.
#[derive(Debug, Clone)]
pub struct MinimizationResult {
    pub minimal_size: Option<u32>,
    pub witness: Option<Circuit>,
    /// The witness is the deterministic tie-break-canonical one.
    pub canonical: bool,
    /// The cap was exhausted before the table was reached.
    pub search_cap_hit: bool,
}

/// Finds the minimal circuit for `table`: a frontier sweep up to `cap`
/// gates gives the first answer and canonical witness, then (for arities up
/// to [`REFINE_MAX_ARITY`]) a SAT descent tightens it whenever a
/// shared-wire circuit beats the sweep's value. Exhaustive for arities up
/// to [`MAX_SEARCH_ARITY`].
pub fn minimize(table: &TruthTable, cap: u32) -> Result<MinimizationResult, McspError> {
    let frontier = Frontier::build(table.n(), cap)?;
    minimize_with_frontier(&frontier, table)
}

/// Same as [`minimize`], reusing a frontier already built for the arity.
/// Censuses answer every table of an arity off one shared sweep through this
/// entry point, so their numbers are identical to per-table [`minimize`]
/// calls by construction.
pub fn minimize_with_frontier(
    frontier: &Frontier,
    table: &TruthTable,
) -> Result<MinimizationResult, McspError> {
    if frontier.n() != table.n() {
        return Err(McspError::ArityMismatch {
            circuit: frontier.n() as u16,
            table: table.n(),
        });
    }
    let Some(size) = frontier.cost_of(table) else {
        return Ok(MinimizationResult {
            minimal_size: None,
            witness: None,
            canonical: false,
            search_cap_hit: true,
        });
    };
    let witness = frontier.witness(table).expect("reached tables have witnesses");
    debug_assert_eq!(witness.size() as u32, size);
    let mut result = MinimizationResult {
        minimal_size: Some(size),
        witness: Some(witness),
        canonical: true,
        search_cap_hit: false,
    };
    if table.n() <= REFINE_MAX_ARITY {
        if let Some((refined_size, refined_witness)) = refine_below(table, size)? {
            result.minimal_size = Some(refined_size);
            result.witness = Some(refined_witness);
            result.canonical = false;
        }
    }
    Ok(result)
}

/// Looks for circuits strictly smaller than `upper` via the propositional
/// encoding, descending to the true minimum. Solver models are simplified
/// (functional dedup over wire tables) before the next probe so the bound
/// drops as fast as the model allows. Deterministic: the built-in solver
/// has no random state, so the same table always yields the same witness.
fn refine_below(table: &TruthTable, upper: u32) -> Result<Option<(u32, Circuit)>, McspError> {
    let mut best: Option<(u32, Circuit)> = None;
    let mut bound = upper;
    while bound > 0 {
        let cnf = encode_desc_cnf(&McspInstance::new(table.clone(), bound))?;
        match solve_cnf(&cnf, &SatBackend::Builtin)? {
            SolveOutcome::Unsat => break,
            SolveOutcome::Sat { witness, .. } => {
                let slim = dedup_wires(&witness);
                debug_assert_eq!(&slim.evaluate_all().unwrap(), table);
                let size = slim.size() as u32;
                debug_assert!(size < bound);
                best = Some((size, slim));
                bound = size;
            }
        }
    }
    Ok(best)
}

/// Rebuilds a small circuit merging wires with identical tables; constant
/// operands and double negations fold as a byproduct. Exact for arities up
/// to 6 (one table word per wire).
fn dedup_wires(circuit: &Circuit) -> Circuit {
    use std::collections::HashMap;

    use crate::circuit::{CircuitBuilder, GateOp, Wire};

    let n = circuit.n();
    debug_assert!(n <= 6);
    let rows = 1u64 << n;
    let full = if rows == 64 { !0u64 } else { (1u64 << rows) - 1 };

    let mut by_table: HashMap<u64, Wire> = HashMap::new();
    by_table.insert(0, Wire::False);
    by_table.insert(full, Wire::True);
    for j in 0..n {
        let mut mask = 0u64;
        for row in 0..rows {
            if (row >> (n - 1 - j)) & 1 == 1 {
                mask |= 1 << row;
            }
        }
        by_table.entry(mask).or_insert(Wire::Input(j));
    }

    let mut builder = CircuitBuilder::new(n);
    let mut resolved: Vec<(Wire, u64)> = Vec::with_capacity(circuit.size());
    let table_of = |w: Wire| -> u64 {
        match w {
            Wire::False => 0,
            Wire::True => full,
            Wire::Input(j) => {
                let mut mask = 0u64;
                for row in 0..rows {
                    if (row >> (n - 1 - j)) & 1 == 1 {
                        mask |= 1 << row;
                    }
                }
                mask
            }
            Wire::Gate(_) => unreachable!("gates resolve through the map"),
        }
    };
    for gate in circuit.gates() {
        let fetch = |w: Wire| -> (Wire, u64) {
            match w {
                Wire::Gate(g) => resolved[g as usize],
                other => (other, table_of(other)),
            }
        };
        let (wa, ta) = fetch(gate.in1);
        let mask = match gate.op {
            GateOp::Not => !ta & full,
            op => {
                let (_, tb) = fetch(gate.in2.expect("binary gate"));
                match op {
                    GateOp::And => ta & tb,
                    GateOp::Or => ta | tb,
                    GateOp::Not => unreachable!(),
                }
            }
        };
        let wire = match by_table.get(&mask) {
            Some(&w) => w,
            None => {
                let w = match gate.op {
                    GateOp::Not => builder.not(wa),
                    GateOp::And => builder.and(wa, fetch(gate.in2.unwrap()).0),
                    GateOp::Or => builder.or(wa, fetch(gate.in2.unwrap()).0),
                };
                by_table.insert(mask, w);
                w
            }
        };
        resolved.push((wire, mask));
    }
    let output = match circuit.output() {
        Wire::Gate(g) => resolved[g as usize].0,
        other => other,
    };
    cnf::prune_dead_gates(&builder.finish(output))
}

/// Decision MCSP: is there a circuit of at most `size_bound` gates computing
/// the table? Runs an exhaustive minimization, so the verdict reflects true
/// minimal sizes even when they sit below the frontier value.
pub fn decide(instance: &McspInstance) -> Result<bool, McspError> {
    let result = minimize(&instance.table, EXHAUSTIVE_CAP)?;
    Ok(match result.minimal_size {
        Some(size) => size <= instance.size_bound,
        None => false,
    })
}
