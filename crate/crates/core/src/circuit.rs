//! Gate-level circuits over the `{AND, OR, NOT}` basis.
//!
//! A circuit is a list of gates in topological order (references only point
//! backward), an input arity, and an output wire. Inputs and the two constant
//! wires are free: `size` counts gates only, `depth` counts the longest
//! input-to-output gate path. Circuits are immutable once built; any number of
//! threads may evaluate the same circuit concurrently.
//!
//! The text format, one gate per line:
//!
//! ```text
//! n=3
//! g0 = NOT(x2)
//! g1 = AND(x1, g0)
//! g2 = AND(g1, x3)
//! out = g2
//! ```
//!
//! References are `x<j>` (inputs, 1-based, `x1` is the most significant bit of
//! the row index), `g<j>` (earlier gates, 0-based), and the constants `0`/`1`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::table::TruthTable;

/// Default arity cap for whole-table evaluation.
pub const DEFAULT_EVAL_ARITY_CAP: u8 = 20;

/// Gate operation. Codes 0/1/2 are the wire-format op codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateOp {
    And,
    Or,
    Not,
}

impl GateOp {
    pub fn code(self) -> u8 {
        match self {
            GateOp::And => 0,
            GateOp::Or => 1,
            GateOp::Not => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<GateOp> {
        match code {
            0 => Some(GateOp::And),
            1 => Some(GateOp::Or),
            2 => Some(GateOp::Not),
            _ => None,
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateOp::And | GateOp::Or => 2,
            GateOp::Not => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateOp::And => "AND",
            GateOp::Or => "OR",
            GateOp::Not => "NOT",
        }
    }
}

/// The allowed gate set. Fixed to `{AND, OR, NOT}` in format version 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisSpec {
    ops: [GateOp; 3],
}

impl BasisSpec {
    pub fn v1() -> Self {
        BasisSpec {
            ops: [GateOp::And, GateOp::Or, GateOp::Not],
        }
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn arity(&self, op: GateOp) -> usize {
        op.arity()
    }

    /// Stable tag used in emitted artifacts.
    pub fn tag(&self) -> &'static str {
        "AND-OR-NOT"
    }
}

impl Default for BasisSpec {
    fn default() -> Self {
        Self::v1()
    }
}

/// A wire: one of the two constants, an input, or an earlier gate's output.
///
/// The derived ordering matches the canonical wire numbering used by the
/// codec and the CNF encoder: FALSE, TRUE, inputs, then gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wire {
    False,
    True,
    Input(u16),
    Gate(u32),
}

impl Wire {
    /// Canonical wire index: 0 = FALSE, 1 = TRUE, `2..n+1` = inputs,
    /// `n+2..` = gates in topological order.
    pub fn canonical_index(self, n: u16) -> u64 {
        match self {
            Wire::False => 0,
            Wire::True => 1,
            Wire::Input(j) => 2 + j as u64,
            Wire::Gate(i) => 2 + n as u64 + i as u64,
        }
    }

    /// Inverse of [`Wire::canonical_index`]. Does not bounds-check gate or
    /// input indices against a particular circuit.
    pub fn from_canonical_index(index: u64, n: u16) -> Wire {
        match index {
            0 => Wire::False,
            1 => Wire::True,
            i if i < 2 + n as u64 => Wire::Input((i - 2) as u16),
            i => Wire::Gate((i - 2 - n as u64) as u32),
        }
    }
}

/// A single gate. `in2` is present exactly for the binary ops; a `Not` gate
/// carrying a second input is a structural violation reported by
/// [`Circuit::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gate {
    pub op: GateOp,
    pub in1: Wire,
    pub in2: Option<Wire>,
}

impl Gate {
    pub fn and(a: Wire, b: Wire) -> Gate {
        Gate {
            op: GateOp::And,
            in1: a,
            in2: Some(b),
        }
    }

    pub fn or(a: Wire, b: Wire) -> Gate {
        Gate {
            op: GateOp::Or,
            in1: a,
            in2: Some(b),
        }
    }

    pub fn not(a: Wire) -> Gate {
        Gate {
            op: GateOp::Not,
            in1: a,
            in2: None,
        }
    }

    pub fn inputs(&self) -> impl Iterator<Item = Wire> + '_ {
        std::iter::once(self.in1).chain(self.in2)
    }
}

/// A structural invariant violation, naming the offending node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Circuit arity is zero.
    ZeroArity,
    /// A gate (or the output) references an input index `>= n`.
    InputOutOfRange { gate: Option<u32>, input: u16 },
    /// Gate `gate` references gate `reference` at or after its own position.
    ForwardReference { gate: u32, reference: u32 },
    /// Gate arity does not match its operation.
    GateArity { gate: u32, op: GateOp },
    /// The output references a gate index past the end of the list.
    OutputOutOfRange { reference: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroArity => write!(f, "circuit arity is zero"),
            Violation::InputOutOfRange { gate: Some(g), input } => {
                write!(f, "gate g{g} references input x{} out of range", input + 1)
            }
            Violation::InputOutOfRange { gate: None, input } => {
                write!(f, "output references input x{} out of range", input + 1)
            }
            Violation::ForwardReference { gate, reference } => {
                write!(f, "gate g{gate} references non-earlier gate g{reference}")
            }
            Violation::GateArity { gate, op } => {
                write!(f, "gate g{gate} has wrong arity for {}", op.name())
            }
            Violation::OutputOutOfRange { reference } => {
                write!(f, "output references missing gate g{reference}")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("input arity mismatch: circuit expects {expected} bits, got {got}")]
    ArityMismatch { expected: u16, got: usize },
    #[error("arity {n} exceeds evaluation cap {cap}")]
    ArityOverCap { n: u16, cap: u8 },
    #[error("structurally invalid circuit: {0}")]
    Invalid(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A fan-in-bounded DAG of gates over `{AND, OR, NOT}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    n: u16,
    gates: Vec<Gate>,
    output: Wire,
}

impl Circuit {
    /// Assembles a circuit without checking invariants; pair with
    /// [`Circuit::validate`] when the parts come from outside.
    pub fn from_parts(n: u16, gates: Vec<Gate>, output: Wire) -> Circuit {
        Circuit { n, gates, output }
    }

    /// A zero-gate circuit whose output is wired to `output`.
    pub fn trivial(n: u16, output: Wire) -> Circuit {
        Circuit {
            n,
            gates: Vec::new(),
            output,
        }
    }

    pub fn n(&self) -> u16 {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> Wire {
        self.output
    }

    /// Gate count. Inputs and constants are free.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Longest input-to-output path counted in gates; 0 for gateless circuits.
    ///
    /// Assumes a structurally valid circuit.
    pub fn depth(&self) -> u32 {
        let mut gate_depth = vec![0u32; self.gates.len()];
        for (i, gate) in self.gates.iter().enumerate() {
            let d = gate
                .inputs()
                .map(|w| match w {
                    Wire::Gate(g) => gate_depth[g as usize],
                    _ => 0,
                })
                .max()
                .unwrap_or(0);
            gate_depth[i] = d + 1;
        }
        match self.output {
            Wire::Gate(g) => gate_depth[g as usize],
            _ => 0,
        }
    }

    /// Checks every structural invariant; the empty list means the circuit is
    /// well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        if self.n == 0 {
            violations.push(Violation::ZeroArity);
        }
        for (i, gate) in self.gates.iter().enumerate() {
            let i = i as u32;
            let expected = gate.op.arity();
            let got = 1 + gate.in2.is_some() as usize;
            if expected != got {
                violations.push(Violation::GateArity { gate: i, op: gate.op });
            }
            for w in gate.inputs() {
                match w {
                    Wire::Input(j) if j >= self.n => {
                        violations.push(Violation::InputOutOfRange {
                            gate: Some(i),
                            input: j,
                        });
                    }
                    Wire::Gate(g) if g >= i => {
                        violations.push(Violation::ForwardReference { gate: i, reference: g });
                    }
                    _ => {}
                }
            }
        }
        match self.output {
            Wire::Input(j) if j >= self.n => {
                violations.push(Violation::InputOutOfRange { gate: None, input: j });
            }
            Wire::Gate(g) if g as usize >= self.gates.len() => {
                violations.push(Violation::OutputOutOfRange { reference: g });
            }
            _ => {}
        }
        violations
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn require_valid(&self) -> Result<(), CircuitError> {
        match self.validate().into_iter().next() {
            None => Ok(()),
            Some(v) => Err(CircuitError::Invalid(v.to_string())),
        }
    }

    /// Evaluates the circuit on a single assignment (`x[0]` is `x1`).
    pub fn evaluate_row(&self, x: &[bool]) -> Result<bool, CircuitError> {
        if x.len() != self.n as usize {
            return Err(CircuitError::ArityMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        self.require_valid()?;
        let mut values = vec![false; self.gates.len()];
        let wire = |w: Wire, values: &[bool]| match w {
            Wire::False => false,
            Wire::True => true,
            Wire::Input(j) => x[j as usize],
            Wire::Gate(g) => values[g as usize],
        };
        for (i, gate) in self.gates.iter().enumerate() {
            let a = wire(gate.in1, &values);
            values[i] = match gate.op {
                GateOp::And => a & wire(gate.in2.unwrap(), &values),
                GateOp::Or => a | wire(gate.in2.unwrap(), &values),
                GateOp::Not => !a,
            };
        }
        Ok(wire(self.output, &values))
    }

    /// Evaluates the circuit on all `2^n` inputs, recovering its truth table.
    ///
    /// Runs in `O(size * 2^n / 64)` word operations. The default arity cap is
    /// [`DEFAULT_EVAL_ARITY_CAP`].
    pub fn evaluate_all(&self) -> Result<TruthTable, CircuitError> {
        self.evaluate_all_with_cap(DEFAULT_EVAL_ARITY_CAP)
    }

    pub fn evaluate_all_with_cap(&self, cap: u8) -> Result<TruthTable, CircuitError> {
        // The result is a table, so the table type's arity limit binds too.
        let cap = cap.min(crate::table::MAX_TABLE_ARITY);
        if self.n as u32 > cap as u32 {
            return Err(CircuitError::ArityOverCap { n: self.n, cap });
        }
        self.require_valid()?;
        let rows = 1u64 << self.n;
        let nblocks = rows.div_ceil(64);
        let mut values = vec![0u64; self.gates.len()];
        let mut blocks = Vec::with_capacity(nblocks as usize);
        for block in 0..nblocks {
            for (i, gate) in self.gates.iter().enumerate() {
                let a = self.wire_block(gate.in1, block, &values);
                values[i] = match gate.op {
                    GateOp::And => a & self.wire_block(gate.in2.unwrap(), block, &values),
                    GateOp::Or => a | self.wire_block(gate.in2.unwrap(), block, &values),
                    GateOp::Not => !a,
                };
            }
            blocks.push(self.wire_block(self.output, block, &values));
        }
        Ok(TruthTable::from_blocks(self.n as u8, blocks))
    }

    /// 64 consecutive rows of a wire's table, starting at row `block * 64`.
    fn wire_block(&self, w: Wire, block: u64, values: &[u64]) -> u64 {
        // Within a 64-row block, input x_{j+1} follows a fixed alternation
        // pattern determined by its bit position in the row index.
        const VAR_MASKS: [u64; 6] = [
            0xAAAA_AAAA_AAAA_AAAA,
            0xCCCC_CCCC_CCCC_CCCC,
            0xF0F0_F0F0_F0F0_F0F0,
            0xFF00_FF00_FF00_FF00,
            0xFFFF_0000_FFFF_0000,
            0xFFFF_FFFF_0000_0000,
        ];
        match w {
            Wire::False => 0,
            Wire::True => !0,
            Wire::Gate(g) => values[g as usize],
            Wire::Input(j) => {
                let weight = (self.n - 1 - j) as u32;
                if weight < 6 {
                    VAR_MASKS[weight as usize]
                } else if (block >> (weight - 6)) & 1 == 1 {
                    !0
                } else {
                    0
                }
            }
        }
    }

    /// GraphViz DOT form, for visualization.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph circuit {\n  rankdir=LR;\n");
        for j in 0..self.n {
            out.push_str(&format!("  x{} [shape=box];\n", j + 1));
        }
        let mut consts = [false; 2];
        let note_const = |w: Wire, consts: &mut [bool; 2]| match w {
            Wire::False => consts[0] = true,
            Wire::True => consts[1] = true,
            _ => {}
        };
        for gate in &self.gates {
            for w in gate.inputs() {
                note_const(w, &mut consts);
            }
        }
        note_const(self.output, &mut consts);
        if consts[0] {
            out.push_str("  c0 [shape=diamond, label=\"0\"];\n");
        }
        if consts[1] {
            out.push_str("  c1 [shape=diamond, label=\"1\"];\n");
        }
        let name = |w: Wire| match w {
            Wire::False => "c0".to_string(),
            Wire::True => "c1".to_string(),
            Wire::Input(j) => format!("x{}", j + 1),
            Wire::Gate(g) => format!("g{g}"),
        };
        for (i, gate) in self.gates.iter().enumerate() {
            out.push_str(&format!("  g{i} [label=\"g{i}: {}\"];\n", gate.op.name()));
            for w in gate.inputs() {
                out.push_str(&format!("  {} -> g{i};\n", name(w)));
            }
        }
        out.push_str("  out [shape=plaintext];\n");
        out.push_str(&format!("  {} -> out;\n", name(self.output)));
        out.push_str("}\n");
        out
    }

    /// A uniformly random structurally valid circuit with exactly `s` gates.
    /// Gates may be dead or trivial; the output is a random wire.
    pub fn random<R: Rng + ?Sized>(n: u16, s: u16, rng: &mut R) -> Circuit {
        assert!(n >= 1);
        let mut builder = CircuitBuilder::new(n);
        for i in 0..s {
            let pool = 2 + n as u64 + i as u64;
            let pick = |rng: &mut R| Wire::from_canonical_index(rng.gen_range(0..pool), n);
            match rng.gen_range(0..3u8) {
                0 => builder.and(pick(rng), pick(rng)),
                1 => builder.or(pick(rng), pick(rng)),
                _ => builder.not(pick(rng)),
            };
        }
        let output = Wire::from_canonical_index(rng.gen_range(0..2 + n as u64 + s as u64), n);
        builder.finish(output)
    }
}

impl fmt::Display for Circuit {
    /// Canonical text form; see the module docs.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        for (i, gate) in self.gates.iter().enumerate() {
            let args: Vec<String> = gate.inputs().map(ref_text).collect();
            writeln!(f, "g{i} = {}({})", gate.op.name(), args.join(", "))?;
        }
        writeln!(f, "out = {}", ref_text(self.output))
    }
}

fn ref_text(w: Wire) -> String {
    match w {
        Wire::False => "0".to_string(),
        Wire::True => "1".to_string(),
        Wire::Input(j) => format!("x{}", j + 1),
        Wire::Gate(g) => format!("g{g}"),
    }
}

fn parse_ref(s: &str, line: usize) -> Result<Wire, CircuitError> {
    let s = s.trim();
    let err = |msg: String| CircuitError::Parse { line, msg };
    if s == "0" {
        return Ok(Wire::False);
    }
    if s == "1" {
        return Ok(Wire::True);
    }
    if let Some(rest) = s.strip_prefix('x') {
        let j: u16 = rest
            .parse()
            .map_err(|_| err(format!("bad input reference {s:?}")))?;
        if j == 0 {
            return Err(err("input references are 1-based".into()));
        }
        return Ok(Wire::Input(j - 1));
    }
    if let Some(rest) = s.strip_prefix('g') {
        let g: u32 = rest
            .parse()
            .map_err(|_| err(format!("bad gate reference {s:?}")))?;
        return Ok(Wire::Gate(g));
    }
    Err(err(format!("unrecognized reference {s:?}")))
}

impl FromStr for Circuit {
    type Err = CircuitError;

    /// Parses the text form and validates the result. Blank lines and `#`
    /// comments are ignored.
    fn from_str(s: &str) -> Result<Self, CircuitError> {
        let mut n: Option<u16> = None;
        let mut gates: Vec<Gate> = Vec::new();
        let mut output: Option<Wire> = None;
        for (lineno, raw) in s.lines().enumerate() {
            let line = lineno + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let err = |msg: String| CircuitError::Parse { line, msg };
            if output.is_some() {
                return Err(err("content after `out =` line".into()));
            }
            let (lhs, rhs) = text
                .split_once('=')
                .ok_or_else(|| err(format!("expected `<name> = ...`, got {text:?}")))?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            match lhs {
                "n" => {
                    if n.is_some() {
                        return Err(err("duplicate `n=` line".into()));
                    }
                    n = Some(
                        rhs.parse()
                            .map_err(|_| err(format!("bad arity {rhs:?}")))?,
                    );
                }
                "out" => {
                    if n.is_none() {
                        return Err(err("`out =` before `n=`".into()));
                    }
                    output = Some(parse_ref(rhs, line)?);
                }
                name if name.starts_with('g') => {
                    if n.is_none() {
                        return Err(err("gate line before `n=`".into()));
                    }
                    let idx: u32 = name[1..]
                        .parse()
                        .map_err(|_| err(format!("bad gate name {name:?}")))?;
                    if idx as usize != gates.len() {
                        return Err(err(format!(
                            "gate g{idx} out of order (expected g{})",
                            gates.len()
                        )));
                    }
                    let open = rhs
                        .find('(')
                        .ok_or_else(|| err(format!("expected `OP(...)`, got {rhs:?}")))?;
                    if !rhs.ends_with(')') {
                        return Err(err(format!("missing `)` in {rhs:?}")));
                    }
                    let op = match &rhs[..open] {
                        "AND" => GateOp::And,
                        "OR" => GateOp::Or,
                        "NOT" => GateOp::Not,
                        other => return Err(err(format!("unknown operation {other:?}"))),
                    };
                    let args: Vec<&str> = rhs[open + 1..rhs.len() - 1].split(',').collect();
                    let gate = match args.len() {
                        1 => Gate {
                            op,
                            in1: parse_ref(args[0], line)?,
                            in2: None,
                        },
                        2 => Gate {
                            op,
                            in1: parse_ref(args[0], line)?,
                            in2: Some(parse_ref(args[1], line)?),
                        },
                        k => return Err(err(format!("{} takes 1 or 2 arguments, got {k}", op.name()))),
                    };
                    gates.push(gate);
                }
                other => return Err(err(format!("unrecognized line {other:?}"))),
            }
        }
        let n = n.ok_or(CircuitError::Parse {
            line: 0,
            msg: "missing `n=` line".into(),
        })?;
        let output = output.ok_or(CircuitError::Parse {
            line: 0,
            msg: "missing `out =` line".into(),
        })?;
        let circuit = Circuit::from_parts(n, gates, output);
        circuit.require_valid()?;
        Ok(circuit)
    }
}

/// Incremental builder that keeps references valid by construction.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    n: u16,
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new(n: u16) -> CircuitBuilder {
        assert!(n >= 1, "circuits need at least one input");
        CircuitBuilder { n, gates: Vec::new() }
    }

    pub fn n(&self) -> u16 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn input(&self, j: u16) -> Wire {
        assert!(j < self.n, "input x{} out of range", j + 1);
        Wire::Input(j)
    }

    fn check(&self, w: Wire) {
        match w {
            Wire::Input(j) => assert!(j < self.n, "input x{} out of range", j + 1),
            Wire::Gate(g) => assert!(
                (g as usize) < self.gates.len(),
                "gate g{g} not built yet"
            ),
            _ => {}
        }
    }

    fn push(&mut self, gate: Gate) -> Wire {
        let idx = self.gates.len() as u32;
        self.gates.push(gate);
        Wire::Gate(idx)
    }

    pub fn and(&mut self, a: Wire, b: Wire) -> Wire {
        self.check(a);
        self.check(b);
        self.push(Gate::and(a, b))
    }

    pub fn or(&mut self, a: Wire, b: Wire) -> Wire {
        self.check(a);
        self.check(b);
        self.push(Gate::or(a, b))
    }

    pub fn not(&mut self, a: Wire) -> Wire {
        self.check(a);
        self.push(Gate::not(a))
    }

    pub fn finish(self, output: Wire) -> Circuit {
        self.check(output);
        Circuit {
            n: self.n,
            gates: self.gates,
            output,
        }
    }
}
