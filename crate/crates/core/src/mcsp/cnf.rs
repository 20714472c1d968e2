//! Propositional encoding of "some circuit with fewer than `s` gates
//! computes `T`".
//!
//! The instance allocates `g = s - 1` gate slots. Per slot `i` there are
//! one-hot op selectors over `{AND, OR, NOT}` and two one-hot input-wire
//! selectors over the `n + 2 + i` earlier nodes (constants, inputs, earlier
//! slots), plus per-row evaluation variables tied to the selected semantics.
//! A one-hot output selector ranges over every node, and unit-style clauses
//! force the output's row values to the target table. Binary gates order
//! their operands (`in1 < in2`), which prunes mirror solutions without
//! changing satisfiability; NOT slots repeat their single operand.
//!
//! Satisfying assignments decode to circuits with at most `s - 1` gates
//! computing the table; unused slots decode too and are swept out of the
//! witness by a cone-of-output pass.

use crate::circuit::{Circuit, Gate, GateOp, Wire};
use crate::sat::write_dimacs;
use crate::table::TruthTable;

use super::{McspError, McspInstance, MAX_SEARCH_ARITY};

/// Variable ids for one gate slot.
#[derive(Debug, Clone)]
struct SlotVars {
    /// AND, OR, NOT selectors.
    op: [i32; 3],
    /// First input selector, indexed by canonical wire index.
    sel1: Vec<i32>,
    /// Second input selector.
    sel2: Vec<i32>,
    /// Selected first-operand value per row.
    a_val: Vec<i32>,
    /// Selected second-operand value per row.
    b_val: Vec<i32>,
    /// Gate output value per row.
    g_val: Vec<i32>,
}

/// A CNF instance: satisfiable exactly when some circuit with fewer than
/// `bound` gates computes `table`.
#[derive(Debug, Clone)]
pub struct CnfInstance {
    table: TruthTable,
    bound: u32,
    gates: u32,
    num_vars: i32,
    clauses: Vec<Vec<i32>>,
    slots: Vec<SlotVars>,
    out: Vec<i32>,
}

fn fixed_wire_value(wire: Wire, row: u64, n: u16) -> bool {
    match wire {
        Wire::False => false,
        Wire::True => true,
        Wire::Input(j) => (row >> (n - 1 - j)) & 1 == 1,
        Wire::Gate(_) => unreachable!("not a fixed wire"),
    }
}

/// Emits pairwise at-most-one plus at-least-one.
fn one_hot(clauses: &mut Vec<Vec<i32>>, vars: &[i32]) {
    clauses.push(vars.to_vec());
    for (i, &a) in vars.iter().enumerate() {
        for &b in &vars[i + 1..] {
            clauses.push(vec![-a, -b]);
        }
    }
}

/// Encodes `DESC_{<s}` for the instance's table and bound.
///
/// Errors when the bound is zero (nothing to encode) or the arity is over
/// the supported search limit.
pub fn encode_desc_cnf(instance: &McspInstance) -> Result<CnfInstance, McspError> {
    let table = &instance.table;
    let s = instance.size_bound;
    if s == 0 {
        return Err(McspError::BoundTooSmall(0));
    }
    if table.n() > MAX_SEARCH_ARITY {
        return Err(McspError::ArityTooLarge {
            n: table.n(),
            max: MAX_SEARCH_ARITY,
        });
    }
    let n = table.n() as u16;
    let g = s - 1;
    let rows = table.rows();

    let mut next_var = 0i32;
    let mut fresh = |count: usize| -> Vec<i32> {
        (0..count)
            .map(|_| {
                next_var += 1;
                next_var
            })
            .collect()
    };

    let mut slots = Vec::with_capacity(g as usize);
    for i in 0..g {
        let pool = (2 + n as u32 + i) as usize;
        let op_vars = fresh(3);
        slots.push(SlotVars {
            op: [op_vars[0], op_vars[1], op_vars[2]],
            sel1: fresh(pool),
            sel2: fresh(pool),
            a_val: fresh(rows as usize),
            b_val: fresh(rows as usize),
            g_val: fresh(rows as usize),
        });
    }
    let out = fresh((2 + n as u32 + g) as usize);

    let mut clauses: Vec<Vec<i32>> = Vec::new();
    for (i, slot) in slots.iter().enumerate() {
        let pool = slot.sel1.len();
        one_hot(&mut clauses, &slot.op);
        one_hot(&mut clauses, &slot.sel1);
        one_hot(&mut clauses, &slot.sel2);
        let [_op_and, _op_or, op_not] = slot.op;

        // Binary gates order their operands strictly; mirrored and repeated
        // picks are pruned.
        for w1 in 0..pool {
            for w2 in 0..=w1 {
                clauses.push(vec![op_not, -slot.sel1[w1], -slot.sel2[w2]]);
            }
        }
        // NOT repeats its operand in both slots.
        for w in 0..pool {
            clauses.push(vec![-op_not, -slot.sel1[w], slot.sel2[w]]);
        }
        // NOT of a constant is the other constant; no circuit needs it.
        clauses.push(vec![-op_not, -slot.sel1[0]]);
        clauses.push(vec![-op_not, -slot.sel1[1]]);

        // Tie selected operand values to the chosen wires.
        for r in 0..rows {
            let ri = r as usize;
            for w in 0..pool {
                let wire = Wire::from_canonical_index(w as u64, n);
                match wire {
                    Wire::Gate(j) => {
                        let src = slots[j as usize].g_val[ri];
                        clauses.push(vec![-slot.sel1[w], -src, slot.a_val[ri]]);
                        clauses.push(vec![-slot.sel1[w], src, -slot.a_val[ri]]);
                        clauses.push(vec![-slot.sel2[w], -src, slot.b_val[ri]]);
                        clauses.push(vec![-slot.sel2[w], src, -slot.b_val[ri]]);
                    }
                    fixed => {
                        let value = fixed_wire_value(fixed, r, n);
                        let a = if value { slot.a_val[ri] } else { -slot.a_val[ri] };
                        let b = if value { slot.b_val[ri] } else { -slot.b_val[ri] };
                        clauses.push(vec![-slot.sel1[w], a]);
                        clauses.push(vec![-slot.sel2[w], b]);
                    }
                }
            }
        }

        // Selected semantics per row.
        let [op_and, op_or, op_not] = slot.op;
        for r in 0..rows as usize {
            let (a, b, gv) = (slot.a_val[r], slot.b_val[r], slot.g_val[r]);
            clauses.push(vec![-op_and, -gv, a]);
            clauses.push(vec![-op_and, -gv, b]);
            clauses.push(vec![-op_and, gv, -a, -b]);
            clauses.push(vec![-op_or, gv, -a]);
            clauses.push(vec![-op_or, gv, -b]);
            clauses.push(vec![-op_or, -gv, a, b]);
            clauses.push(vec![-op_not, gv, a]);
            clauses.push(vec![-op_not, -gv, -a]);
        }
        let _ = i;
    }

    // Double negations collapse; forbid a NOT slot reading a NOT slot.
    // (Padding gates are ANDs, so this never blocks a padded solution.)
    for j in 1..g as usize {
        for i in 0..j {
            let wire_idx = 2 + n as usize + i;
            clauses.push(vec![-slots[j].op[2], -slots[j].sel1[wire_idx], -slots[i].op[2]]);
        }
    }

    // Every slot must feed a later slot or the output. Any circuit with
    // spare gates can be padded with used buffer gates (AND of TRUE and the
    // previous output), so this prunes without changing satisfiability; it
    // also forces the output onto the last slot whenever slots exist.
    if g >= 1 {
        for i in 0..(g - 1) as usize {
            let wire_idx = 2 + n as usize + i;
            let mut lits = Vec::new();
            for slot in &slots[i + 1..] {
                lits.push(slot.sel1[wire_idx]);
                lits.push(slot.sel2[wire_idx]);
            }
            clauses.push(lits);
        }
        let last = out.len() - 1;
        for (w, &v) in out.iter().enumerate() {
            clauses.push(vec![if w == last { v } else { -v }]);
        }
    } else {
        one_hot(&mut clauses, &out);
    }
    // Output row constraints, matching the table on every row.
    for (w, &out_var) in out.iter().enumerate() {
        match Wire::from_canonical_index(w as u64, n) {
            Wire::Gate(j) => {
                for r in 0..rows {
                    let gv = slots[j as usize].g_val[r as usize];
                    let lit = if table.get(r) { gv } else { -gv };
                    clauses.push(vec![-out_var, lit]);
                }
            }
            fixed => {
                let matches = (0..rows).all(|r| fixed_wire_value(fixed, r, n) == table.get(r));
                if !matches {
                    clauses.push(vec![-out_var]);
                }
            }
        }
    }

    Ok(CnfInstance {
        table: table.clone(),
        bound: s,
        gates: g,
        num_vars: next_var,
        clauses,
        slots,
        out,
    })
}

impl CnfInstance {
    pub fn table(&self) -> &TruthTable {
        &self.table
    }

    /// The strict bound `s`; encoded circuits have at most `s - 1` gates.
    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// Gate slots, `s - 1`.
    pub fn gate_slots(&self) -> u32 {
        self.gates
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars as usize
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// DIMACS text with the variable map in comment lines.
    pub fn to_dimacs(&self) -> String {
        let mut comments = vec![
            format!(
                "desc-cnf n={} bound={} gates={} table={}",
                self.table.n(),
                self.bound,
                self.gates,
                self.table.bits_string()
            ),
            "vars: one-hot op/sel1/sel2 per gate slot, then per-row a/b/g values, then output selector".into(),
        ];
        for (i, slot) in self.slots.iter().enumerate() {
            comments.push(format!(
                "g{i}: op=[{},{},{}] sel1={}..{} sel2={}..{} a={}..{} b={}..{} val={}..{}",
                slot.op[0],
                slot.op[1],
                slot.op[2],
                slot.sel1[0],
                slot.sel1[slot.sel1.len() - 1],
                slot.sel2[0],
                slot.sel2[slot.sel2.len() - 1],
                slot.a_val[0],
                slot.a_val[slot.a_val.len() - 1],
                slot.b_val[0],
                slot.b_val[slot.b_val.len() - 1],
                slot.g_val[0],
                slot.g_val[slot.g_val.len() - 1],
            ));
        }
        comments.push(format!(
            "out={}..{}",
            self.out[0],
            self.out[self.out.len() - 1]
        ));
        write_dimacs(self.num_vars as usize, &self.clauses, &comments)
    }

    fn model_bit(model: &[bool], var: i32) -> Result<bool, McspError> {
        model
            .get(var as usize - 1)
            .copied()
            .ok_or_else(|| McspError::ModelInvalid(format!("model missing variable {var}")))
    }

    fn pick_one(model: &[bool], vars: &[i32], what: &str) -> Result<usize, McspError> {
        let mut chosen = None;
        for (idx, &v) in vars.iter().enumerate() {
            if Self::model_bit(model, v)? {
                if chosen.is_some() {
                    return Err(McspError::ModelInvalid(format!(
                        "{what}: more than one selector set"
                    )));
                }
                chosen = Some(idx);
            }
        }
        chosen.ok_or_else(|| McspError::ModelInvalid(format!("{what}: no selector set")))
    }

    /// Decodes a satisfying assignment into a circuit, dropping gate slots
    /// outside the output cone. The caller is expected to re-verify.
    pub fn decode_model(&self, model: &[bool]) -> Result<Circuit, McspError> {
        let n = self.table.n() as u16;
        let mut gates = Vec::with_capacity(self.slots.len());
        for (i, slot) in self.slots.iter().enumerate() {
            let op = match Self::pick_one(model, &slot.op, &format!("gate {i} op"))? {
                0 => GateOp::And,
                1 => GateOp::Or,
                _ => GateOp::Not,
            };
            let w1 = Self::pick_one(model, &slot.sel1, &format!("gate {i} in1"))? as u64;
            let w2 = Self::pick_one(model, &slot.sel2, &format!("gate {i} in2"))? as u64;
            let in1 = Wire::from_canonical_index(w1, n);
            let in2 = Wire::from_canonical_index(w2, n);
            let gate = match op {
                GateOp::Not => {
                    if w1 != w2 {
                        return Err(McspError::ModelInvalid(format!(
                            "gate {i}: NOT slots disagree"
                        )));
                    }
                    Gate::not(in1)
                }
                GateOp::And => Gate::and(in1, in2),
                GateOp::Or => Gate::or(in1, in2),
            };
            gates.push(gate);
        }
        let out_idx = Self::pick_one(model, &self.out, "output")? as u64;
        let output = Wire::from_canonical_index(out_idx, n);
        let full = Circuit::from_parts(n, gates, output);
        if let Some(v) = full.validate().into_iter().next() {
            return Err(McspError::ModelInvalid(format!("decoded circuit: {v}")));
        }
        Ok(prune_dead_gates(&full))
    }
}

/// Keeps only gates reachable from the output, preserving order.
pub(super) fn prune_dead_gates(circuit: &Circuit) -> Circuit {
    let mut live = vec![false; circuit.size()];
    let mut mark = Vec::new();
    if let Wire::Gate(g) = circuit.output() {
        mark.push(g);
    }
    while let Some(g) = mark.pop() {
        if live[g as usize] {
            continue;
        }
        live[g as usize] = true;
        for w in circuit.gates()[g as usize].inputs() {
            if let Wire::Gate(j) = w {
                mark.push(j);
            }
        }
    }
    let mut remap = vec![0u32; circuit.size()];
    let mut next = 0u32;
    for (i, &alive) in live.iter().enumerate() {
        if alive {
            remap[i] = next;
            next += 1;
        }
    }
    let fix = |w: Wire| match w {
        Wire::Gate(j) => Wire::Gate(remap[j as usize]),
        other => other,
    };
    let mut kept = Vec::with_capacity(next as usize);
    for (i, gate) in circuit.gates().iter().enumerate() {
        if !live[i] {
            continue;
        }
        kept.push(Gate {
            op: gate.op,
            in1: fix(gate.in1),
            in2: gate.in2.map(fix),
        });
    }
    let output = match circuit.output() {
        Wire::Gate(g) => Wire::Gate(remap[g as usize]),
        other => other,
    };
    Circuit::from_parts(circuit.n(), kept, output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::{solve, SatOutcome};

    fn cnf_for(bits: &str, s: u32) -> CnfInstance {
        let n = (bits.len() as f64).log2() as u8;
        let table = TruthTable::from_bits(n, bits).unwrap();
        encode_desc_cnf(&McspInstance::new(table, s)).unwrap()
    }

    fn solve_instance(cnf: &CnfInstance) -> SatOutcome {
        solve(cnf.num_vars(), cnf.clauses()).unwrap()
    }

    #[test]
    fn bound_zero_rejected() {
        let table = TruthTable::from_bits(2, "0001").unwrap();
        assert!(matches!(
            encode_desc_cnf(&McspInstance::new(table, 0)),
            Err(McspError::BoundTooSmall(0))
        ));
    }

    #[test]
    fn and_table_within_two_gates() {
        let cnf = cnf_for("0001", 2);
        match solve_instance(&cnf) {
            SatOutcome::Sat(model) => {
                let witness = cnf.decode_model(&model).unwrap();
                assert!(witness.size() <= 1);
                assert_eq!(witness.evaluate_all().unwrap().bits_string(), "0001");
            }
            SatOutcome::Unsat => panic!("AND fits in one gate"),
        }
    }

    #[test]
    fn xor_needs_four_gates() {
        assert!(!solve_instance(&cnf_for("0110", 4)).is_sat());
        assert!(solve_instance(&cnf_for("0110", 5)).is_sat());
    }

    #[test]
    fn constant_table_with_zero_gates() {
        let cnf = cnf_for("0000", 1);
        match solve_instance(&cnf) {
            SatOutcome::Sat(model) => {
                let witness = cnf.decode_model(&model).unwrap();
                assert_eq!(witness.size(), 0);
                assert!(witness.evaluate_all().unwrap().is_false());
            }
            SatOutcome::Unsat => panic!("constant needs no gates"),
        }
    }

    #[test]
    fn nonconstant_table_unsat_with_zero_gates() {
        assert!(!solve_instance(&cnf_for("0001", 1)).is_sat());
        // Projections are reachable without gates.
        assert!(solve_instance(&cnf_for("0011", 1)).is_sat());
    }

    #[test]
    fn dimacs_has_header_and_map() {
        let cnf = cnf_for("0110", 3);
        let text = cnf.to_dimacs();
        assert!(text.starts_with("c desc-cnf n=2 bound=3 gates=2 table=0110\n"));
        assert!(text.contains("p cnf "));
        let (vars, clauses) = crate::sat::parse_dimacs(&text).unwrap();
        assert_eq!(vars, cnf.num_vars());
        assert_eq!(clauses.len(), cnf.clauses().len());
    }

    #[test]
    fn garbage_model_rejected() {
        let cnf = cnf_for("0001", 2);
        let model = vec![true; cnf.num_vars()];
        assert!(matches!(
            cnf.decode_model(&model),
            Err(McspError::ModelInvalid(_))
        ));
        let model = vec![false; cnf.num_vars()];
        assert!(matches!(
            cnf.decode_model(&model),
            Err(McspError::ModelInvalid(_))
        ));
    }

    #[test]
    fn prune_drops_dead_slots() {
        let cnf = cnf_for("0001", 3);
        if let SatOutcome::Sat(model) = solve_instance(&cnf) {
            let witness = cnf.decode_model(&model).unwrap();
            // Two slots were available but one AND suffices; dead slots are
            // swept, so the cone is tight.
            assert!(witness.size() <= 2);
            assert!(witness.is_valid());
            assert_eq!(witness.evaluate_all().unwrap().bits_string(), "0001");
        } else {
            panic!("sat expected");
        }
    }
}
