//! Breadth-first frontier minimization over truth-table space.
//!
//! Level 0 holds the free wires: the two constants and the inputs. Level
//! `c` holds every table first obtained by spending exactly `c` gates, where
//! a new gate combines two already-reached tables and its cost is one plus
//! the cost of building each operand. The first level reaching a table gives
//! its minimal size, and back-pointers reconstruct a witness of exactly that
//! size.
//!
//! The sweep is a dynamic program over the whole `2^(2^n)` table space
//! rather than an enumeration of circuit DAGs, so one pass answers every
//! table of the arity at once. Costs are additive across the two operand
//! sub-circuits (inputs and constants stay free), which is exactly the class
//! of circuits whose operand cones are built independently; witnesses are
//! materialized without cross-operand sharing so the reported size always
//! equals the witness's gate count. Everything is deterministic: ties
//! between derivations of the same cost resolve to the least
//! `(op code, operand, operand)` triple, operands ordered and compared as
//! table integers, so reruns and parallel callers see identical witnesses.

use crate::circuit::{Circuit, CircuitBuilder, GateOp, Wire};
use crate::table::TruthTable;

use super::McspError;

/// Largest arity the exhaustive sweep accepts: the table space has
/// `2^(2^n)` slots and must fit in memory.
pub const MAX_SEARCH_ARITY: u8 = 4;

const UNREACHED: u8 = u8::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Derivation {
    Base(Wire),
    Gate(GateOp, u32, u32),
}

impl Derivation {
    /// Tie-break key: op code, then ordered operand tables. Base wires only
    /// ever claim at cost 0, so they never compete with gates.
    fn key(self) -> (u8, u32, u32) {
        match self {
            Derivation::Base(_) => (0, 0, 0),
            Derivation::Gate(op, a, b) => (op.code(), a, b),
        }
    }
}

/// A completed sweep for one arity: per-table minimal cost plus canonical
/// back-pointers.
pub struct Frontier {
    n: u8,
    cap: u32,
    cost: Vec<u8>,
    derivation: Vec<Option<Derivation>>,
    /// Tables first reached at each cost level.
    levels: Vec<Vec<u32>>,
    reached: u64,
}

impl Frontier {
    /// Runs the sweep for arity `n` up to `cap` gates (or until the whole
    /// table space is reached, whichever comes first).
    pub fn build(n: u8, cap: u32) -> Result<Frontier, McspError> {
        if n == 0 || n > MAX_SEARCH_ARITY {
            return Err(McspError::ArityTooLarge {
                n,
                max: MAX_SEARCH_ARITY,
            });
        }
        let rows = 1u64 << n;
        let space = 1usize << rows;
        let full = if rows == 64 { !0u64 } else { (1u64 << rows) - 1 };
        let cap = cap.min(UNREACHED as u32 - 1);

        let mut frontier = Frontier {
            n,
            cap,
            cost: vec![UNREACHED; space],
            derivation: vec![None; space],
            levels: Vec::new(),
            reached: 0,
        };

        // Level 0: constants then inputs, in canonical order.
        let mut base = vec![(0u64, Wire::False), (full, Wire::True)];
        for j in 0..n {
            let mut mask = 0u64;
            for row in 0..rows {
                if (row >> (n - 1 - j)) & 1 == 1 {
                    mask |= 1 << row;
                }
            }
            base.push((mask, Wire::Input(j as u16)));
        }
        let mut level0 = Vec::new();
        for (mask, wire) in base {
            if frontier.cost[mask as usize] == UNREACHED {
                frontier.cost[mask as usize] = 0;
                frontier.derivation[mask as usize] = Some(Derivation::Base(wire));
                frontier.reached += 1;
                level0.push(mask as u32);
            }
        }
        frontier.levels.push(level0);

        for cost in 1..=cap {
            if frontier.reached as usize == space {
                break;
            }
            let mut level: Vec<u32> = Vec::new();
            let c = cost as usize;
            {
                // NOT over the previous level only: one more gate on top.
                let claim = |mask: u32, der: Derivation, frontier: &mut Frontier, level: &mut Vec<u32>| {
                    let slot = mask as usize;
                    match frontier.cost[slot] {
                        x if x == UNREACHED => {
                            frontier.cost[slot] = cost as u8;
                            frontier.derivation[slot] = Some(der);
                            frontier.reached += 1;
                            level.push(mask);
                        }
                        x if x as u32 == cost => {
                            let cur = frontier.derivation[slot].unwrap();
                            if der.key() < cur.key() {
                                frontier.derivation[slot] = Some(der);
                            }
                        }
                        _ => {}
                    }
                };

                // Binary gates: operand costs sum to cost - 1.
                for i in 0..c {
                    let j = c - 1 - i;
                    if j < i {
                        break;
                    }
                    for ai in 0..frontier.levels[i].len() {
                        let a = frontier.levels[i][ai];
                        let bj_start = if i == j { ai } else { 0 };
                        for bj in bj_start..frontier.levels[j].len() {
                            let b = frontier.levels[j][bj];
                            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                            let and = lo & hi;
                            let or = lo | hi;
                            claim(and, Derivation::Gate(GateOp::And, lo, hi), &mut frontier, &mut level);
                            claim(or, Derivation::Gate(GateOp::Or, lo, hi), &mut frontier, &mut level);
                        }
                    }
                }
                for ai in 0..frontier.levels[c - 1].len() {
                    let a = frontier.levels[c - 1][ai];
                    let neg = (!(a as u64) & full) as u32;
                    claim(neg, Derivation::Gate(GateOp::Not, a, a), &mut frontier, &mut level);
                }
            }
            level.sort_unstable();
            frontier.levels.push(level);
        }
        Ok(frontier)
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Whether every table of the arity was reached within the cap.
    pub fn exhausted(&self) -> bool {
        self.reached as usize == self.cost.len()
    }

    /// Number of tables in the space.
    pub fn table_count(&self) -> u64 {
        self.cost.len() as u64
    }

    /// Largest cost assigned so far.
    pub fn max_cost(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    /// Tables first reached at `cost`, ascending.
    pub fn level(&self, cost: u32) -> &[u32] {
        &self.levels[cost as usize]
    }

    fn mask_of(&self, table: &TruthTable) -> Option<u32> {
        if table.n() != self.n {
            return None;
        }
        Some(table.as_mask().expect("search arities fit in one word") as u32)
    }

    /// Minimal gate count for `table`, if reached within the cap.
    pub fn cost_of(&self, table: &TruthTable) -> Option<u32> {
        let mask = self.mask_of(table)?;
        self.cost_of_mask(mask)
    }

    pub fn cost_of_mask(&self, mask: u32) -> Option<u32> {
        match self.cost[mask as usize] {
            UNREACHED => None,
            c => Some(c as u32),
        }
    }

    /// Canonical witness for `table`; its gate count equals
    /// [`Frontier::cost_of`]. Gates come out in post-order of the canonical
    /// derivation, so the same table always yields the identical circuit.
    pub fn witness(&self, table: &TruthTable) -> Option<Circuit> {
        let mask = self.mask_of(table)?;
        self.witness_of_mask(mask)
    }

    pub fn witness_of_mask(&self, mask: u32) -> Option<Circuit> {
        self.cost_of_mask(mask)?;
        let mut builder = CircuitBuilder::new(self.n as u16);
        let out = self.emit(mask, &mut builder);
        Some(builder.finish(out))
    }

    fn emit(&self, mask: u32, builder: &mut CircuitBuilder) -> Wire {
        match self.derivation[mask as usize].expect("emit only on reached tables") {
            Derivation::Base(wire) => wire,
            Derivation::Gate(GateOp::Not, a, _) => {
                let wa = self.emit(a, builder);
                builder.not(wa)
            }
            Derivation::Gate(op, a, b) => {
                let wa = self.emit(a, builder);
                let wb = self.emit(b, builder);
                match op {
                    GateOp::And => builder.and(wa, wb),
                    GateOp::Or => builder.or(wa, wb),
                    GateOp::Not => unreachable!(),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arity_limit() {
        assert!(Frontier::build(5, 8).is_err());
        assert!(Frontier::build(0, 8).is_err());
    }

    #[test]
    fn one_input_space() {
        let f = Frontier::build(1, 8).unwrap();
        assert!(f.exhausted());
        // FALSE, TRUE, x1 are free; NOT x1 costs one.
        assert_eq!(f.cost_of_mask(0b00), Some(0));
        assert_eq!(f.cost_of_mask(0b11), Some(0));
        assert_eq!(f.cost_of_mask(0b10), Some(0));
        assert_eq!(f.cost_of_mask(0b01), Some(1));
    }

    #[test]
    fn two_input_distribution() {
        let f = Frontier::build(2, 16).unwrap();
        assert!(f.exhausted());
        let mut counts = [0u32; 8];
        for mask in 0..16u32 {
            counts[f.cost_of_mask(mask).unwrap() as usize] += 1;
        }
        // 4 free wires, 4 one-gate tables, 6 two-gate tables, XOR and XNOR
        // at four gates.
        assert_eq!(counts[0], 4);
        assert_eq!(counts[1], 4);
        assert_eq!(counts[2], 6);
        assert_eq!(counts[3], 0);
        assert_eq!(counts[4], 2);
        assert_eq!(f.cost_of_mask(0b0110), Some(4));
        assert_eq!(f.cost_of_mask(0b1001), Some(4));
    }

    #[test]
    fn three_input_space_exhausts() {
        let f = Frontier::build(3, 32).unwrap();
        assert!(f.exhausted());
        assert_eq!(f.table_count(), 256);
        // Every witness reproduces its table at the reported size.
        for mask in 0..256u32 {
            let w = f.witness_of_mask(mask).unwrap();
            assert_eq!(w.size() as u32, f.cost_of_mask(mask).unwrap());
            assert_eq!(
                w.evaluate_all().unwrap().as_mask().unwrap() as u32,
                mask,
                "witness table mismatch at {mask}"
            );
        }
    }

    #[test]
    fn witnesses_are_reproducible() {
        let f1 = Frontier::build(3, 32).unwrap();
        let f2 = Frontier::build(3, 32).unwrap();
        for mask in 0..256u32 {
            assert_eq!(f1.witness_of_mask(mask), f2.witness_of_mask(mask));
        }
    }

    #[test]
    fn cap_respected() {
        let f = Frontier::build(2, 2).unwrap();
        assert!(!f.exhausted());
        assert_eq!(f.cost_of_mask(0b0110), None);
        assert_eq!(f.max_cost(), 2);
    }
}
