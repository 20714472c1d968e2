//! Table-to-circuit synthesis.
//!
//! Two constructions, both exact:
//!
//! * [`synth_dnf`] - the canonical lookup circuit: one pattern detector (an
//!   AND tree over literals) per 1-row, combined by a balanced OR tree.
//!   Detectors are independent; nothing is shared.
//! * [`synth_lupanov`] - iterated block expansion. Each layer fixes the next
//!   block of `k` leading inputs, builds one shared bank of `2^k` equality
//!   detectors for it, ANDs each detector with the recursively built
//!   cofactor, and ORs the terms in a balanced spine. Detector banks, the
//!   per-input negations inside them, and repeated cofactors are all shared,
//!   which is where the savings over the disjoint-minterm circuit come from.

use std::collections::HashMap;
use std::ops::Range;

use crate::circuit::{Circuit, CircuitBuilder, Wire};
use crate::table::TruthTable;
use crate::util::ceil_log2;

/// Remaining-arity threshold at or below which the block recursion stops.
pub const DEFAULT_LEAF_THRESHOLD: u8 = 4;

/// Reduces `wires` with `op` in balanced pairwise rounds; depth is
/// `ceil(log2(len))`. The odd element of a round carries to the next.
fn balanced_reduce(
    builder: &mut CircuitBuilder,
    wires: Vec<Wire>,
    mut combine: impl FnMut(&mut CircuitBuilder, Wire, Wire) -> Wire,
) -> Wire {
    assert!(!wires.is_empty());
    let mut layer = wires;
    while layer.len() > 1 {
        let mut next = Vec::with_capacity(layer.len().div_ceil(2));
        let mut it = layer.chunks_exact(2);
        for pair in &mut it {
            next.push(combine(builder, pair[0], pair[1]));
        }
        next.extend(it.remainder().iter().copied());
        layer = next;
    }
    layer[0]
}

fn balanced_and(builder: &mut CircuitBuilder, wires: Vec<Wire>) -> Wire {
    balanced_reduce(builder, wires, |b, x, y| b.and(x, y))
}

fn balanced_or(builder: &mut CircuitBuilder, wires: Vec<Wire>) -> Wire {
    balanced_reduce(builder, wires, |b, x, y| b.or(x, y))
}

/// One detector per 1-row: a fresh AND tree over literals, negations
/// included, then a balanced OR over all detectors. The all-zeros table
/// yields the zero-gate circuit wired to FALSE.
pub fn synth_dnf(table: &TruthTable) -> Circuit {
    let n = table.n() as u16;
    let mut builder = CircuitBuilder::new(n);
    let mut detectors = Vec::new();
    for row in 0..table.rows() {
        if !table.get(row) {
            continue;
        }
        let mut literals = Vec::with_capacity(n as usize);
        for j in 0..n {
            let input = Wire::Input(j);
            let bit = (row >> (n - 1 - j)) & 1 == 1;
            literals.push(if bit { input } else { builder.not(input) });
        }
        detectors.push(balanced_and(&mut builder, literals));
    }
    if detectors.is_empty() {
        return builder.finish(Wire::False);
    }
    let out = balanced_or(&mut builder, detectors);
    builder.finish(out)
}

/// A shared bank of equality detectors over one contiguous block of inputs.
///
/// Detector `u` outputs 1 exactly when the block bits spell `u` (first block
/// bit most significant). Each block bit has at most one NOT gate, shared by
/// every detector that negates it.
#[derive(Debug, Clone)]
pub struct EqualityBank {
    block: Range<u16>,
    negations: Vec<Wire>,
    detectors: Vec<Wire>,
}

impl EqualityBank {
    pub fn block(&self) -> Range<u16> {
        self.block.clone()
    }

    /// The shared NOT wires, one per block bit.
    pub fn negations(&self) -> &[Wire] {
        &self.negations
    }

    pub fn detectors(&self) -> &[Wire] {
        &self.detectors
    }

    pub fn detector(&self, pattern: u64) -> Wire {
        self.detectors[pattern as usize]
    }
}

/// Builds the full bank of `2^k` detectors for `block` into `builder`.
/// Total cost is at most `2^k * k + k` gates: `k` shared NOTs plus an
/// AND tree of `k - 1` gates per detector.
pub fn build_equality_bank(builder: &mut CircuitBuilder, block: Range<u16>) -> EqualityBank {
    let k = block.len() as u32;
    assert!(k >= 1, "empty block");
    let negations: Vec<Wire> = block.clone().map(|j| builder.not(Wire::Input(j))).collect();
    let mut detectors = Vec::with_capacity(1 << k);
    for u in 0..(1u64 << k) {
        let literals: Vec<Wire> = block
            .clone()
            .enumerate()
            .map(|(j, input)| {
                if (u >> (k as usize - 1 - j)) & 1 == 1 {
                    Wire::Input(input)
                } else {
                    negations[j]
                }
            })
            .collect();
        detectors.push(balanced_and(builder, literals));
    }
    EqualityBank {
        block,
        negations,
        detectors,
    }
}

/// One layer of a block-expansion schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LupanovLayer {
    /// Inputs still unfixed when this layer starts.
    pub remaining: u8,
    /// Block size consumed by this layer.
    pub block: u8,
    /// Index of the first input bit this layer addresses.
    pub offset: u8,
    /// Final layer: cofactors are single table bits.
    pub leaf: bool,
}

/// A full expansion schedule: non-leaf layers take `ceil(log2(remaining))`
/// bits (clamped to at least 1); once the remainder is at or below the leaf
/// threshold a single leaf layer consumes it. Block sizes sum to `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LupanovPlan {
    pub n: u8,
    pub leaf_threshold: u8,
    pub layers: Vec<LupanovLayer>,
}

impl LupanovPlan {
    pub fn for_arity(n: u8, leaf_threshold: u8) -> LupanovPlan {
        assert!(n >= 1 && leaf_threshold >= 1);
        let mut layers = Vec::new();
        let mut remaining = n;
        let mut offset = 0u8;
        while remaining > leaf_threshold {
            let block = (ceil_log2(remaining as u64) as u8).clamp(1, remaining);
            layers.push(LupanovLayer {
                remaining,
                block,
                offset,
                leaf: false,
            });
            offset += block;
            remaining -= block;
        }
        layers.push(LupanovLayer {
            remaining,
            block: remaining,
            offset,
            leaf: true,
        });
        LupanovPlan {
            n,
            leaf_threshold,
            layers,
        }
    }
}

/// Closed-form gate bound for circuits built from `plan`; the built circuit
/// never exceeds it.
///
/// A one-layer (degenerate) plan covers the whole input with detectors, which
/// is the disjoint-minterm regime, so its bound is the DNF worst case
/// `n*2^(n-1) + (n-1)*2^n + 2^n - 1` (negations, AND trees, OR spine at the
/// all-ones table). Layered plans sum, per layer, the shared bank cost
/// `k + 2^k (k-1)` plus, for each of the `prod 2^(k_i)` cofactors addressed
/// so far, one AND per detector and an OR spine over the terms.
pub fn size_accounting(plan: &LupanovPlan) -> u64 {
    if plan.layers.len() == 1 {
        let n = plan.n as u64;
        return n * (1 << (n - 1)) + (n - 1) * (1 << n) + ((1 << n) - 1);
    }
    let mut total = 0u64;
    let mut cofactors = 1u64;
    for layer in &plan.layers {
        let k = layer.block as u64;
        let pow = 1u64 << k;
        total += k + pow * (k - 1); // shared bank
        if layer.leaf {
            total += cofactors * (pow - 1); // OR spine over detector terms
        } else {
            total += cofactors * (2 * pow - 1); // one AND per detector + OR spine
        }
        cofactors *= pow;
    }
    total
}

enum Cofactor {
    Const(bool),
    Wire(Wire),
}

struct LupanovBuilder<'a> {
    plan: &'a LupanovPlan,
    builder: CircuitBuilder,
    // Lazily built per-layer banks: negations and detectors materialize on
    // first use so constant cofactors never pay for unused detectors.
    negations: Vec<Vec<Option<Wire>>>,
    detectors: Vec<Vec<Option<Wire>>>,
    memo: Vec<HashMap<TruthTable, Wire>>,
}

impl<'a> LupanovBuilder<'a> {
    fn new(plan: &'a LupanovPlan) -> Self {
        let builder = CircuitBuilder::new(plan.n as u16);
        let negations = plan
            .layers
            .iter()
            .map(|l| vec![None; l.block as usize])
            .collect();
        let detectors = plan
            .layers
            .iter()
            .map(|l| vec![None; 1usize << l.block])
            .collect();
        let memo = plan.layers.iter().map(|_| HashMap::new()).collect();
        LupanovBuilder {
            plan,
            builder,
            negations,
            detectors,
            memo,
        }
    }

    fn negation(&mut self, layer: usize, bit: usize) -> Wire {
        if let Some(w) = self.negations[layer][bit] {
            return w;
        }
        let input = Wire::Input(self.plan.layers[layer].offset as u16 + bit as u16);
        let w = self.builder.not(input);
        self.negations[layer][bit] = Some(w);
        w
    }

    fn detector(&mut self, layer: usize, pattern: u64) -> Wire {
        if let Some(w) = self.detectors[layer][pattern as usize] {
            return w;
        }
        let plan_layer = self.plan.layers[layer].clone();
        let k = plan_layer.block as usize;
        let mut literals = Vec::with_capacity(k);
        for j in 0..k {
            if (pattern >> (k - 1 - j)) & 1 == 1 {
                literals.push(Wire::Input(plan_layer.offset as u16 + j as u16));
            } else {
                literals.push(self.negation(layer, j));
            }
        }
        let w = balanced_and(&mut self.builder, literals);
        self.detectors[layer][pattern as usize] = Some(w);
        w
    }

    /// Builds the cofactor `sub` whose inputs are the bits layer `layer`
    /// starts at. `sub.n()` equals the layer's remaining arity.
    fn build(&mut self, layer: usize, sub: &TruthTable) -> Cofactor {
        if sub.is_false() {
            return Cofactor::Const(false);
        }
        if sub.is_true() {
            return Cofactor::Const(true);
        }
        if let Some(&w) = self.memo[layer].get(sub) {
            return Cofactor::Wire(w);
        }
        let plan_layer = self.plan.layers[layer].clone();
        debug_assert_eq!(sub.n(), plan_layer.remaining);
        let k = plan_layer.block;
        let mut terms = Vec::new();
        if plan_layer.leaf {
            // Cofactors are single table bits; a term is just the detector.
            for u in 0..(1u64 << k) {
                if sub.get(u) {
                    terms.push(self.detector(layer, u));
                }
            }
        } else {
            let rest = plan_layer.remaining - k;
            for u in 0..(1u64 << k) {
                let slice = sub.subtable(rest, u << rest).expect("cofactor in range");
                match self.build(layer + 1, &slice) {
                    Cofactor::Const(false) => {}
                    Cofactor::Const(true) => terms.push(self.detector(layer, u)),
                    Cofactor::Wire(w) => {
                        let e = self.detector(layer, u);
                        terms.push(self.builder.and(e, w));
                    }
                }
            }
        }
        // sub is neither constant, so at least one term fired.
        let w = balanced_or(&mut self.builder, terms);
        self.memo[layer].insert(sub.clone(), w);
        Cofactor::Wire(w)
    }
}

/// Block-expansion synthesis with the default leaf threshold.
pub fn synth_lupanov(table: &TruthTable) -> Circuit {
    synth_lupanov_with_threshold(table, DEFAULT_LEAF_THRESHOLD)
}

/// Block-expansion synthesis. Tables whose whole arity is at or below the
/// leaf threshold delegate to [`synth_dnf`]; constants short-circuit to a
/// zero-gate circuit.
pub fn synth_lupanov_with_threshold(table: &TruthTable, leaf_threshold: u8) -> Circuit {
    assert!(leaf_threshold >= 1);
    if table.n() <= leaf_threshold {
        return synth_dnf(table);
    }
    if table.is_false() {
        return Circuit::trivial(table.n() as u16, Wire::False);
    }
    if table.is_true() {
        return Circuit::trivial(table.n() as u16, Wire::True);
    }
    let plan = LupanovPlan::for_arity(table.n(), leaf_threshold);
    let mut lb = LupanovBuilder::new(&plan);
    let out = match lb.build(0, table) {
        Cofactor::Wire(w) => w,
        Cofactor::Const(_) => unreachable!("constants handled above"),
    };
    lb.builder.finish(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dnf_worked_example() {
        // f(101) = f(110) = 1: two detectors, three gates each, one OR.
        let t = TruthTable::from_bits(3, "00000110").unwrap();
        let c = synth_dnf(&t);
        assert_eq!(c.evaluate_all().unwrap(), t);
        assert_eq!(c.size(), 7);
    }

    #[test]
    fn dnf_empty_table_is_false_wire() {
        let t = TruthTable::from_bits(2, "0000").unwrap();
        let c = synth_dnf(&t);
        assert_eq!(c.size(), 0);
        assert_eq!(c.output(), Wire::False);
        assert_eq!(c.evaluate_all().unwrap(), t);
    }

    #[test]
    fn dnf_single_positive_minterm() {
        let t = TruthTable::from_bits(2, "0001").unwrap();
        let c = synth_dnf(&t);
        assert_eq!(c.size(), 1);
        assert_eq!(c.evaluate_all().unwrap(), t);
    }

    #[test]
    fn bank_of_one_bit() {
        let mut b = CircuitBuilder::new(1);
        let bank = build_equality_bank(&mut b, 0..1);
        assert_eq!(b.len(), 1); // just the shared NOT
        let c0 = b.clone().finish(bank.detector(0));
        assert_eq!(c0.evaluate_all().unwrap().bits_string(), "10");
        let c1 = b.finish(bank.detector(1));
        assert_eq!(c1.evaluate_all().unwrap().bits_string(), "01");
    }

    #[test]
    fn bank_detectors_partition_assignments() {
        for k in 1..=3u16 {
            let mut b = CircuitBuilder::new(k);
            let bank = build_equality_bank(&mut b, 0..k);
            assert!(b.len() as u64 <= (1 << k) * k as u64 + k as u64);
            let tables: Vec<TruthTable> = bank
                .detectors()
                .iter()
                .map(|&d| b.clone().finish(d).evaluate_all().unwrap())
                .collect();
            for row in 0..(1u64 << k) {
                let firing: Vec<u64> = (0..tables.len() as u64)
                    .filter(|&u| tables[u as usize].get(row))
                    .collect();
                assert_eq!(firing, vec![row], "exactly the matching detector fires");
            }
        }
    }

    #[test]
    fn bank_cost_at_k2() {
        let mut b = CircuitBuilder::new(2);
        build_equality_bank(&mut b, 0..2);
        assert!(b.len() <= 10);
        assert_eq!(b.len(), 6); // 2 NOTs + 4 single ANDs
    }

    #[test]
    fn plan_blocks_sum_to_arity() {
        for n in 1..=16u8 {
            let plan = LupanovPlan::for_arity(n, DEFAULT_LEAF_THRESHOLD);
            let total: u8 = plan.layers.iter().map(|l| l.block).sum();
            assert_eq!(total, n);
            assert!(plan.layers.last().unwrap().leaf);
            for l in &plan.layers[..plan.layers.len() - 1] {
                assert_eq!(l.block, (ceil_log2(l.remaining as u64) as u8).max(1));
            }
        }
    }

    #[test]
    fn lupanov_delegates_below_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=4u8 {
            let t = TruthTable::random(n, &mut rng).unwrap();
            assert_eq!(synth_lupanov(&t), synth_dnf(&t));
        }
    }

    #[test]
    fn lupanov_exact_on_random_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 3..=10u8 {
            for _ in 0..40 {
                let t = TruthTable::random(n, &mut rng).unwrap();
                let c = synth_lupanov(&t);
                assert_eq!(c.evaluate_all().unwrap(), t, "n={n}");
            }
        }
    }

    #[test]
    fn lupanov_shares_negations() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let t = TruthTable::random(8, &mut rng).unwrap();
            let c = synth_lupanov(&t);
            let nots = c
                .gates()
                .iter()
                .filter(|g| g.op == crate::circuit::GateOp::Not)
                .count();
            assert!(nots <= 8, "one shared NOT per input bit, got {nots}");
        }
    }

    #[test]
    fn lupanov_beats_dnf_on_balanced_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut wins = 0;
        for _ in 0..10 {
            let t = TruthTable::random(10, &mut rng).unwrap();
            let lup = synth_lupanov(&t).size();
            let dnf = synth_dnf(&t).size();
            if lup < dnf {
                wins += 1;
            }
        }
        assert_eq!(wins, 10, "random balanced tables at n=10 always favor sharing");
    }

    #[test]
    fn accounting_bounds_all_n2_tables() {
        // Degenerate single-layer plan: the DNF bound.
        let plan = LupanovPlan::for_arity(2, DEFAULT_LEAF_THRESHOLD);
        assert_eq!(plan.layers.len(), 1);
        let bound = size_accounting(&plan);
        assert_eq!(bound, 11);
        for mask in 0..16u64 {
            let t = TruthTable::from_mask(2, mask).unwrap();
            assert!((synth_lupanov(&t).size() as u64) <= bound);
        }
        // A layered plan for the same arity, forced by a tiny threshold.
        let plan = LupanovPlan::for_arity(2, 1);
        assert_eq!(plan.layers.len(), 2);
        let bound = size_accounting(&plan);
        for mask in 0..16u64 {
            let t = TruthTable::from_mask(2, mask).unwrap();
            let c = synth_lupanov_with_threshold(&t, 1);
            assert_eq!(c.evaluate_all().unwrap(), t);
            assert!((c.size() as u64) <= bound);
        }
    }

    #[test]
    fn accounting_bounds_random_wide_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in 5..=12u8 {
            let plan = LupanovPlan::for_arity(n, DEFAULT_LEAF_THRESHOLD);
            let bound = size_accounting(&plan);
            for _ in 0..5 {
                let t = TruthTable::random(n, &mut rng).unwrap();
                let size = synth_lupanov(&t).size() as u64;
                assert!(size <= bound, "n={n}: size {size} over bound {bound}");
            }
        }
    }
}
