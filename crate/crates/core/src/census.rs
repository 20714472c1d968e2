//! Exhaustive small-arity experiments.
//!
//! A census minimizes every function of one arity off a single shared
//! frontier sweep, records per-function size, encoding length, depth, and
//! structure metrics, and aggregates the size distribution. From a census
//! come the compressor table (every table paired with the encoding of its
//! minimal witness) and the source-coding report.
//!
//! File formats, all deterministic byte for byte:
//!
//! * census CSV: a `# circtab census ...` header line, a column-name line,
//!   then `index,minimal_size,encoded_bits,depth,detectors,sharing_ratio,score`
//!   rows sorted by function index (the table read as an integer, row 0 in
//!   the least significant bit).
//! * compressor CSV: header lines as above, then `index,table_bits,encoding_hex`.
//! * compressor pack: magic `CTP1`, arity byte, big-endian row count, a
//!   big-endian `u32` offset per row, then the concatenated binary encodings.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::circuit::{Circuit, GateOp, Wire};
use crate::codec::{self, CodecError, EncodedCircuit, EntropyAudit};
use crate::mcsp::{self, Frontier, McspError, EXHAUSTIVE_CAP};
use crate::table::TruthTable;

/// Largest arity a census runs at: `2^(2^4)` functions is one frontier pass,
/// the next arity is out of desk scale.
pub const MAX_CENSUS_ARITY: u8 = 4;

/// Largest arity for compressor tables (exhaustive encodings of all
/// functions).
pub const MAX_COMPRESSOR_ARITY: u8 = 3;

/// Magic for the binary compressor pack; the trailing byte is the version.
pub const PACK_MAGIC: [u8; 4] = *b"CTP1";

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("census supports arity 1..={max}, got {n}")]
    ArityTooLarge { n: u8, max: u8 },
    #[error("compressor tables support arity 1..={max}, got {n}")]
    CompressorArity { n: u8, max: u8 },
    #[error(transparent)]
    Mcsp(#[from] McspError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("corrupt artifact: {0}")]
    Corrupt(String),
}

/// One census row.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusRecord {
    /// The table read as an integer, row `i` at bit `i`.
    pub index: u64,
    pub minimal_size: u32,
    /// Exact codec length of the minimal witness, in bits.
    pub encoded_bits: u64,
    /// Depth of the recorded witness.
    pub depth: u32,
    /// Detector count from [`lut_likeness`].
    pub detectors: usize,
    pub sharing_ratio: f64,
    pub score: f64,
}

/// Counts per minimal size plus summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeDistribution {
    pub counts: BTreeMap<u32, u64>,
    pub mean: f64,
    pub max: u32,
    /// `2^n / n`, the size scale most functions require asymptotically.
    pub shannon_size: f64,
    /// Fraction of functions with minimal size at or above `shannon_size`.
    pub frac_at_least_shannon: f64,
}

/// A completed census for one arity.
pub struct Census {
    n: u8,
    records: Vec<CensusRecord>,
    distribution: SizeDistribution,
    frontier: Frontier,
    /// Minimal witnesses, kept only at compressor arities (where the SAT
    /// descent means witnesses are not re-derivable from the frontier
    /// alone).
    witnesses: Vec<Circuit>,
}

/// Runs the full census for arity `n`: one shared frontier sweep plus
/// per-function record building (parallel over function indices; output
/// order is by index regardless).
pub fn run_census(n: u8) -> Result<Census, CensusError> {
    if n == 0 || n > MAX_CENSUS_ARITY {
        return Err(CensusError::ArityTooLarge {
            n,
            max: MAX_CENSUS_ARITY,
        });
    }
    let frontier = Frontier::build(n, EXHAUSTIVE_CAP)?;
    debug_assert!(frontier.exhausted());
    let total = frontier.table_count();

    let per_table: Vec<(CensusRecord, Option<Circuit>)> = (0..total)
        .into_par_iter()
        .map(|index| {
            let table = table_for_index(n, index);
            let result = mcsp::minimize_with_frontier(&frontier, &table)
                .expect("exhausted frontier reaches every table");
            let witness = result.witness.expect("reached");
            let size = result.minimal_size.expect("reached");
            let metrics = lut_likeness(&witness);
            let record = CensusRecord {
                index,
                minimal_size: size,
                encoded_bits: codec::encoded_len_bits(n as u64, size as u64),
                depth: witness.depth(),
                detectors: metrics.detector_count,
                sharing_ratio: metrics.sharing_ratio,
                score: metrics.score,
            };
            let keep = (n <= MAX_COMPRESSOR_ARITY).then_some(witness);
            (record, keep)
        })
        .collect();

    let mut records = Vec::with_capacity(per_table.len());
    let mut witnesses = Vec::new();
    for (record, witness) in per_table {
        records.push(record);
        if let Some(w) = witness {
            witnesses.push(w);
        }
    }
    let distribution = distribution_of(n, &records);
    Ok(Census {
        n,
        records,
        distribution,
        frontier,
        witnesses,
    })
}

fn table_for_index(n: u8, index: u64) -> TruthTable {
    TruthTable::from_mask(n, index).expect("census arities fit in a mask word")
}

fn distribution_of(n: u8, records: &[CensusRecord]) -> SizeDistribution {
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    let mut total_size = 0u64;
    let mut max = 0u32;
    let shannon_size = (1u64 << n) as f64 / n as f64;
    let mut at_least = 0u64;
    for r in records {
        *counts.entry(r.minimal_size).or_insert(0) += 1;
        total_size += r.minimal_size as u64;
        max = max.max(r.minimal_size);
        if r.minimal_size as f64 >= shannon_size {
            at_least += 1;
        }
    }
    SizeDistribution {
        counts,
        mean: total_size as f64 / records.len() as f64,
        max,
        shannon_size,
        frac_at_least_shannon: at_least as f64 / records.len() as f64,
    }
}

impl Census {
    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn records(&self) -> &[CensusRecord] {
        &self.records
    }

    pub fn distribution(&self) -> &SizeDistribution {
        &self.distribution
    }

    pub fn frontier(&self) -> &Frontier {
        &self.frontier
    }

    /// The recorded minimal witness for a function index.
    pub fn witness(&self, index: u64) -> Circuit {
        if self.n <= MAX_COMPRESSOR_ARITY {
            self.witnesses[index as usize].clone()
        } else {
            self.frontier
                .witness_of_mask(index as u32)
                .expect("exhausted frontier")
        }
    }

    /// Census CSV; see the module docs for the schema.
    pub fn to_csv(&self, seed: u64) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# circtab census n={} format={} seed={}\n",
            self.n,
            codec::FORMAT_VERSION,
            seed
        ));
        out.push_str("index,minimal_size,encoded_bits,depth,detectors,sharing_ratio,score\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{:.6},{:.6}\n",
                r.index,
                r.minimal_size,
                r.encoded_bits,
                r.depth,
                r.detectors,
                r.sharing_ratio,
                r.score
            ));
        }
        out
    }

    /// Builds the compressor table: every function paired with the bit-exact
    /// encoding of its minimal witness.
    pub fn compressor_table(&self) -> Result<CompressorTable, CensusError> {
        if self.n > MAX_COMPRESSOR_ARITY {
            return Err(CensusError::CompressorArity {
                n: self.n,
                max: MAX_COMPRESSOR_ARITY,
            });
        }
        let mut rows = Vec::with_capacity(self.records.len());
        for r in &self.records {
            let table = table_for_index(self.n, r.index);
            let encoding = codec::encode(&self.witness(r.index))?;
            debug_assert_eq!(encoding.bit_len(), r.encoded_bits);
            rows.push(CompressorRow {
                index: r.index,
                table,
                encoding,
            });
        }
        Ok(CompressorTable {
            n: self.n,
            basis: crate::circuit::BasisSpec::v1(),
            rows,
        })
    }

    /// Merges the census with the codec-side source-coding arithmetic.
    pub fn shannon_report(&self) -> ShannonReport {
        let audit = if self.n <= codec::MAX_AUDIT_ARITY {
            let lengths: Vec<(u64, u64)> = self
                .records
                .iter()
                .map(|r| (r.index, r.encoded_bits))
                .collect();
            Some(codec::entropy_audit(self.n, &lengths).expect("census covers all functions"))
        } else {
            None
        };
        let data_bits = (1u64 << self.n) as f64;
        let mean_encoded_bits = self
            .records
            .iter()
            .map(|r| r.encoded_bits as f64)
            .sum::<f64>()
            / self.records.len() as f64;
        ShannonReport {
            n: self.n,
            functions: self.records.len() as u64,
            distribution: self.distribution.clone(),
            mean_encoded_bits,
            mean_ratio: mean_encoded_bits / data_bits,
            p_star: codec::p_star(self.n as u32),
            audit,
        }
    }
}

/// Parses a census CSV produced by [`Census::to_csv`]. Returns the arity
/// and the records.
pub fn parse_census_csv(text: &str) -> Result<(u8, Vec<CensusRecord>), CensusError> {
    let mut n: Option<u8> = None;
    let mut records = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if let Some(pos) = line.find("n=") {
                let rest = &line[pos + 2..];
                let value: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
                n = value.parse().ok();
            }
            continue;
        }
        if line.starts_with("index,") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(CensusError::Corrupt(format!(
                "line {}: expected 7 fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let parse_err =
            |what: &str| CensusError::Corrupt(format!("line {}: bad {what}", lineno + 1));
        records.push(CensusRecord {
            index: fields[0].parse().map_err(|_| parse_err("index"))?,
            minimal_size: fields[1].parse().map_err(|_| parse_err("minimal_size"))?,
            encoded_bits: fields[2].parse().map_err(|_| parse_err("encoded_bits"))?,
            depth: fields[3].parse().map_err(|_| parse_err("depth"))?,
            detectors: fields[4].parse().map_err(|_| parse_err("detectors"))?,
            sharing_ratio: fields[5].parse().map_err(|_| parse_err("sharing_ratio"))?,
            score: fields[6].parse().map_err(|_| parse_err("score"))?,
        });
    }
    let n = n.ok_or_else(|| CensusError::Corrupt("missing census header line".into()))?;
    Ok((n, records))
}

/// One compressor row: a table and the encoding of its minimal circuit.
#[derive(Debug, Clone)]
pub struct CompressorRow {
    pub index: u64,
    pub table: TruthTable,
    pub encoding: EncodedCircuit,
}

/// The desk-scale compressor artifact: the optimal-description mapping for
/// every function of one arity, sorted by function index.
#[derive(Debug, Clone)]
pub struct CompressorTable {
    pub n: u8,
    pub basis: crate::circuit::BasisSpec,
    pub rows: Vec<CompressorRow>,
}

impl CompressorTable {
    /// Compressor CSV: `index,table_bits,encoding_hex` under a header line.
    pub fn to_csv(&self, seed: u64) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# circtab compressor n={} format={} seed={} basis={}\n",
            self.n,
            codec::FORMAT_VERSION,
            seed,
            self.basis.tag()
        ));
        out.push_str("index,table_bits,encoding_hex\n");
        for row in &self.rows {
            let hex: String = row
                .encoding
                .to_file_bytes()
                .iter()
                .map(|b| format!("{b:02x}"))
                .collect();
            out.push_str(&format!(
                "{},{},{}\n",
                row.index,
                row.table.bits_string(),
                hex
            ));
        }
        out
    }

    /// Binary pack; see the module docs for the layout.
    pub fn to_pack_bytes(&self) -> Vec<u8> {
        let blobs: Vec<Vec<u8>> = self
            .rows
            .iter()
            .map(|r| r.encoding.to_file_bytes())
            .collect();
        let mut out = Vec::new();
        out.extend_from_slice(&PACK_MAGIC);
        out.push(self.n);
        out.extend_from_slice(&(self.rows.len() as u32).to_be_bytes());
        let mut offset = 0u32;
        for blob in &blobs {
            out.extend_from_slice(&offset.to_be_bytes());
            offset += blob.len() as u32;
        }
        for blob in &blobs {
            out.extend_from_slice(blob);
        }
        out
    }

    /// Parses a pack back into encodings.
    pub fn parse_pack(bytes: &[u8]) -> Result<(u8, Vec<EncodedCircuit>), CensusError> {
        if bytes.len() < 9 || bytes[..4] != PACK_MAGIC {
            return Err(CensusError::Corrupt("bad pack magic".into()));
        }
        let n = bytes[4];
        let count = u32::from_be_bytes([bytes[5], bytes[6], bytes[7], bytes[8]]) as usize;
        let offsets_start = 9;
        let blobs_start = offsets_start + 4 * count;
        if bytes.len() < blobs_start {
            return Err(CensusError::Corrupt("pack truncated in offset table".into()));
        }
        let offset_at = |i: usize| -> usize {
            let at = offsets_start + 4 * i;
            u32::from_be_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]]) as usize
        };
        let mut encodings = Vec::with_capacity(count);
        for i in 0..count {
            let start = blobs_start + offset_at(i);
            let end = if i + 1 < count {
                blobs_start + offset_at(i + 1)
            } else {
                bytes.len()
            };
            if start > end || end > bytes.len() {
                return Err(CensusError::Corrupt(format!("pack row {i} out of bounds")));
            }
            encodings.push(EncodedCircuit::from_file_bytes(&bytes[start..end])?);
        }
        Ok((n, encodings))
    }

    /// Re-decodes every row and checks it still computes its table.
    pub fn verify_rows(&self) -> Result<(), CensusError> {
        for row in &self.rows {
            let circuit = codec::decode(&row.encoding)?;
            let table = circuit
                .evaluate_all()
                .map_err(|e| CensusError::Corrupt(e.to_string()))?;
            if table != row.table {
                return Err(CensusError::Corrupt(format!(
                    "row {} decodes to the wrong table",
                    row.index
                )));
            }
        }
        Ok(())
    }
}

/// Weights for the LUT-likeness score. The score is a heuristic reading of
/// structure, not a formal isomorphism test; the weights are configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LutWeights {
    pub detector: f64,
    pub spine: f64,
}

impl Default for LutWeights {
    fn default() -> Self {
        LutWeights {
            detector: 1.0,
            spine: 1.0,
        }
    }
}

/// Structure metrics measuring how much a circuit looks like a
/// detectors-plus-OR-spine lookup table.
#[derive(Debug, Clone, PartialEq)]
pub struct LutMetrics {
    pub and_count: usize,
    pub or_count: usize,
    pub not_count: usize,
    /// Longest chain of OR gates ending at the output.
    pub or_spine_depth: u32,
    /// Spine leaves whose cones are OR-free gate trees (pattern detectors).
    pub detector_count: usize,
    /// Gates with fan-out above one, over all gates.
    pub sharing_ratio: f64,
    /// Weighted fraction of gates accounted for by detector cones and the
    /// spine, clamped to `[0, 1]`. Gateless circuits score 1: there is
    /// nothing off-shape. Heuristic by construction.
    pub score: f64,
}

/// Computes [`LutMetrics`] with default weights.
pub fn lut_likeness(circuit: &Circuit) -> LutMetrics {
    lut_likeness_weighted(circuit, &LutWeights::default())
}

pub fn lut_likeness_weighted(circuit: &Circuit, weights: &LutWeights) -> LutMetrics {
    let gates = circuit.gates();
    let total = gates.len();

    let mut and_count = 0;
    let mut or_count = 0;
    let mut not_count = 0;
    for g in gates {
        match g.op {
            GateOp::And => and_count += 1,
            GateOp::Or => or_count += 1,
            GateOp::Not => not_count += 1,
        }
    }

    // Fan-out per gate: uses as gate inputs plus the output reference.
    let mut fanout = vec![0usize; total];
    for g in gates {
        for w in g.inputs() {
            if let Wire::Gate(j) = w {
                fanout[j as usize] += 1;
            }
        }
    }
    if let Wire::Gate(j) = circuit.output() {
        fanout[j as usize] += 1;
    }
    let shared = fanout.iter().filter(|&&f| f > 1).count();
    let sharing_ratio = if total == 0 {
        0.0
    } else {
        shared as f64 / total as f64
    };

    // Whether each gate's cone is OR-free (gates are topologically ordered,
    // so one forward pass suffices).
    let mut or_free = vec![false; total];
    for (i, g) in gates.iter().enumerate() {
        or_free[i] = g.op != GateOp::Or
            && g.inputs().all(|w| match w {
                Wire::Gate(j) => or_free[j as usize],
                _ => true,
            });
    }

    // The OR spine: OR gates reachable from the output through OR edges;
    // its leaves are the non-OR wires hanging off it.
    let mut spine: Vec<u32> = Vec::new();
    let mut leaves: Vec<Wire> = Vec::new();
    match circuit.output() {
        Wire::Gate(j) if gates[j as usize].op == GateOp::Or => {
            let mut stack = vec![j];
            let mut seen = vec![false; total];
            while let Some(g) = stack.pop() {
                if seen[g as usize] {
                    continue;
                }
                seen[g as usize] = true;
                spine.push(g);
                for w in gates[g as usize].inputs() {
                    match w {
                        Wire::Gate(k) if gates[k as usize].op == GateOp::Or => stack.push(k),
                        other => {
                            if !leaves.contains(&other) {
                                leaves.push(other);
                            }
                        }
                    }
                }
            }
        }
        other => leaves.push(other),
    }

    // Spine depth: longest OR chain ending at the output.
    let mut or_depth = vec![0u32; total];
    for (i, g) in gates.iter().enumerate() {
        if g.op != GateOp::Or {
            continue;
        }
        let d = g
            .inputs()
            .map(|w| match w {
                Wire::Gate(j) if gates[j as usize].op == GateOp::Or => or_depth[j as usize],
                _ => 0,
            })
            .max()
            .unwrap_or(0);
        or_depth[i] = d + 1;
    }
    let or_spine_depth = match circuit.output() {
        Wire::Gate(j) if gates[j as usize].op == GateOp::Or => or_depth[j as usize],
        _ => 0,
    };

    // Detectors: spine leaves that are gates with OR-free cones. Their
    // cones are the detector gates.
    let mut detector_count = 0;
    let mut in_detector_cone = vec![false; total];
    for leaf in &leaves {
        if let Wire::Gate(j) = leaf {
            if or_free[*j as usize] {
                detector_count += 1;
                let mut stack = vec![*j];
                while let Some(g) = stack.pop() {
                    if in_detector_cone[g as usize] {
                        continue;
                    }
                    in_detector_cone[g as usize] = true;
                    for w in gates[g as usize].inputs() {
                        if let Wire::Gate(k) = w {
                            stack.push(k);
                        }
                    }
                }
            }
        }
    }
    let detector_gates = in_detector_cone.iter().filter(|&&b| b).count();

    let score = if total == 0 {
        1.0
    } else {
        let raw = (weights.detector * detector_gates as f64 + weights.spine * spine.len() as f64)
            / total as f64;
        raw.clamp(0.0, 1.0)
    };

    LutMetrics {
        and_count,
        or_count,
        not_count,
        or_spine_depth,
        detector_count,
        sharing_ratio,
        score,
    }
}

/// The census-level source-coding summary.
#[derive(Debug, Clone)]
pub struct ShannonReport {
    pub n: u8,
    pub functions: u64,
    pub distribution: SizeDistribution,
    /// Mean exact encoding length over all functions, in bits (no prefix).
    pub mean_encoded_bits: f64,
    /// `mean_encoded_bits / 2^n`.
    pub mean_ratio: f64,
    /// The idealized closed-form ratio at this arity.
    pub p_star: f64,
    /// Prefix-code audit; present for arities the exhaustive audit covers.
    pub audit: Option<EntropyAudit>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn census_arity_bounds() {
        assert!(matches!(
            run_census(5),
            Err(CensusError::ArityTooLarge { n: 5, max: 4 })
        ));
        assert!(matches!(
            run_census(0),
            Err(CensusError::ArityTooLarge { .. })
        ));
    }

    #[test]
    fn one_input_census() {
        let census = run_census(1).unwrap();
        assert_eq!(census.records().len(), 4);
        let counts: Vec<(u32, u64)> = census
            .distribution()
            .counts
            .iter()
            .map(|(&k, &v)| (k, v))
            .collect();
        assert_eq!(counts, vec![(0, 3), (1, 1)]);
        // All four functions fit in one gate, so none reach 2^1/1 = 2.
        assert_eq!(census.distribution().frac_at_least_shannon, 0.0);
    }

    #[test]
    fn two_input_census_peaks_at_xor() {
        let census = run_census(2).unwrap();
        assert_eq!(census.records().len(), 16);
        assert_eq!(census.distribution().max, 4);
        let at_max: Vec<u64> = census
            .records()
            .iter()
            .filter(|r| r.minimal_size == 4)
            .map(|r| r.index)
            .collect();
        assert_eq!(at_max, vec![0b0110, 0b1001]);
    }

    #[test]
    fn records_cover_every_index_once() {
        let census = run_census(2).unwrap();
        let indices: Vec<u64> = census.records().iter().map(|r| r.index).collect();
        assert_eq!(indices, (0..16).collect::<Vec<u64>>());
    }

    #[test]
    fn encoded_bits_match_actual_encodings() {
        let census = run_census(2).unwrap();
        for r in census.records() {
            let encoding = codec::encode(&census.witness(r.index)).unwrap();
            assert_eq!(encoding.bit_len(), r.encoded_bits);
        }
    }

    #[test]
    fn sandwich_bounds_hold() {
        let census = run_census(3).unwrap();
        for r in census.records() {
            let t = table_for_index(3, r.index);
            let dnf = synth::synth_dnf(&t).size() as u32;
            let lup = synth::synth_lupanov(&t).size() as u32;
            assert!(r.minimal_size <= dnf, "index {}", r.index);
            assert!(r.minimal_size <= lup, "index {}", r.index);
        }
        // Summary statistics frozen from the exhaustive DAG enumeration
        // oracle: mean 1095/256, against the 2^3/3 threshold.
        let d = census.distribution();
        assert!((d.mean - 1095.0 / 256.0).abs() < 1e-12);
        assert!((d.shannon_size - 8.0 / 3.0).abs() < 1e-12);
        assert_eq!(d.max, 8);
    }

    #[test]
    fn census_csv_round_trips() {
        let census = run_census(2).unwrap();
        let csv = census.to_csv(7);
        assert!(csv.starts_with("# circtab census n=2 format=CTB1 seed=7\n"));
        let (n, records) = parse_census_csv(&csv).unwrap();
        assert_eq!(n, 2);
        assert_eq!(&records, census.records());
    }

    #[test]
    fn compressor_rows_decode_to_their_tables() {
        let census = run_census(2).unwrap();
        let table = census.compressor_table().unwrap();
        assert_eq!(table.rows.len(), 16);
        table.verify_rows().unwrap();
        // XOR's row carries a four-gate encoding.
        let xor = &table.rows[0b0110];
        assert_eq!(xor.encoding.gate_count(), 4);
    }

    #[test]
    fn compressor_artifacts_are_deterministic() {
        let a = run_census(2).unwrap().compressor_table().unwrap();
        let b = run_census(2).unwrap().compressor_table().unwrap();
        assert_eq!(a.to_csv(0), b.to_csv(0));
        assert_eq!(a.to_pack_bytes(), b.to_pack_bytes());
    }

    #[test]
    fn pack_round_trips() {
        let table = run_census(1).unwrap().compressor_table().unwrap();
        let bytes = table.to_pack_bytes();
        let (n, encodings) = CompressorTable::parse_pack(&bytes).unwrap();
        assert_eq!(n, 1);
        assert_eq!(encodings.len(), 4);
        for (row, enc) in table.rows.iter().zip(&encodings) {
            assert_eq!(&row.encoding, enc);
        }
        assert!(CompressorTable::parse_pack(&bytes[..5]).is_err());
    }

    #[test]
    fn lut_metrics_on_dnf_worked_example() {
        let t = TruthTable::from_bits(3, "00000110").unwrap();
        let c = synth::synth_dnf(&t);
        let m = lut_likeness(&c);
        assert_eq!(m.detector_count, 2);
        assert_eq!(m.or_spine_depth, 1);
        assert_eq!(m.sharing_ratio, 0.0);
        assert_eq!(m.score, 1.0);
    }

    #[test]
    fn lut_metrics_single_and_is_pure_detector() {
        let t = TruthTable::from_bits(2, "0001").unwrap();
        let c = synth::synth_dnf(&t);
        assert_eq!(c.size(), 1);
        let m = lut_likeness(&c);
        assert_eq!(m.detector_count, 1);
        assert_eq!(m.or_spine_depth, 0);
        assert_eq!(m.score, 1.0);
    }

    #[test]
    fn lupanov_shares_more_than_dnf() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let t = TruthTable::random(8, &mut rng).unwrap();
        let dnf = lut_likeness(&synth::synth_dnf(&t));
        let lup = lut_likeness(&synth::synth_lupanov(&t));
        assert!(lup.sharing_ratio > dnf.sharing_ratio);
    }

    #[test]
    fn gateless_circuit_metrics() {
        let c = Circuit::trivial(2, Wire::Input(0));
        let m = lut_likeness(&c);
        assert_eq!(m.detector_count, 0);
        assert_eq!(m.score, 1.0);
        assert_eq!(m.sharing_ratio, 0.0);
    }

    #[test]
    fn shannon_report_small_arities() {
        let census = run_census(1).unwrap();
        let report = census.shannon_report();
        let audit = report.audit.unwrap();
        assert!(audit.bound_holds);
        assert!(audit.kraft_ok);
        // Computed independently: three free wires encode in 34 bits, NOT x1
        // in 43; with the 16-bit prefix the mean is (3*50 + 59) / 4.
        assert!((audit.expected_code_bits - 52.25).abs() < 1e-12);
        assert_eq!(report.functions, 4);
    }

    #[test]
    fn independent_minimize_agrees_with_census() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let census = run_census(3).unwrap();
        for _ in 0..20 {
            let index = rng.gen_range(0..256u64);
            let t = table_for_index(3, index);
            let fresh = mcsp::minimize(&t, EXHAUSTIVE_CAP).unwrap();
            assert_eq!(
                fresh.minimal_size.unwrap(),
                census.records()[index as usize].minimal_size
            );
        }
    }
}
