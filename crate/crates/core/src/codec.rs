//! Bit-exact circuit serialization, compression-ratio arithmetic, and the
//! entropy audit.
//!
//! Layout, bits packed MSB-first and big-endian within fields:
//!
//! ```text
//! header   n (16 bits) | s (16 bits)
//! payload  s gate records: op (2 bits) | in1 (w bits) | in2 (w bits)
//! trailer  output reference (w bits)
//! ```
//!
//! where `w` is the number of bits needed to write `n + s + 2` in binary.
//! References use the canonical wire numbering (0 = FALSE, 1 = TRUE,
//! `2..n+1` = inputs, `n+2..` = gates in topological order). NOT gates store
//! their single input in both reference slots so every record has the same
//! width, which keeps the total length a closed form:
//!
//! ```text
//! len(s, n) = 32 + s * (2 + 2w) + w
//! ```
//!
//! On disk an encoding is the 4-byte magic `CTB1` followed by the payload,
//! zero-padded to a byte boundary. Ratio numbers are only meaningful next to
//! the format version; emitters tag their output with [`FORMAT_VERSION`].

use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateOp, Wire};
use crate::util::bit_length;

/// File magic for binary circuit encodings; the trailing byte is the format
/// version.
pub const FILE_MAGIC: [u8; 4] = *b"CTB1";

/// Tag recorded in emitted artifacts so lengths and ratios are reproducible.
pub const FORMAT_VERSION: &str = "CTB1";

/// Width of the length field in the prefix-free scheme used by the entropy
/// audit: code words are a 16-bit bit-length followed by the encoding itself.
pub const LENGTH_PREFIX_BITS: u64 = 16;

/// Largest arity the exhaustive entropy audit accepts.
pub const MAX_AUDIT_ARITY: u8 = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("circuit has {0} gates, over the 16-bit header field")]
    GateCountOverflow(usize),
    #[error("cannot encode invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("bad magic {0:02x?} (expected 43 54 42 31)")]
    BadMagic([u8; 4]),
    #[error("payload truncated: wanted {want} bits, had {have}")]
    Truncated { want: u64, have: u64 },
    #[error("payload has {got} bytes, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("nonzero padding bits after the payload")]
    DirtyPadding,
    #[error("gate {gate}: bad op code 3")]
    BadOpCode { gate: u32 },
    #[error("gate {gate}: reference {reference} is not an earlier node")]
    ForwardReference { gate: u32, reference: u64 },
    #[error("gate {gate}: NOT record stores two different references")]
    NotRefsDiffer { gate: u32 },
    #[error("output reference {reference} out of range")]
    BadOutputRef { reference: u64 },
    #[error("entropy audit supports arity 1..=3, got {0}")]
    AuditArity(u8),
    #[error("entropy audit: function index {0} out of range")]
    AuditBadIndex(u64),
    #[error("entropy audit: function index {0} appears more than once")]
    AuditDuplicate(u64),
    #[error("entropy audit: {got} records do not cover all {expected} functions")]
    AuditIncomplete { expected: u64, got: u64 },
}

/// Reference field width for a circuit with `s` gates on `n` inputs: enough
/// bits to write `n + s + 2` (the wire pool size) in binary.
pub fn ref_width(n: u64, s: u64) -> u32 {
    bit_length(n + s + 2)
}

/// Exact encoded bit length `len(s, n) = 32 + s(2 + 2w) + w`.
pub fn encoded_len_bits(n: u64, s: u64) -> u64 {
    let w = ref_width(n, s) as u64;
    32 + s * (2 + 2 * w) + w
}

struct BitWriter {
    bytes: Vec<u8>,
    bits: u64,
}

impl BitWriter {
    fn new() -> Self {
        BitWriter { bytes: Vec::new(), bits: 0 }
    }

    fn write(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        debug_assert!(width == 64 || value < (1u64 << width));
        for i in (0..width).rev() {
            let bit = (value >> i) & 1;
            let offset = (self.bits % 8) as u8;
            if offset == 0 {
                self.bytes.push(0);
            }
            if bit == 1 {
                *self.bytes.last_mut().unwrap() |= 0x80 >> offset;
            }
            self.bits += 1;
        }
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
    limit: u64,
}

impl<'a> BitReader<'a> {
    fn new(bytes: &'a [u8], limit: u64) -> Self {
        BitReader { bytes, pos: 0, limit }
    }

    fn read(&mut self, width: u32) -> Result<u64, CodecError> {
        if self.pos + width as u64 > self.limit {
            return Err(CodecError::Truncated {
                want: self.pos + width as u64,
                have: self.limit,
            });
        }
        let mut value = 0u64;
        for _ in 0..width {
            let byte = self.bytes[(self.pos / 8) as usize];
            let bit = (byte >> (7 - (self.pos % 8))) & 1;
            value = (value << 1) | bit as u64;
            self.pos += 1;
        }
        Ok(value)
    }
}

/// A bit-exact serialized circuit. Equality is byte-for-byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedCircuit {
    n: u16,
    gate_count: u16,
    bytes: Vec<u8>,
    bit_len: u64,
}

impl EncodedCircuit {
    pub fn n(&self) -> u16 {
        self.n
    }

    pub fn gate_count(&self) -> u16 {
        self.gate_count
    }

    /// Exact bit length, always equal to
    /// [`encoded_len_bits`]`(n, gate_count)`.
    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    /// Payload bytes (no magic), zero-padded to a byte boundary.
    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Magic plus payload, the on-disk form.
    pub fn to_file_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + self.bytes.len());
        out.extend_from_slice(&FILE_MAGIC);
        out.extend_from_slice(&self.bytes);
        out
    }

    /// Parses the on-disk form, checking magic, exact length, and clean
    /// padding.
    pub fn from_file_bytes(data: &[u8]) -> Result<EncodedCircuit, CodecError> {
        if data.len() < 4 || data[..4] != FILE_MAGIC {
            let mut got = [0u8; 4];
            got[..data.len().min(4)].copy_from_slice(&data[..data.len().min(4)]);
            return Err(CodecError::BadMagic(got));
        }
        Self::from_payload_bytes(&data[4..])
    }

    /// Parses bare payload bytes (header + records + trailer, no magic).
    pub fn from_payload_bytes(payload: &[u8]) -> Result<EncodedCircuit, CodecError> {
        if payload.len() < 4 {
            return Err(CodecError::Truncated {
                want: 32,
                have: payload.len() as u64 * 8,
            });
        }
        let n = u16::from_be_bytes([payload[0], payload[1]]);
        let s = u16::from_be_bytes([payload[2], payload[3]]);
        let bit_len = encoded_len_bits(n as u64, s as u64);
        let expected = bit_len.div_ceil(8) as usize;
        if payload.len() != expected {
            return Err(CodecError::LengthMismatch {
                expected,
                got: payload.len(),
            });
        }
        // Padding bits past the payload must be zero so encodings are unique.
        let tail_bits = (expected as u64 * 8 - bit_len) as u32;
        if tail_bits > 0 {
            let last = payload[expected - 1];
            if last & ((1u8 << tail_bits) - 1) != 0 {
                return Err(CodecError::DirtyPadding);
            }
        }
        Ok(EncodedCircuit {
            n,
            gate_count: s,
            bytes: payload.to_vec(),
            bit_len,
        })
    }
}

/// Serializes a valid circuit. The result is gate-for-gate invertible by
/// [`decode`] and its bit length is exactly [`encoded_len_bits`].
pub fn encode(circuit: &Circuit) -> Result<EncodedCircuit, CodecError> {
    if let Some(v) = circuit.validate().into_iter().next() {
        return Err(CodecError::InvalidCircuit(v.to_string()));
    }
    let n = circuit.n();
    let s: u16 = circuit
        .size()
        .try_into()
        .map_err(|_| CodecError::GateCountOverflow(circuit.size()))?;
    let w = ref_width(n as u64, s as u64);
    let mut writer = BitWriter::new();
    writer.write(n as u64, 16);
    writer.write(s as u64, 16);
    for gate in circuit.gates() {
        writer.write(gate.op.code() as u64, 2);
        let a = gate.in1.canonical_index(n);
        let b = gate.in2.map_or(a, |w2| w2.canonical_index(n));
        writer.write(a, w);
        writer.write(b, w);
    }
    writer.write(circuit.output().canonical_index(n), w);
    let bit_len = writer.bits;
    debug_assert_eq!(bit_len, encoded_len_bits(n as u64, s as u64));
    Ok(EncodedCircuit {
        n,
        gate_count: s,
        bytes: writer.bytes,
        bit_len,
    })
}

/// Inverts [`encode`]. Total on well-formed payloads; truncation, bad op
/// codes, forward references, and mismatched NOT records are reported.
pub fn decode(encoded: &EncodedCircuit) -> Result<Circuit, CodecError> {
    let n = encoded.n;
    let s = encoded.gate_count;
    let w = ref_width(n as u64, s as u64);
    let mut reader = BitReader::new(&encoded.bytes, encoded.bit_len);
    let header_n = reader.read(16)?;
    let header_s = reader.read(16)?;
    debug_assert_eq!((header_n as u16, header_s as u16), (n, s));
    let mut gates = Vec::with_capacity(s as usize);
    for i in 0..s as u32 {
        let code = reader.read(2)? as u8;
        let op = GateOp::from_code(code).ok_or(CodecError::BadOpCode { gate: i })?;
        let pool = 2 + n as u64 + i as u64;
        let a = reader.read(w)?;
        let b = reader.read(w)?;
        if a >= pool {
            return Err(CodecError::ForwardReference { gate: i, reference: a });
        }
        if b >= pool {
            return Err(CodecError::ForwardReference { gate: i, reference: b });
        }
        let in1 = Wire::from_canonical_index(a, n);
        let gate = match op {
            GateOp::Not => {
                if a != b {
                    return Err(CodecError::NotRefsDiffer { gate: i });
                }
                Gate::not(in1)
            }
            GateOp::And => Gate::and(in1, Wire::from_canonical_index(b, n)),
            GateOp::Or => Gate::or(in1, Wire::from_canonical_index(b, n)),
        };
        gates.push(gate);
    }
    let out_ref = reader.read(w)?;
    if out_ref >= 2 + n as u64 + s as u64 {
        return Err(CodecError::BadOutputRef { reference: out_ref });
    }
    Ok(Circuit::from_parts(
        n,
        gates,
        Wire::from_canonical_index(out_ref, n),
    ))
}

/// Description-length bookkeeping for one `(s, n)` point.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    /// Gate count.
    pub s: u64,
    /// Input arity.
    pub n: u32,
    /// Exact encoded length `len(s, n)` in bits.
    pub description_bits: u64,
    /// Table length `2^n` in bits.
    pub data_bits: u64,
    /// `description_bits / data_bits`.
    pub ratio: f64,
}

/// Compression ratio of the exact format at gate count `s` and arity `n`.
///
/// Panics if `s == 0`, `n == 0`, or `n > 57` (the table side no longer fits
/// a `u64`).
pub fn compression_ratio(s: u64, n: u32) -> RatioReport {
    assert!(s >= 1 && (1..=57).contains(&n));
    let description_bits = encoded_len_bits(n as u64, s);
    let data_bits = 1u64 << n;
    RatioReport {
        s,
        n,
        description_bits,
        data_bits,
        ratio: description_bits as f64 / data_bits as f64,
    }
}

/// The idealized closed-form ratio `1 - log2(n)/n` at the size `2^n/n`.
/// Exact in `f64` when `n` is a power of two.
pub fn p_star(n: u32) -> f64 {
    assert!(n >= 1);
    1.0 - (n as f64).log2() / n as f64
}

/// Result of the exhaustive prefix-code audit over all functions of one
/// arity.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyAudit {
    pub n: u8,
    /// Number of functions covered, always `2^(2^n)`.
    pub functions: u64,
    /// Mean code-word length `E[L]` in bits, including the length prefix.
    pub expected_code_bits: f64,
    /// Source entropy `H = 2^n` bits.
    pub entropy_bits: f64,
    /// Whether `E[L] >= H` held.
    pub bound_holds: bool,
    /// `sum over f of 2^-L(f)`.
    pub kraft_sum: f64,
    /// Whether the Kraft sum is at most 1.
    pub kraft_ok: bool,
}

/// Audits a complete set of per-function encoded lengths against the source
/// coding bound.
///
/// `lengths` pairs each function index (the table read as an integer, row 0
/// in the least significant bit) with the bit length of its encoded circuit.
/// Code words are length-prefixed ([`LENGTH_PREFIX_BITS`]) so the scheme is
/// prefix-free, which is what makes the Kraft sum meaningful. Every function
/// of the arity must appear exactly once.
pub fn entropy_audit(n: u8, lengths: &[(u64, u64)]) -> Result<EntropyAudit, CodecError> {
    if n == 0 || n > MAX_AUDIT_ARITY {
        return Err(CodecError::AuditArity(n));
    }
    let functions = 1u64 << (1u64 << n);
    let mut seen = vec![false; functions as usize];
    for &(index, _) in lengths {
        if index >= functions {
            return Err(CodecError::AuditBadIndex(index));
        }
        if seen[index as usize] {
            return Err(CodecError::AuditDuplicate(index));
        }
        seen[index as usize] = true;
    }
    if lengths.len() as u64 != functions {
        return Err(CodecError::AuditIncomplete {
            expected: functions,
            got: lengths.len() as u64,
        });
    }
    let mut total_bits = 0.0f64;
    let mut kraft_sum = 0.0f64;
    for &(_, bits) in lengths {
        let code_len = LENGTH_PREFIX_BITS + bits;
        total_bits += code_len as f64;
        kraft_sum += 0.5f64.powi(code_len.min(i32::MAX as u64) as i32);
    }
    let expected_code_bits = total_bits / functions as f64;
    let entropy_bits = (1u64 << n) as f64;
    Ok(EntropyAudit {
        n,
        functions,
        expected_code_bits,
        entropy_bits,
        bound_holds: expected_code_bits >= entropy_bits,
        kraft_sum,
        kraft_ok: kraft_sum <= 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;

    #[test]
    fn length_formula_examples() {
        // Single AND on two inputs: w = 3, 32 + 1*(2+6) + 3.
        assert_eq!(ref_width(2, 1), 3);
        assert_eq!(encoded_len_bits(2, 1), 43);
        // Zero-gate projection on two inputs: w = 3, 32 + 0 + 3.
        assert_eq!(ref_width(2, 0), 3);
        assert_eq!(encoded_len_bits(2, 0), 35);
        // Seven gates on three inputs: w = 4, 32 + 7*10 + 4.
        assert_eq!(ref_width(3, 7), 4);
        assert_eq!(encoded_len_bits(3, 7), 106);
    }

    #[test]
    fn length_monotone_in_gate_count() {
        for n in 1..=8u64 {
            let mut prev = encoded_len_bits(n, 0);
            for s in 1..=64u64 {
                let cur = encoded_len_bits(n, s);
                assert!(cur > prev);
                prev = cur;
            }
        }
    }

    fn and_gate_circuit() -> Circuit {
        let mut b = CircuitBuilder::new(2);
        let g = b.and(Wire::Input(0), Wire::Input(1));
        b.finish(g)
    }

    #[test]
    fn encode_reports_exact_bit_length() {
        let e = encode(&and_gate_circuit()).unwrap();
        assert_eq!(e.bit_len(), 43);
        assert_eq!(e.bytes().len(), 6);
    }

    #[test]
    fn round_trip_single_gate() {
        let c = and_gate_circuit();
        let e = encode(&c).unwrap();
        assert_eq!(decode(&e).unwrap(), c);
    }

    #[test]
    fn round_trip_through_file_bytes() {
        let c = and_gate_circuit();
        let e = encode(&c).unwrap();
        let bytes = e.to_file_bytes();
        assert_eq!(&bytes[..4], b"CTB1");
        let back = EncodedCircuit::from_file_bytes(&bytes).unwrap();
        assert_eq!(back, e);
        assert_eq!(decode(&back).unwrap(), c);
    }

    #[test]
    fn truncated_payload_rejected() {
        let e = encode(&and_gate_circuit()).unwrap();
        let mut bytes = e.to_file_bytes();
        bytes.pop();
        assert!(matches!(
            EncodedCircuit::from_file_bytes(&bytes),
            Err(CodecError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn forward_reference_rejected() {
        // Hand-pack a single AND gate on n=2 whose first operand references
        // wire 4, i.e. the gate itself: the legal pool for gate 0 is 0..=3.
        let mut w = BitWriter::new();
        w.write(2, 16);
        w.write(1, 16);
        w.write(0, 2); // AND
        w.write(4, 3);
        w.write(2, 3);
        w.write(4, 3); // output = gate 0
        let e = EncodedCircuit::from_payload_bytes(&w.bytes).unwrap();
        assert!(matches!(
            decode(&e),
            Err(CodecError::ForwardReference { gate: 0, reference: 4 })
        ));
    }

    #[test]
    fn bad_op_code_rejected() {
        let mut w = BitWriter::new();
        w.write(2, 16);
        w.write(1, 16);
        w.write(3, 2); // invalid op
        w.write(2, 3);
        w.write(3, 3);
        w.write(4, 3);
        let e = EncodedCircuit::from_payload_bytes(&w.bytes).unwrap();
        assert!(matches!(decode(&e), Err(CodecError::BadOpCode { gate: 0 })));
    }

    #[test]
    fn not_with_differing_refs_rejected() {
        let mut w = BitWriter::new();
        w.write(2, 16);
        w.write(1, 16);
        w.write(2, 2); // NOT
        w.write(2, 3);
        w.write(3, 3); // second ref differs
        w.write(4, 3);
        let e = EncodedCircuit::from_payload_bytes(&w.bytes).unwrap();
        assert!(matches!(decode(&e), Err(CodecError::NotRefsDiffer { gate: 0 })));
    }

    #[test]
    fn dirty_padding_rejected() {
        let e = encode(&and_gate_circuit()).unwrap();
        let mut bytes = e.to_file_bytes();
        let last = bytes.len() - 1;
        bytes[last] |= 1; // 43 bits used, so the low bits of the 6th byte are padding
        assert!(matches!(
            EncodedCircuit::from_file_bytes(&bytes),
            Err(CodecError::DirtyPadding)
        ));
    }

    #[test]
    fn bad_magic_rejected() {
        let e = encode(&and_gate_circuit()).unwrap();
        let mut bytes = e.to_file_bytes();
        bytes[0] = b'X';
        assert!(matches!(
            EncodedCircuit::from_file_bytes(&bytes),
            Err(CodecError::BadMagic(_))
        ));
    }

    #[test]
    fn invalid_circuit_rejected_by_encode() {
        let c = Circuit::from_parts(2, vec![], Wire::Gate(3));
        assert!(matches!(encode(&c), Err(CodecError::InvalidCircuit(_))));
    }

    #[test]
    fn ratio_closed_form() {
        assert_eq!(p_star(4), 0.5);
        assert_eq!(p_star(16), 0.75);
        // Monotone approach toward 1 along powers of two. p*(2) and p*(4)
        // coincide at 0.5; the climb is strict from there on.
        assert_eq!(p_star(2), 0.5);
        let mut prev = p_star(4);
        for k in 3..=10 {
            let cur = p_star(1 << k);
            assert!(cur > prev);
            prev = cur;
        }
        let r = compression_ratio(4, 4);
        assert_eq!(r.data_bits, 16);
        assert_eq!(r.description_bits, encoded_len_bits(4, 4));
        assert!((r.ratio - r.description_bits as f64 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn audit_rejects_bad_coverage() {
        let lengths: Vec<(u64, u64)> = (0..4).map(|i| (i, 34)).collect();
        assert!(entropy_audit(1, &lengths).is_ok());
        let mut dup = lengths.clone();
        dup[3] = (0, 34);
        assert!(matches!(
            entropy_audit(1, &dup),
            Err(CodecError::AuditDuplicate(0))
        ));
        assert!(matches!(
            entropy_audit(1, &lengths[..3]),
            Err(CodecError::AuditIncomplete { expected: 4, got: 3 })
        ));
        assert!(matches!(
            entropy_audit(4, &lengths),
            Err(CodecError::AuditArity(4))
        ));
    }
}
