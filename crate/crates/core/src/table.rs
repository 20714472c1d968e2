//! Truth tables: the `2^n`-bit strings that circuits describe.
//!
//! Row `i` holds the function value on the input assignment whose `n`-bit
//! binary expansion equals `i` with `x1` as the most significant bit, so row 0
//! is the all-zeros input and row `2^n - 1` is all ones. The text form writes
//! the rows left to right starting at row 0:
//!
//! ```text
//! n=3
//! 00000110
//! ```

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

/// Largest arity the table type itself supports (`2^24` bits per table).
pub const MAX_TABLE_ARITY: u8 = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("arity {0} out of range 1..=24")]
    ArityOutOfRange(u32),
    #[error("bit string has length {got}, expected 2^{n} = {expected}")]
    LengthMismatch { n: u8, got: usize, expected: u64 },
    #[error("invalid character {0:?} in bit string (expected '0' or '1')")]
    BadChar(char),
    #[error("row {row} out of range for arity {n}")]
    RowOutOfRange { n: u8, row: u64 },
    #[error("malformed table text: {0}")]
    Malformed(String),
}

/// An immutable `2^n`-bit truth table.
///
/// Bits are packed 64 per block with row `r` stored at bit `r % 64` of block
/// `r / 64`; unused high bits of the last block are kept zero so equality and
/// hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: u8,
    blocks: Vec<u64>,
}

fn check_arity(n: u8) -> Result<(), TableError> {
    if n == 0 || n > MAX_TABLE_ARITY {
        return Err(TableError::ArityOutOfRange(n as u32));
    }
    Ok(())
}

fn block_count(n: u8) -> usize {
    let rows = 1u64 << n;
    rows.div_ceil(64) as usize
}

impl TruthTable {
    /// All-zeros table on `n` inputs.
    pub fn new_false(n: u8) -> Result<Self, TableError> {
        check_arity(n)?;
        Ok(TruthTable {
            n,
            blocks: vec![0; block_count(n)],
        })
    }

    /// All-ones table on `n` inputs.
    pub fn new_true(n: u8) -> Result<Self, TableError> {
        let mut t = Self::new_false(n)?;
        for b in &mut t.blocks {
            *b = !0;
        }
        t.mask_tail();
        Ok(t)
    }

    /// Builds a table by evaluating `f` on every row index.
    pub fn from_fn(n: u8, mut f: impl FnMut(u64) -> bool) -> Result<Self, TableError> {
        let mut t = Self::new_false(n)?;
        for row in 0..t.rows() {
            if f(row) {
                t.set(row, true);
            }
        }
        Ok(t)
    }

    /// Parses a bare bit string (row 0 leftmost) of length exactly `2^n`.
    pub fn from_bits(n: u8, bits: &str) -> Result<Self, TableError> {
        check_arity(n)?;
        let expected = 1u64 << n;
        if bits.len() as u64 != expected {
            return Err(TableError::LengthMismatch {
                n,
                got: bits.len(),
                expected,
            });
        }
        let mut t = Self::new_false(n)?;
        for (row, ch) in bits.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => t.set(row as u64, true),
                other => return Err(TableError::BadChar(other)),
            }
        }
        Ok(t)
    }

    /// Builds a table on `n <= 6` inputs from a row mask (row `r` at bit `r`).
    pub fn from_mask(n: u8, mask: u64) -> Result<Self, TableError> {
        check_arity(n)?;
        if n > 6 {
            return Err(TableError::ArityOutOfRange(n as u32));
        }
        let mut t = Self::new_false(n)?;
        t.blocks[0] = mask;
        t.mask_tail();
        Ok(t)
    }

    /// Uniformly random table.
    pub fn random<R: Rng + ?Sized>(n: u8, rng: &mut R) -> Result<Self, TableError> {
        let mut t = Self::new_false(n)?;
        for b in &mut t.blocks {
            *b = rng.gen();
        }
        t.mask_tail();
        Ok(t)
    }

    fn mask_tail(&mut self) {
        let rows = self.rows();
        let rem = (rows % 64) as u32;
        if rem != 0 {
            let last = self.blocks.len() - 1;
            self.blocks[last] &= (1u64 << rem) - 1;
        }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    /// Number of rows, `2^n`.
    pub fn rows(&self) -> u64 {
        1u64 << self.n
    }

    pub fn get(&self, row: u64) -> bool {
        assert!(row < self.rows(), "row {row} out of range");
        (self.blocks[(row / 64) as usize] >> (row % 64)) & 1 == 1
    }

    pub fn set(&mut self, row: u64, value: bool) {
        assert!(row < self.rows(), "row {row} out of range");
        let block = (row / 64) as usize;
        let bit = 1u64 << (row % 64);
        if value {
            self.blocks[block] |= bit;
        } else {
            self.blocks[block] &= !bit;
        }
    }

    /// Number of rows mapped to 1.
    pub fn ones(&self) -> u64 {
        self.blocks.iter().map(|b| b.count_ones() as u64).sum()
    }

    pub fn is_false(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn is_true(&self) -> bool {
        self.ones() == self.rows()
    }

    /// The row mask for tables on up to 6 inputs.
    pub fn as_mask(&self) -> Option<u64> {
        if self.n <= 6 {
            Some(self.blocks[0])
        } else {
            None
        }
    }

    /// Extracts the subtable of `2^sub_n` consecutive rows starting at
    /// `start_row`, as a table on `sub_n` inputs. Used for block cofactors:
    /// fixing the leading (most significant) inputs of a table selects a
    /// contiguous row range.
    pub fn subtable(&self, sub_n: u8, start_row: u64) -> Result<TruthTable, TableError> {
        check_arity(sub_n)?;
        let len = 1u64 << sub_n;
        if start_row + len > self.rows() {
            return Err(TableError::RowOutOfRange {
                n: self.n,
                row: start_row + len - 1,
            });
        }
        let mut sub = TruthTable::new_false(sub_n)?;
        for r in 0..len {
            if self.get(start_row + r) {
                sub.set(r, true);
            }
        }
        Ok(sub)
    }

    /// The bit string, row 0 leftmost.
    pub fn bits_string(&self) -> String {
        (0..self.rows())
            .map(|r| if self.get(r) { '1' } else { '0' })
            .collect()
    }

    /// Two-line text form: `n=<k>` then the bit string.
    pub fn to_text(&self) -> String {
        format!("n={}\n{}\n", self.n, self.bits_string())
    }

    pub(crate) fn from_blocks(n: u8, blocks: Vec<u64>) -> Self {
        debug_assert_eq!(blocks.len(), block_count(n));
        let mut t = TruthTable { n, blocks };
        t.mask_tail();
        t
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bits_string())
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n <= 6 {
            write!(f, "TruthTable(n={}, {})", self.n, self.bits_string())
        } else {
            write!(f, "TruthTable(n={}, ones={})", self.n, self.ones())
        }
    }
}

impl FromStr for TruthTable {
    type Err = TableError;

    /// Parses the two-line text form. Blank lines and `#` comments are
    /// ignored.
    fn from_str(s: &str) -> Result<Self, TableError> {
        let mut lines = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| TableError::Malformed("empty input".into()))?;
        let n: u8 = header
            .strip_prefix("n=")
            .ok_or_else(|| TableError::Malformed(format!("expected `n=<k>`, got {header:?}")))?
            .trim()
            .parse()
            .map_err(|_| TableError::Malformed(format!("bad arity in {header:?}")))?;
        let bits = lines
            .next()
            .ok_or_else(|| TableError::Malformed("missing bit string line".into()))?;
        if let Some(extra) = lines.next() {
            return Err(TableError::Malformed(format!(
                "unexpected trailing line {extra:?}"
            )));
        }
        TruthTable::from_bits(n, bits)
    }
}
