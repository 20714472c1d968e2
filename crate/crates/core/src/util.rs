//! Small shared helpers.

/// Number of bits needed to write `x` in binary; 0 for `x == 0`.
pub(crate) fn bit_length(x: u64) -> u32 {
    64 - x.leading_zeros()
}

/// Smallest `k` with `2^k >= x`, for `x >= 1`.
pub(crate) fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    if x <= 1 {
        0
    } else {
        bit_length(x - 1)
    }
}
