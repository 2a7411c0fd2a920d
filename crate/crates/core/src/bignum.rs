//! Logarithms of exact counts.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// Natural log of a big count, `-inf` for zero.
///
/// Uses the top 64 bits plus the bit length, so the relative error of the
/// mantissa is about 2^-52 regardless of the size of `n`.
pub fn ln_big(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().expect("fits in u64") as f64).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().expect("top 64 bits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}
