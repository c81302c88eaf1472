//! Exact information-theoretic size `⌈log₂ C(m, n)⌉` of an `n`-subset of `[0, m)`.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

fn product(lo: u64, hi: u64) -> BigUint {
    // product of lo..hi, split in halves to keep operands balanced
    match hi - lo {
        0 => BigUint::one(),
        1 => BigUint::from(lo),
        len if len <= 16 => (lo..hi).fold(BigUint::one(), |acc, x| acc * x),
        len => {
            let mid = lo + len / 2;
            product(lo, mid) * product(mid, hi)
        }
    }
}

/// `C(m, n)` as a big integer.
pub fn binomial(n: u64, m: u64) -> Result<BigUint> {
    if n > m {
        return Err(Error::InvalidInput(format!("n = {n} exceeds m = {m}")));
    }
    let k = n.min(m - n);
    Ok(product(m - k + 1, m + 1) / product(1, k + 1))
}

/// `⌈log₂ C(m, n)⌉`, computed exactly.
pub fn binom_bits(n: u64, m: u64) -> Result<u64> {
    let c = binomial(n, m)?;
    Ok((c - 1u32).bits())
}
