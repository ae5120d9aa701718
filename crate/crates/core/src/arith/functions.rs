use super::factor::factorize;
use crate::{Error, Result};

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = libm::sqrt(n as f64) as u64;
    // correct the float estimate in either direction
    while r.checked_mul(r).map_or(true, |sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// The 2-adic split `m = 2^α·k` with `k` odd, returned as `(α, k)`.
/// `m = 0` yields `(0, 0)`.
pub fn two_adic_split(m: u64) -> (u32, u64) {
    if m == 0 {
        return (0, 0);
    }
    let alpha = m.trailing_zeros();
    (alpha, m >> alpha)
}

/// Euler's totient. `φ(0)` is taken to be 0.
pub fn euler_phi(n: u64) -> u64 {
    match n {
        0 => 0,
        _ => factorize(n, None).map(|f| f.phi()).unwrap_or(0),
    }
}

/// Sum of divisors `σ(n)`; overflow beyond `u64` is an error.
pub fn sigma_divisors(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Domain {
            what: "sigma",
            value: 0,
        });
    }
    factorize(n, None)?.sigma()
}

/// `P(n)`, the largest prime factor of `n`, with `P(1) = 1` (and `P(0) = 0`).
pub fn largest_prime_factor(n: u64) -> u64 {
    match n {
        0 => 0,
        _ => factorize(n, None).map(|f| f.largest_prime()).unwrap_or(0),
    }
}
