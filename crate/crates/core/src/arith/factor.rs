use alloc::vec::Vec;

use super::primality::{is_prime, Montgomery};
use super::spf::SpfTable;
use crate::{Error, Result};

/// A positive integer together with its prime factorization.
///
/// `factors` holds `(prime, exponent)` pairs with strictly increasing primes
/// and exponents `>= 1`; it is empty exactly when `value == 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FactoredInteger {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Euler's totient, `n ∏_{p|n} (1 − 1/p)`.
    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1))
    }

    /// Sum of divisors, `∏_{p^a‖n} (p^{a+1} − 1)/(p − 1)`.
    pub fn sigma(&self) -> Result<u64> {
        let overflow = Error::Overflow {
            what: "sigma",
            value: self.value,
        };
        let mut acc = 1u64;
        for &(p, e) in &self.factors {
            // 1 + p + ... + p^e, accumulated so no term exceeds the result
            let mut term = 1u64;
            for _ in 0..e {
                term = term
                    .checked_mul(p)
                    .and_then(|t| t.checked_add(1))
                    .ok_or(overflow.clone())?;
            }
            acc = acc.checked_mul(term).ok_or(overflow.clone())?;
        }
        Ok(acc)
    }

    /// `P(n)`, the largest prime factor, with `P(1) = 1`.
    pub fn largest_prime(&self) -> u64 {
        self.factors.last().map_or(1, |&(p, _)| p)
    }

    pub fn smallest_prime(&self) -> Option<u64> {
        self.factors.first().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Some prime `q` with `q^2 | n`, the smallest such.
    pub fn square_divisor_prime(&self) -> Option<u64> {
        self.factors.iter().find(|&&(_, e)| e >= 2).map(|&(p, _)| p)
    }

    pub fn is_divisible_by(&self, p: u64) -> bool {
        self.factors.iter().any(|&(q, _)| q == p)
    }
}

/// Factors `n >= 1`.
///
/// With a table, `n` must not exceed its limit (capacity error otherwise).
/// Without one, trial division strips factors below 2^10 and Pollard–Brent
/// splits the rest, which is exact for every `u64`.
pub fn factorize(n: u64, table: Option<&SpfTable>) -> Result<FactoredInteger> {
    if n == 0 {
        return Err(Error::Domain {
            what: "factorize",
            value: 0,
        });
    }
    if let Some(t) = table {
        if n > t.limit() {
            return Err(Error::Capacity {
                what: "factorize via SPF table",
                required: n as u128,
                limit: t.limit() as u128,
            });
        }
        return Ok(FactoredInteger {
            value: n,
            factors: t.factor_pairs(n),
        });
    }
    let mut primes = Vec::new();
    let mut rest = n;
    while rest % 2 == 0 {
        rest /= 2;
        primes.push(2);
    }
    let mut d = 3u64;
    while d < 1024 && d * d <= rest {
        while rest % d == 0 {
            rest /= d;
            primes.push(d);
        }
        d += 2;
    }
    if rest > 1 {
        split_into(rest, &mut primes);
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(FactoredInteger { value: n, factors })
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    if let Some(r) = exact_sqrt(n) {
        split_into(r, out);
        split_into(r, out);
        return;
    }
    let d = pollard_brent(n);
    split_into(d, out);
    split_into(n / d, out);
}

fn exact_sqrt(n: u64) -> Option<u64> {
    let r = super::isqrt(n);
    (r * r == n).then_some(r)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Nontrivial factor of an odd composite `n` that has no factor below 2^10.
fn pollard_brent(n: u64) -> u64 {
    let mont = Montgomery::new(n);
    for c in 1u64.. {
        let c_m = mont.to_mont(c);
        let f = |x: u64| {
            let (y, carry) = mont.mul(x, x).overflowing_add(c_m);
            if carry || y >= n {
                y.wrapping_sub(n)
            } else {
                y
            }
        };
        let mut y = mont.to_mont(2);
        let mut x;
        let mut ys;
        let mut q = mont.to_mont(1);
        let mut g;
        let mut r = 1u64;
        const M: u64 = 128;
        loop {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            loop {
                ys = y;
                for _ in 0..M.min(r - k) {
                    y = f(y);
                    q = mont.mul(q, x.abs_diff(y));
                }
                g = gcd(q, n);
                k += M;
                if k >= r || g != 1 {
                    break;
                }
            }
            r *= 2;
            if g != 1 {
                break;
            }
        }
        if g == n {
            // backtrack one step at a time from the last checkpoint
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g != 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::build_spf_table;

    #[test]
    fn spec_examples() {
        assert_eq!(factorize(12, None).unwrap().factors(), [(2, 2), (3, 1)]);
        assert!(factorize(1, None).unwrap().factors().is_empty());
        // trial division to sqrt confirms 509203 is prime
        assert!((2..=713).all(|d| 509_203 % d != 0));
        assert_eq!(factorize(509_203, None).unwrap().factors(), [(509_203, 1)]);
    }

    #[test]
    fn zero_is_out_of_domain() {
        assert!(matches!(factorize(0, None), Err(Error::Domain { .. })));
    }

    #[test]
    fn table_limit_is_enforced() {
        let t = build_spf_table(100).unwrap();
        assert!(factorize(101, Some(&t)).unwrap_err().is_capacity());
        assert_eq!(
            factorize(100, Some(&t)).unwrap().factors(),
            [(2, 2), (5, 2)]
        );
    }

    #[test]
    fn hard_semiprimes_and_powers() {
        let cases: [(u64, &[(u64, u32)]); 5] = [
            (4_294_967_297, &[(641, 1), (6_700_417, 1)]),
            (
                18_446_744_073_709_551_615,
                &[
                    (3, 1),
                    (5, 1),
                    (17, 1),
                    (257, 1),
                    (641, 1),
                    (65_537, 1),
                    (6_700_417, 1),
                ],
            ),
            // (2^31 - 1)^2
            (4_611_686_014_132_420_609, &[(2_147_483_647, 2)]),
            // 1000003 * 1000033 * 1000037
            (
                1_000_073_001_431_003_663,
                &[(1_000_003, 1), (1_000_033, 1), (1_000_037, 1)],
            ),
            (1 << 63, &[(2, 63)]),
        ];
        for (n, want) in cases {
            let f = factorize(n, None).unwrap();
            assert_eq!(f.factors(), want, "n = {n}");
        }
    }

    #[test]
    fn product_reconstructs_value() {
        let t = build_spf_table(200_000).unwrap();
        for n in (1..200_000u64).step_by(7) {
            let a = factorize(n, None).unwrap();
            let b = factorize(n, Some(&t)).unwrap();
            assert_eq!(a, b);
            let prod: u64 = a.factors().iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
            assert!(a.factors().windows(2).all(|w| w[0].0 < w[1].0));
            assert!(a.factors().iter().all(|&(p, e)| e >= 1 && is_prime(p)));
        }
    }
}
