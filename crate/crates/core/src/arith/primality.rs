/// Montgomery arithmetic modulo a fixed odd `n`, with `R = 2^64`.
#[derive(Clone, Copy)]
pub(crate) struct Montgomery {
    n: u64,
    /// `n^{-1} mod 2^64`
    inv: u64,
    /// `R^2 mod n`
    r2: u64,
    /// `R mod n`, i.e. 1 in Montgomery form
    one: u64,
}

impl Montgomery {
    pub(crate) fn new(n: u64) -> Self {
        debug_assert!(n & 1 == 1 && n > 1);
        // Newton iteration doubles the number of correct low bits each step.
        let mut inv = n;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(n.wrapping_mul(inv)));
        }
        let one = ((u64::MAX % n) + 1) % n;
        let r2 = ((one as u128 * one as u128) % n as u128) as u64;
        Montgomery { n, inv, r2, one }
    }

    #[inline]
    fn reduce(&self, t: u128) -> u64 {
        let lo = t as u64;
        let hi = (t >> 64) as u64;
        let m = lo.wrapping_mul(self.inv);
        let mn_hi = ((m as u128 * self.n as u128) >> 64) as u64;
        if hi >= mn_hi {
            hi - mn_hi
        } else {
            hi.wrapping_sub(mn_hi).wrapping_add(self.n)
        }
    }

    #[inline]
    pub(crate) fn to_mont(self, a: u64) -> u64 {
        self.reduce((a % self.n) as u128 * self.r2 as u128)
    }

    #[inline]
    pub(crate) fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = self.one;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

// Jim Sinclair's base set: a strong-pseudoprime test to these seven bases
// has no false positives below 2^64.
const SINCLAIR_BASES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

/// Deterministic primality test, exact for every `u64`.
///
/// Small factors are stripped by trial division; survivors get a strong
/// probable-prime test to the Sinclair bases, which is proven to admit no
/// composite below 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in SMALL_PRIMES {
        if n % p == 0 {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let mont = Montgomery::new(n);
    let d_shift = (n - 1).trailing_zeros();
    let d = (n - 1) >> d_shift;
    let one = mont.one;
    let minus_one = mont.to_mont(n - 1);
    'bases: for a in SINCLAIR_BASES {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = mont.pow(mont.to_mont(a), d);
        if x == one || x == minus_one {
            continue;
        }
        for _ in 1..d_shift {
            x = mont.mul(x, x);
            if x == minus_one {
                continue 'bases;
            }
            if x == one {
                return false;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn spec_examples() {
        assert!(is_prime(2));
        assert!(!is_prime(91));
        assert!(trial(1_000_003));
        assert!(is_prime(1_000_003));
    }

    #[test]
    fn agrees_with_trial_division_below_ten_million() {
        let limit = 10_000_000usize;
        let mut composite = alloc::vec![false; limit + 1];
        composite[0] = true;
        composite[1] = true;
        let mut i = 2;
        while i * i <= limit {
            if !composite[i] {
                let mut j = i * i;
                while j <= limit {
                    composite[j] = true;
                    j += i;
                }
            }
            i += 1;
        }
        for (n, &c) in composite.iter().enumerate() {
            assert_eq!(is_prime(n as u64), !c, "n = {n}");
        }
        // spot-check the sieve itself against trial division
        for n in (0..=limit as u64).step_by(9973) {
            assert_eq!(trial(n), !composite[n as usize]);
        }
    }

    #[test]
    fn strong_pseudoprimes_and_large_values() {
        // strong pseudoprimes to several small bases
        for n in [
            2047u64,
            1_373_653,
            25_326_001,
            3_215_031_751,
            2_152_302_898_747,
            3_474_749_660_383,
            341_550_071_728_321,
            3_825_123_056_546_413_051,
        ] {
            assert!(!is_prime(n), "{n}");
        }
        assert!(is_prime(18_446_744_073_709_551_557)); // largest prime below 2^64
        assert!(!is_prime(u64::MAX));
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(4_294_967_297)); // F5 = 641 * 6700417
    }
}
