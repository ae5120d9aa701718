use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Largest supported table limit. Entries are stored as `u32`, so the table
/// costs 4 bytes per integer (8 GiB at 2^31).
pub const MAX_SPF_LIMIT: u64 = u32::MAX as u64;

/// Smallest-prime-factor table for `2..=limit`, built by a linear sieve.
#[derive(Debug, Clone)]
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

/// Builds the smallest-prime-factor table for `2..=limit`.
///
/// Fails with a capacity error unless `2 <= limit <= MAX_SPF_LIMIT`.
pub fn build_spf_table(limit: u64) -> Result<SpfTable> {
    if !(2..=MAX_SPF_LIMIT).contains(&limit) {
        return Err(Error::Capacity {
            what: "smallest-prime-factor table",
            required: limit as u128,
            limit: MAX_SPF_LIMIT as u128,
        });
    }
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            if p > si {
                break;
            }
            let Some(j) = (p as usize).checked_mul(i).filter(|&j| j <= n) else {
                break;
            };
            spf[j] = p;
        }
    }
    Ok(SpfTable { limit, spf, primes })
}

impl SpfTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `n`, for `2 <= n <= limit`.
    ///
    /// # Panics
    /// If `n` is outside `2..=limit`.
    #[inline]
    pub fn spf(&self, n: u64) -> u64 {
        assert!((2..=self.limit).contains(&n), "{n} outside SPF table");
        self.spf[n as usize] as u64
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.spf[n as usize] as u64 == n
    }

    /// All primes up to the limit, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().map(|&p| p as u64)
    }

    /// `(prime, exponent)` pairs of `n`, primes ascending.
    pub(crate) fn factor_pairs(&self, mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf(n);
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }
}
