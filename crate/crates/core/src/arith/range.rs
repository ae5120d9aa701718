use alloc::vec;
use alloc::vec::Vec;

use super::functions::isqrt;
use crate::{Error, Result};

/// Default number of values per sieve segment. A φ+σ segment then touches
/// about 2 MiB (four `u64` lanes), which fits a typical per-core L2.
pub const DEFAULT_SEGMENT_LEN: usize = 1 << 16;

/// All primes `<= n`, ascending.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    // odd-only sieve: index i stands for 2i + 1
    let half = (n as usize - 1) / 2 + 1;
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= n as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = vec![2];
    out.extend(
        composite
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| 2 * i as u64 + 1),
    );
    out
}

/// Which per-element quantities a segment sieve should produce.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Fields {
    pub phi: bool,
    pub sigma: bool,
    pub spf: bool,
}

/// Scratch lanes for one sieve segment; reused across segments by a worker.
#[derive(Debug, Default)]
pub(crate) struct SegmentBuf {
    pub phi: Vec<u64>,
    pub sigma: Vec<u64>,
    pub spf: Vec<u64>,
    prod: Vec<u64>,
}

impl SegmentBuf {
    /// Per element, the part of `n` built from the primes the segment was
    /// sieved with.
    pub fn sieved_part(&self) -> &[u64] {
        &self.prod
    }

    fn reset(&mut self, len: usize, fields: Fields) {
        fn fill(v: &mut Vec<u64>, len: usize, x: u64) {
            v.clear();
            v.resize(len, x);
        }
        fill(&mut self.prod, len, 1);
        if fields.phi {
            fill(&mut self.phi, len, 1);
        }
        if fields.sigma {
            fill(&mut self.sigma, len, 1);
        }
        if fields.spf {
            fill(&mut self.spf, len, 0);
        }
    }
}

/// Index of the first value in the progression `lo, lo + step, ...` (length
/// `len`) divisible by the odd-or-even prime power `pk`.
#[inline]
fn first_index(lo: u64, step: u64, len: usize, pk: u64) -> Option<usize> {
    let mut m = lo.div_ceil(pk).checked_mul(pk)?;
    if step == 2 && m % 2 == 0 {
        m = m.checked_add(pk)?;
    }
    let idx = (m - lo) / step;
    (idx < len as u64).then_some(idx as usize)
}

/// Sieves the progression `lo, lo + step, ..., lo + step·(len − 1)` with
/// `step` 1 (all integers) or 2 (`lo` odd, odd integers only).
///
/// `primes` must contain every prime up to the square root of the last
/// value; callers outside this module validate that. Each element ends with
/// the requested φ, σ and smallest-prime-factor values (the latter 1 for n = 1).
pub(crate) fn sieve_segment(
    lo: u64,
    step: u64,
    len: usize,
    primes: &[u64],
    fields: Fields,
    buf: &mut SegmentBuf,
) -> Result<()> {
    debug_assert!(lo >= 1 && (step == 1 || (step == 2 && lo % 2 == 1)));
    buf.reset(len, fields);
    if len == 0 {
        return Ok(());
    }
    let last = lo + step * (len as u64 - 1);
    let root = isqrt(last);
    let overflow = |i: usize| Error::Overflow {
        what: "sigma",
        value: lo + step * i as u64,
    };
    for &p in primes {
        if p > root {
            break;
        }
        if step == 2 && p == 2 {
            continue;
        }
        // level 1: every multiple of p
        if let Some(start) = first_index(lo, step, len, p) {
            let stride = p as usize;
            let mut i = start;
            while i < len {
                buf.prod[i] *= p;
                if fields.phi {
                    buf.phi[i] *= p - 1;
                }
                if fields.sigma {
                    buf.sigma[i] = buf.sigma[i].checked_mul(p + 1).ok_or_else(|| overflow(i))?;
                }
                if fields.spf && buf.spf[i] == 0 {
                    buf.spf[i] = p;
                }
                i += stride;
            }
        }
        // levels >= 2: multiples of p^j refine the p-part
        let mut pk = p;
        let mut sum_prev = p + 1; // 1 + p + ... + p^{j-1}
        while let Some(next) = pk.checked_mul(p).filter(|&q| q <= last) {
            pk = next;
            let sum_cur = sum_prev.checked_mul(p).and_then(|s| s.checked_add(1));
            if let Some(start) = first_index(lo, step, len, pk) {
                let stride = pk as usize;
                let mut i = start;
                while i < len {
                    buf.prod[i] *= p;
                    if fields.phi {
                        buf.phi[i] *= p;
                    }
                    if fields.sigma {
                        let s = sum_cur.ok_or_else(|| overflow(i))?;
                        buf.sigma[i] = (buf.sigma[i] / sum_prev)
                            .checked_mul(s)
                            .ok_or_else(|| overflow(i))?;
                    }
                    i += stride;
                }
            }
            match sum_cur {
                Some(s) => sum_prev = s,
                None => break,
            }
        }
    }
    // whatever is left after the small primes is 1 or a single large prime
    for i in 0..len {
        let n = lo + step * i as u64;
        let rest = n / buf.prod[i];
        if rest > 1 {
            if fields.phi {
                buf.phi[i] *= rest - 1;
            }
            if fields.sigma {
                buf.sigma[i] = buf.sigma[i]
                    .checked_mul(rest + 1)
                    .ok_or_else(|| overflow(i))?;
            }
            if fields.spf && buf.spf[i] == 0 {
                buf.spf[i] = rest;
            }
        } else if fields.spf && buf.spf[i] == 0 {
            buf.spf[i] = 1;
        }
    }
    Ok(())
}

/// φ, σ and smallest prime factors over the half-open range `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithRange {
    lo: u64,
    hi: u64,
    phi: Vec<u64>,
    sigma: Vec<u64>,
    spf_lo: Vec<u64>,
}

impl ArithRange {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    fn index(&self, n: u64) -> usize {
        assert!((self.lo..self.hi).contains(&n), "{n} outside range");
        (n - self.lo) as usize
    }

    pub fn phi(&self, n: u64) -> u64 {
        self.phi[self.index(n)]
    }

    pub fn sigma(&self, n: u64) -> u64 {
        self.sigma[self.index(n)]
    }

    /// Smallest prime factor of `n` (1 for `n = 1`).
    pub fn spf(&self, n: u64) -> u64 {
        self.spf_lo[self.index(n)]
    }

    pub fn phi_values(&self) -> &[u64] {
        &self.phi
    }

    pub fn sigma_values(&self) -> &[u64] {
        &self.sigma
    }

    pub fn spf_values(&self) -> &[u64] {
        &self.spf_lo
    }
}

/// Segmented evaluation of φ and σ over `[lo, hi)`.
///
/// `primes` must contain every prime `<= ⌊√(hi − 1)⌋` (larger entries are
/// ignored); a missing or spurious seed is reported, never silently used.
pub fn sieve_arith_range(lo: u64, hi: u64, primes: &[u64]) -> Result<ArithRange> {
    if lo == 0 || lo >= hi {
        return Err(Error::Domain {
            what: "sieve_arith_range lower end",
            value: lo,
        });
    }
    let root = isqrt(hi - 1);
    let needed = primes_up_to(root);
    let mut given = primes.iter().copied().take_while(|&p| p <= root);
    for &p in &needed {
        match given.next() {
            Some(q) if q == p => {}
            Some(q) if q < p => {
                return Err(Error::Domain {
                    what: "seed prime list",
                    value: q,
                })
            }
            _ => return Err(Error::MissingPrime { prime: p }),
        }
    }
    if let Some(q) = given.next() {
        return Err(Error::Domain {
            what: "seed prime list",
            value: q,
        });
    }
    let total = (hi - lo) as usize;
    let fields = Fields {
        phi: true,
        sigma: true,
        spf: true,
    };
    let mut out = ArithRange {
        lo,
        hi,
        phi: Vec::with_capacity(total),
        sigma: Vec::with_capacity(total),
        spf_lo: Vec::with_capacity(total),
    };
    let mut buf = SegmentBuf::default();
    let mut start = lo;
    while start < hi {
        let len = (hi - start).min(DEFAULT_SEGMENT_LEN as u64) as usize;
        sieve_segment(start, 1, len, &needed, fields, &mut buf)?;
        out.phi.extend_from_slice(&buf.phi);
        out.sigma.extend_from_slice(&buf.sigma);
        out.spf_lo.extend_from_slice(&buf.spf);
        start += len as u64;
    }
    Ok(out)
}
