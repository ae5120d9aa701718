use alloc::vec::Vec;

use super::sets::{set_membership, StructuredSet};
use crate::arith::{
    euler_phi, factorize, is_prime, isqrt, primes_up_to, sieve_segment, two_adic_split, Fields,
    SegmentBuf,
};
use crate::image::ScanConfig;
use crate::{par, Error, Result};

/// `p − 1 = 2^beta·w` with `w` odd, and `m = 2^{beta−1}·(w − φ(w))`.
/// For `m > 0`, `m = 2^alpha·k` with `k` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RobbinsDecomposition {
    pub p: u64,
    pub beta: u32,
    pub w: u64,
    pub m: u64,
    pub alpha: Option<u32>,
    pub k: Option<u64>,
}

pub fn decompose_robbins(p: u64) -> Result<RobbinsDecomposition> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(Error::Domain {
            what: "robbins decomposition needs an odd prime",
            value: p,
        });
    }
    let (beta, w) = two_adic_split(p - 1);
    let m = (w - euler_phi(w)) << (beta - 1);
    let split = (m > 0).then(|| two_adic_split(m));
    Ok(RobbinsDecomposition {
        p,
        beta,
        w,
        m,
        alpha: split.map(|s| s.0),
        k: split.map(|s| s.1),
    })
}

/// Outcome of checking the structure of every prime whose Robbins value
/// lies in `M(X)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StructureScan {
    #[cfg_attr(feature = "serde", serde(rename = "X"))]
    pub x: u64,
    /// Primes `p` with `f_r(p) ∈ M(X)`.
    pub primes_scanned: u64,
    /// Primes whose decomposition breaks `beta = alpha + 1`, `k = w − φ(w)`,
    /// or disagrees with direct evaluation.
    pub decomposition_violations: Vec<u64>,
    /// Primes with squarefree `w` and `3 ∤ w`.
    pub squarefree_without_three: Vec<u64>,
    /// Primes with `q² | w` for an odd prime `q`.
    pub square_divisor_primes: Vec<u64>,
    /// Squarefree-`w` primes.
    pub conforming: u64,
    /// Conforming primes with `k < w/3`.
    pub ratio_violations: Vec<u64>,
    /// Conforming primes above `7X`.
    pub bound_violations: Vec<u64>,
    pub max_conforming_p: u64,
}

impl StructureScan {
    pub fn violation_count(&self) -> usize {
        self.decomposition_violations.len()
            + self.squarefree_without_three.len()
            + self.ratio_violations.len()
            + self.bound_violations.len()
    }
}

/// Finds every prime `p` with `f_r(p) ∈ M(X)` through its `w`
/// (`p = 2^{α+1}w + 1`, `w − φ(w) = k`, odd `w <= k² <= X²`) and checks the
/// structural claims on each.
pub fn robbins_structure_scan(x: u64, cfg: &ScanConfig) -> Result<StructureScan> {
    if x == 0 {
        return Err(Error::Domain {
            what: "structure scan limit",
            value: 0,
        });
    }
    let w_max = x * x;
    cfg.check("robbins w scan", w_max as u128, cfg.capacity.max_w_scan)?;
    let primes = primes_up_to(isqrt(w_max));
    let values = (w_max - 1) / 2 + 1;
    let seg = cfg.segment_len.max(1) as u64;
    let fields = Fields {
        phi: true,
        sigma: false,
        spf: false,
    };
    // (p, w, alpha, k) in ascending w, then alpha
    let mut hits: Vec<(u64, u64, u32, u64)> = par::map_concat(values.div_ceil(seg), |s| {
        let first = s * seg;
        let len = (values - first).min(seg) as usize;
        let lo = 1 + 2 * first;
        let mut buf = SegmentBuf::default();
        sieve_segment(lo, 2, len, &primes, fields, &mut buf)?;
        let mut out = Vec::new();
        for (i, &phi) in buf.phi.iter().enumerate() {
            let w = lo + 2 * i as u64;
            let k = w - phi;
            if k < 3 || k > x || k % 6 == 1 {
                continue;
            }
            let mut alpha = 0u32;
            while (k << alpha) <= x {
                let member = (k % 6 == 3 && alpha % 2 == 0) || (k % 6 == 5 && alpha % 2 == 1);
                if member {
                    let p = (w << (alpha + 1)) + 1;
                    if is_prime(p) {
                        out.push((p, w, alpha, k));
                    }
                }
                alpha += 1;
            }
        }
        Ok(out)
    })?;
    hits.sort_unstable();

    let mut scan = StructureScan {
        x,
        primes_scanned: hits.len() as u64,
        ..StructureScan::default()
    };
    for (p, w, alpha, k) in hits {
        let d = decompose_robbins(p)?;
        let direct = (p - 1) / 2 - euler_phi(p - 1);
        let in_m = set_membership(StructuredSet::M, d.m)?.member;
        if d.w != w
            || d.m != direct
            || !in_m
            || d.alpha != Some(alpha)
            || d.k != Some(k)
            || d.beta != alpha + 1
            || d.w - euler_phi(d.w) != k
        {
            scan.decomposition_violations.push(p);
        }
        let f = factorize(w, None)?;
        if f.is_squarefree() {
            scan.conforming += 1;
            scan.max_conforming_p = scan.max_conforming_p.max(p);
            if w % 3 != 0 {
                scan.squarefree_without_three.push(p);
            }
            if 3 * k < w {
                scan.ratio_violations.push(p);
            }
            if p as u128 > 7 * x as u128 {
                scan.bound_violations.push(p);
            }
        } else {
            scan.square_divisor_primes.push(p);
        }
    }
    Ok(scan)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposition_examples() {
        let d = decompose_robbins(13).unwrap();
        assert_eq!(
            (d.beta, d.w, d.k, d.m, d.alpha),
            (2, 3, Some(1), 2, Some(1))
        );
        let d = decompose_robbins(31).unwrap();
        assert_eq!(
            (d.beta, d.w, d.k, d.m, d.alpha),
            (1, 15, Some(7), 7, Some(0))
        );
        let d = decompose_robbins(3).unwrap();
        assert_eq!((d.beta, d.w, d.m, d.alpha, d.k), (1, 1, 0, None, None));
        assert!(decompose_robbins(2).is_err());
        assert!(decompose_robbins(15).is_err());
    }

    #[test]
    fn decomposition_matches_direct_value() {
        for p in primes_up_to(1_000_000).into_iter().skip(1) {
            let d = decompose_robbins(p).unwrap();
            assert_eq!(d.m, (p - 1) / 2 - euler_phi(p - 1), "{p}");
            if let (Some(a), Some(k)) = (d.alpha, d.k) {
                assert_eq!(d.beta, a + 1);
                assert_eq!(d.w - euler_phi(d.w), k);
            }
        }
    }

    #[test]
    fn scan_finds_every_prime_in_m() {
        let x = 100;
        let scan = robbins_structure_scan(x, &ScanConfig::default()).unwrap();
        // any prime with f_r(p) = m ∈ M(x) has p <= 2^{α+1}k² + 1 <= 2x² + 1
        let want = primes_up_to(2 * x * x + 1)
            .into_iter()
            .skip(1)
            .filter(|&p| {
                let m = (p - 1) / 2 - euler_phi(p - 1);
                m >= 1 && m <= x && set_membership(StructuredSet::M, m).unwrap().member
            })
            .count() as u64;
        assert_eq!(scan.primes_scanned, want);
        assert_eq!(scan.violation_count(), 0);
        assert!(scan.max_conforming_p <= 700);
    }

    #[test]
    fn small_scan_is_clean() {
        let scan = robbins_structure_scan(10, &ScanConfig::default()).unwrap();
        assert_eq!(scan.violation_count(), 0);
    }
}
