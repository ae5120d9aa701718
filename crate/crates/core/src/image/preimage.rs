use alloc::vec::Vec;

use super::bound::{exhaustive_ceiling, search_bound};
use super::{MapKind, ScanConfig};
use crate::arith::{
    factorize, is_prime, isqrt, primes_up_to, sieve_segment, two_adic_split, Fields, SegmentBuf,
};
use crate::{par, Error, Result};

/// Every preimage of `target` up to `ceiling_used`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PreimageWitness {
    pub kind: MapKind,
    pub target: u64,
    /// Ascending. Odd primes for the Robbins map.
    pub preimages: Vec<u64>,
    pub ceiling_used: u64,
    /// The ceiling covers the target's search bound, so the list is complete.
    pub exhaustive: bool,
}

/// Status of a single target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "status", rename_all = "lowercase"))]
pub enum Certificate {
    /// Smallest preimage.
    Attained {
        witness: u64,
    },
    Exceptional,
    /// A Robbins power of two: no finite scan settles it.
    Undecidable,
}

/// Sieves `start, start + step, ..., <= end` and keeps the `n` accepted by
/// `keep(n, phi, sigma)`, in ascending order.
fn collect<F>(
    start: u64,
    end: u64,
    step: u64,
    fields: Fields,
    cfg: &ScanConfig,
    keep: F,
) -> Result<Vec<u64>>
where
    F: Fn(u64, u64, u64) -> bool + Sync + Send,
{
    if end < start {
        return Ok(Vec::new());
    }
    if step == 2 && start % 2 == 0 {
        // the sieve strides over odd values only
        return sieve_filter(start, end, 1, fields, cfg, move |n, phi, sigma| {
            n % 2 == 0 && keep(n, phi, sigma)
        });
    }
    sieve_filter(start, end, step, fields, cfg, keep)
}

fn sieve_filter<F>(
    start: u64,
    end: u64,
    step: u64,
    fields: Fields,
    cfg: &ScanConfig,
    keep: F,
) -> Result<Vec<u64>>
where
    F: Fn(u64, u64, u64) -> bool + Sync + Send,
{
    let primes = primes_up_to(isqrt(end));
    let values = (end - start) / step + 1;
    let seg = cfg.segment_len.max(1) as u64;
    par::map_concat(values.div_ceil(seg), |s| {
        let first = s * seg;
        let len = (values - first).min(seg) as usize;
        let lo = start + first * step;
        let mut buf = SegmentBuf::default();
        sieve_segment(lo, step, len, &primes, fields, &mut buf)?;
        Ok((0..len)
            .filter_map(|i| {
                let n = lo + step * i as u64;
                let phi = buf.phi.get(i).copied().unwrap_or(0);
                let sigma = buf.sigma.get(i).copied().unwrap_or(0);
                keep(n, phi, sigma).then_some(n)
            })
            .collect())
    })
}

fn check(cfg_limit: u64, what: &'static str, required: u64) -> Result<()> {
    if required > cfg_limit {
        return Err(Error::Capacity {
            what,
            required: required as u128,
            limit: cfg_limit as u128,
        });
    }
    Ok(())
}

/// All preimages of `m` up to `ceiling`, scanning only where the search
/// bound allows preimages to lie.
pub fn find_preimages(
    kind: MapKind,
    m: u64,
    ceiling: u64,
    cfg: &ScanConfig,
) -> Result<PreimageWitness> {
    let bound = search_bound(kind, m)?;
    if ceiling == 0 {
        return Err(Error::Domain {
            what: "preimage ceiling",
            value: 0,
        });
    }
    let exh = exhaustive_ceiling(kind, m, &bound);
    let exhaustive = exh.is_some_and(|e| ceiling as u128 >= e);
    let cap = &cfg.capacity;
    let clamp = |c: Option<u128>| c.map_or(ceiling, |c| c.min(ceiling as u128) as u64);

    let preimages = match kind {
        MapKind::Robbins => {
            // p = 2^{α+1}·w + 1 with w odd and w − φ(w) = k
            let (alpha, k) = two_adic_split(m);
            let mut w_end = (ceiling - 1) >> (alpha + 1).min(63);
            if let Some(wc) = bound.robbins_w_ceiling {
                w_end = w_end.min(wc.min(u64::MAX as u128) as u64);
            }
            check(cap.max_w_scan, "robbins w scan", w_end)?;
            let phi = Fields {
                phi: true,
                sigma: false,
                spf: false,
            };
            let ws = collect(1, w_end, 2, phi, cfg, |w, phi_w, _| {
                w - phi_w == k && is_prime((w << (alpha + 1)) + 1)
            })?;
            ws.into_iter().map(|w| (w << (alpha + 1)) + 1).collect()
        }
        MapKind::Cototient => {
            let phi = Fields {
                phi: true,
                sigma: false,
                spf: false,
            };
            let (start, step, end) = if m == 1 {
                (1, 1, ceiling)
            } else if m % 2 == 0 {
                (2, 2, clamp(bound.even_preimage_ceiling))
            } else {
                (3, 2, clamp(bound.odd_preimage_ceiling))
            };
            if start == 2 {
                check(cap.max_even_scan, "even preimage scan", end)?;
            } else {
                check(cap.max_odd_scan, "odd preimage scan", end)?;
            }
            collect(start, end, step, phi, cfg, |n, phi_n, _| n - phi_n == m)?
        }
        MapKind::Aliquot => {
            let sigma = Fields {
                phi: false,
                sigma: true,
                spf: false,
            };
            let hit = |n: u64, _: u64, s: u64| s - n == m;
            if m == 1 {
                check(cap.max_odd_scan, "preimage scan", ceiling)?;
                collect(1, ceiling, 1, sigma, cfg, hit)?
            } else {
                let even_end = clamp(bound.even_preimage_ceiling);
                let odd_end = clamp(bound.odd_preimage_ceiling);
                check(cap.max_even_scan, "even preimage scan", even_end)?;
                let mut out = collect(2, even_end, 2, sigma, cfg, hit)?;
                if m % 2 == 0 {
                    // odd preimages of even values are odd squares r², r <= √odd_end
                    let r_end = isqrt(odd_end);
                    check(cap.max_odd_scan, "odd square scan", r_end)?;
                    let mut r = 3;
                    while r <= r_end {
                        let f = factorize(r, None)?;
                        let mut s: u128 = 1;
                        for &(p, e) in f.factors() {
                            let mut term: u128 = 1;
                            for _ in 0..2 * e {
                                term = term * p as u128 + 1;
                            }
                            s *= term;
                        }
                        if s - (r as u128 * r as u128) == m as u128 {
                            out.push(r * r);
                        }
                        r += 2;
                    }
                } else {
                    check(cap.max_odd_scan, "odd preimage scan", odd_end)?;
                    out.extend(collect(3, odd_end, 2, sigma, cfg, hit)?);
                }
                out.sort_unstable();
                out
            }
        }
    };
    Ok(PreimageWitness {
        kind,
        target: m,
        preimages,
        ceiling_used: ceiling,
        exhaustive,
    })
}

/// Settles `m` by scanning its full search bound.
///
/// Robbins powers of two are reported undecidable even when a preimage is
/// known, matching their place in the image's undecided list. `m = 1` is
/// attained at `n = 2` for the cototient and aliquot maps.
pub fn certify(kind: MapKind, m: u64, cfg: &ScanConfig) -> Result<Certificate> {
    let bound = search_bound(kind, m)?;
    if !bound.decidable {
        return Ok(Certificate::Undecidable);
    }
    let ceiling = match exhaustive_ceiling(kind, m, &bound) {
        Some(c) => u64::try_from(c).map_err(|_| Error::Capacity {
            what: "certification scan",
            required: c,
            limit: u64::MAX as u128,
        })?,
        // m = 1 for cototient and aliquot
        None => 2,
    };
    let found = find_preimages(kind, m, ceiling, cfg)?;
    Ok(match found.preimages.first() {
        Some(&witness) => Certificate::Attained { witness },
        None => Certificate::Exceptional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Capacity;

    fn cfg() -> ScanConfig {
        ScanConfig::default()
    }

    #[test]
    fn spec_examples() {
        let w = find_preimages(MapKind::Cototient, 8, 100, &cfg()).unwrap();
        assert_eq!(w.preimages, [12, 14, 16]);
        assert!(w.exhaustive);
        let w = find_preimages(MapKind::Aliquot, 1, 20, &cfg()).unwrap();
        assert_eq!(w.preimages, [2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(!w.exhaustive);
        let w = find_preimages(MapKind::Robbins, 2, 100, &cfg()).unwrap();
        assert_eq!(w.preimages, [13, 29, 53]);
        assert!(!w.exhaustive);
    }

    #[test]
    fn preimages_match_brute_force() {
        for kind in [MapKind::Cototient, MapKind::Aliquot] {
            for m in 1..=60u64 {
                let ceiling = 5_000;
                let got = find_preimages(kind, m, ceiling, &cfg()).unwrap().preimages;
                let want: Vec<u64> = (1..=ceiling)
                    .filter(|&n| kind.apply(n).unwrap() == m)
                    .collect();
                assert_eq!(got, want, "{kind} {m}");
            }
        }
        for m in 1..=60u64 {
            let ceiling = 20_000;
            let got = find_preimages(MapKind::Robbins, m, ceiling, &cfg())
                .unwrap()
                .preimages;
            let want: Vec<u64> = (3..=ceiling)
                .filter(|&p| is_prime(p) && MapKind::Robbins.apply(p).unwrap() == m)
                .collect();
            assert_eq!(got, want, "robbins {m}");
        }
    }

    #[test]
    fn certify_examples() {
        assert_eq!(
            certify(MapKind::Cototient, 8, &cfg()).unwrap(),
            Certificate::Attained { witness: 12 }
        );
        assert_eq!(
            certify(MapKind::Robbins, 4, &cfg()).unwrap(),
            Certificate::Undecidable
        );
        assert_eq!(
            certify(MapKind::Cototient, 10, &cfg()).unwrap(),
            Certificate::Exceptional
        );
        assert_eq!(
            certify(MapKind::Aliquot, 5, &cfg()).unwrap(),
            Certificate::Exceptional
        );
        assert_eq!(
            certify(MapKind::Robbins, 5, &cfg()).unwrap(),
            Certificate::Exceptional
        );
        assert_eq!(
            certify(MapKind::Robbins, 3, &cfg()).unwrap(),
            Certificate::Attained { witness: 19 }
        );
        assert_eq!(
            certify(MapKind::Aliquot, 1, &cfg()).unwrap(),
            Certificate::Attained { witness: 2 }
        );
        assert!(certify(MapKind::Cototient, 0, &cfg()).is_err());
    }

    #[test]
    fn certify_large_even_noncototient() {
        assert_eq!(
            certify(MapKind::Cototient, 1_018_406, &cfg()).unwrap(),
            Certificate::Exceptional
        );
    }

    #[test]
    fn certify_respects_capacity() {
        let small = ScanConfig {
            capacity: Capacity::uniform(100),
            ..cfg()
        };
        assert!(certify(MapKind::Cototient, 11, &small)
            .unwrap_err()
            .is_capacity());
        assert!(certify(MapKind::Cototient, 40, &small).is_ok());
    }
}
