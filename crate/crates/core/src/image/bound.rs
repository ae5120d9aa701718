use super::MapKind;
use crate::arith::two_adic_split;
use crate::{Error, Result};

/// Shape constraint on odd preimages of a cototient or aliquot target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum OddShape {
    /// Odd composites (for aliquot: odd non-squares).
    AnyOddComposite,
    /// Odd squares `r²` only.
    OddSquareOnly,
    /// No odd preimage needs to be searched.
    None,
}

/// Proven-complete search region for the preimages of one target.
///
/// Ceilings bound the preimage itself (`n`, or the prime `p` for Robbins);
/// `robbins_w_ceiling` bounds the odd part `w` of `p − 1`. They are `u128`
/// because `m²` leaves the 64-bit range for large targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SearchBound {
    pub even_preimage_ceiling: Option<u128>,
    pub odd_preimage_ceiling: Option<u128>,
    pub odd_shape: OddShape,
    pub robbins_w_ceiling: Option<u128>,
    pub decidable: bool,
}

/// The smallest ceiling at which a preimage scan for `m` lists *every*
/// preimage. `None` when the preimage set is infinite (`m = 1`, attained by
/// every prime) or unbounded (Robbins powers of two).
pub fn exhaustive_ceiling(kind: MapKind, m: u64, bound: &SearchBound) -> Option<u128> {
    if !bound.decidable || (m == 1 && kind != MapKind::Robbins) {
        return None;
    }
    match (bound.even_preimage_ceiling, bound.odd_preimage_ceiling) {
        (Some(e), Some(o)) => Some(e.max(o)),
        (e, o) => e.or(o),
    }
}

/// The preimage bound for `m` under `kind`.
///
/// - cototient, `m` even: `n` is even and `n − φ(n) >= n/2`, so `n <= 2m`.
/// - cototient, `m >= 3` odd: `n` is an odd composite and `n − φ(n) >= √n`,
///   so `n <= m²`.
/// - aliquot: even `n` has `σ(n) − n >= n/2`; odd `n` with even `σ(n) − n`
///   has odd `σ(n)`, hence is a square `r²` with `r <= m`; odd composites
///   giving odd values are bounded by `m²`.
/// - robbins, `m = 2^α·k`, `k >= 3` odd: `p = 2^{α+1}·w + 1` with
///   `w − φ(w) = k`, and odd composite `w` has `w − φ(w) >= √w`, so
///   `w <= k²`. Powers of two need `w` prime, which no finite scan settles.
///
/// `m = 1` is attained by `n = 2` for the first two maps; its other
/// preimages are the odd primes and are not enumerated.
pub fn search_bound(kind: MapKind, m: u64) -> Result<SearchBound> {
    if m == 0 {
        return Err(Error::Domain {
            what: "search_bound target",
            value: 0,
        });
    }
    let m2 = m as u128 * m as u128;
    let twice = 2 * m as u128;
    let bound = match kind {
        MapKind::Cototient | MapKind::Aliquot if m == 1 => SearchBound {
            even_preimage_ceiling: Some(2),
            odd_preimage_ceiling: None,
            odd_shape: OddShape::None,
            robbins_w_ceiling: None,
            decidable: true,
        },
        MapKind::Cototient if m % 2 == 0 => SearchBound {
            even_preimage_ceiling: Some(twice),
            odd_preimage_ceiling: None,
            odd_shape: OddShape::None,
            robbins_w_ceiling: None,
            decidable: true,
        },
        MapKind::Cototient => SearchBound {
            even_preimage_ceiling: None,
            odd_preimage_ceiling: Some(m2),
            odd_shape: OddShape::AnyOddComposite,
            robbins_w_ceiling: None,
            decidable: true,
        },
        MapKind::Aliquot => SearchBound {
            even_preimage_ceiling: Some(twice),
            odd_preimage_ceiling: Some(m2),
            odd_shape: if m % 2 == 0 {
                OddShape::OddSquareOnly
            } else {
                OddShape::AnyOddComposite
            },
            robbins_w_ceiling: None,
            decidable: true,
        },
        MapKind::Robbins => {
            let (alpha, k) = two_adic_split(m);
            if k == 1 {
                SearchBound {
                    even_preimage_ceiling: None,
                    odd_preimage_ceiling: None,
                    odd_shape: OddShape::None,
                    robbins_w_ceiling: None,
                    decidable: false,
                }
            } else {
                let w_max = k as u128 * k as u128;
                SearchBound {
                    even_preimage_ceiling: None,
                    odd_preimage_ceiling: Some((w_max << (alpha + 1)) + 1),
                    odd_shape: OddShape::None,
                    robbins_w_ceiling: Some(w_max),
                    decidable: true,
                }
            }
        }
    };
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        let b = search_bound(MapKind::Cototient, 10).unwrap();
        assert_eq!(b.even_preimage_ceiling, Some(20));
        assert_eq!(b.odd_shape, OddShape::None);
        assert!(b.decidable);

        let b = search_bound(MapKind::Aliquot, 16).unwrap();
        assert_eq!(b.even_preimage_ceiling, Some(32));
        assert_eq!(b.odd_shape, OddShape::OddSquareOnly);
        // r <= 16, i.e. n = r² <= 256
        assert_eq!(b.odd_preimage_ceiling, Some(256));

        assert!(!search_bound(MapKind::Robbins, 8).unwrap().decidable);
    }

    #[test]
    fn zero_is_out_of_domain() {
        for k in MapKind::ALL {
            assert!(matches!(search_bound(k, 0), Err(Error::Domain { .. })));
        }
    }

    #[test]
    fn odd_cototient_and_robbins_shapes() {
        let b = search_bound(MapKind::Cototient, 9).unwrap();
        assert_eq!(b.even_preimage_ceiling, None);
        assert_eq!(b.odd_preimage_ceiling, Some(81));
        assert_eq!(b.odd_shape, OddShape::AnyOddComposite);

        let b = search_bound(MapKind::Robbins, 10).unwrap();
        assert_eq!(b.robbins_w_ceiling, Some(25));
        assert_eq!(b.odd_preimage_ceiling, Some(4 * 25 + 1));
        assert_eq!(exhaustive_ceiling(MapKind::Robbins, 10, &b), Some(101));

        let one = search_bound(MapKind::Cototient, 1).unwrap();
        assert!(one.decidable);
        assert_eq!(exhaustive_ceiling(MapKind::Cototient, 1, &one), None);
        assert_eq!(
            exhaustive_ceiling(
                MapKind::Robbins,
                8,
                &search_bound(MapKind::Robbins, 8).unwrap()
            ),
            None
        );
    }

    #[test]
    fn ceilings_are_u128_for_large_targets() {
        let b = search_bound(MapKind::Cototient, u64::MAX).unwrap();
        assert_eq!(
            b.odd_preimage_ceiling,
            Some(u64::MAX as u128 * u64::MAX as u128)
        );
    }
}
