use core::fmt;
use core::str::FromStr;

use crate::arith::two_adic_split;
use crate::{Error, Result};

/// Residue-defined sets used by the density arguments.
///
/// - `K`: multiples of 12.
/// - `M1`: `2^α·k` with `k ≡ 3 (mod 6)` and `α` even.
/// - `M2`: `2^α·k` with `k ≡ 5 (mod 6)` and `α` odd.
/// - `M`: the disjoint union of `M1` and `M2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum StructuredSet {
    K,
    M1,
    M2,
    M,
}

impl StructuredSet {
    pub const ALL: [StructuredSet; 4] = [Self::K, Self::M1, Self::M2, Self::M];

    pub fn name(self) -> &'static str {
        match self {
            Self::K => "K",
            Self::M1 => "M1",
            Self::M2 => "M2",
            Self::M => "M",
        }
    }

    /// Limiting density `#S(X)/X`.
    pub fn density(self) -> f64 {
        match self {
            Self::K => 1.0 / 12.0,
            Self::M1 => 2.0 / 9.0,
            Self::M2 => 1.0 / 9.0,
            Self::M => 1.0 / 3.0,
        }
    }
}

impl fmt::Display for StructuredSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StructuredSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|set| set.name().eq_ignore_ascii_case(s))
            .ok_or(Error::Domain {
                what: "structured set name",
                value: 0,
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Membership {
    pub set: StructuredSet,
    pub m: u64,
    pub member: bool,
    /// 2-adic split `m = 2^alpha·k`, reported for the `M` family.
    pub alpha: Option<u32>,
    pub k: Option<u64>,
}

fn in_m1(alpha: u32, k: u64) -> bool {
    k % 6 == 3 && alpha % 2 == 0
}

fn in_m2(alpha: u32, k: u64) -> bool {
    k % 6 == 5 && alpha % 2 == 1
}

pub fn set_membership(set: StructuredSet, m: u64) -> Result<Membership> {
    if m == 0 {
        return Err(Error::Domain {
            what: "set membership target",
            value: 0,
        });
    }
    let (alpha, k) = two_adic_split(m);
    let (member, split) = match set {
        StructuredSet::K => (m % 12 == 0, false),
        StructuredSet::M1 => (in_m1(alpha, k), true),
        StructuredSet::M2 => (in_m2(alpha, k), true),
        StructuredSet::M => (in_m1(alpha, k) || in_m2(alpha, k), true),
    };
    Ok(Membership {
        set,
        m,
        member,
        alpha: split.then_some(alpha),
        k: split.then_some(k),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SetCount {
    pub set: StructuredSet,
    #[cfg_attr(feature = "serde", serde(rename = "X"))]
    pub x: u64,
    pub count: u64,
    pub density: f64,
    pub paper_density: f64,
}

/// `#{k <= n : k ≡ r (mod 6)}` for `1 <= r <= 5`.
fn residue_count(n: u64, r: u64) -> u64 {
    n / 6 + u64::from(n % 6 >= r)
}

/// Exact `#S(X)`, summed over the 2-adic valuation.
pub fn set_count(set: StructuredSet, x: u64) -> Result<SetCount> {
    if x == 0 {
        return Err(Error::Domain {
            what: "set count limit",
            value: 0,
        });
    }
    let by_alpha = |parity: u32, r: u64| -> u64 {
        (0..64)
            .filter(|a| a % 2 == parity)
            .map(|a| residue_count(x >> a, r))
            .sum()
    };
    let count = match set {
        StructuredSet::K => x / 12,
        StructuredSet::M1 => by_alpha(0, 3),
        StructuredSet::M2 => by_alpha(1, 5),
        StructuredSet::M => by_alpha(0, 3) + by_alpha(1, 5),
    };
    Ok(SetCount {
        set,
        x,
        count,
        density: count as f64 / x as f64,
        paper_density: set.density(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(set: StructuredSet, x: u64) -> u64 {
        (1..=x)
            .filter(|&m| set_membership(set, m).unwrap().member)
            .count() as u64
    }

    #[test]
    fn membership_examples() {
        let m = set_membership(StructuredSet::M1, 3).unwrap();
        assert!(m.member);
        assert_eq!((m.alpha, m.k), (Some(0), Some(3)));
        let m = set_membership(StructuredSet::M2, 10).unwrap();
        assert!(m.member);
        assert_eq!((m.alpha, m.k), (Some(1), Some(5)));
        assert!(!set_membership(StructuredSet::K, 30).unwrap().member);
        assert!(set_membership(StructuredSet::K, 0).is_err());
    }

    #[test]
    fn count_examples() {
        assert_eq!(set_count(StructuredSet::K, 120).unwrap().count, 10);
        assert_eq!(set_count(StructuredSet::M1, 100).unwrap().count, 22);
        assert_eq!(set_count(StructuredSet::M2, 100).unwrap().count, 10);
        assert_eq!(set_count(StructuredSet::M, 100).unwrap().count, 32);
    }

    #[test]
    fn counts_match_enumeration() {
        for x in 1..=3_000 {
            for set in StructuredSet::ALL {
                if x % 97 == 0 || x < 200 {
                    assert_eq!(set_count(set, x).unwrap().count, brute(set, x), "{set} {x}");
                }
            }
        }
    }

    #[test]
    fn m1_and_m2_are_disjoint() {
        for m in 1..=1_000_000 {
            let a = set_membership(StructuredSet::M1, m).unwrap().member;
            let b = set_membership(StructuredSet::M2, m).unwrap().member;
            assert!(!(a && b), "{m}");
            assert_eq!(set_membership(StructuredSet::M, m).unwrap().member, a || b);
        }
    }

    #[test]
    fn densities_at_one_million() {
        let x = 1_000_000;
        let m1 = set_count(StructuredSet::M1, x).unwrap();
        let m2 = set_count(StructuredSet::M2, x).unwrap();
        assert_eq!(m1.count, brute(StructuredSet::M1, x));
        assert_eq!(m2.count, brute(StructuredSet::M2, x));
        assert!((m1.density / (2.0 / 9.0) - 1.0).abs() < 0.01);
        assert!((m2.density / (1.0 / 9.0) - 1.0).abs() < 0.01);
    }

    #[test]
    fn parse_names() {
        assert_eq!("m1".parse::<StructuredSet>().unwrap(), StructuredSet::M1);
        assert!("Q".parse::<StructuredSet>().is_err());
    }

    proptest! {
        #[test]
        fn k_count_is_floor(x in 1u64..u64::MAX) {
            prop_assert_eq!(set_count(StructuredSet::K, x).unwrap().count, x / 12);
        }

        #[test]
        fn m_is_sum(x in 1u64..u64::MAX) {
            let m = set_count(StructuredSet::M, x).unwrap().count;
            let a = set_count(StructuredSet::M1, x).unwrap().count;
            let b = set_count(StructuredSet::M2, x).unwrap().count;
            prop_assert_eq!(m, a + b);
        }
    }
}
