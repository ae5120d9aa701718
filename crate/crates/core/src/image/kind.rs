use core::fmt;
use core::str::FromStr;

use crate::arith::{factorize, is_prime};
use crate::{Error, Result};

/// The three maps whose exceptional values the engine certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum MapKind {
    /// `n ↦ n − φ(n)` over `n >= 1`.
    Cototient,
    /// `n ↦ σ(n) − n` over `n >= 1`.
    Aliquot,
    /// `p ↦ (p − 1)/2 − φ(p − 1)` over odd primes `p`.
    Robbins,
}

impl MapKind {
    pub const ALL: [MapKind; 3] = [MapKind::Cototient, MapKind::Aliquot, MapKind::Robbins];

    /// Code used in the binary image cache.
    pub fn code(self) -> u8 {
        match self {
            MapKind::Cototient => 0,
            MapKind::Aliquot => 1,
            MapKind::Robbins => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            MapKind::Cototient => "cototient",
            MapKind::Aliquot => "aliquot",
            MapKind::Robbins => "robbins",
        }
    }

    /// Evaluates the map at `n`. Robbins requires an odd prime; the others
    /// any `n >= 1`.
    pub fn apply(self, n: u64) -> Result<u64> {
        let domain = Error::Domain {
            what: self.name(),
            value: n,
        };
        match self {
            MapKind::Cototient if n >= 1 => Ok(n - factorize(n, None)?.phi()),
            MapKind::Aliquot if n >= 1 => Ok(factorize(n, None)?.sigma()? - n),
            MapKind::Robbins if n % 2 == 1 && is_prime(n) => {
                Ok((n - 1) / 2 - factorize(n - 1, None)?.phi())
            }
            _ => Err(domain),
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MapKind {
    type Err = ();

    fn from_str(s: &str) -> core::result::Result<Self, ()> {
        match s {
            "cototient" => Ok(MapKind::Cototient),
            "aliquot" => Ok(MapKind::Aliquot),
            "robbins" => Ok(MapKind::Robbins),
            _ => Err(()),
        }
    }
}
