use core::fmt;

use crate::image::MapKind;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub enum Error {
    /// A table, scan or bitmap would exceed a configured ceiling.
    Capacity {
        what: &'static str,
        required: u128,
        limit: u128,
    },
    /// The argument lies outside the operation's domain (`m = 0`, even `p`, ...).
    Domain { what: &'static str, value: u64 },
    /// A seed prime list is missing a prime the range sieve needs.
    MissingPrime { prime: u64 },
    /// An exact result does not fit in 64 bits.
    Overflow { what: &'static str, value: u64 },
    /// The requested construction mode is not defined for this map.
    UnsupportedMode { kind: MapKind, mode: &'static str },
}

impl Error {
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Capacity {
                what,
                required,
                limit,
            } => write!(
                f,
                "capacity exceeded: {what} needs scan limit {required}, ceiling is {limit}"
            ),
            Error::Domain { what, value } => write!(f, "{value} is outside the domain of {what}"),
            Error::MissingPrime { prime } => {
                write!(f, "seed prime list is missing the prime {prime}")
            }
            Error::Overflow { what, value } => {
                write!(f, "{what}({value}) overflows 64 bits")
            }
            Error::UnsupportedMode { kind, mode } => {
                write!(f, "mode {mode} is not defined for the {kind} map")
            }
        }
    }
}

impl core::error::Error for Error {}
