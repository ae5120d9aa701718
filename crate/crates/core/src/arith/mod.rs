//! Sieves, factorization, multiplicative functions and primality over
//! 64-bit integers. Everything here is exact; anything that would overflow
//! `u64` reports [`Error::Overflow`](crate::Error::Overflow) instead of
//! wrapping.

mod factor;
mod functions;
mod primality;
mod range;
mod smooth;
mod spf;

pub use factor::{factorize, FactoredInteger};
pub use functions::{euler_phi, isqrt, largest_prime_factor, sigma_divisors, two_adic_split};
pub use primality::is_prime;
pub use range::{primes_up_to, sieve_arith_range, ArithRange, DEFAULT_SEGMENT_LEN};
pub use smooth::{rough_count, smooth_count, COUNT_MAX};
pub use spf::{build_spf_table, SpfTable, MAX_SPF_LIMIT};

pub(crate) use range::{sieve_segment, Fields, SegmentBuf};
