//! Certified enumeration of the exceptional values of three arithmetic maps:
//!
//! - the cototient map `n ↦ n − φ(n)`,
//! - the aliquot map `n ↦ σ(n) − n`,
//! - the Robbins map `p ↦ (p − 1)/2 − φ(p − 1)` over odd primes `p`.
//!
//! A value never attained by a map is *exceptional* for it (noncototients,
//! nonaliquots or "untouchable" numbers, and Robbins numbers). The crate
//! builds attainment bitmaps ([`image::ImageMap`]) whose unset bits are
//! proven exceptional by explicit preimage bounds ([`image::search_bound`]),
//! and computes the structured sets and density reports in [`verify`].
//!
//! The crate is `no_std` + `alloc`. The `parallel` feature (which implies
//! `std`) fans segment scans out over the ambient rayon thread pool; results
//! are bit-identical to the sequential build.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod arith;
mod error;
pub mod image;
pub(crate) mod par;
pub mod verify;

pub use error::{Error, Result};
pub use image::{
    build_image, certify, enumerate_exceptions, find_preimages, search_bound, Bitmap, Capacity,
    Certificate, Exceptions, ImageMap, MapKind, Mode, OddShape, PreimageWitness, ScanConfig,
    SearchBound,
};
