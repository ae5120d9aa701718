//! Attainment images of the three maps, their preimage bounds, and
//! single-target certification.

mod bitmap;
mod bound;
mod build;
mod kind;
mod preimage;

pub use bitmap::Bitmap;
pub use bound::{exhaustive_ceiling, search_bound, OddShape, SearchBound};
pub use build::{
    build_image, enumerate_exceptions, Capacity, Exceptions, ImageMap, Mode, ScanConfig,
};
pub use kind::MapKind;
pub use preimage::{certify, find_preimages, Certificate, PreimageWitness};
