//! Structured residue sets, the Robbins decomposition, lemma-level
//! quantities, and density reports built on exact images.

mod lemmas;
mod report;
mod robbins;
mod sets;

pub use lemmas::{
    b_threshold, classify_prime, h_y, in_a, in_a_xy, in_b, iterated_log, lemma_report, rough_count,
    sigma_mod12_density, Density, Fraction, LemmaParams, LemmaReport, PrimeClass, Tristate,
    DIAGNOSTIC_MAX,
};
pub use report::{report_from_image, report_image_spec, theorem_report, TrendReport};
pub use robbins::{decompose_robbins, robbins_structure_scan, RobbinsDecomposition, StructureScan};
pub use sets::{set_count, set_membership, Membership, SetCount, StructuredSet};
