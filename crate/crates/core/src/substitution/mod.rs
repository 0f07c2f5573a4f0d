//! Substitution systems on finite alphabets: matrices, Perron–Frobenius
//! data, two-sided fixed-point patches, geometric layouts, self-similarity,
//! Dekking coincidence and block recoding.

mod patch;
mod pf;
mod system;

pub use patch::{
    fixed_point_patch, geometric_points, recode_pairs, self_similarity_check, Anchor, Coord, FixedPointPatch,
    GeometricPointSets, Recoded, SelfSimilarity, MAX_PATCH_LETTERS,
};
pub use pf::{eigen_residual, exact_pf, pf_data, power_iteration, ExactPF, PFData};
pub use system::SubstitutionSystem;
