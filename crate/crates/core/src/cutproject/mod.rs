//! Cut-and-project schemes with mixed internal spaces, star maps, model
//! sets, densities, regularity and shift search.

mod modelset;
mod scheme;
mod window;

pub use modelset::{
    density, injective_on, lattice_candidates, lattice_preimage, model_set_points, regularity_check, shift_search,
    ModelPoint, ModelSetQuery, QueryRange, Regularity,
};
pub use scheme::{
    beta_preimage, strip_beta, CutProjectScheme, ExactInternal, InternalPoint, LatticeKind, Physical, PHI_CACHE_LEVELS,
    SCHEME_NAMES,
};
pub use window::{Cell, Interval, Membership, Window, WindowIndex};
