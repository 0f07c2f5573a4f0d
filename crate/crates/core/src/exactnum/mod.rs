//! Exact arithmetic used by every other module: arbitrary-precision
//! rationals, the ring `ℤ[√2]` and its fraction field, and planar affine
//! maps with rational coefficients.
//!
//! Nothing here touches floating point except the explicit
//! `to_f64`/[`QuadInt::embed_real`] conversions used for display and
//! ordering diagnostics.

mod affine;
mod quad;

pub use affine::{det_abs_at_least_two as affine_det_abs_at_least_two, AffineMap2, IntAffine, IntMatrix2, RatMatrix2};
pub use quad::{quad_embed_real, QuadInt, QuadRational, RealInterval};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Lowest-terms rational with positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `base^exp` as a big integer.
pub fn big_pow(base: u64, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// Renders a rational as `p/q` (or `p` when the denominator is 1).
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom() == &BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
