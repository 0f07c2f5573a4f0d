use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{fmt_rational, Rational};

/// 2×2 integer matrix, row-major: `m[row][col]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix2 {
    pub m: [[BigInt; 2]; 2],
}

impl IntMatrix2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntMatrix2 { m: [[a.into(), b.into()], [c.into(), d.into()]] }
    }

    pub fn identity() -> Self {
        IntMatrix2::new(1, 0, 0, 1)
    }

    /// Rotation by `+π/2`: `(x, y) ↦ (−y, x)`.
    pub fn rotation() -> Self {
        IntMatrix2::new(0, -1, 1, 0)
    }

    pub fn det(&self) -> BigInt {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }

    pub fn mul(&self, o: &IntMatrix2) -> IntMatrix2 {
        let e = |i: usize, j: usize| &self.m[i][0] * &o.m[0][j] + &self.m[i][1] * &o.m[1][j];
        IntMatrix2 { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }

    pub fn pow(&self, n: u32) -> IntMatrix2 {
        let mut acc = IntMatrix2::identity();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    pub fn apply(&self, v: &[BigInt; 2]) -> [BigInt; 2] {
        [&self.m[0][0] * &v[0] + &self.m[0][1] * &v[1], &self.m[1][0] * &v[0] + &self.m[1][1] * &v[1]]
    }

    pub fn apply_i64(&self, v: (i64, i64)) -> Option<(i64, i64)> {
        let r = self.apply(&[v.0.into(), v.1.into()]);
        Some((r[0].to_i64()?, r[1].to_i64()?))
    }

    pub fn to_rat(&self) -> RatMatrix2 {
        let q = |x: &BigInt| Rational::from_integer(x.clone());
        RatMatrix2 { m: [[q(&self.m[0][0]), q(&self.m[0][1])], [q(&self.m[1][0]), q(&self.m[1][1])]] }
    }

    pub fn to_i64(&self) -> Option<[[i64; 2]; 2]> {
        Some([[self.m[0][0].to_i64()?, self.m[0][1].to_i64()?], [self.m[1][0].to_i64()?, self.m[1][1].to_i64()?]])
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1])
    }
}

/// 2×2 rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix2 {
    pub m: [[Rational; 2]; 2],
}

impl RatMatrix2 {
    pub fn identity() -> Self {
        IntMatrix2::identity().to_rat()
    }

    pub fn det(&self) -> Rational {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }

    pub fn mul(&self, o: &RatMatrix2) -> RatMatrix2 {
        let e = |i: usize, j: usize| &self.m[i][0] * &o.m[0][j] + &self.m[i][1] * &o.m[1][j];
        RatMatrix2 { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }

    pub fn apply(&self, v: &[Rational; 2]) -> [Rational; 2] {
        [&self.m[0][0] * &v[0] + &self.m[0][1] * &v[1], &self.m[1][0] * &v[0] + &self.m[1][1] * &v[1]]
    }

    pub fn inverse(&self) -> Option<RatMatrix2> {
        let d = self.det();
        if d.is_zero() {
            return None;
        }
        Some(RatMatrix2 { m: [[&self.m[1][1] / &d, -&self.m[0][1] / &d], [-&self.m[1][0] / &d, &self.m[0][0] / &d]] })
    }

    pub fn to_int(&self) -> Option<IntMatrix2> {
        let z = |q: &Rational| q.is_integer().then(|| q.to_integer());
        Some(IntMatrix2 { m: [[z(&self.m[0][0])?, z(&self.m[0][1])?], [z(&self.m[1][0])?, z(&self.m[1][1])?]] })
    }
}

/// Planar affine map `x ↦ Lx + t` with rational linear part and translation.
///
/// The linear part is rational rather than integral so that inverses such
/// as `T⁻¹` stay representable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap2 {
    pub linear: RatMatrix2,
    pub translation: [Rational; 2],
}

impl AffineMap2 {
    pub fn new(linear: RatMatrix2, translation: [Rational; 2]) -> Self {
        AffineMap2 { linear, translation }
    }

    pub fn from_int(linear: &IntMatrix2, translation: [Rational; 2]) -> Self {
        AffineMap2::new(linear.to_rat(), translation)
    }

    pub fn identity() -> Self {
        AffineMap2::new(RatMatrix2::identity(), [Rational::zero(), Rational::zero()])
    }

    /// `self ∘ g`, i.e. `x ↦ self(g(x))`.
    pub fn compose(&self, g: &AffineMap2) -> AffineMap2 {
        let lin = self.linear.mul(&g.linear);
        let t = self.linear.apply(&g.translation);
        AffineMap2::new(lin, [&t[0] + &self.translation[0], &t[1] + &self.translation[1]])
    }

    pub fn inverse(&self) -> Option<AffineMap2> {
        let li = self.linear.inverse()?;
        let t = li.apply(&self.translation);
        Some(AffineMap2::new(li, [-&t[0], -&t[1]]))
    }

    pub fn apply(&self, v: &[Rational; 2]) -> [Rational; 2] {
        let w = self.linear.apply(v);
        [&w[0] + &self.translation[0], &w[1] + &self.translation[1]]
    }

    /// Applies the map to an integer point; `None` when the image is not integral.
    pub fn apply_int(&self, v: (i64, i64)) -> Option<(i64, i64)> {
        let q = |x: i64| Rational::from_integer(BigInt::from(x));
        let w = self.apply(&[q(v.0), q(v.1)]);
        if w[0].is_integer() && w[1].is_integer() {
            Some((w[0].to_integer().to_i64()?, w[1].to_integer().to_i64()?))
        } else {
            None
        }
    }

    /// Integer-coefficient fast form when both parts are integral.
    pub fn to_int_form(&self) -> Option<IntAffine> {
        let lin = self.linear.to_int()?.to_i64()?;
        let t0 = self.translation[0].is_integer().then(|| self.translation[0].to_integer())?;
        let t1 = self.translation[1].is_integer().then(|| self.translation[1].to_integer())?;
        Some(IntAffine { linear: lin, translation: [t0.to_i64()?, t1.to_i64()?] })
    }

    pub fn is_identity(&self) -> bool {
        *self == AffineMap2::identity()
    }

    /// True when every integer point is sent to an integer point.
    pub fn is_integral(&self) -> bool {
        self.linear.to_int().is_some() && self.translation.iter().all(|t| t.is_integer())
    }
}

impl fmt::Display for AffineMap2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = &self.linear.m;
        write!(
            f,
            "x -> [[{},{}],[{},{}]]x + ({},{})",
            fmt_rational(&l[0][0]),
            fmt_rational(&l[0][1]),
            fmt_rational(&l[1][0]),
            fmt_rational(&l[1][1]),
            fmt_rational(&self.translation[0]),
            fmt_rational(&self.translation[1]),
        )
    }
}

/// Affine map with machine-integer coefficients, for hot loops.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntAffine {
    pub linear: [[i64; 2]; 2],
    pub translation: [i64; 2],
}

impl IntAffine {
    #[inline]
    pub fn apply(&self, v: (i64, i64)) -> (i64, i64) {
        let l = &self.linear;
        (l[0][0] * v.0 + l[0][1] * v.1 + self.translation[0], l[1][0] * v.0 + l[1][1] * v.1 + self.translation[1])
    }
}

/// `|det| ≥ 2` check used by profinite towers.
pub fn det_abs_at_least_two(m: &IntMatrix2) -> bool {
    m.det().abs() > BigInt::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn t_map() -> AffineMap2 {
        AffineMap2::from_int(&IntMatrix2::rotation().mul(&IntMatrix2::new(2, 0, 0, 2)), [rat(1, 2), rat(1, 2)])
    }

    fn m(l: u32, e: (i64, i64)) -> AffineMap2 {
        AffineMap2::from_int(&IntMatrix2::rotation().pow(l), [int(e.0), int(e.1)])
    }

    #[test]
    fn t_inverse_is_identity() {
        let t = t_map();
        let ti = t.inverse().unwrap();
        assert!(t.compose(&ti).is_identity());
        assert!(ti.compose(&t).is_identity());
    }

    #[test]
    fn conjugated_m1_sends_origin_to_1_2() {
        let t = t_map();
        let f = t.compose(&m(1, (1, 0))).compose(&t.inverse().unwrap());
        assert_eq!(f.apply_int((0, 0)), Some((1, 2)));
    }

    #[test]
    fn m2_sends_origin_to_1_1() {
        assert_eq!(m(2, (1, 1)).apply_int((0, 0)), Some((1, 1)));
    }

    #[test]
    fn non_integral_image_detected() {
        assert_eq!(t_map().apply_int((0, 0)), None);
        assert!(!t_map().is_integral());
    }

    #[test]
    fn matrix_power_and_det() {
        let phi = IntMatrix2::new(2, 2, 1, 2);
        assert_eq!(phi.det(), BigInt::from(2));
        assert_eq!(phi.pow(2), IntMatrix2::new(6, 8, 4, 6));
        assert_eq!(phi.pow(5).det(), BigInt::from(32));
        assert!(det_abs_at_least_two(&phi));
        assert!(!det_abs_at_least_two(&IntMatrix2::rotation()));
    }

    #[test]
    fn composition_is_associative() {
        let a = t_map();
        let b = m(1, (1, 0));
        let c = m(3, (0, 1));
        assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
    }
}
