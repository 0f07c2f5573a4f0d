use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;
use serde::Serialize;

use crate::exactnum::{QuadInt, QuadRational, Rational};

/// `a + b√2` with machine-integer coefficients; ordering is exact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Z2 {
    pub a: i64,
    pub b: i64,
}

impl Z2 {
    pub const fn new(a: i64, b: i64) -> Self {
        Z2 { a, b }
    }

    pub const fn int(a: i64) -> Self {
        Z2 { a, b: 0 }
    }

    /// Galois conjugate `a − b√2`.
    pub fn conj(self) -> Self {
        Z2 { a: self.a, b: -self.b }
    }

    pub fn signum(self) -> Ordering {
        let (a, b) = (self.a as i128, self.b as i128);
        match (a.cmp(&0), b.cmp(&0)) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (sa, sb) if sa == sb => sa,
            (sa, _) => match (a * a).cmp(&(2 * b * b)) {
                Ordering::Greater => sa,
                Ordering::Less => sa.reverse(),
                Ordering::Equal => Ordering::Equal,
            },
        }
    }

    pub fn to_f64(self) -> f64 {
        self.a as f64 + self.b as f64 * std::f64::consts::SQRT_2
    }

    pub fn to_quad(self) -> QuadInt {
        QuadInt::new(self.a, self.b)
    }

    pub fn to_quad_rational(self) -> QuadRational {
        QuadRational::new(Rational::from_integer(self.a.into()), Rational::from_integer(self.b.into()))
    }

    pub fn from_quad(q: &QuadInt) -> Option<Self> {
        use num_traits::ToPrimitive;
        Some(Z2 { a: q.a.to_i64()?, b: q.b.to_i64()? })
    }
}

impl Ord for Z2 {
    fn cmp(&self, other: &Self) -> Ordering {
        (*self - *other).signum()
    }
}

impl PartialOrd for Z2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Z2 {
    type Output = Z2;
    fn add(self, o: Z2) -> Z2 {
        Z2 { a: self.a + o.a, b: self.b + o.b }
    }
}

impl Sub for Z2 {
    type Output = Z2;
    fn sub(self, o: Z2) -> Z2 {
        Z2 { a: self.a - o.a, b: self.b - o.b }
    }
}

impl Neg for Z2 {
    type Output = Z2;
    fn neg(self) -> Z2 {
        Z2 { a: -self.a, b: -self.b }
    }
}

impl Mul for Z2 {
    type Output = Z2;
    fn mul(self, o: Z2) -> Z2 {
        Z2 { a: self.a * o.a + 2 * self.b * o.b, b: self.a * o.b + self.b * o.a }
    }
}

impl Zero for Z2 {
    fn zero() -> Self {
        Z2 { a: 0, b: 0 }
    }
    fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }
}

impl fmt::Display for Z2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_quad(), f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn order_matches_exact(a in -10_000i64..10_000, b in -10_000i64..10_000, c in -10_000i64..10_000, d in -10_000i64..10_000) {
            let x = Z2::new(a, b);
            let y = Z2::new(c, d);
            prop_assert_eq!(x.cmp(&y), x.to_quad().cmp(&y.to_quad()));
            prop_assert_eq!((x * y).to_quad(), x.to_quad() * y.to_quad());
        }
    }
}
