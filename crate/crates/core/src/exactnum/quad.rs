use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{fmt_rational, Rational};

/// Sign of `a + b√2` for rationals or integers, decided without rounding.
fn sign_of<T>(a: &T, b: &T) -> Ordering
where
    T: Signed + Clone + Ord + Mul<Output = T> + Add<Output = T>,
{
    let sa = a.signum();
    let sb = b.signum();
    let zero = T::zero();
    match (a.cmp(&zero), b.cmp(&zero)) {
        (Ordering::Equal, o) | (o, Ordering::Equal) => o,
        (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
        (Ordering::Less, Ordering::Less) => Ordering::Less,
        _ => {
            // opposite signs: compare a² against 2b²
            let a2 = a.clone() * a.clone();
            let b2 = b.clone() * b.clone();
            let two_b2 = b2.clone() + b2;
            match a2.cmp(&two_b2) {
                Ordering::Greater => sa.cmp(&zero),
                Ordering::Less => sb.cmp(&zero),
                Ordering::Equal => unreachable!("√2 is irrational"),
            }
        }
    }
}

/// An element `a + b√2` of `ℤ[√2]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadInt {
    pub a: BigInt,
    pub b: BigInt,
}

impl QuadInt {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        QuadInt { a: a.into(), b: b.into() }
    }

    pub fn from_int(a: impl Into<BigInt>) -> Self {
        QuadInt::new(a, 0)
    }

    pub fn zero() -> Self {
        QuadInt::new(0, 0)
    }

    pub fn one() -> Self {
        QuadInt::new(1, 0)
    }

    pub fn sqrt2() -> Self {
        QuadInt::new(0, 1)
    }

    /// The inflation factor `2 + √2` of `a → aab, b → abab`.
    pub fn lambda() -> Self {
        QuadInt::new(2, 1)
    }

    /// Galois conjugate `a − b√2`.
    pub fn conj(&self) -> Self {
        QuadInt { a: self.a.clone(), b: -&self.b }
    }

    /// Field norm `a² − 2b²`.
    pub fn norm(&self) -> BigInt {
        &self.a * &self.a - BigInt::from(2) * &self.b * &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn signum(&self) -> Ordering {
        sign_of(&self.a, &self.b)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        QuadInt { a: &self.a * k, b: &self.b * k }
    }

    pub fn to_f64(&self) -> f64 {
        quad_to_f64(&self.a, &self.b)
    }

    pub fn to_quad_rational(&self) -> QuadRational {
        QuadRational { a: Rational::from_integer(self.a.clone()), b: Rational::from_integer(self.b.clone()) }
    }

    /// Rational interval of width `< 10^(−precision)` containing `a + b√2`.
    pub fn embed_real(&self, precision: u32) -> RealInterval {
        quad_embed_real(self, precision)
    }

    /// Parses the `a+b*sqrt2` form written by [`fmt::Display`].
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let body = s.strip_suffix("*sqrt2")?;
        // split at the sign that starts the √2 coefficient (not a leading sign)
        let bytes = body.as_bytes();
        let split = (1..bytes.len()).rev().find(|&i| bytes[i] == b'+' || bytes[i] == b'-')?;
        let a: BigInt = body[..split].parse().ok()?;
        let b_str = &body[split..];
        let b: BigInt = b_str.trim_start_matches('+').parse().ok()?;
        Some(QuadInt { a, b })
    }
}

fn quad_to_f64(a: &BigInt, b: &BigInt) -> f64 {
    let af: f64 = num_traits::ToPrimitive::to_f64(a).unwrap_or(f64::NAN);
    let bf: f64 = num_traits::ToPrimitive::to_f64(b).unwrap_or(f64::NAN);
    af + bf * std::f64::consts::SQRT_2
}

impl PartialOrd for QuadInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadInt {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.sign() == Sign::Minus {
            write!(f, "{}-{}*sqrt2", self.a, -&self.b)
        } else {
            write!(f, "{}+{}*sqrt2", self.a, self.b)
        }
    }
}

macro_rules! quad_binops {
    ($t:ty) => {
        impl Add<&$t> for &$t {
            type Output = $t;
            fn add(self, o: &$t) -> $t {
                <$t>::from_parts(&self.a + &o.a, &self.b + &o.b)
            }
        }
        impl Sub<&$t> for &$t {
            type Output = $t;
            fn sub(self, o: &$t) -> $t {
                <$t>::from_parts(&self.a - &o.a, &self.b - &o.b)
            }
        }
        impl Mul<&$t> for &$t {
            type Output = $t;
            fn mul(self, o: &$t) -> $t {
                let two_bd = &self.b * &o.b;
                <$t>::from_parts(&self.a * &o.a + &two_bd + &two_bd, &self.a * &o.b + &self.b * &o.a)
            }
        }
        impl Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                <$t>::from_parts(-&self.a, -&self.b)
            }
        }
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                &self + &o
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                &self - &o
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                &self * &o
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

impl QuadInt {
    fn from_parts(a: BigInt, b: BigInt) -> Self {
        QuadInt { a, b }
    }
}

quad_binops!(QuadInt);

impl num_traits::Zero for QuadInt {
    fn zero() -> Self {
        QuadInt::zero()
    }
    fn is_zero(&self) -> bool {
        QuadInt::is_zero(self)
    }
}

/// An element `a + b√2` of `ℚ(√2)` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadRational {
    pub a: Rational,
    pub b: Rational,
}

impl QuadRational {
    pub fn new(a: Rational, b: Rational) -> Self {
        QuadRational { a, b }
    }

    fn from_parts(a: Rational, b: Rational) -> Self {
        QuadRational { a, b }
    }

    pub fn zero() -> Self {
        QuadRational::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        QuadRational::new(Rational::one(), Rational::zero())
    }

    pub fn from_rational(a: Rational) -> Self {
        QuadRational::new(a, Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        QuadRational::new(self.a.clone(), -&self.b)
    }

    pub fn norm(&self) -> Rational {
        &self.a * &self.a - Rational::from_integer(2.into()) * &self.b * &self.b
    }

    pub fn signum(&self) -> Ordering {
        sign_of(&self.a, &self.b)
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        Some(QuadRational::new(&self.a / &n, -&self.b / &n))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self * &i)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        QuadRational::new(&self.a * k, &self.b * k)
    }

    pub fn to_f64(&self) -> f64 {
        let af = num_traits::ToPrimitive::to_f64(&self.a).unwrap_or(f64::NAN);
        let bf = num_traits::ToPrimitive::to_f64(&self.b).unwrap_or(f64::NAN);
        af + bf * std::f64::consts::SQRT_2
    }

    /// `Some` when both coefficients are integers.
    pub fn to_quad_int(&self) -> Option<QuadInt> {
        if self.a.is_integer() && self.b.is_integer() {
            Some(QuadInt::new(self.a.to_integer(), self.b.to_integer()))
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }
}

quad_binops!(QuadRational);

impl PartialOrd for QuadRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadRational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl fmt::Display for QuadRational {
    /// `p/q + r/s*sqrt2`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt2", fmt_rational(&self.a), fmt_rational(&self.b))
    }
}

impl From<&QuadInt> for QuadRational {
    fn from(q: &QuadInt) -> Self {
        q.to_quad_rational()
    }
}

/// Closed rational interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RealInterval {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint_f64(&self) -> f64 {
        let m = (&self.lo + &self.hi) / Rational::from_integer(2.into());
        num_traits::ToPrimitive::to_f64(&m).unwrap_or(f64::NAN)
    }
}

/// Encloses `a + b√2` in a rational interval of width `10^(−precision−1)`.
///
/// `b√2` is bracketed with an integer square root of `2b²·S²`; when `b = 0`
/// the interval is degenerate.
pub fn quad_embed_real(x: &QuadInt, precision: u32) -> RealInterval {
    let a = Rational::from_integer(x.a.clone());
    if x.b.is_zero() {
        return RealInterval { lo: a.clone(), hi: a };
    }
    let scale = num_traits::pow(BigInt::from(10), precision as usize + 1);
    let radicand = BigInt::from(2) * &x.b * &x.b * &scale * &scale;
    let q = radicand.sqrt();
    let exact = &q * &q == radicand;
    debug_assert!(!exact, "2b² is never a perfect square for b ≠ 0");
    let lo_mag = Rational::new(q.clone(), scale.clone());
    let hi_mag = Rational::new(q + 1, scale);
    if x.b.is_positive() {
        RealInterval { lo: &a + lo_mag, hi: a + hi_mag }
    } else {
        RealInterval { lo: &a - hi_mag, hi: a - lo_mag }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    #[test]
    fn embed_rational_case_is_exact() {
        let iv = quad_embed_real(&QuadInt::new(1, 0), 20);
        assert_eq!(iv.lo, rat(1, 1));
        assert_eq!(iv.hi, rat(1, 1));
    }

    #[test]
    fn embed_sqrt2_within_precision() {
        let iv = quad_embed_real(&QuadInt::sqrt2(), 12);
        assert!(iv.width() < rat(1, 1_000_000_000_000));
        assert!((iv.midpoint_f64() - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn embed_lambda() {
        let iv = quad_embed_real(&QuadInt::lambda(), 15);
        assert!((iv.midpoint_f64() - 3.414_213_562_373_095).abs() < 1e-12);
        // enclosure really brackets: lo² < 2 < hi² shifted by 2
        let two = rat(2, 1);
        let lo = &iv.lo - &two;
        let hi = &iv.hi - &two;
        assert!(&lo * &lo < two && &hi * &hi > two);
    }

    #[test]
    fn embed_negative_coefficient() {
        let iv = quad_embed_real(&QuadInt::new(3, -2), 10);
        let exact = 3.0 - 2.0 * std::f64::consts::SQRT_2;
        assert!(iv.midpoint_f64() - exact < 1e-10);
        assert!(iv.lo < iv.hi);
    }

    #[test]
    fn sign_near_cancellation() {
        // 99 − 70√2 ≈ 0.00505 > 0, 140 − 99√2 ≈ −0.0071 < 0
        assert_eq!(QuadInt::new(99, -70).signum(), Ordering::Greater);
        assert_eq!(QuadInt::new(140, -99).signum(), Ordering::Less);
        assert_eq!(QuadInt::new(-99, 70).signum(), Ordering::Less);
    }

    #[test]
    fn lambda_times_conj_is_norm() {
        let l = QuadInt::lambda();
        assert_eq!(&l * &l.conj(), QuadInt::from_int(2));
        assert_eq!(l.norm(), BigInt::from(2));
    }

    #[test]
    fn quad_rational_inverse() {
        let x = QuadRational::new(rat(2, 1), rat(1, 1));
        let y = x.inv().unwrap();
        assert_eq!(&x * &y, QuadRational::one());
        assert_eq!(y, QuadRational::new(rat(1, 1), rat(-1, 2)));
        assert!(QuadRational::zero().inv().is_none());
    }

    #[test]
    fn display_and_parse_round_trip() {
        for (a, b) in [(0, 0), (-1, -1), (2, 1), (-7, 3), (5, -12)] {
            let q = QuadInt::new(a, b);
            assert_eq!(QuadInt::parse(&q.to_string()), Some(q));
        }
        assert_eq!(QuadInt::new(-1, -2).to_string(), "-1-2*sqrt2");
        assert_eq!(QuadRational::new(rat(-1, 1), rat(-1, 2)).to_string(), "-1 + -1/2*sqrt2");
    }
}
