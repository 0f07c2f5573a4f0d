use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{big_pow, Rational};

/// Trial-division primality test; adequate for the small primes used here.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// A p-adic valuation; `Infinite` only for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn valuation_int(a: &BigInt, p: u64) -> Valuation {
    if a.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigInt::from(p);
    let mut a = a.abs();
    let mut v = 0;
    loop {
        let (q, r) = a.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        a = q;
        v += 1;
    }
    Valuation::Finite(v)
}

/// `ν_p(a/b) = ν_p(a) − ν_p(b)`; zero has infinite valuation.
pub fn valuation(a: &Rational, p: u64) -> Result<Valuation> {
    require_prime(p)?;
    if a.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let vn = valuation_int(a.numer(), p).finite().unwrap_or(0);
    let vd = valuation_int(a.denom(), p).finite().unwrap_or(0);
    Ok(Valuation::Finite(vn - vd))
}

/// `p^(−ν_p(y − x))`, and 0 when `x = y`.
pub fn padic_distance(x: &Rational, y: &Rational, p: u64) -> Result<Rational> {
    match valuation(&(y - x), p)? {
        Valuation::Infinite => Ok(Rational::zero()),
        Valuation::Finite(v) => {
            let pk = Rational::from_integer(big_pow(p, v.unsigned_abs() as u32));
            Ok(if v >= 0 { pk.recip() } else { pk })
        }
    }
}

/// `a mod m` in `[0, m)`.
pub(crate) fn modulo(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

/// A truncated element of `Ẑ_p^dim`: a residue vector modulo `p^level`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicTrunc {
    pub p: u64,
    pub dim: usize,
    pub level: u32,
    pub residue: Vec<BigInt>,
}

impl PadicTrunc {
    pub fn from_ints(p: u64, level: u32, v: &[BigInt]) -> Result<Self> {
        require_prime(p)?;
        let m = big_pow(p, level);
        Ok(PadicTrunc { p, dim: v.len(), level, residue: v.iter().map(|x| modulo(x, &m)).collect() })
    }

    /// Image of a rational with denominator prime to `p` (dimension 1).
    pub fn from_rational(p: u64, level: u32, q: &Rational) -> Result<Self> {
        require_prime(p)?;
        let m = big_pow(p, level);
        let d = modulo(q.denom(), &m);
        let inv = mod_inverse(&d, &m)
            .ok_or_else(|| Error::Precondition(format!("denominator of {q} is divisible by {p}")))?;
        Ok(PadicTrunc { p, dim: 1, level, residue: vec![modulo(&(q.numer() * inv), &m)] })
    }

    pub fn modulus(&self) -> BigInt {
        big_pow(self.p, self.level)
    }

    /// Projection to a coarser level.
    pub fn reduce(&self, level: u32) -> Result<Self> {
        if level > self.level {
            return Err(Error::Precondition(format!("cannot reduce level {} to finer level {level}", self.level)));
        }
        let m = big_pow(self.p, level);
        Ok(PadicTrunc {
            p: self.p,
            dim: self.dim,
            level,
            residue: self.residue.iter().map(|x| modulo(x, &m)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.p != other.p || self.level != other.level {
            return Err(Error::IncompatibleSpaces(format!(
                "p={} level={} vs p={} level={}",
                self.p, self.level, other.p, other.level
            )));
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let m = self.modulus();
        Ok(PadicTrunc {
            residue: self.residue.iter().zip(&other.residue).map(|(a, b)| modulo(&(a + b), &m)).collect(),
            ..self.clone()
        })
    }

    /// Base-`p` digits of the first component, least significant first.
    pub fn digits(&self) -> Vec<u64> {
        let p = BigInt::from(self.p);
        let mut x = self.residue.first().cloned().unwrap_or_default();
        (0..self.level)
            .map(|_| {
                let (q, r) = x.div_rem(&p);
                x = q;
                r.to_u64().unwrap_or(0)
            })
            .collect()
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.extended_gcd(m);
    e.gcd.is_one().then(|| modulo(&e.x, m))
}

/// Limit of a Cauchy chain of coset centers `c_k` (k ≥ `first_k`), truncated
/// at `level`.
///
/// The chain must satisfy `c_{k+1} ≡ c_k (mod p^(k−1))`, which is checked for
/// every `k` up to `level + 1`; the returned residue is `c_{level+1} mod p^level`.
pub fn coset_chain_limit<F>(p: u64, first_k: u32, centers: F, level: u32) -> Result<PadicTrunc>
where
    F: Fn(u32) -> BigInt,
{
    require_prime(p)?;
    let last = (level + 1).max(first_k);
    for k in first_k..last + 1 {
        let m = big_pow(p, k.saturating_sub(1));
        let diff = centers(k + 1) - centers(k);
        if !modulo(&diff, &m).is_zero() {
            return Err(Error::NotCauchy {
                level: k,
                detail: format!("c_{} - c_{} = {} is not divisible by {}^{}", k + 1, k, diff, p, k.saturating_sub(1)),
            });
        }
    }
    PadicTrunc::from_ints(p, level, &[centers(last)])
}
