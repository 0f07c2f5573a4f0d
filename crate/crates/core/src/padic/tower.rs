use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::IntMatrix2;

use super::valuation::modulo;

/// Column Hermite normal form of a full-rank sublattice of `ℤ²`:
/// basis `(a, b), (0, d)` with `a, d > 0` and `0 ≤ b < d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hnf {
    pub a: BigInt,
    pub b: BigInt,
    pub d: BigInt,
}

impl Hnf {
    /// HNF of the lattice spanned by the columns of `m`.
    pub fn of(m: &IntMatrix2) -> Result<Hnf> {
        if m.det().is_zero() {
            return Err(Error::DegenerateMatrix(m.to_string()));
        }
        let mut c1 = [m.m[0][0].clone(), m.m[1][0].clone()];
        let mut c2 = [m.m[0][1].clone(), m.m[1][1].clone()];
        while !c2[0].is_zero() {
            let q = c1[0].div_floor(&c2[0]);
            c1 = [&c1[0] - &q * &c2[0], &c1[1] - &q * &c2[1]];
            std::mem::swap(&mut c1, &mut c2);
        }
        if c1[0].is_negative() {
            c1 = [-&c1[0], -&c1[1]];
        }
        if c2[1].is_negative() {
            c2 = [-&c2[0], -&c2[1]];
        }
        let d = c2[1].clone();
        Ok(Hnf { b: modulo(&c1[1], &d), a: c1[0].clone(), d })
    }

    /// Index of the sublattice.
    pub fn index(&self) -> BigInt {
        &self.a * &self.d
    }

    /// Canonical representative in `[0, a) × [0, d)`.
    pub fn reduce(&self, v: &[BigInt; 2]) -> [BigInt; 2] {
        let q = v[0].div_floor(&self.a);
        let x = &v[0] - &q * &self.a;
        let y = modulo(&(&v[1] - &q * &self.b), &self.d);
        [x, y]
    }

    /// All canonical representatives, in lexicographic order.
    pub fn representatives(&self) -> Vec<[BigInt; 2]> {
        let mut out = Vec::new();
        let mut x = BigInt::zero();
        while x < self.a {
            let mut y = BigInt::zero();
            while y < self.d {
                out.push([x.clone(), y.clone()]);
                y += 1;
            }
            x += 1;
        }
        out
    }
}

/// The tower `ℤ² ⊃ θℤ² ⊃ θ²ℤ² ⊃ …` with Hermite forms cached per level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatrixTower {
    pub theta: IntMatrix2,
    hnfs: Vec<Hnf>,
}

impl MatrixTower {
    /// Builds the tower with cached levels `0..=max_level`.
    pub fn new(theta: IntMatrix2, max_level: u32) -> Result<Self> {
        if !crate::exactnum::affine_det_abs_at_least_two(&theta) {
            return Err(Error::DegenerateMatrix(theta.to_string()));
        }
        let mut hnfs = Vec::with_capacity(max_level as usize + 1);
        let mut p = IntMatrix2::identity();
        for _ in 0..=max_level {
            hnfs.push(Hnf::of(&p)?);
            p = theta.mul(&p);
        }
        Ok(MatrixTower { theta, hnfs })
    }

    pub fn max_cached(&self) -> u32 {
        self.hnfs.len() as u32 - 1
    }

    pub fn det_abs(&self) -> BigInt {
        self.theta.det().abs()
    }

    /// Hermite form of `θ^level ℤ²`.
    pub fn hnf(&self, level: u32) -> Result<Hnf> {
        match self.hnfs.get(level as usize) {
            Some(h) => Ok(h.clone()),
            None => Hnf::of(&self.theta.pow(level)),
        }
    }

    pub fn reduce(&self, v: &[BigInt; 2], level: u32) -> Result<[BigInt; 2]> {
        match self.hnfs.get(level as usize) {
            Some(h) => Ok(h.reduce(v)),
            None => Ok(self.hnf(level)?.reduce(v)),
        }
    }

    /// Machine-integer Hermite data `(a, b, d)` for levels that fit in `i64`.
    pub fn hnf_i64(&self, level: u32) -> Option<(i64, i64, i64)> {
        use num_traits::ToPrimitive;
        let h = self.hnfs.get(level as usize)?;
        Some((h.a.to_i64()?, h.b.to_i64()?, h.d.to_i64()?))
    }
}

/// Reduction of an integer vector with cached `(a, b, d)` Hermite data.
#[inline]
pub fn reduce_i64(h: (i64, i64, i64), v: (i64, i64)) -> (i64, i64) {
    let (a, b, d) = h;
    let q = v.0.div_euclid(a);
    (v.0 - q * a, (v.1 - q * b).rem_euclid(d))
}

/// A truncated element of the profinite completion of `ℤ²` along `θ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProfiniteByMatrix {
    pub theta: IntMatrix2,
    pub level: u32,
    pub residue: [BigInt; 2],
}

impl ProfiniteByMatrix {
    pub fn from_vec(tower: &MatrixTower, level: u32, v: &[BigInt; 2]) -> Result<Self> {
        Ok(ProfiniteByMatrix { theta: tower.theta.clone(), level, residue: tower.reduce(v, level)? })
    }

    pub fn reduce(&self, tower: &MatrixTower, level: u32) -> Result<Self> {
        if level > self.level {
            return Err(Error::Precondition(format!("cannot reduce level {} to finer level {level}", self.level)));
        }
        Self::from_vec(tower, level, &self.residue)
    }

    pub fn add(&self, other: &Self, tower: &MatrixTower) -> Result<Self> {
        if self.level != other.level || self.theta != other.theta {
            return Err(Error::IncompatibleSpaces("profinite levels differ".into()));
        }
        let s = [&self.residue[0] + &other.residue[0], &self.residue[1] + &other.residue[1]];
        Self::from_vec(tower, self.level, &s)
    }
}
