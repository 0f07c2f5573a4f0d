use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{IntMatrix2, QuadInt, QuadRational, Rational};
use crate::padic::{MatrixTower, Space};

/// Lattice choices supported by the scheme catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeKind {
    /// `{(n, n) : n ∈ ℤ^dim} ⊂ ℝ^dim × Ẑ_p^dim`.
    Diagonal { p: u64, dim: usize },
    /// `ℤ[√2] ≅ ℤ²` inside `ℝ × (ℝ × ⃖ℤ²(φ))`, `φ = [[2,2],[1,2]]`.
    Sqrt2Phi,
}

/// Names accepted by [`CutProjectScheme::from_name`].
pub const SCHEME_NAMES: &[&str] = &["diagonal-Z-3adic", "diagonal-Z2-2adic", "chair", "sqrt2-phi"];

/// Levels of `φ^i ℤ²` cached by the `sqrt2-phi` scheme.
pub const PHI_CACHE_LEVELS: u32 = 48;

/// A cut-and-project scheme with physical space `ℝ^d` and an internal space
/// made of at most one Euclidean line and one profinite factor.
#[derive(Clone, Debug)]
pub struct CutProjectScheme {
    pub name: String,
    pub kind: LatticeKind,
    pub space: Space,
}

/// Physical coordinates of a lattice point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Physical {
    Int(Vec<i64>),
    Quad(QuadInt),
}

impl PartialOrd for Physical {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Physical {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Physical::Int(a), Physical::Int(b)) => a.cmp(b),
            (Physical::Quad(a), Physical::Quad(b)) => a.cmp(b),
            (Physical::Int(_), Physical::Quad(_)) => Ordering::Less,
            (Physical::Quad(_), Physical::Int(_)) => Ordering::Greater,
        }
    }
}

impl fmt::Display for Physical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Physical::Int(v) => {
                let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", s.join(","))
            }
            Physical::Quad(q) => write!(f, "{q}"),
        }
    }
}

/// Internal coordinates of a lattice point: an optional Euclidean coordinate
/// and a residue in the profinite factor at some level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InternalPoint {
    pub euclid: Option<QuadRational>,
    pub level: u32,
    pub residue: Vec<BigInt>,
}

/// An exact point of the internal space (used for window boundaries and shifts):
/// the profinite part is a rational vector with denominators prime to the
/// relevant primes, i.e. an element of `ℤ_(p)^d ⊂ Ẑ_p^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactInternal {
    pub euclid: Option<QuadRational>,
    pub profinite: Vec<Rational>,
}

/// Contracting-direction coordinate `β` of `(a, b)`: the component along
/// `(0, 1)` in `(a, b) = α(√2, 1) + β(0, 1)`, i.e. `β = b − (a/2)√2`.
pub fn strip_beta(v: (i64, i64)) -> QuadRational {
    QuadRational::new(Rational::from_integer(v.1.into()), Rational::new((-v.0).into(), 2.into()))
}

/// Inverse of [`strip_beta`] when `β` is the image of an integer vector.
pub fn beta_preimage(beta: &QuadRational) -> Option<(i64, i64)> {
    use num_traits::ToPrimitive;
    let a = -(&beta.b * Rational::from_integer(2.into()));
    if !a.is_integer() || !beta.a.is_integer() {
        return None;
    }
    Some((a.to_integer().to_i64()?, beta.a.to_integer().to_i64()?))
}

impl CutProjectScheme {
    pub fn diagonal(p: u64, dim: usize) -> Result<Self> {
        Ok(CutProjectScheme {
            name: format!("diagonal-Z{}-{p}adic", if dim == 1 { String::new() } else { dim.to_string() }),
            kind: LatticeKind::Diagonal { p, dim },
            space: Space::padic(p, dim)?,
        })
    }

    pub fn sqrt2_phi() -> Self {
        let tower = MatrixTower::new(IntMatrix2::new(2, 2, 1, 2), PHI_CACHE_LEVELS).expect("φ has determinant 2");
        CutProjectScheme {
            name: "sqrt2-phi".into(),
            kind: LatticeKind::Sqrt2Phi,
            space: Space::matrix(Arc::new(tower)),
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        let mut s = match name {
            "diagonal-Z-3adic" => CutProjectScheme::diagonal(3, 1)?,
            "diagonal-Z2-2adic" | "chair" => CutProjectScheme::diagonal(2, 2)?,
            "sqrt2-phi" => CutProjectScheme::sqrt2_phi(),
            _ => return Err(Error::UnknownSystem(name.to_string())),
        };
        s.name = name.to_string();
        Ok(s)
    }

    /// Loads `{"lattice": name, "physical_dim": d, "factors": [...]}`; the
    /// stated dimension and factor kinds must agree with the named lattice.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Config {
            lattice: String,
            physical_dim: Option<usize>,
            factors: Option<Vec<FactorConfig>>,
        }
        #[derive(Deserialize, Serialize, PartialEq, Debug)]
        #[serde(tag = "kind", rename_all = "camelCase")]
        enum FactorConfig {
            EuclideanLine,
            Padic { p: u64, dim: usize },
            ProfiniteByMatrix { theta: [[i64; 2]; 2] },
        }
        let cfg: Config = serde_json::from_str(text)?;
        let scheme = CutProjectScheme::from_name(&cfg.lattice)?;
        if let Some(d) = cfg.physical_dim {
            if d != scheme.physical_dim() {
                return Err(Error::DimensionMismatch { expected: scheme.physical_dim(), got: d });
            }
        }
        if let Some(factors) = cfg.factors {
            let expected = match &scheme.kind {
                LatticeKind::Diagonal { p, dim } => vec![FactorConfig::Padic { p: *p, dim: *dim }],
                LatticeKind::Sqrt2Phi => {
                    vec![FactorConfig::EuclideanLine, FactorConfig::ProfiniteByMatrix { theta: [[2, 2], [1, 2]] }]
                }
            };
            if factors != expected {
                return Err(Error::IncompatibleSpaces(format!(
                    "factor list {} does not match lattice {}",
                    serde_json::to_string(&factors)?,
                    cfg.lattice
                )));
            }
        }
        Ok(scheme)
    }

    pub fn physical_dim(&self) -> usize {
        match self.kind {
            LatticeKind::Diagonal { dim, .. } => dim,
            LatticeKind::Sqrt2Phi => 1,
        }
    }

    pub fn lattice_dim(&self) -> usize {
        self.space.dim()
    }

    pub fn has_euclidean_factor(&self) -> bool {
        matches!(self.kind, LatticeKind::Sqrt2Phi)
    }

    /// `π₁` on a lattice point.
    pub fn physical(&self, v: &[i64]) -> Physical {
        match self.kind {
            LatticeKind::Diagonal { .. } => Physical::Int(v.to_vec()),
            LatticeKind::Sqrt2Phi => Physical::Quad(QuadInt::new(v[0], v[1])),
        }
    }

    /// Euclidean internal coordinate, if the scheme has one.
    pub fn euclid(&self, v: &[i64]) -> Option<QuadRational> {
        match self.kind {
            LatticeKind::Diagonal { .. } => None,
            LatticeKind::Sqrt2Phi => Some(strip_beta((v[0], v[1]))),
        }
    }

    /// `π₂` on a lattice point, with the profinite part truncated at `level`.
    pub fn star_map(&self, v: &[i64], level: u32) -> Result<InternalPoint> {
        if v.len() != self.lattice_dim() {
            return Err(Error::DimensionMismatch { expected: self.lattice_dim(), got: v.len() });
        }
        let big: Vec<BigInt> = v.iter().map(|&x| x.into()).collect();
        Ok(InternalPoint { euclid: self.euclid(v), level, residue: self.space.reduce(&big, level)? })
    }

    /// `π₂(L)` meets every coset of the given level (checked on representatives).
    pub fn dense_at_level(&self, level: u32) -> Result<bool> {
        let reps: Vec<Vec<BigInt>> = match &self.space {
            Space::Padic { p, dim } => {
                let m = p.pow(level);
                let count = m.pow(*dim as u32);
                (0..count)
                    .map(|mut i| {
                        (0..*dim)
                            .map(|_| {
                                let d = i % m;
                                i /= m;
                                BigInt::from(d)
                            })
                            .collect()
                    })
                    .collect()
            }
            Space::Matrix(t) => t.hnf(level)?.representatives().into_iter().map(|r| r.to_vec()).collect(),
        };
        let mut seen = std::collections::HashSet::new();
        for r in &reps {
            if &self.space.reduce(r, level)? != r {
                return Ok(false);
            }
            seen.insert(r.clone());
        }
        Ok(BigInt::from(seen.len()) == num_traits::pow(self.space.branching(), level as usize))
    }

    /// Covolume of the lattice in physical × Euclidean-internal coordinates
    /// (`x`, `β`); 1 for purely profinite schemes.
    pub fn covolume(&self) -> QuadRational {
        match self.kind {
            LatticeKind::Diagonal { .. } => QuadRational::one(),
            // (a, b) ↦ (a + b√2, b − a√2/2) has determinant −2
            LatticeKind::Sqrt2Phi => QuadRational::from_rational(Rational::from_integer(2.into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    #[test]
    fn star_map_examples() {
        let s = CutProjectScheme::from_name("diagonal-Z-3adic").unwrap();
        assert_eq!(s.star_map(&[19], 2).unwrap().residue, vec![BigInt::from(1)]);
        assert_eq!(s.star_map(&[0], 5).unwrap().residue, vec![BigInt::from(0)]);
        let q = CutProjectScheme::sqrt2_phi();
        let p = q.star_map(&[2, 0], 3).unwrap();
        assert_eq!(p.euclid, Some(QuadRational::new(int(0), int(-1))));
        // φ³ℤ² = 4ℤ × 2ℤ and φℤ² = 2ℤ × ℤ
        assert_eq!(p.residue, vec![BigInt::from(2), BigInt::from(0)]);
        assert_eq!(q.star_map(&[2, 0], 1).unwrap().residue, vec![BigInt::from(0), BigInt::from(0)]);
    }

    #[test]
    fn beta_round_trip() {
        for v in [(0, 0), (2, 0), (-1, -1), (5, -3)] {
            assert_eq!(beta_preimage(&strip_beta(v)), Some(v));
        }
        assert_eq!(beta_preimage(&QuadRational::new(rat(1, 2), int(0))), None);
    }

    #[test]
    fn density_of_images() {
        for name in SCHEME_NAMES {
            let s = CutProjectScheme::from_name(name).unwrap();
            assert!(s.dense_at_level(3).unwrap(), "{name}");
        }
    }

    #[test]
    fn json_config() {
        let s = CutProjectScheme::from_json(
            r#"{"lattice":"sqrt2-phi","physical_dim":1,"factors":[{"kind":"euclideanLine"},{"kind":"profiniteByMatrix","theta":[[2,2],[1,2]]}]}"#,
        )
        .unwrap();
        assert_eq!(s.kind, LatticeKind::Sqrt2Phi);
        assert!(CutProjectScheme::from_json(r#"{"lattice":"chair","physical_dim":1}"#).is_err());
        assert!(CutProjectScheme::from_json(
            r#"{"lattice":"diagonal-Z-3adic","factors":[{"kind":"padic","p":5,"dim":1}]}"#
        )
        .is_err());
    }
}
