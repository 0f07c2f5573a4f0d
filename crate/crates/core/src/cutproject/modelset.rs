use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::scheme::{beta_preimage, CutProjectScheme, ExactInternal, LatticeKind, Physical};
use super::window::Window;
use crate::error::{Error, Result};
use crate::exactnum::{QuadInt, QuadRational, Rational};

/// Physical range of a model-set query.
#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum QueryRange {
    /// Integer box `lo ≤ x ≤ hi` (component-wise) for diagonal schemes.
    Box { lo: Vec<i64>, hi: Vec<i64> },
    /// Closed interval of the physical line for the `√2` scheme.
    Line { lo: QuadRational, hi: QuadRational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSetQuery {
    pub range: QueryRange,
    /// Truncation level used when reporting internal coordinates.
    pub truncation: u32,
}

impl ModelSetQuery {
    pub fn interval(lo: i64, hi: i64) -> Self {
        ModelSetQuery { range: QueryRange::Box { lo: vec![lo], hi: vec![hi] }, truncation: 8 }
    }

    pub fn square(lo: (i64, i64), hi: (i64, i64)) -> Self {
        ModelSetQuery { range: QueryRange::Box { lo: vec![lo.0, lo.1], hi: vec![hi.0, hi.1] }, truncation: 8 }
    }
}

/// A lattice point selected by at least one window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelPoint {
    pub lattice: Vec<i64>,
    pub physical: Physical,
    /// Indices of the windows containing the point.
    pub labels: Vec<usize>,
}

fn floor_f64(x: f64) -> i64 {
    x.floor() as i64
}

/// Lattice points whose physical image lies in `range` and whose Euclidean
/// internal coordinate lies in `[blo, bhi]` (when the scheme has one).
pub fn lattice_candidates(
    scheme: &CutProjectScheme,
    range: &QueryRange,
    beta_hull: Option<&(QuadRational, QuadRational)>,
) -> Result<Vec<Vec<i64>>> {
    match (&scheme.kind, range) {
        (LatticeKind::Diagonal { dim, .. }, QueryRange::Box { lo, hi }) => {
            if lo.len() != *dim || hi.len() != *dim {
                return Err(Error::DimensionMismatch { expected: *dim, got: lo.len() });
            }
            let mut out: Vec<Vec<i64>> = vec![vec![]];
            for d in 0..*dim {
                out = out
                    .into_iter()
                    .flat_map(|prefix| {
                        (lo[d]..=hi[d]).map(move |x| {
                            let mut v = prefix.clone();
                            v.push(x);
                            v
                        })
                    })
                    .collect();
            }
            Ok(out)
        }
        (LatticeKind::Sqrt2Phi, QueryRange::Line { lo, hi }) => {
            let Some((blo, bhi)) = beta_hull else {
                return Err(Error::Precondition("√2 scheme queries need a bounded window".into()));
            };
            let s2 = std::f64::consts::SQRT_2;
            // conjugate coordinate x' = a − b√2 = −√2·β
            let (clo, chi) = (-s2 * bhi.to_f64(), -s2 * blo.to_f64());
            let (xlo, xhi) = (lo.to_f64(), hi.to_f64());
            let mut out = Vec::new();
            for a in floor_f64((xlo + clo) / 2.0) - 1..=floor_f64((xhi + chi) / 2.0) + 2 {
                let af = a as f64;
                let b_lo = ((xlo - af) / s2).max((af - chi) / s2);
                let b_hi = ((xhi - af) / s2).min((af - clo) / s2);
                if b_lo > b_hi + 2.0 {
                    continue;
                }
                for b in floor_f64(b_lo) - 1..=floor_f64(b_hi) + 2 {
                    let x = QuadInt::new(a, b).to_quad_rational();
                    if x < *lo || x > *hi {
                        continue;
                    }
                    let beta = super::scheme::strip_beta((a, b));
                    if beta < *blo || beta > *bhi {
                        continue;
                    }
                    out.push(vec![a, b]);
                }
            }
            Ok(out)
        }
        _ => Err(Error::Precondition("query range does not fit the scheme".into())),
    }
}

/// `Λ(Ω) = {π₁(x) : x ∈ L, π₂(x) ∈ Ω}` restricted to the query range, for
/// several windows at once. Output is sorted by physical coordinate.
pub fn model_set_points(
    scheme: &CutProjectScheme,
    windows: &[Window],
    query: &ModelSetQuery,
) -> Result<Vec<ModelPoint>> {
    for w in windows {
        if w.space != scheme.space {
            return Err(Error::IncompatibleSpaces("window lives in a different space".into()));
        }
    }
    let hull = if scheme.has_euclidean_factor() {
        let mut h: Option<(QuadRational, QuadRational)> = None;
        for w in windows {
            if let Some((l, u)) = w.euclidean_hull()? {
                h = Some(match h {
                    None => (l, u),
                    Some((a, b)) => (a.min(l), b.max(u)),
                });
            }
        }
        match h {
            Some(h) => Some(h),
            None => return Ok(Vec::new()),
        }
    } else {
        None
    };
    let candidates = lattice_candidates(scheme, &query.range, hull.as_ref())?;
    let indices: Vec<_> = windows.iter().map(Window::index).collect();
    let mut out: Vec<ModelPoint> = candidates
        .par_iter()
        .map(|v| -> Result<Option<ModelPoint>> {
            let big: Vec<BigInt> = v.iter().map(|&x| x.into()).collect();
            let euclid = scheme.euclid(v);
            let mut labels = Vec::new();
            for (i, idx) in indices.iter().enumerate() {
                if idx.contains(&big, euclid.as_ref())? {
                    labels.push(i);
                }
            }
            Ok((!labels.is_empty()).then(|| ModelPoint { lattice: v.clone(), physical: scheme.physical(v), labels }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    out.sort_by(|a, b| a.physical.cmp(&b.physical));
    Ok(out)
}

/// `π₁` is injective on the given lattice points.
pub fn injective_on(scheme: &CutProjectScheme, points: &[Vec<i64>]) -> bool {
    let distinct: HashSet<&Vec<i64>> = points.iter().collect();
    let images: HashSet<Physical> = distinct.iter().map(|v| scheme.physical(v)).collect();
    images.len() == distinct.len()
}

/// Density of `Λ(Ω)`: window measure over lattice covolume.
pub fn density(scheme: &CutProjectScheme, window: &Window) -> Result<QuadRational> {
    if window.space != scheme.space {
        return Err(Error::IncompatibleSpaces("window lives in a different space".into()));
    }
    window.measure().div(&scheme.covolume()).ok_or_else(|| Error::Precondition("zero covolume".into()))
}

/// Outcome of a regularity test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regularity {
    Regular,
    /// A boundary point coincides with the image of this lattice point.
    Singular {
        offender: Vec<i64>,
    },
}

fn shifted(b: &ExactInternal, shift: Option<&ExactInternal>) -> Result<ExactInternal> {
    let Some(c) = shift else { return Ok(b.clone()) };
    if c.profinite.len() != b.profinite.len() {
        return Err(Error::DimensionMismatch { expected: b.profinite.len(), got: c.profinite.len() });
    }
    let euclid = match (&b.euclid, &c.euclid) {
        (Some(x), Some(y)) => Some(x + y),
        (x, None) => x.clone(),
        (None, Some(_)) => return Err(Error::Precondition("shift has a Euclidean part, boundary does not".into())),
    };
    Ok(ExactInternal { euclid, profinite: b.profinite.iter().zip(&c.profinite).map(|(x, y)| x + y).collect() })
}

/// The lattice point whose internal image equals `x`, if any.
pub fn lattice_preimage(scheme: &CutProjectScheme, x: &ExactInternal) -> Result<Option<Vec<i64>>> {
    if x.profinite.len() != scheme.lattice_dim() {
        return Err(Error::DimensionMismatch { expected: scheme.lattice_dim(), got: x.profinite.len() });
    }
    let ints: Option<Vec<i64>> =
        x.profinite.iter().map(|q: &Rational| if q.is_integer() { q.to_integer().to_i64() } else { None }).collect();
    let Some(ints) = ints else { return Ok(None) };
    match scheme.kind {
        LatticeKind::Diagonal { .. } => Ok(Some(ints)),
        LatticeKind::Sqrt2Phi => {
            let Some(beta) = &x.euclid else {
                return Err(Error::Precondition("√2 scheme points need a Euclidean part".into()));
            };
            Ok(beta_preimage(beta).filter(|&(a, b)| ints == [a, b]).map(|(a, b)| vec![a, b]))
        }
    }
}

/// Regular iff no (shifted) boundary point is the image of a lattice point.
pub fn regularity_check(
    scheme: &CutProjectScheme,
    boundary: &[ExactInternal],
    shift: Option<&ExactInternal>,
) -> Result<Regularity> {
    for b in boundary {
        if let Some(offender) = lattice_preimage(scheme, &shifted(b, shift)?)? {
            return Ok(Regularity::Singular { offender });
        }
    }
    Ok(Regularity::Regular)
}

/// Index and value of the first candidate shift giving a regular window.
pub fn shift_search(
    scheme: &CutProjectScheme,
    boundary: &[ExactInternal],
    candidates: &[ExactInternal],
) -> Result<(usize, ExactInternal)> {
    for (i, c) in candidates.iter().enumerate() {
        if regularity_check(scheme, boundary, Some(c))? == Regularity::Regular {
            return Ok((i, c.clone()));
        }
    }
    Err(Error::ShiftExhausted)
}
