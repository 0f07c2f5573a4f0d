//! Weighted Dirac combs on finite patches: autocorrelation, the 3-adic
//! Fourier module, closed-form amplitudes and Fourier–Bohr estimates.

mod spectrum;

pub use spectrum::{
    chair_patch, chair_spectrum, dyadic_grid, off_module_decay, off_module_samples, spectrum_compare,
    thue_morse_control, AssignmentCheck, ChairSpectrumEntry, DecayReport, SpectrumEntry, SpectrumReport,
    ThueMorseReport, CSV_HEADER, SIGNIFICANT, TOLERANCE,
};

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{self, Entry};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::substitution::{fixed_point_patch, geometric_points, Anchor};

/// Point coordinates of a patch.
#[derive(Clone, Debug, PartialEq)]
pub enum Coords {
    /// Integer points of `ℤ^dim`.
    Lattice(Vec<Vec<i64>>),
    /// Arbitrary real points.
    Real(Vec<Vec<f64>>),
}

/// A finite weighted Dirac comb `Σ h_t δ_t` with its averaging volume.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPointPatch {
    pub dim: usize,
    pub coords: Coords,
    pub weights: Vec<f64>,
    pub radius: f64,
    /// `vol(B_r)`: `2r` in 1D, `πr²` in 2D, or the area of a square patch.
    pub volume: f64,
}

fn sort_by_coord<T: PartialOrd + Clone>(pts: Vec<(Vec<T>, f64)>) -> (Vec<Vec<T>>, Vec<f64>) {
    let mut pts = pts;
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite coordinates"));
    pts.into_iter().unzip()
}

impl WeightedPointPatch {
    /// Integer points with `|t| ≤ r` on the line.
    pub fn lattice_1d(points: &[(i64, f64)], r: i64) -> Self {
        let pts: Vec<(Vec<i64>, f64)> =
            points.iter().filter(|(t, _)| t.abs() <= r).map(|&(t, h)| (vec![t], h)).collect();
        let (c, w) = sort_by_coord(pts);
        WeightedPointPatch { dim: 1, coords: Coords::Lattice(c), weights: w, radius: r as f64, volume: 2.0 * r as f64 }
    }

    /// Real points with `|t| ≤ r` on the line.
    pub fn real_1d(points: &[(f64, f64)], r: f64) -> Self {
        let pts: Vec<(Vec<f64>, f64)> =
            points.iter().filter(|(t, _)| t.abs() <= r).map(|&(t, h)| (vec![t], h)).collect();
        let (c, w) = sort_by_coord(pts);
        WeightedPointPatch { dim: 1, coords: Coords::Real(c), weights: w, radius: r, volume: 2.0 * r }
    }

    /// Planar integer points with `|t| ≤ r` (Euclidean ball).
    pub fn lattice_2d_ball(points: &[((i64, i64), f64)], r: f64) -> Self {
        let pts: Vec<(Vec<i64>, f64)> = points
            .iter()
            .filter(|((x, y), _)| ((x * x + y * y) as f64) <= r * r)
            .map(|&((x, y), h)| (vec![x, y], h))
            .collect();
        let (c, w) = sort_by_coord(pts);
        WeightedPointPatch { dim: 2, coords: Coords::Lattice(c), weights: w, radius: r, volume: PI * r * r }
    }

    /// Planar integer points filling a square of the given area.
    pub fn lattice_2d_square(points: &[((i64, i64), f64)], area: f64) -> Self {
        let pts: Vec<(Vec<i64>, f64)> = points.iter().map(|&((x, y), h)| (vec![x, y], h)).collect();
        let (c, w) = sort_by_coord(pts);
        let radius = area.sqrt() / 2.0;
        WeightedPointPatch { dim: 2, coords: Coords::Lattice(c), weights: w, radius, volume: area }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Multiplies every weight by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut p = self.clone();
        p.weights.iter_mut().for_each(|h| *h *= s);
        p
    }
}

/// Finite-radius autocorrelation coefficients.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AutocorrelationApprox {
    /// Difference vector → coefficient.
    pub coefficients: BTreeMap<Vec<i64>, f64>,
    pub radius: f64,
    pub cutoff: i64,
}

impl AutocorrelationApprox {
    pub fn at(&self, z: &[i64]) -> f64 {
        self.coefficients.get(z).copied().unwrap_or(0.0)
    }
}

/// `γ_r(z) = (1/vol B_r) Σ_{t − s = z} h_t h_s` for `|z| ≤ cutoff` (max norm).
pub fn autocorrelation(patch: &WeightedPointPatch, cutoff: i64) -> Result<AutocorrelationApprox> {
    if cutoff as f64 > 2.0 * patch.radius {
        return Err(Error::Precondition(format!("cutoff {cutoff} exceeds 2r = {}", 2.0 * patch.radius)));
    }
    let Coords::Lattice(pts) = &patch.coords else { return Err(Error::NonLatticePatch) };
    let index: std::collections::HashMap<&[i64], f64> =
        pts.iter().map(Vec::as_slice).zip(patch.weights.iter().copied()).collect();
    let offsets: Vec<Vec<i64>> = match patch.dim {
        1 => (-cutoff..=cutoff).map(|z| vec![z]).collect(),
        2 => (-cutoff..=cutoff).flat_map(|x| (-cutoff..=cutoff).map(move |y| vec![x, y])).collect(),
        d => return Err(Error::DimensionMismatch { expected: 2, got: d }),
    };
    let vol = patch.volume;
    let coefficients: BTreeMap<Vec<i64>, f64> = offsets
        .into_par_iter()
        .map(|z| {
            let mut acc = 0.0;
            for (s, hs) in pts.iter().zip(&patch.weights) {
                let t: Vec<i64> = s.iter().zip(&z).map(|(a, b)| a + b).collect();
                if let Some(ht) = index.get(t.as_slice()) {
                    acc += ht * hs;
                }
            }
            (z, acc / vol)
        })
        .filter(|(_, v)| *v != 0.0)
        .collect();
    Ok(AutocorrelationApprox { coefficients, radius: patch.radius, cutoff })
}

/// A wave number `k = m/3ⁿ` in canonical form: `n = 2`, or `n ≥ 3` with `3 ∤ m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FourierModuleElement {
    pub m: i64,
    pub n: u32,
}

impl FourierModuleElement {
    pub fn new(m: i64, n: u32) -> Option<Self> {
        (n == 2 || (n >= 3 && m % 3 != 0)).then_some(FourierModuleElement { m, n })
    }

    /// Canonical form of a rational with a power-of-3 denominator.
    pub fn from_rational(k: &Rational) -> Option<Self> {
        let mut d = k.denom().clone();
        let mut e = 0u32;
        let three = BigInt::from(3);
        while d.is_multiple_of(&three) {
            d /= &three;
            e += 1;
        }
        if d != BigInt::from(1) {
            return None;
        }
        let n = e.max(2);
        let m: BigInt = k.numer() * num_traits::pow(three, (n - e) as usize);
        use num_traits::ToPrimitive;
        FourierModuleElement::new(m.to_i64()?, n)
    }

    pub fn denominator(&self) -> i64 {
        3i64.pow(self.n)
    }

    pub fn value(&self) -> Rational {
        Rational::new(self.m.into(), self.denominator().into())
    }

    pub fn to_f64(&self) -> f64 {
        self.m as f64 / self.denominator() as f64
    }
}

/// All canonical `m/3ⁿ`, `n ≤ n_max`, with value in `[lo, hi]`, sorted by value.
pub fn fourier_module(n_max: u32, lo: &Rational, hi: &Rational) -> Result<Vec<FourierModuleElement>> {
    if n_max < 2 {
        return Err(Error::Precondition(format!("n_max = {n_max} must be at least 2")));
    }
    let mut out = Vec::new();
    for n in 2..=n_max {
        let q = BigInt::from(3i64.pow(n));
        let mlo = (lo * Rational::from_integer(q.clone())).ceil().to_integer();
        let mhi = (hi * Rational::from_integer(q.clone())).floor().to_integer();
        use num_traits::ToPrimitive;
        let (mlo, mhi) = (mlo.to_i64().unwrap_or(i64::MIN), mhi.to_i64().unwrap_or(i64::MAX));
        out.extend((mlo..=mhi).filter_map(|m| FourierModuleElement::new(m, n)));
    }
    out.sort_by_key(FourierModuleElement::value);
    Ok(out)
}

fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// `(A_a, A_b, A_c)` at `k = m/3ⁿ`:
/// `A_a = 3⁻ⁿ e^{πim/3ⁿ}(e^{−πim/3} + (−1)^m/2)`,
/// `A_b = 3⁻ⁿ e^{−πim/3ⁿ⁻¹}(e^{−πim/3} + (−1)^m/2)`,
/// `A_c = 3⁻ⁿ e^{−πim/3ⁿ⁻¹}(e^{πim/3} + (−1)^m/2)`.
pub fn amplitudes_3adic(e: &FourierModuleElement) -> [Complex64; 3] {
    let m = e.m as f64;
    let q = e.denominator() as f64;
    let sign = if e.m.rem_euclid(2) == 0 { 0.5 } else { -0.5 };
    let minus = cis(-PI * m / 3.0) + sign;
    let plus = cis(PI * m / 3.0) + sign;
    [cis(PI * m / q) * minus / q, cis(-3.0 * PI * m / q) * minus / q, cis(-3.0 * PI * m / q) * plus / q]
}

/// `Σ_x h_x A_x(k)`.
pub fn combined_amplitude(e: &FourierModuleElement, h: &[f64; 3]) -> Complex64 {
    amplitudes_3adic(e).iter().zip(h).map(|(a, w)| a * w).sum()
}

/// `|h_a A_a + h_b A_b + h_c A_c|²`.
pub fn intensity(e: &FourierModuleElement, h: &[f64; 3]) -> f64 {
    combined_amplitude(e, h).norm_sqr()
}

/// `(1/vol) Σ_t h_t e^{−2πi k·t}`, summed in coordinate order.
pub fn fourier_bohr_numeric(patch: &WeightedPointPatch, k: &[f64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let phase = |t: &mut dyn Iterator<Item = f64>| -> f64 { t.zip(k).map(|(x, kk)| x * kk).sum() };
    match &patch.coords {
        Coords::Lattice(pts) => {
            for (t, h) in pts.iter().zip(&patch.weights) {
                acc += cis(-2.0 * PI * phase(&mut t.iter().map(|&x| x as f64))) * h;
            }
        }
        Coords::Real(pts) => {
            for (t, h) in pts.iter().zip(&patch.weights) {
                acc += cis(-2.0 * PI * phase(&mut t.iter().copied())) * h;
            }
        }
    }
    acc / patch.volume
}

/// [`fourier_bohr_numeric`] at `k = m/q` on a 1D lattice patch, with the
/// phase reduced exactly modulo `q`.
pub fn fourier_bohr_rational(patch: &WeightedPointPatch, m: i64, q: i64) -> Result<Complex64> {
    let Coords::Lattice(pts) = &patch.coords else { return Err(Error::NonLatticePatch) };
    if patch.dim != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: patch.dim });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (t, h) in pts.iter().zip(&patch.weights) {
        let r = ((m as i128 * t[0] as i128).rem_euclid(q as i128)) as f64;
        acc += cis(-2.0 * PI * r / q as f64) * h;
    }
    Ok(acc / patch.volume)
}

/// Anchors of one tile type each, on a 1D lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedPatch1D {
    pub letters: Vec<char>,
    pub per_type: Vec<Vec<i64>>,
    pub radius: i64,
}

impl TypedPatch1D {
    /// Right endpoints of the catalog fixed point with integer tile lengths, on `[−r, r]`.
    pub fn from_entry(entry: &Entry, r: i64) -> Result<Self> {
        let lengths = catalog::integer_lengths(&entry.system)
            .ok_or_else(|| Error::Precondition(format!("{} has no integer tile lengths", entry.name)))?;
        let mut n = 1;
        loop {
            let patch = fixed_point_patch(&entry.system, entry.seed, n)?;
            let g = geometric_points(&entry.system, &patch, &lengths, Anchor::RightEnd)?;
            if g.lo <= -r && g.hi >= r {
                let per_type = g
                    .per_letter
                    .iter()
                    .map(|v| {
                        let mut v: Vec<i64> = v.iter().copied().filter(|t| t.abs() <= r).collect();
                        v.sort_unstable();
                        v
                    })
                    .collect();
                return Ok(TypedPatch1D { letters: g.letters.clone(), per_type, radius: r });
            }
            n += 1;
        }
    }

    pub fn limitperiodic3(r: i64) -> Result<Self> {
        TypedPatch1D::from_entry(&catalog::limitperiodic3(), r)
    }

    /// The comb `Σ_x h_x Σ_{t ∈ Λ_x} δ_t`.
    pub fn weighted(&self, h: &[f64]) -> Result<WeightedPointPatch> {
        if h.len() != self.per_type.len() {
            return Err(Error::DimensionMismatch { expected: self.per_type.len(), got: h.len() });
        }
        let pts: Vec<(i64, f64)> =
            self.per_type.iter().zip(h).flat_map(|(v, &w)| v.iter().map(move |&t| (t, w))).collect();
        Ok(WeightedPointPatch::lattice_1d(&pts, self.radius))
    }

    /// Per-type Fourier–Bohr estimates at `k = m/q`, exact phases.
    pub fn per_type_rational(&self, m: i64, q: i64) -> Vec<Complex64> {
        self.per_type
            .iter()
            .map(|v| {
                let pts: Vec<(i64, f64)> = v.iter().map(|&t| (t, 1.0)).collect();
                fourier_bohr_rational(&WeightedPointPatch::lattice_1d(&pts, self.radius), m, q)
                    .expect("1D lattice patch")
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    #[test]
    fn module_enumeration() {
        let v = fourier_module(2, &rat(0, 1), &rat(1, 1)).unwrap();
        assert_eq!(v.len(), 10);
        assert_eq!(v[0], FourierModuleElement { m: 0, n: 2 });
        assert_eq!(v[9], FourierModuleElement { m: 9, n: 2 });
        let v = fourier_module(4, &rat(0, 1), &rat(0, 1)).unwrap();
        assert_eq!(v, vec![FourierModuleElement { m: 0, n: 2 }]);
        assert!(FourierModuleElement::new(3, 3).is_none());
        assert_eq!(FourierModuleElement::from_rational(&rat(3, 27)), Some(FourierModuleElement { m: 1, n: 2 }));
        assert_eq!(FourierModuleElement::from_rational(&rat(1, 2)), None);
        let v = fourier_module(4, &rat(0, 1), &rat(1, 1)).unwrap();
        let values: std::collections::HashSet<_> = v.iter().map(|e| e.value()).collect();
        assert_eq!(values.len(), v.len());
        assert_eq!(v.len(), 82);
        assert!(fourier_module(1, &rat(0, 1), &rat(1, 1)).is_err());
    }

    #[test]
    fn amplitude_values() {
        for a in amplitudes_3adic(&FourierModuleElement { m: 0, n: 2 }) {
            assert!((a - Complex64::new(1.0 / 6.0, 0.0)).norm() < 1e-15);
        }
        for a in amplitudes_3adic(&FourierModuleElement { m: 9, n: 2 }) {
            assert!((a.norm() - 1.0 / 6.0).abs() < 1e-15);
        }
        let a = amplitudes_3adic(&FourierModuleElement { m: 1, n: 3 });
        assert!((a[0].norm() - 3f64.sqrt() / 54.0).abs() < 1e-15);
        let h = [1.0, 1.0, 1.0];
        assert!((intensity(&FourierModuleElement { m: 0, n: 2 }, &h) - 0.25).abs() < 1e-15);
        assert!((intensity(&FourierModuleElement { m: 9, n: 2 }, &h) - 0.25).abs() < 1e-15);
        assert_eq!(intensity(&FourierModuleElement { m: 5, n: 3 }, &[0.0; 3]), 0.0);
    }

    #[test]
    fn crystal_control() {
        let pts: Vec<(i64, f64)> = (-100..=100).map(|t| (t, 1.0)).collect();
        let p = WeightedPointPatch::lattice_1d(&pts, 100);
        let g = autocorrelation(&p, 5).unwrap();
        assert!((g.at(&[0]) - 1.0).abs() < 1e-2);
        assert!((g.at(&[1]) - 1.0).abs() < 2e-2 && g.at(&[1]) < g.at(&[0]));
        assert_eq!(g.at(&[3]), g.at(&[-3]));
        assert!((fourier_bohr_numeric(&p, &[0.0]).re - 1.0).abs() < 1e-2);
        assert!(autocorrelation(&p, 201).is_err());
        let empty = WeightedPointPatch::lattice_1d(&[], 10);
        assert!(autocorrelation(&empty, 3).unwrap().coefficients.is_empty());
        let real = WeightedPointPatch::real_1d(&[(0.5, 1.0)], 10.0);
        assert!(matches!(autocorrelation(&real, 1), Err(Error::NonLatticePatch)));
    }

    #[test]
    fn limitperiodic_density() {
        let tp = TypedPatch1D::limitperiodic3(729).unwrap();
        let p = tp.weighted(&[1.0, 1.0, 1.0]).unwrap();
        let g = autocorrelation(&p, 3).unwrap();
        assert!((g.at(&[0]) - 0.5).abs() < 1e-2);
        let f = fourier_bohr_rational(&p, 0, 1).unwrap();
        assert!((f.re - 0.5).abs() < 1e-2);
        let f2 = fourier_bohr_numeric(&p, &[1.0 / 9.0]);
        let f3 = fourier_bohr_rational(&p, 1, 9).unwrap();
        assert!((f2 - f3).norm() < 1e-9);
    }

    #[test]
    fn two_dimensional_autocorrelation() {
        let pts: Vec<((i64, i64), f64)> = (-10..=10).flat_map(|x| (-10..=10).map(move |y| ((x, y), 1.0))).collect();
        let p = WeightedPointPatch::lattice_2d_ball(&pts, 10.0);
        let g = autocorrelation(&p, 2).unwrap();
        assert!((g.at(&[0, 0]) - p.len() as f64 / (PI * 100.0)).abs() < 1e-12);
        assert_eq!(g.at(&[1, 2]), g.at(&[-1, -2]));
    }
}
