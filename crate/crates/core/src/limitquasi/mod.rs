//! The limit-quasiperiodic sequence `a → aab, b → abab` with tile lengths
//! `1` and `√2`: exact generation, lift to `ℤ²`, strip tests, the iterated
//! function system for its windows, and the inner/outer sandwich.

mod ifs;
mod z2;

pub use ifs::{
    hausdorff_distance, ifs_windows, outer_hausdorff, sandwich_check, Branch, QCell, QuasiWindows, SandwichReport,
    BRANCHES, LAMBDA_CONJ, MAX_DEPTH,
};
pub use z2::Z2;

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::cutproject::strip_beta;
use crate::error::{Error, Result};
use crate::exactnum::{IntMatrix2, QuadInt, QuadRational, Rational};
use crate::output::F17;
use crate::substitution::{Anchor, GeometricPointSets};

/// Inflation factor `λ = 2 + √2`.
pub const LAMBDA: Z2 = Z2::new(2, 1);

/// Largest supported number of inflation steps.
pub const MAX_STEPS: u32 = 14;

/// `φ`, its eigenvalues and eigenvector data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiData {
    pub phi: IntMatrix2,
    pub eigenvalues: [QuadInt; 2],
    /// `(√2, 1)`, for the eigenvalue `2 + √2`.
    pub eigenvector: [QuadInt; 2],
    /// `(0, 1)`, the direction along which the strip is measured.
    pub complement: [i64; 2],
}

impl PhiData {
    pub fn new() -> Self {
        PhiData {
            phi: IntMatrix2::new(2, 2, 1, 2),
            eigenvalues: [QuadInt::new(2, 1), QuadInt::new(2, -1)],
            eigenvector: [QuadInt::new(0, 1), QuadInt::new(1, 0)],
            complement: [0, 1],
        }
    }

    /// `φ v = λ v` exactly and `det φ = 2`.
    pub fn check(&self) -> bool {
        let m = &self.phi.m;
        let v = &self.eigenvector;
        let q = |x: &num_bigint::BigInt| QuadInt::from_int(x.clone());
        let img = [&q(&m[0][0]) * &v[0] + &q(&m[0][1]) * &v[1], &q(&m[1][0]) * &v[0] + &q(&m[1][1]) * &v[1]];
        let lam = &self.eigenvalues[0];
        img[0] == lam * &v[0] && img[1] == lam * &v[1] && self.phi.det() == 2.into()
    }
}

impl Default for PhiData {
    fn default() -> Self {
        PhiData::new()
    }
}

/// `a + b√2 ↦ (a, b)`.
pub fn lift_to_lattice(x: &QuadInt) -> [num_bigint::BigInt; 2] {
    [x.a.clone(), x.b.clone()]
}

/// Fast [`lift_to_lattice`].
pub fn lift(x: Z2) -> (i64, i64) {
    (x.a, x.b)
}

/// `φ (a, b)ᵀ`.
pub fn phi_apply(v: (i64, i64)) -> (i64, i64) {
    (2 * v.0 + 2 * v.1, v.0 + 2 * v.1)
}

/// Two-sided fixed point from the seed `b|a` after `n` inflations, by the
/// recursion relations for `Λ_a` and `Λ_b`; anchors are left endpoints.
pub fn generate_sequence_exact(n: u32) -> Result<GeometricPointSets<Z2>> {
    if n > MAX_STEPS {
        return Err(Error::Precondition(format!("{n} inflation steps exceed {MAX_STEPS}")));
    }
    let mut a = vec![Z2::int(0)];
    let mut b = vec![Z2::new(0, -1)];
    for _ in 0..n {
        let mut na = Vec::with_capacity(2 * (a.len() + b.len()));
        let mut nb = Vec::with_capacity(a.len() + 2 * b.len());
        for br in &BRANCHES {
            let src = if br.source == 0 { &a } else { &b };
            let dst = if br.target == 0 { &mut na } else { &mut nb };
            dst.extend(src.iter().map(|&t| LAMBDA * t + br.offset));
        }
        let mut all: Vec<(i64, i64)> = na.iter().chain(&nb).map(|z| (z.a, z.b)).collect();
        all.sort_unstable();
        if let Some(w) = all.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Overlap(Z2::new(w[0].0, w[0].1).to_string()));
        }
        a = na;
        b = nb;
    }
    a.sort_unstable();
    b.sort_unstable();
    let scale = (0..n).fold(Z2::int(1), |acc, _| acc * LAMBDA);
    Ok(GeometricPointSets {
        letters: vec!['a', 'b'],
        per_letter: vec![a, b],
        anchor: Anchor::LeftEnd,
        lo: scale * Z2::new(0, -1),
        hi: scale,
    })
}

/// Which strip in the `β` coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StripKind {
    /// `β ∈ [−1−√2, 0]`.
    Full,
    /// `β ∈ (−1−√2, −√2/2)`: offset `−√2/2`, direction `−1−√2/2`.
    InnerPrinted,
    /// `β ∈ (−1−√2/2, −√2/2)`, the substrip on which every lattice point is a lift.
    Inner,
}

/// A strip parallel to the expanding eigenline, stored both in `β` and in
/// the conjugate coordinate `x' = a − b√2 = −√2 β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strip {
    pub kind: StripKind,
    pub beta_lo: QuadRational,
    pub beta_hi: QuadRational,
    pub open: bool,
    /// `x'` bounds (`x'` decreases as `β` increases).
    pub conj_lo: Z2,
    pub conj_hi: Z2,
}

/// `β = −x'/√2` for `x' = p + q√2`.
pub fn conj_to_beta(c: Z2) -> QuadRational {
    QuadRational::new(Rational::from_integer((-c.b).into()), Rational::new((-c.a).into(), 2.into()))
}

impl Strip {
    pub fn new(kind: StripKind) -> Self {
        let (conj_lo, conj_hi, open) = match kind {
            StripKind::Full => (Z2::int(0), Z2::new(2, 1), false),
            StripKind::InnerPrinted => (Z2::int(1), Z2::new(2, 1), true),
            StripKind::Inner => (Z2::int(1), Z2::new(1, 1), true),
        };
        Strip { kind, beta_lo: conj_to_beta(conj_hi), beta_hi: conj_to_beta(conj_lo), open, conj_lo, conj_hi }
    }

    pub fn full() -> Self {
        Strip::new(StripKind::Full)
    }

    pub fn inner() -> Self {
        Strip::new(StripKind::Inner)
    }

    pub fn inner_printed() -> Self {
        Strip::new(StripKind::InnerPrinted)
    }

    pub fn contains_conj(&self, c: Z2) -> bool {
        if self.open {
            self.conj_lo < c && c < self.conj_hi
        } else {
            self.conj_lo <= c && c <= self.conj_hi
        }
    }

    /// Membership of a lattice point by its `β` coordinate.
    pub fn contains(&self, v: (i64, i64)) -> bool {
        self.contains_conj(Z2::new(v.0, -v.1))
    }

    /// Membership tested on [`strip_beta`] directly.
    pub fn contains_beta(&self, beta: &QuadRational) -> bool {
        if self.open {
            &self.beta_lo < beta && beta < &self.beta_hi
        } else {
            &self.beta_lo <= beta && beta <= &self.beta_hi
        }
    }

    pub fn is_subset_of(&self, other: &Strip) -> bool {
        other.conj_lo <= self.conj_lo && self.conj_hi <= other.conj_hi
    }

    /// `[β_lo, β_hi]` with exact `p/q + r/s*sqrt2` endpoints.
    pub fn describe(&self) -> String {
        let (l, r) = if self.open { ("(", ")") } else { ("[", "]") };
        format!("{l}{}, {}{r}", self.beta_lo, self.beta_hi)
    }
}

/// Lattice points `(a, b)` with `xlo ≤ a + b√2 ≤ xhi` and `clo ≤ a − b√2 ≤ chi`.
pub fn lattice_in_box(xlo: Z2, xhi: Z2, clo: Z2, chi: Z2) -> Vec<Z2> {
    let s2 = std::f64::consts::SQRT_2;
    let bmin = ((xlo.to_f64() - chi.to_f64()) / (2.0 * s2)).floor() as i64 - 1;
    let bmax = ((xhi.to_f64() - clo.to_f64()) / (2.0 * s2)).ceil() as i64 + 1;
    let mut out = Vec::new();
    for b in bmin..=bmax {
        let bs = b as f64 * s2;
        let alo = (xlo.to_f64() - bs).max(clo.to_f64() + bs).floor() as i64 - 1;
        let ahi = (xhi.to_f64() - bs).min(chi.to_f64() + bs).ceil() as i64 + 1;
        for a in alo..=ahi {
            let x = Z2::new(a, b);
            let c = x.conj();
            if xlo <= x && x <= xhi && clo <= c && c <= chi {
                out.push(x);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Whether a set of lattice points is connected by unit horizontal and vertical steps.
pub fn is_connected(points: &HashSet<(i64, i64)>) -> bool {
    let Some(&start) = points.iter().next() else { return true };
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((x, y)) = queue.pop_front() {
        for n in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
            if points.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == points.len()
}

#[derive(Clone, Debug, Serialize)]
pub struct StripCheck {
    pub strip: String,
    pub lattice_points_inside: usize,
    /// Lattice points strictly inside the strip that are not lifts.
    pub not_lifted: usize,
    pub examples: Vec<(i64, i64)>,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConnectivityReport {
    pub steps: u32,
    pub sequence_points: usize,
    pub physical_range: (String, String),
    /// All lifts have `β` in the full strip.
    pub lifts_in_full_strip: bool,
    pub printed_inner: StripCheck,
    pub inner: StripCheck,
    /// Largest open `β` interval inside the full strip free of non-lifted lattice points.
    pub maximal_valid_substrip: (String, String),
    pub inner_inside_maximal: bool,
    pub connected: bool,
    /// Removing one lifted inner-strip point disconnects the path.
    pub removal_disconnects: bool,
}

fn strip_check(strip: &Strip, lattice: &[Z2], lifts: &HashSet<(i64, i64)>) -> StripCheck {
    let inside: Vec<Z2> = lattice.iter().copied().filter(|x| strip.contains_conj(x.conj())).collect();
    let missing: Vec<(i64, i64)> = inside.iter().map(|x| lift(*x)).filter(|v| !lifts.contains(v)).collect();
    StripCheck {
        strip: strip.describe(),
        lattice_points_inside: inside.len(),
        not_lifted: missing.len(),
        examples: missing.iter().take(5).copied().collect(),
        holds: missing.is_empty(),
    }
}

/// Strip and connectivity checks on the lifts of `generate_sequence_exact(n)`.
pub fn inner_strip_connectivity(n: u32) -> Result<ConnectivityReport> {
    if n > 12 {
        return Err(Error::Precondition(format!("{n} steps exceed 12")));
    }
    let seq = generate_sequence_exact(n)?;
    let pts: Vec<Z2> = seq.per_letter.concat();
    let lifts: HashSet<(i64, i64)> = pts.iter().map(|&x| lift(x)).collect();
    let xmin = *pts.iter().min().unwrap();
    let xmax = *pts.iter().max().unwrap();
    let full = Strip::full();
    let lifts_in_full_strip = pts.iter().all(|&x| full.contains(lift(x)));
    let lattice = lattice_in_box(xmin, xmax, full.conj_lo, full.conj_hi);
    let printed_inner = strip_check(&Strip::inner_printed(), &lattice, &lifts);
    let inner = strip_check(&Strip::inner(), &lattice, &lifts);

    let mut blocked: Vec<Z2> = lattice.iter().filter(|x| !lifts.contains(&lift(**x))).map(|x| x.conj()).collect();
    blocked.push(full.conj_lo);
    blocked.push(full.conj_hi);
    blocked.sort_unstable();
    blocked.dedup();
    let (glo, ghi) = blocked.windows(2).map(|w| (w[0], w[1])).max_by(|p, q| (p.1 - p.0).cmp(&(q.1 - q.0))).unwrap();
    let inner_inside_maximal = glo <= Strip::inner().conj_lo && Strip::inner().conj_hi <= ghi;

    let connected = is_connected(&lifts);
    let removal_disconnects = {
        let inner_strip = Strip::inner();
        let mut sorted = pts.clone();
        sorted.sort_unstable();
        let interior = if sorted.len() > 2 { &sorted[1..sorted.len() - 1] } else { &[][..] };
        let victim = interior
            .iter()
            .cycle()
            .skip(interior.len() / 2)
            .take(interior.len())
            .find(|x| inner_strip.contains(lift(**x)));
        match victim {
            Some(v) => {
                let mut reduced = lifts.clone();
                reduced.remove(&lift(*v));
                !is_connected(&reduced)
            }
            None => false,
        }
    };
    Ok(ConnectivityReport {
        steps: n,
        sequence_points: pts.len(),
        physical_range: (xmin.to_string(), xmax.to_string()),
        lifts_in_full_strip,
        printed_inner,
        inner,
        maximal_valid_substrip: (conj_to_beta(ghi).to_string(), conj_to_beta(glo).to_string()),
        inner_inside_maximal,
        connected,
        removal_disconnects,
    })
}

/// `λΛ ∩ [lo, hi] ⊆ Λ_a` on the generated patch.
pub fn lambda_image_in_a(seq: &GeometricPointSets<Z2>) -> bool {
    let a: HashSet<Z2> = seq.of('a').iter().copied().collect();
    let lo = *seq.per_letter.iter().flatten().min().unwrap();
    let hi = *seq.per_letter.iter().flatten().max().unwrap();
    seq.per_letter.iter().flatten().map(|&t| LAMBDA * t).filter(|x| lo <= *x && *x <= hi).all(|x| a.contains(&x))
}

/// `lift(λx) = φ lift(x)` on every generated point.
pub fn lift_commutes(seq: &GeometricPointSets<Z2>) -> bool {
    seq.per_letter.iter().flatten().all(|&x| lift(LAMBDA * x) == phi_apply(lift(x)))
}

#[derive(Clone, Debug, Serialize)]
pub struct FrequencyReport {
    pub steps: u32,
    pub freq_a: F17,
    pub freq_b: F17,
    pub expected: (String, String),
    pub max_error: F17,
    /// `|Λ ∩ [0, λⁿ)| / λⁿ`.
    pub density: F17,
    pub expected_density: String,
    pub density_error: F17,
}

/// Letter frequencies against `(2 − √2, √2 − 1)` and point density against `(2 + √2)/4`.
pub fn frequency_report(n: u32) -> Result<FrequencyReport> {
    let seq = generate_sequence_exact(n)?;
    let (na, nb) = (seq.of('a').len() as f64, seq.of('b').len() as f64);
    let s2 = std::f64::consts::SQRT_2;
    let (fa, fb) = (na / (na + nb), nb / (na + nb));
    let err = (fa - (2.0 - s2)).abs().max((fb - (s2 - 1.0)).abs());
    let zero = Z2::int(0);
    let hi = seq.hi;
    let count = seq.per_letter.iter().flatten().filter(|&&x| zero <= x && x < hi).count();
    let density = count as f64 / hi.to_f64();
    let expected_density = (2.0 + s2) / 4.0;
    let quad = |a: i64, b: i64| QuadRational::new(Rational::from_integer(a.into()), Rational::from_integer(b.into()));
    let exp_density = QuadRational::new(Rational::new(1.into(), 2.into()), Rational::new(1.into(), 4.into()));
    Ok(FrequencyReport {
        steps: n,
        freq_a: F17(fa),
        freq_b: F17(fb),
        expected: (quad(2, -1).to_string(), quad(-1, 1).to_string()),
        max_error: F17(err),
        density: F17(density),
        expected_density: exp_density.to_string(),
        density_error: F17((density - expected_density).abs()),
    })
}

/// `β` of a lattice point, re-exported for reports.
pub fn beta(v: (i64, i64)) -> QuadRational {
    strip_beta(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::substitution::{fixed_point_patch, geometric_points};

    #[test]
    fn phi_data() {
        assert!(PhiData::new().check());
        assert_eq!(phi_apply((1, 0)), (2, 1));
        assert_eq!(lift(LAMBDA * Z2::int(1)), (2, 1));
        assert_eq!(lift(Z2::new(-1, -1)), (-1, -1));
        assert_eq!(lift_to_lattice(&QuadInt::new(2, 0)), [2.into(), 0.into()]);
    }

    #[test]
    fn seed_and_first_step() {
        let s = generate_sequence_exact(0).unwrap();
        assert_eq!(s.of('a'), &[Z2::int(0)]);
        assert_eq!(s.of('b'), &[Z2::new(0, -1)]);
        let s = generate_sequence_exact(1).unwrap();
        for x in [Z2::int(0), Z2::int(1), Z2::new(-1, -1), Z2::new(-2, -2)] {
            assert!(s.of('a').contains(&x), "{x}");
        }
        for x in [Z2::int(2), Z2::new(0, -1), Z2::new(-1, -2)] {
            assert!(s.of('b').contains(&x), "{x}");
        }
        assert!(generate_sequence_exact(15).is_err());
    }

    #[test]
    fn matches_substitution_layout() {
        let e = catalog::limitquasi();
        let n = 6;
        let patch = fixed_point_patch(&e.system, e.seed, n).unwrap();
        let g = geometric_points(&e.system, &patch, &[Z2::int(1), Z2::new(0, 1)], Anchor::LeftEnd).unwrap();
        let s = generate_sequence_exact(n).unwrap();
        for letter in ['a', 'b'] {
            let mut x = g.of(letter).to_vec();
            x.sort_unstable();
            assert_eq!(x, s.of(letter), "{letter}");
        }
    }

    #[test]
    fn strips() {
        assert_eq!(strip_beta((2, 0)), conj_to_beta(Z2::new(2, 0)));
        assert!(Strip::full().contains((2, 0)));
        assert!(Strip::full().contains((0, 0)));
        assert!(Strip::inner().is_subset_of(&Strip::full()));
        assert!(Strip::inner_printed().is_subset_of(&Strip::full()));
        let q = |a: i64, b: i64, c: i64| {
            QuadRational::new(Rational::from_integer(a.into()), Rational::new(b.into(), c.into()))
        };
        assert_eq!(Strip::full().beta_lo, q(-1, -1, 1));
        assert_eq!(Strip::inner().beta_lo, q(-1, -1, 2));
        assert_eq!(Strip::inner().beta_hi, q(0, -1, 2));
        assert_eq!(Strip::inner_printed().beta_lo, q(-1, -1, 1));
        for v in [(0, 0), (2, 0), (3, 1), (-5, -4)] {
            let s = Strip::full();
            assert_eq!(s.contains(v), s.contains_beta(&strip_beta(v)));
        }
    }

    #[test]
    fn lifts_stay_in_full_strip() {
        let s = generate_sequence_exact(6).unwrap();
        assert!(s.per_letter.iter().flatten().all(|&x| Strip::full().contains(lift(x))));
        assert!(lift_commutes(&s));
        assert!(lambda_image_in_a(&s));
    }

    #[test]
    fn connectivity() {
        let r = inner_strip_connectivity(0).unwrap();
        assert!(r.connected);
        let r = inner_strip_connectivity(6).unwrap();
        assert!(r.connected && r.lifts_in_full_strip);
        assert!(r.inner.holds, "{r:?}");
        assert!(r.inner_inside_maximal);
        assert!(r.removal_disconnects);
    }

    #[test]
    fn frequencies() {
        let r = frequency_report(10).unwrap();
        assert!(r.max_error.0 < 1e-2 && r.density_error.0 < 1e-2, "{r:?}");
    }
}
