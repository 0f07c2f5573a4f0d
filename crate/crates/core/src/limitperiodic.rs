//! The limit-periodic sequence of `a → ab, b → abc, c → abcc`: closed-form
//! 3-adic windows for the right endpoints of each tile type, and their
//! cross-checks against the substitution fixed point.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::catalog;
use crate::cutproject::{model_set_points, CutProjectScheme, ModelSetQuery, Window};
use crate::error::{Error, Result};
use crate::exactnum::{big_pow, fmt_rational, rat, Rational};
use crate::padic::{coset_chain_limit, Coset, CosetUnion, PadicTrunc, Space};
use crate::substitution::{fixed_point_patch, geometric_points, Anchor, GeometricPointSets};

pub const LETTERS: [char; 3] = ['a', 'b', 'c'];

/// Center of the level-`k` type-a coset: `1 + 3 + ⋯ + 3^(k−2)`.
pub fn center_a(k: u32) -> BigInt {
    (big_pow(3, k - 1) - BigInt::from(1)) / 2
}

/// Center of the level-`k` type-b coset: `2 + 1 + 3 + ⋯ + 3^(k−2)`.
pub fn center_b(k: u32) -> BigInt {
    (big_pow(3, k - 1) + BigInt::from(3)) / 2
}

/// Center of the level-`k` type-c coset for `k ≥ 3`: `−3 − 9 − ⋯ − 3^(k−2)`.
pub fn center_c(k: u32) -> BigInt {
    -(big_pow(3, k - 1) - BigInt::from(3)) / 2
}

/// The three windows truncated at level `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowFamily3 {
    pub truncation: u32,
    pub omega: [CosetUnion; 3],
}

impl WindowFamily3 {
    pub fn get(&self, letter: char) -> &CosetUnion {
        &self.omega[LETTERS.iter().position(|&c| c == letter).expect("letter a, b or c")]
    }

    pub fn windows(&self) -> Vec<Window> {
        self.omega.iter().map(Window::from_union).collect()
    }
}

pub fn space() -> Space {
    Space::padic(3, 1).expect("3 is prime")
}

fn union_of(centers: impl Iterator<Item = (BigInt, u32)>) -> Result<CosetUnion> {
    let s = space();
    let cosets = centers.map(|(c, k)| Coset::new(&s, &[c], k)).collect::<Result<Vec<_>>>()?;
    CosetUnion::from_cosets(s, cosets)?.normalize()
}

/// Windows `Ω_a, Ω_b, Ω_c` built from cosets of level `2..=K`.
pub fn windows_abc(k: u32) -> Result<WindowFamily3> {
    if k < 2 {
        return Err(Error::Precondition(format!("truncation K = {k} must be at least 2")));
    }
    let a = union_of((2..=k).map(|j| (center_a(j), j)))?;
    let b = union_of((2..=k).map(|j| (center_b(j), j)))?;
    let c = union_of(std::iter::once((BigInt::zero(), 2)).chain((3..=k).map(|j| (center_c(j), j))))?;
    Ok(WindowFamily3 { truncation: k, omega: [a, b, c] })
}

/// `μ(Ω_a^K) = μ(Ω_b^K) = (1/6)(1 − 3^−(K−1))`.
pub fn measure_ab_closed(k: u32) -> Rational {
    rat(1, 6) * (Rational::from_integer(1.into()) - Rational::new(1.into(), big_pow(3, k - 1)))
}

/// `μ(Ω_c^K) = 1/9 + (1/18)(1 − 3^−(K−2))`.
pub fn measure_c_closed(k: u32) -> Rational {
    rat(1, 9) + rat(1, 18) * (Rational::from_integer(1.into()) - Rational::new(1.into(), big_pow(3, k - 2)))
}

/// Measure missing from `1/2` at truncation `K`: `3^−(K−1)/2`.
pub fn tail(k: u32) -> Rational {
    Rational::new(1.into(), big_pow(3, k - 1) * 2)
}

/// Exact limit of `μ(K) = L − C·3^−K` from two consecutive truncations.
pub fn geometric_limit(mu_k: &Rational, mu_k1: &Rational) -> Rational {
    (mu_k1 * Rational::from_integer(3.into()) - mu_k) / Rational::from_integer(2.into())
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureReport {
    pub truncation: u32,
    /// Exact truncated measures as `p/q`.
    pub truncated: [String; 3],
    pub closed_form_matches: bool,
    pub limits: [String; 3],
    pub limit_sum: String,
    pub weighted_covering_limit: String,
    pub sum_plus_tail: String,
    pub ok: bool,
}

/// Exact measures, limits and the covering identity `1·μ_a + 2·μ_b + 3·μ_c → 1`.
pub fn measure_report(k: u32) -> Result<MeasureReport> {
    let w = windows_abc(k)?;
    let w1 = windows_abc(k + 1)?;
    let m: Vec<Rational> = w.omega.iter().map(|u| u.measure()).collect::<Result<_>>()?;
    let m1: Vec<Rational> = w1.omega.iter().map(|u| u.measure()).collect::<Result<_>>()?;
    let closed = [measure_ab_closed(k), measure_ab_closed(k), measure_c_closed(k)];
    let closed_form_matches = m.iter().zip(&closed).all(|(a, b)| a == b);
    let limits: Vec<Rational> = m.iter().zip(&m1).map(|(a, b)| geometric_limit(a, b)).collect();
    let limit_sum: Rational = limits.iter().sum();
    let covering =
        &limits[0] + &limits[1] * Rational::from_integer(2.into()) + &limits[2] * Rational::from_integer(3.into());
    let sum_plus_tail: Rational = m.iter().sum::<Rational>() + tail(k);
    let sixth = rat(1, 6);
    let ok = closed_form_matches
        && limits.iter().all(|l| *l == sixth)
        && limit_sum == rat(1, 2)
        && covering == rat(1, 1)
        && sum_plus_tail == rat(1, 2);
    let s = |v: &[Rational]| [fmt_rational(&v[0]), fmt_rational(&v[1]), fmt_rational(&v[2])];
    Ok(MeasureReport {
        truncation: k,
        truncated: s(&m),
        closed_form_matches,
        limits: s(&limits),
        limit_sum: fmt_rational(&limit_sum),
        weighted_covering_limit: fmt_rational(&covering),
        sum_plus_tail: fmt_rational(&sum_plus_tail),
        ok,
    })
}

/// Largest radius on which the level-`K` windows cannot misclassify.
///
/// An anchor is missed only if it lies in a coset of level `> K`; the
/// nearest such anchors are `center_c(K+1) = −(3^K − 3)/2`,
/// `center_a(K+1) = (3^K − 1)/2` and `center_b(K+1) = (3^K + 3)/2`, so every
/// `R < (3^K − 3)/2` is safe.
pub fn safe_radius(k: u32) -> i64 {
    let r: BigInt = (big_pow(3, k) - BigInt::from(5)) / BigInt::from(2);
    r.to_i64().unwrap_or(i64::MAX)
}

/// Right endpoints of the two-sided fixed point over `[−R, R]`.
pub fn substitution_anchors(r: i64) -> Result<GeometricPointSets<i64>> {
    let e = catalog::limitperiodic3();
    let mut n = 1;
    while 3i64.pow(n) < r {
        n += 1;
    }
    let patch = fixed_point_patch(&e.system, e.seed, n)?;
    geometric_points(&e.system, &patch, &[1, 2, 3], Anchor::RightEnd)
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeComparison {
    pub letter: char,
    pub substitution_count: usize,
    pub model_set_count: usize,
    /// Anchors of this type not produced by the window.
    pub missing: Vec<i64>,
    /// Window points that are not anchors of this type.
    pub extra: Vec<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub truncation: u32,
    pub radius: i64,
    pub safe_radius: i64,
    pub within_safe_radius: bool,
    pub types: Vec<TypeComparison>,
    pub mismatches: usize,
    pub first_mismatch: Option<i64>,
    pub ok: bool,
}

/// Compares `Λ(Ω_x^K) ∩ [−R, R]` with the substitution anchors of type `x`.
pub fn verify_against_substitution(k: u32, r: i64) -> Result<VerifyReport> {
    if r < 0 {
        return Err(Error::Precondition(format!("radius {r} must be non-negative")));
    }
    let fam = windows_abc(k)?;
    let scheme = CutProjectScheme::from_name("diagonal-Z-3adic")?;
    let pts = model_set_points(&scheme, &fam.windows(), &ModelSetQuery::interval(-r, r))?;
    let anchors = substitution_anchors(r)?;
    let mut types = Vec::new();
    let mut all_bad: Vec<i64> = Vec::new();
    for (i, &letter) in LETTERS.iter().enumerate() {
        let expected = anchors.in_range(letter, &-r, &r);
        let got: Vec<i64> = pts.iter().filter(|p| p.labels.contains(&i)).map(|p| p.lattice[0]).collect();
        let es: std::collections::BTreeSet<i64> = expected.iter().copied().collect();
        let gs: std::collections::BTreeSet<i64> = got.iter().copied().collect();
        let missing: Vec<i64> = es.difference(&gs).copied().collect();
        let extra: Vec<i64> = gs.difference(&es).copied().collect();
        all_bad.extend(&missing);
        all_bad.extend(&extra);
        types.push(TypeComparison { letter, substitution_count: es.len(), model_set_count: gs.len(), missing, extra });
    }
    let first_mismatch = all_bad.iter().copied().min_by_key(|x| (x.abs(), *x));
    let mismatches = all_bad.len();
    Ok(VerifyReport {
        truncation: k,
        radius: r,
        safe_radius: safe_radius(k),
        within_safe_radius: r <= safe_radius(k),
        types,
        mismatches,
        first_mismatch,
        ok: mismatches == 0,
    })
}

/// Right-endpoint images under one tile formation step:
/// `(source letter, target letter, offset)` for `t ↦ 3t + offset`.
pub const TILE_FORMATION: [(char, char, i64); 9] = [
    ('a', 'a', -2),
    ('a', 'b', 0),
    ('b', 'a', -5),
    ('b', 'b', -3),
    ('b', 'c', 0),
    ('c', 'a', -8),
    ('c', 'b', -6),
    ('c', 'c', -3),
    ('c', 'c', 0),
];

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub truncation: u32,
    pub family_disjoint: bool,
    pub images_inside_claimed: bool,
    pub images_disjoint: bool,
    pub violations: Vec<String>,
    pub ok: bool,
}

/// Symbolic check that the tile formation maps send each coset of `family`
/// into the claimed windows `claimed`, with pairwise disjoint images.
pub fn invariance_check(family: &WindowFamily3, claimed: &WindowFamily3) -> Result<InvarianceReport> {
    let s = space();
    let mut violations = Vec::new();
    let mut family_disjoint = true;
    for i in 0..3 {
        for j in i + 1..3 {
            if !family.omega[i].is_disjoint(&family.omega[j])? {
                family_disjoint = false;
                violations.push(format!("windows {} and {} overlap", LETTERS[i], LETTERS[j]));
            }
        }
    }
    let mut images: Vec<(char, Coset, String)> = Vec::new();
    for &(src, tgt, off) in &TILE_FORMATION {
        for c in &family.get(src).cosets {
            let center = &c.center[0] * 3 + off;
            let img = Coset::new(&s, &[center], c.level + 1)?;
            let label = format!("3({})+{off} from {src}", c.display(&s));
            images.push((tgt, img, label));
        }
    }
    let mut images_inside_claimed = true;
    for (tgt, img, label) in &images {
        let single = CosetUnion::from_cosets(s.clone(), vec![img.clone()])?;
        if !single.is_subset_of(claimed.get(*tgt))? {
            images_inside_claimed = false;
            violations.push(format!("{} = {label} is not inside window {tgt}", img.display(&s)));
        }
    }
    let mut images_disjoint = true;
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            let (a, b) = (&images[i].1, &images[j].1);
            if a.is_subset_of(b, &s)? || b.is_subset_of(a, &s)? {
                images_disjoint = false;
                violations.push(format!("images {} and {} overlap", images[i].2, images[j].2));
            }
        }
    }
    Ok(InvarianceReport {
        truncation: family.truncation,
        family_disjoint,
        images_inside_claimed,
        images_disjoint,
        ok: violations.is_empty(),
        violations,
    })
}

/// [`invariance_check`] of `windows_abc(K)` against `windows_abc(K+1)`.
pub fn invariance_under_inflation(k: u32) -> Result<bool> {
    Ok(invariance_check(&windows_abc(k)?, &windows_abc(k + 1)?)?.ok)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryReport {
    pub letter: char,
    /// Boundary points as rationals in `ℤ_(3) ⊂ Ẑ₃`.
    pub points: Vec<String>,
    pub chain_limit_verified: bool,
    pub contains_integer: bool,
}

/// Boundary points of the untruncated windows: the limits of the coset
/// center chains (`−1/2`, `3/2`, `3/2`), confirmed to `level` digits.
pub fn boundary_points(level: u32) -> Result<Vec<(char, Vec<Rational>, BoundaryReport)>> {
    type Chain = fn(u32) -> BigInt;
    let chains: [(char, u32, Chain, Rational); 3] =
        [('a', 2, center_a, rat(-1, 2)), ('b', 2, center_b, rat(3, 2)), ('c', 3, center_c, rat(3, 2))];
    let mut out = Vec::new();
    for (letter, first, chain, q) in chains {
        let lim = coset_chain_limit(3, first, chain, level)?;
        let verified = lim == PadicTrunc::from_rational(3, level, &q)?;
        let report = BoundaryReport {
            letter,
            points: vec![fmt_rational(&q)],
            chain_limit_verified: verified,
            contains_integer: q.is_integer(),
        };
        out.push((letter, vec![q], report));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cosets(u: &CosetUnion) -> Vec<(i64, u32)> {
        u.cosets.iter().map(|c| (c.center[0].to_i64().unwrap(), c.level)).collect()
    }

    #[test]
    fn small_truncations() {
        let w = windows_abc(2).unwrap();
        assert_eq!(cosets(&w.omega[0]), vec![(1, 2)]);
        assert_eq!(cosets(&w.omega[1]), vec![(3, 2)]);
        assert_eq!(cosets(&w.omega[2]), vec![(0, 2)]);
        assert!(windows_abc(3).unwrap().omega[0].cosets.iter().any(|c| c.level == 3 && c.center[0] == 4.into()));
        // −12 + 81 = 69
        assert!(windows_abc(4).unwrap().omega[2].cosets.iter().any(|c| c.level == 4 && c.center[0] == 69.into()));
        assert!(windows_abc(1).is_err());
    }

    #[test]
    fn membership_examples() {
        let w = windows_abc(6).unwrap();
        assert!(w.omega[0].contains_i64(&[19]).unwrap());
        assert!(w.omega[2].contains_i64(&[24]).unwrap());
        assert!(!w.omega[1].contains_i64(&[1]).unwrap());
    }

    #[test]
    fn measures() {
        assert_eq!(windows_abc(2).unwrap().omega[0].measure().unwrap(), rat(1, 9));
        for k in 2..9 {
            let r = measure_report(k).unwrap();
            assert!(r.ok, "{r:?}");
        }
    }

    #[test]
    fn verification_small() {
        let r = verify_against_substitution(6, 100).unwrap();
        assert!(r.ok, "{r:?}");
        let r = verify_against_substitution(2, 2).unwrap();
        assert!(r.ok);
        assert_eq!(r.types[0].model_set_count, 1);
        assert_eq!(r.types[1].model_set_count, 0);
    }

    #[test]
    fn safe_radius_is_sharp() {
        for k in 2..7 {
            let r = safe_radius(k);
            assert!(verify_against_substitution(k, r).unwrap().ok, "K={k}");
            let bad = verify_against_substitution(k, r + 1).unwrap();
            assert_eq!(bad.first_mismatch.map(i64::abs), Some(r + 1), "K={k}");
        }
    }

    #[test]
    fn invariance() {
        for k in 2..7 {
            assert!(invariance_under_inflation(k).unwrap(), "K={k}");
        }
        let mut bad = windows_abc(5).unwrap();
        bad.omega[0] =
            union_of(std::iter::once((BigInt::from(2), 2)).chain((3..=5).map(|j| (center_a(j), j)))).unwrap();
        let r = invariance_check(&bad, &windows_abc(6).unwrap()).unwrap();
        assert!(!r.ok);
    }

    #[test]
    fn boundaries() {
        for (_, pts, rep) in boundary_points(12).unwrap() {
            assert!(rep.chain_limit_verified);
            assert!(!rep.contains_integer);
            assert!(pts.len() <= 2);
        }
    }
}
