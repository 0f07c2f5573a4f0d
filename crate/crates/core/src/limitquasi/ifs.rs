use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::{conj_to_beta, generate_sequence_exact, lattice_in_box, lift, phi_apply, Strip, Z2};
use crate::cutproject::{Cell, CutProjectScheme, Interval, Window};
use crate::error::{Error, Result};
use crate::exactnum::IntMatrix2;
use crate::output::F17;
use crate::padic::{reduce_i64, Coset, MatrixTower};

/// `λ' = 2 − √2`, the contraction of every branch on the conjugate line.
pub const LAMBDA_CONJ: Z2 = Z2::new(2, -1);

/// Largest supported IFS depth.
pub const MAX_DEPTH: u32 = 20;

/// One union branch `Λ_target ⊇ offset + λΛ_source` (0 = a, 1 = b).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Branch {
    pub target: usize,
    pub source: usize,
    pub offset: Z2,
}

/// The seven branches: four for `Λ_a`, three for `Λ_b`.
pub const BRANCHES: [Branch; 7] = [
    Branch { target: 0, source: 0, offset: Z2::new(0, 0) },
    Branch { target: 0, source: 0, offset: Z2::new(1, 0) },
    Branch { target: 0, source: 1, offset: Z2::new(0, 0) },
    Branch { target: 0, source: 1, offset: Z2::new(1, 1) },
    Branch { target: 1, source: 0, offset: Z2::new(2, 0) },
    Branch { target: 1, source: 1, offset: Z2::new(1, 0) },
    Branch { target: 1, source: 1, offset: Z2::new(2, 1) },
];

impl Branch {
    /// Conjugate-line part `x' ↦ λ'x' + offset'`.
    pub fn euclid(&self, x: Z2) -> Z2 {
        LAMBDA_CONJ * x + self.offset.conj()
    }

    /// Profinite part `r ↦ φr + lift(offset)`.
    pub fn profinite(&self, r: (i64, i64)) -> (i64, i64) {
        let p = phi_apply(r);
        (p.0 + self.offset.a, p.1 + self.offset.b)
    }
}

/// One window cell: an interval of the conjugate coordinate times the
/// coset `residue + φ^level ℤ²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct QCell {
    pub letter: usize,
    pub level: u32,
    pub residue: (i64, i64),
    pub lo: Z2,
    pub hi: Z2,
}

type Key = (usize, u32, (i64, i64));
type CellMap = BTreeMap<Key, Vec<(Z2, Z2)>>;

fn hnfs(max: u32) -> Vec<(i64, i64, i64)> {
    let tower = MatrixTower::new(IntMatrix2::new(2, 2, 1, 2), max + 1).expect("det φ = 2");
    (0..=max + 1).map(|l| tower.hnf_i64(l).expect("small level")).collect()
}

/// Merges overlapping intervals; closed intervals also merge when touching.
fn merge(mut ivs: Vec<(Z2, Z2)>, open: bool) -> Vec<(Z2, Z2)> {
    ivs.sort_unstable();
    let mut out: Vec<(Z2, Z2)> = Vec::with_capacity(ivs.len());
    for (lo, hi) in ivs {
        if let Some(last) = out.last_mut() {
            if lo < last.1 || (!open && lo == last.1) {
                if hi > last.1 {
                    last.1 = hi;
                }
                continue;
            }
        }
        out.push((lo, hi));
    }
    out
}

fn merge_map(m: BTreeMap<Key, Vec<(Z2, Z2)>>, open: bool) -> CellMap {
    let entries: Vec<(Key, Vec<(Z2, Z2)>)> = m.into_iter().collect();
    entries.into_par_iter().map(|(k, v)| (k, merge(v, open))).collect()
}

fn step(cells: &CellMap, h: &[(i64, i64, i64)]) -> (BTreeMap<Key, Vec<(Z2, Z2)>>, usize) {
    let mut out: BTreeMap<Key, Vec<(Z2, Z2)>> = BTreeMap::new();
    let mut raw = 0;
    for br in &BRANCHES {
        for (&(letter, level, r), ivs) in cells {
            if letter != br.source {
                continue;
            }
            let nr = reduce_i64(h[level as usize + 1], br.profinite(r));
            let dst = out.entry((br.target, level + 1, nr)).or_default();
            for &(lo, hi) in ivs {
                dst.push((br.euclid(lo), br.euclid(hi)));
                raw += 1;
            }
        }
    }
    (out, raw)
}

fn residues(h: (i64, i64, i64)) -> Vec<(i64, i64)> {
    let (a, _, d) = h;
    (0..a).flat_map(|x| (0..d).map(move |y| (x, y))).collect()
}

/// Open pieces of `(lo, hi)` not covered by the closed intervals `ivs`.
fn subtract(lo: Z2, hi: Z2, ivs: &[(Z2, Z2)]) -> Vec<(Z2, Z2)> {
    let mut out = Vec::new();
    let mut cur = lo;
    for &(l, u) in ivs {
        if u <= cur {
            continue;
        }
        if l >= hi {
            break;
        }
        if l > cur {
            out.push((cur, l));
        }
        cur = cur.max(u);
    }
    if hi > cur {
        out.push((cur, hi));
    }
    out
}

/// Inner and outer approximations of the windows `Ω_a`, `Ω_b`.
#[derive(Clone, Debug)]
pub struct QuasiWindows {
    pub depth: u32,
    /// Closed cells at level `depth`, iterated from the full strip.
    pub outer: Vec<QCell>,
    /// Open cells certified to select only sequence points of their type.
    pub inner: Vec<QCell>,
    /// Outer cell counts before merging, per step.
    pub raw_counts: Vec<usize>,
    /// Outer cell counts after merging, per depth `0..=depth`.
    pub merged_counts: Vec<usize>,
    hnf: Vec<(i64, i64, i64)>,
    outer_map: CellMap,
    inner_map: CellMap,
    inner_levels: Vec<u32>,
}

fn flatten(m: &CellMap) -> Vec<QCell> {
    m.iter()
        .flat_map(|(&(letter, level, residue), ivs)| {
            ivs.iter().map(move |&(lo, hi)| QCell { letter, level, residue, lo, hi })
        })
        .collect()
}

/// Iterates the branch maps `depth` times. Outer cells start from the full
/// strip; inner cells start from `λ'J` on `φℤ²` (type a, since `λΛ ⊆ Λ_a`)
/// and from `J` minus the outer cells of the other type, where `J` is the
/// inner strip on which every lattice point is a sequence point.
pub fn ifs_windows(depth: u32) -> Result<QuasiWindows> {
    if depth > MAX_DEPTH {
        return Err(Error::Precondition(format!("IFS depth {depth} exceeds {MAX_DEPTH}")));
    }
    let h = hnfs(depth + 1);
    let full = Strip::full();
    let inner_strip = Strip::inner();
    let (jlo, jhi) = (inner_strip.conj_lo, inner_strip.conj_hi);

    let mut outer: CellMap = BTreeMap::new();
    outer.insert((0, 0, (0, 0)), vec![(full.conj_lo, full.conj_hi)]);
    outer.insert((1, 0, (0, 0)), vec![(full.conj_lo, full.conj_hi)]);
    let mut raw_counts = Vec::new();
    let mut merged_counts = vec![2];
    let mut outers = vec![outer.clone()];
    for _ in 0..depth {
        let (next, raw) = step(&outer, &h);
        raw_counts.push(raw);
        outer = merge_map(next, false);
        merged_counts.push(outer.values().map(Vec::len).sum());
        outers.push(outer.clone());
    }

    let base_key = (0, 1, reduce_i64(h[1], (0, 0)));
    let base = (LAMBDA_CONJ * jlo, LAMBDA_CONJ * jhi);
    let typed_base = |d: u32| -> BTreeMap<Key, Vec<(Z2, Z2)>> {
        let o = &outers[d as usize];
        let mut m: BTreeMap<Key, Vec<(Z2, Z2)>> = BTreeMap::new();
        for r in residues(h[d as usize]) {
            for (t, other) in [(0usize, 1usize), (1, 0)] {
                let empty = Vec::new();
                let ivs = o.get(&(other, d, r)).unwrap_or(&empty);
                let pieces = subtract(jlo, jhi, ivs);
                if !pieces.is_empty() {
                    m.entry((t, d, r)).or_default().extend(pieces);
                }
            }
        }
        m
    };
    let mut inner: CellMap = BTreeMap::new();
    for d in 0..=depth {
        let (mut next, _) = if d == 0 { (BTreeMap::new(), 0) } else { step(&inner, &h) };
        for (k, v) in typed_base(d) {
            next.entry(k).or_default().extend(v);
        }
        next.entry(base_key).or_default().push(base);
        inner = merge_map(next, true);
    }
    let mut inner_levels: Vec<u32> = inner.keys().map(|k| k.1).collect();
    inner_levels.sort_unstable();
    inner_levels.dedup();
    Ok(QuasiWindows {
        depth,
        outer: flatten(&outer),
        inner: flatten(&inner),
        raw_counts,
        merged_counts,
        hnf: h,
        outer_map: outer,
        inner_map: inner,
        inner_levels,
    })
}

fn find(ivs: &[(Z2, Z2)], c: Z2, open: bool) -> bool {
    // intervals are sorted and disjoint
    let i = ivs.partition_point(|iv| iv.0 <= c);
    i > 0 && {
        let (lo, hi) = ivs[i - 1];
        if open {
            lo < c && c < hi
        } else {
            c <= hi
        }
    }
}

impl QuasiWindows {
    /// Whether the outer window of `letter` contains the lattice point `v`.
    pub fn outer_contains(&self, letter: usize, v: (i64, i64)) -> bool {
        let r = reduce_i64(self.hnf[self.depth as usize], v);
        let c = Z2::new(v.0, -v.1);
        self.outer_map.get(&(letter, self.depth, r)).is_some_and(|ivs| find(ivs, c, false))
    }

    /// Whether the lattice point lies on an endpoint of an outer cell of `letter`.
    pub fn outer_boundary(&self, letter: usize, v: (i64, i64)) -> bool {
        let r = reduce_i64(self.hnf[self.depth as usize], v);
        let c = Z2::new(v.0, -v.1);
        self.outer_map.get(&(letter, self.depth, r)).is_some_and(|ivs| ivs.iter().any(|&(lo, hi)| lo == c || hi == c))
    }

    pub fn inner_contains(&self, letter: usize, v: (i64, i64)) -> bool {
        let c = Z2::new(v.0, -v.1);
        self.inner_levels.iter().any(|&l| {
            let r = reduce_i64(self.hnf[l as usize], v);
            self.inner_map.get(&(letter, l, r)).is_some_and(|ivs| find(ivs, c, true))
        })
    }

    /// Merged conjugate-coordinate hull of the outer cells of `letter`.
    pub fn outer_projection(&self, letter: usize) -> Vec<(Z2, Z2)> {
        let ivs: Vec<(Z2, Z2)> =
            self.outer_map.iter().filter(|(k, _)| k.0 == letter).flat_map(|(_, v)| v.iter().copied()).collect();
        merge(ivs, false)
    }

    /// Every inner cell is covered by the outer cells of its type on each
    /// refinement to the outer level.
    pub fn inner_within_outer(&self) -> bool {
        let d = self.depth;
        let reps = residues(self.hnf[d as usize]);
        self.inner_map.iter().all(|(&(letter, level, r), ivs)| {
            let targets: Vec<(i64, i64)> = if level >= d {
                vec![reduce_i64(self.hnf[d as usize], r)]
            } else {
                reps.iter().copied().filter(|&x| reduce_i64(self.hnf[level as usize], x) == r).collect()
            };
            targets.iter().all(|t| {
                let outer = self.outer_map.get(&(letter, d, *t)).map(Vec::as_slice).unwrap_or(&[]);
                ivs.iter().all(|&(lo, hi)| subtract(lo, hi, outer).is_empty())
            })
        })
    }

    /// Outer and inner windows as cut-and-project windows in the `β` coordinate.
    pub fn to_windows(&self, scheme: &CutProjectScheme) -> Result<([Window; 2], [Window; 2])> {
        let conv = |cells: &[QCell], open: bool| -> Result<[Window; 2]> {
            let mut w = [Window::empty(scheme.space.clone()), Window::empty(scheme.space.clone())];
            for c in cells {
                let (lo, hi) = (conj_to_beta(c.hi), conj_to_beta(c.lo));
                let interval = if open { Interval::open(lo, hi) } else { Interval::closed(lo, hi) };
                let center = [BigInt::from(c.residue.0), BigInt::from(c.residue.1)];
                let coset = Coset::new(&scheme.space, &center, c.level)?;
                w[c.letter].cells.push(Cell { interval: Some(interval), coset });
            }
            Ok(w)
        };
        Ok((conv(&self.outer, false)?, conv(&self.inner, true)?))
    }
}

/// Hausdorff distance between two sorted, merged unions of intervals.
pub fn hausdorff_distance(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn dist(x: f64, s: &[(f64, f64)]) -> f64 {
        s.iter()
            .map(|&(l, h)| {
                if x < l {
                    l - x
                } else if x > h {
                    x - h
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }
    fn directed(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
        let mut cands: Vec<f64> = a.iter().flat_map(|&(l, h)| [l, h]).collect();
        for w in b.windows(2) {
            let m = 0.5 * (w[0].1 + w[1].0);
            if a.iter().any(|&(l, h)| l <= m && m <= h) {
                cands.push(m);
            }
        }
        cands.into_iter().map(|x| dist(x, b)).fold(0.0, f64::max)
    }
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
    }
    directed(a, b).max(directed(b, a))
}

/// Hausdorff distance between the depth-`d` and depth-`d+1` outer
/// projections (maximum over both types), with the bound `λ'^d·(2 + √2)`.
pub fn outer_hausdorff(d: u32) -> Result<(f64, f64)> {
    let w0 = ifs_windows(d)?;
    let w1 = ifs_windows(d + 1)?;
    let f = |v: Vec<(Z2, Z2)>| v.into_iter().map(|(l, h)| (l.to_f64(), h.to_f64())).collect::<Vec<_>>();
    let dist =
        (0..2).map(|t| hausdorff_distance(&f(w0.outer_projection(t)), &f(w1.outer_projection(t)))).fold(0.0, f64::max);
    let bound = LAMBDA_CONJ.to_f64().powi(d as i32) * Strip::full().conj_hi.to_f64();
    Ok((dist, bound))
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub steps: u32,
    pub depth: u32,
    pub physical_range: (String, String),
    pub sequence_points: usize,
    pub inner_points: usize,
    pub outer_points: usize,
    /// Inner model-set points that are not sequence points of the same type.
    pub inner_violations: Vec<String>,
    /// Sequence points missed by the outer window of their type.
    pub outer_violations: Vec<String>,
    pub inner_holds: bool,
    pub outer_holds: bool,
    /// `|Λ(Ω) ∖ Λ(U)|` on the range.
    pub discrepancy: usize,
    pub discrepancy_density: F17,
    /// Lattice points on an endpoint of an outer cell.
    pub boundary_incidences: usize,
    pub full_strip: String,
    pub inner_strip: String,
    pub ok: bool,
}

/// `Λ(U) ⊆ Λ ⊆ Λ(Ω)` on the range covered by `generate_sequence_exact(n)`.
pub fn sandwich_check(n: u32, depth: u32) -> Result<SandwichReport> {
    let seq = generate_sequence_exact(n)?;
    let w = ifs_windows(depth)?;
    let types: [HashSet<(i64, i64)>; 2] =
        [seq.of('a').iter().map(|&x| lift(x)).collect(), seq.of('b').iter().map(|&x| lift(x)).collect()];
    let all: Vec<Z2> = seq.per_letter.concat();
    let xmin = *all.iter().min().unwrap();
    let xmax = *all.iter().max().unwrap();
    let full = Strip::full();
    let lattice = lattice_in_box(xmin, xmax, full.conj_lo, full.conj_hi);
    struct Row {
        inner: [bool; 2],
        outer: [bool; 2],
        boundary: bool,
    }
    let rows: Vec<Row> = lattice
        .par_iter()
        .map(|&x| {
            let v = lift(x);
            Row {
                inner: [w.inner_contains(0, v), w.inner_contains(1, v)],
                outer: [w.outer_contains(0, v), w.outer_contains(1, v)],
                boundary: w.outer_boundary(0, v) || w.outer_boundary(1, v),
            }
        })
        .collect();
    let mut inner_violations = Vec::new();
    let mut outer_violations = Vec::new();
    let (mut inner_points, mut outer_points, mut discrepancy, mut boundary_incidences) = (0, 0, 0, 0);
    let letters = ['a', 'b'];
    for (x, row) in lattice.iter().zip(&rows) {
        let v = lift(*x);
        let in_u = row.inner[0] || row.inner[1];
        let in_o = row.outer[0] || row.outer[1];
        inner_points += in_u as usize;
        outer_points += in_o as usize;
        discrepancy += (in_o && !in_u) as usize;
        boundary_incidences += row.boundary as usize;
        for t in 0..2 {
            if row.inner[t] && !types[t].contains(&v) {
                inner_violations.push(format!("{x} selected by U_{}", letters[t]));
            }
            if types[t].contains(&v) && !row.outer[t] {
                outer_violations.push(format!("{x} of type {} outside Ω_{}", letters[t], letters[t]));
            }
        }
    }
    let width = (xmax - xmin).to_f64().max(1.0);
    Ok(SandwichReport {
        steps: n,
        depth,
        physical_range: (xmin.to_string(), xmax.to_string()),
        sequence_points: all.len(),
        inner_points,
        outer_points,
        inner_holds: inner_violations.is_empty(),
        outer_holds: outer_violations.is_empty(),
        ok: inner_violations.is_empty() && outer_violations.is_empty(),
        inner_violations,
        outer_violations,
        discrepancy,
        discrepancy_density: F17(discrepancy as f64 / width),
        boundary_incidences,
        full_strip: full.describe(),
        inner_strip: Strip::inner().describe(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutproject::{model_set_points, ModelSetQuery, QueryRange};

    #[test]
    fn contraction_ratio() {
        for br in &BRANCHES {
            let d = br.euclid(Z2::int(1)) - br.euclid(Z2::int(0));
            assert_eq!(d, LAMBDA_CONJ);
        }
        assert!((LAMBDA_CONJ.to_f64() - 0.5857864376269049).abs() < 1e-15);
    }

    #[test]
    fn depth_zero_and_growth() {
        let w = ifs_windows(0).unwrap();
        assert_eq!(w.outer.len(), 2);
        assert!(w.outer.iter().all(|c| c.lo == Z2::int(0) && c.hi == Z2::new(2, 1)));
        let w = ifs_windows(6).unwrap();
        for (d, &raw) in w.raw_counts.iter().enumerate() {
            assert!(raw <= 7usize.pow(d as u32 + 1));
        }
        assert!(ifs_windows(21).is_err());
    }

    #[test]
    fn inner_inside_outer() {
        for d in [0, 3, 6] {
            assert!(ifs_windows(d).unwrap().inner_within_outer(), "depth {d}");
        }
    }

    #[test]
    fn sandwich_small() {
        let r = sandwich_check(0, 4).unwrap();
        assert!(r.ok, "{r:?}");
        let r = sandwich_check(6, 8).unwrap();
        assert!(r.ok, "{r:?}");
    }

    #[test]
    fn discrepancy_shrinks() {
        let a = sandwich_check(6, 4).unwrap().discrepancy;
        let b = sandwich_check(6, 8).unwrap().discrepancy;
        assert!(b < a, "{a} {b}");
    }

    #[test]
    fn hausdorff_bound() {
        for d in 0..6 {
            let (dist, bound) = outer_hausdorff(d).unwrap();
            assert!(dist <= bound + 1e-12, "d={d}: {dist} > {bound}");
        }
        assert_eq!(hausdorff_distance(&[(0.0, 1.0)], &[(0.0, 0.25), (0.75, 1.0)]), 0.25);
    }

    #[test]
    fn windows_agree_with_cut_and_project() {
        let w = ifs_windows(4).unwrap();
        let scheme = CutProjectScheme::sqrt2_phi();
        let (outer, _) = w.to_windows(&scheme).unwrap();
        let q = ModelSetQuery {
            range: QueryRange::Line { lo: Z2::int(-20).to_quad_rational(), hi: Z2::int(20).to_quad_rational() },
            truncation: 4,
        };
        let pts = model_set_points(&scheme, &outer, &q).unwrap();
        assert!(!pts.is_empty());
        for p in &pts {
            let v = (p.lattice[0], p.lattice[1]);
            for t in 0..2 {
                assert_eq!(p.labels.contains(&t), w.outer_contains(t, v), "{v:?}");
            }
        }
    }
}
