use std::collections::HashSet;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::{chair_recursion, ChairState};
use crate::error::{Error, Result};
use crate::exactnum::{fmt_rational, Rational};
use crate::output::F17;
use crate::padic::{Coset, CosetIndex, CosetUnion, Space};

/// Lowest binary digit of a lattice point and its parent `R⁻¹((c − e)/2)`.
pub fn split_digit(c: (i64, i64)) -> ((i64, i64), usize) {
    let e = (c.0.rem_euclid(2), c.1.rem_euclid(2));
    let q = ((c.0 - e.0) / 2, (c.1 - e.1) / 2);
    ((q.1, -q.0), (2 * e.0 + e.1) as usize)
}

/// Orientation of a point as a function of its parent's orientation and
/// its lowest digit: `label(c) = f[label(parent(c))][digit(c)]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DigitTable {
    pub f: [[usize; 4]; 4],
}

impl DigitTable {
    /// Reads the table off a generated patch and checks it is a function.
    pub fn from_state(state: &ChairState) -> Result<Self> {
        let top = state.top();
        let mut f = [[usize::MAX; 4]; 4];
        for (c, k) in top.iter() {
            let (par, e) = split_digit(c);
            let Some(pk) = top.get(par) else { continue };
            let slot = &mut f[pk][e];
            if *slot != usize::MAX && *slot != k {
                return Err(Error::ChairInconsistent(format!("digit table conflict at {c:?}: {} vs {k}", *slot)));
            }
            *slot = k;
        }
        if f.iter().flatten().any(|&v| v == usize::MAX) {
            return Err(Error::ChairInconsistent("patch too small to fill the digit table".into()));
        }
        Ok(DigitTable { f })
    }

    /// Table read off a level-6 patch.
    pub fn derive() -> Result<Self> {
        DigitTable::from_state(&chair_recursion(6)?)
    }

    /// Smallest `j ≤ max_j` such that the class of `c` modulo `2^j` forces
    /// one orientation, with that orientation.
    pub fn coarsest(&self, c: (i64, i64), max_j: u32) -> Option<(u32, usize)> {
        // h[x] is the orientation of c when its j-th ancestor has orientation x
        let mut h = [0usize, 1, 2, 3];
        let mut cur = c;
        for j in 1..=max_j {
            let (par, e) = split_digit(cur);
            h = [h[self.f[0][e]], h[self.f[1][e]], h[self.f[2][e]], h[self.f[3][e]]];
            cur = par;
            if h.iter().all(|&v| v == h[0]) {
                return Some((j, h[0]));
            }
        }
        None
    }

    /// Orientation forced by the class of `c` modulo `2^j`, if any.
    pub fn determined(&self, c: (i64, i64), j: u32) -> Option<usize> {
        self.coarsest(c, j).map(|(_, k)| k)
    }

    /// Fraction of classes modulo `2^j` that force no orientation.
    pub fn undetermined_fraction(&self, j: u32) -> Rational {
        let m = 1i64 << j;
        let bad: usize =
            (0..m).into_par_iter().map(|x| (0..m).filter(|&y| self.coarsest((x, y), j).is_none()).count()).sum();
        Rational::new(BigInt::from(bad), BigInt::from(m * m))
    }
}

/// How each point contributes its coset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowMode {
    /// The coarsest class modulo `2^j`, `j ≤ i + 2`, that forces the orientation.
    Coarsest,
    /// `t + 2^i·4·(Ẑ₂)²` for every `t ∈ P_{k,i}`.
    Literal,
}

/// Four windows in `(Ẑ₂)²`, truncated at `built_to_level`.
#[derive(Clone, Debug)]
pub struct ChairWindows {
    pub omega: [CosetUnion; 4],
    pub built_to_level: u32,
    pub mode: WindowMode,
}

impl ChairWindows {
    pub fn measures(&self) -> Result<[Rational; 4]> {
        let m: Vec<Rational> = self.omega.iter().map(|w| w.measure()).collect::<Result<_>>()?;
        Ok([m[0].clone(), m[1].clone(), m[2].clone(), m[3].clone()])
    }

    pub fn total_measure(&self) -> Result<Rational> {
        Ok(self.measures()?.into_iter().sum())
    }

    /// `1 − Σ_k μ(Ω_k)`.
    pub fn deficit(&self) -> Result<Rational> {
        Ok(Rational::from_integer(1.into()) - self.total_measure()?)
    }
}

pub fn space() -> Space {
    Space::padic(2, 2).expect("2 is prime")
}

/// [`chair_windows_with`] in [`WindowMode::Coarsest`].
pub fn chair_windows(state: &ChairState) -> Result<ChairWindows> {
    chair_windows_with(state, WindowMode::Coarsest)
}

/// Windows `Ω_k` as normalized unions of the cosets contributed by `P_{k,i}`, `i ≤ i_max`.
/// Orientation, coset center and level of a coarsest coset.
type Found = (usize, ((i64, i64), u32));

pub fn chair_windows_with(state: &ChairState, mode: WindowMode) -> Result<ChairWindows> {
    let s = space();
    let mut keys: [HashSet<((i64, i64), u32)>; 4] = Default::default();
    match mode {
        WindowMode::Literal => {
            for g in &state.levels {
                let j = g.level + 2;
                let m = 1i64 << j;
                for (p, k) in g.iter() {
                    keys[k].insert(((p.0.rem_euclid(m), p.1.rem_euclid(m)), j));
                }
            }
        }
        WindowMode::Coarsest => {
            // every P_{k,i} is contained in P_{k,i_max}, and the cap i + 2 only grows
            let table = DigitTable::derive()?;
            let top = state.top();
            let cap = top.level + 2;
            let pts: Vec<((i64, i64), usize)> = top.iter().collect();
            let found: Vec<Found> = pts
                .par_iter()
                .map(|&(p, k)| match table.coarsest(p, cap) {
                    Some((j, kk)) if kk == k => {
                        let m = 1i64 << j;
                        Ok((k, ((p.0.rem_euclid(m), p.1.rem_euclid(m)), j)))
                    }
                    Some((_, kk)) => {
                        Err(Error::ChairInconsistent(format!("{p:?} has orientation {k} but its class forces {kk}")))
                    }
                    None => {
                        Err(Error::ChairInconsistent(format!("class of {p:?} modulo 2^{cap} forces no orientation")))
                    }
                })
                .collect::<Result<_>>()?;
            for (k, key) in found {
                keys[k].insert(key);
            }
        }
    }
    let mut omega = Vec::with_capacity(4);
    for set in keys {
        let cosets = set.into_iter().map(|((x, y), j)| Coset::from_i64(&s, &[x, y], j)).collect::<Result<Vec<_>>>()?;
        omega.push(CosetUnion::from_cosets(s.clone(), cosets)?.normalize()?);
    }
    let omega: [CosetUnion; 4] = omega.try_into().expect("four windows");
    for a in 0..4 {
        for b in a + 1..4 {
            if !omega[a].is_disjoint(&omega[b])? {
                return Err(Error::ChairInconsistent(format!("windows {a} and {b} overlap")));
            }
        }
    }
    Ok(ChairWindows { omega, built_to_level: state.max_level, mode })
}

/// Integer points of a box labeled by the window containing their residue.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChairLabeling {
    pub sets: [Vec<(i64, i64)>; 4],
    pub undecided: Vec<(i64, i64)>,
}

impl ChairLabeling {
    pub fn label_of(&self, p: (i64, i64)) -> Option<usize> {
        (0..4).find(|&k| self.sets[k].binary_search(&p).is_ok())
    }
}

/// Labels every integer point of `[lo.0, hi.0] × [lo.1, hi.1]`.
pub fn chair_model_set(windows: &ChairWindows, lo: (i64, i64), hi: (i64, i64)) -> Result<ChairLabeling> {
    let idx: Vec<CosetIndex> = windows.omega.iter().map(|w| w.index()).collect();
    let pts: Vec<(i64, i64)> = (lo.0..=hi.0).flat_map(|x| (lo.1..=hi.1).map(move |y| (x, y))).collect();
    let labels: Vec<Option<usize>> = pts
        .par_iter()
        .map(|&(x, y)| {
            let v = [BigInt::from(x), BigInt::from(y)];
            for (k, ix) in idx.iter().enumerate() {
                if ix.contains(&v)? {
                    return Ok(Some(k));
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    let mut out = ChairLabeling::default();
    for (p, l) in pts.into_iter().zip(labels) {
        match l {
            Some(k) => out.sets[k].push(p),
            None => out.undecided.push(p),
        }
    }
    Ok(out)
}

/// Regularity diagnostics for the chair windows.
#[derive(Clone, Debug, Serialize)]
pub struct ChairRegularity {
    pub digit_table: DigitTable,
    /// `(j, exact fraction, float)` of classes modulo `2^j` forcing no orientation.
    pub undetermined: Vec<(u32, String, F17)>,
    pub lattice_points_checked: usize,
    /// Largest depth needed to force the orientation of a checked point.
    pub max_depth_needed: u32,
    /// Checked points whose class stays undetermined up to `depth`.
    pub unresolved_points: Vec<(i64, i64)>,
    pub depth: u32,
    /// No checked lattice point lies on the boundary approximants.
    pub no_lattice_point_on_boundary: bool,
}

/// Boundary approximants are the undetermined classes; a lattice point on
/// the boundary would stay undetermined at every depth.
pub fn chair_regularity(state: &ChairState, depth: u32, fraction_depth: u32) -> Result<ChairRegularity> {
    let table = DigitTable::derive()?;
    let undetermined = (1..=fraction_depth)
        .map(|j| {
            let q = table.undetermined_fraction(j);
            let f = num_traits::ToPrimitive::to_f64(&q).unwrap_or(f64::NAN);
            (j, fmt_rational(&q), F17(f))
        })
        .collect();
    let top = state.top();
    let mut max_depth_needed = 0;
    let mut unresolved_points = Vec::new();
    for (p, _) in top.iter() {
        match table.coarsest(p, depth) {
            Some((j, _)) => {
                max_depth_needed = max_depth_needed.max(j);
            }
            None => unresolved_points.push(p),
        }
    }
    Ok(ChairRegularity {
        digit_table: table,
        undetermined,
        lattice_points_checked: top.len(),
        max_depth_needed,
        no_lattice_point_on_boundary: unresolved_points.is_empty(),
        unresolved_points,
        depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    #[test]
    fn digit_table_values() {
        let t = DigitTable::derive().unwrap();
        assert_eq!(t.f, [[0, 1, 1, 2], [2, 3, 1, 2], [0, 3, 3, 2], [0, 3, 1, 0]]);
    }

    #[test]
    fn level_zero_window() {
        let s = chair_recursion(0).unwrap();
        for mode in [WindowMode::Coarsest, WindowMode::Literal] {
            let w = chair_windows_with(&s, mode).unwrap();
            assert_eq!(w.omega[0].cosets.len(), 1);
            assert_eq!(w.omega[0].cosets[0].level, 2);
            assert_eq!(w.measures().unwrap()[0], rat(1, 16));
        }
    }

    #[test]
    fn deficit_shrinks() {
        let mut prev = Rational::from_integer(2.into());
        for i in 0..=6 {
            let s = chair_recursion(i).unwrap();
            let d = chair_windows(&s).unwrap().deficit().unwrap();
            assert!(d >= Rational::from_integer(0.into()) && d <= prev, "i={i}");
            prev = d;
        }
    }

    #[test]
    fn windows_contain_generating_points() {
        let s = chair_recursion(4).unwrap();
        for mode in [WindowMode::Coarsest, WindowMode::Literal] {
            let w = chair_windows_with(&s, mode).unwrap();
            for (p, k) in s.top().iter() {
                assert!(w.omega[k].contains_i64(&[p.0, p.1]).unwrap());
            }
        }
    }

    #[test]
    fn model_set_matches_recursion() {
        let s = chair_recursion(6).unwrap();
        let w = chair_windows(&s).unwrap();
        let g = s.level(3);
        let hi = (g.lo.0 + g.side - 1, g.lo.1 + g.side - 1);
        let lab = chair_model_set(&w, g.lo, hi).unwrap();
        assert!(lab.undecided.is_empty());
        for k in 0..4 {
            assert_eq!(lab.sets[k], g.points(k));
        }
        assert_eq!(lab.label_of((0, 0)), Some(0));
        assert_eq!(lab.label_of((1, 1)), Some(2));
    }

    #[test]
    fn regularity_report() {
        let s = chair_recursion(5).unwrap();
        let r = chair_regularity(&s, 12, 4).unwrap();
        assert!(r.no_lattice_point_on_boundary);
        assert!(r.max_depth_needed <= 7);
    }
}
