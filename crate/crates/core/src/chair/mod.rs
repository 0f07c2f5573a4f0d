//! The chair tiling in decorated-square form: orientation point sets from
//! the exact affine recursion, 2-adic windows, and rendering.

mod render;
mod windows;

pub use render::{chair_json, chair_svg, SvgStyle, COLORS};
pub use windows::{
    chair_model_set, chair_regularity, chair_windows, chair_windows_with, ChairLabeling, ChairRegularity, ChairWindows,
    DigitTable, WindowMode,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{int, rat, AffineMap2, IntMatrix2, Rational};

/// Orientation increments `n_l` of the four sub-squares.
pub const NL: [usize; 4] = [0, 1, 2, 1];

/// Largest supported recursion depth (`4^12` points).
pub const MAX_LEVEL: u32 = 12;

/// `T x = 2Rx + (1/2, 1/2)`.
pub fn t_map() -> AffineMap2 {
    AffineMap2::from_int(&IntMatrix2::rotation().mul(&IntMatrix2::new(2, 0, 0, 2)), [rat(1, 2), rat(1, 2)])
}

/// `M_0 = id`, `M_1 x = Rx + e₁`, `M_2 x = R²x + e₁ + e₂`, `M_3 x = Rx + e₂`.
pub fn m_maps() -> [AffineMap2; 4] {
    let r = IntMatrix2::rotation();
    [
        AffineMap2::identity(),
        AffineMap2::from_int(&r, [int(1), int(0)]),
        AffineMap2::from_int(&r.pow(2), [int(1), int(1)]),
        AffineMap2::from_int(&r, [int(0), int(1)]),
    ]
}

/// `T^i` as an exact affine map.
pub fn t_power(i: u32) -> AffineMap2 {
    let t = t_map();
    (0..i).fold(AffineMap2::identity(), |acc, _| t.compose(&acc))
}

/// Integer points of `T^i(C)`, `C = [−1/2, 1/2]²`, as `(lo, side)`.
pub fn square(i: u32) -> Result<((i64, i64), i64)> {
    let ti = t_power(i);
    let h = rat(1, 2);
    let corners = [[-&h, -&h], [-&h, h.clone()], [h.clone(), -&h], [h.clone(), h.clone()]];
    let imgs: Vec<[Rational; 2]> = corners.iter().map(|c| ti.apply(c)).collect();
    let bound = |axis: usize| -> Result<(i64, i64)> {
        let lo = imgs.iter().map(|v| v[axis].clone()).min().unwrap();
        let hi = imgs.iter().map(|v| v[axis].clone()).max().unwrap();
        let conv = |q: BigInt| q.to_i64().ok_or_else(|| Error::Precondition("square too large".into()));
        Ok((conv(lo.ceil().to_integer())?, conv(hi.floor().to_integer())?))
    };
    let (x0, x1) = bound(0)?;
    let (y0, y1) = bound(1)?;
    let side = x1 - x0 + 1;
    if side != y1 - y0 + 1 || side != 1i64 << i {
        return Err(Error::ChairInconsistent(format!("T^{i}C does not hold 4^{i} integer points")));
    }
    Ok(((x0, y0), side))
}

const EMPTY: u8 = u8::MAX;

/// Orientation labels of all integer points of `T^i(C)`, stored densely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelGrid {
    pub level: u32,
    pub lo: (i64, i64),
    pub side: i64,
    labels: Vec<u8>,
}

impl LevelGrid {
    fn new(level: u32) -> Result<Self> {
        let (lo, side) = square(level)?;
        Ok(LevelGrid { level, lo, side, labels: vec![EMPTY; (side * side) as usize] })
    }

    fn index(&self, p: (i64, i64)) -> Option<usize> {
        let (dx, dy) = (p.0 - self.lo.0, p.1 - self.lo.1);
        (0..self.side).contains(&dx).then_some(())?;
        (0..self.side).contains(&dy).then_some(())?;
        Some((dx * self.side + dy) as usize)
    }

    pub fn contains(&self, p: (i64, i64)) -> bool {
        self.index(p).is_some()
    }

    /// Orientation of `p`, or `None` outside `T^i(C)`.
    pub fn get(&self, p: (i64, i64)) -> Option<usize> {
        let l = self.labels[self.index(p)?];
        (l != EMPTY).then_some(l as usize)
    }

    /// `(point, orientation)` in lexicographic point order.
    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), usize)> + '_ {
        self.labels.iter().enumerate().filter(|(_, &l)| l != EMPTY).map(move |(n, &l)| {
            let n = n as i64;
            ((self.lo.0 + n / self.side, self.lo.1 + n % self.side), l as usize)
        })
    }

    pub fn len(&self) -> usize {
        self.labels.iter().filter(|&&l| l != EMPTY).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sorted points of orientation `k`.
    pub fn points(&self, k: usize) -> Vec<(i64, i64)> {
        self.iter().filter(|&(_, l)| l == k).map(|(p, _)| p).collect()
    }

    pub fn counts(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for (_, l) in self.iter() {
            c[l] += 1;
        }
        c
    }
}

/// The orientation sets `P_{k,i}` for `i ≤ max_level`.
#[derive(Clone, Debug)]
pub struct ChairState {
    pub max_level: u32,
    pub levels: Vec<LevelGrid>,
    pub t: AffineMap2,
    pub m: [AffineMap2; 4],
    pub nl: [usize; 4],
}

impl ChairState {
    pub fn level(&self, i: u32) -> &LevelGrid {
        &self.levels[i as usize]
    }

    pub fn top(&self) -> &LevelGrid {
        self.levels.last().expect("level 0 always present")
    }

    /// `P_{k,i}`, sorted.
    pub fn points(&self, k: usize, i: u32) -> Vec<(i64, i64)> {
        self.level(i).points(k)
    }

    /// Re-checks the counting, partition and containment invariants.
    pub fn check_invariants(&self) -> Result<()> {
        for g in &self.levels {
            if g.len() != 1usize << (2 * g.level) {
                return Err(Error::ChairInconsistent(format!(
                    "level {} has {} points, expected 4^{}",
                    g.level,
                    g.len(),
                    g.level
                )));
            }
        }
        for w in self.levels.windows(2) {
            for (p, k) in w[0].iter() {
                if w[1].get(p) != Some(k) {
                    return Err(Error::ChairInconsistent(format!("level {} relabels {:?}", w[1].level, p)));
                }
            }
        }
        Ok(())
    }
}

fn apply_checked(f: &AffineMap2, p: (i64, i64)) -> Result<(i64, i64)> {
    f.apply_int(p).ok_or_else(|| Error::NonIntegerPoint { point: format!("{p:?}"), map: f.to_string() })
}

/// Runs `P_{k,i+1} = ⋃_l T^i M_l T^−i (P_{(k−n_l) mod 4, i})` up to `i_max`.
pub fn chair_recursion(i_max: u32) -> Result<ChairState> {
    if i_max > MAX_LEVEL {
        return Err(Error::Precondition(format!("chair level {i_max} exceeds {MAX_LEVEL}")));
    }
    let t = t_map();
    let m = m_maps();
    let mut g0 = LevelGrid::new(0)?;
    let origin = g0.index((0, 0)).expect("origin lies in C");
    g0.labels[origin] = 0;
    let mut levels = vec![g0];
    let mut ti = AffineMap2::identity();
    for i in 0..i_max {
        let ti_inv = ti.inverse().expect("T is invertible");
        let prev = levels.last().unwrap();
        let src: Vec<((i64, i64), usize)> = prev.iter().collect();
        let images: Vec<Vec<((i64, i64), u8)>> = (0..4)
            .into_par_iter()
            .map(|l| {
                let f = ti.compose(&m[l]).compose(&ti_inv);
                match f.to_int_form() {
                    Some(fi) => Ok(src.iter().map(|&(p, k)| (fi.apply(p), ((k + NL[l]) % 4) as u8)).collect()),
                    None => src.iter().map(|&(p, k)| Ok((apply_checked(&f, p)?, ((k + NL[l]) % 4) as u8))).collect(),
                }
            })
            .collect::<Result<_>>()?;
        let mut next = LevelGrid::new(i + 1)?;
        for (p, k) in images.into_iter().flatten() {
            let n =
                next.index(p).ok_or_else(|| Error::ChairInconsistent(format!("{p:?} falls outside T^{}C", i + 1)))?;
            if next.labels[n] != EMPTY {
                return Err(Error::Overlap(format!("{p:?}")));
            }
            next.labels[n] = k;
        }
        levels.push(next);
        ti = t.compose(&ti);
    }
    let state = ChairState { max_level: i_max, levels, t, m, nl: NL };
    state.check_invariants()?;
    Ok(state)
}

/// Whether `(P_{k,i} + 2^e ℤ²) ∩ T^{i_max}(C) ⊆ P_{k,i_max}` for every `k`.
pub fn periodicity_holds(state: &ChairState, i: u32, e: u32) -> bool {
    let top = state.top();
    let step = 1i64 << e;
    let (lo, side) = (top.lo, top.side);
    state.level(i).iter().all(|(p, k)| {
        let sx = lo.0 + (p.0 - lo.0).mod_floor(&step);
        let sy = lo.1 + (p.1 - lo.1).mod_floor(&step);
        (0..)
            .map(|a| sx + a * step)
            .take_while(|&x| x < lo.0 + side)
            .all(|x| (0..).map(|b| sy + b * step).take_while(|&y| y < lo.1 + side).all(|y| top.get((x, y)) == Some(k)))
    })
}

/// Smallest `e ≤ i + 4` with [`periodicity_holds`], if any.
pub fn minimal_period_exponent(state: &ChairState, i: u32) -> Option<u32> {
    (0..=i + 4).find(|&e| periodicity_holds(state, i, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_zero() {
        let s = chair_recursion(0).unwrap();
        assert_eq!(s.points(0, 0), vec![(0, 0)]);
        for k in 1..4 {
            assert!(s.points(k, 0).is_empty());
        }
    }

    #[test]
    fn level_one() {
        let s = chair_recursion(1).unwrap();
        assert_eq!(s.points(0, 1), vec![(0, 0)]);
        assert_eq!(s.points(1, 1), vec![(0, 1), (1, 0)]);
        assert_eq!(s.points(2, 1), vec![(1, 1)]);
        // n₃ = 1, so no point of orientation 3 appears at level 1
        assert!(s.points(3, 1).is_empty());
        assert_eq!(square(1).unwrap(), ((0, 0), 2));
    }

    #[test]
    fn counts_and_square() {
        let s = chair_recursion(6).unwrap();
        for i in 0..=6 {
            assert_eq!(s.level(i).counts().iter().sum::<usize>(), 1 << (2 * i));
        }
        assert_eq!(s.level(2).len(), 16);
        for (p, _) in s.level(2).iter() {
            assert!(s.level(2).contains(p));
        }
        assert!(chair_recursion(13).is_err());
    }

    #[test]
    fn periodicity_offset() {
        let s = chair_recursion(8).unwrap();
        for i in 0..=5 {
            assert_eq!(minimal_period_exponent(&s, i), Some(i + 2), "i={i}");
        }
    }

    #[test]
    fn conjugated_maps_are_integral() {
        let m = m_maps();
        for i in 0..6 {
            let ti = t_power(i);
            let inv = ti.inverse().unwrap();
            for ml in &m {
                assert!(ti.compose(ml).compose(&inv).is_integral());
            }
        }
    }
}
