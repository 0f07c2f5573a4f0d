use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactnum::QuadRational;
use crate::padic::{Coset, CosetUnion, Space};

/// Interval on the Euclidean internal line with exact endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: QuadRational,
    pub hi: QuadRational,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn closed(lo: QuadRational, hi: QuadRational) -> Self {
        Interval { lo, hi, lo_open: false, hi_open: false }
    }

    pub fn open(lo: QuadRational, hi: QuadRational) -> Self {
        Interval { lo, hi, lo_open: true, hi_open: true }
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_open || self.hi_open,
            Ordering::Less => false,
        }
    }

    pub fn length(&self) -> QuadRational {
        if self.is_empty() {
            QuadRational::zero()
        } else {
            &self.hi - &self.lo
        }
    }

    pub fn contains(&self, x: &QuadRational) -> bool {
        let lo_ok = match x.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => !self.lo_open,
            Ordering::Less => false,
        };
        let hi_ok = match x.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => !self.hi_open,
            Ordering::Greater => false,
        };
        lo_ok && hi_ok
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        if self.is_empty() {
            return true;
        }
        let lo_ok = match self.lo.cmp(&other.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_open || !other.lo_open,
            Ordering::Less => false,
        };
        let hi_ok = match self.hi.cmp(&other.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_open || !other.hi_open,
            Ordering::Greater => false,
        };
        lo_ok && hi_ok
    }

    /// `x` is an endpoint of the interval.
    pub fn on_boundary(&self, x: &QuadRational) -> bool {
        *x == self.lo || *x == self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { "(" } else { "[" },
            self.lo,
            self.hi,
            if self.hi_open { ")" } else { "]" }
        )
    }
}

/// One window piece: a profinite coset, times an interval when the scheme
/// has a Euclidean factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub interval: Option<Interval>,
    pub coset: Coset,
}

/// A window as a finite union of cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub space: Space,
    pub cells: Vec<Cell>,
}

impl Window {
    pub fn empty(space: Space) -> Self {
        Window { space, cells: Vec::new() }
    }

    pub fn from_union(u: &CosetUnion) -> Self {
        Window {
            space: u.space.clone(),
            cells: u.cosets.iter().map(|c| Cell { interval: None, coset: c.clone() }).collect(),
        }
    }

    /// The whole internal group (times `interval` if given).
    pub fn full(space: Space, interval: Option<Interval>) -> Self {
        let dim = space.dim();
        Window { space, cells: vec![Cell { interval, coset: Coset { level: 0, center: vec![BigInt::from(0); dim] } }] }
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(|c| c.interval.as_ref().is_some_and(Interval::is_empty))
    }

    /// Smallest closed interval containing every cell's Euclidean part.
    pub fn euclidean_hull(&self) -> Result<Option<(QuadRational, QuadRational)>> {
        let mut hull: Option<(QuadRational, QuadRational)> = None;
        for c in &self.cells {
            let Some(iv) = &c.interval else {
                return Err(Error::Precondition("cell without Euclidean part".into()));
            };
            if iv.is_empty() {
                continue;
            }
            hull = Some(match hull {
                None => (iv.lo.clone(), iv.hi.clone()),
                Some((l, h)) => (l.min(iv.lo.clone()), h.max(iv.hi.clone())),
            });
        }
        Ok(hull)
    }

    /// Exact Haar measure when cells are pairwise disjoint
    /// (interval length × coset measure, summed).
    pub fn measure(&self) -> QuadRational {
        self.cells.iter().fold(QuadRational::zero(), |acc, c| {
            let m = QuadRational::from_rational(c.coset.measure(&self.space));
            let len = c.interval.as_ref().map_or(QuadRational::one(), Interval::length);
            &acc + &(&m * &len)
        })
    }

    pub fn index(&self) -> WindowIndex<'_> {
        let mut by_key: HashMap<(u32, Vec<BigInt>), Vec<Option<&Interval>>> = HashMap::new();
        let mut levels: Vec<u32> = Vec::new();
        for c in &self.cells {
            if !levels.contains(&c.coset.level) {
                levels.push(c.coset.level);
            }
            by_key.entry((c.coset.level, c.coset.center.clone())).or_default().push(c.interval.as_ref());
        }
        levels.sort_unstable();
        WindowIndex { space: &self.space, levels, by_key }
    }
}

/// Hash lookup of window cells by `(level, residue)`.
pub struct WindowIndex<'a> {
    space: &'a Space,
    levels: Vec<u32>,
    by_key: HashMap<(u32, Vec<BigInt>), Vec<Option<&'a Interval>>>,
}

/// Membership of an internal point in a window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Inside,
    /// On an interval endpoint of a matching cell, not inside any cell.
    Boundary,
    Outside,
}

impl WindowIndex<'_> {
    pub fn classify(&self, v: &[BigInt], euclid: Option<&QuadRational>) -> Result<Membership> {
        let mut boundary = false;
        for &lvl in &self.levels {
            let r = self.space.reduce(v, lvl)?;
            let Some(ivs) = self.by_key.get(&(lvl, r)) else { continue };
            for iv in ivs {
                match (iv, euclid) {
                    (None, _) => return Ok(Membership::Inside),
                    (Some(iv), Some(x)) => {
                        if iv.contains(x) {
                            return Ok(Membership::Inside);
                        }
                        if iv.on_boundary(x) {
                            boundary = true;
                        }
                    }
                    (Some(_), None) => return Err(Error::Precondition("point lacks a Euclidean coordinate".into())),
                }
            }
        }
        Ok(if boundary { Membership::Boundary } else { Membership::Outside })
    }

    pub fn contains(&self, v: &[BigInt], euclid: Option<&QuadRational>) -> Result<bool> {
        Ok(self.classify(v, euclid)? == Membership::Inside)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn q(a: i64, b: i64) -> QuadRational {
        QuadRational::new(int(a), int(b))
    }

    #[test]
    fn interval_semantics() {
        let i = Interval::open(q(0, 0), q(1, 0));
        assert!(!i.contains(&q(0, 0)));
        assert!(i.contains(&QuadRational::new(rat(1, 2), int(0))));
        assert!(i.on_boundary(&q(1, 0)));
        assert!(i.is_subset_of(&Interval::closed(q(0, 0), q(1, 0))));
        assert!(!Interval::closed(q(0, 0), q(1, 0)).is_subset_of(&i));
        assert!(Interval::open(q(1, 0), q(1, 0)).is_empty());
        assert_eq!(Interval::closed(q(-1, -1), q(0, 0)).length(), q(1, 1));
    }

    #[test]
    fn window_index() {
        let space = Space::padic(3, 1).unwrap();
        let u = CosetUnion::from_cosets(
            space.clone(),
            vec![Coset::from_i64(&space, &[1], 2).unwrap(), Coset::from_i64(&space, &[4], 3).unwrap()],
        )
        .unwrap();
        let w = Window::from_union(&u);
        let idx = w.index();
        assert!(idx.contains(&[BigInt::from(19)], None).unwrap());
        assert!(!idx.contains(&[BigInt::from(2)], None).unwrap());
        assert_eq!(w.measure(), QuadRational::from_rational(rat(1, 9) + rat(1, 27)));
    }
}
