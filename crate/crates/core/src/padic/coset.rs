use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::{big_pow, Rational};

use super::tower::MatrixTower;
use super::valuation::{modulo, require_prime, valuation_int, Valuation};

/// The completed group in which cosets live: `Ẑ_p^dim`, or the profinite
/// completion of `ℤ²` along a matrix `θ`.
#[derive(Clone, Debug)]
pub enum Space {
    Padic { p: u64, dim: usize },
    Matrix(Arc<MatrixTower>),
}

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Space::Padic { p, dim }, Space::Padic { p: q, dim: e }) => p == q && dim == e,
            (Space::Matrix(a), Space::Matrix(b)) => a.theta == b.theta,
            _ => false,
        }
    }
}

impl Eq for Space {}

impl Space {
    pub fn padic(p: u64, dim: usize) -> Result<Space> {
        require_prime(p)?;
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        Ok(Space::Padic { p, dim })
    }

    pub fn matrix(tower: Arc<MatrixTower>) -> Space {
        Space::Matrix(tower)
    }

    pub fn dim(&self) -> usize {
        match self {
            Space::Padic { dim, .. } => *dim,
            Space::Matrix(_) => 2,
        }
    }

    /// Number of level-`k+1` cosets inside one level-`k` coset.
    pub fn branching(&self) -> BigInt {
        match self {
            Space::Padic { p, dim } => big_pow(*p, *dim as u32),
            Space::Matrix(t) => t.det_abs(),
        }
    }

    /// Haar measure of a single level-`k` coset.
    pub fn coset_measure(&self, level: u32) -> Rational {
        Rational::new(BigInt::one(), num_traits::pow(self.branching(), level as usize))
    }

    /// Canonical representative of `v` modulo the level-`k` subgroup.
    pub fn reduce(&self, v: &[BigInt], level: u32) -> Result<Vec<BigInt>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        match self {
            Space::Padic { p, .. } => {
                let m = big_pow(*p, level);
                Ok(v.iter().map(|x| modulo(x, &m)).collect())
            }
            Space::Matrix(t) => {
                let r = t.reduce(&[v[0].clone(), v[1].clone()], level)?;
                Ok(r.to_vec())
            }
        }
    }

    /// The cosets of level `level+1` partitioning `center + (level subgroup)`.
    pub fn children(&self, center: &[BigInt], level: u32) -> Result<Vec<Vec<BigInt>>> {
        let mut out = Vec::new();
        match self {
            Space::Padic { p, dim } => {
                let step = big_pow(*p, level);
                let count = p.pow(*dim as u32);
                for idx in 0..count {
                    let mut rem = idx;
                    let mut v = Vec::with_capacity(*dim);
                    for c in center {
                        let digit = rem % p;
                        rem /= p;
                        v.push(c + &step * BigInt::from(digit));
                    }
                    out.push(self.reduce(&v, level + 1)?);
                }
            }
            Space::Matrix(t) => {
                let tk = t.theta.pow(level);
                for rep in t.hnf(1)?.representatives() {
                    let s = tk.apply(&rep);
                    let v = vec![&center[0] + &s[0], &center[1] + &s[1]];
                    out.push(self.reduce(&v, level + 1)?);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    fn to_json_header(&self) -> Vec<(&'static str, Value)> {
        match self {
            Space::Padic { p, dim } => vec![("p", json!(p)), ("dim", json!(dim))],
            Space::Matrix(t) => vec![
                (
                    "theta",
                    json!([
                        [big_json(&t.theta.m[0][0]), big_json(&t.theta.m[0][1])],
                        [big_json(&t.theta.m[1][0]), big_json(&t.theta.m[1][1])]
                    ]),
                ),
                ("dim", json!(2)),
            ],
        }
    }
}

/// Integer as a JSON number when it fits in `i64`, otherwise a decimal string.
pub fn big_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

/// `center + G_level`, with the center stored reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coset {
    pub level: u32,
    pub center: Vec<BigInt>,
}

impl Coset {
    pub fn new(space: &Space, center: &[BigInt], level: u32) -> Result<Coset> {
        Ok(Coset { level, center: space.reduce(center, level)? })
    }

    pub fn from_i64(space: &Space, center: &[i64], level: u32) -> Result<Coset> {
        let c: Vec<BigInt> = center.iter().map(|&x| BigInt::from(x)).collect();
        Coset::new(space, &c, level)
    }

    /// `center + scale·p^level·Ẑ_p^d`; the scale must be a power of `p` and is
    /// folded into the level.
    pub fn with_scale(space: &Space, center: &[BigInt], level: u32, scale: &BigInt) -> Result<Coset> {
        let p = match space {
            Space::Padic { p, .. } => *p,
            Space::Matrix(_) if scale.is_one() => return Coset::new(space, center, level),
            Space::Matrix(_) => return Err(Error::IncompatibleSpaces("scaled cosets need a p-adic space".into())),
        };
        let bad = || Error::ScaleNotPowerOfP { scale: scale.to_string(), p };
        if *scale <= BigInt::zero() {
            return Err(bad());
        }
        let extra = match valuation_int(scale, p) {
            Valuation::Finite(v) => v as u32,
            Valuation::Infinite => return Err(bad()),
        };
        if big_pow(p, extra) != *scale {
            return Err(bad());
        }
        Coset::new(space, center, level + extra)
    }

    /// True when `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Coset, space: &Space) -> Result<bool> {
        if self.level < other.level {
            return Ok(false);
        }
        Ok(space.reduce(&self.center, other.level)? == other.center)
    }

    pub fn contains(&self, x: &[BigInt], space: &Space) -> Result<bool> {
        Ok(space.reduce(x, self.level)? == self.center)
    }

    pub fn measure(&self, space: &Space) -> Rational {
        space.coset_measure(self.level)
    }

    pub fn parent(&self, space: &Space) -> Result<Option<Coset>> {
        if self.level == 0 {
            return Ok(None);
        }
        Coset::new(space, &self.center, self.level - 1).map(Some)
    }

    pub fn display(&self, space: &Space) -> String {
        let c: Vec<String> = self.center.iter().map(|x| x.to_string()).collect();
        let c = if c.len() == 1 { c[0].clone() } else { format!("({})", c.join(",")) };
        match space {
            Space::Padic { p, dim } => {
                let m = big_pow(*p, self.level);
                if *dim == 1 {
                    format!("{c}+{m}Z{p}")
                } else {
                    format!("{c}+{m}Z{p}^{dim}")
                }
            }
            Space::Matrix(_) => format!("{c}+theta^{}G", self.level),
        }
    }
}

/// A finite union of cosets in one space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetUnion {
    pub space: Space,
    pub cosets: Vec<Coset>,
}

impl CosetUnion {
    pub fn empty(space: Space) -> Self {
        CosetUnion { space, cosets: Vec::new() }
    }

    pub fn full(space: Space) -> Self {
        let c = Coset { level: 0, center: vec![BigInt::zero(); space.dim()] };
        CosetUnion { space, cosets: vec![c] }
    }

    /// Raw (not normalized) union; cosets must live in `space`.
    pub fn from_cosets(space: Space, cosets: Vec<Coset>) -> Result<Self> {
        for c in &cosets {
            if c.center.len() != space.dim() {
                return Err(Error::DimensionMismatch { expected: space.dim(), got: c.center.len() });
            }
        }
        Ok(CosetUnion { space, cosets })
    }

    pub fn push(&mut self, c: Coset) {
        self.cosets.push(c);
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    pub fn max_level(&self) -> u32 {
        self.cosets.iter().map(|c| c.level).max().unwrap_or(0)
    }

    fn check_space(&self, other: &CosetUnion) -> Result<()> {
        if self.space != other.space {
            return Err(Error::IncompatibleSpaces(format!("{:?} vs {:?}", self.space, other.space)));
        }
        Ok(())
    }

    /// Disjoint, maximally merged, canonically sorted form of the same set.
    pub fn normalize(&self) -> Result<CosetUnion> {
        let space = &self.space;
        let mut by_level: BTreeMap<u32, HashSet<Vec<BigInt>>> = BTreeMap::new();
        let mut sorted = self.cosets.clone();
        sorted.sort();
        sorted.dedup();
        // drop cosets covered by a coarser member
        for c in sorted {
            let mut covered = false;
            for (&lvl, set) in by_level.range(..=c.level) {
                if set.contains(&space.reduce(&c.center, lvl)?) {
                    covered = true;
                    break;
                }
            }
            if !covered {
                by_level.entry(c.level).or_default().insert(c.center);
            }
        }
        // merge complete sibling families bottom-up
        let branching = space.branching().to_usize().unwrap_or(usize::MAX);
        let max = by_level.keys().next_back().copied().unwrap_or(0);
        for lvl in (1..=max).rev() {
            let Some(set) = by_level.get(&lvl) else { continue };
            let mut families: HashMap<Vec<BigInt>, usize> = HashMap::new();
            for c in set {
                *families.entry(space.reduce(c, lvl - 1)?).or_default() += 1;
            }
            let full: Vec<Vec<BigInt>> =
                families.into_iter().filter(|(_, n)| *n == branching).map(|(p, _)| p).collect();
            if full.is_empty() {
                continue;
            }
            let full_set: HashSet<Vec<BigInt>> = full.iter().cloned().collect();
            let set = by_level.get_mut(&lvl).unwrap();
            let mut keep = HashSet::new();
            for c in set.drain() {
                if !full_set.contains(&space.reduce(&c, lvl - 1)?) {
                    keep.insert(c);
                }
            }
            *set = keep;
            by_level.entry(lvl - 1).or_default().extend(full);
        }
        let mut cosets: Vec<Coset> = by_level
            .into_iter()
            .flat_map(|(level, set)| set.into_iter().map(move |center| Coset { level, center }))
            .collect();
        cosets.sort();
        Ok(CosetUnion { space: self.space.clone(), cosets })
    }

    /// Exact Haar measure of the union.
    pub fn measure(&self) -> Result<Rational> {
        let n = self.normalize()?;
        Ok(n.cosets.iter().map(|c| c.measure(&n.space)).sum())
    }

    /// Sum of member measures without normalizing (exact when already disjoint).
    pub fn measure_sum(&self) -> Rational {
        self.cosets.iter().map(|c| c.measure(&self.space)).sum()
    }

    pub fn contains(&self, x: &[BigInt]) -> Result<bool> {
        if x.len() != self.space.dim() {
            return Err(Error::DimensionMismatch { expected: self.space.dim(), got: x.len() });
        }
        let mut cache: HashMap<u32, Vec<BigInt>> = HashMap::new();
        for c in &self.cosets {
            if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(c.level) {
                e.insert(self.space.reduce(x, c.level)?);
            }
            if cache[&c.level] == c.center {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn contains_i64(&self, x: &[i64]) -> Result<bool> {
        let v: Vec<BigInt> = x.iter().map(|&t| BigInt::from(t)).collect();
        self.contains(&v)
    }

    /// Hash index for repeated membership queries.
    pub fn index(&self) -> CosetIndex {
        let mut levels: BTreeMap<u32, HashSet<Vec<BigInt>>> = BTreeMap::new();
        for c in &self.cosets {
            levels.entry(c.level).or_default().insert(c.center.clone());
        }
        CosetIndex { space: self.space.clone(), levels }
    }

    pub fn union(&self, other: &CosetUnion) -> Result<CosetUnion> {
        self.check_space(other)?;
        let mut cosets = self.cosets.clone();
        cosets.extend(other.cosets.iter().cloned());
        CosetUnion { space: self.space.clone(), cosets }.normalize()
    }

    pub fn intersection(&self, other: &CosetUnion) -> Result<CosetUnion> {
        self.check_space(other)?;
        let mut out = Vec::new();
        for a in &self.cosets {
            for b in &other.cosets {
                if a.is_subset_of(b, &self.space)? {
                    out.push(a.clone());
                } else if b.is_subset_of(a, &self.space)? {
                    out.push(b.clone());
                }
            }
        }
        CosetUnion { space: self.space.clone(), cosets: out }.normalize()
    }

    /// Two cosets meet iff one contains the other, i.e. the finer center
    /// reduces to the coarser one.
    pub fn is_disjoint(&self, other: &CosetUnion) -> Result<bool> {
        self.check_space(other)?;
        fn by_level(u: &CosetUnion) -> BTreeMap<u32, HashSet<&Vec<BigInt>>> {
            let mut m: BTreeMap<u32, HashSet<&Vec<BigInt>>> = BTreeMap::new();
            for c in &u.cosets {
                m.entry(c.level).or_default().insert(&c.center);
            }
            m
        }
        let (mine, theirs) = (by_level(self), by_level(other));
        for (fine, coarse) in [(self, &theirs), (other, &mine)] {
            for c in &fine.cosets {
                for (&level, centers) in coarse.range(..=c.level) {
                    if centers.contains(&self.space.reduce(&c.center, level)?) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// `self ⊆ other` as sets.
    pub fn is_subset_of(&self, other: &CosetUnion) -> Result<bool> {
        let me = self.normalize()?;
        Ok(me.intersection(other)?.cosets == me.cosets)
    }

    /// `enclosing ∖ self`, as a normalized union.
    pub fn complement_in(&self, enclosing: &Coset) -> Result<CosetUnion> {
        let space = &self.space;
        let members = self.normalize()?.cosets;
        let mut out = Vec::new();
        let mut stack = vec![enclosing.clone()];
        while let Some(c) = stack.pop() {
            let mut covered = false;
            let mut splits = false;
            for m in &members {
                if c.is_subset_of(m, space)? {
                    covered = true;
                    break;
                }
                if m.is_subset_of(&c, space)? {
                    splits = true;
                }
            }
            if covered {
                continue;
            }
            if !splits {
                out.push(c);
                continue;
            }
            for child in space.children(&c.center, c.level)? {
                stack.push(Coset { level: c.level + 1, center: child });
            }
        }
        CosetUnion { space: space.clone(), cosets: out }.normalize()
    }

    /// Canonical JSON: `{"p", "dim", "cosets": [{"center", "level", "scale"}]}`.
    pub fn to_json(&self) -> Value {
        let mut sorted = self.cosets.clone();
        sorted.sort();
        let cosets: Vec<Value> = sorted
            .iter()
            .map(|c| {
                json!({
                    "center": c.center.iter().map(big_json).collect::<Vec<_>>(),
                    "level": c.level,
                    "scale": 1,
                })
            })
            .collect();
        let mut map = serde_json::Map::new();
        for (k, v) in self.space.to_json_header() {
            map.insert(k.to_string(), v);
        }
        map.insert("cosets".into(), Value::Array(cosets));
        Value::Object(map)
    }

    pub fn to_canonical_string(&self) -> String {
        self.to_json().to_string()
    }
}

impl fmt::Display for CosetUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cosets.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.cosets.iter().map(|c| c.display(&self.space)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Per-level hash sets of coset centers.
#[derive(Clone, Debug)]
pub struct CosetIndex {
    space: Space,
    levels: BTreeMap<u32, HashSet<Vec<BigInt>>>,
}

impl CosetIndex {
    pub fn contains(&self, x: &[BigInt]) -> Result<bool> {
        for (&lvl, set) in &self.levels {
            if set.contains(&self.space.reduce(x, lvl)?) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Level of the member coset containing `x`, if any.
    pub fn level_of(&self, x: &[BigInt]) -> Result<Option<u32>> {
        for (&lvl, set) in &self.levels {
            if set.contains(&self.space.reduce(x, lvl)?) {
                return Ok(Some(lvl));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, IntMatrix2};

    fn z3() -> Space {
        Space::padic(3, 1).unwrap()
    }

    fn cs(space: &Space, list: &[(i64, u32)]) -> CosetUnion {
        let cosets = list.iter().map(|&(c, l)| Coset::from_i64(space, &[c], l).unwrap()).collect();
        CosetUnion::from_cosets(space.clone(), cosets).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let s = z3();
        let n = cs(&s, &[(0, 1), (1, 1), (2, 1)]).normalize().unwrap();
        assert_eq!(n, CosetUnion::full(s.clone()));
        let n = cs(&s, &[(1, 2), (1, 2)]).normalize().unwrap();
        assert_eq!(n.cosets.len(), 1);
        let u = cs(&s, &[(0, 2), (4, 3)]);
        assert_eq!(u.normalize().unwrap().cosets, u.cosets);
        // nested removal and cascading merge
        let n = cs(&s, &[(0, 2), (3, 2), (6, 2), (1, 1), (2, 1), (5, 3)]).normalize().unwrap();
        assert_eq!(n, CosetUnion::full(s));
    }

    #[test]
    fn measures() {
        let s = z3();
        assert_eq!(cs(&s, &[(1, 2)]).measure().unwrap(), rat(1, 9));
        assert_eq!(CosetUnion::full(s.clone()).measure().unwrap(), rat(1, 1));
        let s2 = Space::padic(2, 2).unwrap();
        let c = Coset::with_scale(&s2, &[0.into(), 0.into()], 0, &BigInt::from(4)).unwrap();
        assert_eq!(c.level, 2);
        assert_eq!(c.measure(&s2), rat(1, 16));
        assert!(Coset::with_scale(&s2, &[0.into(), 0.into()], 0, &BigInt::from(6)).is_err());
    }

    #[test]
    fn membership() {
        let s = z3();
        let a = cs(&s, &[(1, 2), (4, 3)]);
        assert!(a.contains_i64(&[19]).unwrap());
        assert!(!a.contains_i64(&[2]).unwrap());
        assert!(a.contains_i64(&[1, 2]).is_err());
        let c = cs(&s, &[(0, 2), (-3, 3)]);
        assert!(c.contains_i64(&[24]).unwrap());
        assert!(c.index().contains(&[24.into()]).unwrap());
    }

    #[test]
    fn complement_adds_up() {
        let s = z3();
        let u = cs(&s, &[(1, 2), (4, 3), (13, 4)]);
        let enc = Coset::from_i64(&s, &[1], 1).unwrap();
        let comp = u.complement_in(&enc).unwrap();
        assert!(comp.is_disjoint(&u).unwrap());
        assert_eq!(comp.measure().unwrap() + u.measure().unwrap(), rat(1, 3));
    }

    #[test]
    fn matrix_cosets() {
        let t = Arc::new(MatrixTower::new(IntMatrix2::new(2, 2, 1, 2), 10).unwrap());
        let s = Space::matrix(t);
        let kids = s.children(&[0.into(), 0.into()], 0).unwrap();
        assert_eq!(kids.len(), 2);
        let u = CosetUnion::from_cosets(s.clone(), kids.into_iter().map(|center| Coset { level: 1, center }).collect())
            .unwrap();
        assert_eq!(u.normalize().unwrap(), CosetUnion::full(s.clone()));
        let c = Coset::from_i64(&s, &[1, 0], 3).unwrap();
        assert_eq!(c.measure(&s), rat(1, 8));
        let json = CosetUnion::from_cosets(s, vec![c]).unwrap().to_canonical_string();
        assert!(json.starts_with(r#"{"theta":[[2,2],[1,2]],"dim":2"#));
    }

    #[test]
    fn canonical_json() {
        let s = z3();
        let u = cs(&s, &[(4, 3), (1, 2)]).normalize().unwrap();
        assert_eq!(
            u.to_canonical_string(),
            r#"{"p":3,"dim":1,"cosets":[{"center":[1],"level":2,"scale":1},{"center":[4],"level":3,"scale":1}]}"#
        );
    }
}
