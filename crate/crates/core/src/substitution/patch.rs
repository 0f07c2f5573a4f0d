use std::collections::HashSet;
use std::fmt::Display;
use std::hash::Hash;
use std::ops::{Add, Mul, Sub};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::system::SubstitutionSystem;
use crate::error::{Error, Result};

/// Longest word a patch may reach before generation is refused.
pub const MAX_PATCH_LETTERS: usize = 50_000_000;

/// Two-sided word around the origin: `left_word` ends at 0, `right_word`
/// starts at 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointPatch {
    pub seed: (char, char),
    pub iterations: u32,
    pub left_word: String,
    pub right_word: String,
}

impl FixedPointPatch {
    pub fn len(&self) -> usize {
        self.left_word.chars().count() + self.right_word.chars().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `left_word` followed by `right_word`.
    pub fn word(&self) -> String {
        format!("{}{}", self.left_word, self.right_word)
    }
}

/// `σⁿ(l) | σⁿ(r)` for a legal seed `l|r`.
pub fn fixed_point_patch(s: &SubstitutionSystem, seed: (char, char), n: u32) -> Result<FixedPointPatch> {
    if s.index_of(seed.0).is_none() || s.index_of(seed.1).is_none() || !s.is_legal_pair(seed.0, seed.1)? {
        return Err(Error::IllegalSeed { left: seed.0, right: seed.1 });
    }
    let mut left = seed.0.to_string();
    let mut right = seed.1.to_string();
    for _ in 0..n {
        left = s.apply(&left)?;
        right = s.apply(&right)?;
        if left.len() + right.len() > MAX_PATCH_LETTERS {
            return Err(Error::PatchTooLarge(left.len() + right.len()));
        }
    }
    Ok(FixedPointPatch { seed, iterations: n, left_word: left, right_word: right })
}

/// Which end of each tile is recorded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Anchor {
    LeftEnd,
    RightEnd,
}

/// Exact coordinate types usable for tile layouts.
pub trait Coord:
    Clone + Ord + Hash + Display + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
}

impl<T> Coord for T where T: Clone + Ord + Hash + Display + Zero + Add<Output = T> + Sub<Output = T> + Mul<Output = T> {}

/// Anchors of a laid-out patch, per letter, with the covered extent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricPointSets<T> {
    pub letters: Vec<char>,
    pub per_letter: Vec<Vec<T>>,
    pub anchor: Anchor,
    /// Interval `[lo, hi]` covered by the tiles.
    pub lo: T,
    pub hi: T,
}

impl<T: Coord> GeometricPointSets<T> {
    pub fn of(&self, letter: char) -> &[T] {
        let i = self.letters.iter().position(|&c| c == letter).expect("letter in alphabet");
        &self.per_letter[i]
    }

    /// All anchors with their letters, sorted by coordinate.
    pub fn labeled(&self) -> Vec<(T, char)> {
        let mut v: Vec<(T, char)> = self
            .letters
            .iter()
            .zip(&self.per_letter)
            .flat_map(|(&c, pts)| pts.iter().map(move |x| (x.clone(), c)))
            .collect();
        v.sort();
        v
    }

    pub fn all(&self) -> Vec<T> {
        self.labeled().into_iter().map(|(x, _)| x).collect()
    }

    /// Anchors of `letter` within `[lo, hi]`.
    pub fn in_range(&self, letter: char, lo: &T, hi: &T) -> Vec<T> {
        self.of(letter).iter().filter(|x| *x >= lo && *x <= hi).cloned().collect()
    }

    /// CSV with columns `letter,coordinate`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("letter,coordinate\n");
        for (x, c) in self.labeled() {
            s.push_str(&format!("{c},{x}\n"));
        }
        s
    }
}

/// Lays the patch out with `lengths` (alphabet order) and records anchors.
pub fn geometric_points<T: Coord>(
    s: &SubstitutionSystem,
    patch: &FixedPointPatch,
    lengths: &[T],
    anchor: Anchor,
) -> Result<GeometricPointSets<T>> {
    if lengths.len() != s.size() {
        return Err(Error::DimensionMismatch { expected: s.size(), got: lengths.len() });
    }
    if lengths.iter().any(|l| *l <= T::zero()) {
        return Err(Error::Precondition("tile lengths must be positive".into()));
    }
    let mut per_letter: Vec<Vec<T>> = vec![Vec::new(); s.size()];
    let idx = |c: char| s.index_of(c).ok_or_else(|| Error::InvalidSubstitution(format!("unknown letter {c:?}")));
    let mut x = T::zero();
    for c in patch.right_word.chars() {
        let i = idx(c)?;
        let next = x.clone() + lengths[i].clone();
        per_letter[i].push(match anchor {
            Anchor::LeftEnd => x.clone(),
            Anchor::RightEnd => next.clone(),
        });
        x = next;
    }
    let hi = x;
    let mut x = T::zero();
    for c in patch.left_word.chars().rev() {
        let i = idx(c)?;
        let prev = x.clone() - lengths[i].clone();
        per_letter[i].push(match anchor {
            Anchor::LeftEnd => prev.clone(),
            Anchor::RightEnd => x.clone(),
        });
        x = prev;
    }
    let lo = x;
    for v in &mut per_letter {
        v.sort();
    }
    Ok(GeometricPointSets { letters: s.alphabet().to_vec(), per_letter, anchor, lo, hi })
}

/// Outcome of a self-similarity test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfSimilarity<T> {
    pub holds: bool,
    pub checked: usize,
    /// Pairs `(x, factor·x)` with `factor·x` missing from the target set.
    pub counterexamples: Vec<(T, T)>,
}

/// Checks `factor·x ∈ target` for every `x ∈ source` with `factor·x ∈ [lo, hi]`.
///
/// The range must lie inside the patch extent.
pub fn self_similarity_check<T: Coord>(
    source: &[T],
    target: &[T],
    factor: &T,
    range: (&T, &T),
    extent: (&T, &T),
) -> Result<SelfSimilarity<T>> {
    let (lo, hi) = range;
    if lo < extent.0 || hi > extent.1 {
        return Err(Error::RangeExceedsPatch {
            lo: lo.to_string(),
            hi: hi.to_string(),
            patch_lo: extent.0.to_string(),
            patch_hi: extent.1.to_string(),
        });
    }
    let set: HashSet<&T> = target.iter().collect();
    let mut checked = 0;
    let mut counterexamples = Vec::new();
    for x in source {
        let y = factor.clone() * x.clone();
        if &y < lo || &y > hi {
            continue;
        }
        checked += 1;
        if !set.contains(&y) {
            counterexamples.push((x.clone(), y));
        }
    }
    Ok(SelfSimilarity { holds: counterexamples.is_empty(), checked, counterexamples })
}

/// Result of replacing a two-letter block by a new letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recoded {
    pub system: SubstitutionSystem,
    pub patch: FixedPointPatch,
    /// `(first, second, new)`, or `None` when the pair never occurs.
    pub merge: Option<(char, char, char)>,
}

impl Recoded {
    /// Tile lengths on the recoded alphabet: the new letter has the combined length.
    pub fn lengths<T: Coord>(&self, original: &SubstitutionSystem, lengths: &[T]) -> Vec<T> {
        self.system
            .alphabet()
            .iter()
            .map(|&c| match self.merge {
                Some((x, y, n)) if c == n => {
                    lengths[original.index_of(x).unwrap()].clone() + lengths[original.index_of(y).unwrap()].clone()
                }
                _ => lengths[original.index_of(c).unwrap()].clone(),
            })
            .collect()
    }
}

fn recode_word(w: &str, x: char, y: char, n: char, what: &str) -> Result<String> {
    let chars: Vec<char> = w.chars().collect();
    let mut out = String::with_capacity(chars.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == x {
            if chars.get(i + 1) == Some(&y) {
                out.push(n);
                i += 2;
                continue;
            }
            return Err(Error::PairNotBlock {
                pair: format!("{x}{y}"),
                detail: format!("{what}: {x:?} at position {i} is not followed by {y:?}"),
            });
        }
        out.push(chars[i]);
        i += 1;
    }
    Ok(out)
}

/// Replaces every block `pair` by `new_letter` and derives the induced substitution.
pub fn recode_pairs(s: &SubstitutionSystem, patch: &FixedPointPatch, pair: &str, new_letter: char) -> Result<Recoded> {
    let p: Vec<char> = pair.chars().collect();
    if p.len() != 2 {
        return Err(Error::Precondition(format!("pair {pair:?} must have two letters")));
    }
    let (x, y) = (p[0], p[1]);
    if s.index_of(new_letter).is_some() {
        return Err(Error::Precondition(format!("letter {new_letter:?} already in use")));
    }
    if !patch.word().contains(pair) {
        return Ok(Recoded { system: s.clone(), patch: patch.clone(), merge: None });
    }
    let left = recode_word(&patch.left_word, x, y, new_letter, "left word")?;
    let right = recode_word(&patch.right_word, x, y, new_letter, "right word")?;
    let expand = |c: char| if c == new_letter { pair.to_string() } else { c.to_string() };
    let mut alphabet: Vec<char> = Vec::new();
    for c in s.alphabet() {
        let mapped = if *c == x { new_letter } else { *c };
        if mapped == y {
            continue;
        }
        alphabet.push(mapped);
    }
    let mut rules: Vec<(char, String)> = Vec::new();
    for &c in &alphabet {
        let img = s.apply(&expand(c))?;
        rules.push((c, recode_word(&img, x, y, new_letter, "induced image")?));
    }
    // keep the second letter only if it survives on its own
    if rules.iter().any(|(_, w)| w.contains(y)) || left.contains(y) || right.contains(y) {
        let img = s.apply(&y.to_string())?;
        rules.push((y, recode_word(&img, x, y, new_letter, "induced image")?));
    }
    let system = SubstitutionSystem::new(&rules)?;
    let seed = (left.chars().last().unwrap_or(new_letter), right.chars().next().unwrap_or(new_letter));
    let patch = FixedPointPatch { seed, iterations: patch.iterations, left_word: left, right_word: right };
    Ok(Recoded { system, patch, merge: Some((x, y, new_letter)) })
}
