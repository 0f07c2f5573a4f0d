use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A substitution on a finite alphabet of `char` letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionSystem {
    alphabet: Vec<char>,
    rules: Vec<String>,
}

impl SubstitutionSystem {
    /// Builds a system from `(letter, image)` pairs; alphabet order follows the
    /// order of the pairs.
    pub fn new<S: AsRef<str>>(rules: &[(char, S)]) -> Result<Self> {
        let alphabet: Vec<char> = rules.iter().map(|(c, _)| *c).collect();
        for (i, c) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(c) {
                return Err(Error::InvalidSubstitution(format!("letter {c:?} has two rules")));
            }
        }
        let mut images = Vec::with_capacity(rules.len());
        for (c, w) in rules {
            let w = w.as_ref();
            if w.is_empty() {
                return Err(Error::InvalidSubstitution(format!("image of {c:?} is empty")));
            }
            if let Some(bad) = w.chars().find(|x| !alphabet.contains(x)) {
                return Err(Error::InvalidSubstitution(format!("image of {c:?} uses {bad:?}, which has no rule")));
            }
            images.push(w.to_string());
        }
        Ok(SubstitutionSystem { alphabet, rules: images })
    }

    /// Parses lines of the form `a -> ab`; blank lines and `#` comments are
    /// skipped. Alphabet order is the order of first appearance.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs: Vec<(char, String)> = Vec::new();
        let mut order: Vec<char> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |detail: &str| Error::RuleParse { line: i + 1, detail: detail.to_string() };
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| err("expected `x -> word`"))?;
            let lhs = lhs.trim();
            let rhs = rhs.trim();
            let mut chars = lhs.chars();
            let letter = match (chars.next(), chars.next()) {
                (Some(c), None) if !c.is_whitespace() => c,
                _ => return Err(err("left side must be a single letter")),
            };
            if rhs.is_empty() || rhs.chars().any(char::is_whitespace) {
                return Err(err("right side must be a nonempty word without spaces"));
            }
            for c in std::iter::once(letter).chain(rhs.chars()) {
                if !order.contains(&c) {
                    order.push(c);
                }
            }
            pairs.push((letter, rhs.to_string()));
        }
        let by_letter: BTreeMap<char, String> = pairs.iter().cloned().collect();
        if by_letter.len() != pairs.len() {
            return Err(Error::InvalidSubstitution("a letter has two rules".into()));
        }
        let ordered: Vec<(char, String)> = order
            .iter()
            .map(|c| {
                by_letter
                    .get(c)
                    .map(|w| (*c, w.clone()))
                    .ok_or_else(|| Error::InvalidSubstitution(format!("letter {c:?} has no rule")))
            })
            .collect::<Result<_>>()?;
        SubstitutionSystem::new(&ordered)
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.alphabet.iter().position(|&x| x == c)
    }

    pub fn image(&self, c: char) -> Option<&str> {
        self.index_of(c).map(|i| self.rules[i].as_str())
    }

    pub fn rules(&self) -> impl Iterator<Item = (char, &str)> {
        self.alphabet.iter().copied().zip(self.rules.iter().map(String::as_str))
    }

    /// Entry `(i, j)` counts letter `i` in the image of letter `j`.
    pub fn matrix(&self) -> Vec<Vec<u64>> {
        let n = self.size();
        let mut m = vec![vec![0u64; n]; n];
        for (j, w) in self.rules.iter().enumerate() {
            for c in w.chars() {
                m[self.index_of(c).unwrap()][j] += 1;
            }
        }
        m
    }

    /// Some power of the matrix is strictly positive (Wielandt bound).
    pub fn is_primitive(&self) -> bool {
        let n = self.size();
        let m: Vec<Vec<bool>> = self.matrix().iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
        let mut p = m.clone();
        let bound = (n - 1) * (n - 1) + 1;
        for _ in 0..bound.max(1) {
            if p.iter().all(|r| r.iter().all(|&x| x)) {
                return true;
            }
            let mut q = vec![vec![false; n]; n];
            for i in 0..n {
                for j in 0..n {
                    q[i][j] = (0..n).any(|k| p[i][k] && m[k][j]);
                }
            }
            p = q;
        }
        p.iter().all(|r| r.iter().all(|&x| x))
    }

    /// One application of the substitution to a word.
    pub fn apply(&self, word: &str) -> Result<String> {
        let mut out = String::new();
        for c in word.chars() {
            out.push_str(self.image(c).ok_or_else(|| Error::InvalidSubstitution(format!("letter {c:?} has no rule")))?);
        }
        Ok(out)
    }

    pub fn iterate(&self, word: &str, n: u32) -> Result<String> {
        let mut w = word.to_string();
        for _ in 0..n {
            w = self.apply(&w)?;
        }
        Ok(w)
    }

    /// Letter counts of a word in alphabet order.
    pub fn counts(&self, word: &str) -> Vec<u64> {
        let mut v = vec![0; self.size()];
        for c in word.chars() {
            if let Some(i) = self.index_of(c) {
                v[i] += 1;
            }
        }
        v
    }

    /// Common image length, when all images have the same length.
    pub fn constant_length(&self) -> Option<usize> {
        let l = self.rules[0].chars().count();
        self.rules.iter().all(|w| w.chars().count() == l).then_some(l)
    }

    /// True when `lr` occurs as an adjacent pair in `σ⁵` of some letter.
    pub fn is_legal_pair(&self, left: char, right: char) -> Result<bool> {
        let pair: String = [left, right].iter().collect();
        for &c in &self.alphabet {
            if self.iterate(&c.to_string(), 5)?.contains(&pair) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Dekking coincidence: the first `(depth, position)` at which every
    /// `σⁿ(x)` carries the same letter.
    pub fn dekking_coincidence(&self, max_depth: u32) -> Result<Option<(u32, usize)>> {
        self.constant_length().ok_or(Error::NotConstantLength)?;
        let mut images: Vec<Vec<char>> = self.alphabet.iter().map(|&c| vec![c]).collect();
        for depth in 1..=max_depth {
            images = images
                .iter()
                .map(|w| self.apply(&w.iter().collect::<String>()).map(|s| s.chars().collect()))
                .collect::<Result<_>>()?;
            let len = images[0].len();
            for j in 0..len {
                let c = images[0][j];
                if images.iter().all(|w| w[j] == c) {
                    return Ok(Some((depth, j)));
                }
            }
        }
        Ok(None)
    }
}

impl fmt::Display for SubstitutionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, w) in self.rules() {
            writeln!(f, "{c} -> {w}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> SubstitutionSystem {
        SubstitutionSystem::parse("a -> ab\nb -> abc\nc -> abcc\n").unwrap()
    }

    #[test]
    fn matrices() {
        assert_eq!(s3().matrix(), vec![vec![1, 1, 1], vec![1, 1, 1], vec![0, 1, 2]]);
        let q = SubstitutionSystem::parse("a -> aab\nb -> abab").unwrap();
        assert_eq!(q.matrix(), vec![vec![2, 2], vec![1, 2]]);
        let id = SubstitutionSystem::parse("x -> x\ny -> y").unwrap();
        assert_eq!(id.matrix(), vec![vec![1, 0], vec![0, 1]]);
        assert!(!id.is_primitive());
        assert!(s3().is_primitive());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(SubstitutionSystem::parse("a -> ab\nb =>"), Err(Error::RuleParse { line: 2, .. })));
        assert!(SubstitutionSystem::parse("a -> ab").is_err());
        assert!(SubstitutionSystem::parse("ab -> a").is_err());
        assert!(SubstitutionSystem::parse("a -> a\na -> a").is_err());
    }

    #[test]
    fn alphabet_order_is_first_appearance() {
        let s = SubstitutionSystem::parse("# comment\nb -> ba\na -> bb").unwrap();
        assert_eq!(s.alphabet(), &['b', 'a']);
    }

    #[test]
    fn coincidence() {
        let rec = SubstitutionSystem::parse("A -> AAc\nc -> Acc").unwrap();
        assert_eq!(rec.dekking_coincidence(4).unwrap(), Some((1, 0)));
        let pd = SubstitutionSystem::parse("a -> ba\nb -> aa").unwrap();
        assert!(pd.dekking_coincidence(4).unwrap().is_some());
        let tm = SubstitutionSystem::parse("a -> ab\nb -> ba").unwrap();
        assert_eq!(tm.dekking_coincidence(8).unwrap(), None);
        assert!(matches!(s3().dekking_coincidence(2), Err(Error::NotConstantLength)));
    }

    #[test]
    fn legality() {
        assert!(s3().is_legal_pair('c', 'a').unwrap());
        assert!(!s3().is_legal_pair('c', 'b').unwrap());
    }
}
