//! Named substitution systems with their default seeds.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exactnum::QuadInt;
use crate::substitution::{pf_data, SubstitutionSystem};

/// A catalog entry.
#[derive(Clone, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub system: SubstitutionSystem,
    pub seed: (char, char),
    /// Known not to be a model set; used as a control.
    pub negative_control: bool,
}

/// Names accepted by [`lookup`]. `chair` is a planar tiling handled by its own module.
pub const SUBSTITUTION_NAMES: &[&str] =
    &["limitperiodic3", "limitquasi", "perioddoubling", "thuemorse", "limitperiodic3-variant"];

pub const ALL_NAMES: &[&str] =
    &["limitperiodic3", "chair", "limitquasi", "perioddoubling", "thuemorse", "limitperiodic3-variant"];

fn entry(name: &'static str, rules: &str, seed: (char, char), negative_control: bool) -> Entry {
    Entry {
        name,
        system: SubstitutionSystem::parse(rules).expect("catalog rules are well formed"),
        seed,
        negative_control,
    }
}

pub fn limitperiodic3() -> Entry {
    entry("limitperiodic3", "a -> ab\nb -> abc\nc -> abcc", ('c', 'a'), false)
}

pub fn limitquasi() -> Entry {
    entry("limitquasi", "a -> aab\nb -> abab", ('b', 'a'), false)
}

pub fn perioddoubling() -> Entry {
    entry("perioddoubling", "a -> ba\nb -> aa", ('a', 'a'), false)
}

pub fn thuemorse() -> Entry {
    entry("thuemorse", "a -> ab\nb -> ba", ('a', 'a'), true)
}

pub fn limitperiodic3_variant() -> Entry {
    entry("limitperiodic3-variant", "a -> ab\nb -> abc\nc -> ccab", ('c', 'a'), true)
}

/// Looks up a substitution system by name.
pub fn lookup(name: &str) -> Result<Entry> {
    match name {
        "limitperiodic3" => Ok(limitperiodic3()),
        "limitquasi" => Ok(limitquasi()),
        "perioddoubling" => Ok(perioddoubling()),
        "thuemorse" => Ok(thuemorse()),
        "limitperiodic3-variant" => Ok(limitperiodic3_variant()),
        _ => Err(Error::UnknownSystem(name.to_string())),
    }
}

/// Integer tile lengths when the exact Perron–Frobenius lengths are integral.
pub fn integer_lengths(s: &SubstitutionSystem) -> Option<Vec<i64>> {
    let pf = pf_data(s).ok()?;
    pf.exact?
        .lengths
        .iter()
        .map(|l| {
            let q = l.to_quad_int()?;
            if q.b != 0.into() {
                return None;
            }
            q.a.to_i64()
        })
        .collect()
}

/// Tile lengths in `ℤ[√2]` when the exact lengths lie there.
pub fn quad_lengths(s: &SubstitutionSystem) -> Option<Vec<QuadInt>> {
    let pf = pf_data(s).ok()?;
    pf.exact?.lengths.iter().map(|l| l.to_quad_int()).collect()
}
