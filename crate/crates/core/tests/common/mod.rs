//! Property suites shared by the property tests and the acceptance target.

#![allow(dead_code)]

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use padic_modelset::cutproject::CutProjectScheme;
use padic_modelset::diffraction::{intensity, FourierModuleElement};
use padic_modelset::exactnum::{rat, Rational};
use padic_modelset::padic::{padic_distance, Coset, CosetUnion, Space};

pub const ULTRAMETRIC_CASES: u32 = 10_000;
pub const COSET_CASES: u32 = 1_000;
pub const STAR_CASES: u32 = 1_000;
pub const SCALING_CASES: u32 = 100;

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn rational() -> impl Strategy<Value = Rational> {
    (-10_000i64..10_000, 1i64..2_000).prop_map(|(n, d)| rat(n, d))
}

/// `d(x, z) ≤ max(d(x, y), d(y, z))` for random rational triples.
pub fn ultrametric(cases: u32) -> Result<(), String> {
    let strat = (prop_oneof![Just(2u64), Just(3), Just(5), Just(7)], rational(), rational(), rational());
    runner(cases)
        .run(&strat, |(p, x, y, z)| {
            let dxz = padic_distance(&x, &z, p).unwrap();
            let dxy = padic_distance(&x, &y, p).unwrap();
            let dyz = padic_distance(&y, &z, p).unwrap();
            prop_assert!(dxz <= dxy.clone().max(dyz.clone()), "p={p} x={x} y={y} z={z}");
            prop_assert!(dxz >= rat(0, 1));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

const MAX_LEVEL: u32 = 4;

fn union_strategy() -> impl Strategy<Value = (u64, Vec<(i64, u32)>)> {
    (prop_oneof![Just(2u64), Just(3)], prop::collection::vec((0i64..10_000, 0u32..=MAX_LEVEL), 0..12))
}

/// Normalization preserves membership and the measure equals the fraction of
/// residues mod `p^L` covered, by enumeration.
pub fn coset_normalize(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&union_strategy(), |(p, raw)| {
            let space = Space::padic(p, 1).unwrap();
            let cosets: Vec<Coset> = raw.iter().map(|&(c, l)| Coset::from_i64(&space, &[c], l).unwrap()).collect();
            let u = CosetUnion::from_cosets(space.clone(), cosets).unwrap();
            let n = u.normalize().unwrap();
            let modulus = (p as i64).pow(MAX_LEVEL);
            let mut covered = 0i64;
            for r in 0..modulus {
                let x = [BigInt::from(r)];
                let a = u.contains(&x).unwrap();
                prop_assert_eq!(a, n.contains(&x).unwrap());
                covered += a as i64;
            }
            let expected = rat(covered, modulus);
            prop_assert_eq!(n.measure().unwrap(), expected.clone());
            prop_assert_eq!(u.measure().unwrap(), expected.clone());
            prop_assert_eq!(n.measure_sum(), expected);
            prop_assert_eq!(n.normalize().unwrap(), n.clone());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// `⋆(u + v) = ⋆u + ⋆v` for the 3-adic, 2-adic planar and `ℤ[√2]` schemes.
pub fn star_additivity(cases: u32) -> Result<(), String> {
    let schemes = [
        CutProjectScheme::from_name("diagonal-Z-3adic").unwrap(),
        CutProjectScheme::from_name("diagonal-Z2-2adic").unwrap(),
        CutProjectScheme::from_name("sqrt2-phi").unwrap(),
    ];
    let strat =
        (0usize..3, -100_000i64..100_000, -100_000i64..100_000, -100_000i64..100_000, -100_000i64..100_000, 0u32..12);
    runner(cases)
        .run(&strat, |(s, a, b, c, d, level)| {
            let sch = &schemes[s];
            let (u, v): (Vec<i64>, Vec<i64>) =
                if sch.lattice_dim() == 1 { (vec![a], vec![c]) } else { (vec![a, b], vec![c, d]) };
            let w: Vec<i64> = u.iter().zip(&v).map(|(x, y)| x + y).collect();
            let (su, sv, sw) = (
                sch.star_map(&u, level).map_err(|e| TestCaseError::fail(e.to_string()))?,
                sch.star_map(&v, level).map_err(|e| TestCaseError::fail(e.to_string()))?,
                sch.star_map(&w, level).map_err(|e| TestCaseError::fail(e.to_string()))?,
            );
            let sum: Vec<BigInt> = su.residue.iter().zip(&sv.residue).map(|(x, y)| x + y).collect();
            prop_assert_eq!(sch.space.reduce(&sum, level).unwrap(), sw.residue);
            match (su.euclid, sv.euclid, sw.euclid) {
                (Some(x), Some(y), Some(z)) => prop_assert_eq!(x + y, z),
                (None, None, None) => {}
                _ => prop_assert!(false, "inconsistent Euclidean factor"),
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// `I_{ch}(k) = c² I_h(k)` and `I_h ≥ 0`.
pub fn weight_scaling(cases: u32) -> Result<(), String> {
    let strat = (prop::array::uniform3(-5.0f64..5.0), -4.0f64..4.0, 0i64..300, 1u32..6);
    runner(cases)
        .run(&strat, |(h, c, m, n)| {
            let Some(e) = FourierModuleElement::new(m, n) else { return Ok(()) };
            let ch = [c * h[0], c * h[1], c * h[2]];
            let (i1, i2) = (intensity(&e, &h), intensity(&e, &ch));
            prop_assert!(i1 >= 0.0);
            prop_assert!((i2 - c * c * i1).abs() <= 1e-12 * (1.0 + i2.abs()), "{i2} vs {}", c * c * i1);
            Ok(())
        })
        .map_err(|e| e.to_string())
}
