mod common;

#[test]
fn ultrametric_inequality() {
    common::ultrametric(common::ULTRAMETRIC_CASES).unwrap();
}

#[test]
fn coset_normalize_measure_contains() {
    common::coset_normalize(common::COSET_CASES).unwrap();
}

#[test]
fn star_map_additivity() {
    common::star_additivity(common::STAR_CASES).unwrap();
}

#[test]
fn weight_scaling_law() {
    common::weight_scaling(common::SCALING_CASES).unwrap();
}
