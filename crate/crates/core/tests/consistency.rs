//! Randomized cross-validation: for every structural regime the congruence
//! report must survive full brute-force enumeration, element by element.

mod common;

use eigenvariety::graph::StructureProfile;
use eigenvariety::oracle::cross_validate;
use eigenvariety::phase::{stabilizing_index, PhaseOptions};
use eigenvariety::spectral::spectral_radius;
use eigenvariety::tensor::SparseTensor;

use common::*;

fn validated(a: &SparseTensor) -> bool {
    let profile = StructureProfile::of(a);
    let spectral = spectral_radius(a).expect("weakly irreducible");
    let report =
        stabilizing_index(a, &profile, &spectral, &PhaseOptions::default()).expect("report");
    let verdict = cross_validate(a, &spectral, &report, 1e-8, 10_000_000);
    if verdict.is_match() {
        return true;
    }
    panic!("oracle disagreed on {}:\n{verdict:?}", a.to_text());
}

#[test]
fn irreducible_reports_survive_enumeration() {
    let mut rng = rng(0xa11ce);
    for index in 0..60 {
        let m = if index % 2 == 0 { 3 } else { 4 };
        let n = 2 + (index % 4);
        let a = random_irreducible(&mut rng, m, n);
        validated(&a);
    }
}

#[test]
fn symmetric_reports_survive_enumeration() {
    let mut rng = rng(0xbea7);
    for index in 0..60 {
        let m = if index % 2 == 0 { 3 } else { 4 };
        let n = 2 + (index % 4);
        let a = random_symmetric_weakly_irreducible(&mut rng, m, n);
        validated(&a);
    }
}

#[test]
fn symmetric_phase_diagonals_have_order_m() {
    // the substantive order bound: allowing phases finer than the m-th
    // roots of unity reveals no additional solutions, and every hit kept
    // satisfies m * t = 0 at the finer modulus
    use eigenvariety::oracle::enumerate_spectral_circle;
    let mut rng = rng(0x04d34);
    for index in 0..40 {
        let m = if index % 2 == 0 { 3 } else { 4 };
        let n = 2 + (index % 3);
        let a = random_symmetric_weakly_irreducible(&mut rng, m, n);
        let profile = StructureProfile::of(&a);
        let spectral = spectral_radius(&a).unwrap();
        let report =
            stabilizing_index(&a, &profile, &spectral, &PhaseOptions::default()).unwrap();
        let fine = 2 * m as u64;
        let oracle = enumerate_spectral_circle(&a, &spectral, fine, 1e-8, 10_000_000).unwrap();
        assert_eq!(oracle.phase_zero_count() as u64, report.s, "{}", a.to_text());
        for t in oracle.t_vectors_at_phase(0, 1) {
            for &ti in t {
                assert_eq!(
                    (ti as u128 * m as u128) % fine as u128,
                    0,
                    "phase order exceeded m"
                );
            }
        }
    }
}

#[test]
fn weakly_irreducible_reports_survive_enumeration() {
    let mut rng = rng(0xcafe);
    let mut checked = 0;
    for index in 0..60 {
        let m = 3; // keeps the fallback modulus within the oracle budget
        let n = 2 + (index % 3);
        let a = random_weakly_irreducible(&mut rng, m, n);
        checked += usize::from(validated(&a));
    }
    assert_eq!(checked, 60);
}

#[test]
fn matrix_reports_survive_enumeration() {
    // order 2: periods up to n must come out exactly
    let mut rng = rng(0xd1ce);
    for index in 0..60 {
        let n = 2 + (index % 5);
        let a = random_irreducible(&mut rng, 2, n);
        validated(&a);
    }
}
