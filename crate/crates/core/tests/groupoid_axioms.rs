use std::time::Instant;

use stokes_resum::groupoid::{check_groupoid, check_hom_e, check_pair_exact, check_sto_series, GroupoidChart};

#[test]
fn pair_axioms_hold_exactly() {
    for k in 1..=5 {
        for r in check_pair_exact(k).unwrap() {
            assert!(r.passed, "{r:?}");
        }
    }
}

#[test]
fn sto_axioms_hold_to_degree_ten() {
    for k in 1..=4 {
        for r in check_sto_series(k, 10).unwrap() {
            assert!(r.passed, "{r:?}");
        }
    }
}

#[test]
fn hom_e_is_a_homomorphism() {
    for k in 1..=4 {
        for r in check_hom_e(k, 10, 100, 7, 1e-9).unwrap() {
            assert!(r.passed, "{r:?}");
        }
    }
}

#[test]
fn full_check_is_fast() {
    let t = Instant::now();
    for k in 1..=5 {
        for r in check_groupoid(&GroupoidChart::pair(k), 10, 100, 1).unwrap() {
            assert!(r.passed, "{r:?}");
        }
    }
    for k in 1..=4 {
        for r in check_groupoid(&GroupoidChart::sto(k), 10, 100, 1).unwrap() {
            assert!(r.passed, "{r:?}");
        }
    }
    eprintln!("groupoid checks: {:?}", t.elapsed());
}
