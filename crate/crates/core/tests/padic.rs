use std::sync::OnceLock;

use ch0kit::certifier::{certify_morphism, mutation_survivors};
use ch0kit::groebner::Engine;
use ch0kit::instances::build_padic_special_fiber;
use ch0kit::padic::*;

fn engine() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(Engine::default)
}

fn report() -> &'static PadicReport {
    static R: OnceLock<PadicReport> = OnceLock::new();
    R.get_or_init(|| {
        let y = build_padic_special_fiber(2).unwrap();
        run_padic_pipeline(engine(), &y, 2, 1).unwrap()
    })
}

#[test]
fn one_closed_singular_point_of_degree_three() {
    let r = report();
    assert_eq!(r.singular_points, vec![3]);
    assert_eq!(r.singular_reduced_length, 3);
    // the point is not reduced: length 4 at each geometric point
    assert_eq!(r.singular_length, 12);
    assert!(r.residue_field.contains("(3)"), "{}", r.residue_field);
}

#[test]
fn resolution_checks_pass() {
    let r = report();
    assert!(r.tower.terminal());
    for c in &r.checks {
        assert!(c.passed, "{}: {}", c.name, c.detail);
    }
    for name in ["exceptional-over-m-two-planes", "planes-meet-in-a-line", "three-singular-points-on-the-line", "Z-smooth"] {
        assert!(r.check(name).is_some(), "missing {name}");
    }
}

#[test]
fn catalog_is_certified_and_minimal() {
    let r = report();
    let v = certify_morphism(engine(), &r.strata, &r.catalog).unwrap();
    assert!(v.certified, "{:?}", v.entries);
    assert!(mutation_survivors(engine(), &r.strata, &r.catalog).unwrap().is_empty());
    let v = certify_morphism(engine(), &r.strata, &r.catalog[1..]).unwrap();
    assert!(!v.certified);
    assert_eq!(v.uncovered, vec![r.catalog[0].stratum.clone()]);
}

#[test]
fn other_seeds_give_the_same_verdicts() {
    let y = build_padic_special_fiber(2).unwrap();
    for seed in [2, 3] {
        let r = run_padic_pipeline(engine(), &y, 2, seed).unwrap();
        assert!(r.checks.iter().all(|c| c.passed));
        assert!(certify_morphism(engine(), &r.strata, &r.catalog).unwrap().certified);
    }
}
