use std::sync::OnceLock;

use ch0kit::appendix_a::*;
use ch0kit::blowup::BlowupError;
use ch0kit::certifier::{certify_morphism, mutation_survivors, require_complete, CertError};
use ch0kit::field::FieldSpec;
use ch0kit::groebner::Engine;
use ch0kit::instances::{build_v, construct_am_forms, NamedInstance, DEFAULT_RETRIES};

fn engine() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(Engine::default)
}

fn quartic_v() -> &'static NamedInstance {
    static V: OnceLock<NamedInstance> = OnceLock::new();
    V.get_or_init(|| {
        let f = FieldSpec::prime(101).unwrap();
        build_v(&construct_am_forms(engine(), &f, 7, DEFAULT_RETRIES).unwrap())
    })
}

fn report() -> &'static PipelineReport {
    static R: OnceLock<PipelineReport> = OnceLock::new();
    R.get_or_init(|| run_appendix_a_pipeline(engine(), quartic_v(), &PipelineOptions { skip_l_prime: false, seed: 7 }).unwrap())
}

#[test]
fn tower_is_terminal_and_every_check_passes() {
    let r = report();
    require_terminal(&r.tower).unwrap();
    assert!(r.tower.terminal());
    for c in &r.checks {
        assert!(c.passed, "{}: {}", c.name, c.detail);
    }
    for name in [
        "chart-1a-exceptional",
        "chart-1b-strict-transform",
        "singular-line-above-L",
        "chart-2-exceptional",
        "odp-exceptional-smooth-quadrics",
        "tower-terminal",
    ] {
        assert!(r.check(name).is_some(), "missing check {name}");
    }
}

#[test]
fn exceptional_catalog_is_nine_quadrics_and_two_surfaces() {
    let r = report();
    let mut want: Vec<String> = (1..=9).map(|i| format!("E{i}")).collect();
    want.push("E'".into());
    want.push("E''".into());
    assert_eq!(r.exceptional_names(), want);
    assert_eq!(r.odp_degrees.iter().sum::<usize>(), 9);
}

#[test]
fn singular_line_is_reported_in_the_printed_coordinates() {
    let c = report().check("singular-line-above-L").unwrap();
    assert!(c.detail.contains("y0") && c.detail.contains("y1") && c.detail.contains("y3"), "{}", c.detail);
}

#[test]
fn morphism_is_certified_and_every_certificate_matters() {
    let r = report();
    let v = certify_morphism(engine(), &r.strata, &r.catalog).unwrap();
    assert!(v.certified, "{:?}", v.entries);
    assert!(v.uncovered.is_empty());
    assert!(mutation_survivors(engine(), &r.strata, &r.catalog).unwrap().is_empty());
}

#[test]
fn missing_generic_fiber_of_e_prime_is_rejected() {
    let r = report();
    let catalog: Vec<_> = r.catalog.iter().filter(|e| e.stratum != "L-generic").cloned().collect();
    assert!(catalog.len() < r.catalog.len());
    let v = certify_morphism(engine(), &r.strata, &catalog).unwrap();
    assert!(!v.certified);
    assert_eq!(require_complete(&v), Err(CertError::IncompleteCatalog(vec!["L-generic".into()])));
}

#[test]
fn skipping_the_second_blowup_leaves_the_singular_line() {
    let r = run_appendix_a_pipeline(engine(), quartic_v(), &PipelineOptions { skip_l_prime: true, seed: 7 }).unwrap();
    assert!(!r.tower.terminal());
    match require_terminal(&r.tower) {
        Err(BlowupError::PipelineStepFailed { chart, witness, .. }) => {
            assert_eq!(chart, "V/z4/y1");
            assert!(witness.contains("y0, y1, y3"), "{witness}");
        }
        other => panic!("expected a failed step, got {other:?}"),
    }
}

#[test]
fn report_json_is_stable() {
    let a = report().to_json();
    let b = run_appendix_a_pipeline(engine(), quartic_v(), &PipelineOptions { skip_l_prime: false, seed: 7 }).unwrap().to_json();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
