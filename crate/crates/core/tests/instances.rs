use std::sync::OnceLock;

use ch0kit::field::FieldSpec;
use ch0kit::groebner::Engine;
use ch0kit::instances::*;
use ch0kit::variety::{classify_odp, m_components, projective_scheme, singular_scheme};

fn engine() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(Engine::default)
}

fn forms(seed: u64) -> ArtinMumfordForms {
    construct_am_forms(engine(), &FieldSpec::prime(101).unwrap(), seed, DEFAULT_RETRIES).unwrap()
}

#[test]
fn forms_satisfy_the_identity_and_the_tangency_profile() {
    for seed in [7, 8, 9] {
        let f = forms(seed);
        assert!(f.attempts <= DEFAULT_RETRIES);
        assert!(f.identity_defect().is_zero());
        assert_eq!(f.tangency.conic_cubic, [(Some(6), Some(3)), (Some(6), Some(3))]);
        assert_eq!(f.tangency.cubic_cubic, (Some(9), Some(9)));
        assert!(f.tangency.disjoint && f.tangency.cubics_smooth);
        assert!(f.genericity.passed());
    }
}

#[test]
fn quartic_s_has_ten_ordinary_double_points_and_finite_m() {
    let s = build_s(&forms(7));
    let sc = singular_scheme(engine(), &s.hypersurface).unwrap();
    assert_eq!(sc.degree, Some(10));
    assert!(sc.is_reduced());
    let odp = classify_odp(engine(), &s.hypersurface, &sc).unwrap();
    assert!(odp.all_odp);
    assert_eq!(odp.total_degree, 10);
    for comp in m_components(s.hypersurface.equation()) {
        assert!(projective_scheme(engine(), &comp).unwrap().zero_dimensional);
    }
}

#[test]
fn quartic_v_has_the_expected_shape() {
    let v = build_v(&forms(7));
    assert!(has_v_shape(v.hypersurface.equation()));
    assert_eq!(v.hypersurface.ambient_dim(), 4);
    assert_eq!(v.tag.name(), "quartic-V");
    assert_eq!(InstanceTag::parse("quartic-V"), Some(InstanceTag::QuarticV));
}

#[test]
fn small_retry_budget_is_reported() {
    let f = FieldSpec::prime(7).unwrap();
    match construct_am_forms(engine(), &f, 999999, 3) {
        Err(InstanceError::RetriesExhausted { retries: 3, stats }) => assert_eq!(stats.tangency, 3),
        other => panic!("{other:?}"),
    }
    let f = FieldSpec::prime(3).unwrap();
    assert!(matches!(construct_am_forms(engine(), &f, 1, 5), Err(InstanceError::UnsupportedCharacteristic(3))));
}

#[test]
fn brauer_cubic_has_three_conjugate_singular_points() {
    let k = FieldSpec::finite_extension(&FieldSpec::prime(7).unwrap(), 3, "t").unwrap();
    let x = build_brauer_cubic(&frobenius_action(&k).unwrap()).unwrap();
    assert_eq!(x.hypersurface.ambient_dim(), 4);
    let sc = singular_scheme(engine(), &x.hypersurface).unwrap();
    assert_eq!(sc.radical_degree, Some(3));
}

#[test]
fn special_fiber_is_a_cubic_over_f2() {
    let y = build_padic_special_fiber(2).unwrap();
    assert_eq!(y.hypersurface.degree(), 3);
    assert_eq!(y.hypersurface.field().name(), "GF(2)");
}
