use std::sync::OnceLock;

use ch0kit::certifier::*;
use ch0kit::field::{FieldElement, FieldSpec};
use ch0kit::groebner::{ring_of, Engine};
use ch0kit::linalg;
use ch0kit::poly::MultiPoly;
use ch0kit::quadric;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn engine() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(Engine::default)
}

const ORDERS: [(u64, usize); 13] =
    [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (2, 4), (5, 2), (3, 3), (7, 2)];

fn projective_points(f: &FieldSpec, n: usize) -> Vec<Vec<FieldElement>> {
    let els = f.elements(64).unwrap();
    let mut out = vec![];
    // first nonzero coordinate is 1
    for lead in 0..n {
        let mut partial: Vec<Vec<FieldElement>> = vec![vec![f.zero(); lead]];
        partial[0].push(f.one());
        for _ in lead + 1..n {
            partial = partial
                .into_iter()
                .flat_map(|p| els.iter().map(move |e| {
                    let mut q = p.clone();
                    q.push(e.clone());
                    q
                }))
                .collect();
        }
        out.extend(partial);
    }
    out
}

fn vanishes(p: &MultiPoly, x: &[FieldElement], f: &FieldSpec) -> bool {
    f.is_zero(&p.evaluate(x, f).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    // Over a finite field every smooth conic has a point; the certifier must
    // accept exactly the points an exhaustive search finds.
    #[test]
    fn conic_acceptance_matches_exhaustive_search(which in 0usize..ORDERS.len(), seed in any::<u64>()) {
        let (p, k) = ORDERS[which];
        let f = FieldSpec::finite(p, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = ring_of(&f, &["x", "y", "z"]);
        let v = |i| MultiPoly::var(&r, i);
        let mut q = MultiPoly::zero(&r);
        for i in 0..3 {
            for j in i..3 {
                q = q.add(&v(i).mul(&v(j)).scale(&f.random(&mut rng)));
            }
        }
        prop_assume!(!q.is_zero());
        let pts = projective_points(&f, 3);
        let on: Vec<_> = pts.iter().filter(|x| vanishes(&q, x, &f)).cloned().collect();
        let off: Vec<_> = pts.iter().filter(|x| !vanishes(&q, x, &f)).cloned().collect();
        let grad = q.gradient();
        let singular = on.iter().any(|x| grad.iter().all(|g| vanishes(g, x, &f)));
        let desc = FiberDescriptor::new(FiberClass::SmoothConic, vec![q.clone()], true);
        let accept = |x: &Vec<FieldElement>| certify_fiber(engine(), &desc, Some(&Certificate::RationalPoint(x.clone()))).unwrap().accepted;
        if singular {
            for x in on.iter().take(3) {
                prop_assert!(!accept(x));
            }
        } else {
            prop_assert!(!on.is_empty());
            for x in on.iter().take(4) {
                prop_assert!(accept(x));
            }
            let found = quadric::rational_point(&q, &[0, 1, 2], seed).unwrap();
            prop_assert!(accept(&found));
            for x in off.iter().take(3) {
                prop_assert!(!accept(x));
            }
        }
        prop_assert!(!certify_fiber(engine(), &desc, None).unwrap().accepted);
    }
}

fn random_invertible(f: &FieldSpec, n: usize, rng: &mut ChaCha8Rng) -> (Vec<Vec<FieldElement>>, Vec<Vec<FieldElement>>) {
    loop {
        let m: Vec<Vec<FieldElement>> = (0..n).map(|_| (0..n).map(|_| f.random(rng)).collect()).collect();
        if let Some(inv) = linalg::inverse(f, &m) {
            return (m, inv);
        }
    }
}

fn is_scalar(f: &FieldSpec, m: &[Vec<FieldElement>]) -> bool {
    (0..m.len()).all(|i| (0..m.len()).all(|j| if i == j { m[i][i] == m[0][0] } else { f.is_zero(&m[i][j]) }))
}

/// `phi ∘ B` and `B⁻¹ ∘ psi` for a change `B` of the source coordinates.
fn precompose(map: &RationalMap, b: &[Vec<FieldElement>], b_inv: &[Vec<FieldElement>]) -> (RationalMap, RationalMap) {
    let src = &map.source;
    let n = src.arity();
    let images: Vec<MultiPoly> = (0..n)
        .map(|i| (0..n).fold(MultiPoly::zero(src), |acc, j| acc.add(&MultiPoly::var(src, j).scale(&b[i][j]))))
        .collect();
    let phi: Vec<_> = map.phi.iter().map(|(num, den)| (num.substitute_all(&images, src).unwrap(), den.substitute_all(&images, src).unwrap())).collect();
    let fiber_ring = map.psi[0].0.ring();
    let psi: Vec<_> = (0..n)
        .map(|i| {
            let num = (0..n).fold(MultiPoly::zero(fiber_ring), |acc, j| acc.add(&map.psi[j].0.scale(&b_inv[i][j])));
            (num, MultiPoly::one(fiber_ring))
        })
        .collect();
    let matched = RationalMap { source: src.clone(), source_projective: true, phi: phi.clone(), psi };
    let stale = RationalMap { source: src.clone(), source_projective: true, phi, psi: map.psi.clone() };
    (matched, stale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn conic_parametrization_survives_source_changes(pi in 0usize..4, seed in any::<u64>()) {
        let p = [5u64, 7, 11, 101][pi];
        let f = FieldSpec::prime(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = ring_of(&f, &["x", "y", "z"]);
        let src = ring_of(&f, &["s", "t"]);
        let (x, y, z) = (MultiPoly::var(&r, 0), MultiPoly::var(&r, 1), MultiPoly::var(&r, 2));
        let (s, t) = (MultiPoly::var(&src, 0), MultiPoly::var(&src, 1));
        let desc = FiberDescriptor::new(FiberClass::SmoothConic, vec![y.mul(&z).sub(&x.pow(2))], true);
        let map = RationalMap {
            source: src.clone(),
            source_projective: true,
            phi: polynomial_map(vec![s.mul(&t), s.pow(2), t.pow(2)]),
            psi: polynomial_map(vec![y.clone(), x.clone()]),
        };
        prop_assert!(verify_parametrization(&desc, &map).unwrap());
        let (b, b_inv) = random_invertible(&f, 2, &mut rng);
        let (matched, stale) = precompose(&map, &b, &b_inv);
        prop_assert!(verify_parametrization(&desc, &matched).unwrap());
        prop_assert_eq!(verify_parametrization(&desc, &stale).unwrap(), is_scalar(&f, &b));
    }

    #[test]
    fn quadric_parametrization_survives_source_changes(pi in 0usize..3, seed in any::<u64>()) {
        let p = [5u64, 7, 13][pi];
        let f = FieldSpec::prime(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = ring_of(&f, &["a", "b", "c", "d"]);
        let v = |i| MultiPoly::var(&r, i);
        let mut q = MultiPoly::zero(&r);
        for i in 0..4 {
            for j in i..4 {
                q = q.add(&v(i).mul(&v(j)).scale(&f.random(&mut rng)));
            }
        }
        prop_assume!(quadric::polar_rank(&q, &[0, 1, 2, 3]) == 4);
        let pt = quadric::rational_point(&q, &[0, 1, 2, 3], seed).unwrap();
        let map = quadric_parametrization(&q, &pt);
        prop_assume!(map.is_some());
        let map = map.unwrap();
        let desc = FiberDescriptor::new(FiberClass::RationalSurface, vec![q.clone()], true);
        prop_assert!(verify_parametrization(&desc, &map).unwrap());
        let (b, b_inv) = random_invertible(&f, 3, &mut rng);
        let (matched, stale) = precompose(&map, &b, &b_inv);
        prop_assert!(verify_parametrization(&desc, &matched).unwrap());
        prop_assert_eq!(verify_parametrization(&desc, &stale).unwrap(), is_scalar(&f, &b));
    }
}

#[test]
fn textbook_conic_examples() {
    let f = FieldSpec::prime(13).unwrap();
    let r = ring_of(&f, &["u", "v", "w"]);
    let (u, v, w) = (MultiPoly::var(&r, 0), MultiPoly::var(&r, 1), MultiPoly::var(&r, 2));
    let desc = FiberDescriptor::new(FiberClass::SmoothConic, vec![u.mul(&v).sub(&w.pow(2))], true);
    let one = f.one();
    assert!(verify_rational_point(&desc, &[one.clone(), one.clone(), one.clone()], true).unwrap());
    assert!(!verify_rational_point(&desc, &[one.clone(), f.zero(), one.clone()], true).unwrap());
    let v = certify_fiber(engine(), &desc, None).unwrap();
    assert!(!v.accepted);
    assert!(v.reason.contains("degree-1 zero-cycle"), "{}", v.reason);
}
