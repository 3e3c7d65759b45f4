use ch0kit::field::FieldSpec;
use ch0kit::groebner::{ring_of, truncated_membership, Engine, Ideal};
use ch0kit::instances::monomials_of_degree;
use ch0kit::poly::{MultiPoly, Ring};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_form(r: &Ring, d: u32, rng: &mut ChaCha8Rng) -> MultiPoly {
    let f = &r.field;
    let mut terms = vec![];
    for m in monomials_of_degree(r.arity(), d) {
        if rng.gen_bool(0.6) {
            terms.push((m, f.random(rng)));
        }
    }
    MultiPoly::from_terms(r, terms)
}

fn random_poly(r: &Ring, max: u32, rng: &mut ChaCha8Rng) -> MultiPoly {
    (0..=max).fold(MultiPoly::zero(r), |acc, d| acc.add(&random_form(r, d, rng)))
}

#[test]
fn homogeneous_membership_agrees_with_linear_algebra() {
    let f = FieldSpec::prime(101).unwrap();
    let r = ring_of(&f, &["x", "y", "z"]);
    let engine = Engine::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for _ in 0..60 {
        let n = rng.gen_range(1..=3);
        let gens: Vec<MultiPoly> = (0..n).map(|_| random_form(&r, rng.gen_range(1..=3), &mut rng)).filter(|g| !g.is_zero()).collect();
        let ideal = Ideal::new(&r, gens.clone()).unwrap();
        for _ in 0..4 {
            let d = rng.gen_range(1..=8);
            let member = gens.iter().fold(MultiPoly::zero(&r), |acc, g| {
                let dg = g.total_degree().unwrap();
                if dg > d {
                    acc
                } else {
                    acc.add(&g.mul(&random_form(&r, d - dg, &mut rng)))
                }
            });
            for cand in [member, random_form(&r, d, &mut rng)] {
                let gb = engine.contains(&cand, &ideal).unwrap();
                let la = truncated_membership(&cand, &gens, 8);
                assert_eq!(gb, la, "gens {gens:?} f {cand}");
                checked += 1;
            }
        }
    }
    assert!(checked >= 400);
}

#[test]
fn affine_linear_algebra_certificates_are_accepted() {
    let f = FieldSpec::prime(101).unwrap();
    let r = ring_of(&f, &["x", "y", "z"]);
    let engine = Engine::default();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let gens: Vec<MultiPoly> = (0..2).map(|_| random_poly(&r, 3, &mut rng)).filter(|g| !g.is_zero()).collect();
        let ideal = Ideal::new(&r, gens.clone()).unwrap();
        let combo = gens.iter().fold(MultiPoly::zero(&r), |acc, g| acc.add(&g.mul(&random_poly(&r, 2, &mut rng))));
        assert!(truncated_membership(&combo, &gens, 8));
        assert!(engine.contains(&combo, &ideal).unwrap());
        let other = random_poly(&r, 3, &mut rng);
        // a degree-bounded certificate is a proof of membership
        if truncated_membership(&other, &gens, 8) {
            assert!(engine.contains(&other, &ideal).unwrap());
        }
    }
}
