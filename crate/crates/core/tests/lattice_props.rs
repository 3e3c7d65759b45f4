use ch0kit::lattice::*;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use num_rational::Ratio;
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-100i128..=100, c), r))
}

fn gcd_all(m: &IntMatrix) -> i128 {
    m.iter().flatten().fold(0i128, |g, &x| g.gcd(&x))
}

// random unimodular matrix as a product of elementary operations
fn unimodular(n: usize, ops: &[(usize, usize, i128)]) -> IntMatrix {
    let mut p = identity(n);
    for &(i, j, k) in ops {
        let (i, j) = (i % n, j % n);
        if i != j {
            for row in p.iter_mut() {
                row[i] += k * row[j];
            }
        }
    }
    p
}

fn test_lattices() -> Vec<GLattice> {
    let a3 = vec![vec![0, -1], vec![1, -1]];
    vec![
        GLattice::trivial(3, 2),
        GLattice::free(3, 1),
        GLattice::new(3, a3, vec![]).unwrap(),
        build_appendix_c().galois.pic,
        GLattice::new(2, vec![vec![-1]], vec![]).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn snf_is_a_certified_factorization(m in matrix()) {
        let c = m[0].len();
        let s = smith_normal_form(&m, c);
        prop_assert_eq!(big_mul(&big_mul(&s.u, &to_big(&m)), &s.v), s.d.clone());
        prop_assert_eq!(determinant_big(&s.u).abs(), BigInt::one());
        prop_assert_eq!(determinant_big(&s.v).abs(), BigInt::one());
        prop_assert_eq!(big_mul(&s.u, &s.u_inv), to_big(&identity(m.len())));
        prop_assert_eq!(big_mul(&s.v, &s.v_inv), to_big(&identity(c)));
        for i in 0..s.d.len() {
            for j in 0..c {
                if i != j {
                    prop_assert!(s.d[i][j].is_zero());
                }
            }
        }
        let inv = s.invariants();
        for w in inv.windows(2) {
            prop_assert_eq!(w[1] % w[0], 0);
        }
        prop_assert!(inv.iter().all(|&d| d > 0));
        prop_assert!(s.diagonal()[s.rank..].iter().all(|&d| d == 0));
        prop_assert_eq!(inv.first().copied().unwrap_or(0), gcd_all(&m));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn tate_groups_are_basis_independent(ops in prop::collection::vec((0usize..6, 0usize..6, -3i128..=3), 0..8)) {
        for l in test_lattices() {
            let p = unimodular(l.rank, &ops);
            let c = l.conjugate(&p);
            prop_assert_eq!(tate_h(&c, 0), tate_h(&l, 0));
            prop_assert_eq!(tate_h(&c, -1), tate_h(&l, -1));
        }
    }

    #[test]
    fn direct_sums_and_herbrand(i in 0usize..5, j in 0usize..5) {
        let ls = test_lattices();
        let (a, b) = (&ls[i], &ls[j]);
        prop_assume!(a.order == b.order);
        let s = a.direct_sum(b).unwrap();
        for d in [0, -1] {
            let mut both = tate_h(a, d).invariants;
            both.extend(tate_h(b, d).invariants);
            // same group iff same order and same SNF of the diagonal presentation
            let diag: IntMatrix = (0..both.len()).map(|k| (0..both.len()).map(|l| if k == l { both[k] } else { 0 }).collect()).collect();
            let norm: Vec<i128> = smith_normal_form(&diag, both.len()).invariants().into_iter().filter(|&x| x > 1).collect();
            prop_assert_eq!(tate_h(&s, d).invariants, norm);
        }
        // split exact sequence A -> A+C -> C
        prop_assert_eq!(herbrand_quotient(a) * herbrand_quotient(b), herbrand_quotient(&s));
    }
}

#[test]
fn shapiro_for_small_groups() {
    for n in [2, 3, 5, 7] {
        for m in 1..=4 {
            assert!(shapiro_vanishes(n, m), "Z[G]^{m} for n = {n}");
        }
    }
}

#[test]
fn appendix_c_cokernel_and_herbrand() {
    let c = build_appendix_c();
    assert_eq!(c.galois.pic.rank, 5);
    assert_eq!(c.galois.h_minus_one.describe(), "Z/3");
    assert_eq!(herbrand_quotient(&c.galois.pic), Ratio::new(1, 3));
    assert_eq!(c.galois.h_zero_of_units.invariants, vec![3]);
}
