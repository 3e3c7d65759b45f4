//! Quadratic forms in a subset of a ring's variables ("fiber" variables), with
//! coefficients that may involve the remaining ("base") variables.
//!
//! Everything is characteristic free: the polar form `B(x, y) = q(x+y) - q(x) - q(y)`
//! replaces the Gram matrix, so char 2 works unchanged.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::factor;
use crate::field::{FieldElement, FieldSpec};
use crate::linalg;
use crate::poly::{MultiPoly, Ring};

const POINT_TRIES: usize = 500;

/// `q` with the fiber variables replaced by `x` (other variables kept).
pub fn eval_form(q: &MultiPoly, fiber: &[usize], x: &[MultiPoly]) -> MultiPoly {
    let ring = q.ring();
    let images: Vec<MultiPoly> = (0..ring.arity())
        .map(|i| match fiber.iter().position(|&f| f == i) {
            Some(k) => x[k].clone(),
            None => MultiPoly::var(ring, i),
        })
        .collect();
    q.substitute_all(&images, ring).expect("same ring")
}

pub fn polar(q: &MultiPoly, fiber: &[usize], x: &[MultiPoly], y: &[MultiPoly]) -> MultiPoly {
    let s: Vec<MultiPoly> = x.iter().zip(y).map(|(a, b)| a.add(b)).collect();
    eval_form(q, fiber, &s).sub(&eval_form(q, fiber, x)).sub(&eval_form(q, fiber, y))
}

fn consts(ring: &Ring, v: &[FieldElement]) -> Vec<MultiPoly> {
    v.iter().map(|c| MultiPoly::constant(ring, c.clone())).collect()
}

fn as_const(p: &MultiPoly) -> FieldElement {
    debug_assert!(p.is_constant());
    p.constant_term()
}

/// Matrix of the polar form on constant-coefficient forms.
pub fn polar_matrix(q: &MultiPoly, fiber: &[usize]) -> linalg::Matrix {
    let ring = q.ring();
    let f = &ring.field;
    let n = fiber.len();
    let unit = |i: usize| {
        let mut v = vec![f.zero(); n];
        v[i] = f.one();
        consts(ring, &v)
    };
    (0..n).map(|i| (0..n).map(|j| as_const(&polar(q, fiber, &unit(i), &unit(j)))).collect()).collect()
}

/// Rank of the polar form; for four variables, rank 4 is smoothness in every characteristic.
pub fn polar_rank(q: &MultiPoly, fiber: &[usize]) -> usize {
    linalg::rank(&q.ring().field, &polar_matrix(q, fiber))
}

/// A point of a constant-coefficient form over its (finite) field, by intersecting
/// random lines with the quadric.
pub fn rational_point(q: &MultiPoly, fiber: &[usize], seed: u64) -> Option<Vec<FieldElement>> {
    let ring = q.ring();
    let f = &ring.field;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = fiber.len();
    for _ in 0..POINT_TRIES {
        let a: Vec<FieldElement> = (0..n).map(|_| f.random(&mut rng)).collect();
        let b: Vec<FieldElement> = (0..n).map(|_| f.random(&mut rng)).collect();
        if b.iter().all(|x| f.is_zero(x)) {
            continue;
        }
        let (pa, pb) = (consts(ring, &a), consts(ring, &b));
        let qa = as_const(&eval_form(q, fiber, &pa));
        let qb = as_const(&eval_form(q, fiber, &pb));
        if f.is_zero(&qb) {
            return Some(b);
        }
        let bab = as_const(&polar(q, fiber, &pa, &pb));
        // q(a + t b) = qa + bab t + qb t^2
        let roots = factor::roots(&vec![qa, bab, qb], f).ok()?;
        if let Some(t) = roots.first() {
            let pt: Vec<FieldElement> = a.iter().zip(&b).map(|(x, y)| f.add(x, &f.mul(t, y))).collect();
            if pt.iter().any(|x| !f.is_zero(x)) {
                return Some(pt);
            }
        }
    }
    None
}

/// Directions `e` with the line through `p` and `e` contained in the quadric,
/// found over the form's field (two for a split smooth quadric surface).
pub fn lines_through(q: &MultiPoly, fiber: &[usize], p: &[FieldElement]) -> Vec<Vec<FieldElement>> {
    let ring = q.ring();
    let f = &ring.field;
    let n = fiber.len();
    let pp = consts(ring, p);
    let row: Vec<FieldElement> = (0..n)
        .map(|i| {
            let mut e = vec![f.zero(); n];
            e[i] = f.one();
            as_const(&polar(q, fiber, &pp, &consts(ring, &e)))
        })
        .collect();
    let tangent = linalg::kernel(f, &vec![row], n);
    // two vectors completing p to a basis of the tangent space
    let mut pair = None;
    'outer: for i in 0..tangent.len() {
        for j in i + 1..tangent.len() {
            let m = vec![p.to_vec(), tangent[i].clone(), tangent[j].clone()];
            if linalg::rank(f, &m) == 3 {
                pair = Some((tangent[i].clone(), tangent[j].clone()));
                break 'outer;
            }
        }
    }
    let Some((e1, e2)) = pair else { return vec![] };
    let (c1, c2) = (consts(ring, &e1), consts(ring, &e2));
    let a = as_const(&eval_form(q, fiber, &c1));
    let b = as_const(&polar(q, fiber, &c1, &c2));
    let c = as_const(&eval_form(q, fiber, &c2));
    let comb = |x: &FieldElement, y: &FieldElement| -> Vec<FieldElement> {
        e1.iter().zip(&e2).map(|(u, v)| f.add(&f.mul(x, u), &f.mul(y, v))).collect()
    };
    let mut out = vec![];
    // a x^2 + b x y + c y^2 on directions x e1 + y e2, with t = y / x
    if f.is_zero(&a) && f.is_zero(&b) && f.is_zero(&c) {
        return out;
    }
    if let Ok(roots) = factor::roots(&vec![a, b, c.clone()], f) {
        for t in roots {
            out.push(comb(&f.one(), &t));
        }
    }
    if f.is_zero(&c) {
        out.push(comb(&f.zero(), &f.one()));
    }
    out.dedup();
    out
}

/// Rational parametrization from a point: `phi(s) = q(d) P - B(P, d) d` where `d`
/// is `s` placed in the fiber coordinates other than `omit` (and 0 at `omit`);
/// inverse `psi(w)_j = P_omit w_j - P_j w_omit`.
#[derive(Clone, Debug)]
pub struct QuadricParam {
    pub fiber: Vec<usize>,
    pub omit: usize,
    pub point: Vec<MultiPoly>,
    /// Images of the fiber variables, polynomials in the ring (source coordinates
    /// are the fiber variables other than `omit`).
    pub phi: Vec<MultiPoly>,
    /// One entry per source coordinate.
    pub psi: Vec<MultiPoly>,
}

pub fn parametrize(q: &MultiPoly, fiber: &[usize], point: &[MultiPoly]) -> Option<QuadricParam> {
    let ring = q.ring();
    let omit = (0..fiber.len()).find(|&k| !point[k].is_zero())?;
    let d: Vec<MultiPoly> = (0..fiber.len())
        .map(|k| if k == omit { MultiPoly::zero(ring) } else { MultiPoly::var(ring, fiber[k]) })
        .collect();
    let qd = eval_form(q, fiber, &d);
    let bpd = polar(q, fiber, point, &d);
    if bpd.is_zero() {
        return None;
    }
    let phi: Vec<MultiPoly> = (0..fiber.len()).map(|k| qd.mul(&point[k]).sub(&bpd.mul(&d[k]))).collect();
    let w = |k: usize| MultiPoly::var(ring, fiber[k]);
    let psi: Vec<MultiPoly> = (0..fiber.len())
        .filter(|&k| k != omit)
        .map(|k| point[omit].mul(&w(k)).sub(&point[k].mul(&w(omit))))
        .collect();
    Some(QuadricParam { fiber: fiber.to_vec(), omit, point: point.to_vec(), phi, psi })
}

/// Source coordinates of a parametrization (as polynomials in the ring).
pub fn source_coords(ring: &Ring, fiber: &[usize], omit: usize) -> Vec<MultiPoly> {
    (0..fiber.len()).filter(|&k| k != omit).map(|k| MultiPoly::var(ring, fiber[k])).collect()
}

/// Whether a field element vector is nonzero.
pub fn nonzero(f: &FieldSpec, v: &[FieldElement]) -> bool {
    v.iter().any(|x| !f.is_zero(x))
}
