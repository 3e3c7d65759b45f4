//! Points on conics over F_q(t) for odd q.
//!
//! A diagonal conic `a x^2 + b y^2 + c z^2 = 0` with polynomial coefficients
//! is reduced to squarefree, pairwise coprime coefficients. A solution is then
//! a kernel vector of a degree-bounded linear system of congruences, possibly
//! corrected by an isotropic vector of a small quadratic form over F_q.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::factor;
use crate::field::{FieldElement, FieldError, FieldResult, FieldSpec};
use crate::linalg;
use crate::poly::{Monomial, MultiPoly, Ring};
use crate::upoly::{self, UPoly};

const ISOTROPIC_TRIES: usize = 400;

fn add(f: &FieldSpec, a: &UPoly, b: &UPoly) -> UPoly {
    upoly::add(f, a, b)
}

fn mul(f: &FieldSpec, a: &UPoly, b: &UPoly) -> UPoly {
    upoly::mul(f, a, b)
}

fn deg(a: &UPoly) -> i64 {
    a.len() as i64 - 1
}

/// Evaluates `a x^2 + b y^2 + c z^2`.
pub fn diagonal_value(f: &FieldSpec, coeffs: &[UPoly; 3], v: &[UPoly; 3]) -> UPoly {
    let mut acc = vec![];
    for i in 0..3 {
        acc = add(f, &acc, &mul(f, &coeffs[i], &mul(f, &v[i], &v[i])));
    }
    acc
}

/// Evaluates the ternary form `sum_{i<=j} q[i][j] w_i w_j`.
pub fn form_value(f: &FieldSpec, q: &[[UPoly; 3]; 3], w: &[UPoly; 3]) -> UPoly {
    let mut acc = vec![];
    for i in 0..3 {
        for j in i..3 {
            acc = add(f, &acc, &mul(f, &q[i][j], &mul(f, &w[i], &w[j])));
        }
    }
    acc
}

fn require_odd_finite(f: &FieldSpec) -> FieldResult<()> {
    if !f.is_finite() || f.characteristic() == 2 {
        return Err(FieldError::UnsupportedField(format!("conics over {}(t)", f.name())));
    }
    Ok(())
}

/// Writes `a = s^2 * a'` with `a'` squarefree (keeping the leading coefficient in `a'`).
fn square_split(f: &FieldSpec, a: &UPoly) -> (UPoly, UPoly) {
    let lc = a.last().unwrap().clone();
    let mut core = vec![lc];
    let mut s = vec![f.one()];
    for (g, m) in factor::squarefree(f, &upoly::monic(f, a)) {
        core = mul(f, &core, &upoly::pow(f, &g, (m % 2) as u32));
        s = mul(f, &s, &upoly::pow(f, &g, (m / 2) as u32));
    }
    (core, s)
}

/// `a x^2 + b y^2 + c z^2` with squarefree pairwise coprime coefficients, together
/// with a linear map turning its solutions into solutions of the original conic.
struct Reduced {
    coeffs: [UPoly; 3],
    // original variable i = scale[i] * new variable i
    scale: [UPoly; 3],
}

fn reduce(f: &FieldSpec, coeffs: &[UPoly; 3]) -> Reduced {
    let mut c = coeffs.clone();
    let mut scale = [vec![f.one()], vec![f.one()], vec![f.one()]];
    loop {
        let mut changed = false;
        for i in 0..3 {
            let (core, s) = square_split(f, &c[i]);
            if s.len() > 1 {
                // a s^2 x^2 = a (s x)^2, so x = X / s and the others pick up s
                c[i] = core;
                for j in 0..3 {
                    if j != i {
                        scale[j] = mul(f, &scale[j], &s);
                    }
                }
                changed = true;
            }
        }
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let g = upoly::gcd(f, &c[i], &c[j]);
            if g.len() > 1 {
                // g a' x^2 + g b' y^2 + c z^2 = 0, z = g z'
                c[i] = upoly::div_exact(f, &c[i], &g);
                c[j] = upoly::div_exact(f, &c[j], &g);
                c[k] = mul(f, &c[k], &g);
                scale[k] = mul(f, &scale[k], &g);
                changed = true;
            }
        }
        if !changed {
            break;
        }
        // drop a common square factor of all three coefficients
        let g = upoly::gcd(f, &upoly::gcd(f, &c[0], &c[1]), &c[2]);
        if g.len() > 1 {
            for x in c.iter_mut() {
                *x = upoly::div_exact(f, x, &g);
            }
        }
    }
    Reduced { coeffs: c, scale }
}

fn residue_to_elem(k: &FieldSpec, f: &FieldSpec, r: &UPoly) -> FieldElement {
    let mut v = r.clone();
    v.resize(k.degree(), f.zero());
    FieldElement::Poly(v)
}

fn elem_to_residue(f: &FieldSpec, e: &FieldElement) -> UPoly {
    match e {
        FieldElement::Poly(v) => upoly::trim(f, v.clone()),
        _ => unreachable!("residue fields are extensions"),
    }
}

/// Some `r` with `r^2 = num/den mod m` for squarefree `m` coprime to `den`.
fn sqrt_mod(f: &FieldSpec, num: &UPoly, den: &UPoly, m: &UPoly) -> FieldResult<Option<UPoly>> {
    let fac = factor::factor_univariate(m, f)?;
    let mut acc: UPoly = vec![];
    let mut modulus: UPoly = vec![f.one()];
    for (p, _) in &fac.factors {
        let k = FieldSpec::extension(f, p.clone(), "r")?;
        let n = residue_to_elem(&k, f, &upoly::rem(f, num, p));
        let d = residue_to_elem(&k, f, &upoly::rem(f, den, p));
        let val = k.div(&n, &d)?;
        let root = match factor::sqrt(&val, &k)? {
            Some(r) => elem_to_residue(f, &r),
            None => return Ok(None),
        };
        // CRT: acc + modulus * ((root - acc) / modulus mod p)
        let (_, s, _) = upoly::xgcd(f, &modulus, p);
        let diff = upoly::sub(f, &root, &acc);
        let lift = upoly::rem(f, &mul(f, &diff, &s), p);
        acc = add(f, &acc, &mul(f, &modulus, &lift));
        modulus = mul(f, &modulus, p);
    }
    Ok(Some(acc))
}

fn monomial(f: &FieldSpec, k: usize) -> UPoly {
    let mut v = vec![f.zero(); k + 1];
    v[k] = f.one();
    v
}

/// Finds a nonzero isotropic vector of the quadratic form `lambda` on `F^n`.
fn isotropic(f: &FieldSpec, n: usize, lambda: &dyn Fn(&[FieldElement]) -> FieldElement, seed: u64) -> Option<Vec<FieldElement>> {
    let unit = |i: usize| {
        let mut e = vec![f.zero(); n];
        e[i] = f.one();
        e
    };
    for i in 0..n {
        let e = unit(i);
        if f.is_zero(&lambda(&e)) {
            return Some(e);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two = f.from_i64(2);
    for _ in 0..ISOTROPIC_TRIES {
        // restrict to the plane spanned by two random vectors: Q(u + s v) = A + B s + C s^2
        let u: Vec<_> = (0..n).map(|_| f.random(&mut rng)).collect();
        let v: Vec<_> = (0..n).map(|_| f.random(&mut rng)).collect();
        if u.iter().all(|x| f.is_zero(x)) || v.iter().all(|x| f.is_zero(x)) {
            continue;
        }
        let qa = lambda(&u);
        let qc = lambda(&v);
        let sum: Vec<_> = u.iter().zip(&v).map(|(x, y)| f.add(x, y)).collect();
        let qb = f.sub(&f.sub(&lambda(&sum), &qa), &qc);
        if f.is_zero(&qa) {
            return Some(u);
        }
        if f.is_zero(&qc) {
            continue;
        }
        let disc = f.sub(&f.mul(&qb, &qb), &f.mul(&f.from_i64(4), &f.mul(&qa, &qc)));
        if let Ok(Some(r)) = factor::sqrt(&disc, f) {
            let s = f.div(&f.sub(&r, &qb), &f.mul(&two, &qc)).ok()?;
            let w: Vec<_> = u.iter().zip(&v).map(|(x, y)| f.add(x, &f.mul(&s, y))).collect();
            if w.iter().any(|x| !f.is_zero(x)) {
                return Some(w);
            }
        }
    }
    None
}

fn solve_reduced(f: &FieldSpec, c: &[UPoly; 3], seed: u64) -> FieldResult<Option<[UPoly; 3]>> {
    let [a, b, cc] = c;
    // y = alpha z mod a, z = beta x mod b, x = gamma y mod c
    let alpha = if a.len() > 1 { sqrt_mod(f, &upoly::neg(f, cc), b, a)? } else { Some(vec![]) };
    let beta = if b.len() > 1 { sqrt_mod(f, &upoly::neg(f, a), cc, b)? } else { Some(vec![]) };
    let gamma = if cc.len() > 1 { sqrt_mod(f, &upoly::neg(f, b), a, cc)? } else { Some(vec![]) };
    let (alpha, beta, gamma) = match (alpha, beta, gamma) {
        (Some(x), Some(y), Some(z)) => (x, y, z),
        _ => return Ok(None),
    };
    let (da, db, dc) = (deg(a), deg(b), deg(cc));
    let s = da + db + dc;
    let bounds = [(s - da) / 2, (s - db) / 2, (s - dc) / 2];
    let offs = [0usize, bounds[0] as usize + 1, bounds[0] as usize + bounds[1] as usize + 2];
    let ncols = offs[2] + bounds[2] as usize + 1;
    // congruences (var u) - m * (var w) = 0 mod modulus
    let conds: [(usize, usize, &UPoly, &UPoly); 3] = [(1, 2, &alpha, a), (2, 0, &beta, b), (0, 1, &gamma, cc)];
    let mut rows: Vec<Vec<FieldElement>> = vec![];
    for (u, w, m, modulus) in conds {
        let nrow = modulus.len().saturating_sub(1);
        if nrow == 0 {
            continue;
        }
        let mut block = vec![vec![f.zero(); ncols]; nrow];
        for k in 0..=bounds[u] as usize {
            let r = upoly::rem(f, &monomial(f, k), modulus);
            for (i, x) in r.iter().enumerate() {
                block[i][offs[u] + k] = f.add(&block[i][offs[u] + k], x);
            }
        }
        for k in 0..=bounds[w] as usize {
            let r = upoly::rem(f, &upoly::neg(f, &mul(f, m, &monomial(f, k))), modulus);
            for (i, x) in r.iter().enumerate() {
                block[i][offs[w] + k] = f.add(&block[i][offs[w] + k], x);
            }
        }
        rows.extend(block);
    }
    let basis = if rows.is_empty() {
        (0..ncols)
            .map(|i| {
                let mut e = vec![f.zero(); ncols];
                e[i] = f.one();
                e
            })
            .collect()
    } else {
        linalg::kernel(f, &rows, ncols)
    };
    if basis.is_empty() {
        return Ok(None);
    }
    let to_triple = |coef: &[FieldElement]| -> [UPoly; 3] {
        let mut v: Vec<FieldElement> = vec![f.zero(); ncols];
        for (ci, bvec) in coef.iter().zip(&basis) {
            for (slot, x) in v.iter_mut().zip(bvec) {
                *slot = f.add(slot, &f.mul(ci, x));
            }
        }
        let part = |i: usize| upoly::trim(f, v[offs[i]..=offs[i] + bounds[i] as usize].to_vec());
        [part(0), part(1), part(2)]
    };
    // the value is a multiple of abc of degree at most s; its t^s coefficient is the form
    let lambda = |coef: &[FieldElement]| -> FieldElement {
        let val = diagonal_value(f, c, &to_triple(coef));
        val.get(s as usize).cloned().unwrap_or_else(|| f.zero())
    };
    let coef = match isotropic(f, basis.len(), &lambda, seed) {
        Some(x) => x,
        None => return Ok(None),
    };
    let sol = to_triple(&coef);
    if !diagonal_value(f, c, &sol).is_empty() {
        return Ok(None);
    }
    Ok(Some(sol))
}

/// A nonzero polynomial solution of `a x^2 + b y^2 + c z^2 = 0` over F_q(t), q odd.
///
/// `None` means no solution was found over this constant field (the conic may
/// still have points after extending the constants).
pub fn solve_diagonal(f: &FieldSpec, coeffs: &[UPoly; 3], seed: u64) -> FieldResult<Option<[UPoly; 3]>> {
    require_odd_finite(f)?;
    let coeffs = [0, 1, 2].map(|i| upoly::trim(f, coeffs[i].clone()));
    for i in 0..3 {
        if coeffs[i].is_empty() {
            let mut v = [vec![], vec![], vec![]];
            v[i] = vec![f.one()];
            return Ok(Some(v));
        }
    }
    let red = reduce(f, &coeffs);
    let sol = match solve_reduced(f, &red.coeffs, seed)? {
        Some(s) => s,
        None => return Ok(None),
    };
    let out = [0, 1, 2].map(|i| mul(f, &red.scale[i], &sol[i]));
    debug_assert!(diagonal_value(f, &coeffs, &out).is_empty());
    Ok(Some(out))
}

/// A nonzero polynomial zero of the ternary form `sum_{i<=j} q[i][j] w_i w_j` over F_q(t).
pub fn solve_ternary(f: &FieldSpec, q: &[[UPoly; 3]; 3], seed: u64) -> FieldResult<Option<[UPoly; 3]>> {
    require_odd_finite(f)?;
    let two = f.from_i64(2);
    // Gram matrix of 2Q
    let mut g: Vec<Vec<UPoly>> = vec![vec![vec![]; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let e = upoly::trim(f, q[i][j].clone());
            if i == j {
                g[i][i] = upoly::scale(f, &e, &two);
            } else {
                g[i][j] = e.clone();
                g[j][i] = e;
            }
        }
    }
    let bilinear = |x: &[UPoly; 3], y: &[UPoly; 3]| -> UPoly {
        let mut acc = vec![];
        for i in 0..3 {
            for j in 0..3 {
                acc = add(f, &acc, &mul(f, &x[i], &mul(f, &g[i][j], &y[j])));
            }
        }
        acc
    };
    let unit = |i: usize| {
        let mut e: [UPoly; 3] = [vec![], vec![], vec![]];
        e[i] = vec![f.one()];
        e
    };
    let comb = |a: &UPoly, x: &[UPoly; 3], b: &UPoly, y: &[UPoly; 3]| -> [UPoly; 3] {
        [0, 1, 2].map(|i| upoly::sub(f, &mul(f, a, &x[i]), &mul(f, b, &y[i])))
    };
    // fraction-free orthogonalization
    let mut basis = [unit(0), unit(1), unit(2)];
    for i in 0..3 {
        let d = bilinear(&basis[i], &basis[i]);
        if d.is_empty() {
            return Ok(Some(basis[i].clone()));
        }
        for j in i + 1..3 {
            let bij = bilinear(&basis[i], &basis[j]);
            basis[j] = comb(&d, &basis[j], &bij, &basis[i]);
        }
    }
    let diag = [0, 1, 2].map(|i| bilinear(&basis[i], &basis[i]));
    let sol = match solve_diagonal(f, &diag, seed)? {
        Some(s) => s,
        None => return Ok(None),
    };
    let mut w: [UPoly; 3] = [vec![], vec![], vec![]];
    for k in 0..3 {
        for i in 0..3 {
            w[i] = add(f, &w[i], &mul(f, &sol[k], &basis[k][i]));
        }
    }
    let h = upoly::gcd(f, &upoly::gcd(f, &w[0], &w[1]), &w[2]);
    if h.len() > 1 {
        w = w.map(|x| upoly::div_exact(f, &x, &h));
    }
    debug_assert!(form_value(f, q, &w).is_empty());
    Ok(Some(w))
}

/// Coefficient of every `w_i w_j` (i <= j) of a form quadratic in `w`, as a
/// polynomial in the single base variable `t`.
pub fn ternary_coefficients(q: &MultiPoly, t: usize, w: [usize; 3]) -> [[UPoly; 3]; 3] {
    let f = q.field();
    let mut out: [[UPoly; 3]; 3] = Default::default();
    for (m, c) in q.terms() {
        let e: Vec<u32> = w.iter().map(|&v| m.exp(v)).collect();
        let (i, j) = match e.as_slice() {
            [2, 0, 0] => (0, 0),
            [0, 2, 0] => (1, 1),
            [0, 0, 2] => (2, 2),
            [1, 1, 0] => (0, 1),
            [1, 0, 1] => (0, 2),
            [0, 1, 1] => (1, 2),
            _ => continue,
        };
        let k = m.exp(t) as usize;
        let slot = &mut out[i][j];
        if slot.len() <= k {
            slot.resize(k + 1, f.zero());
        }
        slot[k] = f.add(&slot[k], c);
    }
    out.map(|row| row.map(|p| upoly::trim(f, p)))
}

/// A point of the conic `q(w) = 0` over `F(t)` with polynomial coordinates, as
/// polynomials in `q`'s ring (involving only `t`).
pub fn conic_section(q: &MultiPoly, t: usize, w: [usize; 3], seed: u64) -> FieldResult<Option<Vec<MultiPoly>>> {
    let coeffs = ternary_coefficients(q, t, w);
    let Some(sol) = solve_ternary(q.field(), &coeffs, seed)? else { return Ok(None) };
    Ok(Some(sol.iter().map(|p| upoly_in(q.ring(), t, p)).collect()))
}

/// A univariate polynomial as a multivariate one in variable `t`.
pub fn upoly_in(ring: &Ring, t: usize, p: &UPoly) -> MultiPoly {
    let terms = p
        .iter()
        .enumerate()
        .filter(|(_, c)| !ring.field.is_zero(c))
        .map(|(k, c)| (Monomial::var(t, k as u32), c.clone()))
        .collect();
    MultiPoly::from_terms(ring, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(f: &FieldSpec, c: &[i64]) -> UPoly {
        upoly::trim(f, c.iter().map(|&x| f.from_i64(x)).collect())
    }

    #[test]
    fn constant_conic() {
        let f = FieldSpec::prime(7).unwrap();
        let c = [p(&f, &[1]), p(&f, &[1]), p(&f, &[1])];
        let s = solve_diagonal(&f, &c, 1).unwrap().unwrap();
        assert!(diagonal_value(&f, &c, &s).is_empty());
        assert!(s.iter().any(|x| !x.is_empty()));
    }

    #[test]
    fn t_coefficients() {
        // x^2 + t y^2 - (t + 1) z^2 has the point (1, 1, 1)
        let f = FieldSpec::prime(5).unwrap();
        let c = [p(&f, &[1]), p(&f, &[0, 1]), p(&f, &[-1, -1])];
        let s = solve_diagonal(&f, &c, 3).unwrap().unwrap();
        assert!(diagonal_value(&f, &c, &s).is_empty());
        assert!(s.iter().any(|x| !x.is_empty()));
    }

    #[test]
    fn squares_and_common_factors() {
        let f = FieldSpec::prime(13).unwrap();
        let t2 = p(&f, &[0, 0, 1]);
        // t^2 (t+1) x^2 + (t+1)(t+2) y^2 - z^2
        let c = [mul(&f, &t2, &p(&f, &[1, 1])), mul(&f, &p(&f, &[1, 1]), &p(&f, &[2, 1])), p(&f, &[-1])];
        let s = solve_diagonal(&f, &c, 5).unwrap().unwrap();
        assert!(diagonal_value(&f, &c, &s).is_empty());
        assert!(s.iter().any(|x| !x.is_empty()));
    }

    #[test]
    fn planted_points() {
        // c = -(a x0^2 + b y0^2) guarantees the point (x0, y0, 1)
        let f = FieldSpec::finite(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let rp = |rng: &mut ChaCha8Rng, n: usize| upoly::trim(&f, (0..n).map(|_| f.random(rng)).collect());
            let (a, b, x0, y0) = (rp(&mut rng, 4), rp(&mut rng, 3), rp(&mut rng, 2), rp(&mut rng, 3));
            let c = upoly::neg(&f, &add(&f, &mul(&f, &a, &mul(&f, &x0, &x0)), &mul(&f, &b, &mul(&f, &y0, &y0))));
            let coeffs = [a, b, c];
            let s = solve_diagonal(&f, &coeffs, 4).unwrap().expect("planted point");
            assert!(diagonal_value(&f, &coeffs, &s).is_empty());
            assert!(s.iter().any(|x| !x.is_empty()));
        }
    }

    #[test]
    fn obstructed_conic() {
        // x^2 - n y^2 - t z^2 with n a non-square: no point with t-adic valuation argument
        let f = FieldSpec::prime(7).unwrap();
        let c = [p(&f, &[1]), p(&f, &[-3]), p(&f, &[0, -1])];
        assert!(solve_diagonal(&f, &c, 2).unwrap().is_none());
    }

    #[test]
    fn ternary_form() {
        let f = FieldSpec::prime(13).unwrap();
        // w0^2 + t w1 w2 + (t^2 + 1) w2^2 + w1^2
        let z = vec![];
        let q = [
            [p(&f, &[1]), z.clone(), z.clone()],
            [z.clone(), p(&f, &[1]), p(&f, &[0, 1])],
            [z.clone(), z.clone(), p(&f, &[1, 0, 1])],
        ];
        let w = solve_ternary(&f, &q, 9).unwrap().unwrap();
        assert!(form_value(&f, &q, &w).is_empty());
        assert!(w.iter().any(|x| !x.is_empty()));
    }
}
