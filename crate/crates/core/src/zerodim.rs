//! Zero-dimensional ideals: the finite quotient algebra, minimal polynomials,
//! radicals, and splitting into closed points over a finite field.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::factor;
use crate::field::{FieldElement, FieldError, FieldSpec};
use crate::groebner::{Engine, GroebnerBasis, Ideal, IdealError, IdealResult};
use crate::linalg;
use crate::poly::{Monomial, MonomialOrder, MultiPoly};
use crate::upoly::{self, UPoly};

/// `k[x]/I` for zero-dimensional `I`, with the standard-monomial basis.
pub struct QuotientAlgebra {
    gb: GroebnerBasis,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl QuotientAlgebra {
    pub fn new(gb: GroebnerBasis) -> IdealResult<Self> {
        let basis = gb.standard_monomials()?;
        let index = basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        Ok(QuotientAlgebra { gb, basis, index })
    }

    pub fn from_ideal(engine: &Engine, ideal: &Ideal) -> IdealResult<Self> {
        Self::new(engine.groebner(ideal, MonomialOrder::Grevlex)?)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn groebner(&self) -> &GroebnerBasis {
        &self.gb
    }

    pub fn coords(&self, f: &MultiPoly) -> IdealResult<Vec<FieldElement>> {
        let nf = self.gb.normal_form(f)?;
        let field = f.field();
        let mut v = vec![field.zero(); self.dim()];
        for (m, c) in nf.terms() {
            v[self.index[m]] = c.clone();
        }
        Ok(v)
    }

    /// Powers `NF(f^k)` for `k = 0..count`, as coordinate vectors.
    fn power_coords(&self, f: &MultiPoly, count: usize) -> IdealResult<Vec<Vec<FieldElement>>> {
        let mut out = vec![];
        let mut p = self.gb.normal_form(&MultiPoly::one(f.ring()))?;
        for _ in 0..count {
            out.push(self.coords(&p)?);
            p = self.gb.normal_form(&p.mul(f))?;
        }
        Ok(out)
    }

    /// Monic minimal polynomial of multiplication by `f`.
    pub fn min_poly(&self, f: &MultiPoly) -> IdealResult<UPoly> {
        let field = f.field().clone();
        let n = self.dim();
        let powers = self.power_coords(f, n + 1)?;
        for k in 1..=n {
            // columns: powers[0..k]; solve for powers[k]
            let m: linalg::Matrix =
                (0..n).map(|r| (0..k).map(|c| powers[c][r].clone()).collect()).collect();
            if let Some(sol) = linalg::solve(&field, &m, &powers[k]) {
                let mut poly: UPoly = sol.iter().map(|c| field.neg(c)).collect();
                poly.push(field.one());
                return Ok(poly);
            }
        }
        unreachable!("Cayley–Hamilton bounds the degree by the dimension")
    }
}

/// Squarefree part of a monic univariate polynomial.
pub fn squarefree_part(field: &FieldSpec, f: &UPoly) -> UPoly {
    if field.is_finite() {
        let mut acc = vec![field.one()];
        for (g, _) in factor::squarefree(field, f) {
            acc = upoly::mul(field, &acc, &g);
        }
        return acc;
    }
    let g = upoly::gcd(field, f, &upoly::derivative(field, f));
    upoly::div_exact(field, f, &g)
}

/// Substitutes `x` into a univariate polynomial.
pub fn upoly_at(f: &UPoly, x: &MultiPoly) -> MultiPoly {
    let ring = x.ring();
    let mut acc = MultiPoly::zero(ring);
    for c in f.iter().rev() {
        acc = acc.mul(x).add(&MultiPoly::constant(ring, c.clone()));
    }
    acc
}

/// Radical of a zero-dimensional ideal: adjoin the squarefree part of each
/// variable's minimal polynomial (valid over perfect fields).
pub fn radical(engine: &Engine, ideal: &Ideal) -> IdealResult<Ideal> {
    let alg = QuotientAlgebra::from_ideal(engine, ideal)?;
    let ring = ideal.ring();
    if alg.dim() == 0 {
        return Ok(Ideal::unit(ring));
    }
    let mut extra = vec![];
    for i in 0..ring.arity() {
        let x = MultiPoly::var(ring, i);
        let m = alg.min_poly(&x)?;
        extra.push(upoly_at(&squarefree_part(&ring.field, &m), &x));
    }
    ideal.with(&extra)
}

/// `(quotient dimension, radical quotient dimension)`.
pub fn degree_profile(engine: &Engine, ideal: &Ideal) -> IdealResult<(usize, usize)> {
    let d = engine.quotient_dimension(ideal)?;
    if d == 0 {
        return Ok((0, 0));
    }
    let r = radical(engine, ideal)?;
    Ok((d, engine.quotient_dimension(&r)?))
}

pub fn is_radical(engine: &Engine, ideal: &Ideal) -> IdealResult<bool> {
    let (d, r) = degree_profile(engine, ideal)?;
    Ok(d == r)
}

/// A closed point of a zero-dimensional reduced scheme over a finite field.
#[derive(Clone, Debug)]
pub struct ClosedPoint {
    /// Residue degree over the base field.
    pub degree: usize,
    /// Maximal ideal over the base field.
    pub ideal: Ideal,
    /// Field over which the point's geometric points are rational.
    pub residue_field: FieldSpec,
    /// All geometric points (Galois conjugates), as coordinates in `residue_field`.
    pub conjugates: Vec<Vec<FieldElement>>,
}

impl ClosedPoint {
    pub fn representative(&self) -> &[FieldElement] {
        &self.conjugates[0]
    }
}

const SEPARATING_ATTEMPTS: usize = 64;

/// Splits a reduced zero-dimensional ideal over a finite field into closed points
/// using a separating linear form and the shape lemma.
pub fn split_points(engine: &Engine, ideal: &Ideal, seed: u64) -> IdealResult<Vec<ClosedPoint>> {
    let ring = ideal.ring();
    let field = ring.field.clone();
    if !field.is_finite() {
        return Err(FieldError::UnsupportedField(format!("point splitting over {}", field.name())).into());
    }
    let alg = QuotientAlgebra::from_ideal(engine, ideal)?;
    let n = alg.dim();
    if n == 0 {
        return Ok(vec![]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arity = ring.arity();
    for attempt in 0..SEPARATING_ATTEMPTS {
        let ell = if attempt == 0 && arity == 1 {
            MultiPoly::var(ring, 0)
        } else {
            (0..arity).fold(MultiPoly::zero(ring), |acc, i| {
                acc.add(&MultiPoly::var(ring, i).scale(&field.random(&mut rng)))
            })
        };
        let mp = alg.min_poly(&ell)?;
        if mp.len() - 1 != n {
            continue;
        }
        // shape lemma: x_i = P_i(ell) with deg P_i < n
        let powers = alg.power_coords(&ell, n)?;
        let m: linalg::Matrix = (0..n).map(|r| (0..n).map(|c| powers[c][r].clone()).collect()).collect();
        let mut shapes = vec![];
        for i in 0..arity {
            let target = alg.coords(&MultiPoly::var(ring, i))?;
            let sol = linalg::solve(&field, &m, &target).ok_or(IdealError::NotZeroDimensional)?;
            shapes.push(upoly::trim(&field, sol));
        }
        let fac = factor::factor_univariate(&mp, &field)?;
        let mut ext_cache: HashMap<usize, FieldSpec> = HashMap::new();
        let mut out = vec![];
        for (h, _) in &fac.factors {
            let d = h.len() - 1;
            let ext = match ext_cache.get(&d) {
                Some(e) => e.clone(),
                None => {
                    let e = if d == 1 { field.clone() } else { FieldSpec::finite_extension(&field, d, "w")? };
                    ext_cache.insert(d, e.clone());
                    e
                }
            };
            let h_ext: UPoly = h.iter().map(|c| ext.embed(&field, c)).collect::<Result<_, _>>()?;
            let mut roots = factor::roots(&h_ext, &ext)?;
            roots.sort();
            let conjugates = roots
                .iter()
                .map(|r| {
                    shapes
                        .iter()
                        .map(|p| {
                            let pe: UPoly = p.iter().map(|c| ext.embed(&field, c).unwrap()).collect();
                            upoly::eval(&ext, &pe, r)
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
            let maximal = ideal.with(&[upoly_at(h, &ell)])?;
            out.push(ClosedPoint { degree: d, ideal: maximal, residue_field: ext, conjugates });
        }
        return Ok(out);
    }
    Err(FieldError::SplittingFailed(SEPARATING_ATTEMPTS).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::ring_of;

    #[test]
    fn radical_of_double_point() {
        let f = FieldSpec::prime(101).unwrap();
        let r = ring_of(&f, &["x", "y"]);
        let x = MultiPoly::var(&r, 0);
        let y = MultiPoly::var(&r, 1);
        let e = Engine::default();
        let i = Ideal::new(&r, vec![x.pow(2), y.sub(&x)]).unwrap();
        assert_eq!(degree_profile(&e, &i).unwrap(), (2, 1));
        let j = Ideal::new(&r, vec![x.pow(2).sub(&MultiPoly::one(&r)), y.pow(2).sub(&x)]).unwrap();
        assert!(is_radical(&e, &j).unwrap());
    }

    #[test]
    fn split_conjugate_points() {
        // x^2 + 1 is irreducible mod 7, y = x: one closed point of degree 2;
        // x = 3: rational point
        let f = FieldSpec::prime(7).unwrap();
        let r = ring_of(&f, &["x", "y"]);
        let x = MultiPoly::var(&r, 0);
        let y = MultiPoly::var(&r, 1);
        let e = Engine::default();
        let g1 = x.pow(2).add(&MultiPoly::one(&r)).mul(&x.sub(&MultiPoly::from_i64(&r, 3)));
        let i = Ideal::new(&r, vec![g1, y.sub(&x)]).unwrap();
        let pts = split_points(&e, &i, 1).unwrap();
        let mut degs: Vec<usize> = pts.iter().map(|p| p.degree).collect();
        degs.sort();
        assert_eq!(degs, vec![1, 2]);
        for p in &pts {
            assert_eq!(p.conjugates.len(), p.degree);
            for c in &p.conjugates {
                for g in i.gens() {
                    assert!(p.residue_field.is_zero(&g.evaluate(c, &p.residue_field).unwrap()));
                }
            }
        }
    }
}
