//! Ideals and reduced Gröbner bases.
//!
//! Buchberger's algorithm with the normal selection strategy (smallest lcm
//! first) and the Gebauer–Möller installation of the product and chain
//! criteria. Polynomials are converted to an order-sorted working form
//! (ascending, leading term last) for the duration of a computation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use serde_json::{json, Value};
use thiserror::Error;

use crate::cache::{sha256_hex, GbCache};
use crate::field::{FieldElement, FieldError, FieldSpec};
use crate::poly::{same_ring, Monomial, MonomialOrder, MultiPoly, PolyError, PolyRing, Ring};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdealError {
    #[error("resource cap ({what}) exceeded after {pairs} pairs with basis size {basis}")]
    ResourceCap { what: &'static str, pairs: usize, basis: usize },
    #[error("basis computed for order {found}, requested {expected}")]
    OrderMismatch { expected: String, found: String },
    #[error("ideal is not zero-dimensional")]
    NotZeroDimensional,
    #[error("bad elimination block: {0}")]
    BadBlock(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type IdealResult<T> = Result<T, IdealError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_pairs: usize,
    pub max_basis: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_pairs: 200_000, max_basis: 20_000 }
    }
}

/// Generators of an ideal in a shared ring. The empty list is the zero ideal.
#[derive(Clone, Debug, PartialEq)]
pub struct Ideal {
    ring: Ring,
    gens: Vec<MultiPoly>,
}

impl Ideal {
    pub fn new(ring: &Ring, gens: Vec<MultiPoly>) -> IdealResult<Self> {
        for g in &gens {
            if !same_ring(g.ring(), ring) {
                return Err(PolyError::AmbientMismatch.into());
            }
        }
        Ok(Ideal { ring: ring.clone(), gens: gens.into_iter().filter(|g| !g.is_zero()).collect() })
    }

    /// Ideal generated by the given polynomials, taking the ring from the first.
    pub fn from_gens(gens: Vec<MultiPoly>) -> IdealResult<Self> {
        let ring = gens.first().expect("at least one generator").ring().clone();
        Self::new(&ring, gens)
    }

    pub fn unit(ring: &Ring) -> Self {
        Ideal { ring: ring.clone(), gens: vec![MultiPoly::one(ring)] }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn field(&self) -> &FieldSpec {
        &self.ring.field
    }

    pub fn gens(&self) -> &[MultiPoly] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn with(&self, extra: &[MultiPoly]) -> IdealResult<Ideal> {
        let mut gens = self.gens.clone();
        gens.extend(extra.iter().cloned());
        Ideal::new(&self.ring, gens)
    }

    pub fn sum(&self, other: &Ideal) -> IdealResult<Ideal> {
        self.with(&other.gens)
    }

    pub fn product(&self, other: &Ideal) -> IdealResult<Ideal> {
        let mut gens = vec![];
        for a in &self.gens {
            for b in &other.gens {
                gens.push(a.mul(b));
            }
        }
        Ideal::new(&self.ring, gens)
    }

    /// Same generators viewed in a ring whose variables include ours (by name).
    pub fn embed_into(&self, target: &Ring) -> IdealResult<Ideal> {
        let gens = self.gens.iter().map(|g| g.embed_into(target)).collect::<Result<_, _>>()?;
        Ideal::new(target, gens)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "field": self.field().descriptor(),
            "vars": self.ring.vars,
            "gens": self.gens.iter().map(|g| g.to_json()["terms"].clone()).collect::<Vec<_>>(),
        })
    }

    /// Content hash of the generators (input provenance).
    pub fn hash(&self) -> String {
        sha256_hex(self.to_json().to_string().as_bytes())
    }
}

type Term = (Monomial, FieldElement);

/// Order-sorted working polynomial, ascending; leading term is last.
type Work = Vec<Term>;

struct Ctx<'a> {
    field: &'a FieldSpec,
    order: MonomialOrder,
}

impl<'a> Ctx<'a> {
    fn to_work(&self, p: &MultiPoly) -> Work {
        let mut t = p.terms().to_vec();
        t.sort_by(|a, b| self.order.cmp(&a.0, &b.0));
        t
    }

    fn to_poly(&self, ring: &Ring, w: &Work) -> MultiPoly {
        MultiPoly::from_terms(ring, w.clone())
    }

    fn mul_term(&self, g: &[Term], c: &FieldElement, m: &Monomial) -> Work {
        g.iter().map(|(gm, gc)| (gm.mul(m), self.field.mul(gc, c))).collect()
    }

    /// `h - c*m*g`.
    fn sub_mul(&self, h: &[Term], c: &FieldElement, m: &Monomial, g: &[Term]) -> Work {
        let f = self.field;
        let mut out = Vec::with_capacity(h.len() + g.len());
        let (mut i, mut j) = (0, 0);
        while i < h.len() || j < g.len() {
            if j == g.len() {
                out.extend_from_slice(&h[i..]);
                break;
            }
            let gm = g[j].0.mul(m);
            if i == h.len() {
                out.push((gm, f.neg(&f.mul(c, &g[j].1))));
                j += 1;
                continue;
            }
            match self.order.cmp(&h[i].0, &gm) {
                Ordering::Less => {
                    out.push(h[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((gm, f.neg(&f.mul(c, &g[j].1))));
                    j += 1;
                }
                Ordering::Equal => {
                    let v = f.sub(&h[i].1, &f.mul(c, &g[j].1));
                    if !f.is_zero(&v) {
                        out.push((gm, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    fn scale(&self, h: &[Term], c: &FieldElement) -> Work {
        h.iter().map(|(m, a)| (*m, self.field.mul(a, c))).collect()
    }

    /// Fully reduces `h` by the monic polynomials `basis[active]`. When
    /// `track` is given, cofactors of `h` are updated alongside.
    fn reduce(
        &self,
        mut h: Work,
        basis: &[Work],
        active: &[usize],
        mut track: Option<(&mut Vec<Work>, &[Vec<Work>])>,
    ) -> Work {
        let mut rem: Vec<Term> = vec![];
        while let Some((m, c)) = h.last().cloned() {
            let hit = active.iter().copied().find(|&i| {
                let lm = &basis[i].last().unwrap().0;
                lm.divides(&m)
            });
            match hit {
                Some(i) => {
                    let g = &basis[i];
                    let q = g.last().unwrap().0.quotient_of(&m);
                    h.pop();
                    h = self.sub_mul(&h, &c, &q, &g[..g.len() - 1]);
                    if let Some((hc, bc)) = track.as_mut() {
                        for (k, slot) in hc.iter_mut().enumerate() {
                            *slot = self.sub_mul(slot, &c, &q, &bc[i][k]);
                        }
                    }
                }
                None => {
                    rem.push(h.pop().unwrap());
                }
            }
        }
        rem.reverse();
        rem
    }
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

struct Run {
    polys: Vec<Work>,
    cofs: Option<Vec<Vec<Work>>>,
    active: Vec<usize>,
    pairs: Vec<Pair>,
    reduced: usize,
}

impl Run {
    fn lm(&self, i: usize) -> Monomial {
        self.polys[i].last().unwrap().0
    }

    fn install(&mut self, h: usize) {
        let lm_h = self.lm(h);
        let cand: Vec<(usize, Monomial)> =
            self.active.iter().map(|&g| (g, lm_h.lcm(&self.lm(g)))).collect();
        let mut kept: Vec<(usize, Monomial)> = vec![];
        for (idx, &(g, l)) in cand.iter().enumerate() {
            let coprime = lm_h.is_coprime(&self.lm(g));
            let dominated = cand[idx + 1..].iter().chain(kept.iter()).any(|(_, l2)| l2.divides(&l));
            if coprime || !dominated {
                kept.push((g, l));
            }
        }
        let new_pairs: Vec<Pair> = kept
            .into_iter()
            .filter(|&(g, _)| !lm_h.is_coprime(&self.lm(g)))
            .map(|(g, lcm)| Pair { i: g, j: h, lcm })
            .collect();
        let lms: Vec<Monomial> = self.polys.iter().map(|p| p.last().unwrap().0).collect();
        self.pairs.retain(|p| {
            !(lm_h.divides(&p.lcm)
                && lms[p.i].lcm(&lm_h) != p.lcm
                && lms[p.j].lcm(&lm_h) != p.lcm)
        });
        self.pairs.extend(new_pairs);
        self.active.retain(|&g| !lm_h.divides(&lms[g]));
        self.active.push(h);
    }
}

/// A reduced Gröbner basis. Elements are monic and sorted by leading monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct GroebnerBasis {
    ring: Ring,
    order: MonomialOrder,
    basis: Vec<MultiPoly>,
    input_hash: String,
}

/// Cofactors `h_i` with `f = sum h_i g_i` over the ideal's generators.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipCertificate {
    pub cofactors: Vec<MultiPoly>,
}

impl MembershipCertificate {
    pub fn verify(&self, f: &MultiPoly, ideal: &Ideal) -> bool {
        if self.cofactors.len() != ideal.gens().len() {
            return false;
        }
        let mut acc = MultiPoly::zero(ideal.ring());
        for (h, g) in self.cofactors.iter().zip(ideal.gens()) {
            acc = acc.add(&h.mul(g));
        }
        acc == *f
    }
}

fn order_name(o: MonomialOrder) -> String {
    o.name()
}

impl GroebnerBasis {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn basis(&self) -> &[MultiPoly] {
        &self.basis
    }

    pub fn input_hash(&self) -> &str {
        &self.input_hash
    }

    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant()
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.basis.iter().map(|g| g.leading_term(self.order).unwrap().0).collect()
    }

    pub fn normal_form(&self, f: &MultiPoly) -> IdealResult<MultiPoly> {
        if !same_ring(f.ring(), &self.ring) {
            return Err(PolyError::AmbientMismatch.into());
        }
        let ctx = Ctx { field: &self.ring.field, order: self.order };
        let work: Vec<Work> = self.basis.iter().map(|g| ctx.to_work(g)).collect();
        let active: Vec<usize> = (0..work.len()).collect();
        let r = ctx.reduce(ctx.to_work(f), &work, &active, None);
        Ok(ctx.to_poly(&self.ring, &r))
    }

    /// Normal form with a check that the basis was computed for `order`.
    pub fn normal_form_in(&self, f: &MultiPoly, order: MonomialOrder) -> IdealResult<MultiPoly> {
        if order != self.order {
            return Err(IdealError::OrderMismatch {
                expected: order_name(order),
                found: order_name(self.order),
            });
        }
        self.normal_form(f)
    }

    pub fn contains(&self, f: &MultiPoly) -> IdealResult<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// Whether every S-polynomial reduces to zero (the Buchberger criterion).
    pub fn check_s_pairs(&self) -> bool {
        let ctx = Ctx { field: &self.ring.field, order: self.order };
        let work: Vec<Work> = self.basis.iter().map(|g| ctx.to_work(g)).collect();
        let active: Vec<usize> = (0..work.len()).collect();
        let one = self.ring.field.one();
        for i in 0..work.len() {
            for j in i + 1..work.len() {
                let (a, b) = (work[i].last().unwrap().0, work[j].last().unwrap().0);
                let l = a.lcm(&b);
                let s = ctx.sub_mul(&ctx.mul_term(&work[i], &one, &a.quotient_of(&l)), &one, &b.quotient_of(&l), &work[j]);
                if !ctx.reduce(s, &work, &active, None).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    /// Every leading monomial is a pure power for each variable appearing in
    /// some basis element's leading term, and every variable has one.
    pub fn is_zero_dimensional(&self) -> bool {
        if self.is_unit() {
            return true;
        }
        let lms = self.leading_monomials();
        let n = self.ring.arity();
        (0..n).all(|i| lms.iter().any(|m| m.exp(i) > 0 && m.degree() == m.exp(i)))
    }

    /// Standard monomials (not divisible by any leading monomial).
    pub fn standard_monomials(&self) -> IdealResult<Vec<Monomial>> {
        if !self.is_zero_dimensional() {
            return Err(IdealError::NotZeroDimensional);
        }
        let lms = self.leading_monomials();
        let n = self.ring.arity();
        let mut out = vec![];
        let mut stack = vec![(Monomial::ONE, 0usize)];
        while let Some((m, first)) = stack.pop() {
            if lms.iter().any(|l| l.divides(&m)) {
                continue;
            }
            out.push(m);
            for i in first..n {
                stack.push((m.mul(&Monomial::var(i, 1)), i));
            }
        }
        out.sort_by(|a, b| self.order.cmp(a, b));
        Ok(out)
    }

    pub fn quotient_dimension(&self) -> IdealResult<usize> {
        Ok(self.standard_monomials()?.len())
    }

    pub fn to_ideal(&self) -> Ideal {
        Ideal { ring: self.ring.clone(), gens: self.basis.clone() }
    }

    fn to_json(&self) -> Value {
        json!({
            "order": order_name(self.order),
            "basis": self.basis.iter().map(|g| g.to_json()["terms"].clone()).collect::<Vec<_>>(),
        })
    }

    fn from_json(ring: &Ring, order: MonomialOrder, input_hash: String, v: &Value) -> Option<Self> {
        if v.get("order")?.as_str()? != order_name(order) {
            return None;
        }
        let basis = v
            .get("basis")?
            .as_array()?
            .iter()
            .map(|t| MultiPoly::from_json_in(ring, &json!({ "terms": t })).ok())
            .collect::<Option<Vec<_>>>()?;
        Some(GroebnerBasis { ring: ring.clone(), order, basis, input_hash })
    }
}

/// Gröbner engine: resource budget plus optional on-disk cache.
#[derive(Debug, Default)]
pub struct Engine {
    pub budget: Budget,
    cache: Option<GbCache>,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl Clone for Engine {
    fn clone(&self) -> Self {
        Engine {
            budget: self.budget,
            cache: self.cache.clone(),
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
        }
    }
}

const FRESH_VAR: &str = "_t";

impl Engine {
    pub fn new(budget: Budget, cache: Option<GbCache>) -> Self {
        Engine { budget, cache, hits: AtomicUsize::new(0), misses: AtomicUsize::new(0) }
    }

    pub fn cache(&self) -> Option<&GbCache> {
        self.cache.as_ref()
    }

    pub fn cache_hits(&self) -> usize {
        self.hits.load(AtomicOrdering::Relaxed)
    }

    pub fn cache_misses(&self) -> usize {
        self.misses.load(AtomicOrdering::Relaxed)
    }

    pub fn groebner(&self, ideal: &Ideal, order: MonomialOrder) -> IdealResult<GroebnerBasis> {
        let input_hash = ideal.hash();
        let key = sha256_hex(format!("{input_hash}:{}", order_name(order)).as_bytes());
        if let Some(cache) = &self.cache {
            if let Some(v) = cache.get(&key) {
                if let Some(gb) = GroebnerBasis::from_json(ideal.ring(), order, input_hash.clone(), &v) {
                    self.hits.fetch_add(1, AtomicOrdering::Relaxed);
                    return Ok(gb);
                }
            }
            self.misses.fetch_add(1, AtomicOrdering::Relaxed);
        }
        let (basis, _) = self.buchberger(ideal, order, false)?;
        let gb = GroebnerBasis { ring: ideal.ring().clone(), order, basis, input_hash };
        if let Some(cache) = &self.cache {
            // a failed cache write only costs a recomputation later
            let _ = cache.put(&key, &gb.to_json());
        }
        Ok(gb)
    }

    fn buchberger(
        &self,
        ideal: &Ideal,
        order: MonomialOrder,
        track: bool,
    ) -> IdealResult<(Vec<MultiPoly>, Option<Vec<Vec<MultiPoly>>>)> {
        let ring = ideal.ring();
        let field = &ring.field;
        let ctx = Ctx { field, order };
        let ngens = ideal.gens().len();
        let mut run = Run {
            polys: vec![],
            cofs: if track { Some(vec![]) } else { None },
            active: vec![],
            pairs: vec![],
            reduced: 0,
        };
        let budget = self.budget;
        let cap = |what, run: &Run| IdealError::ResourceCap { what, pairs: run.reduced, basis: run.polys.len() };

        // returns true once the ideal is known to be the unit ideal
        let add = |run: &mut Run, h: Work, hc: Option<Vec<Work>>| -> IdealResult<bool> {
            let mut hc = hc;
            let h = match (&mut run.cofs, hc.as_mut()) {
                (Some(cofs), Some(hcv)) => ctx.reduce(h, &run.polys, &run.active, Some((hcv, cofs))),
                _ => ctx.reduce(h, &run.polys, &run.active, None),
            };
            if h.is_empty() {
                return Ok(false);
            }
            let inv = field.inv(&h.last().unwrap().1)?;
            let h = ctx.scale(&h, &inv);
            let unit = h.len() == 1 && h[0].0.is_one();
            run.polys.push(h);
            if let (Some(cofs), Some(hcv)) = (&mut run.cofs, hc) {
                cofs.push(hcv.iter().map(|c| ctx.scale(c, &inv)).collect());
            }
            let idx = run.polys.len() - 1;
            if unit {
                run.active = vec![idx];
                run.pairs.clear();
                return Ok(true);
            }
            run.install(idx);
            if run.polys.len() > budget.max_basis {
                return Err(cap("basis size", run));
            }
            Ok(false)
        };

        let mut order_gens: Vec<usize> = (0..ngens).collect();
        let gens_work: Vec<Work> = ideal.gens().iter().map(|g| ctx.to_work(g)).collect();
        order_gens.sort_by(|&a, &b| {
            order.cmp(&gens_work[a].last().unwrap().0, &gens_work[b].last().unwrap().0)
        });
        let mut unit = false;
        for &k in &order_gens {
            let hc = track.then(|| {
                (0..ngens)
                    .map(|i| if i == k { vec![(Monomial::ONE, field.one())] } else { vec![] })
                    .collect()
            });
            if add(&mut run, gens_work[k].clone(), hc)? {
                unit = true;
                break;
            }
        }
        let one = field.one();
        while !unit && !run.pairs.is_empty() {
            let best = (0..run.pairs.len())
                .min_by(|&a, &b| {
                    let (p, q) = (&run.pairs[a], &run.pairs[b]);
                    order.cmp(&p.lcm, &q.lcm).then((p.i, p.j).cmp(&(q.i, q.j)))
                })
                .unwrap();
            let pair = run.pairs.swap_remove(best);
            run.reduced += 1;
            if run.reduced > budget.max_pairs {
                return Err(cap("pair count", &run));
            }
            let (a, b) = (run.lm(pair.i), run.lm(pair.j));
            let (qa, qb) = (a.quotient_of(&pair.lcm), b.quotient_of(&pair.lcm));
            let s = ctx.sub_mul(&ctx.mul_term(&run.polys[pair.i], &one, &qa), &one, &qb, &run.polys[pair.j]);
            let sc = run.cofs.as_ref().map(|cofs| {
                (0..ngens)
                    .map(|k| ctx.sub_mul(&ctx.mul_term(&cofs[pair.i][k], &one, &qa), &one, &qb, &cofs[pair.j][k]))
                    .collect::<Vec<_>>()
            });
            unit = add(&mut run, s, sc)?;
        }

        // interreduce the surviving elements
        let mut active = run.active.clone();
        active.sort_by(|&a, &b| order.cmp(&run.lm(a), &run.lm(b)));
        for pos in 0..active.len() {
            let i = active[pos];
            let others: Vec<usize> = active.iter().copied().filter(|&j| j != i).collect();
            let mut p = run.polys[i].clone();
            let lead = p.pop().unwrap();
            let tail = match &mut run.cofs {
                Some(cofs) => {
                    let mut hc = cofs[i].clone();
                    let t = ctx.reduce(p, &run.polys, &others, Some((&mut hc, cofs)));
                    cofs[i] = hc;
                    t
                }
                None => ctx.reduce(p, &run.polys, &others, None),
            };
            let mut t = tail;
            t.push(lead);
            run.polys[i] = t;
        }
        let basis = active.iter().map(|&i| ctx.to_poly(ring, &run.polys[i])).collect();
        let cofs = run.cofs.map(|cofs| {
            active
                .iter()
                .map(|&i| cofs[i].iter().map(|c| ctx.to_poly(ring, c)).collect())
                .collect()
        });
        Ok((basis, cofs))
    }

    pub fn contains(&self, f: &MultiPoly, ideal: &Ideal) -> IdealResult<bool> {
        self.groebner(ideal, MonomialOrder::Grevlex)?.contains(f)
    }

    pub fn is_unit_ideal(&self, ideal: &Ideal) -> IdealResult<bool> {
        Ok(self.groebner(ideal, MonomialOrder::Grevlex)?.is_unit())
    }

    /// Membership decision plus cofactors over the ideal's generators when `f ∈ I`.
    pub fn membership(
        &self,
        f: &MultiPoly,
        ideal: &Ideal,
    ) -> IdealResult<(bool, Option<MembershipCertificate>)> {
        if !same_ring(f.ring(), ideal.ring()) {
            return Err(PolyError::AmbientMismatch.into());
        }
        let ring = ideal.ring();
        if f.is_zero() {
            let cofactors = vec![MultiPoly::zero(ring); ideal.gens().len()];
            return Ok((true, Some(MembershipCertificate { cofactors })));
        }
        let order = MonomialOrder::Grevlex;
        let (basis, cofs) = self.buchberger(ideal, order, true)?;
        let cofs = cofs.unwrap();
        let ctx = Ctx { field: &ring.field, order };
        let work: Vec<Work> = basis.iter().map(|g| ctx.to_work(g)).collect();
        let cof_work: Vec<Vec<Work>> =
            cofs.iter().map(|row| row.iter().map(|c| ctx.to_work(c)).collect()).collect();
        // reduce f with quotient tracking against the basis
        let m = basis.len();
        let unit_rows: Vec<Vec<Work>> = (0..m)
            .map(|j| (0..m).map(|k| if j == k { vec![(Monomial::ONE, ring.field.one())] } else { vec![] }).collect())
            .collect();
        let mut q: Vec<Work> = vec![vec![]; m];
        let active: Vec<usize> = (0..m).collect();
        let r = ctx.reduce(ctx.to_work(f), &work, &active, Some((&mut q, &unit_rows)));
        if !r.is_empty() {
            return Ok((false, None));
        }
        // reduce() tracks f - sum q_j g_j, so q holds the negated quotients
        let mut cofactors = vec![MultiPoly::zero(ring); ideal.gens().len()];
        for (j, qj) in q.iter().enumerate() {
            let qj = ctx.to_poly(ring, qj).neg();
            if qj.is_zero() {
                continue;
            }
            for (k, slot) in cofactors.iter_mut().enumerate() {
                *slot = slot.add(&qj.mul(&cof_work_poly(&ctx, ring, &cof_work[j][k])));
            }
        }
        Ok((true, Some(MembershipCertificate { cofactors })))
    }

    /// `f ∈ √I`, decided by `1 ∈ I + ⟨t·f − 1⟩`.
    pub fn radical_membership(&self, f: &MultiPoly, ideal: &Ideal) -> IdealResult<bool> {
        let (big, t) = extend_ring(ideal.ring())?;
        let lifted = ideal.embed_into(&big)?;
        let tf = MultiPoly::var(&big, t).mul(&f.embed_into(&big)?).sub(&MultiPoly::one(&big));
        self.is_unit_ideal(&lifted.with(&[tf])?)
    }

    /// `I ∩ k[remaining variables]`, returned in a ring on the remaining variables.
    pub fn eliminate(&self, ideal: &Ideal, vars: &[usize]) -> IdealResult<Ideal> {
        let ring = ideal.ring();
        let n = ring.arity();
        if vars.is_empty() || vars.len() >= n || vars.iter().any(|&v| v >= n) {
            return Err(IdealError::BadBlock(format!("{vars:?} in {n} variables")));
        }
        let keep: Vec<String> =
            (0..n).filter(|i| !vars.contains(i)).map(|i| ring.vars[i].clone()).collect();
        let mut names: Vec<String> = vars.iter().map(|&i| ring.vars[i].clone()).collect();
        names.extend(keep.iter().cloned());
        let reordered = PolyRing::from_names(&ring.field, names)?;
        let lifted = ideal.embed_into(&reordered)?;
        let gb = self.groebner(&lifted, MonomialOrder::Block { split: vars.len() })?;
        let sub = PolyRing::from_names(&ring.field, keep)?;
        let k = vars.len();
        let gens = gb
            .basis()
            .iter()
            .filter(|g| (0..k).all(|i| !g.uses_var(i)))
            .map(|g| {
                let images: Vec<MultiPoly> = (0..reordered.arity())
                    .map(|i| if i < k { MultiPoly::zero(&sub) } else { MultiPoly::var(&sub, i - k) })
                    .collect();
                g.substitute_all(&images, &sub)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ideal::new(&sub, gens)
    }

    /// `(I : f^∞)` via elimination of `t` from `I + ⟨t·f − 1⟩`.
    pub fn saturate(&self, ideal: &Ideal, f: &MultiPoly) -> IdealResult<Ideal> {
        if f.is_zero() {
            return Err(PolyError::Field(FieldError::DivisionByZero).into());
        }
        let ring = ideal.ring();
        let (big, t) = extend_ring(ring)?;
        let lifted = ideal.embed_into(&big)?;
        let tf = MultiPoly::var(&big, t).mul(&f.embed_into(&big)?).sub(&MultiPoly::one(&big));
        let elim = self.eliminate(&lifted.with(&[tf])?, &[t])?;
        elim.embed_into(ring)
    }

    pub fn quotient_dimension(&self, ideal: &Ideal) -> IdealResult<usize> {
        self.groebner(ideal, MonomialOrder::Grevlex)?.quotient_dimension()
    }

    pub fn is_zero_dimensional(&self, ideal: &Ideal) -> IdealResult<bool> {
        Ok(self.groebner(ideal, MonomialOrder::Grevlex)?.is_zero_dimensional())
    }
}

fn cof_work_poly(ctx: &Ctx, ring: &Ring, w: &Work) -> MultiPoly {
    ctx.to_poly(ring, w)
}

/// The ring with one fresh variable appended; returns it and the variable index.
pub fn extend_ring(ring: &Ring) -> IdealResult<(Ring, usize)> {
    let mut names = ring.vars.clone();
    let mut fresh = FRESH_VAR.to_string();
    while names.contains(&fresh) {
        fresh.push('_');
    }
    names.push(fresh);
    let big = PolyRing::from_names(&ring.field, names)?;
    let t = big.arity() - 1;
    Ok((big, t))
}

/// Membership by linear algebra alone: whether `f` lies in the span of the
/// products `m·g` of total degree at most `bound`. Decides membership for
/// homogeneous inputs once `bound ≥ deg f`; otherwise a `true` is still a proof.
pub fn truncated_membership(f: &MultiPoly, gens: &[MultiPoly], bound: u32) -> bool {
    let field = f.field().clone();
    let arity = f.ring().arity();
    let mut rows: Vec<Vec<(Monomial, FieldElement)>> = vec![];
    for g in gens.iter().filter(|g| !g.is_zero()) {
        let dg = g.total_degree().unwrap_or(0);
        if dg > bound {
            continue;
        }
        for d in 0..=bound - dg {
            for m in crate::instances::monomials_of_degree(arity, d) {
                rows.push(g.mul_term(&m, &field.one()).into_terms());
            }
        }
    }
    let mut columns: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for (m, _) in rows.iter().flatten().chain(f.terms()) {
        let n = columns.len();
        columns.entry(m.exps(arity)).or_insert(n);
    }
    let dense = |terms: &[(Monomial, FieldElement)]| -> Vec<FieldElement> {
        let mut v = vec![field.zero(); columns.len()];
        for (m, c) in terms {
            v[columns[&m.exps(arity)]] = c.clone();
        }
        v
    };
    let mut a: Vec<Vec<FieldElement>> = rows.iter().map(|r| dense(r)).collect();
    let before = crate::linalg::rank(&field, &a);
    a.push(dense(f.terms()));
    crate::linalg::rank(&field, &a) == before
}

/// Builds a ring over `field` with the given variable names.
pub fn ring_of(field: &FieldSpec, vars: &[&str]) -> Ring {
    PolyRing::new(field, vars).expect("arity within cap")
}

/// Renders a basis as strings (for reports and debugging).
pub fn basis_strings(gb: &GroebnerBasis) -> Vec<String> {
    gb.basis().iter().map(|g| g.to_string()).collect()
}

/// Maps each variable name to its image, the form `MultiPoly::substitute` expects.
pub fn substitution_map(pairs: Vec<(&str, MultiPoly)>) -> BTreeMap<String, MultiPoly> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    #[test]
    fn linear_and_circle() {
        let f = q();
        let r = ring_of(&f, &["x", "y"]);
        let x = MultiPoly::var(&r, 0);
        let y = MultiPoly::var(&r, 1);
        let e = Engine::default();
        let gb = e.groebner(&Ideal::new(&r, vec![x.add(&y), x.sub(&y)]).unwrap(), MonomialOrder::Lex).unwrap();
        assert_eq!(gb.basis(), &[y.clone(), x.clone()]);
        let circle = x.pow(2).add(&y.pow(2)).sub(&MultiPoly::one(&r));
        let gb = e
            .groebner(&Ideal::new(&r, vec![circle, x.sub(&y)]).unwrap(), MonomialOrder::Lex)
            .unwrap();
        let half = f.div(&f.one(), &f.from_i64(2)).unwrap();
        let expected_y = y.pow(2).sub(&MultiPoly::constant(&r, half));
        assert_eq!(gb.basis(), &[expected_y, x.sub(&y)]);
        assert!(gb.check_s_pairs());
        let unit = e.groebner(&Ideal::unit(&r), MonomialOrder::Grevlex).unwrap();
        assert!(unit.is_unit());
    }

    #[test]
    fn membership_certificates() {
        let f = q();
        let r = ring_of(&f, &["x", "y"]);
        let x = MultiPoly::var(&r, 0);
        let y = MultiPoly::var(&r, 1);
        let e = Engine::default();
        let ix = Ideal::new(&r, vec![x.clone()]).unwrap();
        let (ok, cert) = e.membership(&x.pow(2), &ix).unwrap();
        assert!(ok);
        assert_eq!(cert.clone().unwrap().cofactors, vec![x.clone()]);
        assert!(cert.unwrap().verify(&x.pow(2), &ix));
        assert!(!e.membership(&y, &ix).unwrap().0);
        let two = Ideal::new(&r, vec![x.clone(), x.add(&MultiPoly::one(&r))]).unwrap();
        let (ok, cert) = e.membership(&MultiPoly::one(&r), &two).unwrap();
        assert!(ok && cert.unwrap().verify(&MultiPoly::one(&r), &two));
    }

    #[test]
    fn radical_elimination_saturation() {
        let f = q();
        let r = ring_of(&f, &["x", "y"]);
        let x = MultiPoly::var(&r, 0);
        let y = MultiPoly::var(&r, 1);
        let e = Engine::default();
        let x2 = Ideal::new(&r, vec![x.pow(2)]).unwrap();
        assert!(e.radical_membership(&x, &x2).unwrap());
        assert!(!e.radical_membership(&y, &x2).unwrap());

        let r3 = ring_of(&f, &["t", "x", "y"]);
        let t = MultiPoly::var(&r3, 0);
        let (x3, y3) = (MultiPoly::var(&r3, 1), MultiPoly::var(&r3, 2));
        let cusp = Ideal::new(&r3, vec![x3.sub(&t.pow(2)), y3.sub(&t.pow(3))]).unwrap();
        let elim = e.eliminate(&cusp, &[0]).unwrap();
        let sub = elim.ring().clone();
        let (xs, ys) = (MultiPoly::var(&sub, 0), MultiPoly::var(&sub, 1));
        let gb = e.groebner(&elim, MonomialOrder::Grevlex).unwrap();
        let target = ys.pow(2).sub(&xs.pow(3));
        assert_eq!(gb.basis().len(), 1);
        assert_eq!(gb.basis()[0].normalize(), target.normalize());

        let sat = e.saturate(&Ideal::new(&r, vec![x.mul(&y)]).unwrap(), &x).unwrap();
        let gb = e.groebner(&sat, MonomialOrder::Grevlex).unwrap();
        assert_eq!(gb.basis(), &[y.clone()]);
        let sat = e.saturate(&Ideal::new(&r, vec![x.clone()]).unwrap(), &x).unwrap();
        assert!(e.is_unit_ideal(&sat).unwrap());
    }

    #[test]
    fn zero_dimensional_counts() {
        let f = q();
        let r = ring_of(&f, &["x", "y"]);
        let x = MultiPoly::var(&r, 0);
        let y = MultiPoly::var(&r, 1);
        let e = Engine::default();
        let i = Ideal::new(&r, vec![x.pow(2), y.pow(3)]).unwrap();
        assert!(e.is_zero_dimensional(&i).unwrap());
        assert_eq!(e.quotient_dimension(&i).unwrap(), 6);
        let j = Ideal::new(&r, vec![x.clone()]).unwrap();
        assert!(!e.is_zero_dimensional(&j).unwrap());
        assert_eq!(e.quotient_dimension(&j), Err(IdealError::NotZeroDimensional));
        assert_eq!(e.quotient_dimension(&Ideal::unit(&r)).unwrap(), 0);
    }

    #[test]
    fn resource_cap_is_reported() {
        let f = FieldSpec::prime(101).unwrap();
        let r = ring_of(&f, &["x", "y", "z"]);
        let v = |i| MultiPoly::var(&r, i);
        // cyclic-3
        let gens = vec![
            v(0).add(&v(1)).add(&v(2)),
            v(0).mul(&v(1)).add(&v(1).mul(&v(2))).add(&v(2).mul(&v(0))),
            v(0).mul(&v(1)).mul(&v(2)).sub(&MultiPoly::one(&r)),
        ];
        let e = Engine::new(Budget { max_pairs: 100, max_basis: 2 }, None);
        let err = e.groebner(&Ideal::new(&r, gens).unwrap(), MonomialOrder::Grevlex).unwrap_err();
        assert!(matches!(err, IdealError::ResourceCap { .. }));
    }

    #[test]
    fn order_mismatch() {
        let f = q();
        let r = ring_of(&f, &["x"]);
        let gb = Engine::default()
            .groebner(&Ideal::new(&r, vec![MultiPoly::var(&r, 0)]).unwrap(), MonomialOrder::Lex)
            .unwrap();
        assert!(matches!(
            gb.normal_form_in(&MultiPoly::var(&r, 0), MonomialOrder::Grevlex),
            Err(IdealError::OrderMismatch { .. })
        ));
    }
}
