//! Sparse multivariate polynomials over a [`FieldSpec`].
//!
//! Terms are stored in canonical lexicographic order (largest first), so two
//! polynomials are equal iff their term vectors are equal. Monomial orders
//! other than lex only matter inside the Gröbner engine.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};
use thiserror::Error;

use crate::field::{FieldElement, FieldError, FieldSpec};

pub const MAX_ARITY: usize = 12;
pub const MAX_DEGREE: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("polynomials live in different rings")]
    AmbientMismatch,
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("not divisible; remainder has {terms} terms, leading {leading}")]
    NotDivisible { terms: usize, leading: String },
    #[error("degree {degree} exceeds target degree {target}")]
    DegreeTooSmall { degree: u32, target: u32 },
    #[error("degree cap {cap} exceeded (would reach {degree})")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("arity {0} exceeds the cap of {MAX_ARITY} variables")]
    ArityCap(usize),
    #[error("malformed polynomial: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type PolyResult<T> = Result<T, PolyError>;

/// Exponent vector with cached total degree. Slots past the ring arity are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: [u8; MAX_ARITY],
    deg: u16,
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.exps[..])
    }
}

impl Monomial {
    pub const ONE: Monomial = Monomial { exps: [0; MAX_ARITY], deg: 0 };

    pub fn from_exps(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_ARITY);
        let mut m = Self::ONE;
        for (i, &e) in exps.iter().enumerate() {
            assert!(e <= 255, "exponent overflow");
            m.exps[i] = e as u8;
            m.deg += e as u16;
        }
        m
    }

    pub fn var(i: usize, e: u32) -> Self {
        let mut m = Self::ONE;
        m.exps[i] = e as u8;
        m.deg = e as u16;
        m
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i] as u32
    }

    pub fn exps(&self, arity: usize) -> Vec<u32> {
        self.exps[..arity].iter().map(|&e| e as u32).collect()
    }

    pub fn degree(&self) -> u32 {
        self.deg as u32
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = *self;
        for i in 0..MAX_ARITY {
            m.exps[i] = m.exps[i]
                .checked_add(other.exps[i])
                .expect("exponent overflow");
        }
        m.deg += other.deg;
        m
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.deg <= other.deg && (0..MAX_ARITY).all(|i| self.exps[i] <= other.exps[i])
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let mut m = *other;
        for i in 0..MAX_ARITY {
            m.exps[i] -= self.exps[i];
        }
        m.deg -= self.deg;
        m
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut m = Self::ONE;
        for i in 0..MAX_ARITY {
            m.exps[i] = self.exps[i].max(other.exps[i]);
            m.deg += m.exps[i] as u16;
        }
        m
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        (0..MAX_ARITY).all(|i| self.exps[i] == 0 || other.exps[i] == 0)
    }

    fn with_exp(&self, i: usize, e: u32) -> Monomial {
        let mut m = *self;
        m.deg = m.deg - m.exps[i] as u16 + e as u16;
        m.exps[i] = e as u8;
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    Lex,
    Grevlex,
    /// Grevlex on the first `split` variables, ties broken by grevlex on the rest.
    Block { split: usize },
}

fn grevlex_range(a: &Monomial, b: &Monomial, lo: usize, hi: usize) -> Ordering {
    let da: u32 = (lo..hi).map(|i| a.exps[i] as u32).sum();
    let db: u32 = (lo..hi).map(|i| b.exps[i] as u32).sum();
    da.cmp(&db).then_with(|| {
        for i in (lo..hi).rev() {
            match a.exps[i].cmp(&b.exps[i]) {
                Ordering::Equal => continue,
                o => return o.reverse(),
            }
        }
        Ordering::Equal
    })
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => a.exps.cmp(&b.exps),
            MonomialOrder::Grevlex => grevlex_range(a, b, 0, MAX_ARITY),
            MonomialOrder::Block { split } => grevlex_range(a, b, 0, *split)
                .then_with(|| grevlex_range(a, b, *split, MAX_ARITY)),
        }
    }

    pub fn name(&self) -> String {
        match self {
            MonomialOrder::Lex => "lex".into(),
            MonomialOrder::Grevlex => "grevlex".into(),
            MonomialOrder::Block { split } => format!("block:{split}"),
        }
    }
}

/// Field plus ordered variable labels.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct PolyRing {
    pub field: FieldSpec,
    pub vars: Vec<String>,
}

pub type Ring = Arc<PolyRing>;

impl PolyRing {
    pub fn new(field: &FieldSpec, vars: &[&str]) -> PolyResult<Ring> {
        Self::from_names(field, vars.iter().map(|s| s.to_string()).collect())
    }

    pub fn from_names(field: &FieldSpec, vars: Vec<String>) -> PolyResult<Ring> {
        if vars.len() > MAX_ARITY {
            return Err(PolyError::ArityCap(vars.len()));
        }
        Ok(Arc::new(PolyRing { field: field.clone(), vars }))
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn index(&self, var: &str) -> PolyResult<usize> {
        self.vars
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| PolyError::UnknownVariable(var.to_string()))
    }
}

pub fn same_ring(a: &Ring, b: &Ring) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

#[derive(Clone)]
pub struct MultiPoly {
    ring: Ring,
    terms: Vec<(Monomial, FieldElement)>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}
impl Eq for MultiPoly {}

impl std::hash::Hash for MultiPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state)
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let field = self.field();
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut factors = vec![];
                let cs = field.format(c);
                if !field.is_one(c) || m.is_one() {
                    if cs.contains(' ') {
                        factors.push(format!("({cs})"));
                    } else {
                        factors.push(cs);
                    }
                }
                for (i, v) in self.ring.vars.iter().enumerate() {
                    match m.exp(i) {
                        0 => {}
                        1 => factors.push(v.clone()),
                        e => factors.push(format!("{v}^{e}")),
                    }
                }
                factors.join("*")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Mul,
    Pow(u32),
}

/// Checked arithmetic entry point: verifies ambient rings and degree caps.
pub fn poly_arith(op: PolyOp, f: &MultiPoly, g: &MultiPoly) -> PolyResult<MultiPoly> {
    match op {
        PolyOp::Add => {
            f.check_ring(g)?;
            Ok(f.add(g))
        }
        PolyOp::Mul => {
            f.check_ring(g)?;
            let d = f.total_degree().unwrap_or(0) + g.total_degree().unwrap_or(0);
            if !f.is_zero() && !g.is_zero() && d > MAX_DEGREE {
                return Err(PolyError::DegreeCap { degree: d, cap: MAX_DEGREE });
            }
            Ok(f.mul(g))
        }
        PolyOp::Pow(e) => {
            let d = f.total_degree().unwrap_or(0) * e;
            if d > MAX_DEGREE {
                return Err(PolyError::DegreeCap { degree: d, cap: MAX_DEGREE });
            }
            Ok(f.pow(e))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Homogeneity {
    Homogeneous(u32),
    Inhomogeneous,
}

impl MultiPoly {
    pub fn zero(ring: &Ring) -> Self {
        MultiPoly { ring: ring.clone(), terms: vec![] }
    }

    pub fn constant(ring: &Ring, c: FieldElement) -> Self {
        Self::from_terms(ring, vec![(Monomial::ONE, c)])
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, ring.field.one())
    }

    pub fn from_i64(ring: &Ring, n: i64) -> Self {
        Self::constant(ring, ring.field.from_i64(n))
    }

    pub fn var(ring: &Ring, i: usize) -> Self {
        assert!(i < ring.arity());
        MultiPoly { ring: ring.clone(), terms: vec![(Monomial::var(i, 1), ring.field.one())] }
    }

    pub fn var_named(ring: &Ring, name: &str) -> PolyResult<Self> {
        Ok(Self::var(ring, ring.index(name)?))
    }

    pub fn monomial(ring: &Ring, m: Monomial, c: FieldElement) -> Self {
        Self::from_terms(ring, vec![(m, c)])
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates and dropping zeros.
    pub fn from_terms(ring: &Ring, terms: Vec<(Monomial, FieldElement)>) -> Self {
        let field = &ring.field;
        let mut map: BTreeMap<Monomial, FieldElement> = BTreeMap::new();
        for (m, c) in terms {
            match map.get_mut(&m) {
                Some(acc) => *acc = field.add(acc, &c),
                None => {
                    map.insert(m, c);
                }
            }
        }
        let terms = map
            .into_iter()
            .rev()
            .filter(|(_, c)| !field.is_zero(c))
            .collect();
        MultiPoly { ring: ring.clone(), terms }
    }

    /// Integer-coefficient convenience constructor: `(coeff, exponents)`.
    pub fn from_int_terms(ring: &Ring, terms: &[(i64, &[u32])]) -> Self {
        Self::from_terms(
            ring,
            terms
                .iter()
                .map(|(c, e)| (Monomial::from_exps(e), ring.field.from_i64(*c)))
                .collect(),
        )
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn field(&self) -> &FieldSpec {
        &self.ring.field
    }

    pub fn terms(&self) -> &[(Monomial, FieldElement)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, FieldElement)> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    /// Constant term (zero if absent).
    pub fn constant_term(&self) -> FieldElement {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => self.field().zero(),
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> FieldElement {
        self.terms
            .iter()
            .find(|(t, _)| t == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| self.field().zero())
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).min()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.exp(var)).max().unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.exp(var) > 0)
    }

    fn check_ring(&self, other: &MultiPoly) -> PolyResult<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(PolyError::AmbientMismatch)
        }
    }

    fn assert_ring(&self, other: &MultiPoly) {
        assert!(
            same_ring(&self.ring, &other.ring),
            "ambient mismatch: {:?} vs {:?}",
            self.ring.vars,
            other.ring.vars
        );
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        self.assert_ring(other);
        let field = self.field();
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match ma.cmp(mb) {
                Ordering::Greater => {
                    out.push((*ma, ca.clone()));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((*mb, cb.clone()));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = field.add(ca, cb);
                    if !field.is_zero(&c) {
                        out.push((*ma, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        MultiPoly { ring: self.ring.clone(), terms: out }
    }

    pub fn neg(&self) -> MultiPoly {
        let field = self.field();
        MultiPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, field.neg(c))).collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElement) -> MultiPoly {
        let field = self.field();
        if field.is_zero(c) {
            return MultiPoly::zero(&self.ring);
        }
        MultiPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (*m, field.mul(a, c))).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &FieldElement) -> MultiPoly {
        let field = self.field();
        if field.is_zero(c) {
            return MultiPoly::zero(&self.ring);
        }
        MultiPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), field.mul(a, c))).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        self.assert_ring(other);
        if self.is_zero() || other.is_zero() {
            return MultiPoly::zero(&self.ring);
        }
        let degree = self.total_degree().unwrap() + other.total_degree().unwrap();
        assert!(degree <= MAX_DEGREE, "degree cap {MAX_DEGREE} exceeded ({degree})");
        let field = self.field();
        let mut acc: HashMap<Monomial, FieldElement> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = field.mul(ca, cb);
                match acc.get_mut(&m) {
                    Some(x) => *x = field.add(x, &c),
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !field.is_zero(c)).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        MultiPoly { ring: self.ring.clone(), terms }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(&self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn partial_derivative(&self, var: usize) -> MultiPoly {
        let field = self.field();
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exp(var) > 0)
            .map(|(m, c)| {
                let e = m.exp(var);
                (m.with_exp(var, e - 1), field.mul(c, &field.from_i64(e as i64)))
            })
            .filter(|(_, c)| !field.is_zero(c))
            .collect();
        // lowering one exponent preserves lex order among surviving terms
        MultiPoly { ring: self.ring.clone(), terms }
    }

    pub fn partial_derivative_named(&self, var: &str) -> PolyResult<MultiPoly> {
        Ok(self.partial_derivative(self.ring.index(var)?))
    }

    /// All first partials, in variable order.
    pub fn gradient(&self) -> Vec<MultiPoly> {
        (0..self.ring.arity()).map(|i| self.partial_derivative(i)).collect()
    }

    /// Substitutes images for variables. Variables absent from `map` are sent to
    /// the variable of the same name in `target`.
    pub fn substitute(&self, map: &BTreeMap<String, MultiPoly>, target: &Ring) -> PolyResult<MultiPoly> {
        let mut images = Vec::with_capacity(self.ring.arity());
        for name in &self.ring.vars {
            match map.get(name) {
                Some(p) => {
                    if !same_ring(p.ring(), target) {
                        return Err(PolyError::AmbientMismatch);
                    }
                    images.push(p.clone());
                }
                None => {
                    if self.uses_var(self.ring.index(name)?) {
                        images.push(MultiPoly::var_named(target, name)?);
                    } else {
                        images.push(MultiPoly::zero(target));
                    }
                }
            }
        }
        for key in map.keys() {
            self.ring.index(key)?;
        }
        self.substitute_all(&images, target)
    }

    /// Substitutes `images[i]` for variable `i` (all images in `target`).
    pub fn substitute_all(&self, images: &[MultiPoly], target: &Ring) -> PolyResult<MultiPoly> {
        assert_eq!(images.len(), self.ring.arity());
        if !target.field.contains_field(self.field()) {
            return Err(PolyError::AmbientMismatch);
        }
        let mut powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|p| vec![MultiPoly::one(target), p.clone()])
            .collect();
        let mut acc: HashMap<Monomial, FieldElement> = HashMap::new();
        let tf = &target.field;
        for (m, c) in &self.terms {
            let mut term = MultiPoly::constant(target, tf.embed(self.field(), c)?);
            for i in 0..self.ring.arity() {
                let e = m.exp(i) as usize;
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][e]);
            }
            for (tm, tc) in term.terms {
                match acc.get_mut(&tm) {
                    Some(x) => *x = tf.add(x, &tc),
                    None => {
                        acc.insert(tm, tc);
                    }
                }
            }
        }
        Ok(MultiPoly::from_terms(target, acc.into_iter().collect()))
    }

    /// Evaluates at a point with coordinates in the polynomial's field (or an extension).
    pub fn evaluate(&self, point: &[FieldElement], field: &FieldSpec) -> PolyResult<FieldElement> {
        assert_eq!(point.len(), self.ring.arity());
        if !field.contains_field(self.field()) {
            return Err(PolyError::Field(FieldError::FieldMismatch));
        }
        let mut acc = field.zero();
        for (m, c) in &self.terms {
            let mut t = field.embed(self.field(), c)?;
            for (i, x) in point.iter().enumerate() {
                let e = m.exp(i);
                if e > 0 {
                    t = field.mul(&t, &field.pow(x, e as u64));
                }
            }
            acc = field.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Sets one variable to a constant, staying in the same ring.
    pub fn specialize(&self, var: usize, value: &FieldElement) -> MultiPoly {
        let field = self.field();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let e = m.exp(var);
                (m.with_exp(var, 0), field.mul(c, &field.pow(value, e as u64)))
            })
            .collect();
        MultiPoly::from_terms(&self.ring, terms)
    }

    /// Maps the polynomial into a ring with the same variable count over an
    /// extension field (or with renamed variables).
    pub fn change_ring(&self, target: &Ring) -> PolyResult<MultiPoly> {
        if target.arity() != self.ring.arity() {
            return Err(PolyError::AmbientMismatch);
        }
        let tf = &target.field;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| Ok((*m, tf.embed(self.field(), c)?)))
            .collect::<Result<Vec<_>, FieldError>>()?;
        Ok(MultiPoly { ring: target.clone(), terms })
    }

    /// Moves the polynomial into a ring whose variables are a superset (by name).
    pub fn embed_into(&self, target: &Ring) -> PolyResult<MultiPoly> {
        let idx = self
            .ring
            .vars
            .iter()
            .map(|v| target.index(v))
            .collect::<PolyResult<Vec<_>>>()?;
        let tf = &target.field;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut nm = Monomial::ONE;
                for (i, &j) in idx.iter().enumerate() {
                    nm = nm.with_exp(j, m.exp(i));
                }
                Ok((nm, tf.embed(self.field(), c)?))
            })
            .collect::<Result<Vec<_>, FieldError>>()?;
        Ok(MultiPoly::from_terms(target, terms))
    }

    /// Multivariate division by a single polynomial; succeeds iff `other | self`.
    pub fn exact_divide(&self, other: &MultiPoly) -> PolyResult<MultiPoly> {
        self.check_ring(other)?;
        if other.is_zero() {
            return Err(PolyError::Field(FieldError::DivisionByZero));
        }
        let field = self.field();
        let (lm, lc) = other.terms[0].clone();
        let lc_inv = field.inv(&lc)?;
        let mut rest = self.clone();
        let mut quotient = vec![];
        while let Some((m, c)) = rest.terms.first().cloned() {
            if !lm.divides(&m) {
                return Err(PolyError::NotDivisible {
                    terms: rest.num_terms(),
                    leading: MultiPoly::monomial(&self.ring, m, c).to_string(),
                });
            }
            let qm = lm.quotient_of(&m);
            let qc = field.mul(&c, &lc_inv);
            rest = rest.sub(&other.mul_term(&qm, &qc));
            quotient.push((qm, qc));
        }
        Ok(MultiPoly::from_terms(&self.ring, quotient))
    }

    /// Largest `k` with `var^k | self` (0 for the zero polynomial).
    pub fn var_valuation(&self, var: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.exp(var)).min().unwrap_or(0)
    }

    /// Divides every term by `var^k`; caller guarantees divisibility.
    pub fn divide_by_var_power(&self, var: usize, k: u32) -> MultiPoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                assert!(m.exp(var) >= k);
                (m.with_exp(var, m.exp(var) - k), c.clone())
            })
            .collect();
        MultiPoly::from_terms(&self.ring, terms)
    }

    pub fn homogeneity(&self) -> Homogeneity {
        let mut degs = self.terms.iter().map(|(m, _)| m.degree());
        match degs.next() {
            None => Homogeneity::Homogeneous(0),
            Some(d) => {
                if degs.all(|e| e == d) {
                    Homogeneity::Homogeneous(d)
                } else {
                    Homogeneity::Inhomogeneous
                }
            }
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.homogeneity(), Homogeneity::Homogeneous(_))
    }

    /// Sets the chart variable to 1 (the variable stays in the ambient).
    pub fn dehomogenize(&self, var: usize) -> MultiPoly {
        self.specialize(var, &self.field().one())
    }

    /// Multiplies each term by a power of `var` to reach total degree `degree`.
    pub fn homogenize(&self, var: usize, degree: u32) -> PolyResult<MultiPoly> {
        let d = self.total_degree().unwrap_or(0);
        if d > degree {
            return Err(PolyError::DegreeTooSmall { degree: d, target: degree });
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let e = m.exp(var) + degree - m.degree();
                (m.with_exp(var, e), c.clone())
            })
            .collect();
        Ok(MultiPoly::from_terms(&self.ring, terms))
    }

    /// Homogeneous component of the given degree.
    pub fn homogeneous_part(&self, degree: u32) -> MultiPoly {
        MultiPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.degree() == degree).cloned().collect(),
        }
    }

    /// Lowest-degree homogeneous component (the tangent cone at the origin).
    pub fn lowest_part(&self) -> MultiPoly {
        match self.min_degree() {
            None => self.clone(),
            Some(d) => self.homogeneous_part(d),
        }
    }

    /// Coefficients of powers of `var`: `self = sum_k out[k] * var^k`.
    pub fn coefficients_in(&self, var: usize) -> Vec<MultiPoly> {
        let n = self.degree_in(var) as usize + 1;
        let mut buckets: Vec<Vec<(Monomial, FieldElement)>> = vec![vec![]; n];
        for (m, c) in &self.terms {
            buckets[m.exp(var) as usize].push((m.with_exp(var, 0), c.clone()));
        }
        buckets
            .into_iter()
            .map(|t| MultiPoly::from_terms(&self.ring, t))
            .collect()
    }

    /// Monic scaling by the inverse of the lex-leading coefficient.
    pub fn normalize(&self) -> MultiPoly {
        match self.terms.first() {
            None => self.clone(),
            Some((_, c)) => self.scale(&self.field().inv(c).unwrap()),
        }
    }

    /// Leading term under the given order.
    pub fn leading_term(&self, order: MonomialOrder) -> Option<(Monomial, FieldElement)> {
        self.terms
            .iter()
            .max_by(|a, b| order.cmp(&a.0, &b.0))
            .cloned()
    }

    /// Hessian matrix entries `d^2 f / dx_i dx_j`.
    pub fn hessian(&self) -> Vec<Vec<MultiPoly>> {
        let grad = self.gradient();
        grad.iter().map(|g| g.gradient()).collect()
    }

    pub fn to_json(&self) -> Value {
        let field = self.field();
        json!({
            "vars": self.ring.vars,
            "terms": self
                .terms
                .iter()
                .map(|(m, c)| json!([field.element_to_json(c), m.exps(self.ring.arity())]))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(field: &FieldSpec, v: &Value) -> PolyResult<MultiPoly> {
        let bad = |msg: &str| PolyError::Parse(msg.to_string());
        let vars: Vec<String> = v
            .get("vars")
            .and_then(|x| x.as_array())
            .ok_or_else(|| bad("missing vars"))?
            .iter()
            .map(|s| s.as_str().map(String::from).ok_or_else(|| bad("variable names must be strings")))
            .collect::<PolyResult<_>>()?;
        let ring = PolyRing::from_names(field, vars)?;
        Self::from_json_in(&ring, v)
    }

    pub fn from_json_in(ring: &Ring, v: &Value) -> PolyResult<MultiPoly> {
        let bad = |msg: String| PolyError::Parse(msg);
        let terms = v
            .get("terms")
            .and_then(|x| x.as_array())
            .ok_or_else(|| bad("missing terms".into()))?;
        let mut out = vec![];
        for (k, t) in terms.iter().enumerate() {
            let pair = t.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad(format!("term {k} must be [coeff, exps]")))?;
            let c = ring.field.element_from_json(&pair[0])?;
            let exps = pair[1]
                .as_array()
                .ok_or_else(|| bad(format!("term {k}: exponents must be an array")))?
                .iter()
                .map(|e| e.as_u64().filter(|&e| e <= MAX_DEGREE as u64).map(|e| e as u32))
                .collect::<Option<Vec<u32>>>()
                .ok_or_else(|| bad(format!("term {k}: bad exponent")))?;
            if exps.len() != ring.arity() {
                return Err(bad(format!("term {k}: exponent vector has wrong arity")));
            }
            out.push((Monomial::from_exps(&exps), c));
        }
        Ok(MultiPoly::from_terms(ring, out))
    }
}

/// Linear change of variables `x_i -> sum_j m[i][j] x_j` (matrix over the ring's field).
pub fn linear_change(f: &MultiPoly, matrix: &[Vec<FieldElement>]) -> MultiPoly {
    let ring = f.ring().clone();
    let images: Vec<MultiPoly> = matrix
        .iter()
        .map(|row| {
            MultiPoly::from_terms(
                &ring,
                row.iter()
                    .enumerate()
                    .map(|(j, c)| (Monomial::var(j, 1), c.clone()))
                    .collect(),
            )
        })
        .collect();
    f.substitute_all(&images, &ring).expect("same ring")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(field: &FieldSpec, vars: &[&str]) -> Ring {
        PolyRing::new(field, vars).unwrap()
    }

    #[test]
    fn square_of_sum() {
        let q = FieldSpec::rationals();
        let r = ring(&q, &["x", "y"]);
        let s = MultiPoly::var(&r, 0).add(&MultiPoly::var(&r, 1));
        let expected = MultiPoly::from_int_terms(&r, &[(1, &[2, 0]), (2, &[1, 1]), (1, &[0, 2])]);
        assert_eq!(poly_arith(PolyOp::Pow(2), &s, &s).unwrap(), expected);
        let f2 = FieldSpec::prime(2).unwrap();
        let r2 = ring(&f2, &["x", "y"]);
        let s2 = MultiPoly::var(&r2, 0).add(&MultiPoly::var(&r2, 1));
        assert_eq!(
            s2.pow(2),
            MultiPoly::from_int_terms(&r2, &[(1, &[2, 0]), (1, &[0, 2])])
        );
        assert!(s.mul(&MultiPoly::zero(&r)).is_zero());
        let other = ring(&q, &["x", "z"]);
        assert_eq!(
            poly_arith(PolyOp::Add, &s, &MultiPoly::var(&other, 0)),
            Err(PolyError::AmbientMismatch)
        );
        assert!(matches!(
            poly_arith(PolyOp::Pow(70), &s, &s),
            Err(PolyError::DegreeCap { .. })
        ));
    }

    #[test]
    fn derivatives() {
        let f7 = FieldSpec::prime(7).unwrap();
        let r = ring(&f7, &["x"]);
        assert!(MultiPoly::var(&r, 0).pow(7).partial_derivative(0).is_zero());
        assert!(MultiPoly::from_i64(&r, 3).partial_derivative(0).is_zero());
        assert!(matches!(
            MultiPoly::var(&r, 0).partial_derivative_named("y"),
            Err(PolyError::UnknownVariable(_))
        ));
    }

    #[test]
    fn exact_division() {
        let q = FieldSpec::rationals();
        let r = ring(&q, &["x", "y"]);
        let x = MultiPoly::var(&r, 0);
        let y = MultiPoly::var(&r, 1);
        let num = x.pow(2).sub(&y.pow(2));
        assert_eq!(num.exact_divide(&x.sub(&y)).unwrap(), x.add(&y));
        let num2 = x.pow(2).add(&y.pow(2));
        assert!(matches!(
            num2.exact_divide(&x.sub(&y)),
            Err(PolyError::NotDivisible { .. })
        ));
    }

    #[test]
    fn homogenization() {
        let q = FieldSpec::rationals();
        let r = ring(&q, &["x", "y", "z"]);
        let f = MultiPoly::from_int_terms(&r, &[(1, &[2, 0, 0]), (1, &[0, 1, 1])]);
        let g = MultiPoly::from_int_terms(&r, &[(1, &[2, 0, 0]), (1, &[0, 1, 0])]);
        assert_eq!(f.dehomogenize(2), g);
        assert_eq!(g.homogenize(2, 2).unwrap(), f);
        assert_eq!(f.homogeneity(), Homogeneity::Homogeneous(2));
        assert_eq!(g.homogeneity(), Homogeneity::Inhomogeneous);
        assert!(matches!(g.homogenize(2, 1), Err(PolyError::DegreeTooSmall { .. })));
    }

    #[test]
    fn substitution_identity_and_constant() {
        let q = FieldSpec::rationals();
        let r = ring(&q, &["x", "y"]);
        let f = MultiPoly::from_int_terms(&r, &[(3, &[2, 1]), (-1, &[0, 3]), (5, &[0, 0])]);
        assert_eq!(f.substitute(&BTreeMap::new(), &r).unwrap(), f);
        let c = MultiPoly::from_i64(&r, 4);
        let mut map = BTreeMap::new();
        map.insert("x".to_string(), MultiPoly::var(&r, 1));
        assert_eq!(c.substitute(&map, &r).unwrap(), c);
        map.insert("w".to_string(), MultiPoly::var(&r, 1));
        assert!(matches!(f.substitute(&map, &r), Err(PolyError::UnknownVariable(_))));
    }

    #[test]
    fn orders_are_compatible_with_multiplication() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let rand_mono = |rng: &mut rand_chacha::ChaCha8Rng| {
            Monomial::from_exps(&(0..4).map(|_| rng.gen_range(0..5)).collect::<Vec<_>>())
        };
        for order in [MonomialOrder::Lex, MonomialOrder::Grevlex, MonomialOrder::Block { split: 2 }] {
            for _ in 0..200 {
                let (a, b, c) = (rand_mono(&mut rng), rand_mono(&mut rng), rand_mono(&mut rng));
                let o = order.cmp(&a, &b);
                assert_eq!(order.cmp(&a.mul(&c), &b.mul(&c)), o);
                assert_ne!(order.cmp(&a.mul(&c), &a), Ordering::Less);
                if a != b {
                    assert_ne!(o, Ordering::Equal);
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let f = FieldSpec::finite(101, 2).unwrap();
        let r = ring(&f, &["z0", "z1"]);
        let a = f.generator().unwrap();
        let p = MultiPoly::from_terms(
            &r,
            vec![(Monomial::from_exps(&[2, 1]), a.clone()), (Monomial::ONE, f.from_i64(7))],
        );
        let j = p.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back = MultiPoly::from_json(&f, &serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, p);
        assert_eq!(serde_json::to_string(&back.to_json()).unwrap(), text);
    }
}
