//! Exact arithmetic in towers of fields: rationals, prime fields, simple
//! algebraic extensions and univariate rational function fields.
//!
//! A [`FieldSpec`] is a cheap, shareable handle describing the field; the
//! elements themselves ([`FieldElement`]) carry no reference back to their
//! field, so every operation goes through the spec. Elements are always kept
//! in canonical form, which makes `==` on elements a decision procedure for
//! equality in the field.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::upoly::{self, UPoly};

/// Default bound on the number of extension / function-field layers.
pub const DEFAULT_MAX_TOWER_DEPTH: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("minimal polynomial is reducible ({0} factors found)")]
    ReducibleMinpoly(usize),
    #[error("minimal polynomial must be monic of degree >= 1")]
    BadMinpoly,
    #[error("tower depth {depth} exceeds the configured maximum {max}")]
    TowerTooDeep { depth: usize, max: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("candidate image is not a root of the minimal polynomial")]
    NotRoot,
    #[error("iterating the action {order} times is not the identity on the generator (orbit length {orbit})")]
    WrongOrder { order: usize, orbit: usize },
    #[error("unsupported field for this operation: {0}")]
    UnsupportedField(String),
    #[error("malformed field data: {0}")]
    Parse(String),
    #[error("equal-degree splitting did not converge within {0} attempts")]
    SplittingFailed(usize),
}

pub type FieldResult<T> = Result<T, FieldError>;

/// An element of some field in a tower. Interpreted relative to a [`FieldSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldElement {
    Rational(BigRational),
    /// Residue in `0..p`.
    Residue(u32),
    /// Coefficients over the base, little-endian, length = extension degree.
    Poly(Vec<FieldElement>),
    /// Reduced numerator / monic denominator over the base field.
    Fraction(UPoly, UPoly),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rationals,
    Prime(u32),
    Extension {
        base: FieldSpec,
        minpoly: UPoly,
        label: String,
    },
    FunctionField {
        base: FieldSpec,
        var: String,
    },
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct FieldNode {
    kind: FieldKind,
    depth: usize,
}

/// Shared handle to a validated field.
#[derive(Clone)]
pub struct FieldSpec(Arc<FieldNode>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}
impl Eq for FieldSpec {}

impl Hash for FieldSpec {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Serializable description of a field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FieldDescriptor {
    #[serde(rename = "qq")]
    Rationals,
    #[serde(rename = "fp")]
    Prime { p: u64 },
    #[serde(rename = "ext")]
    Extension {
        base: Box<FieldDescriptor>,
        minpoly: Vec<Value>,
        label: String,
    },
    #[serde(rename = "funfield")]
    FunctionField { base: Box<FieldDescriptor>, var: String },
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Builds a validated field from its descriptor.
pub fn make_field(desc: &FieldDescriptor) -> FieldResult<FieldSpec> {
    make_field_with_depth(desc, DEFAULT_MAX_TOWER_DEPTH)
}

pub fn make_field_with_depth(desc: &FieldDescriptor, max_depth: usize) -> FieldResult<FieldSpec> {
    match desc {
        FieldDescriptor::Rationals => Ok(FieldSpec::rationals()),
        FieldDescriptor::Prime { p } => FieldSpec::prime(*p),
        FieldDescriptor::Extension { base, minpoly, label } => {
            let base = make_field_with_depth(base, max_depth)?;
            let coeffs = minpoly
                .iter()
                .map(|v| base.element_from_json(v))
                .collect::<FieldResult<Vec<_>>>()?;
            FieldSpec::extension_with_depth(&base, coeffs, label, max_depth)
        }
        FieldDescriptor::FunctionField { base, var } => {
            let base = make_field_with_depth(base, max_depth)?;
            FieldSpec::function_field_with_depth(&base, var, max_depth)
        }
    }
}

impl FieldSpec {
    fn from_kind(kind: FieldKind, depth: usize) -> Self {
        FieldSpec(Arc::new(FieldNode { kind, depth }))
    }

    pub fn rationals() -> Self {
        Self::from_kind(FieldKind::Rationals, 0)
    }

    pub fn prime(p: u64) -> FieldResult<Self> {
        if !is_prime(p) || p > u32::MAX as u64 / 2 {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Self::from_kind(FieldKind::Prime(p as u32), 0))
    }

    pub fn extension(base: &FieldSpec, minpoly: UPoly, label: &str) -> FieldResult<Self> {
        Self::extension_with_depth(base, minpoly, label, DEFAULT_MAX_TOWER_DEPTH)
    }

    pub fn extension_with_depth(
        base: &FieldSpec,
        minpoly: UPoly,
        label: &str,
        max_depth: usize,
    ) -> FieldResult<Self> {
        let depth = base.depth() + 1;
        if depth > max_depth {
            return Err(FieldError::TowerTooDeep { depth, max: max_depth });
        }
        let minpoly = upoly::trim(base, minpoly);
        if minpoly.len() < 2 || !base.is_one(minpoly.last().unwrap()) {
            return Err(FieldError::BadMinpoly);
        }
        match base.kind() {
            FieldKind::FunctionField { .. } => {
                return Err(FieldError::UnsupportedField(
                    "extensions of function fields".into(),
                ))
            }
            FieldKind::Rationals => {
                if minpoly.len() - 1 > 3 {
                    return Err(FieldError::UnsupportedField(
                        "irreducibility over Q is only certified up to degree 3".into(),
                    ));
                }
                if rational_root(base, &minpoly).is_some() {
                    return Err(FieldError::ReducibleMinpoly(2));
                }
            }
            _ => {
                if base.order().is_none() {
                    return Err(FieldError::UnsupportedField(base.name()));
                }
                let fac = crate::factor::factor_univariate(&minpoly, base)?;
                let count: usize = fac.factors.iter().map(|(_, m)| *m).sum();
                if count != 1 {
                    return Err(FieldError::ReducibleMinpoly(count));
                }
            }
        }
        Ok(Self::from_kind(
            FieldKind::Extension {
                base: base.clone(),
                minpoly,
                label: label.to_string(),
            },
            depth,
        ))
    }

    pub fn function_field(base: &FieldSpec, var: &str) -> FieldResult<Self> {
        Self::function_field_with_depth(base, var, DEFAULT_MAX_TOWER_DEPTH)
    }

    pub fn function_field_with_depth(
        base: &FieldSpec,
        var: &str,
        max_depth: usize,
    ) -> FieldResult<Self> {
        let depth = base.depth() + 1;
        if depth > max_depth {
            return Err(FieldError::TowerTooDeep { depth, max: max_depth });
        }
        if matches!(base.kind(), FieldKind::FunctionField { .. }) {
            return Err(FieldError::UnsupportedField(
                "nested function fields".into(),
            ));
        }
        Ok(Self::from_kind(
            FieldKind::FunctionField {
                base: base.clone(),
                var: var.to_string(),
            },
            depth,
        ))
    }

    /// `F_{p^k}` built over `F_p` with the first irreducible polynomial in a
    /// fixed enumeration order (low coefficients vary fastest).
    pub fn finite(p: u64, k: usize) -> FieldResult<Self> {
        let fp = Self::prime(p)?;
        if k == 1 {
            return Ok(fp);
        }
        Self::extension(&fp, first_irreducible(&fp, k)?, "a")
    }

    /// Degree-`k` extension of an existing finite field.
    pub fn finite_extension(base: &FieldSpec, k: usize, label: &str) -> FieldResult<Self> {
        if k == 1 {
            return Ok(base.clone());
        }
        Self::extension(base, first_irreducible(base, k)?, label)
    }

    pub fn kind(&self) -> &FieldKind {
        &self.0.kind
    }

    pub fn depth(&self) -> usize {
        self.0.depth
    }

    pub fn base(&self) -> Option<&FieldSpec> {
        match self.kind() {
            FieldKind::Extension { base, .. } | FieldKind::FunctionField { base, .. } => Some(base),
            _ => None,
        }
    }

    pub fn prime_field(&self) -> FieldSpec {
        match self.base() {
            Some(b) => b.prime_field(),
            None => self.clone(),
        }
    }

    /// Degree over the immediate base (1 for base fields and function fields).
    pub fn degree(&self) -> usize {
        match self.kind() {
            FieldKind::Extension { minpoly, .. } => minpoly.len() - 1,
            _ => 1,
        }
    }

    /// Degree over the prime field, for finite fields.
    pub fn absolute_degree(&self) -> usize {
        match self.kind() {
            FieldKind::Extension { base, .. } => self.degree() * base.absolute_degree(),
            _ => 1,
        }
    }

    pub fn minpoly(&self) -> Option<&UPoly> {
        match self.kind() {
            FieldKind::Extension { minpoly, .. } => Some(minpoly),
            _ => None,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self.kind() {
            FieldKind::Rationals => 0,
            FieldKind::Prime(p) => *p as u64,
            FieldKind::Extension { base, .. } | FieldKind::FunctionField { base, .. } => {
                base.characteristic()
            }
        }
    }

    /// Number of elements, when finite.
    pub fn order(&self) -> Option<BigUint> {
        match self.kind() {
            FieldKind::Prime(p) => Some(BigUint::from(*p)),
            FieldKind::Extension { base, .. } => base.order().map(|q| q.pow(self.degree() as u32)),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    pub fn name(&self) -> String {
        match self.kind() {
            FieldKind::Rationals => "QQ".into(),
            FieldKind::Prime(p) => format!("GF({p})"),
            FieldKind::Extension { base, label, .. } => {
                format!("{}[{}]/({})", base.name(), label, self.degree())
            }
            FieldKind::FunctionField { base, var } => format!("{}({})", base.name(), var),
        }
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        match self.kind() {
            FieldKind::Rationals => FieldDescriptor::Rationals,
            FieldKind::Prime(p) => FieldDescriptor::Prime { p: *p as u64 },
            FieldKind::Extension { base, minpoly, label } => FieldDescriptor::Extension {
                base: Box::new(base.descriptor()),
                minpoly: minpoly.iter().map(|c| base.element_to_json(c)).collect(),
                label: label.clone(),
            },
            FieldKind::FunctionField { base, var } => FieldDescriptor::FunctionField {
                base: Box::new(base.descriptor()),
                var: var.clone(),
            },
        }
    }

    // ----- constants -----

    pub fn zero(&self) -> FieldElement {
        match self.kind() {
            FieldKind::Rationals => FieldElement::Rational(BigRational::zero()),
            FieldKind::Prime(_) => FieldElement::Residue(0),
            FieldKind::Extension { base, .. } => FieldElement::Poly(vec![base.zero(); self.degree()]),
            FieldKind::FunctionField { base, .. } => FieldElement::Fraction(vec![], vec![base.one()]),
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> FieldElement {
        match self.kind() {
            FieldKind::Rationals => FieldElement::Rational(BigRational::from_integer(n.into())),
            FieldKind::Prime(p) => FieldElement::Residue(n.rem_euclid(*p as i64) as u32),
            FieldKind::Extension { base, .. } => {
                let mut v = vec![base.zero(); self.degree()];
                v[0] = base.from_i64(n);
                FieldElement::Poly(v)
            }
            FieldKind::FunctionField { base, .. } => {
                let c = base.from_i64(n);
                let num = if base.is_zero(&c) { vec![] } else { vec![c] };
                FieldElement::Fraction(num, vec![base.one()])
            }
        }
    }

    pub fn from_rational(&self, r: &BigRational) -> FieldResult<FieldElement> {
        match self.kind() {
            FieldKind::Rationals => Ok(FieldElement::Rational(r.clone())),
            _ => {
                let n = self.from_bigint(r.numer());
                let d = self.from_bigint(r.denom());
                self.div(&n, &d)
            }
        }
    }

    fn from_bigint(&self, n: &BigInt) -> FieldElement {
        match self.kind() {
            FieldKind::Rationals => FieldElement::Rational(BigRational::from_integer(n.clone())),
            _ => {
                let p = self.characteristic();
                let r = n.mod_floor(&BigInt::from(p)).to_i64().unwrap();
                self.from_i64(r)
            }
        }
    }

    /// The adjoined generator of an extension, or the variable of a function field.
    pub fn generator(&self) -> Option<FieldElement> {
        match self.kind() {
            FieldKind::Extension { base, .. } => {
                let mut v = vec![base.zero(); self.degree()];
                if self.degree() == 1 {
                    return None;
                }
                v[1] = base.one();
                Some(FieldElement::Poly(v))
            }
            FieldKind::FunctionField { base, .. } => Some(FieldElement::Fraction(
                vec![base.zero(), base.one()],
                vec![base.one()],
            )),
            _ => None,
        }
    }

    pub fn is_zero(&self, a: &FieldElement) -> bool {
        match a {
            FieldElement::Rational(r) => r.is_zero(),
            FieldElement::Residue(r) => *r == 0,
            FieldElement::Poly(v) => {
                let base = self.base().expect("extension element in non-extension field");
                v.iter().all(|c| base.is_zero(c))
            }
            FieldElement::Fraction(n, _) => n.is_empty(),
        }
    }

    pub fn is_one(&self, a: &FieldElement) -> bool {
        *a == self.one()
    }

    fn modulus(&self) -> u64 {
        match self.kind() {
            FieldKind::Prime(p) => *p as u64,
            _ => unreachable!("not a prime field"),
        }
    }

    // ----- arithmetic -----

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        use FieldElement::*;
        match (a, b) {
            (Residue(x), Residue(y)) => {
                let p = self.modulus();
                Residue(((*x as u64 + *y as u64) % p) as u32)
            }
            (Rational(x), Rational(y)) => Rational(x + y),
            (Poly(x), Poly(y)) => {
                let base = self.base().unwrap();
                Poly(x.iter().zip(y).map(|(u, v)| base.add(u, v)).collect())
            }
            (Fraction(an, ad), Fraction(bn, bd)) => {
                let base = self.base().unwrap();
                if ad == bd {
                    return self.make_fraction(upoly::add(base, an, bn), ad.clone());
                }
                let n = upoly::add(
                    base,
                    &upoly::mul(base, an, bd),
                    &upoly::mul(base, bn, ad),
                );
                self.make_fraction(n, upoly::mul(base, ad, bd))
            }
            _ => panic!("element kinds do not match field {}", self.name()),
        }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        use FieldElement::*;
        match a {
            Residue(x) => {
                let p = self.modulus();
                Residue(((p - *x as u64) % p) as u32)
            }
            Rational(x) => Rational(-x),
            Poly(x) => {
                let base = self.base().unwrap();
                Poly(x.iter().map(|u| base.neg(u)).collect())
            }
            Fraction(n, d) => {
                let base = self.base().unwrap();
                Fraction(upoly::neg(base, n), d.clone())
            }
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        use FieldElement::*;
        match (a, b) {
            (Residue(x), Residue(y)) => {
                let p = self.modulus();
                Residue(((*x as u64 * *y as u64) % p) as u32)
            }
            (Rational(x), Rational(y)) => Rational(x * y),
            (Poly(x), Poly(y)) => {
                let base = self.base().unwrap();
                let minpoly = self.minpoly().unwrap();
                let prod = upoly::mul(base, x, y);
                let r = upoly::rem(base, &prod, minpoly);
                self.pad(r)
            }
            (Fraction(an, ad), Fraction(bn, bd)) => {
                let base = self.base().unwrap();
                self.make_fraction(upoly::mul(base, an, bn), upoly::mul(base, ad, bd))
            }
            _ => panic!("element kinds do not match field {}", self.name()),
        }
    }

    pub fn square(&self, a: &FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn inv(&self, a: &FieldElement) -> FieldResult<FieldElement> {
        use FieldElement::*;
        if self.is_zero(a) {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match a {
            Residue(x) => Residue(inv_mod(*x as u64, self.modulus()) as u32),
            Rational(x) => Rational(x.recip()),
            Poly(x) => {
                let base = self.base().unwrap();
                let minpoly = self.minpoly().unwrap();
                let xt = upoly::trim(base, x.clone());
                let (g, s, _) = upoly::xgcd(base, &xt, minpoly);
                debug_assert!(g.len() == 1);
                self.pad(s)
            }
            Fraction(n, d) => self.make_fraction(d.clone(), n.clone()),
        })
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> FieldResult<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &FieldElement, mut e: u64) -> FieldElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn pow_big(&self, a: &FieldElement, e: &BigUint) -> FieldElement {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// Integer power allowing negative exponents.
    pub fn powi(&self, a: &FieldElement, e: i64) -> FieldResult<FieldElement> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(&self.inv(a)?, e.unsigned_abs()))
        }
    }

    fn pad(&self, mut v: UPoly) -> FieldElement {
        let base = self.base().unwrap();
        v.resize(self.degree(), base.zero());
        FieldElement::Poly(v)
    }

    fn make_fraction(&self, num: UPoly, den: UPoly) -> FieldElement {
        let base = self.base().unwrap();
        let num = upoly::trim(base, num);
        let den = upoly::trim(base, den);
        assert!(!den.is_empty(), "zero denominator");
        if num.is_empty() {
            return FieldElement::Fraction(vec![], vec![base.one()]);
        }
        let g = upoly::gcd(base, &num, &den);
        let (mut n, mut d) = if g.len() > 1 {
            (upoly::div_exact(base, &num, &g), upoly::div_exact(base, &den, &g))
        } else {
            (num, den)
        };
        let lc = d.last().unwrap().clone();
        if !base.is_one(&lc) {
            let li = base.inv(&lc).unwrap();
            n = upoly::scale(base, &n, &li);
            d = upoly::scale(base, &d, &li);
        }
        FieldElement::Fraction(n, d)
    }

    /// Builds `num/den` in a function field from base-field polynomials.
    pub fn fraction(&self, num: UPoly, den: UPoly) -> FieldResult<FieldElement> {
        let base = self
            .base()
            .filter(|_| matches!(self.kind(), FieldKind::FunctionField { .. }))
            .ok_or_else(|| FieldError::UnsupportedField(self.name()))?;
        if upoly::trim(base, den.clone()).is_empty() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.make_fraction(num, den))
    }

    /// Lifts an element of `sub` (a field lower in this tower, or this field
    /// itself) into `self`.
    pub fn embed(&self, sub: &FieldSpec, a: &FieldElement) -> FieldResult<FieldElement> {
        if sub == self {
            return Ok(a.clone());
        }
        match self.kind() {
            FieldKind::Extension { base, .. } => {
                let inner = base.embed(sub, a)?;
                let mut v = vec![base.zero(); self.degree()];
                v[0] = inner;
                Ok(FieldElement::Poly(v))
            }
            FieldKind::FunctionField { base, .. } => {
                let inner = base.embed(sub, a)?;
                Ok(self.make_fraction(vec![inner], vec![base.one()]))
            }
            _ => Err(FieldError::FieldMismatch),
        }
    }

    /// Whether `sub` is this field or lies below it in the tower.
    pub fn contains_field(&self, sub: &FieldSpec) -> bool {
        sub == self || self.base().map_or(false, |b| b.contains_field(sub))
    }

    /// Returns the element as a member of `sub` if it lies there.
    pub fn restrict(&self, sub: &FieldSpec, a: &FieldElement) -> Option<FieldElement> {
        if sub == self {
            return Some(a.clone());
        }
        match (self.kind(), a) {
            (FieldKind::Extension { base, .. }, FieldElement::Poly(v)) => {
                if v[1..].iter().all(|c| base.is_zero(c)) {
                    base.restrict(sub, &v[0])
                } else {
                    None
                }
            }
            (FieldKind::FunctionField { base, .. }, FieldElement::Fraction(n, d)) => {
                if d.len() == 1 && n.len() <= 1 {
                    let c = n.first().cloned().unwrap_or_else(|| base.zero());
                    base.restrict(sub, &c)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Evaluates a base-coefficient polynomial (little-endian) at an element.
    pub fn eval_base_poly(&self, coeffs: &[FieldElement], x: &FieldElement) -> FieldElement {
        let base = self.base().expect("field has no base");
        let mut acc = self.zero();
        for c in coeffs.iter().rev() {
            acc = self.mul(&acc, x);
            acc = self.add(&acc, &self.embed(base, c).unwrap());
        }
        acc
    }

    /// `a^(1/p)` in a finite field of characteristic `p`.
    pub fn pth_root(&self, a: &FieldElement) -> FieldElement {
        let q = self.order().expect("p-th roots only in finite fields");
        let p = BigUint::from(self.characteristic());
        self.pow_big(a, &(q / p))
    }

    /// Frobenius `x -> x^p`.
    pub fn frobenius(&self, a: &FieldElement) -> FieldElement {
        self.pow(a, self.characteristic())
    }

    // ----- sampling and enumeration -----

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        match self.kind() {
            FieldKind::Rationals => {
                let n: i64 = rng.gen_range(-20..=20);
                let d: i64 = rng.gen_range(1..=6);
                FieldElement::Rational(BigRational::new(n.into(), d.into()))
            }
            FieldKind::Prime(p) => FieldElement::Residue(rng.gen_range(0..*p)),
            FieldKind::Extension { base, .. } => {
                FieldElement::Poly((0..self.degree()).map(|_| base.random(rng)).collect())
            }
            FieldKind::FunctionField { base, .. } => {
                let dn = rng.gen_range(0..3);
                let dd = rng.gen_range(0..3);
                let num: UPoly = (0..=dn).map(|_| base.random(rng)).collect();
                let mut den: UPoly = (0..dd).map(|_| base.random(rng)).collect();
                den.push(base.one());
                self.make_fraction(num, den)
            }
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        loop {
            let x = self.random(rng);
            if !self.is_zero(&x) {
                return x;
            }
        }
    }

    /// All elements of a finite field with at most `limit` elements.
    pub fn elements(&self, limit: u64) -> Option<Vec<FieldElement>> {
        let q = self.order()?.to_u64()?;
        if q > limit {
            return None;
        }
        match self.kind() {
            FieldKind::Prime(p) => Some((0..*p).map(FieldElement::Residue).collect()),
            FieldKind::Extension { base, .. } => {
                let be = base.elements(limit)?;
                let mut out: Vec<Vec<FieldElement>> = vec![vec![]];
                for _ in 0..self.degree() {
                    let mut next = Vec::with_capacity(out.len() * be.len());
                    for prefix in &out {
                        for b in &be {
                            let mut v = prefix.clone();
                            v.push(b.clone());
                            next.push(v);
                        }
                    }
                    out = next;
                }
                Some(out.into_iter().map(FieldElement::Poly).collect())
            }
            _ => None,
        }
    }

    // ----- JSON -----

    pub fn element_to_json(&self, a: &FieldElement) -> Value {
        match (self.kind(), a) {
            (FieldKind::Rationals, FieldElement::Rational(r)) => {
                if r.is_integer() {
                    Value::String(r.numer().to_string())
                } else {
                    Value::String(format!("{}/{}", r.numer(), r.denom()))
                }
            }
            (FieldKind::Prime(_), FieldElement::Residue(x)) => json!(x),
            (FieldKind::Extension { base, .. }, FieldElement::Poly(v)) => {
                Value::Array(v.iter().map(|c| base.element_to_json(c)).collect())
            }
            (FieldKind::FunctionField { base, .. }, FieldElement::Fraction(n, d)) => json!({
                "num": n.iter().map(|c| base.element_to_json(c)).collect::<Vec<_>>(),
                "den": d.iter().map(|c| base.element_to_json(c)).collect::<Vec<_>>(),
            }),
            _ => panic!("element does not belong to {}", self.name()),
        }
    }

    pub fn element_from_json(&self, v: &Value) -> FieldResult<FieldElement> {
        let bad = || FieldError::Parse(format!("{v} is not an element of {}", self.name()));
        match self.kind() {
            FieldKind::Rationals => {
                let s = match v {
                    Value::String(s) => s.clone(),
                    Value::Number(n) if n.is_i64() => n.to_string(),
                    _ => return Err(bad()),
                };
                parse_rational(&s).ok_or_else(bad).map(FieldElement::Rational)
            }
            FieldKind::Prime(p) => {
                let n = v.as_i64().ok_or_else(bad)?;
                if n < 0 || n >= *p as i64 {
                    return Err(bad());
                }
                Ok(FieldElement::Residue(n as u32))
            }
            FieldKind::Extension { base, .. } => {
                let arr = v.as_array().ok_or_else(bad)?;
                if arr.len() > self.degree() {
                    return Err(bad());
                }
                let coeffs = arr
                    .iter()
                    .map(|c| base.element_from_json(c))
                    .collect::<FieldResult<Vec<_>>>()?;
                Ok(self.pad(coeffs))
            }
            FieldKind::FunctionField { base, .. } => {
                let parse = |key: &str| -> FieldResult<UPoly> {
                    v.get(key)
                        .and_then(|x| x.as_array())
                        .ok_or_else(bad)?
                        .iter()
                        .map(|c| base.element_from_json(c))
                        .collect()
                };
                let num = parse("num")?;
                let den = parse("den")?;
                self.fraction(num, den)
            }
        }
    }

    pub fn format(&self, a: &FieldElement) -> String {
        match (self.kind(), a) {
            (FieldKind::Rationals, FieldElement::Rational(r)) => r.to_string(),
            (FieldKind::Prime(_), FieldElement::Residue(x)) => x.to_string(),
            (FieldKind::Extension { base, label, .. }, FieldElement::Poly(v)) => {
                let terms: Vec<String> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !base.is_zero(c))
                    .map(|(i, c)| match i {
                        0 => base.format(c),
                        1 => format!("({})*{}", base.format(c), label),
                        _ => format!("({})*{}^{}", base.format(c), label, i),
                    })
                    .collect();
                if terms.is_empty() {
                    "0".into()
                } else {
                    terms.join(" + ")
                }
            }
            (FieldKind::FunctionField { base, var }, FieldElement::Fraction(n, d)) => {
                format!(
                    "({})/({})",
                    upoly::format(base, n, var),
                    upoly::format(base, d, var)
                )
            }
            _ => "?".into(),
        }
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        Some(BigRational::from_integer(s.parse().ok()?))
    }
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(p as i128) as u64
}

/// Rational root of a polynomial over Q, if any (rational root theorem).
fn rational_root(field: &FieldSpec, f: &UPoly) -> Option<BigRational> {
    let coeffs: Vec<BigRational> = f
        .iter()
        .map(|c| match c {
            FieldElement::Rational(r) => r.clone(),
            _ => unreachable!(),
        })
        .collect();
    let lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    if ints[0].is_zero() {
        return Some(BigRational::zero());
    }
    let divisors = |n: &BigInt| -> Vec<BigInt> {
        let n = n.abs();
        let mut out = vec![];
        let mut d = BigInt::one();
        while &d * &d <= n {
            if (&n % &d).is_zero() {
                out.push(d.clone());
                out.push(&n / &d);
            }
            d += 1;
        }
        out
    };
    for num in divisors(&ints[0]) {
        for den in divisors(ints.last().unwrap()) {
            for sign in [1, -1] {
                let cand = BigRational::new(num.clone() * sign, den.clone());
                let x = FieldElement::Rational(cand.clone());
                if field.is_zero(&upoly::eval(field, f, &x)) {
                    return Some(cand);
                }
            }
        }
    }
    None
}

/// First monic irreducible polynomial of degree `k` over a finite field in a
/// fixed enumeration order.
pub fn first_irreducible(base: &FieldSpec, k: usize) -> FieldResult<UPoly> {
    let elems = base.elements(1 << 20);
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0x5eed);
    for idx in 0u64.. {
        let mut coeffs: UPoly = Vec::with_capacity(k + 1);
        match &elems {
            Some(es) => {
                let q = es.len() as u64;
                let mut n = idx;
                for _ in 0..k {
                    coeffs.push(es[(n % q) as usize].clone());
                    n /= q;
                }
                if n > 0 {
                    break;
                }
            }
            None => {
                for _ in 0..k {
                    coeffs.push(base.random(&mut rng));
                }
            }
        }
        if base.is_zero(&coeffs[0]) {
            continue;
        }
        coeffs.push(base.one());
        if crate::factor::is_irreducible(&coeffs, base)? {
            return Ok(coeffs);
        }
    }
    Err(FieldError::UnsupportedField(format!(
        "no irreducible polynomial of degree {k} over {}",
        base.name()
    )))
}

/// A field element bundled with its field, for checked operations across
/// field boundaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldValue {
    pub field: FieldSpec,
    pub value: FieldElement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Inv,
    Neg,
}

/// Checked arithmetic on bundled values; `y` is ignored for unary ops.
pub fn field_arith(op: ArithOp, x: &FieldValue, y: Option<&FieldValue>) -> FieldResult<FieldValue> {
    let f = &x.field;
    let other = || -> FieldResult<&FieldValue> {
        let y = y.ok_or(FieldError::FieldMismatch)?;
        if &y.field != f {
            return Err(FieldError::FieldMismatch);
        }
        Ok(y)
    };
    let value = match op {
        ArithOp::Add => f.add(&x.value, &other()?.value),
        ArithOp::Mul => f.mul(&x.value, &other()?.value),
        ArithOp::Inv => f.inv(&x.value)?,
        ArithOp::Neg => f.neg(&x.value),
    };
    Ok(FieldValue { field: f.clone(), value })
}

/// A generator of a cyclic Galois group acting on a simple extension.
#[derive(Clone, Debug)]
pub struct GaloisAction {
    field: FieldSpec,
    image: FieldElement,
    order: usize,
}

pub fn make_galois_action(
    field: &FieldSpec,
    image: FieldElement,
    order: usize,
) -> FieldResult<GaloisAction> {
    let minpoly = field
        .minpoly()
        .ok_or_else(|| FieldError::UnsupportedField(field.name()))?;
    if field.degree() != order {
        return Err(FieldError::WrongOrder { order, orbit: field.degree() });
    }
    if !field.is_zero(&field.eval_base_poly(minpoly, &image)) {
        return Err(FieldError::NotRoot);
    }
    let action = GaloisAction { field: field.clone(), image, order };
    let gen = field.generator().unwrap();
    let orbit = action.orbit(&gen);
    let mut distinct = orbit.clone();
    distinct.sort();
    distinct.dedup();
    if distinct.len() != order || action.apply(orbit.last().unwrap()) != gen {
        return Err(FieldError::WrongOrder { order, orbit: distinct.len() });
    }
    Ok(action)
}

impl GaloisAction {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn image_of_generator(&self) -> &FieldElement {
        &self.image
    }

    /// `sigma(x)`: substitutes the image for the generator in the coefficient vector.
    pub fn apply(&self, x: &FieldElement) -> FieldElement {
        match x {
            FieldElement::Poly(v) => self.field.eval_base_poly(v, &self.image),
            _ => x.clone(),
        }
    }

    /// `[x, sigma(x), ..., sigma^(n-1)(x)]`.
    pub fn orbit(&self, x: &FieldElement) -> Vec<FieldElement> {
        let mut out = vec![x.clone()];
        for _ in 1..self.order {
            let next = self.apply(out.last().unwrap());
            out.push(next);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q_cubic() -> FieldSpec {
        let q = FieldSpec::rationals();
        // theta^3 + theta^2 - 2 theta - 1
        let m = [-1, -2, 1, 1].iter().map(|&c| q.from_i64(c)).collect();
        FieldSpec::extension(&q, m, "theta").unwrap()
    }

    fn elem(f: &FieldSpec, coeffs: &[i64]) -> FieldElement {
        let base = f.base().unwrap();
        let mut v: Vec<_> = coeffs.iter().map(|&c| base.from_i64(c)).collect();
        v.resize(f.degree(), base.zero());
        FieldElement::Poly(v)
    }

    #[test]
    fn make_field_examples() {
        let f7 = make_field(&FieldDescriptor::Prime { p: 7 }).unwrap();
        assert_eq!(f7.degree(), 1);
        assert_eq!(make_field(&FieldDescriptor::Prime { p: 4 }), Err(FieldError::NotPrime(4)));
        // t^2 + t + 1 over F_2: no root among {0, 1}
        let desc: FieldDescriptor = serde_json::from_value(json!({
            "kind": "ext", "base": {"kind": "fp", "p": 2}, "minpoly": [1, 1, 1], "label": "t"
        }))
        .unwrap();
        let f4 = make_field(&desc).unwrap();
        assert_eq!(f4.degree(), 2);
        assert_eq!(f4.order().unwrap(), BigUint::from(4u32));
        assert_eq!(f4.descriptor(), desc);
    }

    #[test]
    fn reducible_and_too_deep() {
        let f2 = FieldSpec::prime(2).unwrap();
        let m = vec![f2.one(), f2.zero(), f2.one()]; // (t+1)^2
        assert!(matches!(
            FieldSpec::extension(&f2, m, "t"),
            Err(FieldError::ReducibleMinpoly(2))
        ));
        let f4 = FieldSpec::finite(2, 2).unwrap();
        let t = FieldSpec::function_field(&f4, "t").unwrap();
        assert!(FieldSpec::function_field(&t, "s").is_err());
        let f16 = FieldSpec::finite_extension(&f4, 2, "b").unwrap();
        let f256 = FieldSpec::finite_extension(&f16, 2, "c").unwrap();
        assert!(matches!(
            FieldSpec::finite_extension(&f256, 2, "d"),
            Err(FieldError::TowerTooDeep { .. })
        ));
        let q = FieldSpec::rationals();
        let quartic = vec![q.from_i64(2), q.zero(), q.zero(), q.zero(), q.one()];
        assert!(matches!(
            FieldSpec::extension(&q, quartic, "x"),
            Err(FieldError::UnsupportedField(_))
        ));
    }

    #[test]
    fn inverse_of_theta() {
        let k = q_cubic();
        let theta = k.generator().unwrap();
        let expected = elem(&k, &[-2, 1, 1]);
        assert_eq!(k.inv(&theta).unwrap(), expected);
        assert_eq!(k.mul(&theta, &expected), k.one());
        assert_eq!(k.inv(&k.zero()), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn field_arith_checks_fields() {
        let f5 = FieldSpec::prime(5).unwrap();
        let f7 = FieldSpec::prime(7).unwrap();
        let a = FieldValue { field: f5.clone(), value: f5.from_i64(3) };
        let b = FieldValue { field: f7.clone(), value: f7.from_i64(3) };
        assert_eq!(field_arith(ArithOp::Add, &a, Some(&b)), Err(FieldError::FieldMismatch));
        let n = field_arith(ArithOp::Neg, &a, None).unwrap();
        assert!(f5.is_zero(&field_arith(ArithOp::Add, &a, Some(&n)).unwrap().value));
    }

    #[test]
    fn galois_actions() {
        let k = q_cubic();
        let sigma = make_galois_action(&k, elem(&k, &[-2, 0, 1]), 3).unwrap();
        let orbit = sigma.orbit(&k.generator().unwrap());
        assert_eq!(orbit.len(), 3);
        let sum = orbit.iter().fold(k.zero(), |a, b| k.add(&a, b));
        assert_eq!(sum, k.from_i64(-1));
        assert_eq!(
            make_galois_action(&k, elem(&k, &[1, 1]), 3).unwrap_err(),
            FieldError::NotRoot
        );
        let f8 = FieldSpec::extension(
            &FieldSpec::prime(2).unwrap(),
            vec![FieldElement::Residue(1), FieldElement::Residue(1), FieldElement::Residue(0), FieldElement::Residue(1)],
            "t",
        )
        .unwrap();
        let frob = make_galois_action(&f8, elem(&f8, &[0, 0, 1]), 3).unwrap();
        let x = elem(&f8, &[1, 1, 0]);
        assert_eq!(frob.apply(&x), f8.frobenius(&x));
        assert!(matches!(
            make_galois_action(&k, k.generator().unwrap(), 3),
            Err(FieldError::WrongOrder { .. })
        ));
    }

    fn axioms(f: &FieldSpec, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
            assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
            assert_eq!(f.add(&f.add(&a, &b), &c), f.add(&a, &f.add(&b, &c)));
            assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
            assert!(f.is_zero(&f.add(&a, &f.neg(&a))));
            if !f.is_zero(&a) {
                assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
            }
            let j = f.element_to_json(&a);
            assert_eq!(f.element_from_json(&j).unwrap(), a);
        }
    }

    #[test]
    fn field_axioms_on_random_samples() {
        axioms(&FieldSpec::rationals(), 1);
        axioms(&FieldSpec::prime(101).unwrap(), 2);
        axioms(&FieldSpec::finite(2, 3).unwrap(), 3);
        axioms(&FieldSpec::finite(101, 3).unwrap(), 4);
        axioms(&q_cubic(), 5);
        let f7 = FieldSpec::prime(7).unwrap();
        axioms(&FieldSpec::function_field(&f7, "t").unwrap(), 6);
        let f9 = FieldSpec::finite(3, 2).unwrap();
        axioms(&FieldSpec::function_field(&f9, "t").unwrap(), 7);
    }

    #[test]
    fn function_field_canonical_form() {
        let f5 = FieldSpec::prime(5).unwrap();
        let k = FieldSpec::function_field(&f5, "t").unwrap();
        let p = |c: &[i64]| c.iter().map(|&x| f5.from_i64(x)).collect::<Vec<_>>();
        // (t^2 - 1) / (2t + 2) = (t - 1)/2 = 3t + 2 over F_5
        let a = k.fraction(p(&[-1, 0, 1]), p(&[2, 2])).unwrap();
        assert_eq!(a, FieldElement::Fraction(p(&[2, 3]), p(&[1])));
        assert_eq!(k.fraction(p(&[1]), vec![]), Err(FieldError::DivisionByZero));
    }
}
