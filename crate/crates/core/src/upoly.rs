//! Dense univariate polynomials over a [`FieldSpec`], little-endian, with no
//! trailing zero coefficients (the zero polynomial is the empty vector).

use num_bigint::BigUint;

use crate::field::{FieldElement, FieldSpec};

pub type UPoly = Vec<FieldElement>;

pub fn trim(f: &FieldSpec, mut a: UPoly) -> UPoly {
    while a.last().map_or(false, |c| f.is_zero(c)) {
        a.pop();
    }
    a
}

pub fn degree(a: &UPoly) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn constant(f: &FieldSpec, c: FieldElement) -> UPoly {
    trim(f, vec![c])
}

/// `x` as a polynomial.
pub fn x(f: &FieldSpec) -> UPoly {
    vec![f.zero(), f.one()]
}

pub fn add(f: &FieldSpec, a: &UPoly, b: &UPoly) -> UPoly {
    let n = a.len().max(b.len());
    let zero = f.zero();
    let out = (0..n)
        .map(|i| f.add(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
        .collect();
    trim(f, out)
}

pub fn neg(f: &FieldSpec, a: &UPoly) -> UPoly {
    a.iter().map(|c| f.neg(c)).collect()
}

pub fn sub(f: &FieldSpec, a: &UPoly, b: &UPoly) -> UPoly {
    add(f, a, &neg(f, b))
}

pub fn scale(f: &FieldSpec, a: &UPoly, c: &FieldElement) -> UPoly {
    trim(f, a.iter().map(|x| f.mul(x, c)).collect())
}

pub fn mul(f: &FieldSpec, a: &UPoly, b: &UPoly) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    trim(f, out)
}

/// Quotient and remainder; panics on division by the zero polynomial.
pub fn divrem(f: &FieldSpec, a: &UPoly, b: &UPoly) -> (UPoly, UPoly) {
    assert!(!b.is_empty(), "polynomial division by zero");
    if a.len() < b.len() {
        return (vec![], a.clone());
    }
    let lc_inv = f.inv(b.last().unwrap()).unwrap();
    let mut r = a.clone();
    let mut q = vec![f.zero(); a.len() - b.len() + 1];
    for i in (0..q.len()).rev() {
        let c = f.mul(&r[i + b.len() - 1], &lc_inv);
        if f.is_zero(&c) {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] = f.sub(&r[i + j], &f.mul(&c, bj));
        }
        q[i] = c;
    }
    r.truncate(b.len() - 1);
    (trim(f, q), trim(f, r))
}

pub fn rem(f: &FieldSpec, a: &UPoly, b: &UPoly) -> UPoly {
    divrem(f, a, b).1
}

pub fn div_exact(f: &FieldSpec, a: &UPoly, b: &UPoly) -> UPoly {
    let (q, r) = divrem(f, a, b);
    debug_assert!(r.is_empty(), "inexact polynomial division");
    q
}

pub fn monic(f: &FieldSpec, a: &UPoly) -> UPoly {
    match a.last() {
        None => vec![],
        Some(lc) => scale(f, a, &f.inv(lc).unwrap()),
    }
}

/// Monic gcd (zero if both inputs are zero).
pub fn gcd(f: &FieldSpec, a: &UPoly, b: &UPoly) -> UPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    monic(f, &a)
}

/// Returns `(g, s, t)` with `s*a + t*b = g` and `g` monic.
pub fn xgcd(f: &FieldSpec, a: &UPoly, b: &UPoly) -> (UPoly, UPoly, UPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (vec![f.one()], vec![]);
    let (mut t0, mut t1) = (vec![], vec![f.one()]);
    while !r1.is_empty() {
        let (q, r) = divrem(f, &r0, &r1);
        let s2 = sub(f, &s0, &mul(f, &q, &s1));
        let t2 = sub(f, &t0, &mul(f, &q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    match r0.last() {
        None => (vec![], s0, t0),
        Some(lc) => {
            let li = f.inv(lc).unwrap();
            (scale(f, &r0, &li), scale(f, &s0, &li), scale(f, &t0, &li))
        }
    }
}

pub fn derivative(f: &FieldSpec, a: &UPoly) -> UPoly {
    let out = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| f.mul(c, &f.from_i64(i as i64)))
        .collect();
    trim(f, out)
}

pub fn eval(f: &FieldSpec, a: &UPoly, x: &FieldElement) -> FieldElement {
    let mut acc = f.zero();
    for c in a.iter().rev() {
        acc = f.add(&f.mul(&acc, x), c);
    }
    acc
}

pub fn mulmod(f: &FieldSpec, a: &UPoly, b: &UPoly, m: &UPoly) -> UPoly {
    rem(f, &mul(f, a, b), m)
}

pub fn powmod(f: &FieldSpec, a: &UPoly, e: &BigUint, m: &UPoly) -> UPoly {
    let mut acc = rem(f, &vec![f.one()], m);
    let a = rem(f, a, m);
    for i in (0..e.bits()).rev() {
        acc = mulmod(f, &acc, &acc, m);
        if e.bit(i) {
            acc = mulmod(f, &acc, &a, m);
        }
    }
    acc
}

pub fn pow(f: &FieldSpec, a: &UPoly, e: u32) -> UPoly {
    let mut acc = vec![f.one()];
    for _ in 0..e {
        acc = mul(f, &acc, a);
    }
    acc
}

pub fn format(f: &FieldSpec, a: &UPoly, var: &str) -> String {
    if a.is_empty() {
        return "0".into();
    }
    let terms: Vec<String> = a
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !f.is_zero(c))
        .map(|(i, c)| match i {
            0 => f.format(c),
            1 => format!("{}*{}", f.format(c), var),
            _ => format!("{}*{}^{}", f.format(c), var, i),
        })
        .collect();
    terms.join(" + ")
}
