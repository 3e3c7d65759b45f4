//! Univariate factorization over finite fields: squarefree decomposition,
//! distinct-degree factorization and equal-degree splitting (Cantor–Zassenhaus
//! for odd characteristic, trace splitting in characteristic 2).

use num_bigint::BigUint;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::{FieldElement, FieldError, FieldResult, FieldSpec};
use crate::upoly::{self, UPoly};

/// Attempts allowed for each equal-degree split before giving up.
pub const DEFAULT_SPLIT_RETRIES: usize = 256;
const SPLIT_SEED: u64 = 0x00c4_a7e5;

/// `f = lead * prod(factor^mult)` with monic irreducible factors.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub lead: FieldElement,
    pub factors: Vec<(UPoly, usize)>,
}

impl Factorization {
    pub fn expand(&self, field: &FieldSpec) -> UPoly {
        let mut acc = vec![self.lead.clone()];
        for (g, m) in &self.factors {
            acc = upoly::mul(field, &acc, &upoly::pow(field, g, *m as u32));
        }
        upoly::trim(field, acc)
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

fn require_finite(field: &FieldSpec) -> FieldResult<BigUint> {
    field.order().ok_or_else(|| {
        FieldError::UnsupportedField(format!(
            "factorization over {} (finite fields only)",
            field.name()
        ))
    })
}

pub fn factor_univariate(f: &UPoly, field: &FieldSpec) -> FieldResult<Factorization> {
    let q = require_finite(field)?;
    let f = upoly::trim(field, f.clone());
    let lead = f.last().cloned().ok_or(FieldError::DivisionByZero)?;
    let monic = upoly::monic(field, &f);
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    let mut factors = vec![];
    for (part, mult) in squarefree(field, &monic) {
        for (g, d) in distinct_degree(field, &q, &part) {
            for h in equal_degree(field, &q, &g, d, &mut rng)? {
                factors.push((h, mult));
            }
        }
    }
    factors.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    Ok(Factorization { lead, factors })
}

fn pth_root_poly(field: &FieldSpec, f: &UPoly) -> UPoly {
    let p = field.characteristic() as usize;
    let out = f
        .iter()
        .step_by(p)
        .map(|c| field.pth_root(c))
        .collect();
    upoly::trim(field, out)
}

/// Squarefree decomposition of a monic polynomial.
pub fn squarefree(field: &FieldSpec, f: &UPoly) -> Vec<(UPoly, usize)> {
    let mut out = vec![];
    if f.len() <= 1 {
        return out;
    }
    let p = field.characteristic() as usize;
    let df = upoly::derivative(field, f);
    if df.is_empty() {
        for (g, m) in squarefree(field, &pth_root_poly(field, f)) {
            out.push((g, m * p));
        }
        return out;
    }
    let mut c = upoly::gcd(field, f, &df);
    let mut w = upoly::div_exact(field, f, &c);
    let mut i = 1;
    while w.len() > 1 {
        let y = upoly::gcd(field, &w, &c);
        let z = upoly::div_exact(field, &w, &y);
        if z.len() > 1 {
            out.push((z, i));
        }
        i += 1;
        c = upoly::div_exact(field, &c, &y);
        w = y;
    }
    if c.len() > 1 {
        for (g, m) in squarefree(field, &pth_root_poly(field, &c)) {
            out.push((g, m * p));
        }
    }
    out
}

/// Splits a squarefree monic polynomial into products of irreducibles of equal degree.
pub fn distinct_degree(field: &FieldSpec, q: &BigUint, f: &UPoly) -> Vec<(UPoly, usize)> {
    let mut out = vec![];
    let mut rest = f.clone();
    let x = upoly::x(field);
    let mut h = upoly::rem(field, &x, &rest);
    let mut d = 1;
    while rest.len() > 2 * d {
        h = upoly::powmod(field, &h, q, &rest);
        let g = upoly::gcd(field, &upoly::sub(field, &h, &x), &rest);
        if g.len() > 1 {
            rest = upoly::div_exact(field, &rest, &g);
            h = upoly::rem(field, &h, &rest);
            out.push((g, d));
        }
        d += 1;
    }
    if rest.len() > 1 {
        let deg = rest.len() - 1;
        out.push((rest, deg));
    }
    out
}

fn random_poly(field: &FieldSpec, len: usize, rng: &mut ChaCha8Rng) -> UPoly {
    upoly::trim(field, (0..len).map(|_| field.random(rng)).collect())
}

/// Splits `g`, a product of distinct irreducibles of degree `d`.
pub fn equal_degree(
    field: &FieldSpec,
    q: &BigUint,
    g: &UPoly,
    d: usize,
    rng: &mut ChaCha8Rng,
) -> FieldResult<Vec<UPoly>> {
    let n = g.len() - 1;
    if n == d {
        return Ok(vec![g.clone()]);
    }
    let char2 = field.characteristic() == 2;
    let qd = q.pow(d as u32);
    let half = (&qd - BigUint::one()) >> 1;
    let two = BigUint::from(2u32);
    let bits = qd.bits() - 1;
    for _ in 0..DEFAULT_SPLIT_RETRIES {
        let a = random_poly(field, n, rng);
        if a.len() < 2 {
            continue;
        }
        let b = if char2 {
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..bits {
                t = upoly::powmod(field, &t, &two, g);
                acc = upoly::add(field, &acc, &t);
            }
            acc
        } else {
            let e = upoly::powmod(field, &a, &half, g);
            upoly::sub(field, &e, &vec![field.one()])
        };
        let h = upoly::gcd(field, &b, g);
        if h.len() > 1 && h.len() < g.len() {
            let other = upoly::div_exact(field, g, &h);
            let mut out = equal_degree(field, q, &h, d, rng)?;
            out.extend(equal_degree(field, q, &other, d, rng)?);
            return Ok(out);
        }
    }
    Err(FieldError::SplittingFailed(DEFAULT_SPLIT_RETRIES))
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test over a finite field.
pub fn is_irreducible(f: &UPoly, field: &FieldSpec) -> FieldResult<bool> {
    let q = require_finite(field)?;
    let f = upoly::monic(field, &upoly::trim(field, f.clone()));
    let n = match f.len() {
        0 | 1 => return Ok(false),
        len => len - 1,
    };
    if n == 1 {
        return Ok(true);
    }
    let x = upoly::x(field);
    // x^(q^i) mod f for i = 0..=n
    let mut powers = vec![upoly::rem(field, &x, &f)];
    for _ in 0..n {
        let next = upoly::powmod(field, powers.last().unwrap(), &q, &f);
        powers.push(next);
    }
    if upoly::sub(field, &powers[n], &powers[0]).len() > 0 {
        return Ok(false);
    }
    for r in prime_divisors(n) {
        let h = upoly::sub(field, &powers[n / r], &x);
        if upoly::gcd(field, &h, &f).len() > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Distinct roots of `f` in the field.
pub fn roots(f: &UPoly, field: &FieldSpec) -> FieldResult<Vec<FieldElement>> {
    let fac = factor_univariate(f, field)?;
    Ok(fac
        .factors
        .iter()
        .filter(|(g, _)| g.len() == 2)
        .map(|(g, _)| field.neg(&g[0]))
        .collect())
}

/// Some square root of `a`, if one exists in the field.
pub fn sqrt(a: &FieldElement, field: &FieldSpec) -> FieldResult<Option<FieldElement>> {
    if field.is_zero(a) {
        return Ok(Some(field.zero()));
    }
    let f = vec![field.neg(a), field.zero(), field.one()];
    Ok(roots(&f, field)?.into_iter().min())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    fn poly(f: &FieldSpec, c: &[i64]) -> UPoly {
        upoly::trim(f, c.iter().map(|&x| f.from_i64(x)).collect())
    }

    #[test]
    fn x2_plus_1_over_f5_splits() {
        let f5 = fp(5);
        let fac = factor_univariate(&poly(&f5, &[1, 0, 1]), &f5).unwrap();
        // exhaustive root search oracle: 2^2 = 4 = -1, 3^2 = 9 = -1
        let brute: Vec<i64> = (0..5).filter(|x| (x * x + 1) % 5 == 0).collect();
        assert_eq!(brute, vec![2, 3]);
        assert_eq!(
            fac.factors,
            vec![(poly(&f5, &[-3, 1]), 1), (poly(&f5, &[-2, 1]), 1)]
        );
    }

    #[test]
    fn x_is_irreducible() {
        for q in [(2, 1), (3, 2), (7, 1)] {
            let f = FieldSpec::finite(q.0, q.1).unwrap();
            let fac = factor_univariate(&upoly::x(&f), &f).unwrap();
            assert!(fac.is_irreducible());
        }
    }

    #[test]
    fn x2_x_1_over_f2_irreducible() {
        let f2 = fp(2);
        let p = poly(&f2, &[1, 1, 1]);
        assert!((0..2).all(|x| (x * x + x + 1) % 2 != 0));
        assert!(factor_univariate(&p, &f2).unwrap().is_irreducible());
        assert!(is_irreducible(&p, &f2).unwrap());
    }

    #[test]
    fn repeated_factors_and_pth_powers() {
        let f3 = fp(3);
        // (x+1)^3 (x^2+1)^2 x over F_3
        let a = upoly::pow(&f3, &poly(&f3, &[1, 1]), 3);
        let b = upoly::pow(&f3, &poly(&f3, &[1, 0, 1]), 2);
        let f = upoly::mul(&f3, &upoly::mul(&f3, &a, &b), &upoly::x(&f3));
        let fac = factor_univariate(&f, &f3).unwrap();
        assert_eq!(fac.expand(&f3), f);
        assert_eq!(
            fac.factors,
            vec![
                (poly(&f3, &[0, 1]), 1),
                (poly(&f3, &[1, 1]), 3),
                (poly(&f3, &[1, 0, 1]), 2)
            ]
        );
    }

    #[test]
    fn over_rationals_is_unsupported() {
        let q = FieldSpec::rationals();
        let p = vec![q.one(), q.one()];
        assert!(matches!(
            factor_univariate(&p, &q),
            Err(FieldError::UnsupportedField(_))
        ));
    }

    #[test]
    fn char2_extension_splitting() {
        let f8 = FieldSpec::finite(2, 3).unwrap();
        // x^8 - x splits into all 8 linear factors over F_8
        let mut f = vec![f8.zero(); 9];
        f[8] = f8.one();
        f[1] = f8.one();
        let fac = factor_univariate(&f, &f8).unwrap();
        assert_eq!(fac.factors.len(), 8);
        assert!(fac.factors.iter().all(|(g, m)| g.len() == 2 && *m == 1));
    }
}
