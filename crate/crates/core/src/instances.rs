//! Explicit varieties: Artin–Mumford form data, the quartics S and V, the
//! norm-form cubic threefold and its p-adic special fiber.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::field::{FieldError, FieldSpec, GaloisAction};
use crate::groebner::{Engine, IdealError};
use crate::linalg::{self, Matrix};
use crate::poly::{Monomial, MultiPoly, PolyError, PolyRing, Ring};
use crate::variety::{
    verify_am_tangency, verify_genericity, GenericityReport, ProjectiveHypersurface, TangencyReport,
    VarietyError,
};

pub const DEFAULT_RETRIES: usize = 100;
/// Coordinate changes tried per candidate before drawing new cubics.
pub const CHANGES_PER_CANDIDATE: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("no valid forms within {retries} retries ({stats})")]
    RetriesExhausted { retries: usize, stats: FailureStats },
    #[error("unsupported characteristic {0}")]
    UnsupportedCharacteristic(u64),
    #[error("norm expansion left the base field")]
    CoefficientNotInBase,
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
}

pub type InstanceResult<T> = Result<T, InstanceError>;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FailureStats {
    pub tangency: usize,
    pub genericity_m: usize,
    pub genericity_tangency: usize,
    pub genericity_conic: usize,
    pub singular_change: usize,
}

impl std::fmt::Display for FailureStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "tangency {}, hyperplane meets M {}, hyperplane meets A∩E {}, hyperplane tangent to A {}",
            self.tangency, self.genericity_m, self.genericity_tangency, self.genericity_conic
        )
    }
}

#[derive(Clone, Debug)]
pub struct ArtinMumfordForms {
    pub field: FieldSpec,
    pub ring: Ring,
    pub alpha: MultiPoly,
    pub beta: MultiPoly,
    pub gamma: MultiPoly,
    pub eps1: MultiPoly,
    pub eps2: MultiPoly,
    /// Parametrization of the conic `α = 0` by binary quadratic forms in `s, t`.
    pub phi: [MultiPoly; 3],
    /// The applied change of coordinates: forms are `F(M z)` for the original `F`.
    pub change: Matrix,
    pub seed: u64,
    /// Candidate cubic pairs drawn before success.
    pub attempts: usize,
    pub tangency: TangencyReport,
    pub genericity: GenericityReport,
}

fn random_form(ring: &Ring, degree: u32, rng: &mut ChaCha8Rng) -> MultiPoly {
    let field = &ring.field;
    let terms = monomials_of_degree(ring.arity(), degree)
        .into_iter()
        .map(|m| (m, field.random(rng)))
        .collect();
    MultiPoly::from_terms(ring, terms)
}

/// All monomials of a given degree, lex-descending.
pub fn monomials_of_degree(arity: usize, degree: u32) -> Vec<Monomial> {
    fn rec(arity: usize, degree: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() == arity - 1 {
            prefix.push(degree);
            out.push(Monomial::from_exps(prefix));
            prefix.pop();
            return;
        }
        for e in (0..=degree).rev() {
            prefix.push(e);
            rec(arity, degree - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = vec![];
    rec(arity, degree, &mut vec![], &mut out);
    out
}

/// Solves `F∘φ = target` for a ternary form `F` of the given degree, with free
/// coordinates set to zero. Columns run in lex-ascending monomial order, so each
/// target coefficient lands on the lex-smallest monomial pulling back onto it.
pub fn pullback_solve(
    ring: &Ring,
    phi: &[MultiPoly; 3],
    degree: u32,
    target: &MultiPoly,
) -> InstanceResult<Option<MultiPoly>> {
    let field = &ring.field;
    let bring = target.ring();
    let mut monos = monomials_of_degree(3, degree);
    monos.reverse();
    let images: Vec<MultiPoly> = monos
        .iter()
        .map(|m| {
            MultiPoly::monomial(ring, *m, field.one())
                .substitute_all(phi, bring)
        })
        .collect::<Result<_, _>>()?;
    let rows = monomials_of_degree(2, 2 * degree);
    let matrix: Matrix =
        rows.iter().map(|r| images.iter().map(|p| p.coefficient(r)).collect()).collect();
    let rhs: Vec<_> = rows.iter().map(|r| target.coefficient(r)).collect();
    Ok(linalg::solve(field, &matrix, &rhs).map(|sol| {
        MultiPoly::from_terms(ring, monos.iter().copied().zip(sol).collect())
    }))
}

/// Applies `z ↦ M z` to a form: returns `F(M z)`.
pub fn apply_change(f: &MultiPoly, m: &Matrix) -> MultiPoly {
    crate::poly::linear_change(f, m)
}

fn random_invertible(field: &FieldSpec, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let m: Matrix = (0..n).map(|_| (0..n).map(|_| field.random(rng)).collect()).collect();
        if !field.is_zero(&linalg::determinant(field, &m)) {
            return m;
        }
    }
}

impl ArtinMumfordForms {
    /// `β² − 4αγ − ε1ε2`, zero for valid data.
    pub fn identity_defect(&self) -> MultiPoly {
        let four = MultiPoly::from_i64(&self.ring, 4);
        self.beta
            .pow(2)
            .sub(&four.mul(&self.alpha).mul(&self.gamma))
            .sub(&self.eps1.mul(&self.eps2))
    }

    pub fn to_json(&self) -> Value {
        let f = &self.field;
        json!({
            "field": f.descriptor(),
            "seed": self.seed,
            "attempts": self.attempts,
            "alpha": self.alpha.to_json(),
            "beta": self.beta.to_json(),
            "gamma": self.gamma.to_json(),
            "eps1": self.eps1.to_json(),
            "eps2": self.eps2.to_json(),
            "phi": self.phi.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
            "change": self.change.iter().map(|row| row.iter().map(|c| f.element_to_json(c)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "tangency": self.tangency,
            "genericity": self.genericity,
        })
    }
}

/// Pullback–interpolation construction of `α, β, γ, ε1, ε2` with
/// `β² − 4αγ = ε1ε2`, followed by tangency and genericity checks.
pub fn construct_am_forms(
    engine: &Engine,
    field: &FieldSpec,
    seed: u64,
    retries: usize,
) -> InstanceResult<ArtinMumfordForms> {
    let ch = field.characteristic();
    if ch == 2 || ch == 3 {
        return Err(InstanceError::UnsupportedCharacteristic(ch));
    }
    let ring = PolyRing::new(field, &["z0", "z1", "z2"])?;
    let bring = PolyRing::new(field, &["s", "t"])?;
    let z = |i| MultiPoly::var(&ring, i);
    let (s, t) = (MultiPoly::var(&bring, 0), MultiPoly::var(&bring, 1));
    let alpha0 = z(0).mul(&z(2)).sub(&z(1).pow(2));
    let phi0 = [s.pow(2), s.mul(&t), t.pow(2)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = FailureStats::default();
    for attempt in 1..=retries {
        let d1 = random_form(&bring, 3, &mut rng);
        let d2 = random_form(&bring, 3, &mut rng);
        if d1.is_zero() || d2.is_zero() {
            stats.tangency += 1;
            continue;
        }
        let solved = (
            pullback_solve(&ring, &phi0, 3, &d1.pow(2))?,
            pullback_solve(&ring, &phi0, 3, &d2.pow(2))?,
            pullback_solve(&ring, &phi0, 3, &d1.mul(&d2))?,
        );
        let (Some(e1), Some(e2), Some(beta0)) = solved else {
            unreachable!("pullback to binary sextics is surjective");
        };
        let num = beta0.pow(2).sub(&e1.mul(&e2));
        let gamma0 = num.exact_divide(&alpha0.scale(&field.from_i64(4)))?;
        let tangency = verify_am_tangency(engine, &alpha0, &e1, &e2)?;
        if !tangency.passed() {
            stats.tangency += 1;
            continue;
        }
        for _ in 0..CHANGES_PER_CANDIDATE {
            let m = random_invertible(field, 3, &mut rng);
            let forms: Vec<MultiPoly> =
                [&alpha0, &beta0, &gamma0, &e1, &e2].iter().map(|f| apply_change(f, &m)).collect();
            let gen = verify_genericity(engine, &forms[0], &forms[1], &forms[2], &forms[3], &forms[4])?;
            if !gen.passed() {
                stats.genericity_m += usize::from(!gen.avoids_m);
                stats.genericity_tangency += usize::from(!gen.avoids_tangency);
                stats.genericity_conic += usize::from(!gen.transverse_to_conic);
                continue;
            }
            let inv = linalg::inverse(field, &m).expect("invertible change");
            let phi: Vec<MultiPoly> = (0..3)
                .map(|i| {
                    (0..3).fold(MultiPoly::zero(&bring), |acc, j| acc.add(&phi0[j].scale(&inv[i][j])))
                })
                .collect();
            let tangency = verify_am_tangency(engine, &forms[0], &forms[3], &forms[4])?;
            let mut it = forms.into_iter();
            return Ok(ArtinMumfordForms {
                field: field.clone(),
                ring: ring.clone(),
                alpha: it.next().unwrap(),
                beta: it.next().unwrap(),
                gamma: it.next().unwrap(),
                eps1: it.next().unwrap(),
                eps2: it.next().unwrap(),
                phi: [phi[0].clone(), phi[1].clone(), phi[2].clone()],
                change: m,
                seed,
                attempts: attempt,
                tangency,
                genericity: gen,
            });
        }
    }
    Err(InstanceError::RetriesExhausted { retries, stats })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceTag {
    QuarticS,
    QuarticV,
    BrauerCubic,
    PadicCubicSpecialFiber,
}

impl InstanceTag {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "quartic-S" | "quartic-s" => Some(InstanceTag::QuarticS),
            "quartic-V" | "quartic-v" => Some(InstanceTag::QuarticV),
            "brauer-cubic" => Some(InstanceTag::BrauerCubic),
            "padic-cubic-special-fiber" | "padic-cubic" => Some(InstanceTag::PadicCubicSpecialFiber),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InstanceTag::QuarticS => "quartic-S",
            InstanceTag::QuarticV => "quartic-V",
            InstanceTag::BrauerCubic => "brauer-cubic",
            InstanceTag::PadicCubicSpecialFiber => "padic-cubic-special-fiber",
        }
    }
}

#[derive(Clone, Debug)]
pub struct NamedInstance {
    pub tag: InstanceTag,
    pub hypersurface: ProjectiveHypersurface,
    pub provenance: Value,
}

impl NamedInstance {
    pub fn to_json(&self) -> Value {
        let mut v = self.hypersurface.to_json();
        v["tag"] = json!(self.tag.name());
        v["provenance"] = self.provenance.clone();
        v
    }
}

fn lift(p: &MultiPoly, ring: &Ring) -> MultiPoly {
    p.embed_into(ring).expect("variables present")
}

/// `S: α z3² + β z3 + γ = 0` in `P³`.
pub fn build_s(forms: &ArtinMumfordForms) -> NamedInstance {
    let ring = PolyRing::new(&forms.field, &["z0", "z1", "z2", "z3"]).unwrap();
    let z3 = MultiPoly::var(&ring, 3);
    let g = lift(&forms.alpha, &ring)
        .mul(&z3.pow(2))
        .add(&lift(&forms.beta, &ring).mul(&z3))
        .add(&lift(&forms.gamma, &ring));
    NamedInstance {
        tag: InstanceTag::QuarticS,
        hypersurface: ProjectiveHypersurface::new(g).expect("homogeneous quartic"),
        provenance: forms.to_json(),
    }
}

/// `V: α z3² + β z3 + γ + z0² z4² = 0` in `P⁴`.
pub fn build_v(forms: &ArtinMumfordForms) -> NamedInstance {
    let ring = PolyRing::new(&forms.field, &["z0", "z1", "z2", "z3", "z4"]).unwrap();
    let z = |i| MultiPoly::var(&ring, i);
    let f = lift(&forms.alpha, &ring)
        .mul(&z(3).pow(2))
        .add(&lift(&forms.beta, &ring).mul(&z(3)))
        .add(&lift(&forms.gamma, &ring))
        .add(&z(0).pow(2).mul(&z(4).pow(2)));
    NamedInstance {
        tag: InstanceTag::QuarticV,
        hypersurface: ProjectiveHypersurface::new(f).expect("homogeneous quartic"),
        provenance: forms.to_json(),
    }
}

/// Structural check: the V equation has the `z0² z4²` term and no other `z4`.
pub fn has_v_shape(f: &MultiPoly) -> bool {
    let z4 = 4;
    let with_z4: Vec<_> = f.terms().iter().filter(|(m, _)| m.exp(z4) > 0).collect();
    with_z4.len() == 1
        && with_z4[0].0 == Monomial::from_exps(&[2, 0, 0, 0, 2])
        && f.field().is_one(&with_z4[0].1)
}

/// `∏_σ (u + σ(θ) v + σ(θ)² w)` over the base field, in variables `u, v, w`
/// of the given ring (which must live over the base).
pub fn norm_form(action: &GaloisAction, base_ring: &Ring) -> InstanceResult<MultiPoly> {
    let big = action.field();
    let base = &base_ring.field;
    let kring = PolyRing::new(big, &["u", "v", "w"])?;
    let (u, v, w) = (MultiPoly::var(&kring, 0), MultiPoly::var(&kring, 1), MultiPoly::var(&kring, 2));
    let mut acc = MultiPoly::one(&kring);
    for c in action.orbit(&big.generator().expect("extension has a generator")) {
        let lin = u.add(&v.scale(&c)).add(&w.scale(&big.square(&c)));
        acc = acc.mul(&lin);
    }
    let mut terms = vec![];
    for (m, c) in acc.terms() {
        let r = big.restrict(base, c).ok_or(InstanceError::CoefficientNotInBase)?;
        terms.push((*m, r));
    }
    let uvw = PolyRing::new(base, &["u", "v", "w"])?;
    Ok(MultiPoly::from_terms(&uvw, terms).embed_into(base_ring)?)
}

fn uvwxy(field: &FieldSpec) -> Ring {
    PolyRing::new(field, &["u", "v", "w", "x", "y"]).unwrap()
}

fn xy_x_minus_y(ring: &Ring) -> MultiPoly {
    let (x, y) = (MultiPoly::var(ring, 3), MultiPoly::var(ring, 4));
    x.mul(&y).mul(&x.sub(&y))
}

/// `Norm_{K/k}(u + vθ + wθ²) − xy(x − y)` in `P⁴` over `k`.
pub fn build_brauer_cubic(action: &GaloisAction) -> InstanceResult<NamedInstance> {
    let base = action.field().base().expect("extension").clone();
    let ring = uvwxy(&base);
    let n = norm_form(action, &ring)?;
    let f = n.sub(&xy_x_minus_y(&ring));
    Ok(NamedInstance {
        tag: InstanceTag::BrauerCubic,
        hypersurface: ProjectiveHypersurface::new(f)?,
        provenance: json!({
            "extension": action.field().descriptor(),
            "action_image": action.field().element_to_json(action.image_of_generator()),
            "ambient": "P4",
            "note": "the printed statement places X in P5 although the equation has five homogeneous coordinates; P4 is used",
        }),
    })
}

/// Split analogue `uvw − xy(x − y)`.
pub fn build_split_cubic(field: &FieldSpec) -> MultiPoly {
    let ring = uvwxy(field);
    let v = |i| MultiPoly::var(&ring, i);
    v(0).mul(&v(1)).mul(&v(2)).sub(&xy_x_minus_y(&ring))
}

/// Frobenius on `F_{p^3}` as a Galois action of order 3.
pub fn frobenius_action(e: &FieldSpec) -> InstanceResult<GaloisAction> {
    let gen = e.generator().expect("extension");
    let image = e.frobenius(&gen);
    Ok(crate::field::make_galois_action(e, image, 3)?)
}

/// `Norm_{E/F_p}(u + βv + β²w) + xy(x − y)` over `F_p`, `E = F_{p³}`.
pub fn build_padic_special_fiber(p: u64) -> InstanceResult<NamedInstance> {
    let fp = FieldSpec::prime(p)?;
    let e = FieldSpec::finite_extension(&fp, 3, "b")?;
    let action = frobenius_action(&e)?;
    let ring = uvwxy(&fp);
    let f = norm_form(&action, &ring)?.add(&xy_x_minus_y(&ring));
    Ok(NamedInstance {
        tag: InstanceTag::PadicCubicSpecialFiber,
        hypersurface: ProjectiveHypersurface::new(f)?,
        provenance: json!({
            "p": p,
            "residue_extension": e.descriptor(),
            "note": "only the special fiber is modeled; the lift and the uniformizer are not",
        }),
    })
}

/// Convenience map for substitutions keyed by variable name.
pub fn var_map(pairs: &[(&str, MultiPoly)]) -> BTreeMap<String, MultiPoly> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conic_parametrization_identity() {
        let f = FieldSpec::prime(101).unwrap();
        let ring = PolyRing::new(&f, &["z0", "z1", "z2"]).unwrap();
        let bring = PolyRing::new(&f, &["s", "t"]).unwrap();
        let z = |i| MultiPoly::var(&ring, i);
        let (s, t) = (MultiPoly::var(&bring, 0), MultiPoly::var(&bring, 1));
        let alpha = z(0).mul(&z(2)).sub(&z(1).pow(2));
        let back = alpha.substitute_all(&[s.pow(2), s.mul(&t), t.pow(2)], &bring).unwrap();
        assert!(back.is_zero());
    }

    #[test]
    fn rational_norm_has_integer_coefficients() {
        let q = FieldSpec::rationals();
        let m = vec![q.from_i64(-1), q.from_i64(-2), q.from_i64(1), q.from_i64(1)];
        let k = FieldSpec::extension(&q, m, "theta").unwrap();
        let th = k.generator().unwrap();
        let image = k.sub(&k.square(&th), &k.from_i64(2));
        let act = crate::field::make_galois_action(&k, image, 3).unwrap();
        let inst = build_brauer_cubic(&act).unwrap();
        let eq = inst.hypersurface.equation();
        assert_eq!(eq.total_degree(), Some(3));
        // u^3 coefficient is the norm of 1
        assert!(q.is_one(&eq.coefficient(&Monomial::from_exps(&[3, 0, 0, 0, 0]))));
        for (_, c) in eq.terms() {
            let crate::field::FieldElement::Rational(r) = c else { panic!() };
            assert!(r.is_integer());
        }
        // relabeling theta by a conjugate gives the same polynomial
        let sigma_th = act.apply(&th);
        let act2 = crate::field::make_galois_action(&k, act.apply(&sigma_th), 3).unwrap();
        assert_eq!(build_brauer_cubic(&act2).unwrap().hypersurface.equation(), eq);
    }

    #[test]
    fn f8_norm_lands_in_f2() {
        let inst = build_padic_special_fiber(2).unwrap();
        assert_eq!(inst.hypersurface.degree(), 3);
        assert_eq!(inst.hypersurface.ambient_dim(), 4);
    }
}
