//! Rule engine for CH0-triviality of fibers. Every acceptance is backed by a
//! certificate that is re-checked here by exact polynomial identities or ideal
//! membership; a rejection only means no rule applied.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::field::{FieldElement, FieldSpec};
use crate::groebner::{Engine, Ideal, IdealResult};
use crate::linalg;
use crate::poly::{MultiPoly, Ring};
use crate::quadric;
use crate::variety;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertError {
    #[error("point has {got} coordinates, fiber has {want}")]
    FieldMismatch { got: usize, want: usize },
    #[error("denominator vanishes identically")]
    DenominatorVanishesIdentically,
    #[error("incomplete catalog, uncovered strata: {0:?}")]
    IncompleteCatalog(Vec<String>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiberClass {
    Point,
    SmoothConic,
    /// Plane conic of rank at most 2 (line pair or double line).
    DegenerateConic,
    /// Conics over the closed points of an open subset of a base curve.
    ConicFamily,
    SplitQuadricSurface,
    RationalSurface,
    Union,
}

#[derive(Clone, Debug)]
pub struct FiberDescriptor {
    pub class: FiberClass,
    /// All in one ring over the residue field (possibly a function field).
    pub equations: Vec<MultiPoly>,
    /// Equations are homogeneous in the fiber coordinates.
    pub projective: bool,
    /// Base-curve variables (only for conic families).
    pub base_vars: Vec<usize>,
    /// Closed subset of the base not covered by a conic family.
    pub excluded: Option<MultiPoly>,
    pub components: Vec<FiberDescriptor>,
    pub note: String,
}

impl FiberDescriptor {
    pub fn new(class: FiberClass, equations: Vec<MultiPoly>, projective: bool) -> Self {
        FiberDescriptor { class, equations, projective, base_vars: vec![], excluded: None, components: vec![], note: String::new() }
    }

    pub fn ring(&self) -> &Ring {
        self.equations[0].ring()
    }

    pub fn field(&self) -> &FieldSpec {
        &self.ring().field
    }

    pub fn fiber_vars(&self) -> Vec<usize> {
        (0..self.ring().arity()).filter(|i| !self.base_vars.contains(i)).collect()
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.note = note.to_string();
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "class": self.class,
            "residue_field": self.field().name(),
            "vars": self.ring().vars,
            "equations": self.equations.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "projective": self.projective,
            "base_vars": self.base_vars.iter().map(|&i| self.ring().vars[i].clone()).collect::<Vec<_>>(),
            "excluded": self.excluded.as_ref().map(|e| e.to_string()),
            "components": self.components.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            "note": self.note,
        })
    }
}

/// A rational map given coordinatewise as `num / den`.
#[derive(Clone, Debug)]
pub struct RationalMap {
    /// Source coordinates (projective or affine).
    pub source: Ring,
    pub source_projective: bool,
    /// Images of the fiber coordinates, in the source ring.
    pub phi: Vec<(MultiPoly, MultiPoly)>,
    /// Images of the source coordinates, in the fiber ring.
    pub psi: Vec<(MultiPoly, MultiPoly)>,
}

impl RationalMap {
    pub fn to_json(&self) -> Value {
        let show = |v: &[(MultiPoly, MultiPoly)]| -> Vec<Value> {
            v.iter().map(|(n, d)| json!({"num": n.to_string(), "den": d.to_string()})).collect()
        };
        json!({
            "source_vars": self.source.vars,
            "source_projective": self.source_projective,
            "phi": show(&self.phi),
            "psi": show(&self.psi),
        })
    }
}

#[derive(Clone, Debug)]
pub enum Certificate {
    RationalPoint(Vec<FieldElement>),
    /// Polynomial coordinates in the base variables of a conic family.
    Section(Vec<MultiPoly>),
    ConicParametrization(RationalMap),
    QuadricSplitness { point: Vec<FieldElement>, direction: Vec<FieldElement> },
    UnionGlue { components: Vec<Option<Certificate>>, intersections: Vec<(usize, usize, Option<Vec<FieldElement>>)> },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::RationalPoint(_) => "rational-point",
            Certificate::Section(_) => "section",
            Certificate::ConicParametrization(_) => "conic-parametrization",
            Certificate::QuadricSplitness { .. } => "quadric-splitness",
            Certificate::UnionGlue { .. } => "union-glue",
        }
    }

    pub fn to_json(&self, field: &FieldSpec) -> Value {
        let pt = |v: &[FieldElement]| -> Vec<Value> { v.iter().map(|c| field.element_to_json(c)).collect() };
        match self {
            Certificate::RationalPoint(v) => json!({"kind": self.kind(), "point": pt(v)}),
            Certificate::Section(v) => json!({"kind": self.kind(), "coords": v.iter().map(|c| c.to_string()).collect::<Vec<_>>()}),
            Certificate::ConicParametrization(m) => json!({"kind": self.kind(), "map": m.to_json()}),
            Certificate::QuadricSplitness { point, direction } => {
                json!({"kind": self.kind(), "point": pt(point), "direction": pt(direction)})
            }
            Certificate::UnionGlue { components, intersections } => json!({
                "kind": self.kind(),
                "components": components.iter().map(|c| c.as_ref().map(|c| c.to_json(field))).collect::<Vec<_>>(),
                "intersections": intersections.iter().map(|(i, j, p)| json!({"pair": [i, j], "point": p.as_ref().map(|p| pt(p))})).collect::<Vec<_>>(),
            }),
        }
    }

    /// Number of removable certificate pieces (for mutation testing).
    pub fn pieces(&self) -> usize {
        match self {
            Certificate::UnionGlue { components, intersections } => {
                1 + components.iter().map(|c| c.as_ref().map_or(0, |c| c.pieces())).sum::<usize>() + intersections.len()
            }
            _ => 1,
        }
    }

    /// Removes the `k`-th piece (pre-order); piece 0 is the certificate itself.
    pub fn without_piece(&self, k: usize) -> Option<Certificate> {
        if k == 0 {
            return None;
        }
        let mut c = self.clone();
        if let Certificate::UnionGlue { components, intersections } = &mut c {
            let mut k = k - 1;
            for slot in components.iter_mut() {
                let n = slot.as_ref().map_or(0, |c| c.pieces());
                if k < n {
                    *slot = slot.as_ref().unwrap().without_piece(k);
                    return Some(c);
                }
                k -= n;
            }
            if k < intersections.len() {
                intersections[k].2 = None;
            }
        }
        Some(c)
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Verdict {
    pub accepted: bool,
    pub rule: String,
    pub reason: String,
}

impl Verdict {
    fn ok(rule: &str) -> Self {
        Verdict { accepted: true, rule: rule.into(), reason: "all checks passed".into() }
    }

    fn no(rule: &str, reason: impl Into<String>) -> Self {
        Verdict { accepted: false, rule: rule.into(), reason: reason.into() }
    }
}

fn all_vanish(eqs: &[MultiPoly], pt: &[FieldElement], f: &FieldSpec) -> bool {
    eqs.iter().all(|e| e.evaluate(pt, f).map(|v| f.is_zero(&v)).unwrap_or(false))
}

/// Equations vanish at `pt`; when `smooth` is set, some partial of the (single)
/// equation is nonzero there.
pub fn verify_rational_point(desc: &FiberDescriptor, pt: &[FieldElement], smooth: bool) -> Result<bool, CertError> {
    let n = desc.ring().arity();
    if pt.len() != n {
        return Err(CertError::FieldMismatch { got: pt.len(), want: n });
    }
    let f = desc.field();
    if desc.projective && !quadric::nonzero(f, pt) {
        return Ok(false);
    }
    if !all_vanish(&desc.equations, pt, f) {
        return Ok(false);
    }
    if smooth {
        let g = &desc.equations[0];
        let grad_nonzero = g.gradient().iter().any(|d| d.evaluate(pt, f).map(|v| !f.is_zero(&v)).unwrap_or(false));
        return Ok(grad_nonzero);
    }
    Ok(true)
}

/// Cleared form of a map: coordinate `i` is `nums[i] / D` when `cleared[i]`,
/// and the polynomial `nums[i]` otherwise.
struct Cleared {
    nums: Vec<MultiPoly>,
    cleared: Vec<bool>,
    d: MultiPoly,
}

impl Cleared {
    /// Degree of `g` in the cleared coordinates.
    fn degree(&self, g: &MultiPoly) -> u32 {
        g.terms()
            .iter()
            .map(|(m, _)| (0..self.nums.len()).filter(|&i| self.cleared[i]).map(|i| m.exp(i)).sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// `g(phi) * D^degree(g)` as a polynomial in the source ring.
    fn eval(&self, g: &MultiPoly) -> MultiPoly {
        let src = self.d.ring();
        let deg = self.degree(g);
        let mut acc = MultiPoly::zero(src);
        let mut dpow: Vec<MultiPoly> = vec![MultiPoly::one(src)];
        let mut npow: Vec<Vec<MultiPoly>> = self.nums.iter().map(|n| vec![MultiPoly::one(src), n.clone()]).collect();
        for (m, c) in g.terms() {
            let mut t = MultiPoly::constant(src, src.field.embed(g.field(), c).expect("same field"));
            let mut used = 0;
            for (i, pw) in npow.iter_mut().enumerate() {
                let e = m.exp(i) as usize;
                while pw.len() <= e {
                    let next = pw.last().unwrap().mul(&self.nums[i]);
                    pw.push(next);
                }
                if e > 0 {
                    t = t.mul(&pw[e]);
                }
                if self.cleared[i] {
                    used += e as u32;
                }
            }
            let e = (deg - used) as usize;
            while dpow.len() <= e {
                let next = dpow.last().unwrap().mul(&self.d);
                dpow.push(next);
            }
            acc = acc.add(&t.mul(&dpow[e]));
        }
        acc
    }
}

/// Common-denominator form of the coordinates of `phi`.
fn common_denominator(phi: &[(MultiPoly, MultiPoly)]) -> Result<Cleared, CertError> {
    let mut dens: Vec<MultiPoly> = vec![];
    for (_, d) in phi {
        if d.is_zero() {
            return Err(CertError::DenominatorVanishesIdentically);
        }
        if !d.is_constant() && !dens.contains(d) {
            dens.push(d.clone());
        }
    }
    let src = phi[0].1.ring();
    let big = dens.iter().fold(MultiPoly::one(src), |a, d| a.mul(d));
    let nums = phi
        .iter()
        .map(|(n, d)| {
            if d.is_constant() {
                n.scale(&src.field.inv(&d.constant_term()).unwrap())
            } else {
                n.mul(&big.exact_divide(d).expect("d divides the product"))
            }
        })
        .collect();
    let cleared = phi.iter().map(|(_, d)| !d.is_constant()).collect();
    Ok(Cleared { nums, cleared, d: big })
}

/// (a) fiber equations vanish identically on `phi`; (b) `psi o phi` is the
/// identity (projectively, when the source is projective) as cross-multiplied
/// polynomial identities.
pub fn verify_parametrization(desc: &FiberDescriptor, map: &RationalMap) -> Result<bool, CertError> {
    let n = desc.ring().arity();
    if map.phi.len() != n || map.psi.len() != map.source.arity() {
        return Ok(false);
    }
    let cl = common_denominator(&map.phi)?;
    if cl.nums.iter().all(|x| x.is_zero()) {
        return Ok(false);
    }
    for g in &desc.equations {
        if !cl.eval(g).is_zero() {
            return Ok(false);
        }
    }
    let mut comp = vec![];
    for (pn, pd) in &map.psi {
        if pd.is_zero() {
            return Err(CertError::DenominatorVanishesIdentically);
        }
        let a = cl.eval(pn).mul(&cl.d.pow(cl.degree(pd)));
        let b = cl.eval(pd).mul(&cl.d.pow(cl.degree(pn)));
        if b.is_zero() {
            return Err(CertError::DenominatorVanishesIdentically);
        }
        comp.push((a, b));
    }
    let s = |j: usize| MultiPoly::var(&map.source, j);
    if map.source_projective {
        if comp.iter().all(|(a, _)| a.is_zero()) {
            return Ok(false);
        }
        for j in 0..comp.len() {
            for k in j + 1..comp.len() {
                let lhs = comp[j].0.mul(&comp[k].1).mul(&s(k));
                let rhs = comp[k].0.mul(&comp[j].1).mul(&s(j));
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    } else {
        for (j, (a, b)) in comp.iter().enumerate() {
            if *a != b.mul(&s(j)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn is_quadratic_form(g: &MultiPoly, vars: &[usize]) -> bool {
    g.terms().iter().all(|(m, _)| vars.iter().map(|&v| m.exp(v)).sum::<u32>() == 2)
}

fn smooth_projective(engine: &Engine, g: &MultiPoly) -> IdealResult<bool> {
    let mut gens = vec![g.clone()];
    gens.extend(g.gradient());
    let charts: Vec<usize> = (0..g.ring().arity()).collect();
    variety::projectively_empty(engine, &gens, &charts)
}

fn certify_conic_family(engine: &Engine, desc: &FiberDescriptor, coords: &[MultiPoly]) -> IdealResult<Verdict> {
    let rule = "conic-family-section";
    let fib = desc.fiber_vars();
    let Some(excluded) = &desc.excluded else { return Ok(Verdict::no(rule, "no excluded locus declared")) };
    if desc.equations.len() != 1 || fib.len() != 3 || coords.len() != 3 {
        return Ok(Verdict::no(rule, "not a family of plane conics"));
    }
    let q = &desc.equations[0];
    if !is_quadratic_form(q, &fib) {
        return Ok(Verdict::no(rule, "equation is not quadratic in the fiber coordinates"));
    }
    if coords.iter().any(|c| fib.iter().any(|&v| c.uses_var(v))) {
        return Ok(Verdict::no(rule, "section depends on fiber coordinates"));
    }
    if !quadric::eval_form(q, &fib, coords).is_zero() {
        return Ok(Verdict::no(rule, "section does not lie on the family"));
    }
    let ring = desc.ring();
    if !engine.radical_membership(excluded, &Ideal::new(ring, coords.to_vec())?)? {
        return Ok(Verdict::no(rule, "section coordinates vanish simultaneously outside the excluded locus"));
    }
    let mut gens = vec![q.clone()];
    gens.extend(fib.iter().map(|&v| q.partial_derivative(v)));
    for &v in &fib {
        let chart = Ideal::new(ring, gens.clone())?.with(&[MultiPoly::var(ring, v).sub(&MultiPoly::one(ring))])?;
        if !engine.radical_membership(excluded, &chart)? {
            return Ok(Verdict::no(rule, "singular fibers outside the excluded locus"));
        }
    }
    Ok(Verdict::ok(rule))
}

/// Decides one catalog entry.
pub fn certify_fiber(engine: &Engine, desc: &FiberDescriptor, cert: Option<&Certificate>) -> IdealResult<Verdict> {
    let Some(cert) = cert else {
        return Ok(Verdict::no("none", "no certificate: no degree-1 zero-cycle evidence"));
    };
    let f = desc.field();
    use Certificate as C;
    use FiberClass as K;
    match (desc.class, cert) {
        (K::Point, C::RationalPoint(pt)) => {
            let rule = "reduced-rational-point";
            if desc.projective || !matches!(verify_rational_point(desc, pt, false), Ok(true)) {
                return Ok(Verdict::no(rule, "point does not satisfy the equations"));
            }
            let ideal = Ideal::new(desc.ring(), desc.equations.clone())?;
            if engine.quotient_dimension(&ideal)? != 1 {
                return Ok(Verdict::no(rule, "fiber is not a single reduced rational point"));
            }
            Ok(Verdict::ok(rule))
        }
        (K::SmoothConic, C::RationalPoint(_) | C::ConicParametrization(_)) => {
            let rule = "smooth-conic-with-point";
            let q = &desc.equations[0];
            let all: Vec<usize> = (0..desc.ring().arity()).collect();
            if desc.equations.len() != 1 || all.len() != 3 || !desc.projective || !is_quadratic_form(q, &all) {
                return Ok(Verdict::no(rule, "not a plane conic"));
            }
            if !smooth_projective(engine, q)? {
                return Ok(Verdict::no(rule, "conic is singular"));
            }
            let good = match cert {
                C::RationalPoint(pt) => matches!(verify_rational_point(desc, pt, true), Ok(true)),
                C::ConicParametrization(m) => matches!(verify_parametrization(desc, m), Ok(true)),
                _ => unreachable!(),
            };
            Ok(if good { Verdict::ok(rule) } else { Verdict::no(rule, "certificate check failed") })
        }
        (K::DegenerateConic, C::RationalPoint(pt)) => {
            let rule = "degenerate-conic-rational-vertex";
            let q = &desc.equations[0];
            let all: Vec<usize> = (0..desc.ring().arity()).collect();
            if desc.equations.len() != 1 || all.len() != 3 || !desc.projective || q.is_zero() || !is_quadratic_form(q, &all) {
                return Ok(Verdict::no(rule, "not a plane conic"));
            }
            let mut eqs = vec![q.clone()];
            eqs.extend(q.gradient());
            let vertex = pt.len() == 3 && quadric::nonzero(f, pt) && all_vanish(&eqs, pt, f);
            Ok(if vertex { Verdict::ok(rule) } else { Verdict::no(rule, "point is not a singular point of the conic") })
        }
        (K::ConicFamily, C::Section(coords)) => certify_conic_family(engine, desc, coords),
        (K::SplitQuadricSurface, C::QuadricSplitness { point, direction }) => {
            let rule = "split-quadric";
            let q = &desc.equations[0];
            let all: Vec<usize> = (0..desc.ring().arity()).collect();
            if desc.equations.len() != 1 || all.len() != 4 || !desc.projective || !is_quadratic_form(q, &all) {
                return Ok(Verdict::no(rule, "not a quadric surface"));
            }
            if quadric::polar_rank(q, &all) != 4 {
                return Ok(Verdict::no(rule, "rank is not 4"));
            }
            if point.len() != 4 || direction.len() != 4 {
                return Ok(Verdict::no(rule, "wrong number of coordinates"));
            }
            let r = desc.ring();
            let pc: Vec<MultiPoly> = point.iter().map(|c| MultiPoly::constant(r, c.clone())).collect();
            let dc: Vec<MultiPoly> = direction.iter().map(|c| MultiPoly::constant(r, c.clone())).collect();
            let on = quadric::eval_form(q, &all, &pc).is_zero()
                && quadric::eval_form(q, &all, &dc).is_zero()
                && quadric::polar(q, &all, &pc, &dc).is_zero();
            let independent = linalg::rank(f, &vec![point.clone(), direction.clone()]) == 2;
            Ok(if on && independent { Verdict::ok(rule) } else { Verdict::no(rule, "line not contained in the quadric") })
        }
        (K::RationalSurface, C::ConicParametrization(m)) => {
            let rule = "birational-parametrization";
            Ok(match verify_parametrization(desc, m) {
                Ok(true) => Verdict::ok(rule),
                Ok(false) => Verdict::no(rule, "parametrization identities fail"),
                Err(e) => Verdict::no(rule, e.to_string()),
            })
        }
        (K::Union, C::UnionGlue { components, intersections }) => certify_union(engine, desc, components, intersections),
        (class, c) => Ok(Verdict::no("none", format!("no rule accepts class {class:?} with a {} certificate", c.kind()))),
    }
}

fn certify_union(
    engine: &Engine,
    desc: &FiberDescriptor,
    certs: &[Option<Certificate>],
    intersections: &[(usize, usize, Option<Vec<FieldElement>>)],
) -> IdealResult<Verdict> {
    let rule = "union-with-rational-intersections";
    let comps = &desc.components;
    if comps.len() < 2 || certs.len() != comps.len() {
        return Ok(Verdict::no(rule, "component and certificate counts differ"));
    }
    // V(fiber) = union of V(component)
    let ring = desc.ring();
    let mut product = Ideal::new(ring, vec![MultiPoly::one(ring)])?;
    for c in comps {
        let ci = Ideal::new(ring, c.equations.clone())?;
        for g in &desc.equations {
            if !engine.radical_membership(g, &ci)? {
                return Ok(Verdict::no(rule, "component not contained in the fiber"));
            }
        }
        product = product.product(&ci)?;
    }
    let fiber = Ideal::new(ring, desc.equations.clone())?;
    for g in product.gens() {
        if !engine.radical_membership(g, &fiber)? {
            return Ok(Verdict::no(rule, "components do not cover the fiber"));
        }
    }
    for (i, (c, cert)) in comps.iter().zip(certs).enumerate() {
        let v = certify_fiber(engine, c, cert.as_ref())?;
        if !v.accepted {
            return Ok(Verdict::no(rule, format!("component {i}: {}", v.reason)));
        }
    }
    for i in 0..comps.len() {
        for j in i + 1..comps.len() {
            let found = intersections.iter().find(|(a, b, _)| (*a, *b) == (i, j));
            let Some((_, _, Some(pt))) = found else {
                return Ok(Verdict::no(rule, format!("no rational point certificate on component intersection {i}, {j}")));
            };
            let ok = [i, j].iter().all(|&k| matches!(verify_rational_point(&comps[k], pt, false), Ok(true)));
            if !ok {
                return Ok(Verdict::no(rule, format!("intersection point {i}, {j} fails")));
            }
        }
    }
    Ok(Verdict::ok(rule))
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub stratum: String,
    pub descriptor: FiberDescriptor,
    pub certificate: Option<Certificate>,
}

impl CatalogEntry {
    pub fn to_json(&self) -> Value {
        json!({
            "stratum": self.stratum,
            "descriptor": self.descriptor.to_json(),
            "certificate": self.certificate.as_ref().map(|c| c.to_json(self.descriptor.field())),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryVerdict {
    pub stratum: String,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct MorphismVerdict {
    pub certified: bool,
    pub uncovered: Vec<String>,
    pub entries: Vec<EntryVerdict>,
    pub evidence: Vec<String>,
}

/// Certifies every entry (in parallel) and checks the catalog covers `strata`.
pub fn certify_morphism(engine: &Engine, strata: &[String], catalog: &[CatalogEntry]) -> IdealResult<MorphismVerdict> {
    let entries = catalog
        .par_iter()
        .map(|e| {
            Ok(EntryVerdict {
                stratum: e.stratum.clone(),
                verdict: certify_fiber(engine, &e.descriptor, e.certificate.as_ref())?,
            })
        })
        .collect::<IdealResult<Vec<_>>>()?;
    let uncovered: Vec<String> = strata.iter().filter(|s| !catalog.iter().any(|e| &e.stratum == *s)).cloned().collect();
    let certified = uncovered.is_empty() && entries.iter().all(|e| e.verdict.accepted);
    let mut evidence: Vec<String> = entries
        .iter()
        .map(|e| format!("{}: {} ({})", e.stratum, if e.verdict.accepted { "certified" } else { "rejected" }, e.verdict.rule))
        .collect();
    evidence.push("stratum list completeness is asserted by the resolution pipeline".into());
    Ok(MorphismVerdict { certified, uncovered, entries, evidence })
}

/// `IncompleteCatalog` as an error, for callers that want it.
pub fn require_complete(v: &MorphismVerdict) -> Result<(), CertError> {
    if v.uncovered.is_empty() {
        Ok(())
    } else {
        Err(CertError::IncompleteCatalog(v.uncovered.clone()))
    }
}

/// Every single-certificate deletion; returns the indices (entry, piece) whose
/// removal did not flip an accepted catalog to rejected.
pub fn mutation_survivors(engine: &Engine, strata: &[String], catalog: &[CatalogEntry]) -> IdealResult<Vec<(usize, usize)>> {
    let mut jobs = vec![];
    for (i, e) in catalog.iter().enumerate() {
        if let Some(c) = &e.certificate {
            for k in 0..c.pieces() {
                jobs.push((i, k));
            }
        }
    }
    let survivors = jobs
        .par_iter()
        .map(|&(i, k)| {
            let mut mutated = catalog.to_vec();
            mutated[i].certificate = mutated[i].certificate.as_ref().unwrap().without_piece(k);
            let v = certify_morphism(engine, strata, &mutated)?;
            Ok(if v.certified { Some((i, k)) } else { None })
        })
        .collect::<IdealResult<Vec<_>>>()?;
    Ok(survivors.into_iter().flatten().collect())
}

/// Builds `num / 1` pairs.
pub fn polynomial_map(polys: Vec<MultiPoly>) -> Vec<(MultiPoly, MultiPoly)> {
    polys
        .into_iter()
        .map(|p| {
            let one = MultiPoly::one(p.ring());
            (p, one)
        })
        .collect()
}

/// Parametrization of a projective quadric from a point on it, as a certificate.
/// The source ring reuses the fiber variable names other than the omitted one.
pub fn quadric_parametrization(q: &MultiPoly, point: &[FieldElement]) -> Option<RationalMap> {
    let ring = q.ring();
    let all: Vec<usize> = (0..ring.arity()).collect();
    let pc: Vec<MultiPoly> = point.iter().map(|c| MultiPoly::constant(ring, c.clone())).collect();
    let par = quadric::parametrize(q, &all, &pc)?;
    let names: Vec<String> = (0..ring.arity()).filter(|&k| k != par.omit).map(|k| format!("s_{}", ring.vars[k])).collect();
    let src = crate::poly::PolyRing::from_names(&ring.field, names).ok()?;
    // phi lives in the ring with fiber variables; move it to the source ring
    let images: Vec<MultiPoly> = (0..ring.arity())
        .map(|k| match k.cmp(&par.omit) {
            std::cmp::Ordering::Less => MultiPoly::var(&src, k),
            std::cmp::Ordering::Equal => MultiPoly::zero(&src),
            std::cmp::Ordering::Greater => MultiPoly::var(&src, k - 1),
        })
        .collect();
    let phi: Vec<MultiPoly> = par.phi.iter().map(|p| p.substitute_all(&images, &src).unwrap()).collect();
    Some(RationalMap { source: src, source_projective: true, phi: polynomial_map(phi), psi: polynomial_map(par.psi) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::ring_of;

    fn conic(f: &FieldSpec) -> (Ring, MultiPoly) {
        let r = ring_of(f, &["u", "v", "w"]);
        let v = |i| MultiPoly::var(&r, i);
        let q = v(0).mul(&v(1)).sub(&v(2).pow(2));
        (r, q)
    }

    #[test]
    fn points_on_uv_w2() {
        let f = FieldSpec::prime(7).unwrap();
        let (_, q) = conic(&f);
        let d = FiberDescriptor::new(FiberClass::SmoothConic, vec![q], true);
        let p = |a: i64, b: i64, c: i64| vec![f.from_i64(a), f.from_i64(b), f.from_i64(c)];
        assert!(verify_rational_point(&d, &p(1, 1, 1), true).unwrap());
        assert!(!verify_rational_point(&d, &p(1, 0, 1), true).unwrap());
        assert!(verify_rational_point(&d, &p(1, 0, 0)[..2], false).is_err());
    }

    #[test]
    fn conic_parametrization_and_wrong_inverse() {
        // yz = x^2 with phi(s, t) = (st, s^2, t^2), psi(x, y, z) = (y, x)
        let f = FieldSpec::prime(11).unwrap();
        let r = ring_of(&f, &["x", "y", "z"]);
        let v = |i| MultiPoly::var(&r, i);
        let q = v(1).mul(&v(2)).sub(&v(0).pow(2));
        let d = FiberDescriptor::new(FiberClass::SmoothConic, vec![q], true);
        let src = ring_of(&f, &["s", "t"]);
        let s = MultiPoly::var(&src, 0);
        let t = MultiPoly::var(&src, 1);
        let phi = polynomial_map(vec![s.mul(&t), s.pow(2), t.pow(2)]);
        let good = RationalMap { source: src.clone(), source_projective: true, phi: phi.clone(), psi: polynomial_map(vec![v(1), v(0)]) };
        assert!(verify_parametrization(&d, &good).unwrap());
        // (x, z) also inverts phi: (st, t^2) = t (s, t)
        let also = RationalMap { source: src.clone(), source_projective: true, phi: phi.clone(), psi: polynomial_map(vec![v(0), v(2)]) };
        assert!(verify_parametrization(&d, &also).unwrap());
        let bad = RationalMap { source: src, source_projective: true, phi, psi: polynomial_map(vec![v(2), v(0)]) };
        assert!(!verify_parametrization(&d, &bad).unwrap());
        let e = Engine::default();
        assert!(certify_fiber(&e, &d, Some(&Certificate::ConicParametrization(good))).unwrap().accepted);
        assert!(!certify_fiber(&e, &d, None).unwrap().accepted);
    }

    #[test]
    fn segre_quadric() {
        // xw - yz parametrized by P1 x P1 through the affine chart (a, b) -> (1, b, a, ab)
        let f = FieldSpec::prime(13).unwrap();
        let r = ring_of(&f, &["x", "y", "z", "w"]);
        let v = |i| MultiPoly::var(&r, i);
        let q = v(0).mul(&v(3)).sub(&v(1).mul(&v(2)));
        let d = FiberDescriptor::new(FiberClass::RationalSurface, vec![q.clone()], true);
        let src = ring_of(&f, &["a", "b"]);
        let (a, b) = (MultiPoly::var(&src, 0), MultiPoly::var(&src, 1));
        let one = MultiPoly::one(&src);
        let phi = polynomial_map(vec![one, b.clone(), a.clone(), a.mul(&b)]);
        let psi = vec![(v(2), v(0)), (v(1), v(0))];
        let m = RationalMap { source: src, source_projective: false, phi, psi };
        assert!(verify_parametrization(&d, &m).unwrap());
        let e = Engine::default();
        assert!(certify_fiber(&e, &d, Some(&Certificate::ConicParametrization(m))).unwrap().accepted);
        // the same quadric is split: a line through (1,0,0,0)
        let sq = FiberDescriptor::new(FiberClass::SplitQuadricSurface, vec![q], true);
        let z = f.zero();
        let o = f.one();
        let cert = Certificate::QuadricSplitness { point: vec![o.clone(), z.clone(), z.clone(), z.clone()], direction: vec![z.clone(), o.clone(), z.clone(), z.clone()] };
        assert!(certify_fiber(&e, &sq, Some(&cert)).unwrap().accepted);
        let wrong = Certificate::QuadricSplitness { point: vec![o.clone(), z.clone(), z.clone(), z.clone()], direction: vec![z.clone(), z.clone(), z.clone(), o] };
        assert!(!certify_fiber(&e, &sq, Some(&wrong)).unwrap().accepted);
    }
}
