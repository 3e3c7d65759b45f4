//! Singularities of projective hypersurfaces via affine charts.
//!
//! A chart `z_i = 1` only counts the points with `z_j = 0` for every `j < i`,
//! so chart contributions can be summed without double counting: adding
//! `z_j^N` (N at least the local length) kills exactly the points where `z_j`
//! is a unit.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::field::{make_field, FieldDescriptor, FieldElement, FieldSpec};
use crate::groebner::{Engine, Ideal, IdealError, IdealResult};
use crate::poly::{Homogeneity, Monomial, MultiPoly, PolyError, PolyRing, Ring};
use crate::zerodim::{self, degree_profile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VarietyError {
    #[error("equation is not homogeneous")]
    NotHomogeneous,
    #[error("equation is zero")]
    ZeroEquation,
    #[error("malformed hypersurface: {0}")]
    Parse(String),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub type VarietyResult<T> = Result<T, VarietyError>;

impl From<crate::field::FieldError> for VarietyError {
    fn from(e: crate::field::FieldError) -> Self {
        VarietyError::Ideal(e.into())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveHypersurface {
    equation: MultiPoly,
    degree: u32,
}

impl ProjectiveHypersurface {
    pub fn new(equation: MultiPoly) -> VarietyResult<Self> {
        if equation.is_zero() {
            return Err(VarietyError::ZeroEquation);
        }
        match equation.homogeneity() {
            Homogeneity::Homogeneous(degree) => Ok(ProjectiveHypersurface { equation, degree }),
            Homogeneity::Inhomogeneous => Err(VarietyError::NotHomogeneous),
        }
    }

    pub fn equation(&self) -> &MultiPoly {
        &self.equation
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Dimension of the ambient projective space.
    pub fn ambient_dim(&self) -> usize {
        self.equation.ring().arity() - 1
    }

    pub fn field(&self) -> &FieldSpec {
        self.equation.field()
    }

    pub fn chart(&self, i: usize) -> MultiPoly {
        chart_poly(&self.equation, i)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "field": self.field().descriptor(),
            "equation": self.equation.to_json(),
        })
    }

    pub fn from_json(v: &Value) -> VarietyResult<Self> {
        let desc: FieldDescriptor = serde_json::from_value(
            v.get("field").cloned().ok_or_else(|| VarietyError::Parse("missing field".into()))?,
        )
        .map_err(|e| VarietyError::Parse(format!("field: {e}")))?;
        let field = make_field(&desc)?;
        let eq = v.get("equation").ok_or_else(|| VarietyError::Parse("missing equation".into()))?;
        Self::new(MultiPoly::from_json(&field, eq)?)
    }
}

/// Ring of the chart `z_i = 1`: the remaining variables, in order.
pub fn chart_ring(ring: &Ring, i: usize) -> Ring {
    let names = ring.vars.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v.clone()).collect();
    PolyRing::from_names(&ring.field, names).expect("smaller arity")
}

/// Dehomogenizes at `z_i` and drops the variable.
pub fn chart_poly(f: &MultiPoly, i: usize) -> MultiPoly {
    let target = chart_ring(f.ring(), i);
    chart_poly_in(f, i, &target)
}

pub fn chart_poly_in(f: &MultiPoly, i: usize, target: &Ring) -> MultiPoly {
    let images: Vec<MultiPoly> = (0..f.ring().arity())
        .map(|j| match j.cmp(&i) {
            std::cmp::Ordering::Less => MultiPoly::var(target, j),
            std::cmp::Ordering::Equal => MultiPoly::one(target),
            std::cmp::Ordering::Greater => MultiPoly::var(target, j - 1),
        })
        .collect();
    f.substitute_all(&images, target).expect("same field")
}

/// `⟨f, ∂f/∂x_1, …, ∂f/∂x_n⟩`.
pub fn jacobian_ideal(f: &MultiPoly) -> Ideal {
    let mut gens = vec![f.clone()];
    gens.extend(f.gradient());
    Ideal::new(f.ring(), gens).expect("same ring")
}

/// Part of a zero-dimensional affine scheme supported on `{x_j = 0 : j in vars}`.
pub fn restrict_to_hyperplanes(engine: &Engine, ideal: &Ideal, vars: &[usize]) -> IdealResult<(Ideal, usize)> {
    let n = engine.quotient_dimension(ideal)?;
    if n == 0 || vars.is_empty() {
        return Ok((ideal.clone(), n));
    }
    let ring = ideal.ring();
    let extra: Vec<MultiPoly> = vars.iter().map(|&j| MultiPoly::var(ring, j).pow(n as u32)).collect();
    let local = ideal.with(&extra)?;
    let d = engine.quotient_dimension(&local)?;
    Ok((local, d))
}

#[derive(Clone, Debug, Serialize)]
pub struct ChartPiece {
    pub chart: usize,
    #[serde(skip)]
    pub ideal: Ideal,
    /// Quotient dimension of the part not seen by earlier charts.
    pub degree: usize,
    pub radical_degree: usize,
    pub zero_dimensional: bool,
}

/// Zero scheme of homogeneous polynomials, measured chart by chart.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectiveScheme {
    pub charts: Vec<ChartPiece>,
    pub zero_dimensional: bool,
    pub degree: Option<usize>,
    pub radical_degree: Option<usize>,
}

impl ProjectiveScheme {
    pub fn is_empty(&self) -> bool {
        self.degree == Some(0)
    }

    pub fn is_reduced(&self) -> bool {
        self.degree.is_some() && self.degree == self.radical_degree
    }
}

fn measure_chart(engine: &Engine, chart: usize, ideal: Ideal) -> IdealResult<ChartPiece> {
    let zero_dimensional = engine.is_zero_dimensional(&ideal)?;
    if !zero_dimensional {
        return Ok(ChartPiece { chart, ideal, degree: 0, radical_degree: 0, zero_dimensional });
    }
    let earlier: Vec<usize> = (0..chart).collect();
    let (local, _) = restrict_to_hyperplanes(engine, &ideal, &earlier)?;
    let (degree, radical_degree) = degree_profile(engine, &local)?;
    Ok(ChartPiece { chart, ideal: local, degree, radical_degree, zero_dimensional })
}

fn assemble(charts: Vec<ChartPiece>) -> ProjectiveScheme {
    let zero_dimensional = charts.iter().all(|c| c.zero_dimensional);
    let (degree, radical_degree) = if zero_dimensional {
        (Some(charts.iter().map(|c| c.degree).sum()), Some(charts.iter().map(|c| c.radical_degree).sum()))
    } else {
        (None, None)
    };
    ProjectiveScheme { charts, zero_dimensional, degree, radical_degree }
}

/// Zero scheme of homogeneous `gens` in projective space.
pub fn projective_scheme(engine: &Engine, gens: &[MultiPoly]) -> IdealResult<ProjectiveScheme> {
    let ring = gens[0].ring().clone();
    let charts = (0..ring.arity())
        .into_par_iter()
        .map(|i| {
            let cr = chart_ring(&ring, i);
            let ideal = Ideal::new(&cr, gens.iter().map(|g| chart_poly_in(g, i, &cr)).collect())?;
            measure_chart(engine, i, ideal)
        })
        .collect::<IdealResult<Vec<_>>>()?;
    Ok(assemble(charts))
}

/// Whether homogeneous `gens` have no common zero in projective space.
pub fn projectively_empty(engine: &Engine, gens: &[MultiPoly], charts: &[usize]) -> IdealResult<bool> {
    let ring = gens[0].ring().clone();
    for &i in charts {
        let cr = chart_ring(&ring, i);
        let ideal = Ideal::new(&cr, gens.iter().map(|g| chart_poly_in(g, i, &cr)).collect())?;
        if !engine.is_unit_ideal(&ideal)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Singular scheme of a hypersurface with per-chart Jacobian ideals.
pub fn singular_scheme(engine: &Engine, h: &ProjectiveHypersurface) -> IdealResult<ProjectiveScheme> {
    let n = h.ambient_dim() + 1;
    let charts = (0..n)
        .into_par_iter()
        .map(|i| measure_chart(engine, i, jacobian_ideal(&h.chart(i))))
        .collect::<IdealResult<Vec<_>>>()?;
    Ok(assemble(charts))
}

/// Determinant of a square polynomial matrix by cofactor expansion.
pub fn poly_det(m: &[Vec<MultiPoly>], ring: &Ring) -> MultiPoly {
    let n = m.len();
    match n {
        0 => MultiPoly::one(ring),
        1 => m[0][0].clone(),
        2 => m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0])),
        _ => {
            let mut acc = MultiPoly::zero(ring);
            for c in 0..n {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<MultiPoly>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = m[0][c].mul(&poly_det(&minor, ring));
                acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

/// Hessian determinant reduced modulo an ideal's Gröbner basis as it is built.
pub fn hessian_det_mod(engine: &Engine, f: &MultiPoly, ideal: &Ideal) -> IdealResult<MultiPoly> {
    let gb = engine.groebner(ideal, crate::poly::MonomialOrder::Grevlex)?;
    let hess = f.hessian();
    let reduced = hess
        .iter()
        .map(|row| row.iter().map(|e| gb.normal_form(e)).collect::<IdealResult<Vec<_>>>())
        .collect::<IdealResult<Vec<_>>>()?;
    gb.normal_form(&poly_det(&reduced, f.ring()))
}

#[derive(Clone, Debug, Serialize)]
pub struct OdpPoint {
    pub chart: usize,
    pub degree: usize,
    pub hessian_nonzero: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OdpChart {
    pub chart: usize,
    pub degree: usize,
    pub radical_degree: usize,
    pub reduced: bool,
    pub hessian_unit: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OdpReport {
    pub charts: Vec<OdpChart>,
    pub points: Vec<OdpPoint>,
    pub total_degree: usize,
    pub all_odp: bool,
}

/// ODP verdict: the singular scheme is reduced and the Hessian determinant is a
/// unit modulo it, chart by chart. Over finite fields the closed points are
/// also listed with a pointwise Hessian check.
pub fn classify_odp(
    engine: &Engine,
    h: &ProjectiveHypersurface,
    scheme: &ProjectiveScheme,
) -> IdealResult<OdpReport> {
    if !scheme.zero_dimensional {
        return Err(IdealError::NotZeroDimensional);
    }
    let mut charts = vec![];
    let mut points = vec![];
    for piece in scheme.charts.iter().filter(|c| c.degree > 0) {
        let f = h.chart(piece.chart);
        let det = hessian_det_mod(engine, &f, &piece.ideal)?;
        let hessian_unit = engine.is_unit_ideal(&piece.ideal.with(&[det.clone()])?)?;
        charts.push(OdpChart {
            chart: piece.chart,
            degree: piece.degree,
            radical_degree: piece.radical_degree,
            reduced: piece.degree == piece.radical_degree,
            hessian_unit,
        });
        if h.field().is_finite() {
            let rad = zerodim::radical(engine, &piece.ideal)?;
            for pt in zerodim::split_points(engine, &rad, piece.chart as u64)? {
                let v = det.evaluate(pt.representative(), &pt.residue_field)?;
                points.push(OdpPoint {
                    chart: piece.chart,
                    degree: pt.degree,
                    hessian_nonzero: !pt.residue_field.is_zero(&v),
                });
            }
        }
    }
    let all_odp = charts.iter().all(|c| c.reduced && c.hessian_unit);
    Ok(OdpReport { charts, points, total_degree: scheme.degree.unwrap_or(0), all_odp })
}

/// Per-condition outcome of the hyperplane genericity hypothesis.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct GenericityReport {
    /// `z0 = 0` misses `M \ {P0}`.
    pub avoids_m: bool,
    /// `z0 = 0` misses `A ∩ (E1 ∪ E2)`.
    pub avoids_tangency: bool,
    /// `z0 = 0` is not tangent to `A`.
    pub transverse_to_conic: bool,
}

impl GenericityReport {
    pub fn passed(&self) -> bool {
        self.avoids_m && self.avoids_tangency && self.transverse_to_conic
    }
}

/// Quartic `α z3² + β z3 + γ` in `P³` from ternary forms.
pub fn quartic_surface(alpha: &MultiPoly, beta: &MultiPoly, gamma: &MultiPoly, ring3: &Ring) -> PolyResult3 {
    let lift = |p: &MultiPoly| p.embed_into(ring3);
    let z3 = MultiPoly::var_named(ring3, &ring3.vars[3])?;
    Ok(lift(alpha)?.mul(&z3.pow(2)).add(&lift(beta)?.mul(&z3)).add(&lift(gamma)?))
}

type PolyResult3 = Result<MultiPoly, PolyError>;

/// The two components of the set `M` of the surface `g` in variables `z0..z3`.
pub fn m_components(g: &MultiPoly) -> [Vec<MultiPoly>; 2] {
    let d1 = g.partial_derivative(1);
    let d2 = g.partial_derivative(2);
    let d3 = g.partial_derivative(3);
    [vec![g.clone(), d1, d3.clone()], vec![g.clone(), d2, d3]]
}

pub fn verify_genericity(
    engine: &Engine,
    alpha: &MultiPoly,
    beta: &MultiPoly,
    gamma: &MultiPoly,
    eps1: &MultiPoly,
    eps2: &MultiPoly,
) -> IdealResult<GenericityReport> {
    let ring = alpha.ring();
    let field = ring.field.clone();
    let z = |i| MultiPoly::var(ring, i);
    let mut names = ring.vars.clone();
    names.push("z3".into());
    let ring3 = PolyRing::from_names(&field, names)?;
    let g = quartic_surface(alpha, beta, gamma, &ring3)?;
    let z0_3 = MultiPoly::var(&ring3, 0);
    let mut avoids_m = true;
    for comp in m_components(&g) {
        let mut gens = comp.clone();
        gens.push(z0_3.clone());
        // points of {z0 = 0} other than P0 have z1 or z2 nonzero
        if !projectively_empty(engine, &gens, &[1, 2])? {
            avoids_m = false;
        }
    }
    let avoids_tangency = projectively_empty(engine, &[alpha.clone(), eps1.mul(eps2), z(0)], &[1, 2])?;
    let restricted = alpha.specialize(0, &field.zero());
    let a = restricted.coefficient(&Monomial::from_exps(&[0, 2, 0]));
    let b = restricted.coefficient(&Monomial::from_exps(&[0, 1, 1]));
    let c = restricted.coefficient(&Monomial::from_exps(&[0, 0, 2]));
    let disc = field.sub(&field.mul(&b, &b), &field.mul(&field.from_i64(4), &field.mul(&a, &c)));
    let transverse_to_conic = !restricted.is_zero() && !field.is_zero(&disc);
    Ok(GenericityReport { avoids_m, avoids_tangency, transverse_to_conic })
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TangencyReport {
    /// `(degree, radical degree)` of `A ∩ E1` and `A ∩ E2`.
    pub conic_cubic: [(Option<usize>, Option<usize>); 2],
    /// `(degree, radical degree)` of `E1 ∩ E2`.
    pub cubic_cubic: (Option<usize>, Option<usize>),
    /// `⟨α, ε1, ε2⟩` has no projective zero.
    pub disjoint: bool,
    /// Both cubics are smooth curves.
    pub cubics_smooth: bool,
}

impl TangencyReport {
    pub fn passed(&self) -> bool {
        self.conic_cubic.iter().all(|&(d, r)| d == Some(6) && r == Some(3))
            && self.cubic_cubic == (Some(9), Some(9))
            && self.disjoint
            && self.cubics_smooth
    }
}

pub fn verify_am_tangency(
    engine: &Engine,
    alpha: &MultiPoly,
    eps1: &MultiPoly,
    eps2: &MultiPoly,
) -> IdealResult<TangencyReport> {
    let profile = |gens: &[MultiPoly]| -> IdealResult<(Option<usize>, Option<usize>)> {
        let s = projective_scheme(engine, gens)?;
        Ok((s.degree, s.radical_degree))
    };
    let conic_cubic = [profile(&[alpha.clone(), eps1.clone()])?, profile(&[alpha.clone(), eps2.clone()])?];
    let cubic_cubic = profile(&[eps1.clone(), eps2.clone()])?;
    let disjoint = projectively_empty(engine, &[alpha.clone(), eps1.clone(), eps2.clone()], &[0, 1, 2])?;
    let mut cubics_smooth = true;
    for e in [eps1, eps2] {
        let h = ProjectiveHypersurface::new(e.clone()).map_err(|_| IdealError::NotZeroDimensional)?;
        if singular_scheme(engine, &h)?.degree != Some(0) {
            cubics_smooth = false;
        }
    }
    Ok(TangencyReport { conic_cubic, cubic_cubic, disjoint, cubics_smooth })
}

/// Evaluates a field element list as JSON (for witnesses).
pub fn point_json(field: &FieldSpec, pt: &[FieldElement]) -> Value {
    Value::Array(pt.iter().map(|c| field.element_to_json(c)).collect())
}
