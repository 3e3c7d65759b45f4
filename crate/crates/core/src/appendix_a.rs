//! Resolution of the double solid `V: α z3² + β z3 + γ + z0² z4² = 0` along the
//! line `L = {z0 = z1 = z2 = 0}`, the line `L'` above the point `P = (0:0:0:0:1)`,
//! and the nine ordinary double points, with the fiber catalog for the certifier.

use serde::Serialize;
use serde_json::{json, Value};

use crate::blowup::{
    self, BlowupError, BlowupResult, BlowupStep, Chart, ChartVerdict, ResolutionTower, TowerStep,
};
use crate::certifier::{CatalogEntry, Certificate, FiberClass, FiberDescriptor, RationalMap};
use crate::conic;
use crate::factor;
use crate::field::{FieldElement, FieldSpec};
use crate::groebner::{ring_of, Engine, Ideal, IdealResult};
use crate::instances::{self, NamedInstance};
use crate::linalg;
use crate::poly::{MultiPoly, PolyRing, Ring};
use crate::quadric;
use crate::upoly::{self, UPoly};
use crate::variety;
use crate::zerodim;

#[derive(Clone, Debug, Default)]
pub struct PipelineOptions {
    /// Negative control: stop after the blowup of `L`.
    pub skip_l_prime: bool,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

/// Exceptional equation seen as a family of plane curves over one base coordinate.
#[derive(Clone, Debug, Serialize)]
pub struct FiberReport {
    pub chart: String,
    pub base_var: String,
    pub fiber_vars: Vec<String>,
    pub fiber_degree: u32,
    pub generic_fiber: String,
    pub generic_field: String,
    pub generic_smooth: bool,
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub tower: ResolutionTower,
    pub checks: Vec<Check>,
    pub fibers: Vec<FiberReport>,
    /// Residue degrees of the closed singular points off `L`.
    pub odp_degrees: Vec<usize>,
    pub quadric_divisors: usize,
    pub strata: Vec<String>,
    pub catalog: Vec<CatalogEntry>,
}

impl PipelineReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tower": self.tower.to_json(),
            "checks": self.checks,
            "fibers": self.fibers,
            "odp_degrees": self.odp_degrees,
            "quadric_divisors": self.quadric_divisors,
            "exceptional_divisors": self.exceptional_names(),
            "strata": self.strata,
            "catalog": self.catalog.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn exceptional_names(&self) -> Vec<String> {
        let mut v: Vec<String> = (1..=self.quadric_divisors).map(|i| format!("E{i}")).collect();
        if self.tower.steps.iter().any(|s| s.name == "L") {
            v.push("E'".into());
        }
        if self.tower.steps.iter().any(|s| s.name == "L'") {
            v.push("E''".into());
        }
        v
    }
}

/// Fails with the first chart that stays singular above its center.
pub fn require_terminal(tower: &ResolutionTower) -> BlowupResult<()> {
    if let Some((step, v)) = tower.first_failure() {
        return Err(BlowupError::PipelineStepFailed {
            step: step.to_string(),
            chart: v.chart.clone(),
            witness: format!("singular locus above the center: <{}>", v.singular_radical.join(", ")),
        });
    }
    if !tower.terminal() {
        return Err(BlowupError::PipelineStepFailed {
            step: "tower".into(),
            chart: "-".into(),
            witness: "gluing or center check failed".into(),
        });
    }
    Ok(())
}

struct Forms {
    alpha: MultiPoly,
    beta: MultiPoly,
    gamma: MultiPoly,
}

impl Forms {
    /// Reads `α, β, γ` (in `z0, z1, z2`) off the equation of `V`.
    fn from_v(f: &MultiPoly) -> Option<Forms> {
        if f.ring().arity() != 5 || !instances::has_v_shape(f) || f.degree_in(3) != 2 {
            return None;
        }
        let r3 = ring_of(f.field(), &["z0", "z1", "z2"]);
        let zero = MultiPoly::zero(&r3);
        let proj: Vec<MultiPoly> =
            (0..5).map(|i| if i < 3 { MultiPoly::var(&r3, i) } else { zero.clone() }).collect();
        let c = f.coefficients_in(3);
        let down = |p: &MultiPoly| p.substitute_all(&proj, &r3).expect("same field");
        Some(Forms { alpha: down(&c[2]), beta: down(&c[1]), gamma: down(&c[0]) })
    }
}

/// `p(a0, a1, a2)` for a form in `z0, z1, z2`.
fn at(p: &MultiPoly, args: [&MultiPoly; 3]) -> MultiPoly {
    let ring = args[0].ring();
    p.substitute_all(&args.map(|a| a.clone()), ring).expect("field embeds")
}

fn radical_is_coordinate(engine: &Engine, ideal: &Ideal, vars: &[usize]) -> IdealResult<bool> {
    let ring = ideal.ring();
    for &v in vars {
        if !engine.radical_membership(&MultiPoly::var(ring, v), ideal)? {
            return Ok(false);
        }
    }
    let zero = ring.field.zero();
    Ok(ideal.gens().iter().all(|g| vars.iter().fold(g.clone(), |h, &v| h.specialize(v, &zero)).is_zero()))
}

fn find<'a>(steps: &'a [BlowupStep], id: &str) -> &'a Chart {
    steps.iter().flat_map(|b| &b.charts).find(|c| c.id == id).expect("chart exists")
}

fn coordinate_ideal(ring: &Ring, vars: &[usize]) -> Vec<MultiPoly> {
    vars.iter().map(|&v| MultiPoly::var(ring, v)).collect()
}

/// `p` as a polynomial in the base variable, homogenized in the fiber variables
/// with a new last variable `h`; the result lives in `F[base, fiber.., h]`.
fn homogenize_fibers(p: &MultiPoly, base: usize, fiber: &[usize]) -> (MultiPoly, u32) {
    let ring = p.ring();
    let mut names = vec![ring.vars[base].clone()];
    names.extend(fiber.iter().map(|&v| ring.vars[v].clone()));
    names.push("h".into());
    let target = PolyRing::from_names(&ring.field, names).expect("fresh names");
    let fdeg = |m: &crate::poly::Monomial| fiber.iter().map(|&v| m.exp(v)).sum::<u32>();
    let d = p.terms().iter().map(|(m, _)| fdeg(m)).max().unwrap_or(0);
    let terms = p
        .terms()
        .iter()
        .map(|(m, c)| {
            let mut e = vec![m.exp(base)];
            e.extend(fiber.iter().map(|&v| m.exp(v)));
            e.push(d - fdeg(m));
            (crate::poly::Monomial::from_exps(&e), c.clone())
        })
        .collect();
    (MultiPoly::from_terms(&target, terms), d)
}

fn to_upoly(p: &MultiPoly, var: usize) -> UPoly {
    let f = p.field();
    let mut out: UPoly = vec![];
    for (m, c) in p.terms() {
        let k = m.exp(var) as usize;
        if out.len() <= k {
            out.resize(k + 1, f.zero());
        }
        out[k] = f.add(&out[k], c);
    }
    upoly::trim(f, out)
}

/// Moves variable 0 of `q` into the coefficient field `F(var0)`.
fn over_function_field(q: &MultiPoly, ff: &FieldSpec) -> MultiPoly {
    let ring = q.ring();
    let names: Vec<String> = ring.vars[1..].to_vec();
    let target = PolyRing::from_names(ff, names).expect("fresh names");
    let base = &ring.field;
    let mut acc = MultiPoly::zero(&target);
    let images: Vec<MultiPoly> = (0..ring.arity())
        .map(|i| if i == 0 { MultiPoly::zero(&target) } else { MultiPoly::var(&target, i - 1) })
        .collect();
    for (m, c) in q.terms() {
        let k = m.exp(0) as usize;
        let mut num = vec![base.zero(); k + 1];
        num[k] = c.clone();
        let coeff = ff.fraction(num, vec![base.one()]).expect("function field");
        let mut e = m.exps(ring.arity());
        e[0] = 0;
        let mono = MultiPoly::monomial(ring, crate::poly::Monomial::from_exps(&e), base.one());
        acc = acc.add(&mono.substitute_all(&images, &target).expect("same base").scale(&coeff));
    }
    acc
}

fn generic_fiber(
    engine: &Engine,
    chart: &Chart,
    base: usize,
    fiber: &[usize],
) -> IdealResult<(FiberReport, MultiPoly, MultiPoly)> {
    let e = &chart.exceptional;
    let ring = e.ring();
    let (hq, d) = homogenize_fibers(e, base, fiber);
    let ff = FieldSpec::function_field(&ring.field, &ring.vars[base])?;
    let q = over_function_field(&hq, &ff);
    let mut gens = vec![q.clone()];
    gens.extend(q.gradient());
    let charts: Vec<usize> = (0..q.ring().arity()).collect();
    let smooth = variety::projectively_empty(engine, &gens, &charts)?;
    let report = FiberReport {
        chart: chart.id.clone(),
        base_var: ring.vars[base].clone(),
        fiber_vars: fiber.iter().map(|&v| ring.vars[v].clone()).collect(),
        fiber_degree: d,
        generic_fiber: q.to_string(),
        generic_field: ff.name(),
        generic_smooth: smooth,
    };
    Ok((report, hq, q))
}

/// Degenerate fibers of a conic family `q(t; w)`: the reduced polynomial in `t`
/// over which some fiber is singular.
fn discriminant_locus(engine: &Engine, q: &MultiPoly) -> IdealResult<UPoly> {
    let ring = q.ring();
    let f = &ring.field;
    let mut gens = vec![q.clone()];
    gens.extend((1..4).map(|v| q.partial_derivative(v)));
    let mut acc: UPoly = vec![f.one()];
    for k in 1..4 {
        let chart = Ideal::new(ring, gens.clone())?.with(&[MultiPoly::var(ring, k).sub(&MultiPoly::one(ring))])?;
        let elim = engine.eliminate(&chart, &[1, 2, 3])?;
        let g = elim.gens().iter().map(|p| to_upoly(p, 0)).fold(vec![], |a, b| upoly::gcd(f, &a, &b));
        if g.is_empty() {
            return Err(crate::groebner::IdealError::NotZeroDimensional);
        }
        let g = zerodim::squarefree_part(f, &g);
        let common = upoly::gcd(f, &acc, &g);
        acc = upoly::mul(f, &acc, &upoly::div_exact(f, &g, &common));
    }
    Ok(upoly::monic(f, &acc))
}

fn point_in(ff: &FieldSpec, coords: &[MultiPoly]) -> Vec<FieldElement> {
    let base = ff.base().expect("function field").clone();
    coords.iter().map(|c| ff.fraction(to_upoly(c, 0), vec![base.one()]).expect("function field")).collect()
}

/// Specializes `q(t; w)` at a closed point `h(t) = 0`; returns the residue field,
/// the conic over it, and its name suffix.
fn specialize_closed(q: &MultiPoly, h: &UPoly) -> IdealResult<(FieldSpec, MultiPoly)> {
    let ring = q.ring();
    let f = &ring.field;
    let (k, t0) = if h.len() == 2 {
        (f.clone(), f.neg(&h[0]))
    } else {
        let k = FieldSpec::extension(f, h.clone(), "t0")?;
        let g = k.generator().expect("extension");
        (k, g)
    };
    let names: Vec<String> = ring.vars[1..].to_vec();
    let target = PolyRing::from_names(&k, names)?;
    let mut images = vec![MultiPoly::constant(&target, t0)];
    images.extend((0..3).map(|i| MultiPoly::var(&target, i)));
    Ok((k.clone(), q.substitute_all(&images, &target)?))
}

fn vertex(q: &MultiPoly) -> Option<Vec<FieldElement>> {
    let all = [0, 1, 2];
    let m = quadric::polar_matrix(q, &all);
    linalg::kernel(&q.ring().field, &m, 3).into_iter().next()
}

fn linear_change_ring(ring: &Ring, names: &[&str]) -> Ring {
    PolyRing::new(&ring.field, names).expect("fresh names")
}

/// Runs the whole resolution; the report carries every check, even failed ones.
pub fn run_appendix_a_pipeline(engine: &Engine, v: &NamedInstance, opts: &PipelineOptions) -> BlowupResult<PipelineReport> {
    let f = v.hypersurface.equation();
    let field = f.field().clone();
    let forms = Forms::from_v(f).ok_or_else(|| BlowupError::BadCenter("instance is not of the form of V".into()))?;
    let mut checks = vec![];
    let mut tower = ResolutionTower::default();

    // singular points of V off L: chart z0 carries all of them
    let c0 = variety::chart_poly(f, 0);
    let j0 = variety::jacobian_ideal(&c0);
    let deg = engine.quotient_dimension(&j0)?;
    let rad = zerodim::radical(engine, &j0)?;
    let rad_deg = engine.quotient_dimension(&rad)?;
    let det = variety::hessian_det_mod(engine, &c0, &j0)?;
    let hess_unit = engine.is_unit_ideal(&j0.with(&[det])?)?;
    checks.push(Check::new(
        "V-odp-off-L",
        deg == 9 && rad_deg == 9 && hess_unit,
        format!("singular scheme in chart z0 has length {deg}, reduced length {rad_deg}, Hessian unit: {hess_unit}"),
    ));
    let mut rest_empty = true;
    for i in [1, 2] {
        let ci = variety::chart_poly(f, i);
        let ideal = variety::jacobian_ideal(&ci).with(&[MultiPoly::var(ci.ring(), 0)])?;
        rest_empty &= engine.is_unit_ideal(&ideal)?;
    }
    checks.push(Check::new("V-no-other-singular-points", rest_empty, "charts z1, z2 have no singular point on z0 = 0"));

    // step 1: blow up L in the charts z4 and z3
    let g4 = variety::chart_poly(f, 4);
    let g3 = variety::chart_poly(f, 3);
    let b4 = blowup::blowup_coordinate_center(&g4, &[0, 1, 2], &["y0", "y1", "y2", "y3"], "V/z4")?;
    let b3 = blowup::blowup_coordinate_center(&g3, &[0, 1, 2], &["y0", "y1", "y2", "y4"], "V/z3")?;
    let l_in_sing = blowup::center_in_singular_locus(engine, &g4, &coordinate_ideal(g4.ring(), &[0, 1, 2]))?
        && blowup::center_in_singular_locus(engine, &g3, &coordinate_ideal(g3.ring(), &[0, 1, 2]))?;
    let mut verdicts: Vec<ChartVerdict> = blowup::step_verdicts(engine, &b4)?;
    verdicts.extend(blowup::step_verdicts(engine, &b3)?);
    let gluing = blowup::check_all_gluings(&b4)? && blowup::check_all_gluings(&b3)?;
    let steps1 = vec![b4, b3];

    let c1a = find(&steps1, "V/z4/y0");
    let c1b = find(&steps1, "V/z4/y1");
    let c1c = find(&steps1, "V/z4/y2");
    {
        let r = c1a.ring();
        let y = |i| MultiPoly::var(r, i);
        let one = MultiPoly::one(r);
        let want = at(&forms.alpha, [&one, &y(1), &y(2)]).mul(&y(3).pow(2)).add(&one);
        checks.push(Check::new(
            "chart-1a-exceptional",
            c1a.exceptional == want,
            format!("{} = 0", c1a.exceptional),
        ));
        let r = c1b.ring();
        let y = |i| MultiPoly::var(r, i);
        let one = MultiPoly::one(r);
        let args = [&y(0), &one, &y(2)];
        let want = at(&forms.alpha, args)
            .mul(&y(3).pow(2))
            .add(&at(&forms.beta, args).mul(&y(1)).mul(&y(3)))
            .add(&at(&forms.gamma, args).mul(&y(1).pow(2)))
            .add(&y(0).pow(2));
        checks.push(Check::new("chart-1b-strict-transform", c1b.equation == want, format!("{} = 0", c1b.equation)));
    }
    // the singular locus above L is the line L' (seen in charts 1(b) and 1(c))
    let mut line_ok = true;
    let names_of = |c: &Chart, vars: &[usize]| -> Vec<String> { vars.iter().map(|&i| c.ring().vars[i].clone()).collect() };
    for v in verdicts.iter_mut() {
        let (chart, line): (&Chart, &[usize]) = match v.chart.as_str() {
            "V/z4/y1" => (c1b, &[0, 1, 3]),
            "V/z4/y2" => (c1c, &[0, 2, 3]),
            _ => {
                line_ok &= v.smooth_above_center;
                continue;
            }
        };
        let ideal = blowup::singular_ideal(&chart.equation, &[MultiPoly::var(chart.ring(), chart.pivot)]);
        let is_line = !v.smooth_above_center && radical_is_coordinate(engine, &ideal, line)?;
        line_ok &= is_line;
        if is_line {
            v.singular_radical = names_of(chart, line);
            if !opts.skip_l_prime {
                v.resolved_by = Some("L'".into());
            }
        }
    }
    checks.push(Check::new(
        "singular-line-above-L",
        line_ok,
        "singular locus above L is y0 = y1 = y3 = 0 in chart 1(b) (y0 = y2 = y3 = 0 in 1(c)); other charts smooth",
    ));
    let mut fibers = vec![];
    let (rep_a, hq_a, q_a) = generic_fiber(engine, c1a, 3, &[1, 2])?;
    checks.push(Check::new(
        "E'-generic-fiber-smooth-conic",
        rep_a.fiber_degree <= 2 && rep_a.generic_smooth,
        format!("{} = 0 over {}", rep_a.generic_fiber, rep_a.generic_field),
    ));
    fibers.push(rep_a);
    let exc1: Vec<Value> = steps1
        .iter()
        .flat_map(|b| &b.charts)
        .map(|c| json!({"divisor": "E'", "chart": c.id, "equation": c.exceptional.to_string()}))
        .collect();
    tower.steps.push(TowerStep {
        name: "L".into(),
        blowups: steps1.clone(),
        verdicts,
        gluing_ok: gluing,
        center_in_singular_locus: l_in_sing,
        exceptional: exc1,
    });

    let mut catalog = vec![];
    let mut strata: Vec<String> = vec!["smooth-locus".into()];
    {
        let r = ring_of(&field, &["x"]);
        let d = FiberDescriptor::new(FiberClass::Point, vec![MultiPoly::var(&r, 0)], false)
            .with_note("isomorphism away from the centers");
        catalog.push(CatalogEntry { stratum: "smooth-locus".into(), descriptor: d, certificate: Some(Certificate::RationalPoint(vec![field.zero()])) });
    }

    // conic bundle E' -> L
    strata.push("L-generic".into());
    let section = conic::conic_section(&hq_a, 0, [1, 2, 3], opts.seed)?;
    {
        let d = FiberDescriptor::new(FiberClass::SmoothConic, vec![q_a.clone()], true)
            .with_note("generic fiber of E' -> L");
        let cert = section.as_ref().map(|s| Certificate::RationalPoint(point_in(q_a.field(), s)));
        catalog.push(CatalogEntry { stratum: "L-generic".into(), descriptor: d, certificate: cert });
    }
    let disc = discriminant_locus(engine, &hq_a)?;
    let t = MultiPoly::var(hq_a.ring(), 0);
    let excluded = t.mul(&conic::upoly_in(hq_a.ring(), 0, &disc));
    strata.push("L-closed".into());
    {
        let mut d = FiberDescriptor::new(FiberClass::ConicFamily, vec![hq_a.clone()], true)
            .with_note("fibers of E' over closed points of L away from P and the degenerate fibers");
        d.base_vars = vec![0];
        d.excluded = Some(excluded);
        catalog.push(CatalogEntry { stratum: "L-closed".into(), descriptor: d, certificate: section.clone().map(Certificate::Section) });
    }
    let fac = factor::factor_univariate(&disc, &field)?;
    for (k, (h, _)) in fac.factors.iter().filter(|(h, _)| !(h.len() == 2 && field.is_zero(&h[0]))).enumerate() {
        let name = format!("L-degenerate:{k}");
        let (_, qk) = specialize_closed(&hq_a, h)?;
        let d = FiberDescriptor::new(FiberClass::DegenerateConic, vec![qk.clone()], true)
            .with_note(&format!("fiber over t = root of {}", upoly::format(&field, h, "t")));
        strata.push(name.clone());
        catalog.push(CatalogEntry { stratum: name, descriptor: d, certificate: vertex(&qk).map(Certificate::RationalPoint) });
    }
    // the point of L at z4 = 0, seen in chart z3
    strata.push("L-infinity".into());
    {
        let c = find(&steps1, "V/z3/y0");
        let at_inf = c.exceptional.specialize(3, &field.zero());
        let (hq, _) = homogenize_fibers(&at_inf, 3, &[1, 2]);
        let r = linear_change_ring(hq.ring(), &["w1", "w2", "h"]);
        let images = vec![MultiPoly::zero(&r), MultiPoly::var(&r, 0), MultiPoly::var(&r, 1), MultiPoly::var(&r, 2)];
        let q = hq.substitute_all(&images, &r)?;
        let pt = quadric::rational_point(&q, &[0, 1, 2], opts.seed);
        let d = FiberDescriptor::new(FiberClass::SmoothConic, vec![q], true).with_note("fiber of E' over L at z4 = 0");
        catalog.push(CatalogEntry { stratum: "L-infinity".into(), descriptor: d, certificate: pt.map(Certificate::RationalPoint) });
    }

    if !opts.skip_l_prime {
        // step 2: blow up L' in charts 1(b) and 1(c)
        let bb = blowup::blowup_coordinate_center(&c1b.equation, &[0, 1, 3], &["u0", "u1", "u2", "u3"], &c1b.id)?;
        let bc = blowup::blowup_coordinate_center(&c1c.equation, &[0, 2, 3], &["u0", "u1", "u2", "u3"], &c1c.id)?;
        let in_sing = blowup::center_in_singular_locus(engine, &c1b.equation, &coordinate_ideal(c1b.ring(), &[0, 1, 3]))?
            && blowup::center_in_singular_locus(engine, &c1c.equation, &coordinate_ideal(c1c.ring(), &[0, 2, 3]))?;
        let mut verdicts = blowup::step_verdicts(engine, &bb)?;
        verdicts.extend(blowup::step_verdicts(engine, &bc)?);
        let gluing = blowup::check_all_gluings(&bb)? && blowup::check_all_gluings(&bc)?;
        let steps2 = vec![bb, bc];
        let c2 = find(&steps2, &format!("{}/u1", c1b.id));
        let c1 = find(&steps2, &format!("{}/u0", c1b.id));
        let r = c2.ring();
        let u = |i| MultiPoly::var(r, i);
        let (zero, one) = (MultiPoly::zero(r), MultiPoly::one(r));
        let args = [&zero, &one, &u(2)];
        let want = at(&forms.alpha, args)
            .mul(&u(3).pow(2))
            .add(&at(&forms.beta, args).mul(&u(3)))
            .add(&at(&forms.gamma, args))
            .add(&u(0).pow(2));
        checks.push(Check::new("chart-2-exceptional", c2.exceptional == want, format!("{} = 0", c2.exceptional)));
        checks.push(Check::new(
            "smooth-above-L'",
            verdicts.iter().all(|v| v.smooth_above_center),
            "all charts of the blowup of L' are smooth along the exceptional divisor",
        ));
        let (rep_b, hq_b, q_b) = generic_fiber(engine, c2, 2, &[0, 3])?;
        checks.push(Check::new(
            "E''-generic-fiber-smooth-conic",
            rep_b.fiber_degree <= 2 && rep_b.generic_smooth,
            format!("{} = 0 over {}", rep_b.generic_fiber, rep_b.generic_field),
        ));
        fibers.push(rep_b);
        let exc2: Vec<Value> = steps2
            .iter()
            .flat_map(|b| &b.charts)
            .map(|c| json!({"divisor": "E''", "chart": c.id, "equation": c.exceptional.to_string()}))
            .collect();
        tower.steps.push(TowerStep {
            name: "L'".into(),
            blowups: steps2.clone(),
            verdicts,
            gluing_ok: gluing,
            center_in_singular_locus: in_sing,
            exceptional: exc2,
        });
        let _ = q_b;
        let e_conic = conic::conic_section(&hq_b, 0, [1, 2, 3], opts.seed.wrapping_add(1))?;
        strata.push("P".into());
        strata.push("E10".into());
        let (p_entry, e10_entry) = exceptional_over_p(c1, c2, &forms, &hq_b, e_conic.as_deref(), opts.seed);
        catalog.push(p_entry);
        catalog.push(e10_entry);
    }

    // step 3: the nine ordinary double points
    let points = zerodim::split_points(engine, &rad, opts.seed)?;
    let mut odp_steps = vec![];
    let mut odp_verdicts = vec![];
    let mut odp_sing = true;
    let mut odp_glue = true;
    let mut exc3 = vec![];
    let mut quadrics_ok = true;
    let mut degrees = vec![];
    for (k, p) in points.iter().enumerate() {
        let kf = &p.residue_field;
        let local = blowup::translate_to_origin(&c0, p.representative(), kf)?;
        let id = format!("V/z0/p{k}");
        let step = blowup::blowup_origin(&local, &["a1", "a2", "a3", "a4"], &id)?;
        odp_sing &= blowup::center_in_singular_locus(engine, &local, &coordinate_ideal(local.ring(), &[0, 1, 2, 3]))?;
        odp_glue &= blowup::check_all_gluings(&step)?;
        odp_verdicts.extend(blowup::step_verdicts(engine, &step)?);
        let r = linear_change_ring(local.ring(), &["e1", "e2", "e3", "e4"]);
        let q = local.lowest_part().change_ring(&r)?;
        let all = [0, 1, 2, 3];
        let rank = quadric::polar_rank(&q, &all);
        quadrics_ok &= rank == 4 && q.total_degree() == Some(2);
        exc3.push(json!({"divisor": format!("E{}", k + 1), "residue_degree": p.degree, "quadric": q.to_string(), "rank": rank}));
        degrees.push(p.degree);
        let name = format!("odp:{k}");
        strata.push(name.clone());
        catalog.push(odp_entry(&name, q, p.degree, opts.seed.wrapping_add(k as u64)));
        odp_steps.push(step);
    }
    let geometric: usize = degrees.iter().sum();
    checks.push(Check::new(
        "odp-exceptional-smooth-quadrics",
        quadrics_ok && geometric == 9 && odp_verdicts.iter().all(|v: &ChartVerdict| v.smooth_above_center),
        format!("{} closed points of degrees {degrees:?}; exceptional divisors are rank-4 quadrics", points.len()),
    ));
    tower.steps.push(TowerStep {
        name: "ODP".into(),
        blowups: odp_steps,
        verdicts: odp_verdicts,
        gluing_ok: odp_glue,
        center_in_singular_locus: odp_sing,
        exceptional: exc3,
    });
    let only_odp = !opts.skip_l_prime
        && tower.steps[..2].iter().all(|s| s.verdicts.iter().all(|v| v.smooth_above_center || v.resolved_by.is_some()))
        && checks.iter().filter(|c| c.name.starts_with("V-")).all(|c| c.passed);
    checks.push(Check::new(
        "V''-only-odp",
        only_odp,
        "singularities of V'' are those of V off L: nine ordinary double points",
    ));
    checks.push(Check::new("tower-terminal", tower.terminal(), format!("{} charts", tower.chart_count())));
    Ok(PipelineReport {
        tower,
        checks,
        fibers,
        odp_degrees: degrees,
        quadric_divisors: geometric,
        strata,
        catalog,
    })
}

fn odp_entry(name: &str, q: MultiPoly, degree: usize, seed: u64) -> CatalogEntry {
    let all = [0, 1, 2, 3];
    let note = format!("exceptional quadric over a closed point of degree {degree}");
    let pt = quadric::rational_point(&q, &all, seed);
    let line = pt.as_ref().and_then(|p| quadric::lines_through(&q, &all, p).into_iter().next().map(|e| (p.clone(), e)));
    match (pt, line) {
        (_, Some((point, direction))) => CatalogEntry {
            stratum: name.into(),
            descriptor: FiberDescriptor::new(FiberClass::SplitQuadricSurface, vec![q], true).with_note(&note),
            certificate: Some(Certificate::QuadricSplitness { point, direction }),
        },
        (pt, None) => {
            let map = pt.and_then(|p| crate::certifier::quadric_parametrization(&q, &p));
            CatalogEntry {
                stratum: name.into(),
                descriptor: FiberDescriptor::new(FiberClass::RationalSurface, vec![q], true)
                    .with_note(&format!("{note}, non-split: projection from a rational point")),
                certificate: map.map(Certificate::ConicParametrization),
            }
        }
    }
}

/// Fiber over `P` (the surface E'') and the divisor `E' ∪ E''`.
///
/// The conic `hq` lives in `F[u2, u0, u3, h]`; in chart (2) `(u0 : u3 : h) = (u0 : u3 : 1)`,
/// in chart (1) `(u0 : u3 : h) = (1 : u3 : u1)`.
fn exceptional_over_p(
    c1: &Chart,
    c2: &Chart,
    forms: &Forms,
    hq: &MultiPoly,
    point: Option<&[MultiPoly]>,
    seed: u64,
) -> (CatalogEntry, CatalogEntry) {
    let field = hq.field().clone();
    let src = ring_of(&field, &["r", "s"]);
    let par = point.and_then(|p| quadric::parametrize(hq, &[1, 2, 3], p));
    // conic parametrization pulled to (r, s): u2 -> r, source coordinates -> (1, s)
    let conic_images = |omit: usize| -> Vec<MultiPoly> {
        let mut v = vec![MultiPoly::var(&src, 0)];
        let mut first = true;
        for k in 0..3 {
            if k == omit {
                v.push(MultiPoly::zero(&src));
            } else if first {
                v.push(MultiPoly::one(&src));
                first = false;
            } else {
                v.push(MultiPoly::var(&src, 1));
            }
        }
        v
    };
    let pulled = |par: &quadric::QuadricParam| -> Vec<MultiPoly> {
        let images = conic_images(par.omit);
        par.phi.iter().map(|p| p.substitute_all(&images, &src).unwrap()).collect()
    };
    let psi_in = |par: &quadric::QuadricParam, r: &Ring, w: Vec<MultiPoly>| -> Vec<(MultiPoly, MultiPoly)> {
        let psi: Vec<MultiPoly> = par.psi.iter().map(|p| p.substitute_all(&w, r).unwrap()).collect();
        vec![(MultiPoly::var(r, 2), MultiPoly::one(r)), (psi[1].clone(), psi[0].clone())]
    };
    let one = MultiPoly::one(&src);

    // chart (2): u0 = W0 / Wh, u1 = 0, u2 = r, u3 = W3 / Wh
    let r2 = c2.ring();
    let u2 = |i| MultiPoly::var(r2, i);
    let p_desc = FiberDescriptor::new(FiberClass::RationalSurface, vec![u2(1), c2.exceptional.clone()], false)
        .with_note("E'': conic bundle over the u2-line with a section");
    let p_map = par.as_ref().map(|par| {
        let ww = pulled(par);
        RationalMap {
            source: src.clone(),
            source_projective: false,
            phi: vec![
                (ww[0].clone(), ww[2].clone()),
                (MultiPoly::zero(&src), one.clone()),
                (MultiPoly::var(&src, 0), one.clone()),
                (ww[1].clone(), ww[2].clone()),
            ],
            psi: psi_in(par, r2, vec![u2(2), u2(0), u2(3), MultiPoly::one(r2)]),
        }
    });
    let p_entry = CatalogEntry { stratum: "P".into(), descriptor: p_desc, certificate: p_map.map(Certificate::ConicParametrization) };

    // chart (1): E'' = {u0 = 0}, E' = {u1 = 0}
    let r1 = c1.ring();
    let u = |i| MultiPoly::var(r1, i);
    let zero = field.zero();
    let f1 = &c1.equation;
    let e_pp = FiberDescriptor::new(FiberClass::RationalSurface, vec![u(0), f1.specialize(0, &zero)], false)
        .with_note("E'' in chart (1)");
    let e_p = FiberDescriptor::new(FiberClass::RationalSurface, vec![u(1), f1.specialize(1, &zero)], false)
        .with_note("E' in chart (1)");
    let mut e10 = FiberDescriptor::new(FiberClass::Union, vec![u(0).mul(&u(1)), f1.clone()], false)
        .with_note("exceptional divisor over L: E' and E''");
    // E'': u0 = 0, u1 = Wh / W0, u2 = r, u3 = W3 / W0
    let pp_map = par.as_ref().map(|par| {
        let ww = pulled(par);
        RationalMap {
            source: src.clone(),
            source_projective: false,
            phi: vec![
                (MultiPoly::zero(&src), one.clone()),
                (ww[2].clone(), ww[0].clone()),
                (MultiPoly::var(&src, 0), one.clone()),
                (ww[1].clone(), ww[0].clone()),
            ],
            psi: psi_in(par, r1, vec![u(2), MultiPoly::one(r1), u(3), u(1)]),
        }
    });
    let p_cert = e_prime_map(c1, forms, seed);
    let meet = meeting_point(c1, forms);
    e10.components = vec![e_p, e_pp];
    let cert = Certificate::UnionGlue {
        components: vec![p_cert.map(Certificate::ConicParametrization), pp_map.map(Certificate::ConicParametrization)],
        intersections: vec![(0, 1, meet)],
    };
    (p_entry, CatalogEntry { stratum: "E10".into(), descriptor: e10, certificate: Some(cert) })
}

/// `E' ∩ chart (1)`: `α(u0, 1, u2) u3² + 1 = 0`, birational to the quadric
/// `α(X0, X1, X2) + X3² = 0` through `X = (u3 u0, u3, u3 u2, 1)`.
fn e_prime_map(c1: &Chart, forms: &Forms, seed: u64) -> Option<RationalMap> {
    let field = c1.ring().field.clone();
    let rx = ring_of(&field, &["X0", "X1", "X2", "X3"]);
    let x = |i| MultiPoly::var(&rx, i);
    let qa = at(&forms.alpha, [&x(0), &x(1), &x(2)]).add(&x(3).pow(2));
    let pt = quadric::rational_point(&qa, &[0, 1, 2, 3], seed)?;
    let qmap = crate::certifier::quadric_parametrization(&qa, &pt)?;
    let src = qmap.source.clone();
    let xs: Vec<MultiPoly> = qmap.phi.iter().map(|(n, _)| n.clone()).collect();
    let one = MultiPoly::one(&src);
    let phi = vec![
        (xs[0].clone(), xs[1].clone()),
        (MultiPoly::zero(&src), one.clone()),
        (xs[2].clone(), xs[1].clone()),
        (xs[1].clone(), xs[3].clone()),
    ];
    let r1 = c1.ring();
    let u = |i| MultiPoly::var(r1, i);
    let xu = vec![u(3).mul(&u(0)), u(3), u(3).mul(&u(2)), MultiPoly::one(r1)];
    let psi = qmap.psi.iter().map(|(n, _)| (n.substitute_all(&xu, r1).unwrap(), MultiPoly::one(r1))).collect();
    Some(RationalMap { source: src, source_projective: true, phi, psi })
}

/// A rational point of `u0 = u1 = 0, α(0, 1, u2) u3² + 1 = 0`.
fn meeting_point(c1: &Chart, forms: &Forms) -> Option<Vec<FieldElement>> {
    let field = &c1.ring().field;
    let r = ring_of(field, &["c"]);
    let (zero, one) = (MultiPoly::zero(&r), MultiPoly::one(&r));
    let a = at(&forms.alpha, [&zero, &one, &MultiPoly::var(&r, 0)]);
    let p = field.characteristic() as i64;
    (0..p.min(10_000)).find_map(|c| {
        let c = field.from_i64(c);
        let av = a.evaluate(std::slice::from_ref(&c), field).ok()?;
        let minus_inv = field.neg(&field.inv(&av).ok()?);
        let s = factor::sqrt(&minus_inv, field).ok()??;
        Some(vec![field.zero(), field.zero(), c, s])
    })
}
