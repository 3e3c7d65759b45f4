//! Two-step resolution of the special fiber `Norm(u + βv + β²w) + xy(x − y) = 0`:
//! blow up its singular closed point `m`, then the singular points of the first
//! blowup, all computed over the residue field of `m`.

use serde_json::{json, Value};

use crate::appendix_a::Check;
use crate::blowup::{self, BlowupError, BlowupResult, BlowupStep, Chart, ResolutionTower, TowerStep};
use crate::certifier::{polynomial_map, CatalogEntry, Certificate, FiberClass, FiberDescriptor, RationalMap};
use crate::field::{FieldElement, FieldSpec};
use crate::groebner::{ring_of, Engine, IdealResult};
use crate::instances::NamedInstance;
use crate::linalg;
use crate::poly::{MultiPoly, PolyRing};
use crate::quadric;
use crate::variety;
use crate::zerodim;

#[derive(Clone, Debug)]
pub struct PadicReport {
    pub tower: ResolutionTower,
    pub checks: Vec<Check>,
    /// Length and reduced length of the singular scheme of the special fiber.
    pub singular_length: usize,
    pub singular_reduced_length: usize,
    /// Residue degrees of the singular closed points.
    pub singular_points: Vec<usize>,
    pub residue_field: String,
    pub strata: Vec<String>,
    pub catalog: Vec<CatalogEntry>,
}

impl PadicReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tower": self.tower.to_json(),
            "checks": self.checks,
            "singular_length": self.singular_length,
            "singular_reduced_length": self.singular_reduced_length,
            "singular_points": self.singular_points,
            "residue_field": self.residue_field,
            "strata": self.strata,
            "catalog": self.catalog.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
        })
    }
}

fn fail(step: &str, chart: &str, witness: impl Into<String>) -> BlowupError {
    BlowupError::PipelineStepFailed { step: step.into(), chart: chart.into(), witness: witness.into() }
}

fn unit(f: &FieldSpec, n: usize, i: usize) -> Vec<FieldElement> {
    (0..n).map(|j| if i == j { f.one() } else { f.zero() }).collect()
}

fn dot(f: &FieldSpec, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    a.iter().zip(b).fold(f.zero(), |acc, (x, y)| f.add(&acc, &f.mul(x, y)))
}

fn linear_form(ring: &crate::poly::Ring, coeffs: &[FieldElement]) -> MultiPoly {
    coeffs.iter().enumerate().fold(MultiPoly::zero(ring), |acc, (i, c)| acc.add(&MultiPoly::var(ring, i).scale(c)))
}

/// Linear factors of a constant-coefficient quadratic form of polar rank 2,
/// when they are defined over its field.
pub fn split_rank_two(q: &MultiPoly) -> Option<[Vec<FieldElement>; 2]> {
    let ring = q.ring();
    let f = &ring.field;
    let n = ring.arity();
    let all: Vec<usize> = (0..n).collect();
    if quadric::polar_rank(q, &all) != 2 {
        return None;
    }
    let kern = linalg::kernel(f, &quadric::polar_matrix(q, &all), n);
    let mut pair = None;
    'outer: for i in 0..n {
        for j in i + 1..n {
            let mut m = kern.clone();
            m.push(unit(f, n, i));
            m.push(unit(f, n, j));
            if linalg::rank(f, &m) == n {
                pair = Some((unit(f, n, i), unit(f, n, j)));
                break 'outer;
            }
        }
    }
    let (e, g) = pair?;
    let val = |v: &[FieldElement]| q.evaluate(v, f).ok();
    let comb = |x: &FieldElement| -> Vec<FieldElement> { e.iter().zip(&g).map(|(a, b)| f.add(&f.mul(x, a), b)).collect() };
    let (a, c) = (val(&e)?, val(&g)?);
    let b = f.sub(&f.sub(&val(&comb(&f.one()))?, &a), &c);
    let dirs: Vec<Vec<FieldElement>> = if f.is_zero(&a) {
        if f.is_zero(&b) {
            return None;
        }
        vec![e.clone(), comb(&f.neg(&f.div(&c, &b).ok()?))]
    } else {
        let roots = crate::factor::roots(&vec![c, b, a], f).ok()?;
        if roots.len() != 2 {
            return None;
        }
        roots.iter().map(|r| comb(r)).collect()
    };
    let mut out = vec![];
    for d in dirs {
        let mut m = kern.clone();
        m.push(d);
        let l = linalg::kernel(f, &m, n);
        if l.len() != 1 {
            return None;
        }
        out.push(l[0].clone());
    }
    let (l1, l2) = (linear_form(ring, &out[0]), linear_form(ring, &out[1]));
    // q = c0 l1 l2 with c0 read off at a point where both are nonzero
    let prod = l1.mul(&l2);
    let (m, pc) = prod.terms().first()?.clone();
    let c0 = f.div(&q.coefficient(&m), &pc).ok()?;
    if prod.scale(&c0) != *q {
        return None;
    }
    let first = out[0].iter().map(|x| f.mul(x, &c0)).collect();
    Some([first, out[1].clone()])
}

/// `P² ⇢ {ℓ = 0} ⊂ P^{n-1}` and a linear left inverse.
pub fn plane_parametrization(ring: &crate::poly::Ring, ell: &[FieldElement]) -> Option<RationalMap> {
    let f = &ring.field;
    let n = ring.arity();
    let basis = linalg::kernel(f, &vec![ell.to_vec()], n);
    let k = basis.len();
    let src = PolyRing::from_names(f, (0..k).map(|i| format!("s{i}")).collect()).ok()?;
    let phi: Vec<MultiPoly> = (0..n)
        .map(|j| (0..k).fold(MultiPoly::zero(&src), |acc, i| acc.add(&MultiPoly::var(&src, i).scale(&basis[i][j]))))
        .collect();
    // choose k coordinates on which the basis is invertible
    let rows: Vec<usize> = {
        let mut chosen: Vec<usize> = vec![];
        for j in 0..n {
            let mut cand = chosen.clone();
            cand.push(j);
            let m: linalg::Matrix = cand.iter().map(|&r| (0..k).map(|i| basis[i][r].clone()).collect()).collect();
            if linalg::rank(f, &m) == cand.len() {
                chosen = cand;
            }
        }
        chosen
    };
    if rows.len() != k {
        return None;
    }
    let m: linalg::Matrix = rows.iter().map(|&r| (0..k).map(|i| basis[i][r].clone()).collect()).collect();
    let inv = linalg::inverse(f, &m)?;
    let psi: Vec<MultiPoly> = (0..k)
        .map(|i| rows.iter().enumerate().fold(MultiPoly::zero(ring), |acc, (c, &r)| acc.add(&MultiPoly::var(ring, r).scale(&inv[i][c]))))
        .collect();
    Some(RationalMap { source: src, source_projective: true, phi: polynomial_map(phi), psi: polynomial_map(psi) })
}

/// Singular points of the charts of a point blowup lying on the exceptional
/// divisor, each counted in exactly one chart.
fn singular_points_above(engine: &Engine, step: &BlowupStep, seed: u64) -> IdealResult<Vec<(usize, Vec<FieldElement>, usize)>> {
    let mut out = vec![];
    for (j, c) in step.charts.iter().enumerate() {
        let ring = c.ring();
        let mut extra = vec![MultiPoly::var(ring, c.pivot)];
        extra.extend(step.charts[..j].iter().map(|e| MultiPoly::var(ring, e.pivot)));
        let ideal = blowup::singular_ideal(&c.equation, &extra);
        if engine.is_unit_ideal(&ideal)? {
            continue;
        }
        let rad = zerodim::radical(engine, &ideal)?;
        for p in zerodim::split_points(engine, &rad, seed)? {
            out.push((j, p.representative().to_vec(), p.degree));
        }
    }
    Ok(out)
}

/// Direction in the exceptional `P³` of a point of chart `j`.
fn direction(f: &FieldSpec, chart: &Chart, pt: &[FieldElement]) -> Vec<FieldElement> {
    (0..pt.len()).map(|i| if i == chart.pivot { f.one() } else { pt[i].clone() }).collect()
}

struct PointBlowup {
    step: BlowupStep,
    local: MultiPoly,
}

fn blow_up_point(f: &MultiPoly, pt: &[FieldElement], field: &FieldSpec, names: &[&str], id: &str) -> BlowupResult<PointBlowup> {
    let local = blowup::translate_to_origin(f, pt, field)?;
    let step = blowup::blowup_origin(&local, names, id)?;
    Ok(PointBlowup { step, local })
}

fn frob(f: &FieldSpec, p: u64, v: &[FieldElement]) -> Vec<FieldElement> {
    v.iter().map(|x| f.pow(x, p)).collect()
}

pub fn run_padic_pipeline(engine: &Engine, fiber: &NamedInstance, p: u64, seed: u64) -> BlowupResult<PadicReport> {
    let h = &fiber.hypersurface;
    let f = h.equation();
    let base = f.field().clone();
    let mut checks = vec![];
    let scheme = variety::singular_scheme(engine, h)?;
    if !scheme.zero_dimensional {
        return Err(fail("singular-scheme", "-", "singular locus is not finite"));
    }
    let (len, red) = (scheme.degree.unwrap_or(0), scheme.radical_degree.unwrap_or(0));
    let pieces: Vec<_> = scheme.charts.iter().filter(|c| c.degree > 0).collect();
    let mut points = vec![];
    for piece in &pieces {
        let rad = zerodim::radical(engine, &piece.ideal)?;
        for pt in zerodim::split_points(engine, &rad, seed)? {
            points.push((piece.chart, pt));
        }
    }
    let degrees: Vec<usize> = points.iter().map(|(_, p)| p.degree).collect();
    let (chart_idx, m) = match points.as_slice() {
        [(c, m)] => (*c, m.clone()),
        _ => return Err(fail("singular-scheme", "-", format!("expected one singular closed point, found degrees {degrees:?}"))),
    };
    let g = variety::chart_poly(f, chart_idx);
    let cring = g.ring().clone();
    let (ix, iy) = (cring.index("x")?, cring.index("y")?);
    let rep = m.representative().to_vec();
    let e = m.residue_field.clone();
    checks.push(Check::new(
        "one-singular-closed-point-of-degree-3",
        m.degree == 3 && e.is_zero(&rep[ix]) && e.is_zero(&rep[iy]),
        format!("singular scheme: length {len}, reduced length {red}; closed point of degree {} on x = y = 0", m.degree),
    ));

    // Frobenius permutes the geometric points of m
    let orbit: Vec<Vec<FieldElement>> = {
        let mut v = vec![rep.clone()];
        for _ in 1..m.degree {
            let next = frob(&e, p, v.last().unwrap());
            v.push(next);
        }
        v
    };
    let mut conj = m.conjugates.clone();
    conj.sort();
    let mut orb = orbit.clone();
    orb.sort();
    orb.dedup();
    let m_stable = conj == orb && orb.len() == m.degree;

    // step 1: blow up m (one geometric point; the others are its conjugates)
    let cname = &f.ring().vars[chart_idx];
    let id1 = format!("Y/{cname}/m");
    let names1 = ["a0", "a1", "a2", "a3"];
    let b1 = blow_up_point(&g, &rep, &e, &names1, &id1)?;
    let coords1: Vec<MultiPoly> = (0..4).map(|i| MultiPoly::var(b1.local.ring(), i)).collect();
    let in_sing1 = blowup::center_in_singular_locus(engine, &b1.local, &coords1)?;
    let glue1 = blowup::check_all_gluings(&b1.step)?;
    let mut verdicts1 = blowup::step_verdicts(engine, &b1.step)?;
    let pring = ring_of(&e, &["e0", "e1", "e2", "e3"]);
    let cone = b1.local.lowest_part().change_ring(&pring)?;
    let factors = split_rank_two(&cone);
    checks.push(Check::new(
        "exceptional-over-m-two-planes",
        cone.total_degree() == Some(2) && factors.is_some(),
        format!("tangent cone {} = 0 factors into two distinct planes over {}", cone, e.name()),
    ));
    let [l1, l2] = factors.clone().ok_or_else(|| fail("exceptional-over-m", &id1, cone.to_string()))?;
    let line = linalg::kernel(&e, &vec![l1.clone(), l2.clone()], 4);
    checks.push(Check::new(
        "planes-meet-in-a-line",
        line.len() == 2,
        format!("intersection has projective dimension {}", line.len() as i64 - 1),
    ));

    // singular points of Y1 above m: on the line, with residue field E
    let sing1 = singular_points_above(engine, &b1.step, seed)?;
    let on_line = sing1.iter().all(|(j, pt, d)| {
        let dir = direction(&e, &b1.step.charts[*j], pt);
        *d == 1 && e.is_zero(&dot(&e, &l1, &dir)) && e.is_zero(&dot(&e, &l2, &dir))
    });
    checks.push(Check::new(
        "three-singular-points-on-the-line",
        sing1.len() == 3 && on_line,
        format!("{} singular points above m, all rational over {} and on the line: {on_line}", sing1.len(), e.name()),
    ));
    for v in verdicts1.iter_mut() {
        if sing1.iter().any(|(j, _, _)| b1.step.charts[*j].id == v.chart) {
            v.resolved_by = Some("P".into());
        }
    }

    // the same construction at a conjugate of m is the Frobenius image
    let mut p_stable = m_stable;
    if m.degree > 1 {
        let b1c = blow_up_point(&g, &orbit[1], &e, &names1, &id1)?;
        let sing_c = singular_points_above(engine, &b1c.step, seed)?;
        let mut a: Vec<(usize, Vec<FieldElement>)> = sing1.iter().map(|(j, pt, _)| (*j, frob(&e, p, pt))).collect();
        let mut b: Vec<(usize, Vec<FieldElement>)> = sing_c.iter().map(|(j, pt, _)| (*j, pt.clone())).collect();
        a.sort();
        b.sort();
        p_stable &= a == b;
    }
    checks.push(Check::new(
        "galois-stable-centers",
        m_stable && p_stable,
        "Frobenius permutes the geometric points of m and carries the singular points above one to those above the next",
    ));

    // step 2: blow up the singular points of Y1
    let mut steps2 = vec![];
    let mut verdicts2 = vec![];
    let mut in_sing2 = true;
    let mut glue2 = true;
    let mut quadrics = vec![];
    for (k, (j, pt, _)) in sing1.iter().enumerate() {
        let c = &b1.step.charts[*j];
        let id = format!("{}/P{k}", c.id);
        let b2 = blow_up_point(&c.equation, pt, &e, &["b0", "b1", "b2", "b3"], &id)?;
        let coords: Vec<MultiPoly> = (0..4).map(|i| MultiPoly::var(b2.local.ring(), i)).collect();
        in_sing2 &= blowup::center_in_singular_locus(engine, &b2.local, &coords)?;
        glue2 &= blowup::check_all_gluings(&b2.step)?;
        verdicts2.extend(blowup::step_verdicts(engine, &b2.step)?);
        quadrics.push(b2.local.lowest_part().change_ring(&pring)?);
        steps2.push(b2.step);
    }
    let all = [0, 1, 2, 3];
    let smooth_quadrics = quadrics.iter().all(|q| q.total_degree() == Some(2) && quadric::polar_rank(q, &all) == 4);
    checks.push(Check::new(
        "exceptional-over-P-smooth-quadrics",
        smooth_quadrics && !quadrics.is_empty(),
        format!("{} exceptional quadrics of polar rank 4", quadrics.len()),
    ));
    checks.push(Check::new(
        "Z-smooth",
        verdicts2.iter().all(|v| v.smooth_above_center),
        "every chart of the second blowup is smooth along its exceptional divisor",
    ));

    let mut tower = ResolutionTower::default();
    tower.steps.push(TowerStep {
        name: "m".into(),
        blowups: vec![b1.step.clone()],
        verdicts: verdicts1,
        gluing_ok: glue1,
        center_in_singular_locus: in_sing1,
        exceptional: vec![json!({"over": "m", "residue_field": e.name(), "tangent_cone": cone.to_string()})],
    });
    tower.steps.push(TowerStep {
        name: "P".into(),
        blowups: steps2,
        verdicts: verdicts2,
        gluing_ok: glue2,
        center_in_singular_locus: in_sing2,
        exceptional: quadrics.iter().enumerate().map(|(k, q)| json!({"over": format!("P{k}"), "quadric": q.to_string()})).collect(),
    });
    checks.push(Check::new("tower-terminal", tower.terminal(), format!("{} charts", tower.chart_count())));

    // catalog: fibers of Y1 -> Y and of Z -> Y1
    let mut strata = vec![];
    let mut catalog = vec![];
    let pt_ring = ring_of(&base, &["x"]);
    for name in ["Y1->Y:smooth-locus", "Z->Y1:smooth-locus"] {
        strata.push(name.to_string());
        catalog.push(CatalogEntry {
            stratum: name.into(),
            descriptor: FiberDescriptor::new(FiberClass::Point, vec![MultiPoly::var(&pt_ring, 0)], false)
                .with_note("isomorphism away from the centers"),
            certificate: Some(Certificate::RationalPoint(vec![base.zero()])),
        });
    }
    {
        let (p1, p2) = (linear_form(&pring, &l1), linear_form(&pring, &l2));
        let mut d = FiberDescriptor::new(FiberClass::Union, vec![cone.clone()], true)
            .with_note("exceptional divisor over m: two planes");
        d.components = vec![
            FiberDescriptor::new(FiberClass::RationalSurface, vec![p1], true),
            FiberDescriptor::new(FiberClass::RationalSurface, vec![p2], true),
        ];
        let cert = Certificate::UnionGlue {
            components: vec![
                plane_parametrization(&pring, &l1).map(Certificate::ConicParametrization),
                plane_parametrization(&pring, &l2).map(Certificate::ConicParametrization),
            ],
            intersections: vec![(0, 1, line.first().cloned())],
        };
        strata.push("Y1->Y:m".into());
        catalog.push(CatalogEntry { stratum: "Y1->Y:m".into(), descriptor: d, certificate: Some(cert) });
    }
    for (k, q) in quadrics.into_iter().enumerate() {
        let name = format!("Z->Y1:P{k}");
        strata.push(name.clone());
        let pt = quadric::rational_point(&q, &all, seed.wrapping_add(k as u64));
        let line = pt.as_ref().and_then(|x| quadric::lines_through(&q, &all, x).into_iter().next().map(|d| (x.clone(), d)));
        let entry = match (pt, line) {
            (_, Some((point, direction))) => CatalogEntry {
                stratum: name,
                descriptor: FiberDescriptor::new(FiberClass::SplitQuadricSurface, vec![q], true),
                certificate: Some(Certificate::QuadricSplitness { point, direction }),
            },
            (pt, None) => {
                let map = pt.and_then(|x| crate::certifier::quadric_parametrization(&q, &x));
                CatalogEntry {
                    stratum: name,
                    descriptor: FiberDescriptor::new(FiberClass::RationalSurface, vec![q], true),
                    certificate: map.map(Certificate::ConicParametrization),
                }
            }
        };
        catalog.push(entry);
    }
    Ok(PadicReport {
        tower,
        checks,
        singular_length: len,
        singular_reduced_length: red,
        singular_points: degrees,
        residue_field: e.name(),
        strata,
        catalog,
    })
}
