//! Blowups of affine hypersurface charts along coordinate centers.
//!
//! A center is a set of chart variables (after a recorded translation or base
//! change). Each center variable serves once as pivot: the others are replaced
//! by `y_i * y_pivot` and the strict transform is the total transform divided by
//! the largest possible power of the pivot.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::field::{FieldElement, FieldSpec};
use crate::groebner::{Engine, Ideal, IdealError, IdealResult};
use crate::poly::{Monomial, MultiPoly, PolyError, PolyRing, Ring};
use crate::zerodim;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlowupError {
    #[error("pipeline step {step} failed in chart {chart}: {witness}")]
    PipelineStepFailed { step: String, chart: String, witness: String },
    #[error("bad center: {0}")]
    BadCenter(String),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl From<crate::field::FieldError> for BlowupError {
    fn from(e: crate::field::FieldError) -> Self {
        BlowupError::Ideal(e.into())
    }
}

pub type BlowupResult<T> = Result<T, BlowupError>;

/// Where a blowup happens.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CenterSpec {
    /// Vanishing of chart variables, after the recorded change of coordinates.
    CoordinateSubspace { chart: String, vars: Vec<String>, change: String },
    /// Points of a reduced zero-dimensional scheme, rational over `splitting_field`.
    ReducedPointSet { chart: String, ideal: Vec<String>, splitting_field: String, points: usize },
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub id: String,
    pub parent: String,
    pub pivot: usize,
    /// Image of every parent variable, keyed by parent variable name.
    pub substitution: BTreeMap<String, MultiPoly>,
    pub equation: MultiPoly,
    /// Strict transform restricted to `pivot = 0` (still in the chart ring).
    pub exceptional: MultiPoly,
    pub multiplicity: u32,
}

impl Chart {
    pub fn ring(&self) -> &Ring {
        self.equation.ring()
    }

    pub fn pivot_name(&self) -> &str {
        &self.ring().vars[self.pivot]
    }

    pub fn to_json(&self) -> Value {
        let subst: BTreeMap<&String, String> = self.substitution.iter().map(|(k, v)| (k, v.to_string())).collect();
        json!({
            "id": self.id,
            "parent": self.parent,
            "vars": self.ring().vars,
            "pivot": self.pivot_name(),
            "substitution": subst,
            "strict_transform": self.equation.to_string(),
            "exceptional": self.exceptional.to_string(),
            "multiplicity": self.multiplicity,
        })
    }
}

#[derive(Clone, Debug)]
pub struct BlowupStep {
    pub center: CenterSpec,
    pub charts: Vec<Chart>,
    pub warnings: Vec<String>,
}

/// Blows up `{x_c = 0 : c in center}` in the affine chart with equation `f`.
/// `names` gives the chart ring variable names (one per parent variable).
pub fn blowup_coordinate_center(
    f: &MultiPoly,
    center: &[usize],
    names: &[&str],
    parent_id: &str,
) -> BlowupResult<BlowupStep> {
    let parent = f.ring();
    let n = parent.arity();
    if names.len() != n {
        return Err(BlowupError::BadCenter(format!("{} names for {} variables", names.len(), n)));
    }
    let mut sorted = center.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != center.len() || center.iter().any(|&c| c >= n) || center.len() < 2 {
        return Err(BlowupError::BadCenter(format!("{center:?}")));
    }
    let mut warnings = vec![];
    let on_center = center.iter().fold(f.clone(), |g, &c| g.specialize(c, &f.field().zero()));
    if !on_center.is_zero() {
        warnings.push("NotInsideVariety: equation does not vanish on the center".to_string());
    }
    let ring = PolyRing::new(&parent.field, names)?;
    let charts = center
        .iter()
        .map(|&p| {
            let images: Vec<MultiPoly> = (0..n)
                .map(|i| {
                    if i != p && center.contains(&i) {
                        MultiPoly::var(&ring, i).mul(&MultiPoly::var(&ring, p))
                    } else {
                        MultiPoly::var(&ring, i)
                    }
                })
                .collect();
            let total = f.substitute_all(&images, &ring)?;
            let m = total.var_valuation(p);
            let equation = total.divide_by_var_power(p, m);
            let exceptional = equation.specialize(p, &ring.field.zero());
            let substitution = parent.vars.iter().cloned().zip(images).collect();
            Ok(Chart {
                id: format!("{parent_id}/{}", names[p]),
                parent: parent_id.to_string(),
                pivot: p,
                substitution,
                equation,
                exceptional,
                multiplicity: m,
            })
        })
        .collect::<BlowupResult<Vec<_>>>()?;
    let center_spec = CenterSpec::CoordinateSubspace {
        chart: parent_id.to_string(),
        vars: center.iter().map(|&c| parent.vars[c].clone()).collect(),
        change: "none".into(),
    };
    Ok(BlowupStep { center: center_spec, charts, warnings })
}

/// Blows up the origin of the chart (every variable in the center).
pub fn blowup_origin(f: &MultiPoly, names: &[&str], parent_id: &str) -> BlowupResult<BlowupStep> {
    let center: Vec<usize> = (0..f.ring().arity()).collect();
    blowup_coordinate_center(f, &center, names, parent_id)
}

/// Checks the transition between the charts with pivots `a.pivot` and `b.pivot`:
/// the strict transform of `a`, rewritten in the coordinates of `b`, equals a
/// monomial unit times the strict transform of `b`.
pub fn check_gluing(a: &Chart, b: &Chart, center: &[usize]) -> BlowupResult<bool> {
    let ring = b.ring().clone();
    let (i, j) = (a.pivot, b.pivot);
    let mut names = ring.vars.clone();
    names.push("_d".into());
    let big = PolyRing::from_names(&ring.field, names)?;
    let d = MultiPoly::var(&big, ring.arity());
    let v = |k: usize| MultiPoly::var(&big, k);
    // chart a coordinates in terms of chart b coordinates, with d = 1 / y_i
    let images: Vec<MultiPoly> = (0..ring.arity())
        .map(|k| {
            if k == i {
                v(i).mul(&v(j))
            } else if k == j {
                d.clone()
            } else if center.contains(&k) {
                v(k).mul(&d)
            } else {
                v(k)
            }
        })
        .collect();
    let moved = a.equation.substitute_all(&images, &big)?;
    let dv = ring.arity();
    let top = moved.degree_in(dv);
    // multiply by y_i^top and set d * y_i = 1
    let terms: Vec<(Monomial, FieldElement)> = moved
        .terms()
        .iter()
        .map(|(m, c)| {
            let mut e: Vec<u32> = (0..ring.arity()).map(|k| m.exp(k)).collect();
            e[i] += top - m.exp(dv);
            (Monomial::from_exps(&e), c.clone())
        })
        .collect();
    let cleared = MultiPoly::from_terms(&ring, terms);
    let m = a.multiplicity;
    let yi = MultiPoly::var(&ring, i);
    let lhs = cleared.mul(&yi.pow(m.saturating_sub(top)));
    let rhs = b.equation.mul(&yi.pow(top.saturating_sub(m)));
    Ok(lhs == rhs)
}

/// Every ordered pair of charts in a step.
pub fn check_all_gluings(step: &BlowupStep) -> BlowupResult<bool> {
    let center: Vec<usize> = step.charts.iter().map(|c| c.pivot).collect();
    for a in &step.charts {
        for b in &step.charts {
            if a.pivot != b.pivot && !check_gluing(a, b, &center)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `⟨f, ∂f⟩ + extra`.
pub fn singular_ideal(f: &MultiPoly, extra: &[MultiPoly]) -> Ideal {
    let mut gens = vec![f.clone()];
    gens.extend(f.gradient());
    gens.extend(extra.iter().cloned());
    Ideal::new(f.ring(), gens).expect("same ring")
}

/// Smoothness of a chart along its exceptional divisor.
#[derive(Clone, Debug, Serialize)]
pub struct ChartVerdict {
    pub chart: String,
    pub multiplicity: u32,
    pub strict_not_divisible: bool,
    pub smooth_above_center: bool,
    /// Generators of the radical of the singular locus above the center, when not smooth.
    pub singular_radical: Vec<String>,
    /// Later tower step whose center is this chart's singular locus.
    pub resolved_by: Option<String>,
}

pub fn chart_verdict(engine: &Engine, chart: &Chart) -> IdealResult<ChartVerdict> {
    let pivot = MultiPoly::var(chart.ring(), chart.pivot);
    let ideal = singular_ideal(&chart.equation, &[pivot]);
    let smooth = engine.is_unit_ideal(&ideal)?;
    let singular_radical = if smooth {
        vec![]
    } else {
        let gb = engine.groebner(&ideal, crate::poly::MonomialOrder::Grevlex)?;
        let rad = if gb.is_zero_dimensional() { zerodim::radical(engine, &ideal)? } else { ideal.clone() };
        let gb = engine.groebner(&rad, crate::poly::MonomialOrder::Grevlex)?;
        gb.basis().iter().map(|g| g.to_string()).collect()
    };
    Ok(ChartVerdict {
        chart: chart.id.clone(),
        multiplicity: chart.multiplicity,
        strict_not_divisible: chart.equation.var_valuation(chart.pivot) == 0,
        smooth_above_center: smooth,
        singular_radical,
        resolved_by: None,
    })
}

pub fn step_verdicts(engine: &Engine, step: &BlowupStep) -> IdealResult<Vec<ChartVerdict>> {
    step.charts.par_iter().map(|c| chart_verdict(engine, c)).collect()
}

/// Translates a point to the origin: `f(x + pt)`, computed over `field` (which
/// must contain the coordinates and the coefficients of `f`).
pub fn translate_to_origin(f: &MultiPoly, pt: &[FieldElement], field: &FieldSpec) -> Result<MultiPoly, PolyError> {
    let ring = PolyRing::from_names(field, f.ring().vars.clone())?;
    let images: Vec<MultiPoly> = pt
        .iter()
        .enumerate()
        .map(|(i, c)| MultiPoly::var(&ring, i).add(&MultiPoly::constant(&ring, c.clone())))
        .collect();
    f.substitute_all(&images, &ring)
}

/// Whether `g` lies in the radical of the ideal (the tower invariant that a center
/// sits inside the current singular locus).
pub fn center_in_singular_locus(engine: &Engine, f: &MultiPoly, center: &[MultiPoly]) -> IdealResult<bool> {
    let c = Ideal::new(f.ring(), center.to_vec())?;
    for s in singular_ideal(f, &[]).gens() {
        if !engine.radical_membership(s, &c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Tower state: append-only list of steps with their verdicts.
#[derive(Clone, Debug, Default)]
pub struct ResolutionTower {
    pub steps: Vec<TowerStep>,
}

#[derive(Clone, Debug)]
pub struct TowerStep {
    pub name: String,
    pub blowups: Vec<BlowupStep>,
    pub verdicts: Vec<ChartVerdict>,
    pub gluing_ok: bool,
    pub center_in_singular_locus: bool,
    pub exceptional: Vec<Value>,
}

impl ResolutionTower {
    /// Every chart is smooth above its center or handed on to a later step.
    pub fn terminal(&self) -> bool {
        self.steps.iter().all(|s| {
            s.gluing_ok && s.center_in_singular_locus && s.verdicts.iter().all(|v| v.smooth_above_center || v.resolved_by.is_some())
        })
    }

    /// First chart that is singular above its center and not handed on.
    pub fn first_failure(&self) -> Option<(&str, &ChartVerdict)> {
        self.steps.iter().find_map(|s| {
            s.verdicts.iter().find(|v| !v.smooth_above_center && v.resolved_by.is_none()).map(|v| (s.name.as_str(), v))
        })
    }

    pub fn chart_count(&self) -> usize {
        self.steps.iter().flat_map(|s| &s.blowups).map(|b| b.charts.len()).sum()
    }

    pub fn to_json(&self) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| {
                json!({
                    "name": s.name,
                    "centers": s.blowups.iter().map(|b| serde_json::to_value(&b.center).unwrap()).collect::<Vec<_>>(),
                    "warnings": s.blowups.iter().flat_map(|b| b.warnings.clone()).collect::<Vec<_>>(),
                    "charts": s.blowups.iter().flat_map(|b| b.charts.iter().map(|c| c.to_json())).collect::<Vec<_>>(),
                    "verdicts": s.verdicts,
                    "gluing_ok": s.gluing_ok,
                    "center_in_singular_locus": s.center_in_singular_locus,
                    "exceptional": s.exceptional,
                })
            })
            .collect();
        json!({ "terminal": self.terminal(), "steps": steps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::ring_of;

    fn f101() -> FieldSpec {
        FieldSpec::prime(101).unwrap()
    }

    #[test]
    fn cone_at_origin() {
        let f = f101();
        let r = ring_of(&f, &["x", "y", "z"]);
        let v = |i| MultiPoly::var(&r, i);
        let q = v(0).pow(2).add(&v(1).pow(2)).add(&v(2).pow(2));
        let step = blowup_origin(&q, &["x", "v", "w"], "A").unwrap();
        let c = &step.charts[0];
        assert_eq!(c.multiplicity, 2);
        assert_eq!(c.equation.to_string(), "v^2 + w^2 + 1");
        assert!(step.warnings.is_empty());
        assert!(check_all_gluings(&step).unwrap());
        let e = Engine::default();
        assert!(step_verdicts(&e, &step).unwrap().iter().all(|v| v.smooth_above_center));
    }

    #[test]
    fn cartier_center_warns() {
        let f = f101();
        let r = ring_of(&f, &["x", "y"]);
        let g = MultiPoly::var(&r, 0).add(&MultiPoly::one(&r));
        let step = blowup_origin(&g, &["x", "y"], "A").unwrap();
        assert_eq!(step.warnings.len(), 1);
    }

    #[test]
    fn gluing_detects_corruption() {
        let f = f101();
        let r = ring_of(&f, &["x", "y", "z"]);
        let v = |i| MultiPoly::var(&r, i);
        let q = v(0).mul(&v(1)).sub(&v(2).pow(3));
        let mut step = blowup_coordinate_center(&q, &[0, 1], &["a", "b", "z"], "A").unwrap();
        assert!(check_all_gluings(&step).unwrap());
        let one = MultiPoly::one(step.charts[0].ring());
        step.charts[0].equation = step.charts[0].equation.add(&one);
        assert!(!check_all_gluings(&step).unwrap());
    }

    #[test]
    fn odp_exceptional_is_smooth_quadric() {
        let f = f101();
        let r = ring_of(&f, &["x", "y", "z", "w"]);
        let v = |i| MultiPoly::var(&r, i);
        let q = (0..4).fold(MultiPoly::zero(&r), |a, i| a.add(&v(i).pow(2)));
        let step = blowup_origin(&q, &["x", "y", "z", "w"], "A").unwrap();
        let e = Engine::default();
        for c in &step.charts {
            // exceptional 1 + (sum of the other squares) is smooth
            let ex = &c.exceptional;
            let others: Vec<usize> = (0..4).filter(|&i| i != c.pivot).collect();
            let gens: Vec<MultiPoly> = std::iter::once(ex.clone()).chain(others.iter().map(|&i| ex.partial_derivative(i))).collect();
            assert!(e.is_unit_ideal(&Ideal::new(c.ring(), gens).unwrap()).unwrap());
        }
    }
}
