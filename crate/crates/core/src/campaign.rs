//! Named verification campaigns and their JSON reports.
//!
//! A report is deterministic given the inputs and the seed, except for the
//! `timing` object and the per-claim `timing_ms` fields.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::appendix_a::{self, Check, PipelineOptions};
use crate::blowup::BlowupError;
use crate::cache::sha256_hex;
use crate::certifier::{self, CatalogEntry};
use crate::field::{FieldError, FieldSpec};
use crate::groebner::{Engine, IdealError};
use crate::instances::{self, InstanceError, NamedInstance};
use crate::lattice;
use crate::padic;
use crate::variety::{self, ProjectiveHypersurface, VarietyError};

pub const SCHEMA_VERSION: &str = "1.0.0";
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CAMPAIGNS: [&str; 5] = ["appendix-a", "appendix-c", "padic-cubic", "am-instance", "analyze"];

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error in {path} at line {line}, column {column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("resource cap: {0}")]
    Resource(String),
    #[error("{0}")]
    Instance(#[from] InstanceError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CampaignError {
    pub fn kind(&self) -> &'static str {
        match self {
            CampaignError::Config(_) => "ConfigError",
            CampaignError::Parse { .. } => "ParseError",
            CampaignError::Resource(_) => "ResourceCap",
            CampaignError::Instance(InstanceError::RetriesExhausted { .. }) => "RetriesExhausted",
            CampaignError::Instance(_) => "InstanceError",
            CampaignError::Io(_) => "IoError",
        }
    }

    /// Every campaign error is a configuration or resource problem.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

impl From<IdealError> for CampaignError {
    fn from(e: IdealError) -> Self {
        CampaignError::Resource(e.to_string())
    }
}

impl From<FieldError> for CampaignError {
    fn from(e: FieldError) -> Self {
        CampaignError::Config(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    OutOfScope,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Claim {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub witness: Value,
    pub timing_ms: f64,
}

impl Claim {
    fn new(id: &str, anchor: &str, status: Status, witness: Value, ms: f64) -> Self {
        Claim { id: id.into(), anchor: anchor.into(), status, witness, timing_ms: ms }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Environment {
    pub field: Option<String>,
    pub seed: u64,
    pub retries: usize,
    pub cache: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub total_ms: f64,
    pub cache_hits: usize,
    pub cache_misses: usize,
    pub jobs: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: String,
    pub toolkit_version: String,
    pub campaign: String,
    pub input_hashes: BTreeMap<String, String>,
    pub environment: Environment,
    pub claims: Vec<Claim>,
    pub details: Value,
    pub timing: Timing,
}

impl Report {
    /// 0 iff every claim that is not skipped or out of scope passes.
    pub fn exit_code(&self) -> i32 {
        if self.claims.iter().any(|c| c.status == Status::Fail) {
            1
        } else {
            0
        }
    }

    pub fn claim(&self, id: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.id == id)
    }

    pub fn verdicts(&self) -> Vec<(String, Status)> {
        self.claims.iter().map(|c| (c.id.clone(), c.status)).collect()
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// The report without timing fields, as compared by the determinism check.
    pub fn deterministic_value(&self) -> Value {
        strip_timing(self.to_value())
    }

    pub fn to_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("report serializes") + "\n"
    }
}

pub fn strip_timing(v: Value) -> Value {
    match v {
        Value::Object(m) => Value::Object(
            m.into_iter().filter(|(k, _)| k != "timing" && k != "timing_ms").map(|(k, v)| (k, strip_timing(v))).collect(),
        ),
        Value::Array(a) => Value::Array(a.into_iter().map(strip_timing).collect()),
        other => other,
    }
}

/// Parses `qq`, `fp:<p>` or `fq:<p>:<k>`.
pub fn parse_field(s: &str) -> Result<FieldSpec, CampaignError> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    let num = |t: &str| t.parse::<u64>().map_err(|_| CampaignError::Config(format!("bad number {t:?} in field {s:?}")));
    let field = match parts.as_slice() {
        ["qq"] | ["QQ"] => FieldSpec::rationals(),
        ["fp", p] => FieldSpec::prime(num(p)?)?,
        ["fq", p, k] => FieldSpec::finite(num(p)?, num(k)? as usize)?,
        _ => return Err(CampaignError::Config(format!("field must be qq, fp:<p> or fq:<p>:<k>, got {s:?}"))),
    };
    Ok(field)
}

#[derive(Clone, Debug)]
pub struct Params {
    pub field: Option<String>,
    pub seed: u64,
    pub retries: usize,
    pub path: Option<PathBuf>,
    pub jobs: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params { field: None, seed: 7, retries: instances::DEFAULT_RETRIES, path: None, jobs: 1 }
    }
}

fn ms(t: Instant) -> f64 {
    (t.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

fn hash_json(v: &Value) -> String {
    sha256_hex(serde_json::to_string(v).expect("json").as_bytes())
}

struct Run {
    claims: Vec<Claim>,
    details: Value,
    hashes: BTreeMap<String, String>,
    field: Option<String>,
}

/// Runs a campaign inside the current rayon pool.
pub fn run_campaign(name: &str, params: &Params, engine: &Engine) -> Result<Report, CampaignError> {
    let start = Instant::now();
    let (hits0, misses0) = (engine.cache_hits(), engine.cache_misses());
    let run = match name {
        "appendix-a" => appendix_a_campaign(params, engine)?,
        "appendix-c" => appendix_c_campaign()?,
        "padic-cubic" => padic_campaign(params, engine)?,
        "am-instance" => am_instance_campaign(params, engine)?,
        "analyze" => {
            let path = params.path.clone().ok_or_else(|| CampaignError::Config("analyze needs a path".into()))?;
            analyze_campaign(&path, engine)?
        }
        other => {
            return Err(CampaignError::Config(format!("unknown campaign {other:?}; expected one of {}", CAMPAIGNS.join(", "))))
        }
    };
    let mut hashes = run.hashes;
    hashes.insert(
        "params".into(),
        hash_json(&json!({"campaign": name, "field": run.field, "seed": params.seed, "retries": params.retries})),
    );
    Ok(Report {
        schema_version: SCHEMA_VERSION.into(),
        toolkit_version: TOOLKIT_VERSION.into(),
        campaign: name.into(),
        input_hashes: hashes,
        environment: Environment {
            field: run.field,
            seed: params.seed,
            retries: params.retries,
            cache: engine.cache().is_some(),
        },
        claims: run.claims,
        details: run.details,
        timing: Timing {
            total_ms: ms(start),
            cache_hits: engine.cache_hits() - hits0,
            cache_misses: engine.cache_misses() - misses0,
            jobs: params.jobs,
        },
    })
}

fn field_or(params: &Params, default: &str) -> Result<FieldSpec, CampaignError> {
    parse_field(params.field.as_deref().unwrap_or(default))
}

fn check_claims(checks: &[Check], anchors: &[(&str, &str)], t: f64) -> Vec<Claim> {
    anchors
        .iter()
        .map(|(id, anchor)| match checks.iter().find(|c| c.name == *id) {
            Some(c) => Claim::new(id, anchor, Status::from_bool(c.passed), json!(c.detail), t),
            None => Claim::new(id, anchor, Status::Skipped, json!("not reached"), t),
        })
        .collect()
}

fn certification_claims(
    engine: &Engine,
    strata: &[String],
    catalog: &[CatalogEntry],
    anchor: &str,
) -> Result<Vec<Claim>, CampaignError> {
    let t = Instant::now();
    let v = certifier::certify_morphism(engine, strata, catalog)?;
    let cert = Claim::new(
        "ch0-isomorphism",
        anchor,
        Status::from_bool(v.certified),
        json!({"uncovered": v.uncovered, "evidence": v.evidence, "entries": v.entries}),
        ms(t),
    );
    let t = Instant::now();
    let survivors = certifier::mutation_survivors(engine, strata, catalog)?;
    let pieces: usize = catalog.iter().filter_map(|e| e.certificate.as_ref()).map(|c| c.pieces()).sum();
    let mutation = Claim::new(
        "certificates-necessary",
        "pour tout point M ∈ Y(F), la fibre Z_M est une F-variété CH_0-triviale",
        Status::from_bool(v.certified && survivors.is_empty()),
        json!({"mutations": pieces, "survivors": survivors}),
        ms(t),
    );
    Ok(vec![cert, mutation])
}

fn pipeline_failure(e: BlowupError) -> Result<(String, String, String), CampaignError> {
    match e {
        BlowupError::PipelineStepFailed { step, chart, witness } => Ok((step, chart, witness)),
        BlowupError::Ideal(i) => Err(i.into()),
        other => Err(CampaignError::Config(other.to_string())),
    }
}

const A_ANCHORS: [(&str, &str); 12] = [
    ("V-odp-off-L", "Les points singuliers de la quartique V qui ne sont pas situés sur la droite L sont 9 singularités quadratiques ordinaires"),
    ("V-no-other-singular-points", "D'après le choix de l'hyperplan z_0=0, c'est le point (0:0:0:1) ∈ L"),
    ("chart-1a-exceptional", "α(1,y_1,y_2)y_3^2+1=0"),
    ("chart-1b-strict-transform", "α(y_0,1,y_2)y_3^2+β(y_0,1,y_2)y_1y_3+γ(y_0,1,y_2)y_1^2+y_0^2=0"),
    ("singular-line-above-L", "tous les points de la droite y_0=y_1=y_3=0 sont des points singuliers"),
    ("E'-generic-fiber-smooth-conic", "les fibres de l'application E'→L sont des coniques et la fibre générique est lisse"),
    ("chart-2-exceptional", "α(0,1,u_2)u_3^2+β(0,1,u_2)u_3+γ(0,1,u_2)+u_0^2=0"),
    ("smooth-above-L'", "La variété V'' est lisse en tout point au-dessus de L"),
    ("E''-generic-fiber-smooth-conic", "les fibres de l'application E''→L' sont des coniques"),
    ("odp-exceptional-smooth-quadrics", "les composantes E_1,…E_9 sont des quadriques lisses au-dessus des points singuliers quadratiques ordinaires"),
    ("V''-only-odp", "Les seules singularités de V'' sont des singularités quadratiques ordinaires"),
    ("tower-terminal", "La Q̄-variété W est projective et lisse"),
];

fn appendix_a_campaign(params: &Params, engine: &Engine) -> Result<Run, CampaignError> {
    let field = field_or(params, "fp:101")?;
    if !field.is_finite() {
        return Err(CampaignError::Config("appendix-a runs over a finite field (fp:<p> or fq:<p>:<k>)".into()));
    }
    let t = Instant::now();
    let forms = instances::construct_am_forms(engine, &field, params.seed, params.retries)?;
    let v = instances::build_v(&forms);
    let mut claims = vec![Claim::new(
        "am-forms",
        "β^2-4αγ=ε_1ε_2",
        Status::from_bool(forms.identity_defect().is_zero() && forms.tangency.passed() && forms.genericity.passed()),
        json!({"attempts": forms.attempts, "tangency": forms.tangency, "genericity": forms.genericity}),
        ms(t),
    )];
    let mut hashes = BTreeMap::new();
    hashes.insert("quartic-V".into(), hash_json(&v.to_json()));
    let t = Instant::now();
    let opts = PipelineOptions { skip_l_prime: false, seed: params.seed };
    let details = match appendix_a::run_appendix_a_pipeline(engine, &v, &opts) {
        Ok(rep) => {
            let tm = ms(t);
            claims.extend(check_claims(&rep.checks, &A_ANCHORS, tm));
            let names = rep.exceptional_names();
            let mut want: Vec<String> = (1..=9).map(|i| format!("E{i}")).collect();
            want.extend(["E'".to_string(), "E''".to_string()]);
            claims.push(Claim::new(
                "exceptional-catalog",
                "E=⊔_{i=1}^{10} E_i ... la composante E_{10} est l'union de deux surfaces E'∪E''",
                Status::from_bool(names == want),
                json!({"divisors": names, "odp_residue_degrees": rep.odp_degrees}),
                tm,
            ));
            claims.extend(certification_claims(
                engine,
                &rep.strata,
                &rep.catalog,
                "Le morphisme W → V est un CH_0-isomorphisme universel",
            )?);
            rep.to_json()
        }
        Err(e) => {
            let (step, chart, witness) = pipeline_failure(e)?;
            claims.push(Claim::new(
                "tower-terminal",
                A_ANCHORS[11].1,
                Status::Fail,
                json!({"step": step, "chart": chart, "witness": witness}),
                ms(t),
            ));
            json!({"failed_step": step})
        }
    };
    claims.push(Claim::new(
        "h4-torsion-nonzero",
        "Le groupe H^4(W_C,Z)_tors ≃ H^3(W_C,Z)_tors ≃ Br W_C est non nul",
        Status::OutOfScope,
        json!("transcendental input from Artin-Mumford; not computed"),
        0.0,
    ));
    Ok(Run { claims, details, hashes, field: Some(field.name()) })
}

/// Field independent: `--field` is ignored.
fn appendix_c_campaign() -> Result<Run, CampaignError> {
    let t = Instant::now();
    let c = lattice::build_appendix_c();
    let tm = ms(t);
    let mut claims = vec![];
    claims.push(Claim::new(
        "galois-seq-exact",
        "0 → Z → Z[G] ⊕ Z[G] → Pic(U_K) → 0",
        Status::from_bool(c.galois.exact && c.split.exact),
        json!({"split_exact": c.split.exact, "galois_exact": c.galois.exact, "image_of_one": c.galois.image_of_one}),
        tm,
    ));
    let t = Instant::now();
    let mut shapiro = vec![];
    for n in [2usize, 3, 5, 7] {
        for m in 1..=4 {
            shapiro.push(json!({"order": n, "copies": m, "vanishes": lattice::shapiro_vanishes(n, m)}));
        }
    }
    let all = shapiro.iter().all(|s| s["vanishes"] == json!(true));
    claims.push(Claim::new(
        "shapiro-vanish",
        "Par le lemme de Shapiro, Ĥ^{-1}(G,P)=0 pour tout G-module de permutation P",
        Status::from_bool(all),
        json!(shapiro),
        ms(t),
    ));
    claims.push(Claim::new(
        "pic-cokernel-rank-5",
        "0 → Z → Z[G] ⊕ Z[G] → Pic(U_K) → 0 (cokernel of rank 5)",
        Status::from_bool(c.galois.pic.rank == 5 && c.split.pic_rank == 5),
        json!({"galois_rank": c.galois.pic.rank, "split_rank": c.split.pic_rank, "pic": c.galois.pic.to_json()}),
        tm,
    ));
    claims.push(Claim::new(
        "h-minus-one-z3",
        "Ĥ^{-1}(G,Pic(U_K)) ≃ Ĥ^0(G,K[V]^×/K^×) = Ĥ^0(G,Z)= Z/3",
        Status::from_bool(c.galois.h_minus_one.invariants == vec![3] && c.galois.h_zero_of_units.invariants == vec![3]),
        json!({
            "h_minus_one": c.galois.h_minus_one.describe(),
            "h_zero": c.galois.h_zero.describe(),
            "h_zero_of_units": c.galois.h_zero_of_units.describe(),
            "herbrand": [c.galois.herbrand.0, c.galois.herbrand.1],
        }),
        tm,
    ));
    let remark_ok = c.shapiro.iter().all(|s| s.vanishes) && c.galois.h_minus_one.invariants == vec![3];
    claims.push(Claim::new(
        "remark-c2-ingredient",
        "H^1(G,Pic(Y_K)) ≃ H^1(G,Pic(U_K)) ≃ Z/3",
        Status::from_bool(remark_ok),
        json!(c.remark_chain),
        tm,
    ));
    claims.push(Claim::new(
        "not-retract-rational",
        "En particulier X n'est pas rétracte k-rationnelle",
        Status::OutOfScope,
        json!("unramified Brauer class and retract rationality are not computed"),
        0.0,
    ));
    let details = json!({
        "split": c.split,
        "galois": {
            "divisors": c.galois.divisors.to_json(),
            "pic": c.galois.pic.to_json(),
            "image_of_one": c.galois.image_of_one,
        },
        "notes": c.notes,
    });
    Ok(Run { claims, details, hashes: BTreeMap::new(), field: None })
}

const P_ANCHORS: [(&str, &str); 8] = [
    ("one-singular-closed-point-of-degree-3", "trois points singuliers, avec x=y=0, conjugués entre eux sous l'action du groupe de Galois de E/F ... Ceci définit un unique point fermé m de Y"),
    ("exceptional-over-m-two-planes", "l'image réciproque de m est l'union de deux E-surfaces lisses E-rationnelles"),
    ("planes-meet-in-a-line", "d'intersection une courbe L ≃ P^1_E"),
    ("three-singular-points-on-the-line", "Y_1 a trois points singuliers P_i, i=1,2,3, de corps résiduel E, situés sur L"),
    ("galois-stable-centers", "Soit Z → Y_1 l'éclatement des trois points P_i"),
    ("exceptional-over-P-smooth-quadrics", "l'image réciproque de chaque P_i est une E-surface projective lisse E-rationnelle"),
    ("Z-smooth", "On vérifie que Z est lisse sur F"),
    ("tower-terminal", "la flèche composée Z → Y_1 → Y est une désingularisation"),
];

fn padic_campaign(params: &Params, engine: &Engine) -> Result<Run, CampaignError> {
    let field = field_or(params, "fp:2")?;
    let p = match field.kind() {
        crate::field::FieldKind::Prime(p) => *p as u64,
        _ => return Err(CampaignError::Config("padic-cubic takes the residue field as fp:<p>".into())),
    };
    let y = instances::build_padic_special_fiber(p)?;
    let mut hashes = BTreeMap::new();
    hashes.insert("padic-cubic-special-fiber".into(), hash_json(&y.to_json()));
    let t = Instant::now();
    let mut claims = vec![];
    let details = match padic::run_padic_pipeline(engine, &y, p, params.seed) {
        Ok(rep) => {
            claims.extend(check_claims(&rep.checks, &P_ANCHORS, ms(t)));
            claims.extend(certification_claims(
                engine,
                &rep.strata,
                &rep.catalog,
                "La flèche Z → Y_1 est donc un CH_0-isomorphisme universel de F-variétés",
            )?);
            rep.to_json()
        }
        Err(e) => {
            let (step, chart, witness) = pipeline_failure(e)?;
            claims.push(Claim::new(
                "tower-terminal",
                P_ANCHORS[7].1,
                Status::Fail,
                json!({"step": step, "chart": chart, "witness": witness}),
                ms(t),
            ));
            json!({"failed_step": step})
        }
    };
    claims.push(Claim::new(
        "not-universally-ch0-trivial",
        "n'est pas universellement CH_0-triviale, et qui n'est donc pas rétracte rationnelle",
        Status::OutOfScope,
        json!("the p-adic lift and the specialization argument are not modeled"),
        0.0,
    ));
    Ok(Run { claims, details, hashes, field: Some(field.name()) })
}

fn am_instance_campaign(params: &Params, engine: &Engine) -> Result<Run, CampaignError> {
    let field = field_or(params, "fp:101")?;
    let seeds: Vec<u64> = (0..3).map(|i| params.seed.wrapping_add(i)).collect();
    let t = Instant::now();
    let forms = seeds
        .par_iter()
        .map(|&s| instances::construct_am_forms(engine, &field, s, params.retries))
        .collect::<Result<Vec<_>, _>>()?;
    let tm = ms(t);
    let mut claims = vec![];
    let per_seed: Vec<Value> = forms
        .iter()
        .map(|f| json!({"seed": f.seed, "attempts": f.attempts, "identity_zero": f.identity_defect().is_zero(), "tangency": f.tangency}))
        .collect();
    claims.push(Claim::new(
        "am-forms",
        "il existe deux formes homogènes β et γ, de degrés respectifs 3 et 4",
        Status::Pass,
        json!(per_seed),
        tm,
    ));
    claims.push(Claim::new(
        "am-identity",
        "β^2-4αγ=ε_1ε_2",
        Status::from_bool(forms.iter().all(|f| f.identity_defect().is_zero())),
        json!(forms.iter().map(|f| f.identity_defect().is_zero()).collect::<Vec<_>>()),
        tm,
    ));
    claims.push(Claim::new(
        "tangency-profile",
        "chacune tangente à A en trois points ... s'intersectent en 9 points, deux à deux distincts",
        Status::from_bool(forms.iter().all(|f| f.tangency.passed())),
        json!(forms.iter().map(|f| &f.tangency).collect::<Vec<_>>()),
        tm,
    ));
    let s = instances::build_s(&forms[0]);
    let mut hashes = BTreeMap::new();
    hashes.insert("quartic-S".into(), hash_json(&s.to_json()));
    let t = Instant::now();
    let sc = variety::singular_scheme(engine, &s.hypersurface)?;
    let odp = if sc.zero_dimensional { Some(variety::classify_odp(engine, &s.hypersurface, &sc)?) } else { None };
    let ok = sc.degree == Some(10) && odp.as_ref().is_some_and(|o| o.all_odp);
    claims.push(Claim::new(
        "s-singular-degree-10",
        "le point P_0=(0:0:0:1) et les neuf points",
        Status::from_bool(ok),
        json!({"degree": sc.degree, "radical_degree": sc.radical_degree, "odp": odp}),
        ms(t),
    ));
    let t = Instant::now();
    let g = s.hypersurface.equation();
    let comps = variety::m_components(g)
        .into_iter()
        .map(|c| variety::projective_scheme(engine, &c))
        .collect::<Result<Vec<_>, _>>()?;
    claims.push(Claim::new(
        "m-finite",
        "L'ensemble M … est fini",
        Status::from_bool(comps.iter().all(|c| c.zero_dimensional)),
        json!(comps.iter().map(|c| json!({"zero_dimensional": c.zero_dimensional, "degree": c.degree})).collect::<Vec<_>>()),
        ms(t),
    ));
    let details = json!({"seeds": seeds, "instance": s.to_json()});
    Ok(Run { claims, details, hashes, field: Some(field.name()) })
}

/// Reads a hypersurface JSON file; malformed input is a `ParseError` with its location.
pub fn load_hypersurface(path: &std::path::Path) -> Result<(ProjectiveHypersurface, String), CampaignError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CampaignError::Parse {
        path: shown.clone(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let h = ProjectiveHypersurface::from_json(&value).map_err(|e| {
        let message = match e {
            VarietyError::Parse(m) => m,
            other => other.to_string(),
        };
        CampaignError::Parse { path: shown.clone(), line: 0, column: 0, message }
    })?;
    Ok((h, sha256_hex(text.as_bytes())))
}

fn analyze_campaign(path: &std::path::Path, engine: &Engine) -> Result<Run, CampaignError> {
    let (h, digest) = load_hypersurface(path)?;
    let mut hashes = BTreeMap::new();
    hashes.insert("instance".into(), digest);
    let t = Instant::now();
    let sc = variety::singular_scheme(engine, &h)?;
    let mut claims = vec![Claim::new(
        "singular-scheme",
        "Jacobian criterion on every affine chart",
        Status::Pass,
        json!({"zero_dimensional": sc.zero_dimensional, "degree": sc.degree, "radical_degree": sc.radical_degree, "empty": sc.is_empty()}),
        ms(t),
    )];
    let t = Instant::now();
    let odp_claim = if sc.is_empty() {
        Claim::new("all-singularities-odp", "ordinary double point test", Status::Skipped, json!("smooth"), 0.0)
    } else if !sc.zero_dimensional {
        Claim::new("all-singularities-odp", "ordinary double point test", Status::Skipped, json!("positive-dimensional singular locus"), 0.0)
    } else {
        let odp = variety::classify_odp(engine, &h, &sc)?;
        Claim::new("all-singularities-odp", "ordinary double point test", Status::from_bool(odp.all_odp), json!(odp), ms(t))
    };
    claims.push(odp_claim);
    let details = json!({"hypersurface": h.to_json(), "degree": h.degree(), "ambient_dim": h.ambient_dim()});
    Ok(Run { claims, details, hashes, field: Some(h.field().name()) })
}

/// Named instances for `instances export`.
pub fn export_instances(engine: &Engine, field: Option<&str>, seed: u64, retries: usize) -> Result<Vec<NamedInstance>, CampaignError> {
    let f = parse_field(field.unwrap_or("fp:101"))?;
    let forms = instances::construct_am_forms(engine, &f, seed, retries)?;
    let mut out = vec![instances::build_s(&forms), instances::build_v(&forms)];
    let cubic_base = match f.kind() {
        crate::field::FieldKind::Prime(p) if *p != 3 => f.clone(),
        _ => FieldSpec::prime(7)?,
    };
    let k = FieldSpec::finite_extension(&cubic_base, 3, "t")?;
    out.push(instances::build_brauer_cubic(&instances::frobenius_action(&k)?)?);
    out.push(instances::build_padic_special_fiber(2)?);
    Ok(out)
}
