use std::process::ExitCode;
use std::time::{Duration, Instant};

use ch0kit::appendix_a::{require_terminal, run_appendix_a_pipeline, PipelineOptions};
use ch0kit::campaign::{run_campaign, Params, Report, CAMPAIGNS};
use ch0kit::certifier::{certify_fiber, certify_morphism, mutation_survivors, Certificate, FiberClass, FiberDescriptor};
use ch0kit::field::{FieldElement, FieldSpec};
use ch0kit::groebner::{ring_of, truncated_membership, Engine, Ideal};
use ch0kit::instances::{build_padic_special_fiber, build_s, build_v, construct_am_forms, monomials_of_degree, DEFAULT_RETRIES};
use ch0kit::lattice::{big_mul, build_appendix_c, determinant_big, identity, shapiro_vanishes, smith_normal_form, tate_h, to_big, GLattice, IntMatrix};
use ch0kit::padic::run_padic_pipeline;
use ch0kit::poly::{MultiPoly, Ring};
use ch0kit::variety::{classify_odp, m_components, projective_scheme, singular_scheme};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(t.elapsed() < limit, format!("took {:.2?}, limit {limit:?}", t.elapsed()))
}

fn f101() -> FieldSpec {
    FieldSpec::prime(101).unwrap()
}

fn appendix_c() -> Outcome {
    let t = Instant::now();
    let c = build_appendix_c();
    ensure(c.galois.pic.rank == 5, format!("Pic rank {}", c.galois.pic.rank))?;
    ensure(c.galois.h_minus_one.invariants == vec![3], format!("H^-1 = {}", c.galois.h_minus_one.describe()))?;
    within(t, Duration::from_secs(1))?;
    Ok(format!("rank 5, H^-1 = {}", c.galois.h_minus_one.describe()))
}

fn shapiro() -> Outcome {
    let t = Instant::now();
    for n in [2, 3, 5, 7] {
        for m in 1..=4 {
            ensure(shapiro_vanishes(n, m), format!("Z[G]^{m}, |G| = {n}"))?;
            let l = GLattice::free(n, m);
            ensure(tate_h(&l, 0).is_trivial() && tate_h(&l, -1).is_trivial(), format!("direct Tate groups, n = {n}, m = {m}"))?;
        }
    }
    within(t, Duration::from_secs(1))?;
    Ok("16 free modules".into())
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn snf_suite() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(31337);
    for case in 0..200 {
        let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let m: IntMatrix = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-100i128..=100)).collect()).collect();
        let s = smith_normal_form(&m, c);
        let fail = |what: &str| format!("case {case}: {what} for {m:?}");
        ensure(big_mul(&big_mul(&s.u, &to_big(&m)), &s.v) == s.d, fail("UMV != D"))?;
        ensure(determinant_big(&s.u).abs() == BigInt::one() && determinant_big(&s.v).abs() == BigInt::one(), fail("not unimodular"))?;
        ensure(big_mul(&s.u, &s.u_inv) == to_big(&identity(r)) && big_mul(&s.v, &s.v_inv) == to_big(&identity(c)), fail("bad inverse"))?;
        let off_diag = (0..r).any(|i| (0..c).any(|j| i != j && !s.d[i][j].is_zero()));
        ensure(!off_diag, fail("D not diagonal"))?;
        let inv = s.invariants();
        ensure(inv.windows(2).all(|w| w[1] % w[0] == 0) && inv.iter().all(|&d| d > 0), fail("divisibility chain"))?;
        let g = m.iter().flatten().fold(0, |g, &x| gcd(g, x));
        ensure(inv.first().copied().unwrap_or(0) == g, fail("d1 != gcd"))?;
    }
    within(t, Duration::from_secs(10))?;
    Ok("200 matrices".into())
}

fn random_form(r: &Ring, d: u32, rng: &mut ChaCha8Rng) -> MultiPoly {
    let mut terms = vec![];
    for m in monomials_of_degree(r.arity(), d) {
        if rng.gen_bool(0.6) {
            terms.push((m, r.field.random(rng)));
        }
    }
    MultiPoly::from_terms(r, terms)
}

fn groebner_oracle(engine: &Engine) -> Outcome {
    let t = Instant::now();
    let r = ring_of(&f101(), &["x", "y", "z"]);
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let (mut checks, mut members) = (0, 0);
    for _ in 0..50 {
        let n = rng.gen_range(1..=3);
        let gens: Vec<MultiPoly> = (0..n).map(|_| random_form(&r, rng.gen_range(1..=3), &mut rng)).filter(|g| !g.is_zero()).collect();
        if gens.is_empty() {
            continue;
        }
        let ideal = Ideal::new(&r, gens.clone()).map_err(|e| e.to_string())?;
        for _ in 0..4 {
            let d = rng.gen_range(1..=8);
            let mut member = MultiPoly::zero(&r);
            for g in &gens {
                let dg = g.total_degree().unwrap();
                if dg <= d {
                    member = member.add(&g.mul(&random_form(&r, d - dg, &mut rng)));
                }
            }
            for cand in [member, random_form(&r, d, &mut rng)] {
                let gb = engine.contains(&cand, &ideal).map_err(|e| e.to_string())?;
                let la = truncated_membership(&cand, &gens, 8);
                ensure(gb == la, format!("disagreement on {cand} in {gens:?}"))?;
                checks += 1;
                members += gb as usize;
            }
        }
    }
    within(t, Duration::from_secs(60))?;
    Ok(format!("{checks} membership tests, {members} members, 0 disagreements"))
}

fn am_forms(engine: &Engine) -> Outcome {
    let t = Instant::now();
    for seed in [7, 8, 9] {
        let f = construct_am_forms(engine, &f101(), seed, DEFAULT_RETRIES).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(f.identity_defect().is_zero(), format!("seed {seed}: identity fails"))?;
        let tg = &f.tangency;
        ensure(tg.conic_cubic == [(Some(6), Some(3)), (Some(6), Some(3))], format!("seed {seed}: conic-cubic {:?}", tg.conic_cubic))?;
        ensure(tg.cubic_cubic == (Some(9), Some(9)), format!("seed {seed}: cubic-cubic {:?}", tg.cubic_cubic))?;
    }
    within(t, Duration::from_secs(120))?;
    Ok("seeds 7, 8, 9".into())
}

fn quartic_s(engine: &Engine) -> Outcome {
    let t = Instant::now();
    let forms = construct_am_forms(engine, &f101(), 7, DEFAULT_RETRIES).map_err(|e| e.to_string())?;
    let s = build_s(&forms);
    let sc = singular_scheme(engine, &s.hypersurface).map_err(|e| e.to_string())?;
    ensure(sc.degree == Some(10), format!("singular degree {:?}", sc.degree))?;
    let odp = classify_odp(engine, &s.hypersurface, &sc).map_err(|e| e.to_string())?;
    ensure(odp.all_odp && odp.total_degree == 10, "not all singular points are ODPs")?;
    for comp in m_components(s.hypersurface.equation()) {
        let ps = projective_scheme(engine, &comp).map_err(|e| e.to_string())?;
        ensure(ps.zero_dimensional, "M has a positive-dimensional component")?;
    }
    within(t, Duration::from_secs(300))?;
    Ok("10 ODPs, M finite".into())
}

fn appendix_a(engine: &Engine) -> Outcome {
    let t = Instant::now();
    let v = build_v(&construct_am_forms(engine, &f101(), 7, DEFAULT_RETRIES).map_err(|e| e.to_string())?);
    let r = run_appendix_a_pipeline(engine, &v, &PipelineOptions { skip_l_prime: false, seed: 7 }).map_err(|e| e.to_string())?;
    require_terminal(&r.tower).map_err(|e| e.to_string())?;
    for c in &r.checks {
        ensure(c.passed, format!("{}: {}", c.name, c.detail))?;
    }
    for name in ["chart-1a-exceptional", "chart-1b-strict-transform", "singular-line-above-L"] {
        ensure(r.check(name).is_some(), format!("missing check {name}"))?;
    }
    let mut want: Vec<String> = (1..=9).map(|i| format!("E{i}")).collect();
    want.extend(["E'".to_string(), "E''".to_string()]);
    ensure(r.exceptional_names() == want, format!("exceptional catalog {:?}", r.exceptional_names()))?;
    within(t, Duration::from_secs(600))?;
    Ok(format!("{} checks, {} charts", r.checks.len(), r.tower.chart_count()))
}

fn padic(engine: &Engine) -> Outcome {
    let t = Instant::now();
    let y = build_padic_special_fiber(2).map_err(|e| e.to_string())?;
    let r = run_padic_pipeline(engine, &y, 2, 1).map_err(|e| e.to_string())?;
    ensure(r.singular_points == vec![3], format!("singular closed points {:?}", r.singular_points))?;
    ensure(r.tower.terminal(), "tower not terminal")?;
    for c in &r.checks {
        ensure(c.passed, format!("{}: {}", c.name, c.detail))?;
    }
    let v = certify_morphism(engine, &r.strata, &r.catalog).map_err(|e| e.to_string())?;
    ensure(v.certified, format!("uncovered {:?}", v.uncovered))?;
    within(t, Duration::from_secs(300))?;
    Ok(format!("residue field {}, {} catalog entries", r.residue_field, r.catalog.len()))
}

fn projective_points(f: &FieldSpec) -> Vec<Vec<FieldElement>> {
    let els = f.elements(64).unwrap();
    let mut out = vec![vec![f.zero(), f.zero(), f.one()]];
    for b in &els {
        out.push(vec![f.zero(), f.one(), b.clone()]);
    }
    for b in &els {
        for c in &els {
            out.push(vec![f.one(), b.clone(), c.clone()]);
        }
    }
    out
}

fn certifier_soundness(engine: &Engine) -> Outcome {
    let forms = construct_am_forms(engine, &f101(), 7, DEFAULT_RETRIES).map_err(|e| e.to_string())?;
    let a = run_appendix_a_pipeline(engine, &build_v(&forms), &PipelineOptions { skip_l_prime: false, seed: 7 }).map_err(|e| e.to_string())?;
    let y = build_padic_special_fiber(2).map_err(|e| e.to_string())?;
    let p = run_padic_pipeline(engine, &y, 2, 1).map_err(|e| e.to_string())?;
    let mut pieces = 0;
    for (name, strata, catalog) in [("appendix-a", &a.strata, &a.catalog), ("p-adic", &p.strata, &p.catalog)] {
        ensure(certify_morphism(engine, strata, catalog).map_err(|e| e.to_string())?.certified, format!("{name} catalog rejected"))?;
        let survivors = mutation_survivors(engine, strata, catalog).map_err(|e| e.to_string())?;
        ensure(survivors.is_empty(), format!("{name}: mutations {survivors:?} still accepted"))?;
        pieces += catalog.iter().filter_map(|e| e.certificate.as_ref()).map(|c| c.pieces()).sum::<usize>();
    }

    let mut rng = ChaCha8Rng::seed_from_u64(49);
    let mut conics = 0;
    for (p, k) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (2, 4), (5, 2), (3, 3), (7, 2)] {
        let f = FieldSpec::finite(p, k).map_err(|e| e.to_string())?;
        let r = ring_of(&f, &["x", "y", "z"]);
        let pts = projective_points(&f);
        for _ in 0..3 {
            let v = |i| MultiPoly::var(&r, i);
            let mut q = MultiPoly::zero(&r);
            for i in 0..3 {
                for j in i..3 {
                    q = q.add(&v(i).mul(&v(j)).scale(&f.random(&mut rng)));
                }
            }
            if q.is_zero() {
                continue;
            }
            let vanish = |g: &MultiPoly, x: &[FieldElement]| f.is_zero(&g.evaluate(x, &f).unwrap());
            let grad = q.gradient();
            let desc = FiberDescriptor::new(FiberClass::SmoothConic, vec![q.clone()], true);
            let on: Vec<&Vec<FieldElement>> = pts.iter().filter(|x| vanish(&q, x)).collect();
            let smooth = !on.iter().any(|x| grad.iter().all(|g| vanish(g, x)));
            for x in &pts {
                let accepted = certify_fiber(engine, &desc, Some(&Certificate::RationalPoint(x.to_vec()))).map_err(|e| e.to_string())?.accepted;
                let expected = smooth && vanish(&q, x);
                ensure(accepted == expected, format!("conic {q} over {}: point {x:?} accepted = {accepted}", f.name()))?;
            }
            conics += 1;
        }
    }
    Ok(format!("{pieces} certificate pieces all necessary, {conics} conics match exhaustive search"))
}

fn run_with_jobs(name: &str, params: &Params, jobs: usize) -> Result<Report, String> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| e.to_string())?;
    let params = Params { jobs, ..params.clone() };
    pool.install(|| run_campaign(name, &params, &Engine::default())).map_err(|e| format!("{name}: {e}"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let s = build_s(&construct_am_forms(&Engine::default(), &f101(), 7, DEFAULT_RETRIES).map_err(|e| e.to_string())?);
    let s_path = dir.path().join("quartic-S.json");
    std::fs::write(&s_path, serde_json::to_string_pretty(&s.to_json()).unwrap()).map_err(|e| e.to_string())?;
    for name in CAMPAIGNS {
        let params = Params { path: (name == "analyze").then(|| s_path.clone()), ..Params::default() };
        let a = run_with_jobs(name, &params, 1)?;
        let b = run_with_jobs(name, &params, 1)?;
        let c = run_with_jobs(name, &params, 8)?;
        let bytes = |r: &Report| serde_json::to_string_pretty(&r.deterministic_value()).unwrap();
        ensure(bytes(&a) == bytes(&b), format!("{name}: repeated runs differ"))?;
        ensure(a.verdicts() == c.verdicts(), format!("{name}: --jobs 1 and --jobs 8 verdicts differ"))?;
        ensure(bytes(&a) == bytes(&c), format!("{name}: --jobs 1 and --jobs 8 reports differ"))?;
    }
    Ok(format!("{} campaigns", CAMPAIGNS.len()))
}

fn main() -> ExitCode {
    let engine = Engine::default();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("appendix-c Picard lattice rank 5 with H^-1 = Z/3", Box::new(appendix_c)),
        ("Shapiro vanishing for Z[G]^m", Box::new(shapiro)),
        ("Smith normal form suite", Box::new(snf_suite)),
        ("Groebner membership against linear algebra", Box::new(|| groebner_oracle(&engine))),
        ("Artin-Mumford identity and tangency profile", Box::new(|| am_forms(&engine))),
        ("singular scheme of S and finiteness of M", Box::new(|| quartic_s(&engine))),
        ("appendix-a resolution pipeline over F101", Box::new(|| appendix_a(&engine))),
        ("p-adic cubic pipeline for p = 2", Box::new(|| padic(&engine))),
        ("certifier soundness", Box::new(|| certifier_soundness(&engine))),
        ("determinism of campaign reports", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (desc, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(note) => println!("criterion {}: PASS {desc} ({note}; {:.2?})", i + 1, t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {desc} ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
