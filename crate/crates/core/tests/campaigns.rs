use std::io::Write;

use ch0kit::cache::GbCache;
use ch0kit::campaign::*;
use ch0kit::field::FieldSpec;
use ch0kit::groebner::{ring_of, Budget, Engine};
use ch0kit::poly::MultiPoly;
use ch0kit::variety::ProjectiveHypersurface;

fn params(field: Option<&str>, seed: u64) -> Params {
    Params { field: field.map(String::from), seed, ..Params::default() }
}

fn run(name: &str, p: &Params) -> Report {
    run_campaign(name, p, &Engine::default()).unwrap()
}

#[test]
fn appendix_c_claims_all_pass() {
    let r = run("appendix-c", &Params::default());
    let ids: Vec<&str> = r.claims.iter().filter(|c| c.status == Status::Pass).map(|c| c.id.as_str()).collect();
    assert_eq!(ids, ["galois-seq-exact", "shapiro-vanish", "pic-cokernel-rank-5", "h-minus-one-z3", "remark-c2-ingredient"]);
    assert_eq!(r.claim("not-retract-rational").unwrap().status, Status::OutOfScope);
    assert_eq!(r.exit_code(), 0);
    assert!(r.claims.iter().all(|c| !c.anchor.is_empty()));
}

#[test]
fn appendix_a_and_padic_pass_with_out_of_scope_boundaries() {
    for (name, field, boundary) in [("appendix-a", "fp:101", "h4-torsion-nonzero"), ("padic-cubic", "fp:2", "not-universally-ch0-trivial")] {
        let r = run(name, &params(Some(field), 7));
        assert_eq!(r.exit_code(), 0, "{name}: {:?}", r.verdicts());
        assert_eq!(r.claim(boundary).unwrap().status, Status::OutOfScope);
        assert_eq!(r.claim("ch0-isomorphism").unwrap().status, Status::Pass);
        assert_eq!(r.claim("certificates-necessary").unwrap().status, Status::Pass);
    }
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["appendix-c", "appendix-a", "padic-cubic"] {
        let p = params(None, 7);
        let cold = Engine::new(Budget::default(), Some(GbCache::new(dir.path())));
        let a = run_campaign(name, &p, &cold).unwrap();
        let warm = Engine::new(Budget::default(), Some(GbCache::new(dir.path())));
        let b = run_campaign(name, &p, &warm).unwrap();
        let c = run_campaign(name, &p, &Engine::default()).unwrap();
        let bytes = |r: &Report| serde_json::to_string(&r.deterministic_value()).unwrap();
        assert_eq!(bytes(&a), bytes(&b), "{name}");
        // without a cache only the environment differs
        let body = |r: &Report| {
            let v = r.deterministic_value();
            serde_json::to_string(&(&v["claims"], &v["details"], &v["input_hashes"])).unwrap()
        };
        assert_eq!(body(&a), body(&c), "{name}");
        if name != "appendix-c" {
            assert!(warm.cache_hits() > 0, "{name}");
        }
    }
}

#[test]
fn exhausted_retries_are_an_error_with_exit_code_two() {
    let mut p = params(Some("fp:7"), 999999);
    p.retries = 3;
    let e = run_campaign("appendix-a", &p, &Engine::default()).unwrap_err();
    assert_eq!(e.kind(), "RetriesExhausted");
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn field_flags_parse() {
    assert_eq!(parse_field("qq").unwrap().name(), "QQ");
    assert_eq!(parse_field("fp:101").unwrap().name(), "GF(101)");
    assert_eq!(parse_field("fq:2:3").unwrap().order().unwrap(), 8u32.into());
    for bad in ["fp:100", "fp", "gf:7", "fq:2:x", ""] {
        assert_eq!(parse_field(bad).unwrap_err().kind(), "ConfigError", "{bad}");
    }
    assert_eq!(run_campaign("bogus", &Params::default(), &Engine::default()).unwrap_err().kind(), "ConfigError");
}

fn write_json(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    std::fs::File::create(&path).unwrap().write_all(text.as_bytes()).unwrap();
    path
}

#[test]
fn analyze_fermat_quartic_is_smooth() {
    let f = FieldSpec::prime(101).unwrap();
    let r = ring_of(&f, &["z0", "z1", "z2", "z3", "z4"]);
    let fermat = (0..5).fold(MultiPoly::zero(&r), |acc, i| acc.add(&MultiPoly::var(&r, i).pow(4)));
    let h = ProjectiveHypersurface::new(fermat).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = write_json(&dir, "fermat.json", &h.to_json().to_string());
    let mut p = Params::default();
    p.path = Some(path);
    let rep = run("analyze", &p);
    assert_eq!(rep.claim("singular-scheme").unwrap().witness["empty"], true);
    assert_eq!(rep.claim("all-singularities-odp").unwrap().status, Status::Skipped);
    assert_eq!(rep.exit_code(), 0);
}

#[test]
fn analyze_exported_quartic_s_finds_ten_odps() {
    let engine = Engine::default();
    let list = export_instances(&engine, Some("fp:101"), 7, 100).unwrap();
    let s = list.iter().find(|i| i.tag.name() == "quartic-S").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = write_json(&dir, "s.json", &s.to_json().to_string());
    let mut p = Params::default();
    p.path = Some(path);
    let rep = run_campaign("analyze", &p, &engine).unwrap();
    assert_eq!(rep.claim("singular-scheme").unwrap().witness["degree"], 10);
    assert_eq!(rep.claim("all-singularities-odp").unwrap().status, Status::Pass);
}

#[test]
fn malformed_json_is_a_parse_error_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let mut p = Params::default();
    p.path = Some(write_json(&dir, "bad.json", "{\n  \"field\": [1,\n"));
    let e = run_campaign("analyze", &p, &Engine::default()).unwrap_err();
    assert_eq!(e.kind(), "ParseError");
    assert_eq!(e.exit_code(), 2);
    match e {
        CampaignError::Parse { line, .. } => assert_eq!(line, 3),
        other => panic!("{other}"),
    }
    p.path = Some(write_json(&dir, "shape.json", "{\"equation\": 1}"));
    let e = run_campaign("analyze", &p, &Engine::default()).unwrap_err();
    assert_eq!(e.kind(), "ParseError");
}
