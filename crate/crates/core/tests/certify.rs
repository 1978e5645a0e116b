use scalneck::assembly::TunnelParams;
use scalneck::certify::{
    emit_certificate, load_certificate, main_b_stand_in, pipeline_cor_d, pipeline_cor_t, pipeline_cor_v,
    pipeline_main_a, recheck_certificate, recheck_file, spheres_needed, surgery_certificate, tunnel_certificate,
    verify_main_b_budget, Claim, IngredientMetric, PipelineOptions, Relation, Status,
};
use scalneck::metric::AmbientModel;
use scalneck::NeckError;

fn opts() -> PipelineOptions {
    PipelineOptions::default()
}

#[test]
fn cor_d_passes_with_the_requested_diameter() {
    let run = pipeline_cor_d(3, 10.0, 100.0, 0.1, &opts()).unwrap();
    let c = &run.certificate;
    assert!(c.all_pass(), "{:#?}", c.claims);
    assert!(c.global_min_r > 6.0);
    assert!(c.claim_named("diameter").unwrap().lhs >= 10.0);
    assert!(recheck_certificate(&c.to_canonical_json()).unwrap().passed());
}

#[test]
fn main_a_with_zero_diameter_is_a_degenerate_pass() {
    let m = IngredientMetric::round_sphere(3, 0.5);
    let run = pipeline_main_a(&m, None, 0.0, 3, 100.0, 0.1, &opts()).unwrap();
    assert!(run.certificate.all_pass());
}

#[test]
fn main_a_refuses_an_ingredient_on_the_floor() {
    let m = IngredientMetric::round_sphere(3, 1.0);
    let err = pipeline_main_a(&m, None, 5.0, 3, 100.0, 0.1, &opts()).unwrap_err();
    assert!(matches!(err, NeckError::IngredientFloorTooLow { .. }), "{err}");
}

#[test]
fn cor_t_handles_both_surgery_branches() {
    for (p, q) in [(1, 2), (2, 2)] {
        let run = pipeline_cor_t(p, q, 100.0, 0.1, &opts()).unwrap();
        let n = (p + q) as f64;
        assert!(run.certificate.all_pass(), "({p},{q})");
        assert!(run.certificate.global_min_r > n * (n - 1.0));
    }
}

#[test]
fn cor_v_reaches_the_volume() {
    let v = 6.0 * std::f64::consts::PI.powi(2);
    let run = pipeline_cor_v(v, 3, 100.0, 0.1, &opts()).unwrap();
    let c = &run.certificate;
    assert!(c.all_pass());
    assert!(c.volume >= v);
    let m = spheres_needed(v, 3);
    let omega = 2.0 * std::f64::consts::PI.powi(2);
    assert!(((m / 2) as f64) * omega > v);
    let lhs = c.claim_named("sphere_count").unwrap().lhs;
    assert!((lhs - ((m / 2) as f64) * omega).abs() < 1e-10 * lhs);
}

#[test]
fn main_b_needs_a_hemisphere() {
    let err = verify_main_b_budget(None, 0.05, 10.0, 3, None, 100.0, &opts()).unwrap_err();
    assert!(matches!(err, NeckError::MissingIngredient(_)));
}

#[test]
fn main_b_budget_with_the_stand_in() {
    let h = main_b_stand_in(3, 0.05);
    let run = verify_main_b_budget(Some(&h), 0.05, 10.0, 3, None, 100.0, &opts()).unwrap();
    assert!(run.certificate.all_pass(), "{:#?}", run.certificate.claims);
    for k in 1..=5 {
        assert!(run.certificate.claim_named(&format!("link_{k}")).is_some());
    }
}

#[test]
fn tunnel_and_surgery_certificates_pass() {
    let params = TunnelParams::symmetric(0.1, 2.0, 100.0, 6.0, 3).unwrap();
    assert!(tunnel_certificate(&params, &opts()).unwrap().certificate.all_pass());
    let model = AmbientModel::product_of_rounds(1, 3, 1.0, 1.0);
    assert!(surgery_certificate(&model, 0.05, 1.0, &opts())
        .unwrap()
        .certificate
        .all_pass());
}

#[test]
fn emission_is_byte_identical_and_round_trips() {
    let a = pipeline_cor_d(3, 4.0, 100.0, 0.1, &opts()).unwrap().certificate;
    let b = pipeline_cor_d(3, 4.0, 100.0, 0.1, &opts()).unwrap().certificate;
    assert_eq!(a.to_canonical_json(), b.to_canonical_json());
    let back = load_certificate(&a.to_canonical_json()).unwrap();
    assert_eq!(back.to_canonical_json(), a.to_canonical_json());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    emit_certificate(&a, &path).unwrap();
    assert!(recheck_file(&path).unwrap().passed());
}

#[test]
fn tampering_is_detected() {
    let text = pipeline_cor_d(3, 4.0, 100.0, 0.1, &opts())
        .unwrap()
        .certificate
        .to_canonical_json();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["global_min_r"] = serde_json::json!(100.0);
    let rep = recheck_certificate(&v.to_string()).unwrap();
    assert!(!rep.digest_ok);
    assert!(!rep.passed());
}

#[test]
fn tight_strict_claims_are_inconclusive() {
    let c = Claim::new("x", "a > b", 1.0 + 1e-12, Relation::Gt, 1.0);
    assert_eq!(c.status, Status::Inconclusive);
    assert!(!c.pass);
    let c = Claim::with_margin("x", "a > b", 1.0 + 1e-6, Relation::Gt, 1.0, 1e-5);
    assert_eq!(c.status, Status::Inconclusive);
}

#[test]
fn raised_tolerance_is_recorded() {
    let o = PipelineOptions {
        strict_margin: 1e-3,
        ..opts()
    };
    let c = pipeline_cor_d(3, 4.0, 100.0, 0.1, &o).unwrap().certificate;
    assert_eq!(c.tolerances.strict_margin, 1e-3);
    assert!(c.claims.iter().all(|cl| cl.margin >= 1e-9));
}
