use super::*;
use crate::linalg::Tensor3;
use crate::chart_metric::random_samples;
use crate::fixtures::{euclidean, minkowski_randers, randers_var, sphere};

fn cfg() -> AuditConfig {
    AuditConfig::default()
}

#[test]
fn case_ids_round_trip() {
    for c in CaseId::ALL {
        assert_eq!(CaseId::from_id(c.id()), Some(c));
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, format!("\"{}\"", c.id()));
    }
    assert_eq!(CaseId::from_id("eq-X"), None);
}

#[test]
fn residual_is_zero_for_zero_equals_zero() {
    assert_eq!(residual(&[0.0, 0.0], &[0.0, 0.0], 0.0), 0.0);
    assert!((residual(&[1.0], &[-1.0], 0.0) - 1.0).abs() < 1e-12);
    assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
    assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
}

#[test]
fn synthetic_q_rate_is_recovered() {
    for (seed, q0, rate) in [(1, 0.0, 0.3), (2, 0.4, -1.2), (3, 0.9, 2.0)] {
        for n in [3, 4, 5] {
            let est = synthetic_q_rate(n, q0, rate, seed, 1e-4).unwrap();
            assert!((est - rate).abs() <= 1e-4, "n={n} seed={seed}: {est} vs {rate}");
        }
    }
}

#[test]
fn probe_rejects_indefinite_deformation() {
    let base = crate::tensor_lab::synthetic_semi_c(3, 0.2, 5).unwrap();
    let def = Deformation {
        gdot: -&base.g * 1e5,
        cdot: Tensor3::zeros(3),
    };
    assert!(matches!(
        q_rate_probe(&base, &def, 1e-4),
        Err(FinslerError::ProbeStepInvalid(_))
    ));
}

#[test]
fn euclidean_is_trivial_everywhere() {
    let spec = euclidean(3);
    let out = run_audit(&spec, &random_samples(&spec, 4, 1), &CaseId::ALL, &cfg()).unwrap();
    for r in &out.reports {
        assert!(r.pass, "{}", r.case);
        assert_eq!(r.max_residual, 0.0, "{}", r.case);
        if r.requires_semi_c {
            assert_eq!(r.status, CaseStatus::TriviallySatisfied, "{}", r.case);
        }
    }
    assert_eq!(out.average_r, Some(0.0));
}

#[test]
fn sphere_collapses_torsion_links() {
    let spec = sphere(3, 1.0);
    let out = run_audit(&spec, &random_samples(&spec, 6, 2), &CaseId::ALL, &cfg()).unwrap();
    assert!((out.average_r.unwrap() - 2.0).abs() < 1e-9);
    for r in &out.reports {
        assert!(r.pass, "{} {:e}", r.case, r.max_residual);
        if r.requires_semi_c {
            assert_eq!(r.status, CaseStatus::TriviallySatisfied, "{}", r.case);
        } else {
            assert_eq!(r.status, CaseStatus::Passed, "{}", r.case);
        }
    }
    // constant curvature: Ric_ij = R g_ij exactly in the symmetric form
    assert!(out.report(CaseId::EqR).unwrap().max_residual < 1e-8);
}

#[test]
fn flat_randers_reads_zero_and_matches_direct_coefficient() {
    let spec = minkowski_randers(3);
    let samples = random_samples(&spec, 5, 3);
    let out = run_audit(&spec, &samples, &CaseId::ALL, &cfg()).unwrap();
    let eq_c = out.report(CaseId::EqC).unwrap();
    assert!(eq_c.pass);
    assert_eq!(eq_c.tag_counts(), vec![("direct".to_string(), samples.len())]);
    // κ = 3/4 against the displayed 1/4
    assert!((eq_c.variant("displayed").unwrap().max_residual - 0.5).abs() < 1e-9);
    assert_eq!(out.coefficient, Coefficient::Direct);
    let fin = out.report(CaseId::Lemma2Final).unwrap();
    assert!(fin.pass);
    for s in &fin.samples {
        assert_eq!(s.lhs_norm, 0.0);
        assert_eq!(s.tag.as_deref(), Some("q'=0e0"));
    }
    assert!(fin.divisibility.as_ref().unwrap().bounded);
    for case in SEC5_CASES {
        assert_eq!(out.report(case).unwrap().max_residual, 0.0);
    }
}

#[test]
fn varying_randers_chain() {
    let spec = randers_var(3);
    let samples = random_samples(&spec, 6, 4);
    let out = run_audit(&spec, &samples, &CaseId::ALL, &cfg()).unwrap();
    let get = |c: CaseId| out.report(c).unwrap();
    for case in [
        CaseId::EqR,
        CaseId::EqRic1,
        CaseId::EqRic,
        CaseId::EqC,
        CaseId::EqRic2,
        CaseId::EqCar,
        CaseId::EqRic3,
        CaseId::GPrime,
        CaseId::IPrime,
        CaseId::IPrimeUp,
        CaseId::YPrime,
        CaseId::HPrime,
        CaseId::HBlockRate,
        CaseId::HBlockRateContracted,
        CaseId::NormIPrime,
        CaseId::NormIPrimeUp,
    ] {
        let r = get(case);
        assert_eq!(r.evaluated, samples.len(), "{}", r.case);
        assert!(r.pass, "{} {:e}", r.case, r.max_residual);
    }
    // the literal two-R_{,i} form of the Ricci expansion is not symmetric
    assert!(!get(CaseId::EqR).variant("literal").unwrap().pass);
    // displayed κ coefficient propagates a visible error
    assert!(!get(CaseId::EqRic2).variant("other").unwrap().pass);
    // corrected closed forms hold where the displayed ones do not
    for (case, variant) in [
        (CaseId::CubedRate, "corrected"),
        (CaseId::CubedRateContracted, "corrected"),
        (CaseId::ScalarRateBlock, "corrected"),
        (CaseId::Lemma2Final, "corrected"),
        (CaseId::NormCPrime, "substitution"),
    ] {
        let r = get(case);
        assert!(!r.pass, "{}", r.case);
        assert!(r.variant(variant).unwrap().pass, "{} {variant}", r.case);
    }
    assert!(!get(CaseId::NormOmega).pass);
    // the two routes to I'_i and the Ω definitions agree
    assert!(get(CaseId::IPrime).variant("product").unwrap().max_residual < 1e-8);
    assert!(get(CaseId::NormIPrime).variant("un-normalized").unwrap().max_residual < 1e-8);
    let om = get(CaseId::NormOmega);
    assert!((om.variant("closed").unwrap().max_residual - om.max_residual).abs() < 1e-3);
    let w = get(CaseId::Lemma2Final).divisibility.clone().unwrap();
    assert!(w.bounded && w.ratio.len() >= 4);
}

#[test]
fn sign_flip_negates_rates() {
    let spec = randers_var(3);
    let out = run_audit(&spec, &random_samples(&spec, 3, 5), &LEMMA2_CHAIN, &cfg()).unwrap();
    for r in &out.reports {
        if let Some(d) = r.linearity_defect {
            assert!(d < 1e-10, "{} {d:e}", r.case);
        }
    }
    assert!(out.report(CaseId::GPrime).unwrap().linearity_defect.is_some());
}

#[test]
fn reports_are_deterministic() {
    let spec = randers_var(3);
    let samples = random_samples(&spec, 3, 6);
    let cases = [CaseId::EqRic, CaseId::Lemma2Final, CaseId::NormOmega];
    let a = run_audit(&spec, &samples, &cases, &cfg()).unwrap();
    let b = run_audit(&spec, &samples, &cases, &cfg()).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a.summary_csv(), b.summary_csv());
    assert!(a.summary_csv().starts_with("case,max_residual,rung,pass\neq-Ric,"));
}

#[test]
fn two_dimensions_reject_torsion_cases() {
    let spec = randers_var(2);
    let samples = random_samples(&spec, 2, 7);
    assert!(matches!(
        run_audit(&spec, &samples, &[CaseId::EqC], &cfg()),
        Err(FinslerError::FitIllPosed(2))
    ));
    let r = audit_eq_r(&spec, &samples, &cfg()).unwrap();
    assert!(r.pass);
}

#[test]
fn config_validation() {
    let mut c = cfg();
    c.dt_probe = 0.0;
    assert!(c.validate().is_err());
    let mut c = cfg();
    c.noise_floor = 0.5;
    assert!(c.validate().is_err());
    let parsed: AuditConfig = serde_json::from_str(r#"{"dt_probe": 1e-3}"#).unwrap();
    assert_eq!(parsed.dt_probe, 1e-3);
    assert!(serde_json::from_str::<AuditConfig>(r#"{"dt": 1e-3}"#).is_err());
}
