use capflow::verify::*;

fn small() -> VerifyConfig {
    VerifyConfig {
        samples: 2000,
        mobius_samples: 200,
        ..VerifyConfig::default()
    }
}

#[test]
fn suite_names_round_trip() {
    for s in Suite::ALL.iter().chain([Suite::All].iter()) {
        assert_eq!(Suite::parse(s.name()).unwrap(), *s);
        assert_eq!(serde_json::to_value(s).unwrap(), s.name());
    }
    assert!(Suite::parse("af_thmb").is_err());
}

#[test]
fn sampled_suites_are_deterministic() {
    let a = run_suite(Suite::Identities, &small()).unwrap();
    let b = run_suite(Suite::Identities, &small()).unwrap();
    assert_eq!(a, b);
    assert!(a.iter().all(|r| r.passed()), "{}", summary_table(&a));
    let m = run_suite(Suite::Mobius, &small()).unwrap();
    assert!(m.iter().all(|r| r.passed()));
}

#[test]
fn fixture_config_from_json() {
    let cfg: VerifyConfig = serde_json::from_str(
        r#"{
            "seed": 3,
            "fixtures_only": true,
            "fixtures": [
                {"kind": "flat_disk", "n": 5},
                {"kind": "quermass", "label": "bad", "n": 3, "w": [1, 1, 1, 0.1, 2]},
                {"kind": "surface", "n": 3, "initial": {"kind": "cap", "radius": 0.8}}
            ]
        }"#,
    )
    .unwrap();
    let reports = run_suite(Suite::AfMain, &cfg).unwrap();
    let ids: Vec<&str> = reports.iter().map(|r| r.id.as_str()).collect();
    assert_eq!(reports.len(), 4, "{ids:?}");
    assert!(reports[..2].iter().all(|r| r.passed() && r.margin.abs() <= 1e-8));
    assert_eq!(reports[2].verdict, Verdict::Fail);
    assert!(reports[2].margin < 0.0);
    // an exact cap is an equality case up to discretization
    assert!(reports[3].passed(), "{}", summary_table(&reports));

    assert!(serde_json::from_str::<VerifyConfig>(r#"{"sample": 3}"#).is_err());
    let bad = VerifyConfig { n_beta: 2, ..VerifyConfig::default() };
    assert!(run_suite(Suite::Identities, &bad).is_err());
}

#[test]
fn reports_serialize_with_digests() {
    let r = run_suite(Suite::Mobius, &small()).unwrap();
    let doc = reports_json(&r);
    let arr = doc["reports"].as_array().unwrap();
    assert_eq!(arr.len(), r.len());
    for (v, rep) in arr.iter().zip(&r) {
        assert_eq!(v["inputs_digest"].as_str().unwrap().len(), 16);
        assert_eq!(v["verdict"], "pass");
        assert_eq!(v["id"], rep.id.as_str());
    }
    let table = summary_table(&r);
    assert_eq!(table.lines().count(), r.len() + 1);
}

#[test]
fn pointwise_fixtures_pass() {
    let r = run_suite(Suite::Pointwise, &VerifyConfig::default()).unwrap();
    assert!(r.iter().all(|x| x.passed()), "{}", summary_table(&r));
    assert!(r.iter().any(|x| x.id.starts_with("height_estimate")));
}
