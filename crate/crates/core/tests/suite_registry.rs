use sclab_core::suite::{cmd_verify, find, registry, ParamPair, SuiteConfig};
use sclab_core::Error;

fn only(names: &[&str], n: usize, band: usize, seeds: Vec<u64>) -> SuiteConfig {
    let mut c = SuiteConfig::new(n, band, seeds);
    c.which = Some(names.iter().map(|s| s.to_string()).collect());
    c
}

#[test]
fn algebraic_jacobi_passes_on_three_seeds() {
    let r = cmd_verify(&only(&["jacobi_algebraic"], 1, 2, vec![1, 2, 3])).unwrap();
    assert_eq!((r.summary.total, r.summary.passed), (3, 3));
    assert!(r.results.iter().all(|e| e.residual == "0"));
}

#[test]
fn empty_selection_gives_an_empty_report() {
    let r = cmd_verify(&only(&[], 1, 1, vec![1, 2])).unwrap();
    assert!(r.results.is_empty());
    assert_eq!((r.summary.total, r.summary.passed, r.summary.failed), (0, 0, 0));
    assert!(r.all_passed());
}

#[test]
fn unknown_names_list_the_registry() {
    match cmd_verify(&only(&["jacobi_algebraic", "no_such_identity"], 1, 1, vec![1])) {
        Err(Error::UnknownIdentity { name, available }) => {
            assert_eq!(name, "no_such_identity");
            for id in registry() {
                assert!(available.contains(id.name));
            }
        }
        other => panic!("expected an unknown-identity error, got {other:?}"),
    }
    assert!(find("sigma_cocycle").is_ok());
}

#[test]
fn unsupported_dimensions_and_bands_are_rejected() {
    for (n, band) in [(0, 1), (3, 1), (1, 0)] {
        assert!(matches!(cmd_verify(&SuiteConfig::new(n, band, vec![1])), Err(Error::Invalid(_))), "n = {n}, band = {band}");
    }
}

#[test]
fn registry_names_are_unique_and_sorted() {
    let names: Vec<&str> = registry().iter().map(|i| i.name).collect();
    let mut sorted = names.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(names, sorted);
    assert!(registry().iter().all(|i| !i.statement.is_empty()));
}

#[test]
fn reports_are_sorted_and_byte_stable() {
    let cfg = only(&["sigma_cocycle", "delta_shift", "riemann_trace"], 1, 1, vec![9, 2, 5]);
    let a = cmd_verify(&cfg).unwrap();
    let b = cmd_verify(&cfg).unwrap();
    assert_eq!(a.to_text(), b.to_text());
    let keys: Vec<(String, u64)> = a.results.iter().map(|r| (r.identity.clone(), r.seed)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(!a.to_text().contains("wall_ms"));
}

#[test]
fn timing_mode_records_wall_times() {
    let mut cfg = only(&["ricci_symmetry"], 1, 1, vec![1]);
    cfg.deterministic = false;
    let r = cmd_verify(&cfg).unwrap();
    assert!(r.results[0].wall_ms.is_some());
}

#[test]
fn whole_registry_passes_on_one_seed() {
    let r = cmd_verify(&SuiteConfig::new(1, 1, vec![17])).unwrap();
    let failed: Vec<_> = r.results.iter().filter(|e| !e.passed).map(|e| format!("{}: {}", e.identity, e.residual)).collect();
    assert!(failed.is_empty(), "{failed:?}");
    assert_eq!(r.summary.total, registry().len());
}

#[test]
fn config_files_use_rational_strings() {
    let text = r#"{"n":1,"band":1,"seeds":[4],"which":["psi_intertwining"],"params":[{"s":"3/2","t":"-1/5"}]}"#;
    let cfg: SuiteConfig = serde_json::from_str(text).unwrap();
    assert_eq!(cfg.params, vec![ParamPair { s: "3/2".into(), t: "-1/5".into() }]);
    assert!(cfg.deterministic);
    let r = cmd_verify(&cfg).unwrap();
    assert!(r.all_passed());
    assert!(serde_json::from_str::<SuiteConfig>(r#"{"n":1,"band":1,"seeds":[],"extra":1}"#).is_err());
    let bad = SuiteConfig { params: vec![ParamPair { s: "x".into(), t: "1".into() }], ..SuiteConfig::new(1, 1, vec![1]) };
    assert!(cmd_verify(&bad).is_err());
}
