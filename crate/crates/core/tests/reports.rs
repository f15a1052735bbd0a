use moisil::harness::{emit_report, generate_corpus, identity_suite, SuiteConfig, VerificationReport};

fn run(seed: u64) -> VerificationReport {
    let corpus = generate_corpus(seed, 5, "spherical").unwrap();
    identity_suite(&corpus, &SuiteConfig::default()).unwrap()
}

#[test]
fn same_seed_gives_identical_reports() {
    let mut a = run(7);
    let mut b = run(7);
    a.timestamp = 0;
    b.timestamp = 0;
    assert_eq!(a.to_json(), b.to_json());
    assert!(a.pass);
}

#[test]
fn different_seeds_differ() {
    let mut a = run(7);
    let mut b = run(8);
    a.timestamp = 0;
    b.timestamp = 0;
    assert_ne!(a.to_json(), b.to_json());
}

#[test]
fn emitted_report_parses_back() {
    let report = run(3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    emit_report(&report, &path).unwrap();
    let back = VerificationReport::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, report);
    assert!(back.diagnostics.iter().any(|d| d.id == "lame_factorization_sign"));
}
