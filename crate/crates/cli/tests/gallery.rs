use poisson_compact_cli::gallery::{entries, run_entry, Config};

#[test]
fn every_entry_meets_its_expected_profile() {
    let cfg = Config { grid: 500, ..Config::default() };
    for e in entries() {
        let (art, r) = run_entry(&e, &cfg).unwrap();
        let failing: Vec<String> = r.checks.iter().filter(|c| !c.pass).map(|c| c.to_string()).collect();
        assert!(r.pass, "{}: ranks {:?}, {failing:?}", r.name, r.rank_histogram);
        assert_eq!(art.provenance.seed, cfg.seed);
    }
}

#[test]
fn entry_names_are_unique() {
    let mut names: Vec<&str> = entries().iter().map(|e| e.name).collect();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), entries().len());
}
