use std::path::Path;

use outwave::experiments::{run_experiment, Scenario};

fn shipped() -> Vec<std::path::PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    files.sort();
    files
}

#[test]
fn shipped_scenarios_run_clean() {
    let files = shipped();
    assert!(files.len() >= 6);
    for f in files {
        let sc = Scenario::load(&f).unwrap();
        let rep = run_experiment(&sc).unwrap();
        assert!(rep.errors.is_empty(), "{}: {:?}", f.display(), rep.errors);
        assert!(rep.passed(), "{}: {:?}", f.display(), rep.verdicts);
        assert!(!rep.smallness.is_empty(), "{} reports no smallness parameter", f.display());
        for q in rep.quantities.values() {
            assert!(!q.units.is_empty());
        }
    }
}

#[test]
fn reports_are_byte_identical() {
    let f = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/far_support.toml");
    let sc = Scenario::load(&f).unwrap();
    let a = run_experiment(&sc).unwrap().to_json().unwrap();
    let b = run_experiment(&sc).unwrap().to_json().unwrap();
    assert_eq!(a, b);
}
