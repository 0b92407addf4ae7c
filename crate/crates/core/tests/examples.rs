#[path = "../examples/reduction_roundtrip.rs"]
mod reduction_roundtrip;
#[path = "../examples/project_state.rs"]
mod project_state;
#[path = "../examples/free_flow.rs"]
mod free_flow;
#[path = "../examples/norms_report.rs"]
mod norms_report;
#[path = "../examples/reference_energy.rs"]
mod reference_energy;
#[path = "../examples/picard_small_data.rs"]
mod picard_small_data;
#[path = "../examples/local_existence.rs"]
mod local_existence;
#[path = "../examples/shell_sweep.rs"]
mod shell_sweep;
#[path = "../examples/choquet_measure.rs"]
mod choquet_measure;
#[path = "../examples/lorentz_choquet.rs"]
mod lorentz_choquet;
#[path = "../examples/closed_loop.rs"]
mod closed_loop;
#[path = "../examples/scenario_run.rs"]
mod scenario_run;

use std::f64::consts::PI;

#[test]
fn reduction_example() {
    let (err, ratio) = reduction_roundtrip::run_example().unwrap();
    assert!(err < 1e-10);
    assert!((ratio - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-4);
}

#[test]
fn projection_example() {
    let (res, out, share) = project_state::run_example().unwrap();
    assert!(res < 1e-10 && out < 1e-6);
    assert!(share > 0.0 && share < 1.0);
}

#[test]
fn free_flow_example() {
    let (gap, slope) = free_flow::run_example().unwrap();
    assert!(gap < 1e-6);
    assert!(slope < -0.85 && slope > -1.0, "{slope}");
}

#[test]
fn norms_example() {
    let rep = norms_report::run_example().unwrap();
    assert!((rep.get("Lp(p=inf)").unwrap() - 1.0).abs() < 1e-12);
    // |exp(-r^2/2)|_L2 = pi^(3/4)
    assert!((rep.get("Lp(p=2)").unwrap() / PI.powf(0.75) - 1.0).abs() < 1e-6);
    assert!(rep.get("Hdot(s=1)").is_some() && rep.get("Hdot(s=1.166667)").is_some());
}

#[test]
fn reference_example() {
    assert!(reference_energy::run_example().unwrap() < 1e-3);
}

#[test]
fn picard_example() {
    let t = picard_small_data::run_example().unwrap();
    assert!(t.converged && t.ratios.iter().all(|r| *r < 0.5));
}

#[test]
fn local_existence_example() {
    assert!(local_existence::run_example(0.5).unwrap().iter().all(|r| r.converged));
    assert!(local_existence::run_example(5.0).unwrap().iter().any(|r| !r.converged));
}

#[test]
fn shell_sweep_example() {
    let rep = shell_sweep::run_example().unwrap();
    assert!(rep.errors.is_empty() && rep.passed());
}

#[test]
fn choquet_measure_example() {
    let (one, two, exact) = choquet_measure::run_example().unwrap();
    assert!((one / exact - 1.0).abs() < 1e-6);
    assert!(two > one && two < 2.0 * one);
}

#[test]
fn lorentz_example() {
    let (weak, ratio, atoms) = lorentz_choquet::run_example().unwrap();
    assert!(weak > 0.0);
    assert!((ratio - 2f64.powf((1.0 / 3.0 - 3.0) / 8.0)).abs() < 1e-3);
    assert!(atoms / weak < 4.0 && weak / atoms < 4.0);
}

#[test]
fn closed_loop_example() {
    let (ratios, s, rel) = closed_loop::run_example().unwrap();
    assert!(ratios.windows(2).all(|w| (w[0] / w[1] / 64.0 - 1.0).abs() < 0.2));
    assert!(s < 0.1 && rel < 1.5);
}

#[test]
fn scenario_example_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = scenario_run::run_example(Some(dir.path())).unwrap();
    let first = std::fs::read(dir.path().join("report.json")).unwrap();
    let b = scenario_run::run_example(Some(dir.path())).unwrap();
    assert_eq!(first, std::fs::read(dir.path().join("report.json")).unwrap());
    assert_eq!(a, b);
    assert!(a.passed() && a.errors.is_empty());
    assert!(dir.path().join("plotdata/profiles.csv").exists());
}
