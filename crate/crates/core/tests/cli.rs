use std::fs;
use std::process::Command;

use outwave::experiments::{local_outgoing_velocity, plateau};
use outwave::{RadialField, RadialGrid, StatePair};

fn outwave() -> Command {
    Command::new(env!("CARGO_BIN_EXE_outwave"))
}

#[test]
fn project_writes_parts_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let g = RadialGrid::new(8.0, 1025).unwrap();
    let u0 = RadialField::from_fn(g, |r| plateau(r, 1.0, 3.0, 0.5).0);
    let s = StatePair::new(u0.clone(), local_outgoing_velocity(&u0).unwrap()).unwrap();
    let input = dir.path().join("pair.csv");
    s.write_csv(fs::File::create(&input).unwrap()).unwrap();
    let out = dir.path().join("proj");
    let st = outwave().arg("project").arg(&input).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("projection.json")).unwrap()).unwrap();
    assert!(summary["residual"].as_f64().unwrap() < 1e-10);
    let incoming = StatePair::read_csv(fs::File::open(out.join("in.csv")).unwrap()).unwrap();
    assert!(incoming.pos.sup_abs() < 1e-6);
}

#[test]
fn norms_reads_field_csv() {
    let dir = tempfile::tempdir().unwrap();
    let g = RadialGrid::new(10.0, 1025).unwrap();
    let u = RadialField::from_fn(g, |r| (-r * r).exp());
    let path = dir.path().join("u.csv");
    u.save(&path).unwrap();
    let out = outwave().arg("norms").arg(&path).args(["--p", "2,inf"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["values"]["Lp(p=inf)"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["values"]["Lp(p=2)"].is_number());
}

#[test]
fn choquet_reports_argmax() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bumps.json");
    fs::write(&path, r#"[{"center":[5,0,0],"coeff":1,"profile":"gaussian","scale":1}]"#).unwrap();
    let out = outwave().arg("choquet").arg(&path).args(["--alpha", "1", "--p", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["metadata"]["argmax_center"][0].as_f64().unwrap() - 5.0).abs() < 1e-6);
}

#[test]
fn simulate_outputs_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim");
    let st = outwave()
        .args(["simulate", "--method", "picard", "--T", "1", "--grid-n", "513", "--rmax", "8", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    for f in ["report.json", "series.csv", "picard.csv", "picard_trace.json", "norms.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let csv = fs::read_to_string(out.join("picard.csv")).unwrap();
    assert!(csv.starts_with("r,t,value\n"));

    let st = outwave().args(["simulate", "--method", "rk4"]).status().unwrap();
    assert_eq!(st.code(), Some(2));
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[scenario]\nlabel = \"x\"\nfamily = \"nope\"\n").unwrap();
    let st = outwave().arg("simulate").arg("--scenario").arg(&bad).status().unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn failing_verdict_exits_one() {
    // a focusing run far past the lifespan of its data cannot converge
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("big.toml");
    fs::write(
        &sc,
        "[scenario]\nlabel = \"large\"\nfamily = \"gaussian\"\namp = 6.0\n\n[solver]\nsign = \"focusing\"\nT = 2.0\nn = 513\nr_max = 8.0\n\n[diagnostics]\nnames = [\"norms\"]\n",
    )
    .unwrap();
    let st = outwave().arg("simulate").arg("--scenario").arg(&sc).arg("--out").arg(dir.path().join("o")).status().unwrap();
    assert_eq!(st.code(), Some(1));
}
