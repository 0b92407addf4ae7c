//! A declarative scenario run end to end, emitted to a directory.

use outwave::experiments::{emit_report, run_experiment, ExperimentReport, Scenario};
use outwave::Result;

pub const SCENARIO: &str = r#"
[scenario]
label = "small gaussian"
family = "gaussian"
amp = 0.3
center = 3.0
width = 0.5

[solver]
N = 6
T = 1.5
n = 1025
r_max = 8.0
method = "both"

[diagnostics]
names = ["norms", "dispersion", "energy", "profiles"]
times = [0.0, 1.5]
"#;

pub fn run_example(out: Option<&std::path::Path>) -> Result<ExperimentReport> {
    let rep = run_experiment(&Scenario::from_toml(SCENARIO)?)?;
    if let Some(dir) = out {
        emit_report(&rep, dir)?;
    }
    Ok(rep)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("outwave-scenario");
    let rep = run_example(Some(&dir))?;
    for v in &rep.verdicts {
        println!("{}", v.line());
    }
    println!("written to {}", dir.display());
    Ok(())
}
