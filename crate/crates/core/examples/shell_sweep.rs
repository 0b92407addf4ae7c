//! Duhamel term of thin outgoing shells against the predicted eps power.

use outwave::experiments::{run_shell_sweep, ExperimentReport, ShellSweepConfig};
use outwave::Result;

pub fn run_example() -> Result<ExperimentReport> {
    let mut cfg = ShellSweepConfig::new(6, 1.0 / 9.0, 1.0, ShellSweepConfig::dyadic(3, 6));
    cfg.picard = false;
    cfg.horizon = 1.5;
    run_shell_sweep(&cfg)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let rep = run_example()?;
    for f in &rep.fits {
        println!("{}: slope {:.4} +- {:.4}", f.name, f.slope, f.half_width);
    }
    Ok(())
}
