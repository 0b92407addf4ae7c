//! Picard iteration for small outgoing data and its contraction trace.

use outwave::experiments::{local_outgoing_velocity, smooth_step};
use outwave::nonlinear::{picard_solve, PicardTrace, Sign, SolverConfig};
use outwave::{RadialField, RadialGrid, Result, StatePair};

pub fn run_example() -> Result<PicardTrace> {
    let g = RadialGrid::new(8.0, 1025)?;
    let u0 = RadialField::from_fn(g, |r| 0.5 * smooth_step(r - 1.0) * smooth_step(3.5 - r));
    let s = StatePair::new(u0.clone(), local_outgoing_velocity(&u0)?)?;
    let cfg = SolverConfig::new(g, 6, Sign::Defocusing, 2.0);
    Ok(picard_solve(&s, &StatePair::zeros(g), &cfg)?.trace)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let t = run_example()?;
    println!("converged {} after {} iterations", t.converged, t.iterations);
    for (k, r) in t.ratios.iter().enumerate() {
        println!("  ratio {k}: {r:.4}");
    }
    Ok(())
}
