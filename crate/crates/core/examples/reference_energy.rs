//! Leapfrog reference solver: energy of a defocusing bump.

use outwave::experiments::smooth_step;
use outwave::nonlinear::{reference_solve, Sign, SolverConfig};
use outwave::norms::energy;
use outwave::{RadialField, RadialGrid, Result, StatePair};

pub fn run_example() -> Result<f64> {
    let g = RadialGrid::new(12.0, 2049)?;
    let u0 = RadialField::from_fn(g, |r| 0.8 * smooth_step((r - 0.5) / 1.5) * smooth_step((4.0 - r) / 1.5));
    let s = StatePair::new(u0, RadialField::zeros(g))?;
    let evo = reference_solve(&s, &SolverConfig::new(g, 6, Sign::Defocusing, 4.0))?;
    let e0 = energy(&evo.state(0), 6, Sign::Defocusing)?;
    let mut drift = 0.0f64;
    for j in 0..evo.times().len() {
        drift = drift.max((energy(&evo.state(j), 6, Sign::Defocusing)? / e0 - 1.0).abs());
    }
    Ok(drift)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    println!("relative energy drift on [0, 4]: {:.3e}", run_example()?);
    Ok(())
}
