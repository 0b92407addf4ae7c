//! Lifespan scaling: amplitude `a` on `[0, c a^{-N/2}]`.

use outwave::experiments::{local_outgoing_velocity, plateau};
use outwave::nonlinear::{local_existence_probe, ProbeRow, Sign};
use outwave::{RadialField, RadialGrid, Result, StatePair};

pub fn run_example(c: f64) -> Result<Vec<ProbeRow>> {
    let g = RadialGrid::new(4.0, 1025)?;
    let u0 = RadialField::from_fn(g, |r| plateau(r, 0.5, 1.5, 0.5).0);
    let s = StatePair::new(u0.clone(), local_outgoing_velocity(&u0)?)?;
    local_existence_probe(&s, 6, Sign::Defocusing, c, &[1.0, 2.0, 4.0])
}

#[allow(dead_code)]
fn main() -> Result<()> {
    for c in [0.5, 5.0] {
        for row in run_example(c)? {
            println!("c = {c}  a = {}  T = {:.3e}  converged {}", row.amplitude, row.horizon, row.converged);
        }
    }
    Ok(())
}
