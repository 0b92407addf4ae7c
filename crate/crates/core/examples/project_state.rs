//! Outgoing and incoming parts of a state pair.

use outwave::projections::{is_outgoing, pair_norm, project};
use outwave::{RadialField, RadialGrid, Result, StatePair};

pub fn run_example() -> Result<(f64, f64, f64)> {
    let g = RadialGrid::new(16.0, 4096)?;
    let bump = |c: f64| move |r: f64| (-((r - c) / 0.6).powi(2)).exp();
    let s = StatePair::new(RadialField::from_fn(g, bump(5.0)), RadialField::from_fn(g, bump(6.0)))?;
    let p = project(&s)?;
    let (_, res_out) = is_outgoing(&p.out_part, 1e-6)?;
    let share = pair_norm(&p.out_part)? / pair_norm(&s)?;
    Ok((p.residual, res_out, share))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let (res, out, share) = run_example()?;
    println!("|P+ s + P- s - s| / |s|   {res:.3e}");
    println!("outgoing residual of P+ s {out:.3e}");
    println!("|P+ s| / |s|              {share:.4}");
    Ok(())
}
