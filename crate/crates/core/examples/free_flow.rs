//! Free flow of an outgoing shell against the closed form, and its decay.

use outwave::experiments::{fit_loglog, local_outgoing_velocity, plateau};
use outwave::freeflow::{outgoing_closed_form, propagate_free};
use outwave::norms::lp_norm;
use outwave::{RadialField, RadialGrid, Result, StatePair};

pub fn run_example() -> Result<(f64, f64)> {
    let g = RadialGrid::new(9.0, 4096)?;
    let u0 = RadialField::from_fn(g, |r| plateau(r, 1.0, 2.0, 0.3).0);
    let s = StatePair::new(u0.clone(), local_outgoing_velocity(&u0)?)?;
    let flow = propagate_free(&s, 3.0)?.pos;
    let gap = flow.combine(1.0, &outgoing_closed_form(&u0, 3.0), -1.0).sup_abs();

    let wide = RadialGrid::with_spacing(0.005, 70.0)?;
    let u0 = RadialField::from_fn(wide, |r| plateau(r, 1.0, 2.0, 0.3).0);
    let times: Vec<f64> = (0..6).map(|k| 10.0 * 2f64.powf(k as f64 / 2.0)).collect();
    let sup: Vec<f64> = times.iter().map(|&t| lp_norm(&outgoing_closed_form(&u0, t), f64::INFINITY)).collect();
    Ok((gap, fit_loglog("sup", &times, &sup)?.slope))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let (gap, slope) = run_example()?;
    println!("flow vs closed form at t = 3   {gap:.3e}");
    println!("sup decay slope               {slope:.4}");
    Ok(())
}
