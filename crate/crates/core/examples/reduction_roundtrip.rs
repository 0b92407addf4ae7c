//! Radial field to the half line and back.

use outwave::reduction::{equivalent_h1_seminorm, forward_t, inverse_t};
use outwave::norms::sobolev_norm;
use outwave::{RadialField, RadialGrid, Result};

pub fn run_example() -> Result<(f64, f64)> {
    let g = RadialGrid::new(12.0, 2049)?;
    let u = RadialField::from_fn(g, |r| (-(r - 4.0).powi(2)).exp() * r * r / (1.0 + r * r));
    let v = forward_t(&u)?;
    let back = inverse_t(&v);
    let err = back.combine(1.0, &u, -1.0).sup_abs() / u.sup_abs();
    let ratio = equivalent_h1_seminorm(&u)? / sobolev_norm(&u, 1.0)?;
    Ok((err, ratio))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let (err, ratio) = run_example()?;
    println!("round trip sup error   {err:.3e}");
    println!("|T u|_L2 / |u|_Hdot1   {ratio:.6}");
    Ok(())
}
