//! Outer measure of balls and of a two-ball union.

use outwave::choquet::{outer_measure, Ball, BallUnion, ChoquetParams};
use outwave::Result;

pub fn run_example() -> Result<(f64, f64, f64)> {
    let prm = ChoquetParams::new(1.0)?;
    let one = outer_measure(&BallUnion::new(vec![Ball::new([0.0; 3], 1.0)?]), &prm).value;
    let pair = BallUnion::new(vec![Ball::new([0.0; 3], 1.0)?, Ball::new([3.0, 0.0, 0.0], 1.0)?]);
    let two = outer_measure(&pair, &prm).value;
    Ok((one, two, 2.0 * std::f64::consts::PI))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let (one, two, exact) = run_example()?;
    println!("mu_1(B_1)        {one:.6}  (2 pi = {exact:.6})");
    println!("mu_1(B_1 u B_1') {two:.6}");
    Ok(())
}
