//! Lorentz-Choquet quasinorms, their dilation law and the atomic split.

use outwave::choquet::{atomic_decompose, lorentz_choquet_norm, BumpFunction, ChoquetParams, Profile};
use outwave::Result;

pub fn run_example() -> Result<(f64, f64, f64)> {
    let (p, alpha) = (8.0, 1.0 / 3.0);
    let prm = ChoquetParams::new(alpha)?;
    let f = BumpFunction::single([0.0; 3], 1.0, Profile::Gaussian, 1.0)?;
    let weak = lorentz_choquet_norm(&f, p, f64::INFINITY, &prm)?;
    let dil = lorentz_choquet_norm(&f.dilated(2.0)?, p, f64::INFINITY, &prm)?;
    let atoms = atomic_decompose(&f, p, &prm)?.quasinorm(f64::INFINITY);
    Ok((weak, dil / weak, atoms))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let (weak, ratio, atoms) = run_example()?;
    println!("|f|_(8,inf)                 {weak:.6}");
    println!("|f(2x)| / |f|               {ratio:.6}  (2^((1/3-3)/8) = {:.6})", 2f64.powf((1.0 / 3.0 - 3.0) / 8.0));
    println!("sup of atomic coefficients  {atoms:.6}");
    Ok(())
}
