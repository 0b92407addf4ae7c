//! The map `u -> I_1(u^{N+1})` on `L^{p,inf}(mu_alpha)` and separated bumps.

use outwave::choquet::{contraction_ratio, multibump_smallness, BumpFunction, ChoquetParams, Profile};
use outwave::{RadialField, RadialGrid, Result};

pub fn run_example() -> Result<(Vec<f64>, f64, f64)> {
    let (n_pow, p) = (6, 8.0);
    let alpha = 3.0 - 2.0 * p / f64::from(n_pow);
    let prm = ChoquetParams::new(alpha)?;
    let u = BumpFunction::single([0.0; 3], 1.0, Profile::Gaussian, 1.0)?;
    let ratios = [0.5, 0.25, 0.125]
        .iter()
        .map(|&rho| contraction_ratio(&u.scaled(rho), &u.scaled(rho / 2.0), n_pow, p, alpha, &prm))
        .collect::<Result<Vec<_>>>()?;
    let phi = RadialField::from_fn(RadialGrid::new(2.0, 201)?, |r| (1.0 - r * r / 4.0).max(0.0));
    let centers = [[0.0; 3], [1.0e4, 0.0, 0.0], [0.0, 1.0e4, 0.0]];
    let mb = multibump_smallness(&centers, &phi, 0.1, p, alpha, &prm)?;
    Ok((ratios, mb.criterion, mb.norm / mb.single_norm))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let (ratios, s, rel) = run_example()?;
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3e}")).collect();
    println!("contraction ratios at rho = 1/2, 1/4, 1/8: {}", shown.join(", "));
    println!("separation S = {s:.4}, |sum| / |single| = {rel:.4}");
    Ok(())
}
