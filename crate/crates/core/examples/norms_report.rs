//! Norm report of a single field, keyed by stable labels.

use outwave::norms::{critical_index, NormReport};
use outwave::{RadialField, RadialGrid, Result};

pub fn run_example() -> Result<NormReport> {
    let g = RadialGrid::new(20.0, 4097)?;
    let u = RadialField::from_fn(g, |r| (-r * r / 2.0).exp());
    Ok(NormReport::for_field(&u, &[2.0, 4.0, 9.0, f64::INFINITY], &[1.0, critical_index(6)]))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let rep = run_example()?;
    println!("{}", serde_json::to_string_pretty(&rep).expect("serializable"));
    Ok(())
}
