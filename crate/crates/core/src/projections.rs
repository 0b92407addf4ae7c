//! Outgoing/incoming projections `P+`, `P-` of radial state pairs and the
//! traveling-wave split `pi+`, `pi-` on the half-line.
//!
//! `P+ (u0, u1) = ( (u0 - A u1)/2, (-D u0 + u1)/2 )` with
//! `A u1 = (1/r) int_0^r s u1` and `D u0 = (u0)_r + u0/r = (1/r)(r u0)'`.
//! `A` and `D` are built from the same trapezoid pair as the reduction, so
//! `A D = D A = I` on the grid and the projections are idempotent and
//! mutually annihilating to rounding.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{cumulative_trapezoid, RadialField, StatePair};
use crate::reduction::{weighted_derivative, HalfLineField};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectionResult {
    pub out_part: StatePair,
    pub in_part: StatePair,
    /// `|| P+ s + P- s - s || / || s ||` in the pair norm.
    pub residual: f64,
    pub warnings: Vec<String>,
}

/// `(1/r) int_0^r s u1(s) ds`, 0 at the origin.
pub fn antiderivative_weighted(u1: &RadialField) -> RadialField {
    let g = u1.grid;
    let su: Vec<f64> = (0..g.n()).map(|i| g.r(i) * u1.samples[i]).collect();
    let w = cumulative_trapezoid(&su, g.h());
    let mut out = vec![0.0; g.n()];
    for i in 1..g.n() {
        out[i] = w[i] / g.r(i);
    }
    RadialField { grid: g, samples: out }
}

/// `(u0)_r + u0/r`. At the origin the limit `2 u0'(0)` is used, which is
/// only meaningful when `u0(0) = 0`; otherwise a warning is returned.
pub fn radial_divergence(u0: &RadialField) -> Result<(RadialField, Option<String>)> {
    let g = u0.grid;
    let d = weighted_derivative(u0)?;
    let mut out = vec![0.0; g.n()];
    for i in 1..g.n() {
        out[i] = d[i] / g.r(i);
    }
    out[0] = 2.0 * (u0.samples[1] - u0.samples[0]) / g.h();
    let sup = u0.sup_abs();
    let warning = (sup > 0.0 && u0.samples[0].abs() > 1e-12 * sup).then(|| {
        format!("singular-origin: u0(0) = {:.3e} != 0, u0/r is unbounded at r = 0", u0.samples[0])
    });
    Ok((RadialField { grid: g, samples: out }, warning))
}

/// Velocity making `(u0, u1)` outgoing: `u1 = -(u0)_r - u0/r`.
pub fn outgoing_velocity(u0: &RadialField) -> Result<RadialField> {
    Ok(radial_divergence(u0)?.0.scaled(-1.0))
}

/// Velocity making `(u0, u1)` incoming: `u1 = (u0)_r + u0/r`.
pub fn incoming_velocity(u0: &RadialField) -> Result<RadialField> {
    Ok(radial_divergence(u0)?.0)
}

fn split(s: &StatePair) -> Result<(StatePair, StatePair, Option<String>)> {
    let a = antiderivative_weighted(&s.vel);
    let (d, warn) = radial_divergence(&s.pos)?;
    let g = s.grid();
    let n = g.n();
    let (mut p0, mut p1, mut m0, mut m1) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        let (u0, u1) = (s.pos.samples[i], s.vel.samples[i]);
        p0[i] = 0.5 * (u0 - a.samples[i]);
        m0[i] = 0.5 * (u0 + a.samples[i]);
        p1[i] = 0.5 * (-d.samples[i] + u1);
        m1[i] = 0.5 * (d.samples[i] + u1);
    }
    let f = |v| RadialField { grid: g, samples: v };
    Ok((
        StatePair { pos: f(p0), vel: f(p1) },
        StatePair { pos: f(m0), vel: f(m1) },
        warn,
    ))
}

pub fn project_out(s: &StatePair) -> Result<StatePair> {
    Ok(split(s)?.0)
}

pub fn project_in(s: &StatePair) -> Result<StatePair> {
    Ok(split(s)?.1)
}

/// Both projections plus the completeness residual.
pub fn project(s: &StatePair) -> Result<ProjectionResult> {
    let (out_part, in_part, warn) = split(s)?;
    let sum = out_part.combine(1.0, &in_part, 1.0);
    let diff = sum.combine(1.0, s, -1.0);
    let base = pair_norm(s)?;
    let residual = if base > 0.0 { pair_norm(&diff)? / base } else { 0.0 };
    Ok(ProjectionResult { out_part, in_part, residual, warnings: warn.into_iter().collect() })
}

/// `( ||(r u0)'||^2 + ||r u1||^2 )^(1/2)` in `L^2(dr)`: the energy norm in
/// which `P+` and `P-` are orthogonal.
pub fn pair_norm(s: &StatePair) -> Result<f64> {
    let g = s.grid();
    let w = g.trapezoid_weights();
    let d = weighted_derivative(&s.pos)?;
    let mut acc = 0.0;
    for i in 0..g.n() {
        let ru1 = g.r(i) * s.vel.samples[i];
        acc += w[i] * (d[i] * d[i] + ru1 * ru1);
    }
    Ok(acc.sqrt())
}

fn l2_radial(samples: &[f64], weights: &[f64]) -> f64 {
    weights.iter().zip(samples).map(|(w, v)| w * v * v).sum::<f64>().sqrt()
}

/// Residual `||u1 + (u0)_r + u0/r||_{L^2} / max(||u1||_{L^2}, eps)` and
/// whether it is within `tol`.
pub fn is_outgoing(s: &StatePair, tol: f64) -> Result<(bool, f64)> {
    let (d, _) = radial_divergence(&s.pos)?;
    let w = s.grid().radial_weights();
    let res: Vec<f64> = s.vel.samples.iter().zip(&d.samples).map(|(a, b)| a + b).collect();
    let residual = l2_radial(&res, &w) / l2_radial(&s.vel.samples, &w).max(f64::EPSILON);
    Ok((residual <= tol, residual))
}

/// `pi+ (v0, v1) = (v0 - d^{-1} v1)/2`, `pi- = (v0 + d^{-1} v1)/2` with
/// `d^{-1} v1 = int_0^r v1`: the right- and left-moving profiles of the
/// half-line data.
pub fn halfline_split(v0: &HalfLineField, v1: &HalfLineField) -> (HalfLineField, HalfLineField) {
    let g = v0.grid;
    let w = cumulative_trapezoid(&v1.samples, g.h());
    let plus = v0.samples.iter().zip(&w).map(|(a, b)| 0.5 * (a - b)).collect();
    let minus = v0.samples.iter().zip(&w).map(|(a, b)| 0.5 * (a + b)).collect();
    (HalfLineField { grid: g, samples: plus }, HalfLineField { grid: g, samples: minus })
}
