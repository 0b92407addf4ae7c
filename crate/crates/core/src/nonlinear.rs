//! Solvers for `u_tt - Lap u + sigma |u|^N u = 0`: a leapfrog reference on
//! `z = r u`, the Duhamel/Picard scheme, scattering states and the
//! local-existence probe.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freeflow::{duhamel_lattice, propagate_free, sine_propagator, SUPPORT_REL};
use crate::grid::{interp_cubic, Left, RadialField, RadialGrid, Right, SpaceTimeField, StatePair};
use crate::norms::{energy_norm, lp_norm, mixed_norm, time_norm};
use crate::projections::is_outgoing;

/// `Defocusing` is the `+` sign, `sigma = +1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Focusing,
    Defocusing,
}

impl Sign {
    pub fn sigma(self) -> f64 {
        match self {
            Sign::Focusing => -1.0,
            Sign::Defocusing => 1.0,
        }
    }
}

impl FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" | "defocusing" => Ok(Sign::Defocusing),
            "-" | "minus" | "focusing" => Ok(Sign::Focusing),
            _ => Err(Error::Config(format!("unknown sign '{s}', expected focusing or defocusing"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    /// `|u|^N u`
    #[default]
    OddPower,
    /// `u^{N+1}`
    Monomial,
}

impl Nonlinearity {
    #[inline]
    pub fn eval(self, u: f64, n_pow: u32) -> f64 {
        match self {
            Nonlinearity::OddPower => u.abs().powi(n_pow as i32) * u,
            Nonlinearity::Monomial => u.powi(n_pow as i32 + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n_pow: u32,
    pub sign: Sign,
    pub horizon: f64,
    pub dt: f64,
    pub max_iter: usize,
    /// Picard stops once the update is below `tol` times the size of the
    /// linear part.
    pub tol: f64,
    pub grid: RadialGrid,
    /// Multiplies the nonlinearity; 0 gives the free equation.
    pub coupling: f64,
    pub nonlinearity: Nonlinearity,
    /// Store every k-th time level of the reference solver; 0 picks a stride
    /// that keeps about 512 levels.
    pub record_every: usize,
}

impl SolverConfig {
    pub fn new(grid: RadialGrid, n_pow: u32, sign: Sign, horizon: f64) -> Self {
        Self {
            n_pow,
            sign,
            horizon,
            dt: 0.5 * grid.h(),
            max_iter: 60,
            tol: 1e-10,
            grid,
            coupling: 1.0,
            nonlinearity: Nonlinearity::OddPower,
            record_every: 0,
        }
    }

    pub fn linear(mut self) -> Self {
        self.coupling = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pow < 2 {
            return Err(Error::InvalidParameter(format!("N must be at least 2, got {}", self.n_pow)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!("horizon must be positive, got {}", self.horizon)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidParameter("tol and max_iter must be positive".into()));
        }
        Ok(())
    }

    #[inline]
    fn source(&self, u: f64) -> f64 {
        self.coupling * self.nonlinearity.eval(u, self.n_pow)
    }
}

/// Solution and time derivative on a common set of times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evolution {
    pub u: SpaceTimeField,
    pub ut: SpaceTimeField,
}

impl Evolution {
    pub fn times(&self) -> &[f64] {
        &self.u.times
    }

    pub fn state(&self, j: usize) -> StatePair {
        StatePair { pos: self.u.field(j), vel: self.ut.field(j) }
    }

    pub fn subsample(&self, stride: usize) -> Self {
        Self { u: self.u.subsample(stride), ut: self.ut.subsample(stride) }
    }
}

fn check_cover(grid: RadialGrid, s: &StatePair, horizon: f64) -> Result<()> {
    let support = s.support_radius(SUPPORT_REL);
    if support + horizon > grid.r_max() + 0.5 * grid.h() {
        return Err(Error::DomainTooSmall(format!(
            "support {support} + T {horizon} exceeds r_max {}",
            grid.r_max()
        )));
    }
    Ok(())
}

fn z_to_u(z: &[f64], h: f64) -> Vec<f64> {
    let n = z.len();
    let mut u = vec![0.0; n];
    for i in 1..n {
        u[i] = z[i] / (i as f64 * h);
    }
    u[0] = (4.0 * z[1] - z[2]) / (2.0 * h);
    u
}

/// Leapfrog for `z_tt = z_rr - sigma r F(z/r)` with `z = 0` at both ends.
pub fn reference_solve(s: &StatePair, cfg: &SolverConfig) -> Result<Evolution> {
    cfg.validate()?;
    let g = s.grid();
    let h = g.h();
    let n = g.n();
    if n < 3 {
        return Err(Error::InsufficientResolution(format!("need n >= 3, got {n}")));
    }
    if cfg.dt > h * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt: cfg.dt, h });
    }
    check_cover(g, s, cfg.horizon)?;
    let steps = ((cfg.horizon / cfg.dt) - 1e-9).ceil().max(1.0) as usize;
    let dt = cfg.horizon / steps as f64;
    let stride = if cfg.record_every == 0 { steps.div_ceil(512).max(1) } else { cfg.record_every };
    let lam2 = (dt / h).powi(2);
    let sigma = cfg.sign.sigma();
    let r: Vec<f64> = g.nodes();
    let limit = 1e8 * s.pos.sup_abs().max(s.vel.sup_abs() * cfg.horizon).max(f64::MIN_POSITIVE);

    let force = |z: &[f64], out: &mut [f64]| {
        for i in 1..n - 1 {
            out[i] = -sigma * r[i] * cfg.source(z[i] / r[i]);
        }
    };
    let mut fz = vec![0.0; n];
    let mut z0: Vec<f64> = (0..n).map(|i| r[i] * s.pos.samples[i]).collect();
    z0[0] = 0.0;
    z0[n - 1] = 0.0;
    force(&z0, &mut fz);
    let mut z1 = vec![0.0; n];
    for i in 1..n - 1 {
        let lap = (z0[i + 1] - 2.0 * z0[i] + z0[i - 1]) / (h * h);
        z1[i] = z0[i] + dt * r[i] * s.vel.samples[i] + 0.5 * dt * dt * (lap + fz[i]);
    }

    let mut times = Vec::new();
    let mut rows_u = Vec::new();
    let mut rows_ut = Vec::new();
    times.push(0.0);
    rows_u.push(s.pos.samples.clone());
    rows_ut.push(s.vel.samples.clone());

    let (mut prev, mut cur) = (z0, z1);
    for j in 1..=steps {
        // advance to j+1 so the centered velocity at j is available
        force(&cur, &mut fz);
        let mut next = vec![0.0; n];
        for i in 1..n - 1 {
            next[i] = 2.0 * cur[i] - prev[i] + lam2 * (cur[i + 1] - 2.0 * cur[i] + cur[i - 1]) + dt * dt * fz[i];
        }
        let t = j as f64 * dt;
        if cur.iter().zip(&r).skip(1).any(|(z, r)| !z.is_finite() || (z / r).abs() > limit) {
            return Err(Error::BlowUp(t));
        }
        if j % stride == 0 || j == steps {
            let dz: Vec<f64> = next.iter().zip(&prev).map(|(a, b)| (a - b) / (2.0 * dt)).collect();
            times.push(t);
            rows_u.push(z_to_u(&cur, h));
            rows_ut.push(z_to_u(&dz, h));
        }
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(Evolution {
        u: SpaceTimeField::from_rows(g, times.clone(), rows_u)?,
        ut: SpaceTimeField::from_rows(g, times, rows_ut)?,
    })
}

/// Contraction bookkeeping of the Picard iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardTrace {
    pub iterations: usize,
    /// `||w_{k+1} - w_k||` in `L^inf_t L^2_x`.
    pub deltas: Vec<f64>,
    pub ratios: Vec<f64>,
    pub converged: bool,
    pub diverged: bool,
    pub monitoring_norm: String,
    /// `||u||_{L^{N/2}_t L^inf_x}` of the last iterate.
    pub dispersion_norm: f64,
    /// Size of the linear part in the monitoring norm; `tol` is relative to it.
    pub scale: f64,
}

impl PicardTrace {
    pub fn final_ratio(&self) -> Option<f64> {
        self.ratios.last().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardResult {
    pub evolution: Evolution,
    pub trace: PicardTrace,
}

fn free_rows(s: &StatePair, times: &[f64]) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let n = s.grid().n();
    if s.is_zero() {
        return Ok((vec![vec![0.0; n]; times.len()], vec![vec![0.0; n]; times.len()]));
    }
    let states: Vec<StatePair> = times.par_iter().map(|&t| propagate_free(s, t)).collect::<Result<_>>()?;
    Ok(states.into_iter().map(|st| (st.pos.samples, st.vel.samples)).unzip())
}

fn sup_l2(rows: &[Vec<f64>], w: &[f64]) -> f64 {
    rows.iter().map(|row| row.iter().zip(w).map(|(v, w)| w * v * v).sum::<f64>().sqrt()).fold(0.0, f64::max)
}

/// `w_{k+1} = Phi(t) w_data - sigma Duhamel(F(v + w_k))`, `v = Phi(t) v_data`,
/// on the lattice `dt = h`.
pub fn picard_solve(v_data: &StatePair, w_data: &StatePair, cfg: &SolverConfig) -> Result<PicardResult> {
    cfg.validate()?;
    let g = v_data.grid();
    if !g.same_as(&w_data.grid()) {
        return Err(Error::InvalidParameter("v and w data on different grids".into()));
    }
    let (steps, horizon) = lattice_steps(g, cfg.horizon);
    check_cover(g, &v_data.combine(1.0, w_data, 1.0), horizon)?;
    let times = SpaceTimeField::uniform_times(g.h(), steps);
    let (v, vt) = free_rows(v_data, &times)?;
    let (wl, wlt) = free_rows(w_data, &times)?;
    picard_iterate(g, times, v, vt, wl, wlt, cfg)
}

/// Number of lattice steps covering `horizon` and the rounded horizon.
pub fn lattice_steps(g: RadialGrid, horizon: f64) -> (usize, f64) {
    let steps = ((horizon / g.h()) - 1e-9).ceil().max(1.0) as usize;
    (steps, steps as f64 * g.h())
}

/// Picard with a free evolution given on the lattice `t_j = j h`,
/// `j = 0..=lattice_steps(grid, horizon).0`, for data whose free flow is known
/// in closed form.
pub fn picard_solve_free(linear: &Evolution, cfg: &SolverConfig) -> Result<PicardResult> {
    cfg.validate()?;
    let g = linear.u.grid;
    let (steps, _) = lattice_steps(g, cfg.horizon);
    let times = SpaceTimeField::uniform_times(g.h(), steps);
    if linear.times().len() != times.len()
        || linear.times().iter().zip(&times).any(|(a, b)| (a - b).abs() > 1e-9 * (1.0 + b))
    {
        return Err(Error::InvalidParameter("linear evolution must sit on the lattice t_j = j h".into()));
    }
    let rows = |f: &SpaceTimeField| f.rows().map(<[f64]>::to_vec).collect::<Vec<_>>();
    let zeros = vec![vec![0.0; g.n()]; times.len()];
    picard_iterate(g, times, rows(&linear.u), rows(&linear.ut), zeros.clone(), zeros, cfg)
}

fn picard_iterate(
    g: RadialGrid,
    times: Vec<f64>,
    v: Vec<Vec<f64>>,
    vt: Vec<Vec<f64>>,
    wl: Vec<Vec<f64>>,
    wlt: Vec<Vec<f64>>,
    cfg: &SolverConfig,
) -> Result<PicardResult> {
    let horizon = times.last().copied().unwrap_or(0.0);
    let weights = g.radial_weights();
    let lin: Vec<Vec<f64>> = v.iter().zip(&wl).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect();
    let scale = sup_l2(&lin, &weights);
    let sigma = cfg.sign.sigma();

    let mut w = wl.clone();
    let mut wt = wlt.clone();
    let mut deltas = Vec::new();
    let mut converged = false;
    let mut diverged = false;
    for _ in 0..cfg.max_iter {
        let f_rows: Vec<Vec<f64>> = v
            .par_iter()
            .zip(&w)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| cfg.source(x + y)).collect())
            .collect();
        let f = SpaceTimeField::from_rows(g, times.clone(), f_rows)
            .map_err(|_| Error::BlowUp(horizon))
            .ok();
        let Some(f) = f else {
            diverged = true;
            break;
        };
        let (d, dt) = duhamel_lattice(&f)?;
        let new_w: Vec<Vec<f64>> =
            (0..times.len()).map(|j| wl[j].iter().zip(d.row(j)).map(|(a, b)| a - sigma * b).collect()).collect();
        let new_wt: Vec<Vec<f64>> =
            (0..times.len()).map(|j| wlt[j].iter().zip(dt.row(j)).map(|(a, b)| a - sigma * b).collect()).collect();
        let diff: Vec<Vec<f64>> =
            new_w.iter().zip(&w).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect();
        let delta = sup_l2(&diff, &weights);
        w = new_w;
        wt = new_wt;
        deltas.push(delta);
        if !delta.is_finite() || delta > 1e6 * scale.max(f64::MIN_POSITIVE) {
            diverged = true;
            break;
        }
        if delta <= cfg.tol * scale {
            converged = true;
            break;
        }
    }
    let ratios: Vec<f64> = deltas.windows(2).map(|d| if d[0] > 0.0 { d[1] / d[0] } else { 0.0 }).collect();
    let rows_u: Vec<Vec<f64>> = v.iter().zip(&w).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect();
    let rows_ut: Vec<Vec<f64>> =
        vt.iter().zip(&wt).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect();
    let finite = rows_u.iter().flatten().all(|x| x.is_finite()) && rows_ut.iter().flatten().all(|x| x.is_finite());
    let evolution = if finite {
        Evolution {
            u: SpaceTimeField::from_rows(g, times.clone(), rows_u)?,
            ut: SpaceTimeField::from_rows(g, times.clone(), rows_ut)?,
        }
    } else {
        // the last iterate overflowed; return the linear part instead
        diverged = true;
        Evolution {
            u: SpaceTimeField::from_rows(g, times.clone(), lin)?,
            ut: SpaceTimeField::from_rows(
                g,
                times.clone(),
                vt.iter().zip(&wlt).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect(),
            )?,
        }
    };
    let dispersion_norm = mixed_norm(&evolution.u, f64::from(cfg.n_pow) / 2.0, f64::INFINITY);
    Ok(PicardResult {
        evolution,
        trace: PicardTrace {
            iterations: deltas.len(),
            deltas,
            ratios,
            converged,
            diverged,
            monitoring_norm: "Linf_t L2_x".into(),
            dispersion_norm,
            scale,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringState {
    pub state: StatePair,
    /// `|| |u|^{N+1} ||_{L^1_t L^2_x}` over `t > 0.8 T`.
    pub tail: f64,
    pub horizon: f64,
}

/// Data of the free wave asymptotic to `u`, truncated at the last stored
/// time: `base + sigma (int S(s)F ds, -int C(s)F ds)` with `F = F(u)`.
pub fn scattering_state(evo: &Evolution, base: &StatePair, cfg: &SolverConfig) -> Result<ScatteringState> {
    let g = evo.u.grid;
    let times = evo.times();
    let nt = times.len();
    let horizon = times.last().copied().unwrap_or(0.0);
    let sigma = cfg.sign.sigma();
    let terms: Vec<(Vec<f64>, Vec<f64>)> = (0..nt)
        .into_par_iter()
        .map(|j| {
            let f = evo.u.field(j).map(|x| cfg.source(x));
            if f.is_zero() {
                return Ok((vec![0.0; g.n()], vec![0.0; g.n()]));
            }
            let s = sine_propagator(&f, times[j])?;
            let c = propagate_free(&StatePair { pos: f, vel: RadialField::zeros(g) }, times[j])?.pos;
            Ok((s.samples, c.samples))
        })
        .collect::<Result<_>>()?;
    let mut pos = base.pos.samples.clone();
    let mut vel = base.vel.samples.clone();
    for j in 0..nt {
        let left = if j > 0 { times[j] - times[j - 1] } else { 0.0 };
        let right = if j + 1 < nt { times[j + 1] - times[j] } else { 0.0 };
        let wj = 0.5 * (left + right);
        for i in 0..g.n() {
            pos[i] += sigma * wj * terms[j].0[i];
            vel[i] -= sigma * wj * terms[j].1[i];
        }
    }
    let cut = 0.8 * horizon;
    let per_time: Vec<f64> = (0..nt).map(|j| lp_norm(&evo.u.field(j).map(|x| cfg.source(x)), 2.0)).collect();
    let idx: Vec<usize> = (0..nt).filter(|&j| times[j] >= cut).collect();
    let tail = if idx.len() > 1 {
        time_norm(&idx.iter().map(|&j| per_time[j]).collect::<Vec<_>>(), &idx.iter().map(|&j| times[j]).collect::<Vec<_>>(), 1.0)
    } else {
        0.0
    };
    Ok(ScatteringState {
        state: StatePair { pos: RadialField { grid: g, samples: pos }, vel: RadialField { grid: g, samples: vel } },
        tail,
        horizon,
    })
}

/// `|| (u, u_t)(T) - Phi(T)(state) ||_{Hdot^1 x L^2}`.
pub fn scattering_residual(evo: &Evolution, j: usize, state: &StatePair) -> Result<f64> {
    let free = propagate_free(state, evo.times()[j])?;
    energy_norm(&evo.state(j).combine(1.0, &free, -1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub amplitude: f64,
    pub horizon: f64,
    pub converged: bool,
    pub final_ratio: Option<f64>,
    pub iterations: usize,
}

/// For each amplitude `a`, Picard for `a s` on `[0, c a^{-N/2}]`. The grid is
/// refined to 32 lattice steps over the horizon when needed.
pub fn local_existence_probe(
    s: &StatePair,
    n_pow: u32,
    sign: Sign,
    c: f64,
    amplitudes: &[f64],
) -> Result<Vec<ProbeRow>> {
    let (ok, res) = is_outgoing(s, 1e-6)?;
    if !ok {
        return Err(Error::InvalidParameter(format!("probe data must be outgoing, residual {res:.3e}")));
    }
    let support = s.support_radius(SUPPORT_REL);
    amplitudes
        .par_iter()
        .map(|&a| {
            let horizon = c * a.powf(-f64::from(n_pow) / 2.0);
            let h = (horizon / 32.0).min(s.grid().h());
            // resampling can carry the support one old cell outward
            let grid = RadialGrid::with_spacing(h, support + s.grid().h() + horizon + 4.0 * h)?;
            let data = resample_pair(s, grid).scaled(a);
            let mut cfg = SolverConfig::new(grid, n_pow, sign, horizon);
            cfg.max_iter = 40;
            let out = picard_solve(&data, &StatePair::zeros(grid), &cfg)?;
            Ok(ProbeRow {
                amplitude: a,
                horizon,
                converged: out.trace.converged,
                final_ratio: out.trace.final_ratio(),
                iterations: out.trace.iterations,
            })
        })
        .collect()
}

/// Cubic resampling of a pair onto another grid, zero past the old edge.
pub fn resample_pair(s: &StatePair, grid: RadialGrid) -> StatePair {
    let h = s.grid().h();
    let f = |x: &RadialField| {
        RadialField::from_fn(grid, |r| interp_cubic(&x.samples, r / h, Left::Even, Right::Zero))
    };
    StatePair { pos: f(&s.pos), vel: f(&s.vel) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::smooth_step;
    use crate::norms::energy;
    use crate::projections::outgoing_velocity;

    fn bump(g: RadialGrid, amp: f64) -> StatePair {
        let u0 = RadialField::from_fn(g, |r| amp * smooth_step((r - 0.5) / 1.5) * smooth_step((4.0 - r) / 1.5));
        StatePair::new(u0, RadialField::zeros(g)).unwrap()
    }

    #[test]
    fn zero_data() {
        let g = RadialGrid::new(8.0, 257).unwrap();
        let cfg = SolverConfig::new(g, 6, Sign::Defocusing, 1.0);
        let evo = reference_solve(&StatePair::zeros(g), &cfg).unwrap();
        assert_eq!(evo.u.sup_abs(), 0.0);
        let p = picard_solve(&StatePair::zeros(g), &StatePair::zeros(g), &cfg).unwrap();
        assert!(p.trace.converged);
        assert_eq!(p.trace.iterations, 1);
        assert_eq!(p.evolution.u.sup_abs(), 0.0);
    }

    #[test]
    fn cfl_is_enforced() {
        let g = RadialGrid::new(8.0, 257).unwrap();
        let mut cfg = SolverConfig::new(g, 6, Sign::Defocusing, 1.0);
        cfg.dt = 2.0 * g.h();
        assert!(matches!(reference_solve(&bump(g, 1.0), &cfg), Err(Error::Cfl { .. })));
    }

    #[test]
    fn linear_reference_matches_free_flow() {
        // outgoing data: nothing focuses at the origin, where z/r amplifies errors
        let g = RadialGrid::new(12.0, 4097).unwrap();
        let u0 = RadialField::from_fn(g, |r| smooth_step((r - 1.0) / 1.5) * smooth_step((4.5 - r) / 1.5));
        let s = StatePair::new(u0.clone(), outgoing_velocity(&u0).unwrap()).unwrap();
        let cfg = SolverConfig::new(g, 6, Sign::Defocusing, 3.0).linear();
        let evo = reference_solve(&s, &cfg).unwrap();
        let j = evo.times().len() - 1;
        let free = propagate_free(&s, evo.times()[j]).unwrap().pos;
        let err = evo.u.field(j).combine(1.0, &free, -1.0).sup_abs() / s.pos.sup_abs();
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn defocusing_energy_is_conserved() {
        let g = RadialGrid::new(12.0, 2049).unwrap();
        let s = bump(g, 0.8);
        let cfg = SolverConfig::new(g, 6, Sign::Defocusing, 5.0);
        let evo = reference_solve(&s, &cfg).unwrap();
        let e0 = energy(&evo.state(0), 6, Sign::Defocusing).unwrap();
        let drift = (0..evo.times().len())
            .map(|j| (energy(&evo.state(j), 6, Sign::Defocusing).unwrap() / e0 - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(drift < 1e-4, "{drift}");
    }

    #[test]
    fn focusing_blow_up_is_reported() {
        let g = RadialGrid::new(8.0, 513).unwrap();
        let s = bump(g, 6.0);
        let cfg = SolverConfig::new(g, 6, Sign::Focusing, 3.0);
        let err = reference_solve(&s, &cfg).unwrap_err();
        assert!(err.to_string().starts_with("solution blew up at t="), "{err}");
    }

    #[test]
    fn picard_small_data_agrees_with_reference() {
        let g = RadialGrid::new(10.0, 1601).unwrap();
        let u0 = RadialField::from_fn(g, |r| 0.4 * smooth_step((r - 1.0) / 1.0) * smooth_step((4.0 - r) / 1.0));
        let s = StatePair::new(u0.clone(), outgoing_velocity(&u0).unwrap()).unwrap();
        let cfg = SolverConfig::new(g, 6, Sign::Defocusing, 2.0);
        let p = picard_solve(&s, &StatePair::zeros(g), &cfg).unwrap();
        assert!(p.trace.converged, "{:?}", p.trace);
        assert!(p.trace.ratios.iter().all(|&r| r <= 0.5), "{:?}", p.trace.ratios);
        let mut rcfg = cfg;
        rcfg.record_every = 2;
        let evo = reference_solve(&s, &rcfg).unwrap();
        let j = evo.times().len() - 1;
        let k = p.evolution.times().len() - 1;
        assert!((evo.times()[j] - p.evolution.times()[k]).abs() < 1e-12);
        let err = evo.u.field(j).combine(1.0, &p.evolution.u.field(k), -1.0).sup_abs() / u0.sup_abs();
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn scattering_of_linear_run_is_identity() {
        let g = RadialGrid::new(12.0, 513).unwrap();
        let s = bump(g, 1.0);
        let cfg = SolverConfig::new(g, 6, Sign::Defocusing, 2.0).linear();
        let p = picard_solve(&s, &StatePair::zeros(g), &cfg).unwrap();
        let sc = scattering_state(&p.evolution, &StatePair::zeros(g), &cfg).unwrap();
        assert!(sc.state.is_zero());
        assert_eq!(sc.tail, 0.0);
    }
}
