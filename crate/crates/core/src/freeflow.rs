//! Free radial waves: d'Alembert on the half-line with Neumann reflection,
//! the closed form for outgoing data, the sine propagator and Duhamel
//! integrals.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{cumulative_trapezoid, interp_cubic, Left, RadialField, RadialGrid, Right, SpaceTimeField, StatePair};
use crate::projections::outgoing_velocity;
use crate::reduction::{forward_t, inverse_t, HalfLineField};

const TWO_PI: f64 = 2.0 * PI;

/// Relative amplitude below which samples count as outside the support.
/// Loose enough to ignore the odd-even residue the reduction leaves on
/// compactly supported data.
pub const SUPPORT_REL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagatorMethod {
    Reduction,
    ClosedForm,
    Kernel,
}

/// A grid, a horizon and a propagation route, validated against the data.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PropagatorPlan {
    pub grid: RadialGrid,
    pub horizon: f64,
    pub method: PropagatorMethod,
}

impl PropagatorPlan {
    pub fn new(grid: RadialGrid, horizon: f64, method: PropagatorMethod) -> Result<Self> {
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!("horizon must be nonnegative, got {horizon}")));
        }
        Ok(Self { grid, horizon, method })
    }

    pub fn check(&self, s: &StatePair) -> Result<()> {
        check_domain(self.grid, s.support_radius(SUPPORT_REL), self.horizon)
    }

    /// Position at time `t <= horizon`. The closed form assumes outgoing
    /// data and ignores the velocity.
    pub fn position(&self, s: &StatePair, t: f64) -> Result<RadialField> {
        if t > self.horizon * (1.0 + 1e-12) {
            return Err(Error::DomainTooSmall(format!("t = {t} beyond planned horizon {}", self.horizon)));
        }
        self.check(s)?;
        match self.method {
            PropagatorMethod::Reduction => Ok(propagate_free(s, t)?.pos),
            PropagatorMethod::ClosedForm => Ok(outgoing_closed_form(&s.pos, t)),
            PropagatorMethod::Kernel => {
                // cos(t sqrt(-Lap)) u0 = d/dt of the sine propagator
                let dt = s.grid().h();
                let sin_part = sine_propagator(&s.vel, t)?;
                let cos_part = if t == 0.0 {
                    s.pos.clone()
                } else {
                    let a = sine_propagator(&s.pos, t + dt)?;
                    let b = sine_propagator(&s.pos, (t - dt).abs())?;
                    let sgn = if t >= dt { 1.0 } else { -1.0 };
                    a.combine(1.0 / (2.0 * dt), &b, -sgn / (2.0 * dt))
                };
                Ok(sin_part.combine(1.0, &cos_part, 1.0))
            }
        }
    }
}

fn check_domain(grid: RadialGrid, support: f64, t: f64) -> Result<()> {
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    if support + t > grid.r_max() + 0.5 * grid.h() {
        return Err(Error::DomainTooSmall(format!(
            "support {support} + t {t} exceeds r_max {}",
            grid.r_max()
        )));
    }
    Ok(())
}

fn half_support(v: &HalfLineField) -> f64 {
    let sup = v.samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if sup == 0.0 {
        return 0.0;
    }
    v.samples.iter().rposition(|x| x.abs() > SUPPORT_REL * sup).map_or(0.0, |i| v.grid.r(i))
}

struct Extended {
    v0: Vec<f64>,
    big_v1: Vec<f64>,
    h: f64,
}

impl Extended {
    fn new(v0: &HalfLineField, v1: &HalfLineField) -> Self {
        let h = v0.grid.h();
        Self { v0: v0.samples.clone(), big_v1: cumulative_trapezoid(&v1.samples, h), h }
    }
    fn v0e(&self, x: f64) -> f64 {
        interp_cubic(&self.v0, x / self.h, Left::Even, Right::Zero)
    }
    /// Antiderivative of the even extension of `v1`: odd, constant past the grid.
    fn v1i(&self, x: f64) -> f64 {
        interp_cubic(&self.big_v1, x / self.h, Left::Odd, Right::Hold)
    }
}

/// `v(r,t) = (v0e(r-t) + v0e(r+t))/2 + (1/2) int_{r-t}^{r+t} v1e`.
pub fn dalembert_halfline(v0: &HalfLineField, v1: &HalfLineField, t: f64) -> Result<HalfLineField> {
    check_domain(v0.grid, half_support(v0).max(half_support(v1)), t)?;
    Ok(dalembert_unchecked(v0, v1, t))
}

fn dalembert_unchecked(v0: &HalfLineField, v1: &HalfLineField, t: f64) -> HalfLineField {
    let g = v0.grid;
    if t == 0.0 {
        return v0.clone();
    }
    let e = Extended::new(v0, v1);
    let samples = (0..g.n())
        .map(|i| {
            let r = g.r(i);
            0.5 * (e.v0e(r - t) + e.v0e(r + t)) + 0.5 * (e.v1i(r + t) - e.v1i(r - t))
        })
        .collect();
    HalfLineField { grid: g, samples }
}

/// The free flow `(u0, u1) -> (u(t), u_t(t))` through the half-line reduction.
pub fn propagate_free(s: &StatePair, t: f64) -> Result<StatePair> {
    let g = s.grid();
    // the support is judged on u: the half-line images carry an odd-even residue
    check_domain(g, s.support_radius(SUPPORT_REL), t)?;
    let v0 = forward_t(&s.pos)?;
    let v1 = forward_t(&s.vel)?;
    let pos = inverse_t(&dalembert_unchecked(&v0, &v1, t));
    if t == 0.0 {
        return Ok(StatePair { pos, vel: inverse_t(&v1) });
    }
    // u_t = (2 pi / r) G, G = int_0^r v_t
    let e = Extended::new(&v0, &v1);
    let h = g.h();
    let mut vel = vec![0.0; g.n()];
    for (i, out) in vel.iter_mut().enumerate().skip(1) {
        let r = g.r(i);
        let big_g = 0.5 * (e.v0e(r + t) - e.v0e(r - t)) + 0.5 * (e.v1i(r + t) + e.v1i(r - t));
        *out = TWO_PI * big_g / r;
    }
    // at the origin u = 2 pi v(0, t), so u_t = 2 pi (v0'(t) + v1(t))
    let dv0 = (e.v0e(t + h) - e.v0e(t - h)) / (2.0 * h);
    let v1t = interp_cubic(&v1.samples, t / h, Left::Even, Right::Zero);
    vel[0] = TWO_PI * (dv0 + v1t);
    Ok(StatePair { pos, vel: RadialField { grid: g, samples: vel } })
}

/// `u(r,t) = ((r-t)/r) u0(r-t)` for `r > t`, 0 otherwise: the free flow of
/// outgoing data.
pub fn outgoing_closed_form(u0: &RadialField, t: f64) -> RadialField {
    if t == 0.0 {
        return u0.clone();
    }
    let g = u0.grid;
    RadialField::from_fn(g, |r| if r <= t { 0.0 } else { (r - t) / r * u0.eval_cubic(r - t) })
}

/// The outgoing pair at time `t`, velocity from the outgoing relation.
pub fn outgoing_closed_form_pair(u0: &RadialField, t: f64) -> Result<StatePair> {
    let pos = outgoing_closed_form(u0, t);
    let vel = outgoing_velocity(&pos)?;
    StatePair::new(pos, vel)
}

/// `sin(t sqrt(-Lap))/sqrt(-Lap) f`, radially `(1/2r) int_{|r-t|}^{r+t} s f(s) ds`.
pub fn sine_propagator(f: &RadialField, t: f64) -> Result<RadialField> {
    let g = f.grid;
    check_domain(g, f.support_radius(SUPPORT_REL), t)?;
    if t == 0.0 || f.is_zero() {
        return Ok(RadialField::zeros(g));
    }
    let h = g.h();
    let sf: Vec<f64> = (0..g.n()).map(|i| g.r(i) * f.samples[i]).collect();
    let m = cumulative_trapezoid(&sf, h);
    let big_m = |x: f64| interp_cubic(&m, x / h, Left::Even, Right::Hold);
    let mut out = vec![0.0; g.n()];
    out[0] = t * f.eval_cubic(t);
    for (i, o) in out.iter_mut().enumerate().skip(1) {
        let r = g.r(i);
        *o = (big_m(r + t) - big_m((r - t).abs())) / (2.0 * r);
    }
    Ok(RadialField { grid: g, samples: out })
}

/// `int_0^{t_j} S(t_j - s) F(s) ds` by trapezoid over the stored times.
pub fn duhamel(f: &SpaceTimeField, t_index: usize) -> Result<RadialField> {
    let g = f.grid;
    if t_index >= f.n_times() {
        return Err(Error::InvalidParameter(format!("t_index {t_index} out of range {}", f.n_times())));
    }
    if t_index == 0 {
        return Ok(RadialField::zeros(g));
    }
    let tj = f.times[t_index];
    let terms: Vec<RadialField> = (0..t_index)
        .into_par_iter()
        .map(|k| sine_propagator(&f.field(k), tj - f.times[k]))
        .collect::<Result<_>>()?;
    let mut acc = vec![0.0; g.n()];
    for (k, term) in terms.iter().enumerate() {
        // weight of node k in the trapezoid over times[0..=t_index]
        let left = if k > 0 { f.times[k] - f.times[k - 1] } else { 0.0 };
        let w = 0.5 * (left + f.times[k + 1] - f.times[k]);
        for (a, v) in acc.iter_mut().zip(&term.samples) {
            *a += w * v;
        }
    }
    Ok(RadialField { grid: g, samples: acc })
}

/// Duhamel integral and its time derivative at every stored time, by the
/// characteristic lattice for `z = r D`: `z_tt - z_rr = r F`, `z = 0` at the
/// origin. Requires uniform times with `dt = h`.
pub fn duhamel_lattice(f: &SpaceTimeField) -> Result<(SpaceTimeField, SpaceTimeField)> {
    let g = f.grid;
    let h = g.h();
    let nt = f.n_times();
    let n = g.n();
    for w in f.times.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h {
            return Err(Error::InvalidParameter(format!("lattice Duhamel needs dt = h = {h}, got {}", w[1] - w[0])));
        }
    }
    let h2 = h * h;
    let rg = |j: usize, i: usize| g.r(i) * f.at(i, j);
    let mut z: Vec<Vec<f64>> = Vec::with_capacity(nt + 1);
    z.push(vec![0.0; n]);
    let mut z1 = vec![0.0; n];
    for (i, v) in z1.iter_mut().enumerate().skip(1) {
        *v = 0.5 * h2 * rg(0, i);
    }
    z.push(z1);
    for j in 1..nt {
        let (prev, cur) = (&z[j - 1], &z[j]);
        let mut next = vec![0.0; n];
        for i in 1..n {
            let right = if i + 1 < n { cur[i + 1] } else { 0.0 };
            next[i] = right + cur[i - 1] - prev[i] + h2 * rg(j, i);
        }
        z.push(next);
    }
    let to_u = |zz: &[f64]| -> Vec<f64> {
        let mut u = vec![0.0; n];
        for i in 1..n {
            u[i] = zz[i] / g.r(i);
        }
        u[0] = if n > 2 { (4.0 * zz[1] - zz[2]) / (2.0 * h) } else { zz[1] / h };
        u
    };
    let d_rows: Vec<Vec<f64>> = (0..nt).map(|j| to_u(&z[j])).collect();
    let dt_rows: Vec<Vec<f64>> = (0..nt)
        .map(|j| {
            if j == 0 {
                return vec![0.0; n];
            }
            let diff: Vec<f64> = z[j + 1].iter().zip(&z[j - 1]).map(|(a, b)| (a - b) / (2.0 * h)).collect();
            to_u(&diff)
        })
        .collect();
    Ok((
        SpaceTimeField::from_rows(g, f.times.clone(), d_rows)?,
        SpaceTimeField::from_rows(g, f.times.clone(), dt_rows)?,
    ))
}

/// The lattice Duhamel recurrence without storing the space-time field:
/// `source(j, row)` fills `F` at `t_j = j h`, `visit(j, row)` receives `D`
/// at `t_j` for `j = 0..=steps`.
pub fn duhamel_lattice_streamed(
    grid: RadialGrid,
    steps: usize,
    mut source: impl FnMut(usize, &mut [f64]),
    mut visit: impl FnMut(usize, &[f64]),
) {
    let n = grid.n();
    let h = grid.h();
    let h2 = h * h;
    let r = grid.nodes();
    let mut f = vec![0.0; n];
    let mut d = vec![0.0; n];
    let to_u = |z: &[f64], out: &mut [f64]| {
        for i in 1..n {
            out[i] = z[i] / r[i];
        }
        out[0] = if n > 2 { (4.0 * z[1] - z[2]) / (2.0 * h) } else { z[1] / h };
    };
    let mut prev = vec![0.0; n];
    visit(0, &prev);
    source(0, &mut f);
    let mut cur: Vec<f64> = (0..n).map(|i| if i == 0 { 0.0 } else { 0.5 * h2 * r[i] * f[i] }).collect();
    let mut next = vec![0.0; n];
    for j in 1..=steps {
        to_u(&cur, &mut d);
        visit(j, &d);
        if j == steps {
            break;
        }
        source(j, &mut f);
        for i in 1..n {
            let right = if i + 1 < n { cur[i + 1] } else { 0.0 };
            next[i] = right + cur[i - 1] - prev[i] + h2 * r[i] * f[i];
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::smooth_step;

    fn shell(g: RadialGrid, a: f64, b: f64, w: f64) -> RadialField {
        RadialField::from_fn(g, |r| smooth_step((r - a) / w) * smooth_step((b - r) / w))
    }

    #[test]
    fn dalembert_identity_at_zero() {
        let g = RadialGrid::new(6.0, 601).unwrap();
        let v0 = HalfLineField::from_fn(g, |r| (-(r - 2.0) * (r - 2.0) * 4.0).exp());
        let out = dalembert_halfline(&v0, &HalfLineField::zeros(g), 0.0).unwrap();
        assert_eq!(out, v0);
    }

    #[test]
    fn dalembert_splits_indicator() {
        let g = RadialGrid::new(6.0, 601).unwrap();
        let v0 = HalfLineField::from_fn(g, |r| if (2.0..=3.0 + 1e-12).contains(&r) { 1.0 } else { 0.0 });
        let v = dalembert_halfline(&v0, &HalfLineField::zeros(g), 1.0).unwrap();
        for i in 0..g.n() {
            let r = g.r(i);
            let near = [1.0, 2.0, 3.0, 4.0].iter().any(|j| (r - j).abs() < 0.05);
            if near {
                continue;
            }
            let exact = if (1.0..2.0).contains(&r) || (3.0..4.0).contains(&r) { 0.5 } else { 0.0 };
            assert!((v.samples[i] - exact).abs() < 1e-12, "r={r}");
        }
    }

    #[test]
    fn dalembert_velocity_plateau() {
        let g = RadialGrid::new(20.0, 2001).unwrap();
        let v1 = HalfLineField::from_fn(g, |r| if (2.0..=3.0 + 1e-12).contains(&r) { 1.0 } else { 0.0 });
        let at = |t: f64, r: f64| dalembert_halfline(&HalfLineField::zeros(g), &v1, t).unwrap().samples[(r / g.h()).round() as usize];
        // behind the direct front only
        // the trapezoid puts half a cell on each side of a jump
        let tol = 1.1 * g.h();
        assert!((at(4.0, 5.5) - 0.5).abs() < tol);
        // behind the reflected front too: the Neumann image adds the same mass
        assert!((at(10.0, 5.0) - 1.0).abs() < tol);
    }

    #[test]
    fn domain_too_small() {
        let g = RadialGrid::new(4.0, 401).unwrap();
        let v0 = HalfLineField::from_fn(g, |r| if r < 3.0 { 1.0 } else { 0.0 });
        let err = dalembert_halfline(&v0, &HalfLineField::zeros(g), 2.0).unwrap_err();
        assert!(err.to_string().contains("domain too small"));
    }

    #[test]
    fn closed_form_examples() {
        let g = RadialGrid::new(4.0, 401).unwrap();
        let u0 = RadialField::from_fn(g, |r| if (1.0 - 1e-12..=2.0 + 1e-12).contains(&r) { 1.0 } else { 0.0 });
        assert_eq!(outgoing_closed_form(&u0, 0.0), u0);
        let u = outgoing_closed_form(&u0, 0.5);
        assert!((u.samples[200] - 0.75).abs() < 1e-12);
        assert_eq!(u.samples[30], 0.0);
    }

    #[test]
    fn outgoing_shell_tracks_closed_form() {
        let g = RadialGrid::new(12.0, 4801).unwrap();
        let u0 = shell(g, 1.0, 2.0, 0.3);
        let s = StatePair::new(u0.clone(), outgoing_velocity(&u0).unwrap()).unwrap();
        let t = 5.0;
        let a = propagate_free(&s, t).unwrap();
        let b = outgoing_closed_form(&u0, t);
        let err = a.pos.combine(1.0, &b, -1.0).sup_abs();
        assert!(err < 1e-4, "{err}");
        for i in 0..g.n() {
            let r = g.r(i);
            if !(5.9..=7.1).contains(&r) {
                assert!(a.pos.samples[i].abs() < 1e-4, "r={r} {}", a.pos.samples[i]);
            }
        }
    }

    #[test]
    fn sine_propagator_matches_reduction() {
        let g = RadialGrid::new(10.0, 4001).unwrap();
        let f = RadialField::from_fn(g, |r| (-(r - 3.0) * (r - 3.0) * 2.0).exp());
        let t = 1.5;
        let a = sine_propagator(&f, t).unwrap();
        let b = propagate_free(&StatePair::new(RadialField::zeros(g), f.clone()).unwrap(), t).unwrap().pos;
        let err = a.combine(1.0, &b, -1.0).sup_abs();
        assert!(err < 1e-5, "{err}");
        assert!(a.sup_abs() <= t * f.sup_abs());
    }

    #[test]
    fn duhamel_small_time_taylor() {
        let g = RadialGrid::new(12.0, 2401).unwrap();
        let gfun = |r: f64| (-(r - 3.0) * (r - 3.0)).exp();
        let times = SpaceTimeField::uniform_times(0.1 / 20.0, 20);
        let rows = times.iter().map(|_| g.nodes().into_iter().map(gfun).collect()).collect();
        let f = SpaceTimeField::from_rows(g, times, rows).unwrap();
        let d = duhamel(&f, 20).unwrap();
        let i = 600;
        // t^2/2 g + t^4/24 Lap g, with Lap g(3) = -2
        let exact = 0.005 * gfun(3.0) - 1e-4 / 12.0;
        assert!((d.samples[i] - exact).abs() < 1e-7, "{} vs {exact}", d.samples[i]);
    }

    #[test]
    fn streamed_lattice_matches_stored() {
        let g = RadialGrid::new(8.0, 401).unwrap();
        let steps = 120;
        let times = SpaceTimeField::uniform_times(g.h(), steps);
        let rows: Vec<Vec<f64>> = times
            .iter()
            .map(|t| (0..g.n()).map(|i| shell(g, 1.0 + t, 2.0 + t, 0.3).samples[i]).collect())
            .collect();
        let f = SpaceTimeField::from_rows(g, times, rows.clone()).unwrap();
        let (d, _) = duhamel_lattice(&f).unwrap();
        let mut worst = 0.0f64;
        duhamel_lattice_streamed(g, steps, |j, row| row.copy_from_slice(&rows[j]), |j, row| {
            for (a, b) in row.iter().zip(d.row(j)) {
                worst = worst.max((a - b).abs());
            }
        });
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn lattice_matches_quadrature() {
        let g = RadialGrid::new(8.0, 801).unwrap();
        let h = g.h();
        let times = SpaceTimeField::uniform_times(h, 200);
        let rows = times
            .iter()
            .map(|&t| g.nodes().into_iter().map(|r| (-(r - 2.0) * (r - 2.0) * 3.0).exp() * (1.0 + t)).collect())
            .collect();
        let f = SpaceTimeField::from_rows(g, times, rows).unwrap();
        let (d, _) = duhamel_lattice(&f).unwrap();
        let q = duhamel(&f, 200).unwrap();
        let err = q.combine(1.0, &d.field(200), -1.0).sup_abs();
        assert!(err < 1e-3 * q.sup_abs(), "{err}");
    }
}
