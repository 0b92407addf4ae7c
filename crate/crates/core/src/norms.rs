//! Lebesgue, Lorentz, homogeneous Sobolev and space-time norms of radial
//! fields, plus energy, Morawetz and Strichartz-ratio diagnostics.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{differentiate, trapezoid, RadialField, SpaceTimeField, StatePair, FOUR_PI};
use crate::nonlinear::Sign;

/// `(int |u|^p 4 pi r^2 dr)^(1/p)`; the sup of the samples for `p = inf`.
pub fn lp_norm(u: &RadialField, p: f64) -> f64 {
    if p.is_infinite() {
        return u.sup_abs();
    }
    let w = u.grid.radial_weights();
    let s: f64 = w.iter().zip(&u.samples).map(|(w, v)| w * v.abs().powf(p)).sum();
    s.powf(1.0 / p)
}

/// Lorentz quasinorm of a step function given by values and cell measures:
/// `sup_t t^(1/p) f*(t)` for `q = inf`, `(int (t^(1/p) f*(t))^q dt/t)^(1/q)`
/// otherwise.
pub fn lorentz_from_cells(values: &[f64], measures: &[f64], p: f64, q: f64) -> f64 {
    let mut cells: Vec<(f64, f64)> =
        values.iter().zip(measures).map(|(v, m)| (v.abs(), *m)).filter(|(v, m)| *v > 0.0 && *m > 0.0).collect();
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut big_m = 0.0;
    let mut acc = 0.0f64;
    for (a, m) in cells {
        let prev = big_m;
        big_m += m;
        if q.is_infinite() {
            acc = acc.max(a * big_m.powf(1.0 / p));
        } else {
            acc += a.powf(q) * (p / q) * (big_m.powf(q / p) - prev.powf(q / p));
        }
    }
    if q.is_infinite() {
        acc
    } else {
        acc.powf(1.0 / q)
    }
}

/// `L^{p,q}` quasinorm from the exact rearrangement of the trapezoid cells.
pub fn lorentz_norm(u: &RadialField, p: f64, q: f64) -> f64 {
    lorentz_from_cells(&u.samples, &u.grid.radial_weights(), p, q)
}

/// Samples of the radial Fourier transform `u^(rho_k)`, `rho_k = pi k / r_max`.
pub fn radial_fourier(u: &RadialField) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = u.grid;
    let n = g.n();
    if n < 3 {
        return Err(Error::InsufficientResolution(format!("need n >= 3, got {n}")));
    }
    let sup = u.sup_abs();
    let tail = u.samples[n - 1].abs();
    if tail > 1e-8 * sup {
        return Err(Error::NotInSobolevDomain(format!("|u(r_max)| = {tail:.3e} vs sup {sup:.3e}")));
    }
    let m = n - 1;
    // DST-I of z = r u through an odd extension of length 2m
    let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); 2 * m];
    for i in 1..m {
        let z = g.r(i) * u.samples[i];
        buf[i] = Complex::new(z, 0.0);
        buf[2 * m - i] = Complex::new(-z, 0.0);
    }
    FftPlanner::new().plan_fft_forward(2 * m).process(&mut buf);
    let h = g.h();
    let mut rho = Vec::with_capacity(m);
    let mut uhat = Vec::with_capacity(m);
    for (k, x) in buf.iter().enumerate().take(m + 1).skip(1) {
        let r = PI * k as f64 / g.r_max();
        rho.push(r);
        uhat.push(FOUR_PI / r * h * (-x.im / 2.0));
    }
    Ok((rho, uhat))
}

/// `||u||_{Hdot^s}` with `f^(xi) = int f e^{-i x xi} dx`, so that `s = 0`
/// reproduces `lp_norm(u, 2)`.
pub fn sobolev_norm(u: &RadialField, s: f64) -> Result<f64> {
    if !(0.0..1.5).contains(&s) {
        return Err(Error::InvalidParameter(format!("Sobolev index must lie in [0, 3/2), got {s}")));
    }
    if u.is_zero() {
        return Ok(0.0);
    }
    let (rho, uhat) = radial_fourier(u)?;
    let drho = PI / u.grid.r_max();
    let sum: f64 = rho.iter().zip(&uhat).map(|(r, v)| r.powf(2.0 + 2.0 * s) * v * v).sum();
    Ok((sum * drho / (2.0 * PI * PI)).sqrt())
}

/// `L^p` norm of a time trace over possibly non-uniform times.
pub fn time_norm(trace: &[f64], times: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return trace.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let ys: Vec<f64> = trace.iter().map(|v| v.abs().powf(p)).collect();
    trapezoid(times, &ys).powf(1.0 / p)
}

/// `||u||_{L^p_t L^q_x}`.
pub fn mixed_norm(u: &SpaceTimeField, p_t: f64, q_x: f64) -> f64 {
    let inner: Vec<f64> = (0..u.n_times()).map(|j| lp_norm(&u.field(j), q_x)).collect();
    time_norm(&inner, &u.times, p_t)
}

fn time_norms(u: &SpaceTimeField, p_t: f64) -> RadialField {
    let samples = (0..u.grid.n()).map(|i| time_norm(&u.trace(i), &u.times, p_t)).collect();
    RadialField { grid: u.grid, samples }
}

/// `||u||_{L^q_x L^p_t}`: time norm at each node first.
pub fn reversed_norm(u: &SpaceTimeField, q_x: f64, p_t: f64) -> f64 {
    lp_norm(&time_norms(u, p_t), q_x)
}

/// `||u||_{L^{p,q}_x L^{p_t}_t}`.
pub fn reversed_lorentz_norm(u: &SpaceTimeField, p_x: f64, q_x: f64, p_t: f64) -> f64 {
    lorentz_norm(&time_norms(u, p_t), p_x, q_x)
}

fn bracket(r: f64) -> f64 {
    (1.0 + r * r).sqrt()
}

/// `sup_{r,t} <r> |u(r,t)|`.
pub fn weighted_sup(u: &SpaceTimeField) -> f64 {
    let mut m = 0.0f64;
    for j in 0..u.n_times() {
        for (i, v) in u.row(j).iter().enumerate() {
            m = m.max(bracket(u.grid.r(i)) * v.abs());
        }
    }
    m
}

/// `sup_r <r> int |u(r,t)| dt`.
pub fn weighted_l1t(u: &SpaceTimeField) -> f64 {
    (0..u.grid.n()).map(|i| bracket(u.grid.r(i)) * time_norm(&u.trace(i), &u.times, 1.0)).fold(0.0, f64::max)
}

/// `int u_t^2/2 + |grad u|^2/2 + sigma |u|^{N+2}/(N+2)`, `sigma = +1` defocusing.
pub fn energy(s: &StatePair, n_pow: u32, sign: Sign) -> Result<f64> {
    let g = s.grid();
    let ur = differentiate(&s.pos)?;
    let sigma = sign.sigma();
    let np2 = f64::from(n_pow + 2);
    let w = g.radial_weights();
    let mut e = 0.0;
    for i in 0..g.n() {
        let (u, ut, du) = (s.pos.samples[i], s.vel.samples[i], ur.samples[i]);
        e += w[i] * (0.5 * ut * ut + 0.5 * du * du + sigma * u.abs().powf(np2) / np2);
    }
    Ok(e)
}

/// `(||grad u0||^2 + ||u1||^2)^(1/2)`, the `Hdot^1 x L^2` norm.
pub fn energy_norm(s: &StatePair) -> Result<f64> {
    let du = differentiate(&s.pos)?;
    Ok((lp_norm(&du, 2.0).powi(2) + lp_norm(&s.vel, 2.0).powi(2)).sqrt())
}

/// `int int |u|^{N+2} / |x| dx dt`.
pub fn morawetz(u: &SpaceTimeField, n_pow: u32) -> f64 {
    let np2 = f64::from(n_pow + 2);
    let g = u.grid;
    let wr = g.trapezoid_weights();
    let per_time: Vec<f64> = (0..u.n_times())
        .map(|j| u.row(j).iter().enumerate().map(|(i, v)| wr[i] * FOUR_PI * g.r(i) * v.abs().powf(np2)).sum())
        .collect();
    trapezoid(&u.times, &per_time)
}

/// Critical regularity `3/2 - 2/N`.
pub fn critical_index(n_pow: u32) -> f64 {
    1.5 - 2.0 / f64::from(n_pow)
}

pub const STRICHARTZ_FLAVORS: [&str; 3] = ["crit", "free_strichartz", "est_inf"];

/// Left side over right side of a free Strichartz-type estimate:
/// - `crit`: `||u||_{L^{N/2}_t L^inf_x}` over `||u0||_{Hdot^1}^{4/N} ||u0||_inf^{1-4/N}`
/// - `free_strichartz`: `||u||_{L^{N/2}_t L^inf_x}` over `||u0||_{Hdot^sc} + ||u1||_{Hdot^{sc-1}}`
/// - `est_inf`: `||u||_{L^{3N/2,2}_x L^inf_t}` over the same data norm
pub fn strichartz_ratio(u: &SpaceTimeField, s0: &StatePair, n_pow: u32, flavor: &str) -> Result<f64> {
    if !STRICHARTZ_FLAVORS.contains(&flavor) {
        return Err(Error::UnknownFlavor(flavor.to_string()));
    }
    if s0.is_zero() {
        return Ok(0.0);
    }
    let nf = f64::from(n_pow);
    let sc = critical_index(n_pow);
    let data_crit = || -> Result<f64> {
        let a = sobolev_norm(&s0.pos, sc)?;
        let b = if s0.vel.is_zero() { 0.0 } else { sobolev_norm(&s0.vel, sc - 1.0)? };
        Ok(a + b)
    };
    let (lhs, rhs) = match flavor {
        "crit" => {
            let h1 = sobolev_norm(&s0.pos, 1.0)?;
            let inf = s0.pos.sup_abs();
            (mixed_norm(u, nf / 2.0, f64::INFINITY), h1.powf(4.0 / nf) * inf.powf(1.0 - 4.0 / nf))
        }
        "free_strichartz" => (mixed_norm(u, nf / 2.0, f64::INFINITY), data_crit()?),
        _ => (reversed_lorentz_norm(u, 1.5 * nf, 2.0, f64::INFINITY), data_crit()?),
    };
    Ok(if rhs > 0.0 { lhs / rhs } else { f64::INFINITY })
}

/// Label parameter: `inf`, bare integers, otherwise six decimals.
pub fn fmt_param(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.6}")
    }
}

pub fn label(name: &str, params: &[(&str, f64)]) -> String {
    let inner: Vec<String> = params.iter().map(|(k, v)| format!("{k}={}", fmt_param(*v))).collect();
    format!("{name}({})", inner.join(","))
}

/// A finite value, or the sentinel string `"infinite"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NormValue {
    Finite(f64),
    Infinite(String),
}

impl NormValue {
    pub fn from_f64(v: f64) -> Self {
        if v.is_finite() {
            NormValue::Finite(v)
        } else {
            NormValue::Infinite("infinite".into())
        }
    }
    pub fn value(&self) -> f64 {
        match self {
            NormValue::Finite(v) => *v,
            NormValue::Infinite(_) => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub values: BTreeMap<String, NormValue>,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl NormReport {
    pub fn insert(&mut self, label: String, v: f64) {
        self.values.insert(label, NormValue::from_f64(v));
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.values.get(label).map(NormValue::value)
    }

    /// Lebesgue, weak-Lebesgue and Sobolev norms of a single field. Sobolev
    /// entries that fail the decay check are skipped and noted.
    pub fn for_field(u: &RadialField, ps: &[f64], ss: &[f64]) -> Self {
        let mut rep = NormReport::default();
        rep.metadata.insert("r_max".into(), u.grid.r_max().into());
        rep.metadata.insert("n".into(), u.grid.n().into());
        for &p in ps {
            rep.insert(label("Lp", &[("p", p)]), lp_norm(u, p));
            if p.is_finite() {
                rep.insert(label("Lpq", &[("p", p), ("q", f64::INFINITY)]), lorentz_norm(u, p, f64::INFINITY));
            }
        }
        let mut skipped = Vec::new();
        for &s in ss {
            match sobolev_norm(u, s) {
                Ok(v) => rep.insert(label("Hdot", &[("s", s)]), v),
                Err(e) => skipped.push(format!("{}: {e}", label("Hdot", &[("s", s)]))),
            }
        }
        if !skipped.is_empty() {
            rep.metadata.insert("skipped".into(), skipped.into());
        }
        rep
    }

    /// Space-time norms of an evolution.
    pub fn for_spacetime(u: &SpaceTimeField, n_pow: u32) -> Self {
        let nf = f64::from(n_pow);
        let inf = f64::INFINITY;
        let mut rep = NormReport::default();
        rep.metadata.insert("r_max".into(), u.grid.r_max().into());
        rep.metadata.insert("n".into(), u.grid.n().into());
        rep.metadata.insert("horizon".into(), u.times.last().copied().unwrap_or(0.0).into());
        rep.metadata.insert("N".into(), n_pow.into());
        rep.insert(label("Lpt_Lqx", &[("p", inf), ("q", 2.0)]), mixed_norm(u, inf, 2.0));
        rep.insert(label("Lpt_Lqx", &[("p", nf / 2.0), ("q", inf)]), mixed_norm(u, nf / 2.0, inf));
        rep.insert(label("Lqx_Lpt", &[("q", inf), ("p", nf / 2.0)]), reversed_norm(u, inf, nf / 2.0));
        rep.insert(
            label("Lpqx_Lpt", &[("p", 1.5 * nf), ("q", 2.0), ("t", inf)]),
            reversed_lorentz_norm(u, 1.5 * nf, 2.0, inf),
        );
        rep.insert("weighted_sup".into(), weighted_sup(u));
        rep.insert("weighted_l1t".into(), weighted_l1t(u));
        rep.insert(label("morawetz", &[("N", nf)]), morawetz(u, n_pow));
        rep
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;

    #[test]
    fn lp_examples() {
        let g = RadialGrid::new(2.0, 2001).unwrap();
        assert_eq!(lp_norm(&RadialField::zeros(g), 2.0), 0.0);
        let chi = RadialField::from_fn(g, |r| if r <= 1.0 + 1e-12 { 1.0 } else { 0.0 });
        // the jump costs half a cell
        assert!((lp_norm(&chi, 2.0) - (4.0 * PI / 3.0).sqrt()).abs() < 5e-3);
        assert_eq!(lp_norm(&RadialField::from_fn(g, |r| (-r * r).exp()), f64::INFINITY), 1.0);
    }

    #[test]
    fn lorentz_examples() {
        let g = RadialGrid::new(2.0, 2001).unwrap();
        let chi = RadialField::from_fn(g, |r| if r <= 1.0 + 1e-12 { 1.0 } else { 0.0 });
        let m: f64 = g.radial_weights().iter().take(1001).sum();
        for p in [1.0, 2.0, 5.0] {
            assert!((lorentz_norm(&chi, p, f64::INFINITY) - m.powf(1.0 / p)).abs() < 1e-12);
        }
        let u = RadialField::from_fn(g, |r| (1.0 + r).recip());
        assert!((lorentz_norm(&u, 3.0, 3.0) / lp_norm(&u, 3.0) - 1.0).abs() < 1e-12);
        assert_eq!(lorentz_norm(&RadialField::zeros(g), 2.0, 2.0), 0.0);
    }

    #[test]
    fn plancherel_and_gradient() {
        let g = RadialGrid::new(12.0, 4096).unwrap();
        let u = RadialField::from_fn(g, |r| (-r * r / 2.0).exp());
        let a = sobolev_norm(&u, 0.0).unwrap();
        assert!((a / lp_norm(&u, 2.0) - 1.0).abs() < 1e-4);
        let grad = lp_norm(&differentiate(&u).unwrap(), 2.0);
        assert!((sobolev_norm(&u, 1.0).unwrap() / grad - 1.0).abs() < 1e-3);
    }

    #[test]
    fn sobolev_rejects_non_decaying() {
        let g = RadialGrid::new(4.0, 401).unwrap();
        let err = sobolev_norm(&RadialField::from_fn(g, |_| 1.0), 1.0).unwrap_err();
        assert!(matches!(err, Error::NotInSobolevDomain(_)));
    }

    #[test]
    fn separable_space_time() {
        let g = RadialGrid::new(6.0, 601).unwrap();
        let a = |r: f64| (-(r - 2.0) * (r - 2.0)).exp();
        let b = |t: f64| 1.0 + t * t;
        let times = SpaceTimeField::uniform_times(0.01, 100);
        let rows = times.iter().map(|&t| g.nodes().into_iter().map(|r| a(r) * b(t)).collect()).collect();
        let u = SpaceTimeField::from_rows(g, times.clone(), rows).unwrap();
        let af = RadialField::from_fn(g, a);
        let bt: Vec<f64> = times.iter().map(|&t| b(t)).collect();
        for (p, q) in [(2.0, 3.0), (1.0, f64::INFINITY), (f64::INFINITY, 2.0)] {
            let want = lp_norm(&af, q) * time_norm(&bt, &times, p);
            assert!((mixed_norm(&u, p, q) / want - 1.0).abs() < 1e-6);
            let want = lp_norm(&af, q) * time_norm(&bt, &times, p);
            assert!((reversed_norm(&u, q, p) / want - 1.0).abs() < 1e-6);
        }
        let want = {
            let w = g.trapezoid_weights();
            let x: f64 = (0..g.n()).map(|i| w[i] * FOUR_PI * g.r(i) * a(g.r(i)).powi(8)).sum();
            x * trapezoid(&times, &bt.iter().map(|v| v.powi(8)).collect::<Vec<_>>())
        };
        assert!((morawetz(&u, 6) / want - 1.0).abs() < 1e-6);
    }

    #[test]
    fn weighted_examples() {
        let g = RadialGrid::new(5.0, 51).unwrap();
        let times = SpaceTimeField::uniform_times(0.1, 10);
        let rows = times.iter().map(|_| g.nodes().into_iter().map(|r| 1.0 / bracket(r)).collect()).collect();
        let u = SpaceTimeField::from_rows(g, times, rows).unwrap();
        assert!((weighted_sup(&u) - 1.0).abs() < 1e-12);
        assert!((weighted_l1t(&u) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn energy_examples() {
        let g = RadialGrid::new(6.0, 601).unwrap();
        assert_eq!(energy(&StatePair::zeros(g), 6, Sign::Defocusing).unwrap(), 0.0);
        let u1 = RadialField::from_fn(g, |r| (-r * r).exp());
        let e = energy(&StatePair::new(RadialField::zeros(g), u1.clone()).unwrap(), 6, Sign::Focusing).unwrap();
        assert!((e - 0.5 * lp_norm(&u1, 2.0).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn labels() {
        assert_eq!(label("Lp", &[("p", 2.0)]), "Lp(p=2)");
        assert_eq!(label("Hdot", &[("s", 1.5 - 2.0 / 6.0)]), "Hdot(s=1.166667)");
        assert_eq!(label("Lqx_Lpt", &[("q", f64::INFINITY), ("p", 3.0)]), "Lqx_Lpt(q=inf,p=3)");
    }

    #[test]
    fn unknown_flavor() {
        let g = RadialGrid::new(5.0, 51).unwrap();
        let u = SpaceTimeField::zeros(g, vec![0.0, 0.1]);
        let err = strichartz_ratio(&u, &StatePair::zeros(g), 6, "bogus").unwrap_err();
        assert!(matches!(err, Error::UnknownFlavor(_)));
        assert_eq!(strichartz_ratio(&u, &StatePair::zeros(g), 6, "crit").unwrap(), 0.0);
    }

    #[test]
    fn infinite_sentinel_serializes() {
        let mut rep = NormReport::default();
        rep.insert("x".into(), f64::INFINITY);
        rep.insert("y".into(), 2.0);
        let s = serde_json::to_string(&rep.values).unwrap();
        assert_eq!(s, r#"{"x":"infinite","y":2.0}"#);
    }
}
