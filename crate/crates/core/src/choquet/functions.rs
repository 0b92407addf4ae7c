//! Bump sums, their `mu_alpha` rearrangement and everything built on it.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::{ball_primitive, dist, maximize, measure_disjoint, merge_intervals, subtract_intervals, Shell, Vec3};
use super::ChoquetParams;
use crate::error::{Error, Result};
use crate::grid::{RadialField, RadialGrid};
use crate::norms::lorentz_from_cells;

/// Radius where `exp(-r^2)` drops to `1e-8`; the Gaussian profile is cut there.
pub const GAUSS_CUT: f64 = 4.291_932_052_578_6;

const MERGE_SAMPLES: usize = 4001;

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `exp(-r^2)` on `[0, GAUSS_CUT]`.
    Gaussian,
    /// 1 on `[0, 1]`.
    Indicator,
    /// 1 on `[inner, outer]`.
    Shell { inner: f64, outer: f64 },
    /// Linear between nodes, 0 beyond `r_max`.
    Sampled(Arc<RadialField>),
}

impl Profile {
    pub fn sampled(f: RadialField) -> Self {
        Profile::Sampled(Arc::new(f))
    }

    pub fn value(&self, r: f64) -> f64 {
        match self {
            Profile::Gaussian => {
                if r <= GAUSS_CUT {
                    (-r * r).exp()
                } else {
                    0.0
                }
            }
            Profile::Indicator => f64::from(u8::from(r <= 1.0)),
            Profile::Shell { inner, outer } => f64::from(u8::from(r >= *inner && r <= *outer)),
            Profile::Sampled(f) => f.eval(r),
        }
    }

    /// Radius beyond which the profile vanishes.
    pub fn extent(&self) -> f64 {
        match self {
            Profile::Gaussian => GAUSS_CUT,
            Profile::Indicator => 1.0,
            Profile::Shell { outer, .. } => *outer,
            Profile::Sampled(f) => match f.samples.iter().rposition(|v| *v != 0.0) {
                Some(i) if i + 1 < f.grid.n() => f.grid.r(i + 1),
                Some(_) => f.grid.r_max(),
                None => 0.0,
            },
        }
    }

    pub fn sup_abs(&self) -> f64 {
        match self {
            Profile::Sampled(f) => f.sup_abs(),
            _ => 1.0,
        }
    }

    fn min_max(&self) -> (f64, f64) {
        match self {
            Profile::Sampled(f) => f.samples.iter().fold((0.0f64, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v))),
            _ => (0.0, 1.0),
        }
    }

    pub fn is_nonincreasing(&self) -> bool {
        match self {
            Profile::Gaussian | Profile::Indicator => true,
            Profile::Shell { inner, .. } => *inner == 0.0,
            Profile::Sampled(f) => {
                let tol = 1e-12 * f.sup_abs();
                f.samples.windows(2).all(|w| w[1].abs() <= w[0].abs() + tol)
            }
        }
    }

    /// Radial intervals where `|phi| >= t` (`> t` when `strict`), `t > 0`.
    pub fn superlevel(&self, t: f64, strict: bool) -> Vec<(f64, f64)> {
        let reach = |top: f64| if strict { t < top } else { t <= top };
        match self {
            Profile::Gaussian => {
                if reach(1.0) && t >= (-GAUSS_CUT * GAUSS_CUT).exp() {
                    vec![(0.0, (-t.ln()).max(0.0).sqrt())]
                } else if reach(1.0) {
                    vec![(0.0, GAUSS_CUT)]
                } else {
                    vec![]
                }
            }
            Profile::Indicator => if reach(1.0) { vec![(0.0, 1.0)] } else { vec![] },
            Profile::Shell { inner, outer } => if reach(1.0) { vec![(*inner, *outer)] } else { vec![] },
            Profile::Sampled(f) => sampled_superlevel(f, t),
        }
    }

    /// Largest value of `|phi|` not exceeding `x`.
    pub fn max_at_most(&self, x: f64) -> f64 {
        match self {
            Profile::Gaussian => x.clamp(0.0, 1.0),
            Profile::Indicator | Profile::Shell { .. } => if x >= 1.0 { 1.0 } else { 0.0 },
            Profile::Sampled(f) => f.sup_abs().min(x.max(0.0)),
        }
    }

    /// Tabulation on `[0, extent]`.
    pub fn tabulate(&self, n: usize) -> Result<RadialField> {
        if let Profile::Sampled(f) = self {
            return Ok((**f).clone());
        }
        let g = RadialGrid::new(self.extent(), n)?;
        Ok(RadialField::from_fn(g, |r| self.value(r)))
    }

    /// `phi^k` together with the factor applied to the scale.
    pub fn powi(&self, k: u32) -> (Profile, f64) {
        match self {
            Profile::Gaussian => (Profile::Gaussian, 1.0 / f64::from(k).sqrt()),
            Profile::Indicator | Profile::Shell { .. } => (self.clone(), 1.0),
            Profile::Sampled(f) => (Profile::sampled(f.map(|v| v.powi(k as i32))), 1.0),
        }
    }

    /// Cells `(a, b, phi(a), phi(b))` of a piecewise-linear description.
    pub fn cells(&self, n: usize) -> Result<Vec<(f64, f64, f64, f64)>> {
        Ok(match self {
            Profile::Indicator => vec![(0.0, 1.0, 1.0, 1.0)],
            Profile::Shell { inner, outer } => vec![(*inner, *outer, 1.0, 1.0)],
            _ => {
                let f = self.tabulate(n)?;
                let g = f.grid;
                (0..g.n() - 1).map(|i| (g.r(i), g.r(i + 1), f.samples[i], f.samples[i + 1])).collect()
            }
        })
    }
}

fn sampled_superlevel(f: &RadialField, t: f64) -> Vec<(f64, f64)> {
    let g = f.grid;
    let h = g.h();
    let v = |i: usize| f.samples[i].abs();
    let mut out = Vec::new();
    let mut start = (v(0) >= t).then_some(0.0);
    for i in 0..g.n() - 1 {
        let (a, b) = (v(i), v(i + 1));
        if a >= t && b < t {
            let x = g.r(i) + h * (a - t) / (a - b);
            out.push((start.take().unwrap_or(g.r(i)), x));
        } else if a < t && b >= t {
            start = Some(g.r(i) + h * (t - a) / (b - a));
        }
    }
    if let Some(s) = start {
        out.push((s, g.r_max()));
    }
    out.retain(|(a, b)| b > a);
    out
}

/// `coeff * profile(|x - center| / scale)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Vec3,
    pub coeff: f64,
    pub profile: Profile,
    pub scale: f64,
}

impl Bump {
    pub fn new(center: Vec3, coeff: f64, profile: Profile, scale: f64) -> Self {
        Self { center, coeff, profile, scale }
    }

    pub fn extent(&self) -> f64 {
        self.profile.extent() * self.scale
    }

    pub fn eval(&self, x: Vec3) -> f64 {
        self.coeff * self.profile.value(dist(x, self.center) / self.scale)
    }
}

/// JSON form of a bump: `{center, coeff, profile, scale}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub center: Vec3,
    pub coeff: f64,
    /// `gaussian`, `shell` or `indicator`.
    pub profile: String,
    pub scale: f64,
    /// Relative thickness of a `shell` profile, which covers `[1, 1 + width]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
}

impl BumpSpec {
    pub fn to_bump(&self) -> Result<Bump> {
        let profile = match self.profile.as_str() {
            "gaussian" => Profile::Gaussian,
            "indicator" => Profile::Indicator,
            "shell" => Profile::Shell { inner: 1.0, outer: 1.0 + self.width.unwrap_or(0.25) },
            other => return Err(Error::Config(format!("unknown profile '{other}'"))),
        };
        Ok(Bump::new(self.center, self.coeff, profile, self.scale))
    }
}

/// Finite sum of radial bumps with pairwise disjoint supports; bumps sharing
/// a center are merged into one.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BumpFunction {
    bumps: Vec<Bump>,
}

impl BumpFunction {
    pub fn new(bumps: Vec<Bump>) -> Result<Self> {
        for b in &bumps {
            if !(b.scale > 0.0 && b.scale.is_finite() && b.coeff.is_finite()) {
                return Err(Error::InvalidParameter(format!("bump at {:?} needs a positive scale", b.center)));
            }
        }
        let mut groups: Vec<Vec<Bump>> = Vec::new();
        for b in bumps.into_iter().filter(|b| b.coeff != 0.0 && b.profile.sup_abs() > 0.0) {
            match groups.iter_mut().find(|g| dist(g[0].center, b.center) <= 1e-12 * (1.0 + b.extent())) {
                Some(g) => g.push(b),
                None => groups.push(vec![b]),
            }
        }
        let mut merged = Vec::with_capacity(groups.len());
        for g in groups {
            if let Some(b) = merge_group(g)? {
                merged.push(b);
            }
        }
        for i in 0..merged.len() {
            for j in i + 1..merged.len() {
                let d = dist(merged[i].center, merged[j].center);
                if d < (merged[i].extent() + merged[j].extent()) * (1.0 - 1e-12) {
                    return Err(Error::OverlappingSupports(format!(
                        "{:?} and {:?} are {d} apart",
                        merged[i].center, merged[j].center
                    )));
                }
            }
        }
        Ok(Self { bumps: merged })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(center: Vec3, coeff: f64, profile: Profile, scale: f64) -> Result<Self> {
        Self::new(vec![Bump::new(center, coeff, profile, scale)])
    }

    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }

    pub fn is_zero(&self) -> bool {
        self.bumps.is_empty()
    }

    pub fn eval(&self, x: Vec3) -> f64 {
        self.bumps.iter().map(|b| b.eval(x)).sum()
    }

    pub fn sup_abs(&self) -> f64 {
        self.bumps.iter().map(|b| b.coeff.abs() * b.profile.sup_abs()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &BumpFunction) -> Result<Self> {
        Self::new(self.bumps.iter().chain(&other.bumps).cloned().collect())
    }

    pub fn scaled(&self, c: f64) -> Self {
        let bumps = if c == 0.0 {
            vec![]
        } else {
            self.bumps.iter().map(|b| Bump { coeff: c * b.coeff, ..b.clone() }).collect()
        };
        Self { bumps }
    }

    /// `x -> f(c x)`.
    pub fn dilated(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidParameter(format!("dilation factor must be positive, got {c}")));
        }
        let bumps = self
            .bumps
            .iter()
            .map(|b| Bump { center: b.center.map(|v| v / c), scale: b.scale / c, ..b.clone() })
            .collect();
        Ok(Self { bumps })
    }

    pub fn translated(&self, v: Vec3) -> Self {
        let bumps = self
            .bumps
            .iter()
            .map(|b| Bump { center: [b.center[0] + v[0], b.center[1] + v[1], b.center[2] + v[2]], ..b.clone() })
            .collect();
        Self { bumps }
    }

    /// Pointwise `f^k`; exact because supports are disjoint.
    pub fn powi(&self, k: u32) -> Self {
        let bumps = self
            .bumps
            .iter()
            .map(|b| {
                let (profile, s) = b.profile.powi(k);
                Bump { center: b.center, coeff: b.coeff.powi(k as i32), profile, scale: b.scale * s }
            })
            .collect();
        Self { bumps }
    }

    fn pieces(&self, per_bump: impl Fn(&Bump) -> Vec<(f64, f64)>) -> Vec<Shell> {
        let mut out = Vec::new();
        for b in &self.bumps {
            for (a, c) in per_bump(b) {
                out.push(Shell { center: b.center, inner: a * b.scale, outer: c * b.scale });
            }
        }
        out
    }

    /// `{ |f| >= t }` as disjoint shells.
    pub fn level_set(&self, t: f64) -> Vec<Shell> {
        self.pieces(|b| b.profile.superlevel(t / b.coeff.abs(), false))
    }

    /// `{ lo < |f| <= hi }`.
    pub fn band_set(&self, lo: f64, hi: f64) -> Vec<Shell> {
        self.pieces(|b| {
            let c = b.coeff.abs();
            let above_lo = merge_intervals(b.profile.superlevel(lo / c, true));
            let above_hi = merge_intervals(b.profile.superlevel(hi / c, true));
            subtract_intervals(&above_lo, &above_hi)
        })
    }

    fn bbox(&self) -> (Vec3, Vec3) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for b in &self.bumps {
            for a in 0..3 {
                lo[a] = lo[a].min(b.center[a] - b.extent());
                hi[a] = hi[a].max(b.center[a] + b.extent());
            }
        }
        (lo, hi)
    }

    fn seeds(&self) -> Vec<Vec3> {
        let mut s: Vec<Vec3> = self.bumps.iter().map(|b| b.center).collect();
        let lim = s.len().min(64);
        for i in 0..lim {
            for j in i + 1..lim {
                s.push(super::geometry::midpoint(s[i], s[j]));
            }
        }
        s
    }

    fn check_nonnegative(&self) -> Result<()> {
        for b in &self.bumps {
            let (lo, hi) = b.profile.min_max();
            if (b.coeff > 0.0 && lo < 0.0) || (b.coeff < 0.0 && hi > 0.0) {
                return Err(Error::NegativeIntegrand);
            }
        }
        Ok(())
    }
}

fn merge_group(g: Vec<Bump>) -> Result<Option<Bump>> {
    if g.len() == 1 {
        return Ok(g.into_iter().next());
    }
    let first = &g[0];
    if g.iter().all(|b| b.profile == first.profile && b.scale == first.scale) {
        let coeff: f64 = g.iter().map(|b| b.coeff).sum();
        return Ok((coeff != 0.0).then(|| Bump { coeff, ..first.clone() }));
    }
    let extent = g.iter().map(Bump::extent).fold(0.0, f64::max);
    let grid = RadialGrid::new(extent, MERGE_SAMPLES)?;
    let f = RadialField::from_fn(grid, |r| g.iter().map(|b| b.coeff * b.profile.value(r / b.scale)).sum());
    if f.is_zero() {
        return Ok(None);
    }
    Ok(Some(Bump::new(first.center, 1.0, Profile::sampled(f), 1.0)))
}

/// Step approximation of `f*_alpha(s) = inf{ u : mu_alpha(|f| >= u) < s }`:
/// the value `levels[j]` on `(distribution[j-1], distribution[j]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rearrangement {
    pub levels: Vec<f64>,
    /// `mu_alpha(|f| >= levels[j])`, nondecreasing.
    pub distribution: Vec<f64>,
    /// Center attaining each level set's measure.
    pub argmax: Vec<Vec3>,
}

impl Rearrangement {
    pub fn eval(&self, s: f64) -> f64 {
        self.distribution.iter().position(|d| s <= *d).map_or(0.0, |j| self.levels[j])
    }

    fn cell_measures(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.distribution
            .iter()
            .map(|d| {
                let m = d - prev;
                prev = *d;
                m
            })
            .collect()
    }

    pub fn lorentz(&self, p: f64, q: f64) -> f64 {
        lorentz_from_cells(&self.levels, &self.cell_measures(), p, q)
    }

    /// `int_0^inf f*(s) ds`.
    pub fn integral(&self) -> f64 {
        self.levels.iter().zip(self.cell_measures()).map(|(t, m)| t * m).sum()
    }
}

pub fn choquet_rearrangement(f: &BumpFunction, params: &ChoquetParams) -> Result<Rearrangement> {
    params.validate()?;
    let top = f.sup_abs();
    if top == 0.0 {
        return Ok(Rearrangement { levels: vec![], distribution: vec![], argmax: vec![] });
    }
    let m = params.levels_per_octave;
    let levels: Vec<f64> = (0..=m * params.octaves).map(|j| top * 2f64.powf(-(j as f64) / m as f64)).collect();
    let measured: Vec<(f64, Vec3)> = levels
        .par_iter()
        .map(|&t| {
            let r = measure_disjoint(&f.level_set(t), params);
            (r.value, r.argmax)
        })
        .collect();
    let mut distribution = Vec::with_capacity(levels.len());
    let mut run = 0.0f64;
    for (v, _) in &measured {
        run = run.max(*v);
        distribution.push(run);
    }
    Ok(Rearrangement { levels, distribution, argmax: measured.into_iter().map(|(_, c)| c).collect() })
}

/// `int_0^inf mu_alpha(f >= t) dt` for `f >= 0` with nonincreasing profiles.
pub fn choquet_integral(f: &BumpFunction, params: &ChoquetParams) -> Result<f64> {
    f.check_nonnegative()?;
    if f.bumps.iter().any(|b| !b.profile.is_nonincreasing()) {
        return Err(Error::NonMonotoneProfile);
    }
    Ok(choquet_rearrangement(f, params)?.integral())
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite() && q > 0.0) {
        return Err(Error::InvalidParameter(format!("need 0 < p < inf and q > 0, got p = {p}, q = {q}")));
    }
    Ok(())
}

/// `||f||_{L^{p,q}(mu_alpha)}`.
pub fn lorentz_choquet_norm(f: &BumpFunction, p: f64, q: f64, params: &ChoquetParams) -> Result<f64> {
    check_exponents(p, q)?;
    Ok(choquet_rearrangement(f, params)?.lorentz(p, q))
}

/// `sup_y || |x - y|^-alpha f(x) ||_{L^{p,q}_x}`; infinite once `alpha p >= 3`.
///
/// For `q = p` this is `sup_y (int |x-y|^{-alpha p} |f|^p)^{1/p}` and each
/// profile cell is integrated against the exact shell kernel. Otherwise the
/// weighted function is cut into polar cells about each bump and the Lorentz
/// quasinorm is taken from their exact rearrangement.
pub fn kato_norm(f: &BumpFunction, alpha: f64, p: f64, q: f64, params: &ChoquetParams) -> Result<f64> {
    check_exponents(p, q)?;
    if f.is_zero() {
        return Ok(0.0);
    }
    if alpha * p >= 3.0 {
        return Ok(f64::INFINITY);
    }
    let scale = f.bumps.iter().map(Bump::extent).fold(0.0, f64::max);
    if q == p {
        let cells: Vec<Vec<(f64, f64, f64, f64)>> =
            f.bumps.iter().map(|b| b.profile.cells(params.profile_samples)).collect::<Result<_>>()?;
        let a = alpha * p;
        let obj = |y: Vec3| -> f64 {
            let mut s = 0.0;
            for (b, cs) in f.bumps.iter().zip(&cells) {
                let d = dist(y, b.center);
                let c = b.coeff.abs();
                let mut prev: Option<(f64, f64)> = None;
                for &(r0, r1, v0, v1) in cs {
                    let p0 = match prev {
                        Some((r, v)) if r == r0 => v,
                        _ => ball_primitive(d, r0 * b.scale, a),
                    };
                    let p1 = ball_primitive(d, r1 * b.scale, a);
                    prev = Some((r1, p1));
                    s += 0.5 * ((c * v0).abs().powf(p) + (c * v1).abs().powf(p)) * (p1 - p0);
                }
            }
            s
        };
        let (v, _) = maximize(&f.seeds(), f.bbox(), scale, params, obj);
        return Ok(v.powf(1.0 / p));
    }
    let (ns, nmu) = (128usize, 64usize);
    let tabs: Vec<Vec<(f64, f64, f64)>> = f
        .bumps
        .iter()
        .map(|b| -> Result<Vec<(f64, f64, f64)>> {
            let e = b.profile.extent();
            let g = RadialGrid::new(e, ns + 1)?;
            Ok((0..ns)
                .map(|i| {
                    let (r0, r1) = (g.r(i), g.r(i + 1));
                    (r0 * b.scale, r1 * b.scale, (b.coeff * b.profile.value(0.5 * (r0 + r1))).abs())
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let obj = |y: Vec3| -> f64 {
        let mut vals = Vec::new();
        let mut meas = Vec::new();
        for (b, cells) in f.bumps.iter().zip(&tabs) {
            let d = dist(y, b.center);
            for &(r0, r1, v) in cells {
                if v == 0.0 {
                    continue;
                }
                let vol = 2.0 * std::f64::consts::PI * (r1.powi(3) - r0.powi(3)) / 3.0 * (2.0 / nmu as f64);
                let s = 0.5 * (r0 + r1);
                for k in 0..nmu {
                    let mu = -1.0 + (k as f64 + 0.5) * 2.0 / nmu as f64;
                    let rho = (d * d + s * s - 2.0 * d * s * mu).max(0.0).sqrt();
                    vals.push(v * rho.max(1e-300).powf(-alpha));
                    meas.push(vol);
                }
            }
        }
        lorentz_from_cells(&vals, &meas, p, q)
    };
    Ok(maximize(&f.seeds(), f.bbox(), scale, params, obj).0)
}

/// Height slice of `f` on `(lower, upper]` with `||a||_inf^p mu(supp a) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub k: i32,
    pub lower: f64,
    pub upper: f64,
    /// `sup |f|` on the slice.
    pub sup: f64,
    /// `mu_alpha` of the slice.
    pub measure: f64,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicDecomposition {
    pub p: f64,
    pub atoms: Vec<Atom>,
}

impl AtomicDecomposition {
    /// Normalized atom `k` at `x`.
    pub fn atom_value(&self, index: usize, f: &BumpFunction, x: Vec3) -> f64 {
        let a = &self.atoms[index];
        let v = f.eval(x);
        if v.abs() > a.lower && v.abs() <= a.upper {
            v / a.coeff
        } else {
            0.0
        }
    }

    /// `sum_k c_k a_k(x)`.
    pub fn reconstruct(&self, f: &BumpFunction, x: Vec3) -> f64 {
        (0..self.atoms.len()).map(|i| self.atoms[i].coeff * self.atom_value(i, f, x)).sum()
    }

    /// `(sum |c_k|^q)^(1/q)`.
    pub fn quasinorm(&self, q: f64) -> f64 {
        if q.is_infinite() {
            return self.atoms.iter().map(|a| a.coeff).fold(0.0, f64::max);
        }
        self.atoms.iter().map(|a| a.coeff.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Dyadic height slices `a_k = f 1{2^(k-1) < |f| <= 2^k}`.
pub fn atomic_decompose(f: &BumpFunction, p: f64, params: &ChoquetParams) -> Result<AtomicDecomposition> {
    check_exponents(p, p)?;
    params.validate()?;
    let top = f.sup_abs();
    let mut atoms = Vec::new();
    if top == 0.0 {
        return Ok(AtomicDecomposition { p, atoms });
    }
    let k_top = top.log2().ceil() as i32;
    for k in (k_top - params.octaves as i32..=k_top).rev() {
        let (lo, hi) = (2f64.powi(k - 1), 2f64.powi(k));
        let sup = f.bumps.iter().map(|b| b.coeff.abs() * b.profile.max_at_most(hi / b.coeff.abs())).fold(0.0, f64::max);
        if sup <= lo {
            continue;
        }
        let measure = measure_disjoint(&f.band_set(lo, hi), params).value;
        if measure > 0.0 {
            atoms.push(Atom { k, lower: lo, upper: hi, sup, measure, coeff: sup * measure.powf(1.0 / p) });
        }
    }
    Ok(AtomicDecomposition { p, atoms })
}

/// `||f + g||_{L^p(mu_alpha)} / (||f|| + ||g||)` with `L^p = L^{p,p}`.
pub fn quasi_triangle_ratio(f: &BumpFunction, g: &BumpFunction, p: f64, params: &ChoquetParams) -> Result<f64> {
    let sum = f.add(g)?;
    let nf = lorentz_choquet_norm(f, p, p, params)?;
    let ng = lorentz_choquet_norm(g, p, p, params)?;
    if nf + ng == 0.0 {
        return Ok(1.0);
    }
    Ok(lorentz_choquet_norm(&sum, p, p, params)? / (nf + ng))
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 3.0) {
        return Err(Error::InvalidParameter(format!("need 0 < beta < 3, got {beta}")));
    }
    Ok(())
}

fn bump_potential(b: &Bump, cells: &[(f64, f64, f64, f64)], d: f64, beta: f64) -> f64 {
    let mut s = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for &(r0, r1, v0, v1) in cells {
        let p0 = match prev {
            Some((r, v)) if r == r0 => v,
            _ => ball_primitive(d, r0 * b.scale, beta),
        };
        let p1 = ball_primitive(d, r1 * b.scale, beta);
        prev = Some((r1, p1));
        s += 0.5 * (v0 + v1) * (p1 - p0);
    }
    b.coeff * s
}

/// `(f * |x|^-beta)(x)` at each point, integrating every profile cell
/// against the exact shell kernel.
pub fn fractional_integrate(f: &BumpFunction, beta: f64, points: &[Vec3], params: &ChoquetParams) -> Result<Vec<f64>> {
    check_beta(beta)?;
    let cells: Vec<_> = f.bumps.iter().map(|b| b.profile.cells(params.profile_samples)).collect::<Result<_>>()?;
    Ok(points
        .par_iter()
        .map(|x| f.bumps.iter().zip(&cells).map(|(b, c)| bump_potential(b, c, dist(*x, b.center), beta)).sum())
        .collect())
}

/// `f * |x|^-beta` as a bump sum: each bump's potential is radial about its
/// center and tabulated out to `potential_extent` support radii.
pub fn riesz_potential(f: &BumpFunction, beta: f64, params: &ChoquetParams) -> Result<BumpFunction> {
    check_beta(beta)?;
    let mut out = Vec::new();
    for b in &f.bumps {
        let cells = b.profile.cells(params.profile_samples)?;
        let grid = RadialGrid::new(params.potential_extent * b.extent(), params.profile_samples)?;
        let samples: Vec<f64> = (0..grid.n())
            .into_par_iter()
            .map(|i| bump_potential(&Bump { coeff: 1.0, ..b.clone() }, &cells, grid.r(i), beta))
            .collect();
        out.push(Bump::new(b.center, b.coeff, Profile::sampled(RadialField::new(grid, samples)?), 1.0));
    }
    BumpFunction::new(out)
}

fn closed_loop_exponent(n_pow: u32, alpha: f64) -> Result<f64> {
    let n = f64::from(n_pow);
    let p = n * (3.0 - alpha) / 2.0;
    if !(p > n + 1.0 && p < 1.5 * n) {
        return Err(Error::InvalidParameter(format!(
            "need N+1 < p < 3N/2 with alpha = 3 - 2p/N; alpha = {alpha} gives p = {p} for N = {n_pow}"
        )));
    }
    Ok(p)
}

/// `u -> u^{N+1} * |x|^-1`; `alpha` in `params` fixes `p = N(3 - alpha)/2`.
pub fn closed_loop_map(u: &BumpFunction, n_pow: u32, params: &ChoquetParams) -> Result<BumpFunction> {
    closed_loop_exponent(n_pow, params.alpha)?;
    riesz_potential(&u.powi(n_pow + 1), 1.0, params)
}

/// `||M u1 - M u2|| / ||u1 - u2||` in `L^{p,inf}(mu_alpha)`.
pub fn contraction_ratio(
    u1: &BumpFunction,
    u2: &BumpFunction,
    n_pow: u32,
    p: f64,
    alpha: f64,
    params: &ChoquetParams,
) -> Result<f64> {
    let pp = closed_loop_exponent(n_pow, alpha)?;
    if (pp - p).abs() > 1e-9 * p {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} requires p = {pp}, got {p}")));
    }
    let prm = params.with_alpha(alpha)?;
    let den = u1.add(&u2.scaled(-1.0))?;
    if den.is_zero() {
        return Err(Error::InvalidParameter("contraction ratio needs u1 != u2".into()));
    }
    let num = closed_loop_map(u1, n_pow, &prm)?.add(&closed_loop_map(u2, n_pow, &prm)?.scaled(-1.0))?;
    if num.is_zero() {
        return Ok(0.0);
    }
    Ok(lorentz_choquet_norm(&num, p, f64::INFINITY, &prm)? / lorentz_choquet_norm(&den, p, f64::INFINITY, &prm)?)
}

/// `sup_j sum_{i != j} <y_i - y_j>^-alpha`.
pub fn separation_criterion(centers: &[Vec3], alpha: f64) -> f64 {
    (0..centers.len())
        .map(|j| {
            (0..centers.len())
                .filter(|&i| i != j)
                .map(|i| (1.0 + dist(centers[i], centers[j]).powi(2)).sqrt().powf(-alpha))
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Criterion for `y_j = spacing j^(1/alpha0) e`, `j >= 1`: partial sums over
/// the first `terms` centers (sup over the first half of them) and a bound on
/// the tail beyond `terms`.
pub fn power_sequence_criterion(alpha0: f64, alpha: f64, spacing: f64, terms: usize) -> Result<(f64, f64)> {
    if !(alpha0 > 0.0 && alpha > alpha0) || terms < 4 {
        return Err(Error::InvalidParameter(format!("need 0 < alpha0 < alpha, got {alpha0}, {alpha}")));
    }
    let y = |j: usize| spacing * (j as f64).powf(1.0 / alpha0);
    let jt = terms as f64;
    let rate = alpha / alpha0;
    let mut best = 0.0f64;
    let mut tail = 0.0f64;
    for j1 in 1..=terms / 2 {
        let s: f64 = (1..=terms).filter(|&i| i != j1).map(|i| (1.0 + (y(i) - y(j1)).powi(2)).sqrt().powf(-alpha)).sum();
        best = best.max(s);
        let gap = spacing * (1.0 - (j1 as f64 / jt).powf(1.0 / alpha0));
        tail = tail.max(gap.powf(-alpha) * jt.powf(1.0 - rate) / (rate - 1.0));
    }
    Ok((best, tail))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultibumpReport {
    /// `L^{p,inf}(mu_alpha)` quasinorm of the bump sum.
    pub norm: f64,
    pub single_norm: f64,
    /// `S = sup_j sum_{i != j} <y_i - y_j>^-alpha`.
    pub criterion: f64,
    /// `(1 + S)^(1/p)`.
    pub bound: f64,
}

/// `eps sum_j phi(x - y_j)` measured against its separation criterion.
pub fn multibump_smallness(
    centers: &[Vec3],
    bump: &RadialField,
    eps: f64,
    p: f64,
    alpha: f64,
    params: &ChoquetParams,
) -> Result<MultibumpReport> {
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            if dist(centers[i], centers[j]) == 0.0 {
                return Err(Error::InvalidParameter(format!("repeated center {:?}", centers[i])));
            }
        }
    }
    let prm = params.with_alpha(alpha)?;
    let profile = Profile::sampled(bump.clone());
    let f = BumpFunction::new(centers.iter().map(|c| Bump::new(*c, eps, profile.clone(), 1.0)).collect())?;
    let single = BumpFunction::single([0.0; 3], eps, profile, 1.0)?;
    let criterion = separation_criterion(centers, alpha);
    Ok(MultibumpReport {
        norm: lorentz_choquet_norm(&f, p, f64::INFINITY, &prm)?,
        single_norm: lorentz_choquet_norm(&single, p, f64::INFINITY, &prm)?,
        criterion,
        bound: (1.0 + criterion).powf(1.0 / p),
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn prm(alpha: f64) -> ChoquetParams {
        ChoquetParams::new(alpha).unwrap()
    }

    fn ball_measure(r: f64, alpha: f64) -> f64 {
        4.0 * PI * r.powf(3.0 - alpha) / (3.0 - alpha)
    }

    fn ind(c: Vec3, coeff: f64, r: f64) -> BumpFunction {
        BumpFunction::single(c, coeff, Profile::Indicator, r).unwrap()
    }

    #[test]
    fn indicator_choquet_integral_and_homogeneity() {
        let p = prm(1.0);
        let one = choquet_integral(&ind([0.0; 3], 1.0, 1.0), &p).unwrap();
        assert!((one - 2.0 * PI).abs() < 1e-9);
        let two = choquet_integral(&ind([0.0; 3], 2.0, 1.0), &p).unwrap();
        assert!((two - 2.0 * one).abs() < 1e-9 * one);
    }

    #[test]
    fn integrand_checks() {
        let p = prm(1.0);
        assert!(matches!(choquet_integral(&ind([0.0; 3], -1.0, 1.0), &p), Err(Error::NegativeIntegrand)));
        let shell = BumpFunction::single([0.0; 3], 1.0, Profile::Shell { inner: 1.0, outer: 2.0 }, 1.0).unwrap();
        assert!(matches!(choquet_integral(&shell, &p), Err(Error::NonMonotoneProfile)));
    }

    #[test]
    fn overlapping_supports_rejected() {
        let r = ind([0.0; 3], 1.0, 1.0).add(&ind([1.5, 0.0, 0.0], 1.0, 1.0));
        assert!(matches!(r, Err(Error::OverlappingSupports(_))));
        // same center merges instead
        let m = ind([0.0; 3], 1.0, 1.0).add(&ind([0.0; 3], 2.0, 1.0)).unwrap();
        assert_eq!(m.bumps().len(), 1);
        assert_eq!(m.bumps()[0].coeff, 3.0);
    }

    #[test]
    fn disjoint_sum_is_subadditive() {
        let p = prm(1.0);
        let f = BumpFunction::single([0.0; 3], 1.0, Profile::Gaussian, 1.0).unwrap();
        let g = BumpFunction::single([20.0, 0.0, 0.0], 0.5, Profile::Gaussian, 2.0).unwrap();
        let sum = choquet_integral(&f.add(&g).unwrap(), &p).unwrap();
        let parts = choquet_integral(&f, &p).unwrap() + choquet_integral(&g, &p).unwrap();
        assert!(sum <= parts * 1.05, "{sum} {parts}");
    }

    #[test]
    fn rearrangement_steps() {
        let p = prm(1.0);
        let a = ind([0.0; 3], 2.0, 1.0);
        let b = ind([50.0, 0.0, 0.0], 1.0, 1.0);
        let r = choquet_rearrangement(&a.add(&b).unwrap(), &p).unwrap();
        let ma = ball_measure(1.0, 1.0);
        assert_eq!(r.eval(0.5 * ma), 2.0);
        assert_eq!(r.eval(1.01 * ma), 1.0);
        assert_eq!(r.eval(1e6), 0.0);
        let z = choquet_rearrangement(&BumpFunction::zero(), &p).unwrap();
        assert_eq!(z.eval(1.0), 0.0);
    }

    #[test]
    fn indicator_lorentz_norm() {
        let p = prm(0.5);
        let mu = ball_measure(1.5, 0.5);
        for pp in [1.0, 2.0, 7.0] {
            let v = lorentz_choquet_norm(&ind([1.0, 2.0, 3.0], 1.0, 1.5), pp, f64::INFINITY, &p).unwrap();
            assert!((v - mu.powf(1.0 / pp)).abs() < 1e-9 * v);
        }
    }

    #[test]
    fn lorentz_scaling_under_dilation() {
        let alpha = 3.0 - 14.0 / 6.0;
        let p = prm(alpha);
        let f = BumpFunction::single([0.0; 3], 1.0, Profile::Gaussian, 1.0).unwrap();
        let pp = 7.0;
        let a = lorentz_choquet_norm(&f, pp, f64::INFINITY, &p).unwrap();
        let b = lorentz_choquet_norm(&f.dilated(2.0).unwrap(), pp, f64::INFINITY, &p).unwrap();
        let want = 2f64.powf((alpha - 3.0) / pp);
        assert!((b / a - want).abs() < 0.02 * want);
    }

    #[test]
    fn kato_norm_of_indicator() {
        let p = prm(1.0);
        let f = ind([0.0; 3], 1.0, 1.0);
        let k = kato_norm(&f, 1.0, 1.0, 1.0, &p).unwrap();
        assert!((k - 2.0 * PI).abs() < 0.02 * 2.0 * PI);
        assert_eq!(kato_norm(&BumpFunction::zero(), 1.0, 2.0, 2.0, &p).unwrap(), 0.0);
        assert!(kato_norm(&f, 1.0, 3.0, 3.0, &p).unwrap().is_infinite());
    }

    #[test]
    fn polar_kato_agrees_with_kernel_path() {
        let p = prm(1.0);
        let f = BumpFunction::single([0.0; 3], 1.0, Profile::Gaussian, 1.0).unwrap();
        let exact = kato_norm(&f, 0.5, 2.0, 2.0, &p).unwrap();
        let near = kato_norm(&f, 0.5, 2.0, 2.0 + 1e-12, &p).unwrap();
        assert!((exact - near).abs() < 0.03 * exact, "{exact} {near}");
    }

    #[test]
    fn embedding_chain_on_gaussians() {
        for (alpha, pp) in [(1.0, 2.0), (0.5, 3.0), (1.0 / 3.0, 8.0)] {
            let p = prm(alpha);
            let f = BumpFunction::single([0.0; 3], 1.0, Profile::Gaussian, 1.0)
                .unwrap()
                .add(&BumpFunction::single([15.0, 0.0, 0.0], 0.3, Profile::Gaussian, 0.5).unwrap())
                .unwrap();
            let weak = lorentz_choquet_norm(&f, pp, f64::INFINITY, &p).unwrap();
            let strong = lorentz_choquet_norm(&f, pp, pp, &p).unwrap();
            let k = kato_norm(&f, alpha / pp, pp, pp, &p).unwrap();
            assert!(weak <= 1.05 * k && k <= 1.05 * strong, "{weak} {k} {strong}");
        }
    }

    #[test]
    fn atoms_of_steps() {
        let p = prm(1.0);
        let a = atomic_decompose(&ind([0.0; 3], 1.0, 1.0), 2.0, &p).unwrap();
        assert_eq!(a.atoms.len(), 1);
        assert!((a.atoms[0].coeff - ball_measure(1.0, 1.0).sqrt()).abs() < 1e-9);
        let f = ind([0.0; 3], 2.0, 1.0).add(&ind([30.0, 0.0, 0.0], 0.75, 1.0)).unwrap();
        let d = atomic_decompose(&f, 2.0, &p).unwrap();
        let ks: Vec<i32> = d.atoms.iter().map(|a| a.k).collect();
        assert_eq!(ks, vec![1, 0]);
        for x in [[0.2, 0.0, 0.0], [30.5, 0.0, 0.0], [10.0, 0.0, 0.0]] {
            assert!((d.reconstruct(&f, x) - f.eval(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn quasi_triangle_examples() {
        let p = prm(1.0);
        let f = BumpFunction::single([0.0; 3], 1.0, Profile::Gaussian, 1.0).unwrap();
        assert_eq!(quasi_triangle_ratio(&f, &BumpFunction::zero(), 2.0, &p).unwrap(), 1.0);
        let same = quasi_triangle_ratio(&f, &f, 2.0, &p).unwrap();
        assert!(same <= 3f64.sqrt() * 1.05);
        let far = f.translated([30.0, 0.0, 0.0]);
        assert!(quasi_triangle_ratio(&f, &far, 2.0, &p).unwrap() <= 1.05);
    }

    #[test]
    fn fractional_integral_of_ball() {
        let p = prm(1.0);
        let v = fractional_integrate(&ind([0.0; 3], 1.0, 1.0), 1.0, &[[0.0; 3], [5.0, 0.0, 0.0]], &p).unwrap();
        assert!((v[0] - 2.0 * PI).abs() < 1e-9);
        assert!((v[1] - 4.0 * PI / 15.0).abs() < 1e-9);
        assert_eq!(fractional_integrate(&BumpFunction::zero(), 1.0, &[[0.0; 3]], &p).unwrap(), vec![0.0]);
        let pot = riesz_potential(&ind([0.0; 3], 1.0, 1.0), 1.0, &p).unwrap();
        assert!((pot.eval([5.0, 0.0, 0.0]) - v[1]).abs() < 1e-5 * v[1]);
    }

    #[test]
    fn closed_loop_ratio_scales_like_rho_to_the_n() {
        let n = 6;
        let pp = 8.0;
        let alpha = 3.0 - 2.0 * pp / 6.0;
        let p = prm(alpha);
        let u = BumpFunction::single([0.0; 3], 1.0, Profile::Gaussian, 1.0).unwrap();
        let ratio = |rho: f64| contraction_ratio(&u.scaled(rho), &u.scaled(rho / 2.0), n, pp, alpha, &p).unwrap();
        let (a, b) = (ratio(0.5), ratio(0.25));
        assert!((a / b / 64.0 - 1.0).abs() < 0.2, "{a} {b}");
        assert!(b < 1.0);
        assert!(matches!(closed_loop_map(&u, n, &prm(0.9)), Err(Error::InvalidParameter(_))));
        assert!(closed_loop_map(&BumpFunction::zero(), n, &p).unwrap().is_zero());
    }

    #[test]
    fn multibump_single_and_far() {
        let g = RadialGrid::new(2.0, 201).unwrap();
        let phi = RadialField::from_fn(g, |r| (1.0 - r * r / 4.0).max(0.0));
        let p = prm(0.6);
        let one = multibump_smallness(&[[0.0; 3]], &phi, 0.1, 8.0, 0.6, &p).unwrap();
        assert_eq!(one.criterion, 0.0);
        assert!((one.norm - one.single_norm).abs() < 1e-12);
        let d = 2000.0;
        let mut cs = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    cs.push([d * i as f64, d * j as f64, d * k as f64]);
                }
            }
        }
        let many = multibump_smallness(&cs, &phi, 0.1, 8.0, 0.6, &p).unwrap();
        assert!(many.criterion < 0.1);
        assert!(many.norm / many.single_norm <= many.bound * 1.5);
    }

    #[test]
    fn power_sequence_tail_is_finite() {
        let (s, tail) = power_sequence_criterion(0.4, 0.6, 100.0, 4000).unwrap();
        assert!(s.is_finite() && tail.is_finite() && tail > 0.0);
        let (s2, _) = power_sequence_criterion(0.4, 0.6, 1000.0, 4000).unwrap();
        assert!(s2 < s);
    }
}
