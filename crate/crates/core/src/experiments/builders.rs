//! Initial-data families.

use serde::{Deserialize, Serialize};

use crate::choquet::{separation_criterion, Bump, BumpFunction, Profile, Vec3};
use crate::error::{Error, Result};
use crate::grid::{RadialField, RadialGrid, SpaceTimeField, StatePair};
use crate::nonlinear::{lattice_steps, Evolution};
use crate::norms::{lp_norm, sobolev_norm};
use crate::projections::outgoing_velocity;

use super::smooth_step;

/// Derivative of [`smooth_step`].
pub fn smooth_step_deriv(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a * b * (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x))) / ((a + b) * (a + b))
}

/// Plateau of height 1 on `[a + w, b - w]`, smooth ramps of width `w`, zero
/// outside `[a, b]`. Returns the value and the derivative.
pub fn plateau(r: f64, a: f64, b: f64, w: f64) -> (f64, f64) {
    if w <= 0.0 {
        let v = if (a..=b).contains(&r) { 1.0 } else { 0.0 };
        return (v, 0.0);
    }
    let (xl, xr) = ((r - a) / w, (b - r) / w);
    let (sl, sr) = (smooth_step(xl), smooth_step(xr));
    (sl * sr, (smooth_step_deriv(xl) * sr - sl * smooth_step_deriv(xr)) / w)
}

/// Outgoing velocity with the roundoff outside the support of `u0` removed;
/// `-(u0)_r - u0/r` is local.
pub fn local_outgoing_velocity(pos: &RadialField) -> Result<RadialField> {
    let mut vel = outgoing_velocity(pos)?;
    let s = &pos.samples;
    let n = s.len();
    for i in 0..n {
        let lo = i.saturating_sub(2);
        let hi = (i + 2).min(n - 1);
        if s[lo..=hi].iter().all(|v| *v == 0.0) {
            vel.samples[i] = 0.0;
        }
    }
    Ok(vel)
}

/// Smooth bump on `[0, 1]` with peak 1 at `1/2`.
pub fn unit_bump(x: f64) -> f64 {
    plateau(x, 0.0, 1.0, 0.5).0
}

/// Height-`L eps^-alpha` shell on `[1, 1 + eps]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellShape {
    pub l: f64,
    pub eps: f64,
    pub alpha: f64,
    /// Ramp width as a fraction of `eps`; 0 is the sharp indicator.
    pub ramp: f64,
}

impl ShellShape {
    pub fn new(l: f64, eps: f64, alpha: f64, ramp: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("shell width must lie in (0, 1), got {eps}")));
        }
        if !(0.0..=0.25).contains(&ramp) {
            return Err(Error::InvalidParameter(format!("ramp must lie in [0, 1/4], got {ramp}")));
        }
        if !l.is_finite() || !alpha.is_finite() {
            return Err(Error::InvalidParameter("shell height must be finite".into()));
        }
        Ok(Self { l, eps, alpha, ramp })
    }

    pub fn height(&self) -> f64 {
        self.l * self.eps.powf(-self.alpha)
    }

    /// `(u0(r), u0'(r))`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let (v, d) = plateau(r, 1.0, 1.0 + self.eps, self.ramp * self.eps);
        (self.height() * v, self.height() * d)
    }

    /// Free outgoing evolution `((r - t)/r) u0(r - t)`.
    pub fn free(&self, r: f64, t: f64) -> f64 {
        if r <= t || r <= 0.0 {
            return 0.0;
        }
        (r - t) / r * self.eval(r - t).0
    }

    /// Time derivative of [`ShellShape::free`].
    pub fn free_dt(&self, r: f64, t: f64) -> f64 {
        if r <= t || r <= 0.0 {
            return 0.0;
        }
        let (u, du) = self.eval(r - t);
        -u / r - (r - t) / r * du
    }

    /// Closed-form free evolution on the Picard lattice of `grid`.
    pub fn free_evolution(&self, grid: RadialGrid, horizon: f64) -> Result<Evolution> {
        let (steps, _) = lattice_steps(grid, horizon);
        let times = SpaceTimeField::uniform_times(grid.h(), steps);
        let rows = |f: &dyn Fn(f64, f64) -> f64| -> Vec<Vec<f64>> {
            times.iter().map(|&t| (0..grid.n()).map(|i| f(grid.r(i), t)).collect()).collect()
        };
        let u = rows(&|r, t| self.free(r, t));
        let ut = rows(&|r, t| self.free_dt(r, t));
        Ok(Evolution {
            u: SpaceTimeField::from_rows(grid, times.clone(), u)?,
            ut: SpaceTimeField::from_rows(grid, times, ut)?,
        })
    }
}

/// Shell data with the outgoing velocity `-(u0)_r - u0/r`, evaluated
/// analytically on the mollified profile.
pub fn make_outgoing_shell(grid: RadialGrid, shape: &ShellShape) -> Result<StatePair> {
    if grid.r_max() < 1.0 + shape.eps {
        return Err(Error::DomainTooSmall(format!("need r_max >= {}, have {}", 1.0 + shape.eps, grid.r_max())));
    }
    if shape.ramp == 0.0 {
        return Err(Error::InvalidParameter("the sharp shell has no pointwise velocity; use a positive ramp".into()));
    }
    let pos = RadialField::from_fn(grid, |r| shape.eval(r).0);
    let vel = RadialField::from_fn(grid, |r| {
        let (u, du) = shape.eval(r);
        if r > 0.0 {
            -du - u / r
        } else {
            0.0
        }
    });
    StatePair::new(pos, vel)
}

/// Data supported outside `B(0, R)` with the smallness parameter of the
/// exterior theorem.
#[derive(Debug, Clone, PartialEq)]
pub struct FarSupport {
    pub pair: StatePair,
    pub r: f64,
    pub h1: f64,
    /// `||u0||_{Hdot^1}^2 R^{4/N - 1}`.
    pub smallness: f64,
    /// `||u0||_inf R^{1/2} / ||u0||_{Hdot^1}`.
    pub sup_constant: f64,
}

/// Translates `profile` (supported in `[0, width]`) to `[R, R + width]` and
/// attaches the outgoing velocity.
pub fn make_far_support(profile: &RadialField, r: f64, grid: RadialGrid, n_pow: u32) -> Result<FarSupport> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("R must be positive, got {r}")));
    }
    let width = profile.support_radius(0.0);
    if grid.r_max() < r + width {
        return Err(Error::DomainTooSmall(format!("need r_max >= {}, have {}", r + width, grid.r_max())));
    }
    let pos = RadialField::from_fn(grid, |x| if x >= r { profile.eval_cubic(x - r) } else { 0.0 });
    if pos.is_zero() {
        return Ok(FarSupport { pair: StatePair::zeros(grid), r, h1: 0.0, smallness: 0.0, sup_constant: 0.0 });
    }
    let vel = local_outgoing_velocity(&pos)?;
    let h1 = sobolev_norm(&pos, 1.0)?;
    let smallness = h1 * h1 * r.powf(4.0 / f64::from(n_pow) - 1.0);
    let sup_constant = pos.sup_abs() * r.sqrt() / h1;
    Ok(FarSupport { pair: StatePair::new(pos, vel)?, r, h1, smallness, sup_constant })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundedBall {
    pub pair: StatePair,
    /// `||u0||_inf R^{2/N}`.
    pub smallness: f64,
}

/// Outgoing data bounded by `amp` and supported in `B(0, R)`: a plateau on
/// `[R/4, 7R/8]` with ramps of width `R/8`. Keeping the origin out of the
/// support keeps the velocity `-u0/r` bounded.
pub fn make_bounded_ball(grid: RadialGrid, amp: f64, r: f64, n_pow: u32) -> Result<BoundedBall> {
    if !(r > 0.0) || !amp.is_finite() {
        return Err(Error::InvalidParameter(format!("need R > 0 and finite amplitude, got R = {r}")));
    }
    if grid.r_max() < r {
        return Err(Error::DomainTooSmall(format!("need r_max >= {}, have {}", r, grid.r_max())));
    }
    let w = r / 8.0;
    let pos = RadialField::from_fn(grid, |x| amp * plateau(x, w, r, w).0);
    let vel = RadialField::from_fn(grid, |x| {
        let (v, d) = plateau(x, w, r, w);
        if x > 0.0 {
            -amp * (d + v / x)
        } else {
            0.0
        }
    });
    Ok(BoundedBall { pair: StatePair::new(pos, vel)?, smallness: amp.abs() * r.powf(2.0 / f64::from(n_pow)) })
}

/// `sum_j lambda_j^{-2/N} phi(r/lambda_j)` with velocity
/// `sum_j lambda_j^{-2/N-1} psi(r/lambda_j)`, or the outgoing velocity of
/// the sum when `psi` is `None`.
pub fn make_multiscale(
    grid: RadialGrid,
    phi: &RadialField,
    psi: Option<&RadialField>,
    scales: &[f64],
    n_pow: u32,
) -> Result<StatePair> {
    if scales.is_empty() || scales.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::InvalidParameter("scales must be positive".into()));
    }
    if scales.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("scales must be increasing".into()));
    }
    let e = -2.0 / f64::from(n_pow);
    let edge = phi.grid.r_max();
    let piece = |f: &RadialField, x: f64, lam: f64, k: f64| {
        let y = x / lam;
        if y > edge {
            0.0
        } else {
            lam.powf(k) * f.eval_cubic(y)
        }
    };
    let pos = RadialField::from_fn(grid, |x| scales.iter().map(|&l| piece(phi, x, l, e)).sum());
    let vel = match psi {
        Some(psi) => RadialField::from_fn(grid, |x| scales.iter().map(|&l| piece(psi, x, l, e - 1.0)).sum()),
        None => local_outgoing_velocity(&pos)?,
    };
    StatePair::new(pos, vel)
}

/// `eps sum_j phi(x - y_j)` and `eps sum_j psi(x - y_j)` as bump sums.
#[derive(Debug, Clone, PartialEq)]
pub struct MultibumpData {
    pub pos: BumpFunction,
    pub vel: Option<BumpFunction>,
    /// False unless every center is the origin; the data is then only
    /// accessible to the Choquet diagnostics.
    pub radial: bool,
    /// `S = sup_j sum_{i != j} <y_i - y_j>^-alpha`.
    pub criterion: f64,
}

pub fn make_multibump(
    phi: &RadialField,
    psi: Option<&RadialField>,
    centers: &[Vec3],
    eps: f64,
    alpha: f64,
) -> Result<MultibumpData> {
    if centers.is_empty() {
        return Err(Error::InvalidParameter("need at least one center".into()));
    }
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            if centers[i] == centers[j] {
                return Err(Error::InvalidParameter(format!("repeated center {:?}", centers[i])));
            }
        }
    }
    let build = |f: &RadialField| {
        let profile = Profile::sampled(f.clone());
        BumpFunction::new(centers.iter().map(|c| Bump::new(*c, eps, profile.clone(), 1.0)).collect())
    };
    Ok(MultibumpData {
        pos: build(phi)?,
        vel: psi.map(build).transpose()?,
        radial: centers.len() == 1 && centers[0] == [0.0; 3],
        criterion: separation_criterion(centers, alpha),
    })
}

/// `||u0||_{L^p}^p` summed over pieces versus the whole, as a ratio.
pub fn multiscale_lp_ratio(pair: &StatePair, phi: &RadialField, scales: &[f64], p: f64) -> f64 {
    lp_norm(&pair.pos, p).powf(p) / (scales.len() as f64 * lp_norm(phi, p).powf(p))
}
