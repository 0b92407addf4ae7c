//! Balls, spherical shells and their unions; the weighted volume
//! `int_A |x - y|^-alpha dx` and the outer measure `mu_alpha`.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ChoquetParams;
use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

pub(crate) fn dist(a: Vec3, b: Vec3) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

pub(crate) fn midpoint(a: Vec3, b: Vec3) -> Vec3 {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec3,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec3, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }
}

/// `{ x : inner <= |x - center| <= outer }`; `inner = 0` is a ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub center: Vec3,
    pub inner: f64,
    pub outer: f64,
}

impl Shell {
    pub fn new(center: Vec3, inner: f64, outer: f64) -> Result<Self> {
        if !(inner >= 0.0 && outer > inner && outer.is_finite()) {
            return Err(Error::InvalidParameter(format!("shell needs 0 <= inner < outer, got [{inner}, {outer}]")));
        }
        Ok(Self { center, inner, outer })
    }

    pub fn contains(&self, x: Vec3) -> bool {
        let d = dist(x, self.center);
        d >= self.inner && d <= self.outer
    }

    /// `int_shell |x - y|^-alpha dx`.
    pub fn kato(&self, y: Vec3, alpha: f64) -> f64 {
        let d = dist(y, self.center);
        let outer = ball_primitive(d, self.outer, alpha);
        if self.inner > 0.0 {
            outer - ball_primitive(d, self.inner, alpha)
        } else {
            outer
        }
    }

    fn overlaps(&self, o: &Shell) -> bool {
        let d = dist(self.center, o.center);
        // distances to o.center reached from self lie in [lo, d + outer]
        let lo = if d >= self.inner && d <= self.outer { 0.0 } else { (d - self.inner).abs().min((d - self.outer).abs()) };
        let eps = 1e-12 * (1.0 + self.outer + o.outer);
        lo < o.outer - eps && d + self.outer > o.inner + eps
    }
}

impl From<Ball> for Shell {
    fn from(b: Ball) -> Self {
        Shell { center: b.center, inner: 0.0, outer: b.radius }
    }
}

/// `int_{|x - c| <= s} |x - y|^-alpha dx` with `d = |y - c|`, in closed form.
///
/// Spheres about `c` of radius `sigma` contribute
/// `2 pi sigma / d * int_{|d - sigma|}^{d + sigma} rho^{1 - alpha} drho`.
pub fn ball_primitive(d: f64, s: f64, alpha: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let e = 3.0 - alpha;
    if d <= 1e-6 * s {
        return 4.0 * PI * s.powf(e) / e;
    }
    let k = 2.0 - alpha;
    if k.abs() < 1e-9 {
        let log = if (s - d).abs() < 1e-15 * s { 0.0 } else { (s * s - d * d) / 2.0 * ((d + s) / (d - s).abs()).ln() };
        return 2.0 * PI / d * (log + d * s);
    }
    let (k1, k2) = (k + 1.0, k + 2.0);
    let fp = |u: f64| u.powf(k2) / k2 - d * u.powf(k1) / k1;
    let g = |v: f64| d * v.powf(k1) / k1 - v.powf(k2) / k2;
    let plus = fp(d + s) - fp(d);
    let minus = if s <= d {
        g(d) - g(d - s)
    } else {
        let v = s - d;
        g(d) + d * v.powf(k1) / k1 + v.powf(k2) / k2
    };
    2.0 * PI / (d * k) * (plus - minus)
}

/// Finite union of shells (balls included), possibly overlapping.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BallUnion {
    pub pieces: Vec<Shell>,
}

impl BallUnion {
    pub fn new(balls: Vec<Ball>) -> Self {
        Self { pieces: balls.into_iter().map(Shell::from).collect() }
    }

    pub fn from_shells(pieces: Vec<Shell>) -> Self {
        Self { pieces }
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, x: Vec3) -> bool {
        self.pieces.iter().any(|p| p.contains(x))
    }

    pub fn translated(&self, v: Vec3) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Shell { center: [p.center[0] + v[0], p.center[1] + v[1], p.center[2] + v[2]], ..*p })
            .collect();
        Self { pieces }
    }

    pub fn bounding_box(&self) -> Option<(Vec3, Vec3)> {
        let first = self.pieces.first()?;
        let mut lo = first.center;
        let mut hi = first.center;
        for p in &self.pieces {
            for a in 0..3 {
                lo[a] = lo[a].min(p.center[a] - p.outer);
                hi[a] = hi[a].max(p.center[a] + p.outer);
            }
        }
        Some((lo, hi))
    }

    /// Lebesgue volume.
    pub fn volume(&self) -> f64 {
        let y = self.pieces.first().map(|p| p.center).unwrap_or([0.0; 3]);
        kato_integral(self, y, 0.0, &ChoquetParams::default())
    }

    /// Merges concentric pieces and groups the rest into mutually
    /// non-overlapping clusters.
    pub(crate) fn clusters(&self) -> Vec<Vec<Shell>> {
        let mut groups: Vec<(Vec3, Vec<(f64, f64)>)> = Vec::new();
        for p in &self.pieces {
            match groups.iter_mut().find(|(c, _)| dist(*c, p.center) <= 1e-12 * (1.0 + p.outer)) {
                Some((_, iv)) => iv.push((p.inner, p.outer)),
                None => groups.push((p.center, vec![(p.inner, p.outer)])),
            }
        }
        let merged: Vec<Vec<Shell>> = groups
            .into_iter()
            .map(|(c, iv)| merge_intervals(iv).into_iter().map(|(a, b)| Shell { center: c, inner: a, outer: b }).collect())
            .collect();
        // union-find over concentric groups
        let m = merged.len();
        let mut parent: Vec<usize> = (0..m).collect();
        fn root(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for i in 0..m {
            for j in i + 1..m {
                let hit = merged[i].iter().any(|a| merged[j].iter().any(|b| a.overlaps(b) || b.overlaps(a)));
                if hit {
                    let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                    parent[ri] = rj;
                }
            }
        }
        let mut out: Vec<Vec<Shell>> = Vec::new();
        let mut slot = vec![usize::MAX; m];
        for i in 0..m {
            let r = root(&mut parent, i);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].extend_from_slice(&merged[i]);
        }
        out
    }
}

pub(crate) fn merge_intervals(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in iv {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// `[lo, hi)` pieces of `a` not covered by `b`; both lists sorted and disjoint.
pub(crate) fn subtract_intervals(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(mut lo, hi) in a {
        for &(c, d) in b {
            if d <= lo || c >= hi {
                continue;
            }
            if c > lo {
                out.push((lo, c));
            }
            lo = lo.max(d);
            if lo >= hi {
                break;
            }
        }
        if lo < hi {
            out.push((lo, hi));
        }
    }
    out
}

/// Quasi-uniform directions on the unit sphere.
pub(crate) fn fibonacci_sphere(m: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..m)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / m as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            [rho * phi.cos(), rho * phi.sin(), z]
        })
        .collect()
}

/// Overlapping cluster: `int rho^{2-alpha} |S(y, rho) cap A| / rho^2 drho`
/// between the radii where a sphere about `y` crosses a boundary. Pieces of
/// the sweep where no sphere is cut are integrated exactly, the rest by
/// Gauss-Legendre in `rho` with the covered fraction of the sphere estimated
/// on a Fibonacci point set.
fn cluster_kato(pieces: &[Shell], y: Vec3, alpha: f64, dirs: &[Vec3], gl: &GaussLegendre) -> f64 {
    let mut breaks = vec![0.0];
    for p in pieces {
        let d = dist(y, p.center);
        for r in [p.inner, p.outer] {
            if r > 0.0 {
                breaks.push((d - r).abs());
                breaks.push(d + r);
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    let e = 3.0 - alpha;
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let cut = pieces.iter().any(|p| {
            let d = dist(y, p.center);
            [p.inner, p.outer].iter().any(|&r| r > 0.0 && mid > (d - r).abs() && mid < d + r)
        });
        if !cut {
            let probe = [y[0] + mid, y[1], y[2]];
            if pieces.iter().any(|p| p.contains(probe)) {
                total += 4.0 * PI * (b.powf(e) - a.powf(e)) / e;
            }
            continue;
        }
        total += gl.integrate(a, b, |rho| {
            let hit = dirs
                .iter()
                .filter(|w| {
                    let x = [y[0] + rho * w[0], y[1] + rho * w[1], y[2] + rho * w[2]];
                    pieces.iter().any(|p| p.contains(x))
                })
                .count();
            4.0 * PI * rho.powf(2.0 - alpha) * hit as f64 / dirs.len() as f64
        });
    }
    total
}

/// `int_A |x - y|^-alpha dx`. Isolated balls and shells use the closed
/// form; overlapping clusters fall back to shell quadrature about `y`.
pub fn kato_integral(a: &BallUnion, y: Vec3, alpha: f64, params: &ChoquetParams) -> f64 {
    let clusters = a.clusters();
    if clusters.iter().all(|c| is_concentric(c)) {
        return clusters.iter().flatten().map(|p| p.kato(y, alpha)).sum();
    }
    let dirs = fibonacci_sphere(params.directions);
    let gl = GaussLegendre::new(params.radial_order).expect("radial order >= 2");
    kato_clusters(&clusters, y, alpha, &dirs, &gl)
}

fn is_concentric(c: &[Shell]) -> bool {
    c.iter().all(|p| p.center == c[0].center)
}

fn kato_clusters(clusters: &[Vec<Shell>], y: Vec3, alpha: f64, dirs: &[Vec3], gl: &GaussLegendre) -> f64 {
    clusters
        .iter()
        .map(|c| if is_concentric(c) { c.iter().map(|p| p.kato(y, alpha)).sum() } else { cluster_kato(c, y, alpha, dirs, gl) })
        .sum()
}

/// Sup of `f` over seeds, a lattice on `bbox` and two rounds of local
/// refinement around the best points. `scale` caps the refinement step.
pub(crate) fn maximize<F>(seeds: &[Vec3], bbox: (Vec3, Vec3), scale: f64, params: &ChoquetParams, f: F) -> (f64, Vec3)
where
    F: Fn(Vec3) -> f64 + Sync,
{
    let (lo, hi) = bbox;
    let extent = (0..3).map(|a| hi[a] - lo[a]).fold(0.0, f64::max);
    let spacing = params
        .lattice_spacing
        .unwrap_or_else(|| extent / (params.lattice_points.max(2) - 1) as f64)
        .max(1e-12 * (1.0 + extent));
    let mut cands: Vec<Vec3> = seeds.to_vec();
    let counts: Vec<usize> = (0..3).map(|a| (((hi[a] - lo[a]) / spacing).floor() as usize + 1).min(33)).collect();
    for i in 0..counts[0] {
        for j in 0..counts[1] {
            for k in 0..counts[2] {
                let p = [i, j, k];
                let mut x = [0.0; 3];
                for a in 0..3 {
                    let free = (hi[a] - lo[a]) - spacing * (counts[a] - 1) as f64;
                    x[a] = lo[a] + 0.5 * free.max(0.0) + spacing * p[a] as f64;
                }
                cands.push(x);
            }
        }
    }
    let eval = |pts: Vec<Vec3>| -> Vec<(f64, Vec3)> { pts.into_par_iter().map(|x| (f(x), x)).collect() };
    let mut scored = eval(cands);
    let top = |s: &mut Vec<(f64, Vec3)>| {
        s.sort_by(|a, b| b.0.total_cmp(&a.0));
        s.dedup_by(|a, b| dist(a.1, b.1) < 1e-12);
        s.truncate(params.refine_top.max(1));
    };
    top(&mut scored);
    let mut step = spacing.min(scale.max(1e-12)) / 4.0;
    for _ in 0..params.refine_rounds {
        let mut pts = Vec::new();
        for &(_, c) in &scored {
            for i in -2i32..=2 {
                for j in -2i32..=2 {
                    for k in -2i32..=2 {
                        if (i, j, k) != (0, 0, 0) {
                            pts.push([c[0] + step * i as f64, c[1] + step * j as f64, c[2] + step * k as f64]);
                        }
                    }
                }
            }
        }
        scored.extend(eval(pts));
        top(&mut scored);
        step /= 4.0;
    }
    (scored[0].0, scored[0].1)
}

pub(crate) fn seeds_for(pieces: &[Shell]) -> Vec<Vec3> {
    let mut centers: Vec<Vec3> = Vec::new();
    for p in pieces {
        if !centers.iter().any(|c| dist(*c, p.center) < 1e-12) {
            centers.push(p.center);
        }
    }
    let mut seeds = centers.clone();
    let lim = centers.len().min(64);
    for i in 0..lim {
        for j in i + 1..lim {
            seeds.push(midpoint(centers[i], centers[j]));
        }
    }
    for p in pieces {
        if p.inner > 0.0 {
            let r = 0.5 * (p.inner + p.outer);
            for a in 0..3 {
                for s in [-1.0, 1.0] {
                    let mut x = p.center;
                    x[a] += s * r;
                    seeds.push(x);
                }
            }
        }
    }
    seeds
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub value: f64,
    pub argmax: Vec3,
}

/// `mu_alpha(A) = sup_y int_A |x - y|^-alpha dx`.
pub fn outer_measure(a: &BallUnion, params: &ChoquetParams) -> MeasureResult {
    let Some(bbox) = a.bounding_box() else {
        return MeasureResult { value: 0.0, argmax: [0.0; 3] };
    };
    let clusters = a.clusters();
    let flat: Vec<Shell> = clusters.iter().flatten().copied().collect();
    let scale = flat.iter().map(|p| p.outer).fold(0.0, f64::max);
    let seeds = seeds_for(&flat);
    let alpha = params.alpha;
    let (value, argmax) = if clusters.iter().all(|c| is_concentric(c)) {
        maximize(&seeds, bbox, scale, params, |y| flat.iter().map(|p| p.kato(y, alpha)).sum())
    } else {
        let dirs = fibonacci_sphere(params.directions);
        let gl = GaussLegendre::new(params.radial_order).expect("radial order >= 2");
        maximize(&seeds, bbox, scale, params, |y| kato_clusters(&clusters, y, alpha, &dirs, &gl))
    };
    MeasureResult { value, argmax }
}

/// Sup over `y` for a union already known to be a disjoint family of pieces.
pub(crate) fn measure_disjoint(pieces: &[Shell], params: &ChoquetParams) -> MeasureResult {
    if pieces.is_empty() {
        return MeasureResult { value: 0.0, argmax: [0.0; 3] };
    }
    let u = BallUnion::from_shells(pieces.to_vec());
    let bbox = u.bounding_box().expect("nonempty");
    let scale = pieces.iter().map(|p| p.outer).fold(0.0, f64::max);
    let alpha = params.alpha;
    let (value, argmax) =
        maximize(&seeds_for(pieces), bbox, scale, params, |y| pieces.iter().map(|p| p.kato(y, alpha)).sum());
    MeasureResult { value, argmax }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64) -> ChoquetParams {
        ChoquetParams::new(alpha).unwrap()
    }

    fn closed(r: f64, alpha: f64) -> f64 {
        4.0 * PI * r.powf(3.0 - alpha) / (3.0 - alpha)
    }

    // brute-force midpoint rule on a Cartesian grid, cells containing y dropped
    fn brute(b: Ball, y: Vec3, alpha: f64, m: usize) -> f64 {
        let h = 2.0 * b.radius / m as f64;
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let x = [
                        b.center[0] - b.radius + (i as f64 + 0.5) * h,
                        b.center[1] - b.radius + (j as f64 + 0.5) * h,
                        b.center[2] - b.radius + (k as f64 + 0.5) * h,
                    ];
                    if dist(x, b.center) <= b.radius {
                        s += dist(x, y).powf(-alpha) * h * h * h;
                    }
                }
            }
        }
        s
    }

    #[test]
    fn primitive_volume_is_independent_of_center() {
        for d in [0.0, 0.3, 1.0, 2.5, 40.0] {
            let v = ball_primitive(d, 1.3, 0.0);
            assert!((v - 4.0 * PI * 1.3f64.powi(3) / 3.0).abs() < 1e-10 * v, "{d} {v}");
        }
    }

    #[test]
    fn primitive_is_continuous_through_alpha_two() {
        for d in [0.5, 1.0, 2.0] {
            let a = ball_primitive(d, 1.0, 2.0);
            let b = ball_primitive(d, 1.0, 2.0 + 1e-6);
            let c = ball_primitive(d, 1.0, 2.0 - 1e-6);
            assert!((a - b).abs() < 1e-4 * a && (a - c).abs() < 1e-4 * a, "{a} {b} {c}");
        }
    }

    #[test]
    fn primitive_matches_brute_force() {
        let b = Ball::new([0.0; 3], 1.0).unwrap();
        for (y, alpha) in [([2.0, 0.0, 0.0], 1.0), ([0.0, 3.0, 0.0], 2.0), ([0.0, 0.0, 1.5], 0.5)] {
            let exact = ball_primitive(dist(y, b.center), 1.0, alpha);
            let approx = brute(b, y, alpha, 120);
            assert!((exact - approx).abs() < 5e-3 * exact, "{exact} {approx}");
        }
    }

    #[test]
    fn unit_ball_at_center() {
        let a = BallUnion::new(vec![Ball::new([0.0; 3], 1.0).unwrap()]);
        let v = kato_integral(&a, [0.0; 3], 1.0, &params(1.0));
        assert!((v - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn far_field() {
        let a = BallUnion::new(vec![Ball::new([0.0; 3], 1.0).unwrap()]);
        let v = kato_integral(&a, [100.0, 0.0, 0.0], 1.0, &params(1.0));
        let far = 4.0 * PI / 3.0 / 100.0;
        assert!((v - far).abs() < 0.05 * far);
    }

    #[test]
    fn overlapping_volume_matches_lens_formula() {
        let (r, d) = (1.0, 1.2);
        let a = BallUnion::new(vec![Ball::new([0.0; 3], r).unwrap(), Ball::new([d, 0.0, 0.0], r).unwrap()]);
        let lens = PI * (4.0 * r + d) * (2.0 * r - d).powi(2) / 12.0;
        let exact = 2.0 * 4.0 * PI / 3.0 - lens;
        let v = kato_integral(&a, [0.3, 0.2, -0.1], 0.0, &params(0.0));
        assert!((v - exact).abs() < 0.01 * exact, "{v} {exact}");
    }

    #[test]
    fn overlapping_weighted_matches_brute_force() {
        // union of two overlapping balls = bigger bounding computation done by brute force
        let b1 = Ball::new([0.0; 3], 1.0).unwrap();
        let b2 = Ball::new([1.0, 0.0, 0.0], 1.0).unwrap();
        let a = BallUnion::new(vec![b1, b2]);
        let y = [0.5, 0.3, 0.0];
        let m = 100;
        let h = 4.0 / m as f64;
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let x = [-1.5 + (i as f64 + 0.5) * h, -2.0 + (j as f64 + 0.5) * h, -2.0 + (k as f64 + 0.5) * h];
                    if a.contains(x) {
                        s += dist(x, y).powf(-1.0) * h * h * h;
                    }
                }
            }
        }
        let v = kato_integral(&a, y, 1.0, &params(1.0));
        assert!((v - s).abs() < 0.01 * s, "{v} {s}");
    }

    #[test]
    fn single_ball_measure_any_center() {
        for alpha in [0.5, 1.0, 2.0] {
            for c in [[0.0; 3], [3.3, -1.7, 0.41]] {
                let a = BallUnion::new(vec![Ball::new(c, 0.5).unwrap()]);
                let m = outer_measure(&a, &params(alpha));
                let exact = closed(0.5, alpha);
                assert!((m.value - exact).abs() < 1e-9 * exact);
                assert!(dist(m.argmax, c) < 1e-9);
            }
        }
    }

    #[test]
    fn two_far_balls_superpose() {
        let p = params(1.0);
        let one = closed(1.0, 1.0);
        let vol = 4.0 * PI / 3.0;
        let mut prev = f64::INFINITY;
        for d in [10.0, 20.0, 40.0] {
            let a = BallUnion::new(vec![Ball::new([0.0; 3], 1.0).unwrap(), Ball::new([d, 0.0, 0.0], 1.0).unwrap()]);
            let m = outer_measure(&a, &p).value;
            assert!((m - (one + vol / d)).abs() < 0.01 * one, "{d} {m}");
            assert!(m < prev);
            prev = m;
        }
    }

    #[test]
    fn measure_shrinks_with_radius() {
        let p = params(1.5);
        let mut prev = f64::INFINITY;
        for r in [1.0, 0.5, 0.1, 0.01] {
            let m = outer_measure(&BallUnion::new(vec![Ball::new([1.0, 2.0, 3.0], r).unwrap()]), &p).value;
            assert!(m < prev);
            prev = m;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn concentric_shells_add() {
        let c = [1.0, 0.0, 0.0];
        let a = BallUnion::from_shells(vec![Shell::new(c, 0.0, 1.0).unwrap(), Shell::new(c, 0.5, 2.0).unwrap()]);
        assert_eq!(a.clusters().len(), 1);
        let v = kato_integral(&a, [0.0; 3], 1.0, &params(1.0));
        assert!((v - ball_primitive(1.0, 2.0, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn interval_algebra() {
        assert_eq!(merge_intervals(vec![(2.0, 3.0), (0.0, 1.0), (0.5, 2.5)]), vec![(0.0, 3.0)]);
        assert_eq!(subtract_intervals(&[(0.0, 4.0)], &[(1.0, 2.0), (3.0, 5.0)]), vec![(0.0, 1.0), (2.0, 3.0)]);
        assert_eq!(subtract_intervals(&[(0.0, 1.0)], &[(0.0, 1.0)]), vec![]);
    }
}
