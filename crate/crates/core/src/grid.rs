//! Uniform radial grids, sampled fields and the quadrature/difference
//! primitives everything else is built from.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Nodes `r_i = i*h`, `i = 0..n-1`, `h = r_max/(n-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    r_max: f64,
    n: usize,
    h: f64,
}

impl RadialGrid {
    pub fn new(r_max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("grid needs at least 2 nodes, got {n}")));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidParameter(format!("r_max must be positive, got {r_max}")));
        }
        Ok(Self { r_max, n, h: r_max / (n - 1) as f64 })
    }

    /// Smallest grid with spacing exactly `h` that reaches at least `cover`.
    pub fn with_spacing(h: f64, cover: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("spacing must be positive, got {h}")));
        }
        let n = ((cover / h) - 1e-9).ceil().max(2.0) as usize + 1;
        Ok(Self { r_max: (n - 1) as f64 * h, n, h })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn r_max(&self) -> f64 {
        self.r_max
    }
    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        i as f64 * self.h
    }
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.r(i)).collect()
    }

    /// Trapezoid weights in `dr` (no radial factor).
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let mut w = vec![self.h; self.n];
        w[0] *= 0.5;
        w[self.n - 1] *= 0.5;
        w
    }

    /// Trapezoid weights for the measure `4*pi*r^2 dr`.
    pub fn radial_weights(&self) -> Vec<f64> {
        let mut w = self.trapezoid_weights();
        for (i, wi) in w.iter_mut().enumerate() {
            let r = self.r(i);
            *wi *= FOUR_PI * r * r;
        }
        w
    }

    /// Spacing-and-extent equality up to rounding.
    pub fn same_as(&self, other: &RadialGrid) -> bool {
        self.n == other.n && (self.r_max - other.r_max).abs() <= 1e-12 * self.r_max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialField {
    pub grid: RadialGrid,
    pub samples: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: RadialGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::InvalidParameter(format!(
                "{} samples for a grid of {} nodes",
                samples.len(),
                grid.n()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite sample at node {i}")));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        Self { grid, samples: vec![0.0; grid.n()] }
    }

    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        let samples = (0..grid.n()).map(|i| f(grid.r(i))).collect();
        Self { grid, samples }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, samples: self.samples.iter().map(|&v| f(v)).collect() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// `a*self + b*other` on a shared grid.
    pub fn combine(&self, a: f64, other: &RadialField, b: f64) -> Self {
        debug_assert!(self.grid.same_as(&other.grid));
        let samples = self.samples.iter().zip(&other.samples).map(|(x, y)| a * x + b * y).collect();
        Self { grid: self.grid, samples }
    }

    pub fn sup_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|&v| v == 0.0)
    }

    /// Largest node radius where `|u| > rel * sup|u|`; 0 for the zero field.
    pub fn support_radius(&self, rel: f64) -> f64 {
        let cut = rel * self.sup_abs();
        match self.samples.iter().rposition(|v| v.abs() > cut) {
            Some(i) if self.sup_abs() > 0.0 => self.grid.r(i),
            _ => 0.0,
        }
    }

    /// Linear interpolation; 0 outside `[0, r_max]`.
    pub fn eval(&self, x: f64) -> f64 {
        interp_linear(&self.samples, x / self.grid.h())
    }

    /// Four-point Lagrange interpolation, exact at nodes; 0 beyond `r_max`,
    /// even reflection for `x < 0`.
    pub fn eval_cubic(&self, x: f64) -> f64 {
        interp_cubic(&self.samples, x / self.grid.h(), Left::Even, Right::Zero)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["r", "value"])?;
        for (i, v) in self.samples.iter().enumerate() {
            wr.write_record([fmt_num(self.grid.r(i)), fmt_num(*v)])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let (rs, cols) = read_columns(r, &["r", "value"])?;
        let grid = grid_from_nodes(&rs)?;
        RadialField::new(grid, cols.into_iter().next().unwrap())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

/// Position/velocity data `(u0, u1)` on one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePair {
    pub pos: RadialField,
    pub vel: RadialField,
}

impl StatePair {
    pub fn new(pos: RadialField, vel: RadialField) -> Result<Self> {
        if !pos.grid.same_as(&vel.grid) {
            return Err(Error::InvalidParameter("position and velocity on different grids".into()));
        }
        Ok(Self { pos, vel })
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        Self { pos: RadialField::zeros(grid), vel: RadialField::zeros(grid) }
    }

    pub fn grid(&self) -> RadialGrid {
        self.pos.grid
    }

    pub fn is_zero(&self) -> bool {
        self.pos.is_zero() && self.vel.is_zero()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { pos: self.pos.scaled(c), vel: self.vel.scaled(c) }
    }

    pub fn combine(&self, a: f64, other: &StatePair, b: f64) -> Self {
        Self { pos: self.pos.combine(a, &other.pos, b), vel: self.vel.combine(a, &other.vel, b) }
    }

    pub fn support_radius(&self, rel: f64) -> f64 {
        self.pos.support_radius(rel).max(self.vel.support_radius(rel))
    }

    /// CSV with header `r,pos,vel`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["r", "pos", "vel"])?;
        for i in 0..self.grid().n() {
            wr.write_record([
                fmt_num(self.grid().r(i)),
                fmt_num(self.pos.samples[i]),
                fmt_num(self.vel.samples[i]),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let (rs, mut cols) = read_columns(r, &["r", "pos", "vel"])?;
        let grid = grid_from_nodes(&rs)?;
        let vel = cols.pop().unwrap();
        let pos = cols.pop().unwrap();
        StatePair::new(RadialField::new(grid, pos)?, RadialField::new(grid, vel)?)
    }
}

/// `u(r_i, t_j)` stored time-major: row `j` is the field at `t_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeField {
    pub grid: RadialGrid,
    pub times: Vec<f64>,
    data: Vec<f64>,
}

impl SpaceTimeField {
    pub fn new(grid: RadialGrid, times: Vec<f64>, data: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times[0] != 0.0 {
            return Err(Error::InvalidParameter("time lattice must start at 0".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("times must be strictly increasing".into()));
        }
        if data.len() != grid.n() * times.len() {
            return Err(Error::InvalidParameter("space-time matrix has the wrong size".into()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite space-time sample".into()));
        }
        Ok(Self { grid, times, data })
    }

    pub fn zeros(grid: RadialGrid, times: Vec<f64>) -> Self {
        let len = grid.n() * times.len();
        Self { grid, times, data: vec![0.0; len] }
    }

    pub fn from_rows(grid: RadialGrid, times: Vec<f64>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let data = rows.into_iter().flatten().collect();
        Self::new(grid, times, data)
    }

    /// Uniform lattice `t_j = j*dt`, `j = 0..=steps`.
    pub fn uniform_times(dt: f64, steps: usize) -> Vec<f64> {
        (0..=steps).map(|j| j as f64 * dt).collect()
    }

    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let n = self.grid.n();
        &self.data[j * n..(j + 1) * n]
    }

    pub fn row_mut(&mut self, j: usize) -> &mut [f64] {
        let n = self.grid.n();
        &mut self.data[j * n..(j + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.grid.n())
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.grid.n() + i]
    }

    pub fn field(&self, j: usize) -> RadialField {
        RadialField { grid: self.grid, samples: self.row(j).to_vec() }
    }

    /// Time trace `u(r_i, .)`.
    pub fn trace(&self, i: usize) -> Vec<f64> {
        (0..self.n_times()).map(|j| self.at(i, j)).collect()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> Self {
        Self { grid: self.grid, times: self.times.clone(), data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn combine(&self, a: f64, other: &SpaceTimeField, b: f64) -> Self {
        debug_assert_eq!(self.data.len(), other.data.len());
        let data = self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect();
        Self { grid: self.grid, times: self.times.clone(), data }
    }

    pub fn sup_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Keep every `stride`-th time level (always keeping the first).
    pub fn subsample(&self, stride: usize) -> Self {
        let stride = stride.max(1);
        let keep: Vec<usize> = (0..self.n_times()).step_by(stride).collect();
        let times = keep.iter().map(|&j| self.times[j]).collect();
        let data = keep.iter().flat_map(|&j| self.row(j).iter().copied()).collect();
        Self { grid: self.grid, times, data }
    }

    /// CSV `r,t,value`, time in the outer loop.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["r", "t", "value"])?;
        for (j, t) in self.times.iter().enumerate() {
            for (i, v) in self.row(j).iter().enumerate() {
                wr.write_record([fmt_num(self.grid.r(i)), fmt_num(*t), fmt_num(*v)])?;
            }
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        check_header(&mut rd, &["r", "t", "value"])?;
        let mut times: Vec<f64> = Vec::new();
        let mut rs: Vec<f64> = Vec::new();
        let mut data = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let r = parse_num(&rec[0])?;
            let t = parse_num(&rec[1])?;
            if times.last() != Some(&t) {
                times.push(t);
            }
            if times.len() == 1 {
                rs.push(r);
            }
            data.push(parse_num(&rec[2])?);
        }
        let grid = grid_from_nodes(&rs)?;
        SpaceTimeField::new(grid, times, data).map_err(|e| Error::Config(format!("space-time CSV: {e}")))
    }
}

/// `integral of f * 4 pi r^2 dr`, composite trapezoid.
pub fn integrate_radial(f: &RadialField) -> f64 {
    f.grid.radial_weights().iter().zip(&f.samples).map(|(w, v)| w * v).sum()
}

/// Second-order central differences, one-sided second-order at the ends.
pub fn differentiate(f: &RadialField) -> Result<RadialField> {
    let n = f.grid.n();
    if n < 3 {
        return Err(Error::InsufficientResolution(format!("differentiate needs n >= 3, got {n}")));
    }
    let h = f.grid.h();
    let s = &f.samples;
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = (s[i + 1] - s[i - 1]) / (2.0 * h);
    }
    d[n - 1] = (3.0 * s[n - 1] - 4.0 * s[n - 2] + s[n - 3]) / (2.0 * h);
    Ok(RadialField { grid: f.grid, samples: d })
}

/// Linear interpolation onto `target`; 0 beyond the source `r_max`.
pub fn resample(f: &RadialField, target: RadialGrid) -> RadialField {
    if f.grid == target {
        return f.clone();
    }
    RadialField::from_fn(target, |r| f.eval(r))
}

/// Running trapezoid integral `W_i = int_0^{r_i} f dr`.
pub fn cumulative_trapezoid(samples: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in samples.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Plain trapezoid rule on possibly non-uniform abscissae.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2).zip(ys.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

/// How a sample sequence continues to negative indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Left {
    Zero,
    Even,
    Odd,
}

/// How a sample sequence continues past its last node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Right {
    Zero,
    Hold,
}

#[inline]
fn extended(s: &[f64], k: isize, left: Left, right: Right) -> f64 {
    let n = s.len() as isize;
    if k < 0 {
        let m = -k;
        let v = if m < n {
            s[m as usize]
        } else {
            match right {
                Right::Zero => 0.0,
                Right::Hold => s[(n - 1) as usize],
            }
        };
        match left {
            Left::Zero => 0.0,
            Left::Even => v,
            Left::Odd => -v,
        }
    } else if k < n {
        s[k as usize]
    } else {
        match right {
            Right::Zero => 0.0,
            Right::Hold => s[(n - 1) as usize],
        }
    }
}

/// Cubic Lagrange interpolation at fractional index `x`; node values are
/// returned exactly when `x` is within 1e-9 of an integer.
pub fn interp_cubic(s: &[f64], x: f64, left: Left, right: Right) -> f64 {
    let k = x.round();
    if (x - k).abs() < 1e-9 {
        return extended(s, k as isize, left, right);
    }
    let i = x.floor();
    let f = x - i;
    let i = i as isize;
    let p = |d: isize| extended(s, i + d, left, right);
    let l0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
    let l1 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
    let l2 = -(f + 1.0) * f * (f - 2.0) / 2.0;
    let l3 = (f + 1.0) * f * (f - 1.0) / 6.0;
    l0 * p(-1) + l1 * p(0) + l2 * p(1) + l3 * p(2)
}

/// Linear interpolation at fractional index `x`, 0 outside the samples.
pub fn interp_linear(s: &[f64], x: f64) -> f64 {
    if x < 0.0 || !x.is_finite() {
        return 0.0;
    }
    let n = s.len();
    let k = x.round();
    if (x - k).abs() < 1e-9 {
        let k = k as usize;
        return if k < n { s[k] } else { 0.0 };
    }
    let i = x.floor() as usize;
    if i + 1 >= n {
        return 0.0;
    }
    let f = x - i as f64;
    (1.0 - f) * s[i] + f * s[i + 1]
}

/// Shortest decimal that round-trips the value.
pub(crate) fn fmt_num(v: f64) -> String {
    format!("{v:?}")
}

fn parse_num(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Config(format!("not a number: {s:?}")))
}

fn check_header<R: Read>(rd: &mut csv::Reader<R>, want: &[&str]) -> Result<()> {
    let hdr = rd.headers()?;
    let got: Vec<&str> = hdr.iter().map(|h| h.trim()).collect();
    if got != want {
        return Err(Error::Config(format!("expected CSV header {:?}, found {:?}", want.join(","), got.join(","))));
    }
    Ok(())
}

fn read_columns<R: Read>(r: R, header: &[&str]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut rd = csv::Reader::from_reader(r);
    check_header(&mut rd, header)?;
    let mut rs = Vec::new();
    let mut cols = vec![Vec::new(); header.len() - 1];
    for rec in rd.records() {
        let rec = rec?;
        rs.push(parse_num(&rec[0])?);
        for (c, col) in cols.iter_mut().enumerate() {
            col.push(parse_num(&rec[c + 1])?);
        }
    }
    Ok((rs, cols))
}

fn grid_from_nodes(rs: &[f64]) -> Result<RadialGrid> {
    if rs.len() < 2 || rs[0] != 0.0 {
        return Err(Error::Config("field CSV must start at r = 0 and have at least 2 rows".into()));
    }
    let grid = RadialGrid::new(*rs.last().unwrap(), rs.len())?;
    let tol = 1e-9 * grid.r_max();
    if rs.iter().enumerate().any(|(i, &r)| (r - grid.r(i)).abs() > tol) {
        return Err(Error::Config("field CSV nodes are not uniformly spaced".into()));
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_volume_integral() {
        let g = RadialGrid::new(8.0, 4096).unwrap();
        let f = RadialField::from_fn(g, |r| (-r * r).exp());
        let exact = std::f64::consts::PI.powf(1.5);
        assert!((integrate_radial(&f) - exact).abs() < 1e-6);
    }

    #[test]
    fn ball_volume_with_sharp_cut() {
        let g = RadialGrid::new(2.0, 2001).unwrap();
        let f = RadialField::from_fn(g, |r| if r <= 1.0 + 1e-12 { 1.0 } else { 0.0 });
        let exact = FOUR_PI / 3.0;
        // the cut cell contributes an O(h) trapezoid error
        assert!((integrate_radial(&f) - exact).abs() / exact < 5e-3);
    }

    #[test]
    fn derivative_of_sine() {
        let g = RadialGrid::new(8.0, 4096).unwrap();
        let d = differentiate(&RadialField::from_fn(g, f64::sin)).unwrap();
        let err = (1..g.n() - 1).map(|i| (d.samples[i] - g.r(i).cos()).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-5, "{err}");
    }

    #[test]
    fn derivative_exact_on_linears() {
        let g = RadialGrid::new(3.0, 31).unwrap();
        let d = differentiate(&RadialField::from_fn(g, |r| r)).unwrap();
        for i in 1..g.n() - 1 {
            assert!((d.samples[i] - 1.0).abs() < 1e-12);
        }
        let c = differentiate(&RadialField::from_fn(g, |_| 2.5)).unwrap();
        assert!(c.samples.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn differentiate_rejects_tiny_grids() {
        let g = RadialGrid::new(1.0, 2).unwrap();
        let e = differentiate(&RadialField::zeros(g)).unwrap_err();
        assert!(e.to_string().contains("insufficient resolution"));
    }

    #[test]
    fn resample_identity_and_linears() {
        let g = RadialGrid::new(4.0, 41).unwrap();
        let f = RadialField::from_fn(g, |r| (r * 1.3).sin());
        assert_eq!(resample(&f, g).samples, f.samples);
        let lin = RadialField::from_fn(g, |r| r);
        let off = RadialGrid::new(3.95, 17).unwrap();
        let out = resample(&lin, off);
        for i in 0..off.n() {
            assert!((out.samples[i] - off.r(i)).abs() < 1e-12);
        }
        let chi = RadialField::from_fn(g, |r| if r <= 1.0 + 1e-12 { 1.0 } else { 0.0 });
        let fine = RadialGrid::new(4.0, 81).unwrap();
        let up = resample(&chi, fine);
        for i in (0..fine.n()).step_by(2) {
            assert_eq!(up.samples[i], chi.samples[i / 2]);
        }
        // beyond the source extent reads as zero
        let wide = RadialGrid::new(8.0, 81).unwrap();
        assert_eq!(resample(&RadialField::from_fn(g, |_| 1.0), wide).samples[80], 0.0);
    }

    #[test]
    fn cubic_interp_exact_on_cubics() {
        let s: Vec<f64> = (0..10).map(|k| {
            let x = k as f64;
            x * x * x - 2.0 * x
        }).collect();
        let x = 4.37;
        let v = interp_cubic(&s, x, Left::Zero, Right::Zero);
        assert!((v - (x * x * x - 2.0 * x)).abs() < 1e-10);
        assert_eq!(interp_cubic(&s, 3.0 + 1e-12, Left::Zero, Right::Zero), s[3]);
    }

    #[test]
    fn csv_round_trip() {
        let g = RadialGrid::new(2.0, 9).unwrap();
        let u = RadialField::from_fn(g, |r| (-r).exp());
        let st = SpaceTimeField::from_rows(g, vec![0.0, 0.5], vec![u.samples.clone(), u.samples.clone()]).unwrap();
        let mut buf = Vec::new();
        st.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("r,t,value\n0.0,0.0,1.0\n"));
        let back = SpaceTimeField::read_csv(&buf[..]).unwrap();
        assert_eq!(back, st);
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        assert_eq!(RadialField::read_csv(&buf[..]).unwrap(), u);
    }
}
