//! The thirteen acceptance checks. Each returns the verdicts of its parts;
//! a criterion passes when all of them do.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::choquet::{
    atomic_decompose, contraction_ratio, kato_norm, lorentz_choquet_norm, multibump_smallness, outer_measure,
    quasi_triangle_ratio, Ball, BallUnion, Bump, BumpFunction, ChoquetParams, Profile, Vec3,
};
use crate::error::Result;
use crate::freeflow::{outgoing_closed_form, propagate_free};
use crate::grid::{fmt_num, RadialField, RadialGrid, StatePair};
use crate::nonlinear::{lattice_steps, local_existence_probe, picard_solve, reference_solve, Sign, SolverConfig};
use crate::norms::{critical_index, energy, lp_norm, sobolev_norm};
use crate::projections::{pair_norm, project, project_in, project_out};
use crate::reduction::{equivalent_h1_seminorm, forward_t, inverse_t};

use super::builders::{local_outgoing_velocity, plateau, ShellShape};
use super::report::{fit_loglog, Verdict};
use super::sweep::{run_shell_sweep, shell_largeness, ShellSweepConfig};
use super::*;

pub const SEED: u64 = 20_240_607;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub criterion: String,
    pub verdicts: Vec<Verdict>,
    pub errors: Vec<String>,
}

impl CriterionOutcome {
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && !self.verdicts.is_empty() && self.verdicts.iter().all(|v| v.passed)
    }

    pub fn line(&self) -> String {
        let failed: Vec<&Verdict> = self.verdicts.iter().filter(|v| !v.passed).collect();
        let detail = if !self.errors.is_empty() {
            self.errors.join("; ")
        } else if let Some(v) = failed.first() {
            format!("measured {} vs threshold {} ({})", fmt_num(v.measured), fmt_num(v.threshold), v.detail)
        } else {
            format!("{} checks", self.verdicts.len())
        };
        format!("{} {}: {}", if self.passed() { "PASS" } else { "FAIL" }, self.criterion, detail)
    }
}

fn outcome(criterion: &str, r: Result<Vec<Verdict>>) -> CriterionOutcome {
    match r {
        Ok(verdicts) => CriterionOutcome { criterion: criterion.into(), verdicts, errors: Vec::new() },
        Err(e) => CriterionOutcome { criterion: criterion.into(), verdicts: Vec::new(), errors: vec![e.to_string()] },
    }
}

/// Runs criterion `k` (1-based).
pub fn run_criterion(k: usize) -> Option<CriterionOutcome> {
    let f: fn() -> Result<Vec<Verdict>> = match k {
        1 => projection_algebra,
        2 => reduction_round_trip,
        3 => closed_form_vs_flow,
        4 => free_conservation,
        5 => decay_exponents,
        6 => reference_solver,
        7 => picard_small_data,
        8 => local_existence_scaling,
        9 => shell_scaling,
        10 => outer_measure_balls,
        11 => lorentz_scaling,
        12 => embedding_and_atoms,
        13 => closed_loop,
        _ => return None,
    };
    Some(outcome(CRITERIA[k - 1], f()))
}

pub fn run_all() -> Vec<CriterionOutcome> {
    (1..=CRITERIA.len()).filter_map(run_criterion).collect()
}

fn sup_diff(a: &RadialField, b: &RadialField) -> f64 {
    a.combine(1.0, b, -1.0).sup_abs()
}

/// Random smooth pairs: sums of Gaussians cut to `[1, 6]` by a smooth window.
pub fn random_pairs(count: usize, grid: RadialGrid, seed: u64) -> Vec<StatePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = |rng: &mut ChaCha8Rng| {
        let k = rng.gen_range(1..=3);
        let bumps: Vec<(f64, f64, f64)> =
            (0..k).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(2.0..5.0), rng.gen_range(0.25..0.6))).collect();
        RadialField::from_fn(grid, move |r| {
            let w = plateau(r, 1.0, 6.0, 0.5).0;
            w * bumps.iter().map(|(a, c, s)| a * (-((r - c) / s).powi(2)).exp()).sum::<f64>()
        })
    };
    (0..count)
        .map(|_| {
            let pos = field(&mut rng);
            let vel = field(&mut rng);
            StatePair { pos, vel }
        })
        .collect()
}

fn projection_algebra() -> Result<Vec<Verdict>> {
    let g = RadialGrid::new(16.0, 4096)?;
    let (mut sum, mut pp, mut mm, mut pm) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for s in random_pairs(50, g, SEED) {
        let n = pair_norm(&s)?;
        let p = project(&s)?;
        let back = p.out_part.combine(1.0, &p.in_part, 1.0);
        sum = sum.max(pair_norm(&back.combine(1.0, &s, -1.0))? / n);
        pp = pp.max(pair_norm(&project_out(&p.out_part)?.combine(1.0, &p.out_part, -1.0))? / n);
        mm = mm.max(pair_norm(&project_in(&p.in_part)?.combine(1.0, &p.in_part, -1.0))? / n);
        pm = pm.max(pair_norm(&project_out(&p.in_part)?)? / n);
    }
    let c = CRITERION_PROJECTION;
    Ok(vec![
        Verdict::at_most(c, sum, 1e-10, "|(P+ + P- - I)s|/|s| over 50 pairs"),
        Verdict::at_most(c, pp, 1e-5, "|P+^2 - P+|/|s|"),
        Verdict::at_most(c, mm, 1e-5, "|P-^2 - P-|/|s|"),
        Verdict::at_most(c, pm, 1e-5, "|P+ P- s|/|s|"),
    ])
}

fn reduction_round_trip() -> Result<Vec<Verdict>> {
    let g = RadialGrid::new(16.0, 4096)?;
    let mut trip = 0.0f64;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for s in random_pairs(50, g, SEED) {
        for u in [&s.pos, &s.vel] {
            let back = inverse_t(&forward_t(u)?);
            trip = trip.max(sup_diff(&back, u) / u.sup_abs());
            let ratio = equivalent_h1_seminorm(u)? / sobolev_norm(u, 1.0)?;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    let c = CRITERION_REDUCTION;
    let bracket = hi.max(1.0 / lo);
    Ok(vec![
        Verdict::at_most(c, trip, 1e-8, "sup relative round-trip error over 100 fields"),
        Verdict::at_most(
            c,
            bracket,
            3.0,
            format!("norm-equivalence bracket C, ratios in [{lo:.6}, {hi:.6}]; spread {:.3e}", hi / lo - 1.0),
        ),
    ])
}

fn shell(g: RadialGrid, a: f64, b: f64, w: f64) -> Result<StatePair> {
    let u0 = RadialField::from_fn(g, |r| plateau(r, a, b, w).0);
    let vel = local_outgoing_velocity(&u0)?;
    StatePair::new(u0, vel)
}

fn closed_form_vs_flow() -> Result<Vec<Verdict>> {
    let g = RadialGrid::new(9.0, 4096)?;
    let mut worst = 0.0f64;
    for (a, b, w) in [(1.0, 2.0, 0.3), (0.5, 1.5, 0.25), (1.0, 3.0, 0.5)] {
        let s = shell(g, a, b, w)?;
        for t in [0.5, 2.0, 5.0] {
            let flow = propagate_free(&s, t)?.pos;
            let exact = outgoing_closed_form(&s.pos, t);
            worst = worst.max(sup_diff(&flow, &exact) / exact.sup_abs());
        }
    }
    Ok(vec![Verdict::at_most(CRITERION_CLOSED_FORM, worst, 1e-5, "sup relative difference, 3 shells, t in {0.5, 2, 5}")])
}

fn free_conservation() -> Result<Vec<Verdict>> {
    let g = RadialGrid::new(14.0, 4096)?;
    let h = g.h();
    let (mut drift, mut sup_ratio, mut l4_rise) = (0.0f64, 0.0f64, 0.0f64);
    for (a, b, w) in [(1.0, 2.0, 0.3), (1.0, 3.0, 0.5)] {
        let s = shell(g, a, b, w)?;
        let l2 = lp_norm(&s.pos, 2.0);
        let sup0 = s.pos.sup_abs();
        let mut l4 = lp_norm(&s.pos, 4.0);
        for k in 1..=40 {
            let t = (0.25 * k as f64 / h).round() * h;
            let u = propagate_free(&s, t)?.pos;
            drift = drift.max((lp_norm(&u, 2.0) / l2 - 1.0).abs());
            sup_ratio = sup_ratio.max(u.sup_abs() / sup0);
            let next = lp_norm(&u, 4.0);
            l4_rise = l4_rise.max(next / l4 - 1.0);
            l4 = next;
        }
    }
    let c = CRITERION_CONSERVATION;
    Ok(vec![
        Verdict::at_most(c, drift, 1e-8, "relative L2 drift over t in [0, 10]"),
        Verdict::at_most(c, sup_ratio, 1.0 + 1e-10, "sup |u(t)| / sup |u0|"),
        Verdict::at_most(c, l4_rise, 0.0, "largest relative increase of |u(t)|_L4 between samples"),
    ])
}

fn decay_exponents() -> Result<Vec<Verdict>> {
    let g = RadialGrid::with_spacing(0.005, 102.0)?;
    let u0 = RadialField::from_fn(g, |r| plateau(r, 0.25, 1.0, 0.3).0);
    let times: Vec<f64> = (0..=12).map(|k| 10.0 * 10f64.powf(k as f64 / 12.0)).collect();
    let mut out = Vec::new();
    for (p, expected) in [(4.0, -0.5), (f64::INFINITY, -1.0)] {
        let ys: Vec<f64> = times.iter().map(|&t| lp_norm(&outgoing_closed_form(&u0, t), p)).collect();
        let fit = fit_loglog("decay", &times, &ys)?;
        out.push(Verdict::at_most(
            CRITERION_DECAY,
            (fit.slope - expected).abs(),
            0.05,
            format!("p = {p}: slope {:.4} +- {:.4} vs {expected}", fit.slope, fit.half_width),
        ));
    }
    Ok(out)
}

fn reference_solver() -> Result<Vec<Verdict>> {
    let c = CRITERION_REFERENCE;
    let g = RadialGrid::new(12.0, 4096)?;
    let u0 = RadialField::from_fn(g, |r| 0.8 * smooth_step((r - 0.5) / 1.5) * smooth_step((4.0 - r) / 1.5));
    let s = StatePair::new(u0, RadialField::zeros(g))?;
    let cfg = SolverConfig::new(g, 6, Sign::Defocusing, 5.0);
    let evo = reference_solve(&s, &cfg)?;
    let e0 = energy(&evo.state(0), 6, Sign::Defocusing)?;
    let mut drift = 0.0f64;
    for j in 0..evo.times().len() {
        drift = drift.max((energy(&evo.state(j), 6, Sign::Defocusing)? / e0 - 1.0).abs());
    }
    let g = RadialGrid::new(12.0, 8193)?;
    let u0 = RadialField::from_fn(g, |r| smooth_step((r - 1.0) / 1.5) * smooth_step((4.5 - r) / 1.5));
    let s = StatePair::new(u0.clone(), local_outgoing_velocity(&u0)?)?;
    let evo = reference_solve(&s, &SolverConfig::new(g, 6, Sign::Defocusing, 5.0).linear())?;
    let mut gap = 0.0f64;
    let nt = evo.times().len();
    for j in (0..nt).step_by(nt.div_ceil(16).max(1)).chain([nt - 1]) {
        let free = propagate_free(&s, evo.times()[j])?.pos;
        gap = gap.max(sup_diff(&evo.u.field(j), &free) / u0.sup_abs());
    }
    Ok(vec![
        Verdict::at_most(c, drift, 1e-4, "defocusing N = 6 relative energy drift, T = 5, CFL 0.5"),
        Verdict::at_most(c, gap, 1e-4, "linear mode vs free flow, sup relative"),
    ])
}

fn picard_small_data() -> Result<Vec<Verdict>> {
    let c = CRITERION_PICARD;
    let n_pow = 6;
    let g = RadialGrid::new(10.0, 2049)?;
    let base = RadialField::from_fn(g, |r| smooth_step(r - 1.0) * smooth_step(4.0 - r));
    let unit = StatePair::new(base.clone(), local_outgoing_velocity(&base)?)?;
    let sc = critical_index(n_pow);
    let k1 = sobolev_norm(&unit.pos, sc)? + sobolev_norm(&unit.vel, sc - 1.0)?;
    let amp = 0.09 / k1;
    let s = unit.scaled(amp);
    let k = amp * k1;
    let mut cfg = SolverConfig::new(g, n_pow, Sign::Defocusing, lattice_steps(g, 2.0).1);
    // tight enough that several contraction ratios are observed
    cfg.tol = 1e-15;
    let p = picard_solve(&s, &StatePair::zeros(g), &cfg)?;
    // with a single step there is no ratio; the relative size of that step
    // bounds the contraction factor instead
    let max_ratio = match p.trace.ratios.is_empty() {
        true => p.trace.deltas.first().copied().unwrap_or(0.0) / p.trace.scale,
        false => p.trace.ratios.iter().copied().fold(0.0, f64::max),
    };
    let mut rc = cfg;
    rc.record_every = 2;
    let evo = reference_solve(&s, &rc)?;
    let mut gap = 0.0f64;
    let mut matched = 0;
    for (j, t) in evo.times().iter().enumerate() {
        let jp = (t / g.h()).round() as usize;
        if jp < p.evolution.times().len() && (p.evolution.times()[jp] - t).abs() < 1e-9 {
            gap = gap.max(sup_diff(&evo.u.field(j), &p.evolution.u.field(jp)));
            matched += 1;
        }
    }
    gap /= s.pos.sup_abs();
    if matched < 16 {
        return Err(crate::Error::InvalidParameter(format!("only {matched} common times")));
    }
    Ok(vec![
        Verdict::at_most(c, k, 0.1, "critical data norm K"),
        Verdict::flag(c, p.trace.converged, format!("converged in {} iterations", p.trace.iterations)),
        Verdict::at_most(c, max_ratio, 0.5, "largest contraction ratio, or first update / linear part"),
        Verdict::at_most(c, gap, 1e-3, "picard vs reference on [0, 2], sup relative"),
    ])
}

/// Fixed probe constant of the local-existence check.
pub const PROBE_C: f64 = 0.5;

fn local_existence_scaling() -> Result<Vec<Verdict>> {
    let c = CRITERION_LOCAL;
    let g = RadialGrid::new(4.0, 1025)?;
    let u0 = RadialField::from_fn(g, |r| plateau(r, 0.5, 1.5, 0.5).0);
    let s = StatePair::new(u0.clone(), local_outgoing_velocity(&u0)?)?;
    let amps = [1.0, 2.0, 4.0, 8.0];
    let small = local_existence_probe(&s, 6, Sign::Defocusing, PROBE_C, &amps)?;
    let large = local_existence_probe(&s, 6, Sign::Defocusing, 10.0 * PROBE_C, &amps)?;
    let ok = small.iter().filter(|r| r.converged).count();
    let failed = large.iter().filter(|r| !r.converged).count();
    Ok(vec![
        Verdict::at_least(c, ok as f64, amps.len() as f64, format!("amplitudes converging with c = {PROBE_C}")),
        Verdict::at_least(c, failed as f64, 1.0, format!("amplitudes failing with c = {}", 10.0 * PROBE_C)),
    ])
}

fn shell_scaling() -> Result<Vec<Verdict>> {
    // alpha = 2/(3N) = 1/9 at N = 6
    let cfg = ShellSweepConfig::new(6, 2.0 / (3.0 * 6.0), 1.0, ShellSweepConfig::dyadic(4, 9));
    let rep = run_shell_sweep(&cfg)?;
    if let Some(e) = rep.errors.first() {
        return Err(crate::Error::InvalidParameter(e.clone()));
    }
    let mut verdicts = rep.verdicts;
    // the largeness constants should not move under refinement
    let widest = ShellShape::new(cfg.l, cfg.eps[0], cfg.alpha, cfg.ramp)?;
    let coarse = shell_largeness(&widest, &cfg)?;
    let mut fine_cfg = cfg.clone();
    fine_cfg.cells_per_eps = 24;
    let fine = shell_largeness(&widest, &fine_cfg)?;
    let change = coarse
        .constants
        .iter()
        .zip(&fine.constants)
        .map(|(a, b)| (b.1 / a.1 - 1.0).abs())
        .fold(0.0, f64::max);
    verdicts.push(Verdict::at_most(CRITERION_SHELL, change, 0.1, "largeness constants, 16 vs 24 cells per width"));
    Ok(verdicts)
}

fn outer_measure_balls() -> Result<Vec<Verdict>> {
    let c = CRITERION_MEASURE;
    let centers: [Vec3; 3] = [[0.0; 3], [0.37, -1.21, 2.53], [10.0, 10.0, 10.0]];
    let (mut err, mut trans) = (0.0f64, 0.0f64);
    for alpha in [0.5, 1.0, 2.0] {
        let prm = ChoquetParams::new(alpha)?;
        for radius in [0.5f64, 1.0, 2.0] {
            let exact = 4.0 * PI * radius.powf(3.0 - alpha) / (3.0 - alpha);
            let mut vals = Vec::new();
            for cen in centers {
                let m = outer_measure(&BallUnion::new(vec![Ball::new(cen, radius)?]), &prm).value;
                err = err.max((m / exact - 1.0).abs());
                vals.push(m);
            }
            for v in &vals[1..] {
                trans = trans.max((v / vals[0] - 1.0).abs());
            }
        }
    }
    Ok(vec![
        Verdict::at_most(c, err, 0.02, "relative error vs 4 pi R^(3-alpha)/(3-alpha)"),
        Verdict::at_most(c, trans, 0.02, "translation invariance"),
    ])
}

fn gaussian_pair() -> Result<BumpFunction> {
    BumpFunction::new(vec![
        Bump::new([0.0; 3], 1.0, Profile::Gaussian, 1.0),
        Bump::new([12.0, 0.0, 0.0], 0.5, Profile::Gaussian, 0.7),
    ])
}

fn lorentz_scaling() -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    let single = BumpFunction::single([0.0; 3], 1.0, Profile::Gaussian, 1.0)?;
    for (p, alpha) in [(7.0, 3.0 - 14.0 / 6.0), (8.0, 3.0 - 16.0 / 6.0)] {
        let prm = ChoquetParams::new(alpha)?;
        let mut worst = 0.0f64;
        for f in [single.clone(), gaussian_pair()?] {
            let a = lorentz_choquet_norm(&f, p, f64::INFINITY, &prm)?;
            let b = lorentz_choquet_norm(&f.dilated(2.0)?, p, f64::INFINITY, &prm)?;
            worst = worst.max((b / a / 2f64.powf((alpha - 3.0) / p) - 1.0).abs());
        }
        out.push(Verdict::at_most(
            CRITERION_LORENTZ,
            worst,
            0.02,
            format!("|f(2x)| / (2^((alpha-3)/p) |f|) - 1 at p = {p}"),
        ));
    }
    Ok(out)
}

/// Ten nonnegative bump sums with nonincreasing profiles.
pub fn choquet_family(seed: u64) -> Result<Vec<BumpFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..10)
        .map(|i| {
            let k = 1 + i % 3;
            let bumps = (0..k)
                .map(|j| {
                    let profile = if rng.gen_bool(0.5) { Profile::Gaussian } else { Profile::Indicator };
                    let center = [12.0 * j as f64, rng.gen_range(-2.0..2.0), 0.0];
                    Bump::new(center, rng.gen_range(0.2..2.0), profile, rng.gen_range(0.4..1.2))
                })
                .collect();
            BumpFunction::new(bumps)
        })
        .collect()
}

fn embedding_and_atoms() -> Result<Vec<Verdict>> {
    let c = CRITERION_EMBEDDING;
    let family = choquet_family(SEED)?;
    let (mut left, mut right, mut atoms) = (0.0f64, 0.0f64, 0.0f64);
    for (i, f) in family.iter().enumerate() {
        let (alpha, p) = [(1.0, 2.0), (0.5, 3.0), (1.0 / 3.0, 8.0)][i % 3];
        let prm = ChoquetParams::new(alpha)?;
        let weak = lorentz_choquet_norm(f, p, f64::INFINITY, &prm)?;
        let strong = lorentz_choquet_norm(f, p, p, &prm)?;
        let k = kato_norm(f, alpha / p, p, p, &prm)?;
        left = left.max(weak / k);
        right = right.max(k / strong);
        let q = atomic_decompose(f, p, &prm)?.quasinorm(f64::INFINITY);
        atoms = atoms.max((q / weak).max(weak / q));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut tri = 0.0f64;
    let prm = ChoquetParams::new(1.0)?;
    for i in 0..100 {
        let p = [1.0, 2.0, 3.0][i % 3];
        let f = BumpFunction::single([0.0; 3], rng.gen_range(0.1..2.0), Profile::Gaussian, rng.gen_range(0.3..1.0))?;
        let center = if rng.gen_bool(0.5) { [0.0; 3] } else { [rng.gen_range(9.0..30.0), 0.0, 0.0] };
        let profile = if rng.gen_bool(0.5) { Profile::Gaussian } else { Profile::Indicator };
        let g = BumpFunction::single(center, rng.gen_range(0.1..2.0), profile, rng.gen_range(0.3..1.0))?;
        let ratio = quasi_triangle_ratio(&f, &g, p, &prm)?;
        tri = tri.max(ratio / ((p + 1.0).powf(1.0 / p) * 1.05));
    }
    Ok(vec![
        Verdict::at_most(c, left, 4.0, "max |f|_{L^{p,inf}(mu)} / |f|_K over 10 functions"),
        Verdict::at_most(c, right, 4.0, "max |f|_K / |f|_{L^{p,p}(mu)}"),
        Verdict::at_most(c, atoms, 4.0, "atomic quasinorm vs L^{p,inf}(mu), worst factor"),
        Verdict::at_most(c, tri, 1.0, "quasi-triangle ratio / ((p+1)^(1/p) 1.05) over 100 pairs"),
    ])
}

fn closed_loop() -> Result<Vec<Verdict>> {
    let c = CRITERION_CLOSED_LOOP;
    let n_pow = 6;
    let p = 8.0;
    let alpha = 3.0 - 2.0 * p / f64::from(n_pow);
    let prm = ChoquetParams::new(alpha)?;
    let u = BumpFunction::single([0.0; 3], 1.0, Profile::Gaussian, 1.0)?;
    let ratio = |rho: f64| contraction_ratio(&u.scaled(rho), &u.scaled(rho / 2.0), n_pow, p, alpha, &prm);
    let rs = [ratio(0.5)?, ratio(0.25)?, ratio(0.125)?];
    let scale = 2f64.powi(n_pow as i32);
    let dev = rs.windows(2).map(|w| (w[0] / w[1] / scale - 1.0).abs()).fold(0.0, f64::max);
    // S = d^(-alpha) (3 + 3 2^(-alpha/2) + 3^(-alpha/2)) at most 0.1
    let d = 3.0e5;
    let mut centers = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                centers.push([d * i as f64, d * j as f64, d * k as f64]);
            }
        }
    }
    let phi = RadialField::from_fn(RadialGrid::new(2.0, 201)?, |r| (1.0 - r * r / 4.0).max(0.0));
    let mb = multibump_smallness(&centers, &phi, 0.1, p, alpha, &prm)?;
    Ok(vec![
        Verdict::at_most(c, dev, 0.2, format!("ratios {:.3e}, {:.3e}, {:.3e} vs rho^N scaling", rs[0], rs[1], rs[2])),
        Verdict::at_most(c, rs[2], 1.0, "contraction ratio at rho = 1/8"),
        Verdict::at_most(c, mb.criterion, 0.1, "separation criterion S of 8 bumps"),
        Verdict::at_most(c, mb.norm / mb.single_norm, 1.5, "8-bump quasinorm / single-bump quasinorm"),
    ])
}
