//! Declarative scenarios (`[scenario]`, `[solver]`, `[diagnostics]` TOML) and
//! the runner that turns one into a report.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::choquet::{kato_norm, lorentz_choquet_norm, BumpFunction, ChoquetParams, Profile};
use crate::error::{Error, Result};
use crate::grid::{RadialField, RadialGrid, StatePair};
use crate::nonlinear::{lattice_steps, picard_solve, picard_solve_free, reference_solve, scattering_residual, scattering_state, Evolution, Sign, SolverConfig};
use crate::norms::{
    critical_index, energy, energy_norm, fmt_param, label, lp_norm, mixed_norm, sobolev_norm, NormReport, STRICHARTZ_FLAVORS,
};
use crate::projections::is_outgoing;

use super::builders::*;
use super::report::{fit_loglog, ExperimentReport, Provenance, Quantity, Series, Verdict};
use super::{smooth_step, CRITERION_PICARD, CRITERION_REFERENCE, CRITERION_SHELL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `amp exp(-((r - center)/width)^2)` with outgoing velocity.
    Gaussian,
    OutgoingShell,
    FarSupport,
    BoundedBall,
    Multiscale,
    Multibump,
    /// A `r,pos,vel` CSV file given by `path`.
    Data,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Picard,
    Reference,
    Both,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "picard" => Ok(Method::Picard),
            "fd" | "reference" => Ok(Method::Reference),
            "both" => Ok(Method::Both),
            _ => Err(Error::Config(format!("unknown method '{s}', expected picard, fd or both"))),
        }
    }
}

/// Data family and its parameters; unused parameters are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub label: String,
    pub family: Family,
    #[serde(default = "one")]
    pub amp: f64,
    #[serde(default = "three")]
    pub center: f64,
    #[serde(default = "half")]
    pub width: f64,
    /// Shell height scale `L`.
    #[serde(default = "one")]
    pub l: f64,
    #[serde(default = "sixteenth")]
    pub eps: f64,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default = "tenth")]
    pub ramp: f64,
    /// Inner radius of far-support data, outer radius of the bounded ball.
    #[serde(default = "eight")]
    pub r: f64,
    #[serde(default)]
    pub scales: Vec<f64>,
    #[serde(default)]
    pub centers: Vec<[f64; 3]>,
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(rename = "N", default = "six")]
    pub n_pow: u32,
    #[serde(default = "defocusing")]
    pub sign: Sign,
    #[serde(rename = "T", default = "two")]
    pub horizon: f64,
    #[serde(default)]
    pub r_max: Option<f64>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub linear: bool,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "sixty")]
    pub max_iter: usize,
    #[serde(default = "tol")]
    pub tol: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        toml::from_str("").expect("solver defaults")
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSpec {
    #[serde(default)]
    pub names: Vec<String>,
    /// Times at which single-time norms and profiles are reported.
    #[serde(default)]
    pub times: Vec<f64>,
    /// Finite Lebesgue exponents for the single-time norms; `inf` and `p_c`
    /// are always added.
    #[serde(default)]
    pub ps: Vec<f64>,
    /// `p` of the Lorentz-Choquet diagnostics; `alpha = 3 - 2p/N`.
    #[serde(default)]
    pub choquet_p: Option<f64>,
    #[serde(default)]
    pub lattice_spacing: Option<f64>,
}

pub const DIAGNOSTICS: [&str; 10] = [
    "norms",
    "spacetime",
    "dispersion",
    "energy",
    "strichartz",
    "scattering",
    "largeness",
    "projection",
    "choquet",
    "profiles",
];

const STATIC_DIAGNOSTICS: [&str; 2] = ["projection", "choquet"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub scenario: ScenarioSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub diagnostics: DiagnosticsSpec,
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn two() -> f64 {
    2.0
}
fn three() -> f64 {
    3.0
}
fn eight() -> f64 {
    8.0
}
fn tenth() -> f64 {
    0.1
}
fn sixteenth() -> f64 {
    0.0625
}
fn six() -> u32 {
    6
}
fn sixty() -> usize {
    60
}
fn tol() -> f64 {
    1e-10
}
fn default_n() -> usize {
    2049
}
fn defocusing() -> Sign {
    Sign::Defocusing
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut s = Self::from_toml(&text)?;
        if let Some(p) = &s.scenario.path {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    s.scenario.path = Some(dir.join(p));
                }
            }
        }
        Ok(s)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Rejects malformed configurations; parameters outside the ranges of the
    /// underlying theorems only produce warnings in the report.
    pub fn validate(&self) -> Result<()> {
        let sc = &self.scenario;
        let so = &self.solver;
        for name in &self.diagnostics.names {
            if !DIAGNOSTICS.contains(&name.as_str()) {
                return Err(Error::Config(format!("unknown diagnostic '{name}', expected one of {DIAGNOSTICS:?}")));
            }
        }
        if so.n_pow < 2 {
            return Err(Error::Config(format!("N must be at least 2, got {}", so.n_pow)));
        }
        if !(so.horizon > 0.0 && so.horizon.is_finite()) {
            return Err(Error::Config(format!("T must be positive, got {}", so.horizon)));
        }
        if so.n < 3 {
            return Err(Error::Config(format!("n must be at least 3, got {}", so.n)));
        }
        if so.r_max.is_some_and(|r| !(r > 0.0)) || so.dt.is_some_and(|d| !(d > 0.0)) {
            return Err(Error::Config("r_max and dt must be positive".into()));
        }
        if self.diagnostics.times.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::Config("diagnostic times must be nonnegative".into()));
        }
        if self.diagnostics.ps.iter().any(|p| !(*p >= 1.0)) {
            return Err(Error::Config("Lebesgue exponents must be at least 1".into()));
        }
        match sc.family {
            Family::Multiscale if sc.scales.is_empty() => {
                return Err(Error::Config("multiscale needs a nonempty `scales` list".into()))
            }
            Family::Multibump if sc.centers.is_empty() => {
                return Err(Error::Config("multibump needs a nonempty `centers` list".into()))
            }
            Family::Data if sc.path.is_none() => return Err(Error::Config("data family needs `path`".into())),
            Family::OutgoingShell if !(sc.eps > 0.0 && sc.eps < 1.0) => {
                return Err(Error::Config(format!("shell width must lie in (0, 1), got {}", sc.eps)))
            }
            _ => {}
        }
        if !(sc.width > 0.0 && sc.r > 0.0) {
            return Err(Error::Config("width and r must be positive".into()));
        }
        Ok(())
    }

    fn needs_evolution(&self) -> bool {
        self.diagnostics.names.iter().any(|n| !STATIC_DIAGNOSTICS.contains(&n.as_str()))
            || self.diagnostics.times.iter().any(|t| *t > 0.0)
    }

    fn has(&self, name: &str) -> bool {
        self.diagnostics.names.iter().any(|n| n == name)
    }

    /// Shell exponent, `1/p_c` unless given.
    fn alpha(&self) -> f64 {
        self.scenario.alpha.unwrap_or(2.0 / (3.0 * f64::from(self.solver.n_pow)))
    }

    /// Weight exponent of the Choquet diagnostics, `3 - 2p/N` unless given.
    fn choquet_alpha(&self) -> f64 {
        self.scenario.alpha.unwrap_or(3.0 - 2.0 * self.choquet_p() / f64::from(self.solver.n_pow))
    }

    fn choquet_p(&self) -> f64 {
        let n = f64::from(self.solver.n_pow);
        self.diagnostics.choquet_p.unwrap_or(0.5 * (n + 1.0 + 1.5 * n))
    }
}

/// Outer edge of the data before any grid exists.
fn data_extent(sc: &ScenarioSpec) -> f64 {
    match sc.family {
        Family::Gaussian => sc.center + 4.3 * sc.width,
        Family::OutgoingShell => 1.0 + sc.eps,
        Family::FarSupport => sc.r + sc.width,
        Family::BoundedBall => sc.r,
        Family::Multiscale => 2.0 * sc.scales.last().copied().unwrap_or(1.0),
        Family::Multibump | Family::Data => 0.0,
    }
}

struct Built {
    pair: Option<StatePair>,
    /// Set for the shell family, whose free flow is taken in closed form.
    shell: Option<ShellShape>,
    bumps: Option<BumpFunction>,
    profile_variant: &'static str,
}

/// Critical data norm `||u0||_{Hdot^sc} + ||u1||_{Hdot^{sc-1}}`.
fn critical_data_norm(s: &StatePair, n_pow: u32) -> Result<f64> {
    let sc = critical_index(n_pow);
    Ok(sobolev_norm(&s.pos, sc)? + sobolev_norm(&s.vel, sc - 1.0)?)
}

fn multibump_profile() -> RadialField {
    RadialField::from_fn(RadialGrid::new(1.0, 401).expect("static grid"), |r| 1.0 - smooth_step(r))
}

fn build(s: &Scenario, report: &mut ExperimentReport) -> Result<Built> {
    let sc = &s.scenario;
    let so = &s.solver;
    let n_pow = so.n_pow;
    let nf = f64::from(n_pow);
    if sc.family == Family::Multibump {
        let alpha = s.choquet_alpha();
        let data = make_multibump(&multibump_profile(), None, &sc.centers, sc.amp, alpha)?;
        report.smallness.insert("S".into(), Quantity::new(data.criterion, "1"));
        if !data.radial {
            report.warnings.push("multibump data is not radial; only the choquet diagnostic applies".into());
        }
        return Ok(Built { pair: None, shell: None, bumps: Some(data.pos), profile_variant: "smooth nonincreasing bump" });
    }
    if sc.family == Family::Data {
        let path = sc.path.as_ref().expect("validated");
        let file = fs::File::open(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let pair = StatePair::read_csv(file)?;
        report.smallness.insert("K".into(), Quantity::new(critical_data_norm(&pair, n_pow)?, "1"));
        return Ok(Built { pair: Some(pair), shell: None, bumps: None, profile_variant: "sampled" });
    }
    let r_max = so.r_max.unwrap_or(data_extent(sc) + so.horizon + 1.0);
    let grid = RadialGrid::new(r_max, so.n)?;
    let mut shell = None;
    let (pair, variant) = match sc.family {
        Family::Gaussian => {
            let (c, w, a) = (sc.center, sc.width, sc.amp);
            let pos = RadialField::from_fn(grid, |r| {
                let x = (r - c) / w;
                if x.abs() < 4.3 {
                    a * (-x * x).exp()
                } else {
                    0.0
                }
            });
            let vel = RadialField::from_fn(grid, |r| {
                let x = (r - c) / w;
                if x.abs() < 4.3 && r > 0.0 {
                    let g = a * (-x * x).exp();
                    2.0 * x / w * g - g / r
                } else {
                    0.0
                }
            });
            let pair = StatePair::new(pos, vel)?;
            report.smallness.insert("K".into(), Quantity::new(critical_data_norm(&pair, n_pow)?, "1"));
            (pair, "gaussian")
        }
        Family::OutgoingShell => {
            let alpha = s.alpha();
            if alpha >= 1.0 / (nf + 1.0) {
                report.warnings.push(format!("alpha = {alpha} is outside the contraction range alpha < 1/(N+1)"));
            }
            let shape = ShellShape::new(sc.l, sc.eps, alpha, sc.ramp)?;
            let pair = make_outgoing_shell(grid, &shape)?;
            shell = Some(shape);
            report.smallness.insert(
                "eps^(1/(N+1)) sup u0".into(),
                Quantity::new(sc.eps.powf(1.0 / (nf + 1.0)) * pair.pos.sup_abs(), "1"),
            );
            (pair, "mollified indicator")
        }
        Family::FarSupport => {
            let w = sc.width;
            let profile = RadialField::from_fn(RadialGrid::new(w, 401)?, |x| sc.amp * unit_bump(x / w));
            let far = make_far_support(&profile, sc.r, grid, n_pow)?;
            report
                .smallness
                .insert("|u0|_Hdot1^2 R^(4/N-1)".into(), Quantity::new(far.smallness, "1"));
            report.quantities.insert(
                "radial Sobolev constant".into(),
                Quantity::new(far.sup_constant, "sup u0 R^(1/2) / |u0|_Hdot1"),
            );
            (far.pair, "smooth bump")
        }
        Family::BoundedBall => {
            let ball = make_bounded_ball(grid, sc.amp, sc.r, n_pow)?;
            report.smallness.insert("sup u0 R^(2/N)".into(), Quantity::new(ball.smallness, "1"));
            (ball.pair, "smooth plateau")
        }
        Family::Multiscale => {
            let phi = RadialField::from_fn(RadialGrid::new(2.0, 801)?, |r| sc.amp * unit_bump(r - 0.5));
            let pair = make_multiscale(grid, &phi, None, &sc.scales, n_pow)?;
            let pc = 1.5 * nf;
            report.quantities.insert(
                "multiscale Lp_c ratio".into(),
                Quantity::new(multiscale_lp_ratio(&pair, &phi, &sc.scales, pc), "|u0|^pc / (J |phi|^pc)"),
            );
            report.smallness.insert("K".into(), Quantity::new(critical_data_norm(&pair, n_pow)?, "1"));
            (pair, "smooth bump")
        }
        Family::Multibump | Family::Data => unreachable!(),
    };
    Ok(Built { pair: Some(pair), shell, bumps: None, profile_variant: variant })
}

fn solver_config(s: &Scenario, grid: RadialGrid) -> SolverConfig {
    let so = &s.solver;
    let mut cfg = SolverConfig::new(grid, so.n_pow, so.sign, so.horizon);
    if let Some(dt) = so.dt {
        cfg.dt = dt;
    }
    cfg.max_iter = so.max_iter;
    cfg.tol = so.tol;
    if so.linear {
        cfg = cfg.linear();
    }
    cfg
}

fn nearest(times: &[f64], t: f64) -> usize {
    let mut best = 0;
    for (j, &s) in times.iter().enumerate() {
        if (s - t).abs() < (times[best] - t).abs() {
            best = j;
        }
    }
    best
}

/// Sup over shared times of `|u_a - u_b| / sup |u_b|`.
fn relative_gap(a: &Evolution, b: &Evolution) -> f64 {
    let scale = b.u.sup_abs().max(f64::MIN_POSITIVE);
    let mut gap = 0.0f64;
    for (jb, &t) in b.times().iter().enumerate() {
        let ja = nearest(a.times(), t);
        if (a.times()[ja] - t).abs() > 1e-9 * (1.0 + t) {
            continue;
        }
        for (x, y) in a.u.row(ja).iter().zip(b.u.row(jb)) {
            gap = gap.max((x - y).abs());
        }
    }
    gap / scale
}

fn stride_for(len: usize, cap: usize) -> usize {
    len.div_ceil(cap).max(1)
}

/// A report together with the evolution its diagnostics were computed on.
#[derive(Debug, Clone)]
pub struct Run {
    pub report: ExperimentReport,
    /// Solver name and evolution; the reference run when both were made.
    pub evolution: Option<(String, Evolution)>,
}

/// Runs every diagnostic of the scenario. Configuration problems are
/// returned as errors; solver failures end up in `report.errors`.
pub fn run_experiment(s: &Scenario) -> Result<ExperimentReport> {
    run_scenario(s).map(|r| r.report)
}

pub fn run_scenario(s: &Scenario) -> Result<Run> {
    s.validate()?;
    let echo = serde_json::to_value(s)?;
    let mut report = ExperimentReport::new(&s.scenario.label, echo);
    if s.diagnostics.names.is_empty() && s.diagnostics.times.is_empty() {
        return Ok(Run { report, evolution: None });
    }
    let built = build(s, &mut report)?;
    report.quantities.insert("profile variant".into(), Quantity::new(0.0, built.profile_variant));
    let n_pow = s.solver.n_pow;
    let nf = f64::from(n_pow);
    let pc = 1.5 * nf;

    if s.has("choquet") {
        choquet_diagnostics(s, &built, &mut report);
    }
    let Some(pair) = built.pair else {
        if s.needs_evolution() {
            report.warnings.push("evolution diagnostics skipped for non-radial data".into());
        }
        return Ok(Run { report, evolution: None });
    };
    let grid = pair.grid();
    let cfg = solver_config(s, grid);
    report.provenance = Some(Provenance {
        version: env!("CARGO_PKG_VERSION").into(),
        n: grid.n(),
        r_max: grid.r_max(),
        h: grid.h(),
        dt: match s.solver.method {
            Method::Picard => grid.h(),
            _ => cfg.dt,
        },
        seed: s.scenario.seed,
    });

    if s.has("projection") {
        match is_outgoing(&pair, 1e-6) {
            Ok((_, res)) => {
                report.quantities.insert("outgoing residual".into(), Quantity::new(res, "relative"));
            }
            Err(e) => report.errors.push(format!("projection: {e}")),
        }
    }
    if !s.needs_evolution() {
        return Ok(Run { report, evolution: None });
    }

    let mut evolutions: Vec<(&str, Evolution)> = Vec::new();
    if matches!(s.solver.method, Method::Picard | Method::Both) {
        let solved = match built.shell {
            // the reduction flow of a thin shell leaves roundoff at the origin
            Some(shape) => {
                shape.free_evolution(grid, lattice_steps(grid, cfg.horizon).1).and_then(|v| picard_solve_free(&v, &cfg))
            }
            None => picard_solve(&pair, &StatePair::zeros(grid), &cfg),
        };
        match solved {
            Ok(out) => {
                let max_ratio = out.trace.ratios.iter().copied().fold(0.0, f64::max);
                report.verdicts.push(Verdict::flag(
                    CRITERION_PICARD,
                    out.trace.converged && max_ratio <= 0.5,
                    format!(
                        "converged = {} after {} iterations, max ratio {:.3e}",
                        out.trace.converged,
                        out.trace.iterations,
                        max_ratio
                    ),
                ));
                report.traces.push(out.trace);
                evolutions.push(("picard", out.evolution));
            }
            Err(e) => report.errors.push(format!("picard: {e}")),
        }
    }
    if matches!(s.solver.method, Method::Reference | Method::Both) {
        let mut rc = cfg;
        if s.solver.method == Method::Both {
            // record on the Picard lattice so the two runs share times
            let steps = (cfg.horizon / grid.h() - 1e-9).ceil().max(1.0) as usize;
            let k = stride_for(steps, 256);
            rc.horizon = (steps as f64) * grid.h();
            rc.dt = grid.h() / 2.0;
            rc.record_every = 2 * k;
        }
        match reference_solve(&pair, &rc) {
            Ok(evo) => evolutions.push(("reference", evo)),
            Err(e) => report.errors.push(format!("reference: {e}")),
        }
    }
    if evolutions.len() == 2 {
        let gap = relative_gap(&evolutions[0].1, &evolutions[1].1);
        report.verdicts.push(Verdict::at_most(CRITERION_PICARD, gap, 1e-3, "picard vs reference, sup relative"));
    }
    let Some((which, evo)) = evolutions.last() else {
        return Ok(Run { report, evolution: None });
    };
    report.quantities.insert("evolution".into(), Quantity::new(evolutions.len() as f64, which));
    let times = evo.times();

    let mut ps: Vec<f64> = s.diagnostics.ps.clone();
    ps.push(pc);
    ps.push(f64::INFINITY);
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    let ss = [1.0, critical_index(n_pow)];
    if s.has("norms") {
        let mut ts = s.diagnostics.times.clone();
        if ts.is_empty() {
            ts = vec![0.0, *times.last().unwrap_or(&0.0)];
        }
        for t in ts {
            let j = nearest(times, t);
            let mut rep = NormReport::for_field(&evo.u.field(j), &ps, &ss);
            rep.metadata.insert("t".into(), times[j].into());
            report.norms.insert(format!("t={}", fmt_param(times[j])), rep);
        }
    }
    if s.has("spacetime") {
        report.norms.insert("spacetime".into(), NormReport::for_spacetime(&evo.u, n_pow));
    }
    if s.has("dispersion") {
        let disp = mixed_norm(&evo.u, nf / 2.0, f64::INFINITY);
        report.quantities.insert(
            label("Lpt_Lqx", &[("p", nf / 2.0), ("q", f64::INFINITY)]),
            Quantity::new(disp, "1"),
        );
        let sc = &s.scenario;
        let bound = match sc.family {
            Family::FarSupport => sobolev_norm(&pair.pos, 1.0).ok().map(|h1| {
                ("dispersion / (|u0|_Hdot1 R^(2/N-1/2))", h1 * sc.r.powf(2.0 / nf - 0.5))
            }),
            Family::BoundedBall => Some(("dispersion / (sup u0 R^(2/N))", pair.pos.sup_abs() * sc.r.powf(2.0 / nf))),
            _ => critical_data_norm(&pair, n_pow).ok().map(|k| ("dispersion / K", k)),
        };
        if let Some((name, b)) = bound {
            if b > 0.0 {
                report.quantities.insert(name.into(), Quantity::new(disp / b, "1"));
            }
        }
    }
    if s.has("energy") {
        let e_of = |st: &StatePair| match s.solver.linear {
            true => energy_norm(st).map(|v| 0.5 * v * v),
            false => energy(st, n_pow, s.solver.sign),
        };
        let e: Vec<f64> = (0..times.len()).filter_map(|j| e_of(&evo.state(j)).ok()).collect();
        if e.len() == times.len() && !e.is_empty() {
            let e0 = e[0];
            let drift = e.iter().map(|v| (v - e0).abs()).fold(0.0, f64::max) / e0.abs().max(f64::MIN_POSITIVE);
            report.quantities.insert("energy drift".into(), Quantity::new(drift, "relative").feeds(CRITERION_REFERENCE));
            if *which == "reference" {
                report.verdicts.push(Verdict::at_most(CRITERION_REFERENCE, drift, 1e-4, "relative energy drift"));
            }
            let k = stride_for(times.len(), 200);
            report.series.push(Series {
                figure: "energy".into(),
                name: (*which).into(),
                x_label: "t".into(),
                y_label: "energy".into(),
                points: (0..times.len()).step_by(k).map(|j| (times[j], e[j])).collect(),
            });
        } else {
            report.errors.push("energy: derivative of a sample failed".into());
        }
    }
    if s.has("strichartz") {
        for flavor in STRICHARTZ_FLAVORS {
            match crate::norms::strichartz_ratio(&evo.u, &pair, n_pow, flavor) {
                Ok(v) => {
                    report.quantities.insert(format!("strichartz/{flavor}"), Quantity::new(v, "1"));
                }
                Err(e) => report.errors.push(format!("strichartz {flavor}: {e}")),
            }
        }
    }
    if s.has("scattering") {
        match scattering_state(evo, &pair, &cfg) {
            Ok(st) => {
                report.quantities.insert("scattering tail".into(), Quantity::new(st.tail, "1"));
                match scattering_residual(evo, times.len() - 1, &st.state) {
                    Ok(r) => {
                        report.quantities.insert("scattering residual".into(), Quantity::new(r, "Hdot1 x L2"));
                    }
                    Err(e) => report.errors.push(format!("scattering residual: {e}")),
                }
            }
            Err(e) => report.errors.push(format!("scattering: {e}")),
        }
    }
    if s.has("largeness") {
        let l = s.scenario.l.abs().max(f64::MIN_POSITIVE);
        let mut c_min = f64::INFINITY;
        for r in [2.0, 4.0, 8.0] {
            if r > grid.r_max() {
                report.warnings.push(format!("largeness probe r = {r} is outside the grid"));
                continue;
            }
            let i = (r / grid.h()).round() as usize;
            let sup = evo.u.trace(i).into_iter().fold(f64::NEG_INFINITY, f64::max);
            let c = sup * (1.0 + r * r).sqrt() / l;
            c_min = c_min.min(c);
            report.quantities.insert(
                format!("largeness/r={}", fmt_param(r)),
                Quantity::new(c, "sup_t u <r> / L").feeds(CRITERION_SHELL),
            );
        }
        if c_min.is_finite() && s.scenario.family == Family::OutgoingShell {
            report.verdicts.push(Verdict::at_least(CRITERION_SHELL, c_min, 0.1, "min sup_t u <r> / L"));
        }
    }
    {
        let k = stride_for(times.len(), 200);
        let idx: Vec<usize> = (0..times.len()).step_by(k).collect();
        for (name, p) in [("Lp(p=2)", 2.0), ("Lp(p=inf)", f64::INFINITY)] {
            report.series.push(Series {
                figure: "norms_in_time".into(),
                name: name.into(),
                x_label: "t".into(),
                y_label: "norm".into(),
                points: idx.iter().map(|&j| (times[j], lp_norm(&evo.u.field(j), p))).collect(),
            });
        }
    }
    if s.solver.linear {
        linear_diagnostics(evo, &mut report);
    }
    if s.has("profiles") {
        let mut ts = s.diagnostics.times.clone();
        if ts.is_empty() {
            ts = vec![0.0, *times.last().unwrap_or(&0.0)];
        }
        let k = stride_for(grid.n(), 400);
        for t in ts {
            let j = nearest(times, t);
            let row = evo.u.row(j);
            report.series.push(Series {
                figure: "profiles".into(),
                name: format!("t={}", fmt_param(times[j])),
                x_label: "r".into(),
                y_label: "u".into(),
                points: (0..grid.n()).step_by(k).map(|i| (grid.r(i), row[i])).collect(),
            });
        }
    }
    Ok(Run { report, evolution: evolutions.pop().map(|(w, e)| (w.to_string(), e)) })
}

/// L2 drift, sup ratio and the late-time decay slope of `sup |u|`.
fn linear_diagnostics(evo: &Evolution, report: &mut ExperimentReport) {
    let times = evo.times();
    let l2: Vec<f64> = (0..times.len()).map(|j| lp_norm(&evo.u.field(j), 2.0)).collect();
    let sup: Vec<f64> = (0..times.len()).map(|j| evo.u.field(j).sup_abs()).collect();
    if l2[0] > 0.0 {
        let drift = l2.iter().map(|v| (v / l2[0] - 1.0).abs()).fold(0.0, f64::max);
        report.quantities.insert("linear/L2 drift".into(), Quantity::new(drift, "relative"));
        let ratio = sup.iter().copied().fold(0.0, f64::max) / sup[0];
        report.quantities.insert("linear/sup ratio".into(), Quantity::new(ratio, "sup_t |u(t)|_inf / |u0|_inf"));
    }
    let t_end = times.last().copied().unwrap_or(0.0);
    let late: Vec<usize> = (0..times.len()).filter(|&j| times[j] >= 0.5 * t_end && times[j] > 0.0).collect();
    let xs: Vec<f64> = late.iter().map(|&j| times[j]).collect();
    let ys: Vec<f64> = late.iter().map(|&j| sup[j]).collect();
    match fit_loglog("linear/decay Lp(p=inf)", &xs, &ys) {
        Ok(fit) => {
            report.quantities.insert("linear/decay slope".into(), Quantity::new(fit.slope, "d log|u|_inf / d log t"));
            report.fits.push(fit);
        }
        Err(e) => report.warnings.push(format!("decay fit: {e}")),
    }
}

fn choquet_diagnostics(s: &Scenario, built: &Built, report: &mut ExperimentReport) {
    let n = f64::from(s.solver.n_pow);
    let p = s.choquet_p();
    let alpha = s.choquet_alpha();
    if (alpha - (3.0 - 2.0 * p / n)).abs() > 1e-12 {
        report.warnings.push(format!("alpha = {alpha} differs from the scaling value 3 - 2p/N"));
    }
    let params = match ChoquetParams::new(alpha) {
        Ok(mut prm) => {
            prm.lattice_spacing = s.diagnostics.lattice_spacing;
            prm
        }
        Err(e) => {
            report.errors.push(format!("choquet: {e}"));
            return;
        }
    };
    let f = match (&built.bumps, &built.pair) {
        (Some(b), _) => Ok(b.clone()),
        (None, Some(pair)) => {
            let u = pair.pos.map(f64::abs);
            BumpFunction::single([0.0; 3], 1.0, Profile::sampled(u), 1.0)
        }
        _ => Err(Error::InvalidParameter("no data".into())),
    };
    let f = match f {
        Ok(f) => f,
        Err(e) => {
            report.errors.push(format!("choquet: {e}"));
            return;
        }
    };
    report.quantities.insert("choquet/p".into(), Quantity::new(p, "1"));
    report.quantities.insert("choquet/alpha".into(), Quantity::new(alpha, "1"));
    match lorentz_choquet_norm(&f, p, f64::INFINITY, &params) {
        Ok(v) => {
            report.quantities.insert(label("Lpq(mu)", &[("p", p), ("q", f64::INFINITY)]), Quantity::new(v, "1"));
        }
        Err(e) => report.errors.push(format!("choquet norm: {e}")),
    }
    // K_{alpha/p, p} sits between L^{p,p}(mu_alpha) and L^{p,inf}(mu_alpha)
    match kato_norm(&f, alpha / p, p, p, &params) {
        Ok(v) => {
            report.quantities.insert(label("Kato", &[("alpha", alpha / p), ("p", p)]), Quantity::new(v, "1"));
        }
        Err(e) => report.errors.push(format!("kato norm: {e}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FAR: &str = r#"
[scenario]
label = "exterior R=8"
family = "far_support"
r = 8.0
width = 1.0
amp = 0.05

[solver]
N = 6
T = 2.0
n = 1025
method = "picard"

[diagnostics]
names = ["dispersion", "norms", "energy"]
times = [0.0, 1.0]
"#;

    #[test]
    fn empty_diagnostics_echo_only() {
        let s = Scenario::from_toml("[scenario]\nlabel = \"e\"\nfamily = \"gaussian\"\n").unwrap();
        let r = run_experiment(&s).unwrap();
        assert!(r.quantities.is_empty() && r.verdicts.is_empty() && r.provenance.is_none());
        assert_eq!(r.scenario["scenario"]["label"], "e");
    }

    #[test]
    fn far_support_reports_dispersion_ratio() {
        let s = Scenario::from_toml(FAR).unwrap();
        let r = run_experiment(&s).unwrap();
        assert!(r.errors.is_empty(), "{:?}", r.errors);
        assert!(r.quantities.contains_key("Lpt_Lqx(p=3,q=inf)"), "{:?}", r.quantities.keys());
        assert!(r.quantities["dispersion / (|u0|_Hdot1 R^(2/N-1/2))"].value > 0.0);
        assert!(r.smallness.contains_key("|u0|_Hdot1^2 R^(4/N-1)"));
        assert!(r.passed(), "{:?}", r.verdicts);
        assert_eq!(r.norms.len(), 2);
        // deterministic
        let again = run_experiment(&s).unwrap();
        assert_eq!(r.to_json().unwrap(), again.to_json().unwrap());
    }

    #[test]
    fn config_errors() {
        let bad = FAR.replace("\"dispersion\"", "\"nonsense\"");
        assert!(Scenario::from_toml(&bad).unwrap_err().is_config());
        let bad = FAR.replace("amp = 0.05", "amp = 0.05\nbogus = 1");
        assert!(Scenario::from_toml(&bad).unwrap_err().is_config());
        let bad = "[scenario]\nlabel = \"m\"\nfamily = \"multiscale\"\n";
        assert!(Scenario::from_toml(bad).unwrap_err().is_config());
        assert!("xyz".parse::<Method>().unwrap_err().is_config());
    }

    #[test]
    fn toml_round_trip() {
        let s = Scenario::from_toml(FAR).unwrap();
        let back = Scenario::from_toml(&s.to_toml().unwrap()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn multibump_is_choquet_only() {
        let text = r#"
[scenario]
label = "two far bumps"
family = "multibump"
amp = 0.1
centers = [[0.0, 0.0, 0.0], [1000.0, 0.0, 0.0]]

[diagnostics]
names = ["choquet", "energy"]
"#;
        let s = Scenario::from_toml(text).unwrap();
        let r = run_experiment(&s).unwrap();
        assert!(r.smallness["S"].value < 0.2);
        assert!(r.quantities.keys().any(|k| k.starts_with("Lpq(mu)")), "{:?} {:?}", r.quantities, r.errors);
        assert!(r.warnings.iter().any(|w| w.contains("skipped")));
    }
}
