use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use outwave::choquet::{choquet_rearrangement, kato_norm, BumpFunction, BumpSpec, ChoquetParams};
use outwave::experiments::{
    emit_report, run_all, run_scenario, run_shell_sweep, DiagnosticsSpec, ExperimentReport, Family, Scenario,
    ScenarioSpec, ShellSweepConfig, SolverSpec,
};
use outwave::nonlinear::Sign;
use outwave::norms::{label, NormReport};
use outwave::projections::project;
use outwave::{Error, RadialField, Result, SpaceTimeField, StatePair};

#[derive(Parser)]
#[command(name = "outwave", version, about = "Radial wave lab: projections, flows, norms, Choquet spaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Split a state pair (CSV `r,pos,vel`) into outgoing and incoming parts.
    Project {
        input: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a scenario and write the evolution, traces and norms.
    Simulate(SimulateArgs),
    /// Norm report of field (`r,value`) or space-time (`r,t,value`) CSVs.
    Norms {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Lebesgue exponents; `inf` is accepted.
        #[arg(long, value_delimiter = ',', default_value = "2,4,inf")]
        p: Vec<f64>,
        /// Sobolev orders.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        s: Vec<f64>,
        /// Power used for the space-time exponents.
        #[arg(long = "N", default_value_t = 6)]
        n_pow: u32,
    },
    /// Lorentz-Choquet quasinorm of a JSON bump list.
    Choquet {
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value = "inf")]
        q: f64,
        /// Levels per octave.
        #[arg(long, default_value_t = 8)]
        levels: usize,
        #[arg(long)]
        lattice_spacing: Option<f64>,
    },
    /// Run the acceptance checks.
    Verify {
        /// Only these criteria (1-based).
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Thin-shell scaling sweep.
    ShellSweep {
        #[arg(long = "N", default_value_t = 6)]
        n_pow: u32,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long = "L", default_value_t = 1.0)]
        l: f64,
        /// `2^-a..2^-b` or a comma list.
        #[arg(long, default_value = "2^-4..2^-9")]
        eps: String,
        #[arg(long)]
        no_picard: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Scenario TOML or state pair CSV.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long = "N")]
    n_pow: Option<u32>,
    #[arg(long)]
    sign: Option<String>,
    #[arg(long = "T")]
    horizon: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    linear: bool,
    /// Keep at most this many time rows in the space-time CSV.
    #[arg(long, default_value_t = 256)]
    max_rows: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}

fn config_io(path: &Path, e: std::io::Error) -> Error {
    Error::Config(format!("{}: {e}", path.display()))
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(v)? + "\n")?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Project { input, out } => {
            let s = StatePair::read_csv(File::open(&input).map_err(|e| config_io(&input, e))?)?;
            let p = project(&s)?;
            fs::create_dir_all(&out)?;
            p.out_part.write_csv(File::create(out.join("out.csv"))?)?;
            p.in_part.write_csv(File::create(out.join("in.csv"))?)?;
            let summary = json!({ "residual": p.residual, "warnings": p.warnings });
            write_json(&out.join("projection.json"), &summary)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(true)
        }
        Cmd::Simulate(a) => simulate(a),
        Cmd::Norms { inputs, p, s, n_pow } => {
            let mut reports = serde_json::Map::new();
            for path in &inputs {
                let header = BufReader::new(File::open(path).map_err(|e| config_io(path, e))?)
                    .lines()
                    .next()
                    .transpose()?
                    .unwrap_or_default();
                let file = File::open(path)?;
                let rep = if header.trim() == "r,t,value" {
                    NormReport::for_spacetime(&SpaceTimeField::read_csv(file)?, n_pow)
                } else {
                    NormReport::for_field(&RadialField::read_csv(file)?, &p, &s)
                };
                reports.insert(path.display().to_string(), serde_json::to_value(rep)?);
            }
            let v = if reports.len() == 1 { reports.into_iter().next().map(|e| e.1).unwrap() } else { reports.into() };
            println!("{}", serde_json::to_string_pretty(&v)?);
            Ok(true)
        }
        Cmd::Choquet { input, alpha, p, q, levels, lattice_spacing } => {
            let text = fs::read_to_string(&input).map_err(|e| config_io(&input, e))?;
            let specs: Vec<BumpSpec> = serde_json::from_str(&text)?;
            let f = BumpFunction::new(specs.iter().map(BumpSpec::to_bump).collect::<Result<_>>()?)?;
            let mut prm = ChoquetParams::new(alpha).map_err(|e| Error::Config(e.to_string()))?;
            prm.levels_per_octave = levels;
            prm.lattice_spacing = lattice_spacing;
            prm.validate().map_err(|e| Error::Config(e.to_string()))?;
            if !(p > 0.0 && p.is_finite() && q > 0.0) {
                return Err(Error::Config(format!("need 0 < p < inf and q > 0, got p = {p}, q = {q}")));
            }
            let rear = choquet_rearrangement(&f, &prm)?;
            let mut rep = NormReport::default();
            rep.insert(label("Lpq(mu)", &[("p", p), ("q", q)]), rear.lorentz(p, q));
            rep.insert(label("Lpq(mu)", &[("p", p), ("q", f64::INFINITY)]), rear.lorentz(p, f64::INFINITY));
            match kato_norm(&f, alpha / p, p, p, &prm) {
                Ok(v) => rep.insert(label("Kato", &[("alpha", alpha / p), ("p", p)]), v),
                Err(e) => {
                    rep.metadata.insert("kato".into(), e.to_string().into());
                }
            }
            // level set attaining the weak quasinorm
            let best = (0..rear.levels.len())
                .max_by(|&i, &j| {
                    let w = |k: usize| rear.levels[k] * rear.distribution[k].powf(1.0 / p);
                    w(i).total_cmp(&w(j))
                })
                .ok_or_else(|| Error::InvalidParameter("zero function".into()))?;
            rep.metadata.insert("alpha".into(), alpha.into());
            rep.metadata.insert("argmax_center".into(), json!(rear.argmax[best]));
            rep.metadata.insert("argmax_level".into(), rear.levels[best].into());
            println!("{}", serde_json::to_string_pretty(&rep)?);
            Ok(true)
        }
        Cmd::Verify { only, out } => {
            let outcomes = if only.is_empty() {
                run_all()
            } else {
                only.iter()
                    .map(|&k| outwave::experiments::run_criterion(k).ok_or(Error::Config(format!("no criterion {k}"))))
                    .collect::<Result<_>>()?
            };
            for o in &outcomes {
                println!("{}", o.line());
            }
            if let Some(dir) = out {
                let mut rep = ExperimentReport::new("verify", json!({ "criteria": outcomes.len() }));
                for o in &outcomes {
                    rep.verdicts.extend(o.verdicts.iter().cloned());
                    rep.errors.extend(o.errors.iter().map(|e| format!("{}: {e}", o.criterion)));
                }
                emit_report(&rep, &dir)?;
            }
            Ok(outcomes.iter().all(|o| o.passed()))
        }
        Cmd::ShellSweep { n_pow, alpha, l, eps, no_picard, out } => {
            let alpha = alpha.unwrap_or(2.0 / (3.0 * f64::from(n_pow)));
            let mut cfg = ShellSweepConfig::new(n_pow, alpha, l, parse_eps(&eps)?);
            cfg.picard = !no_picard;
            let rep = run_shell_sweep(&cfg)?;
            finish(&rep, &out)
        }
    }
}

fn finish(rep: &ExperimentReport, out: &Path) -> Result<bool> {
    emit_report(rep, out)?;
    for v in &rep.verdicts {
        println!("{}", v.line());
    }
    for e in &rep.errors {
        eprintln!("error: {e}");
    }
    Ok(rep.passed() && rep.errors.is_empty())
}

/// `2^-4..2^-9` or `0.1,0.05`.
fn parse_eps(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("cannot parse eps list '{s}'"));
    if let Some((a, b)) = s.split_once("..") {
        let exp = |t: &str| t.trim().strip_prefix("2^").and_then(|e| e.parse::<i32>().ok()).ok_or_else(bad);
        let (a, b) = (exp(a)?, exp(b)?);
        let (lo, hi) = (a.min(b), a.max(b));
        return Ok((lo..=hi).rev().map(|k| 2f64.powi(k)).collect());
    }
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| bad())).collect()
}

fn simulate(a: SimulateArgs) -> Result<bool> {
    let data_toml = a.data.as_ref().filter(|p| p.extension().is_some_and(|e| e == "toml"));
    let mut sc = match a.scenario.as_ref().or(data_toml) {
        Some(path) => Scenario::load(path)?,
        None => Scenario {
            scenario: toml::from_str::<ScenarioSpec>("label = \"cli\"\nfamily = \"gaussian\"")
                .map_err(|e| Error::Config(e.to_string()))?,
            solver: SolverSpec::default(),
            diagnostics: DiagnosticsSpec {
                names: ["norms", "spacetime", "dispersion", "energy"].map(String::from).to_vec(),
                ..DiagnosticsSpec::default()
            },
        },
    };
    if let Some(path) = a.data.as_ref().filter(|_| data_toml.is_none()) {
        sc.scenario.family = Family::Data;
        sc.scenario.path = Some(path.clone());
    }
    let so = &mut sc.solver;
    if let Some(m) = &a.method {
        so.method = m.parse()?;
    }
    if let Some(sign) = &a.sign {
        so.sign = sign.parse::<Sign>()?;
    }
    so.n_pow = a.n_pow.unwrap_or(so.n_pow);
    so.horizon = a.horizon.unwrap_or(so.horizon);
    so.dt = a.dt.or(so.dt);
    so.n = a.grid_n.unwrap_or(so.n);
    so.r_max = a.rmax.or(so.r_max);
    so.linear |= a.linear;
    sc.validate()?;

    let run = run_scenario(&sc)?;
    if let Some((name, evo)) = &run.evolution {
        fs::create_dir_all(&a.out)?;
        let stride = evo.times().len().div_ceil(a.max_rows.max(1)).max(1);
        evo.u.subsample(stride).write_csv(File::create(a.out.join(format!("{name}.csv")))?)?;
        let mut norms = NormReport::for_spacetime(&evo.u, sc.solver.n_pow);
        norms.metadata.insert("solver".into(), name.clone().into());
        write_json(&a.out.join("norms.json"), &norms)?;
    }
    if !run.report.traces.is_empty() {
        fs::create_dir_all(&a.out)?;
        write_json(&a.out.join("picard_trace.json"), &run.report.traces)?;
    }
    finish(&run.report, &a.out)
}
