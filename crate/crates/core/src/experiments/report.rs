//! Report types, log-log fits and file emission.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::grid::fmt_num;
use crate::nonlinear::PicardTrace;
use crate::norms::NormReport;

pub const REPORT_SCHEMA: &str = "outwave-report/1";

/// Outcome of one check against a named acceptance criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub criterion: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Verdict {
    /// Passes when `measured <= threshold`.
    pub fn at_most(criterion: &str, measured: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self { criterion: criterion.into(), passed: measured <= threshold, measured, threshold, detail: detail.into() }
    }

    /// Passes when `measured >= threshold`.
    pub fn at_least(criterion: &str, measured: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self { criterion: criterion.into(), passed: measured >= threshold, measured, threshold, detail: detail.into() }
    }

    pub fn flag(criterion: &str, passed: bool, detail: impl Into<String>) -> Self {
        let v = f64::from(u8::from(passed));
        Self { criterion: criterion.into(), passed, measured: v, threshold: 1.0, detail: detail.into() }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: measured {} vs threshold {} ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion,
            fmt_num(self.measured),
            fmt_num(self.threshold),
            self.detail
        )
    }
}

/// A number with its units and the criterion it feeds, if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub units: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<String>,
}

impl Quantity {
    pub fn new(value: f64, units: &str) -> Self {
        Self { value, units: units.into(), criterion: None }
    }

    pub fn feeds(mut self, criterion: &str) -> Self {
        self.criterion = Some(criterion.into());
        self
    }
}

/// Ordinary least squares `log y = slope log x + intercept` with the 95%
/// half-width of the slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub name: String,
    pub slope: f64,
    pub intercept: f64,
    pub half_width: f64,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
}

pub fn fit_loglog(name: &str, xs: &[f64], ys: &[f64]) -> Result<Fit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidParameter(format!("fit '{name}' needs at least two paired points")));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidParameter(format!("fit '{name}' needs positive finite data")));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(format!("fit '{name}' has a degenerate abscissa")));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let half_width = if lx.len() > 2 {
        let sse: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        let se = (sse / (n - 2.0) / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, n - 2.0).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        t.inverse_cdf(0.975) * se
    } else {
        f64::INFINITY
    };
    Ok(Fit { name: name.into(), slope, intercept, half_width, points: lx.len(), expected: None })
}

/// One curve of a figure; emitted to `plotdata/<figure>.csv` as `x,y,series`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub figure: String,
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub n: usize,
    pub r_max: f64,
    pub h: f64,
    pub dt: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub label: String,
    pub scenario: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    /// Smallness parameters of the data, keyed by the quantity they stand for.
    pub smallness: BTreeMap<String, Quantity>,
    pub quantities: BTreeMap<String, Quantity>,
    /// Norm reports keyed by `t=<time>` or a descriptive tag.
    pub norms: BTreeMap<String, NormReport>,
    pub fits: Vec<Fit>,
    pub traces: Vec<PicardTrace>,
    pub verdicts: Vec<Verdict>,
    pub series: Vec<Series>,
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
}

impl ExperimentReport {
    pub fn new(label: &str, scenario: serde_json::Value) -> Self {
        Self {
            schema: REPORT_SCHEMA.into(),
            label: label.into(),
            scenario,
            provenance: None,
            smallness: BTreeMap::new(),
            quantities: BTreeMap::new(),
            norms: BTreeMap::new(),
            fits: Vec::new(),
            traces: Vec::new(),
            verdicts: Vec::new(),
            series: Vec::new(),
            warnings: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

fn safe_name(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

/// Writes `report.json`, `series.csv` and `plotdata/<figure>.csv` under `dir`
/// and returns the paths written.
pub fn emit_report(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let json = dir.join("report.json");
    fs::write(&json, report.to_json()?)?;
    written.push(json);

    let series = dir.join("series.csv");
    let mut w = csv::Writer::from_path(&series)?;
    w.write_record(["x", "y", "series"])?;
    for s in &report.series {
        for (x, y) in &s.points {
            w.write_record([fmt_num(*x), fmt_num(*y), format!("{}/{}", s.figure, s.name)])?;
        }
    }
    w.flush()?;
    written.push(series);

    let mut figures: BTreeMap<&str, Vec<&Series>> = BTreeMap::new();
    for s in &report.series {
        figures.entry(s.figure.as_str()).or_default().push(s);
    }
    if !figures.is_empty() {
        let plot = dir.join("plotdata");
        fs::create_dir_all(&plot)?;
        for (fig, list) in figures {
            let path = plot.join(format!("{}.csv", safe_name(fig)));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["x", "y", "series"])?;
            for s in list {
                for (x, y) in &s.points {
                    w.write_record([fmt_num(*x), fmt_num(*y), s.name.clone()])?;
                }
            }
            w.flush()?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_fit() {
        let xs: Vec<f64> = (0..6).map(|k| 2f64.powi(-k - 4)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(0.25)).collect();
        let f = fit_loglog("p", &xs, &ys).unwrap();
        assert!((f.slope - 0.25).abs() < 1e-12);
        assert!(f.half_width < 1e-10);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn noisy_fit_has_positive_band() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys = [1.0, 2.2, 3.9, 8.5];
        let f = fit_loglog("n", &xs, &ys).unwrap();
        assert!(f.half_width > 0.0 && f.half_width < 0.5);
        assert!(fit_loglog("bad", &[1.0], &[1.0]).is_err());
        assert!(fit_loglog("bad", &[1.0, 2.0], &[1.0, -1.0]).is_err());
    }

    #[test]
    fn emission_layout() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = ExperimentReport::new("t", serde_json::json!({"a": 1}));
        r.series.push(Series {
            figure: "decay".into(),
            name: "p=4".into(),
            x_label: "t".into(),
            y_label: "norm".into(),
            points: vec![(1.0, 2.0), (2.0, 1.5)],
        });
        let paths = emit_report(&r, dir.path()).unwrap();
        assert_eq!(paths.len(), 3);
        let plot = std::fs::read_to_string(dir.path().join("plotdata/decay.csv")).unwrap();
        assert_eq!(plot, "x,y,series\n1.0,2.0,p=4\n2.0,1.5,p=4\n");
        let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
        assert!(json.contains("\"schema\": \"outwave-report/1\""));
    }
}
