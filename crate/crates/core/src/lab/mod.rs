//! Experiment drivers and the versioned report they emit.

mod constant;
mod eta_bound;
mod extraction;
mod invariants;
mod stable_tail;
mod transfer;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use constant::{compute_c, StableConstant, GAMMA_AGREEMENT_TOL};
pub use eta_bound::{dyadic_taus, eta_bound_experiment, experiment_search, EtaBoundConfig, EtaBoundKind};
pub use extraction::{delta_system_sequence, extraction_demo, ExtractionConfig, SequenceKind};
pub use invariants::{invariant_suite, InvariantConfig, InvariantGroup};
pub use stable_tail::{stable_tail_experiment, StableTailConfig};
pub use transfer::{transfer_growth_experiment, TransferConfig};

pub const SCHEMA: &str = "rearrange-lab/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub name: String,
    pub x_label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub name: String,
    pub value: f64,
    /// Root-mean-square residual of the fit, `0` for exact quantities.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
}

impl Comparison {
    fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparison::AtMost => value <= threshold,
            Comparison::AtLeast => value >= threshold,
            Comparison::Below => value < threshold,
            Comparison::Above => value > threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub passed: bool,
    /// Report-only checks do not affect the verdict.
    pub required: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub experiment: String,
    pub config: serde_json::Value,
    pub curves: Vec<Curve>,
    pub fits: Vec<Fit>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub passed: bool,
    pub wall_clock_s: f64,
}

impl ExperimentReport {
    pub fn new(experiment: &str, config: &impl Serialize) -> Self {
        Self {
            schema: SCHEMA.into(),
            experiment: experiment.into(),
            config: serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
            curves: Vec::new(),
            fits: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            passed: false,
            wall_clock_s: 0.0,
        }
    }

    pub fn curve(&mut self, name: &str, x_label: &str, x: Vec<f64>, y: Vec<f64>) {
        self.curves.push(Curve {
            name: name.into(),
            x_label: x_label.into(),
            x,
            y,
        });
    }

    pub fn fit(&mut self, name: &str, value: f64, residual: f64) {
        self.fits.push(Fit {
            name: name.into(),
            value,
            residual,
        });
    }

    pub fn check(&mut self, name: &str, value: f64, comparison: Comparison, threshold: f64) -> bool {
        self.push_check(name, value, comparison, threshold, true)
    }

    pub fn report_only(&mut self, name: &str, value: f64, comparison: Comparison, threshold: f64) -> bool {
        self.push_check(name, value, comparison, threshold, false)
    }

    fn push_check(
        &mut self,
        name: &str,
        value: f64,
        comparison: Comparison,
        threshold: f64,
        required: bool,
    ) -> bool {
        let passed = comparison.holds(value, threshold);
        self.checks.push(Check {
            name: name.into(),
            value,
            comparison,
            threshold,
            passed,
            required,
        });
        passed
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn finish(mut self, started: Instant) -> Self {
        self.passed = self.checks.iter().filter(|c| c.required).all(|c| c.passed);
        self.wall_clock_s = started.elapsed().as_secs_f64();
        self
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Curves in long format: `curve,x_label,x,y`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("curve,x_label,x,y\n");
        for c in &self.curves {
            for (x, y) in c.x.iter().zip(&c.y) {
                s.push_str(&format!("{},{},{:?},{:?}\n", c.name, c.x_label, x, y));
            }
        }
        s
    }
}

/// Least-squares line `y = a + b x`; returns `(a, b, rms residual)`.
pub(crate) fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let a = my - b * mx;
    (a, b, rms(x, y, |t| a + b * t))
}

/// Best intercept for a fixed slope; returns `(a, rms residual)`.
pub(crate) fn fit_intercept(x: &[f64], y: &[f64], slope: f64) -> (f64, f64) {
    let a = x.iter().zip(y).map(|(t, v)| v - slope * t).sum::<f64>() / x.len() as f64;
    (a, rms(x, y, |t| a + slope * t))
}

fn rms(x: &[f64], y: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    (x.iter().zip(y).map(|(&t, &v)| (v - f(t)).powi(2)).sum::<f64>() / x.len() as f64).sqrt()
}
