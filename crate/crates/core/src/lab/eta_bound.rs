use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{fit_intercept, fit_line, Comparison, ExperimentReport};
use crate::error::{domain, Result};
use crate::generators::{rademacher_system, stable_family};
use crate::grid::GridFunction;
use crate::subspaces::{eta_star_with_profile, SearchConfig, SubspaceSample};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EtaBoundKind {
    /// First `n` Rademacher functions, compared with `[ln(1+1/τ)]^{-1/2}`.
    Rademacher { n: usize },
    /// `n` independent `p`-stable functions; log-log slope of `η*`.
    Stable { p: f64, n: usize, seed: u64 },
    /// `span{χ_[0,1]}`, for which `η* ≡ 1`.
    Control,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaBoundConfig {
    pub kind: EtaBoundKind,
    pub n_cells: usize,
    pub taus: Vec<f64>,
    pub search: SearchConfig,
    /// Allowed max/min of the normalized ratio curve.
    pub stability_factor: f64,
}

/// `2^{-hi}, …, 2^{-lo}`, increasing.
pub fn dyadic_taus(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).rev().map(|k| 0.5f64.powi(k)).collect()
}

/// Search settings for experiments: fewer restarts than the library default.
pub fn experiment_search(seed: u64) -> SearchConfig {
    SearchConfig {
        n_restarts: 16,
        seed,
        tol: 1e-7,
        ..SearchConfig::default()
    }
}

impl EtaBoundConfig {
    pub fn rademacher(n: usize) -> Self {
        Self {
            kind: EtaBoundKind::Rademacher { n },
            n_cells: 1 << n,
            taus: dyadic_taus(1, 10),
            search: experiment_search(0),
            stability_factor: 3.0,
        }
    }

    pub fn stable(p: f64, seed: u64) -> Self {
        Self {
            kind: EtaBoundKind::Stable { p, n: 4, seed },
            n_cells: 1 << 14,
            taus: dyadic_taus(2, 8),
            search: experiment_search(seed),
            stability_factor: 3.0,
        }
    }

    pub fn control(n_cells: usize) -> Self {
        Self {
            kind: EtaBoundKind::Control,
            n_cells,
            taus: dyadic_taus(1, 8),
            search: experiment_search(0),
            stability_factor: 3.0,
        }
    }
}

fn orlicz_fundamental(t: f64) -> f64 {
    (1.0 / t).ln_1p().powf(-0.5)
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

/// Lower growth of `η*` on a `τ` grid inside `(0,1)`.
pub fn eta_bound_experiment(cfg: &EtaBoundConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    let mut taus = cfg.taus.clone();
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    if taus.len() < 2 || taus.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
        return Err(domain("tau grid needs at least two points in (0,1)"));
    }
    let span = match &cfg.kind {
        EtaBoundKind::Rademacher { n } => rademacher_system(*n, cfg.n_cells)?,
        EtaBoundKind::Stable { p, n, seed } => stable_family(*p, *n, *seed, cfg.n_cells)?,
        EtaBoundKind::Control => {
            SubspaceSample::new(vec![GridFunction::constant(cfg.n_cells, 1.0)?], "constant")?
        }
    };
    let mut nodes = vec![0.0];
    nodes.extend_from_slice(&taus);
    nodes.push(1.0);
    let (star, profile, diag) = eta_star_with_profile(&span, &nodes, &cfg.search)?;
    let inner = 1..nodes.len() - 1;
    let eta: Vec<f64> = profile.eta[inner.clone()].to_vec();
    let star_v: Vec<f64> = star.values()[inner].to_vec();

    let mut r = ExperimentReport::new("eta_bound", cfg);
    r.curve("eta", "tau", taus.clone(), eta);
    r.curve("eta_star", "tau", taus.clone(), star_v.clone());
    r.curve("search_spread", "tau", taus.clone(), profile.spread[1..nodes.len() - 1].to_vec());
    r.check(
        "profile_bound_violations",
        profile.bound_violations(1e-12).len() as f64,
        Comparison::AtMost,
        0.0,
    );
    if diag.rising_at_origin {
        r.note("tau/eta(tau) still rising at the smallest node; eta* may grow under refinement");
    }
    let log_t: Vec<f64> = taus.iter().map(|t| t.ln()).collect();
    let log_s: Vec<f64> = star_v.iter().map(|s| s.ln()).collect();
    let (offset, slope, rms) = fit_line(&log_t, &log_s);
    r.fit("loglog_slope", slope, rms);
    r.fit("loglog_offset", offset.exp(), rms);

    match &cfg.kind {
        EtaBoundKind::Rademacher { .. } => {
            let ratio: Vec<f64> = taus.iter().zip(&star_v).map(|(&t, s)| s / orlicz_fundamental(t)).collect();
            let c = ratio.iter().copied().fold(f64::INFINITY, f64::min);
            r.curve("ratio_to_log_fundamental", "tau", taus.clone(), ratio.clone());
            r.fit("c", c, 0.0);
            r.check("c_positive", c, Comparison::Above, 0.0);
            r.check("ratio_spread", spread(&ratio), Comparison::AtMost, cfg.stability_factor);
        }
        EtaBoundKind::Stable { p, .. } => {
            let q = p / (p - 1.0);
            for (name, s) in [("slope_1_over_p", 1.0 / p), ("slope_1_over_q", 1.0 / q)] {
                let (a, res) = fit_intercept(&log_t, &log_s, s);
                r.fit(&format!("{name}_offset"), a.exp(), res);
            }
            let offsets: Vec<f64> = taus
                .iter()
                .zip(&star_v)
                .map(|(&t, s)| s / t.powf(slope))
                .collect();
            r.curve("offset_curve", "tau", taus.clone(), offsets.clone());
            r.check("loglog_slope_below_one", slope, Comparison::Below, 1.0);
            r.check("offset_positive", offset.exp(), Comparison::Above, 0.0);
            r.check("offset_spread", spread(&offsets), Comparison::AtMost, cfg.stability_factor);
            let over_tau: Vec<f64> = taus.iter().zip(&star_v).map(|(t, s)| s / t).collect();
            r.curve("eta_star_over_tau", "tau", taus.clone(), over_tau.clone());
            r.check(
                "eta_star_over_tau_growth",
                over_tau[0] / over_tau[over_tau.len() - 1],
                Comparison::Above,
                1.0,
            );
        }
        EtaBoundKind::Control => {
            let dev = star_v.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
            r.check("eta_star_is_one", dev, Comparison::AtMost, 1e-12);
            r.check("slope_is_zero", slope.abs(), Comparison::AtMost, 1e-9);
        }
    }
    Ok(r.finish(started))
}
