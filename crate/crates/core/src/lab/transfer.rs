use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::eta_bound::experiment_search;
use super::{Comparison, ExperimentReport};
use crate::error::{domain, Result};
use crate::generators::{disjoint_blocks, rademacher_system, transfer_weight, weighted_rademacher};
use crate::subspaces::{lu_l1_ratio, SearchConfig, SubspaceSample};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferConfig {
    pub p: f64,
    pub r: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub n_cells: usize,
    pub search: SearchConfig,
    /// Allowed max/min of the `L_s` ratio over the `n` range.
    pub spread_limit: f64,
    pub controls: bool,
}

impl Default for TransferConfig {
    fn default() -> Self {
        Self {
            p: 1.25,
            r: 1.75,
            n_min: 4,
            n_max: 10,
            n_cells: 1 << 12,
            search: experiment_search(0),
            spread_limit: 2.0,
            controls: true,
        }
    }
}

/// `sup ‖x‖_u/‖x‖₁` for the nested spans `span{g_1..g_n}`, each search
/// warm-started by the previous witness padded with a zero coefficient.
fn ratio_curve(
    build: impl Fn(usize) -> Result<SubspaceSample>,
    ns: &[usize],
    u: f64,
    cfg: &SearchConfig,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(ns.len());
    let mut warm: Vec<Vec<f64>> = Vec::new();
    for &n in ns {
        let span = build(n)?;
        for w in warm.iter_mut() {
            w.resize(n, 0.0);
        }
        let est = lu_l1_ratio(&span, u, cfg, &warm)?;
        warm = vec![est.coeffs];
        out.push(est.value);
    }
    Ok(out)
}

/// `max_k (mes B_k)^{1/u−1}`, which is `n^{1−1/u}` when `n` divides the grid.
fn blocks_closed_form(n: usize, n_cells: usize, u: f64) -> Result<f64> {
    let span = disjoint_blocks(n, n_cells)?;
    Ok(span
        .generators()
        .iter()
        .map(|g| {
            let m = g.values().iter().filter(|&&v| v != 0.0).count() as f64 / n_cells as f64;
            m.powf(1.0 / u - 1.0)
        })
        .fold(0.0, f64::max))
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

/// `L_s` and `L_q` against `L₁` on the weighted Rademacher spans, `s = r/(r−1)`, `q = p/(p−1)`.
///
/// Growth of the `L_q` ratio is evidence only; no finite computation shows that a transfer fails.
pub fn transfer_growth_experiment(cfg: &TransferConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    if cfg.n_min == 0 || cfg.n_max <= cfg.n_min {
        return Err(domain("need 1 ≤ n_min < n_max"));
    }
    let weight = transfer_weight(cfg.p, cfg.r, cfg.n_cells)?;
    let s = cfg.r / (cfg.r - 1.0);
    let q = cfg.p / (cfg.p - 1.0);
    let ns: Vec<usize> = (cfg.n_min..=cfg.n_max).collect();
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let weighted = |n| weighted_rademacher(cfg.p, cfg.r, n, cfg.n_cells);
    let ratio_s = ratio_curve(weighted, &ns, s, &cfg.search)?;
    let ratio_q = ratio_curve(weighted, &ns, q, &cfg.search)?;

    let mut r = ExperimentReport::new("transfer_growth", cfg);
    r.curve("ratio_s", "n", xs.clone(), ratio_s.clone());
    r.curve("ratio_q", "n", xs.clone(), ratio_q.clone());
    r.fit("s", s, 0.0);
    r.fit("q", q, 0.0);
    r.fit("u", weight.u, 0.0);
    // construction already rejects a failed sandwich; record the margin
    let n = cfg.n_cells as f64;
    let margin = (1..cfg.n_cells)
        .map(|k| {
            let t = k as f64 / n;
            let v = weight.integral[k];
            (v - t.powf(1.0 / cfg.p)).min(t.powf(1.0 / cfg.r) - v)
        })
        .fold(f64::INFINITY, f64::min);
    r.check("sandwich_margin", margin, Comparison::Above, 0.0);
    r.check("ratio_s_spread", spread(&ratio_s), Comparison::AtMost, cfg.spread_limit);
    let min_step = ratio_q.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    r.check("ratio_q_min_increment", min_step, Comparison::Above, 0.0);
    r.note(format!("weight monotonicity: {:?}", weight.monotonicity));
    r.note("ratio_q growth is evidence against transfer into L_q, not a proof");

    if cfg.controls {
        let plain = |n| rademacher_system(n, cfg.n_cells);
        let blocks = |n| disjoint_blocks(n, cfg.n_cells);
        for (label, u) in [("s", s), ("q", q)] {
            let pr = ratio_curve(plain, &ns, u, &cfg.search)?;
            r.report_only(&format!("rademacher_ratio_{label}_spread"), spread(&pr), Comparison::AtMost, cfg.spread_limit);
            r.curve(&format!("rademacher_ratio_{label}"), "n", xs.clone(), pr);
            let br = ratio_curve(blocks, &ns, u, &cfg.search)?;
            let dev = ns
                .iter()
                .zip(&br)
                .map(|(&n, v)| Ok((v - blocks_closed_form(n, cfg.n_cells, u)?).abs()))
                .try_fold(0.0_f64, |m, d: Result<f64>| d.map(|d| m.max(d)))?;
            r.report_only(&format!("blocks_ratio_{label}_closed_form"), dev, Comparison::AtMost, 1e-9);
            r.curve(&format!("blocks_ratio_{label}"), "n", xs.clone(), br);
        }
    }
    Ok(r.finish(started))
}
