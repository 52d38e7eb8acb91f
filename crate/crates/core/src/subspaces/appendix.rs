//! Level sets, the classes `M_ε(E)`, `ν_E`, absolute-continuity moduli and
//! `Δ_E`-system scores. Norms are taken with `φ_E(1) = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{degenerate, domain, Result};
use crate::grid::{CellSet, GridFunction};
use crate::spaces::{Profile, SpaceSpec};

const BISECTION_ITERS: usize = 200;
const M_EPSILON_TOL: f64 = 1e-6;

fn nonzero_norm(x: &GridFunction, space: &SpaceSpec) -> Result<f64> {
    if x.is_zero() {
        return Err(degenerate("function is identically zero"));
    }
    space.normalized_norm(x)
}

/// `S_ε^E(x) = {|x| ≥ ε‖x‖_E}`.
pub fn s_epsilon_set(x: &GridFunction, eps: f64, space: &SpaceSpec) -> Result<CellSet> {
    if eps < 0.0 {
        return Err(domain(format!("epsilon {eps} is negative")));
    }
    let level = eps * nonzero_norm(x, space)?;
    CellSet::new(x.values().iter().map(|v| v.abs() >= level).collect())
}

/// `mes S_ε^E(x) ≥ ε`.
pub fn in_m_epsilon(x: &GridFunction, eps: f64, space: &SpaceSpec) -> Result<bool> {
    Ok(s_epsilon_set(x, eps, space)?.measure() >= eps)
}

/// Largest `ε` with `x ∈ M_ε(E)`, to `1e-6`.
pub fn max_m_epsilon(x: &GridFunction, space: &SpaceSpec) -> Result<f64> {
    let norm = nonzero_norm(x, space)?;
    let member = |eps: f64| {
        let level = eps * norm;
        let count = x.values().iter().filter(|v| v.abs() >= level).count();
        count as f64 / x.n_cells() as f64 >= eps
    };
    if member(1.0) {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > M_EPSILON_TOL {
        let mid = 0.5 * (lo + hi);
        if member(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `‖x χ_e‖_E/‖x‖_E` minimized over `mes e ≥ 1 − δ`: the top-`δ` mass removed.
pub fn tail_ratio(x: &GridFunction, space: &SpaceSpec, delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(domain(format!("delta {delta} outside [0,1]")));
    }
    let norm = nonzero_norm(x, space)?;
    Ok(space.normalized_norm_profile(&Profile::of(x).remove_head(delta))? / norm)
}

/// `inf_{x∈K} inf_{mes e ≥ 1−ε} ‖xχ_e‖_E/‖x‖_E`.
pub fn nu(family: &[GridFunction], space: &SpaceSpec, eps: f64) -> Result<f64> {
    if family.is_empty() {
        return Err(domain("empty family"));
    }
    family
        .iter()
        .map(|x| tail_ratio(x, space, eps))
        .try_fold(f64::INFINITY, |m, r| r.map(|r| m.min(r)))
}

/// `ν` along a grid of `ε`, in grid order.
pub fn nu_limit(family: &[GridFunction], space: &SpaceSpec, eps_grid: &[f64]) -> Result<Vec<f64>> {
    eps_grid.iter().map(|&e| nu(family, space, e)).collect()
}

/// Largest `v` with `‖x*χ_[0,v]‖_E ≤ ε`; then `mes e ≤ v` implies `‖xχ_e‖_E ≤ ε`.
pub fn modulus_ac(x: &GridFunction, space: &SpaceSpec, eps: f64) -> Result<f64> {
    if eps < 0.0 {
        return Err(domain(format!("epsilon {eps} is negative")));
    }
    let prof = Profile::of(x);
    if space.normalized_norm_profile(&prof)? <= eps {
        return Ok(1.0);
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if space.normalized_norm_profile(&prof.truncate(mid))? <= eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaVerdict {
    /// Every element drops below the threshold at some `δ`, and those `δ` shrink along the sequence.
    Witness,
    NoWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaScore {
    pub deltas: Vec<f64>,
    /// `rho[n][k] = ρ_n(δ_k)`.
    pub rho: Vec<Vec<f64>>,
    pub min_rho: Vec<f64>,
    /// Smallest `δ` with `ρ_n(δ) ≤ threshold`, per element.
    pub witness_delta: Vec<Option<f64>>,
    pub threshold: f64,
    pub verdict: DeltaVerdict,
}

pub const DELTA_THRESHOLD: f64 = 0.05;

pub fn delta_score(seq: &[GridFunction], space: &SpaceSpec, deltas: &[f64]) -> Result<DeltaScore> {
    if seq.is_empty() {
        return Err(domain("empty sequence"));
    }
    if deltas.is_empty() {
        return Err(domain("empty delta grid"));
    }
    let rho = seq
        .iter()
        .map(|x| deltas.iter().map(|&d| tail_ratio(x, space, d)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let min_rho = (0..deltas.len())
        .map(|k| rho.iter().map(|r| r[k]).fold(f64::INFINITY, f64::min))
        .collect();
    let witness_delta: Vec<Option<f64>> = rho
        .iter()
        .map(|r| {
            deltas
                .iter()
                .zip(r)
                .filter(|(_, &v)| v <= DELTA_THRESHOLD)
                .map(|(&d, _)| d)
                .min_by(f64::total_cmp)
        })
        .collect();
    let shrinking = match (witness_delta.first(), witness_delta.last()) {
        (Some(Some(a)), Some(Some(b))) => seq.len() == 1 || b < a,
        _ => false,
    };
    let verdict = if witness_delta.iter().all(Option::is_some) && shrinking {
        DeltaVerdict::Witness
    } else {
        DeltaVerdict::NoWitness
    };
    Ok(DeltaScore {
        deltas: deltas.to_vec(),
        rho,
        min_rho,
        witness_delta,
        threshold: DELTA_THRESHOLD,
        verdict,
    })
}
