use std::fmt;

use serde::{Deserialize, Serialize};

use crate::envelopes::{involution_general_with_diagnostics, InvolutionDiagnostics, MFunction, MonotoneFn};
use crate::error::{domain, Result};
use crate::grid::{head_integral_sorted, sort_desc};
use crate::spaces::{Profile, SpaceSpec};
use crate::subspaces::search::{
    maximize, HeadNorm, L1HeadRatio, LpHeadRatio, LuL1Ratio, NormHeadRatio, Objective, SearchConfig,
};
use crate::subspaces::SubspaceSample;

/// A certified lower bound on a growth characteristic at one `τ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtaEstimate {
    pub tau: f64,
    pub value: f64,
    pub coeffs: Vec<f64>,
    pub spread: f64,
    pub hits: usize,
    pub restarts: usize,
}

fn exact(tau: f64, value: f64, dim: usize) -> EtaEstimate {
    let mut coeffs = vec![0.0; dim];
    coeffs[0] = 1.0;
    EtaEstimate {
        tau,
        value,
        coeffs,
        spread: 0.0,
        hits: 1,
        restarts: 1,
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(domain(format!("tau {tau} outside [0,1]")));
    }
    Ok(())
}

fn is_l1(norm: &HeadNorm) -> bool {
    matches!(norm, HeadNorm::Space(SpaceSpec::LebesgueP { p }) if *p == 1.0)
}

fn estimate(
    b: &SubspaceSample,
    tau: f64,
    norm: &HeadNorm,
    cfg: &SearchConfig,
    warm: &[Vec<f64>],
) -> Result<EtaEstimate> {
    check_tau(tau)?;
    let (HeadNorm::Space(space) | HeadNorm::Mediant(space)) = norm;
    space.validate()?;
    if tau == 0.0 {
        return Ok(exact(0.0, 0.0, b.dim()));
    }
    if tau == 1.0 {
        return Ok(exact(1.0, 1.0, b.dim()));
    }
    let l1 = L1HeadRatio { tau };
    let general = NormHeadRatio { norm, tau };
    let lp;
    let obj: &dyn Objective = match norm {
        _ if is_l1(norm) => &l1,
        HeadNorm::Space(SpaceSpec::LebesgueP { p }) if p.is_finite() => {
            lp = LpHeadRatio { tau, p: *p };
            &lp
        }
        _ => &general,
    };
    let out = maximize(b, obj, cfg, warm)?;
    Ok(EtaEstimate {
        tau,
        value: out.value,
        coeffs: out.coeffs,
        spread: out.spread,
        hits: out.hits,
        restarts: out.restart_values.len(),
    })
}

/// `η(B, ε)`: sup over span elements of `∫₀^ε x* / ‖x‖₁`.
pub fn eta(b: &SubspaceSample, eps: f64, cfg: &SearchConfig) -> Result<EtaEstimate> {
    estimate(b, eps, &HeadNorm::Space(SpaceSpec::l1()), cfg, &[])
}

/// `η_E(B, τ)`: sup over span elements of `‖x*χ_[0,τ]‖_E / ‖x‖_E`.
pub fn eta_in_space(
    b: &SubspaceSample,
    tau: f64,
    space: &SpaceSpec,
    cfg: &SearchConfig,
) -> Result<EtaEstimate> {
    estimate(b, tau, &HeadNorm::Space(space.clone()), cfg, &[])
}

/// Growth in the renormed space `(‖·‖_E + ‖·‖₁)/2`.
pub fn eta_in_mediant(
    b: &SubspaceSample,
    tau: f64,
    space: &SpaceSpec,
    cfg: &SearchConfig,
) -> Result<EtaEstimate> {
    estimate(b, tau, &HeadNorm::Mediant(space.clone()), cfg, &[])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioEstimate {
    pub u: f64,
    pub value: f64,
    pub coeffs: Vec<f64>,
    pub spread: f64,
    pub hits: usize,
}

/// `sup ‖x‖_u/‖x‖₁` over the span: how far `L_u` and `L₁` norms drift apart on it.
pub fn lu_l1_ratio(
    b: &SubspaceSample,
    u: f64,
    cfg: &SearchConfig,
    warm: &[Vec<f64>],
) -> Result<RatioEstimate> {
    if !(u >= 1.0 && u.is_finite()) {
        return Err(domain(format!("exponent {u} outside [1,∞)")));
    }
    let out = maximize(b, &LuL1Ratio { u }, cfg, warm)?;
    Ok(RatioEstimate {
        u,
        value: out.value,
        coeffs: out.coeffs,
        spread: out.spread,
        hits: out.hits,
    })
}

/// Lower bounds for `η` along a `τ` grid, made monotone by evaluating every
/// witness at every `τ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtaProfile {
    pub norm: String,
    pub taus: Vec<f64>,
    pub eta: Vec<f64>,
    /// Best witness at each `τ`.
    pub coeffs: Vec<Vec<f64>>,
    /// Best-minus-worst restart value of the search at each `τ`.
    pub spread: Vec<f64>,
    pub hits: Vec<usize>,
}

impl EtaProfile {
    /// Violations of `τ ≤ η ≤ 1`, monotonicity and `η(1) = 1`.
    pub fn bound_violations(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for (&t, &e) in self.taus.iter().zip(&self.eta) {
            if e < t - tol || e > 1.0 + tol {
                out.push(format!("eta({t}) = {e} outside [tau, 1]"));
            }
            if t == 1.0 && (e - 1.0).abs() > tol {
                out.push(format!("eta(1) = {e}"));
            }
        }
        for w in self.taus.iter().zip(&self.eta).collect::<Vec<_>>().windows(2) {
            if w[1].1 < &(w[0].1 - tol) {
                out.push(format!("eta decreases between {} and {}", w[0].0, w[1].0));
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("tau,eta,spread,hits\n");
        for i in 0..self.taus.len() {
            s.push_str(&format!(
                "{:?},{:?},{:?},{}\n",
                self.taus[i], self.eta[i], self.spread[i], self.hits[i]
            ));
        }
        s
    }

    /// Cross-maximum of all stored witnesses at arbitrary `τ`; `L₁` profiles only.
    pub fn witness_curve(&self, b: &SubspaceSample, nodes: &[f64]) -> Result<Vec<f64>> {
        let sorted = witness_profiles(b, &self.coeffs)?;
        Ok(nodes
            .iter()
            .map(|&t| cross_max_l1(&sorted, t).0.clamp(t, 1.0))
            .collect())
    }
}

fn witness_profiles(b: &SubspaceSample, coeffs: &[Vec<f64>]) -> Result<Vec<(Vec<f64>, f64)>> {
    coeffs
        .iter()
        .map(|c| {
            let mut v: Vec<f64> = b.combine_values(c)?.iter().map(|x| x.abs()).collect();
            sort_desc(&mut v);
            let total = v.iter().sum::<f64>() / v.len() as f64;
            Ok((v, total))
        })
        .collect()
}

fn cross_max_l1(sorted: &[(Vec<f64>, f64)], tau: f64) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, (v, total)) in sorted.iter().enumerate() {
        if *total == 0.0 {
            continue;
        }
        let r = head_integral_sorted(v, tau) / total;
        if r > best.0 {
            best = (r, i);
        }
    }
    best
}

pub fn eta_profile(b: &SubspaceSample, taus: &[f64], cfg: &SearchConfig) -> Result<EtaProfile> {
    eta_profile_in(b, taus, &HeadNorm::Space(SpaceSpec::l1()), cfg)
}

pub fn eta_profile_in(
    b: &SubspaceSample,
    taus: &[f64],
    norm: &HeadNorm,
    cfg: &SearchConfig,
) -> Result<EtaProfile> {
    let mut grid = taus.to_vec();
    for &t in &grid {
        check_tau(t)?;
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.is_empty() {
        return Err(domain("empty tau grid"));
    }
    // largest tau first, each search warm-started by the previous witnesses
    let mut estimates = Vec::with_capacity(grid.len());
    let mut warm: Vec<Vec<f64>> = Vec::new();
    for &t in grid.iter().rev() {
        let e = estimate(b, t, norm, cfg, &warm)?;
        if t > 0.0 && t < 1.0 {
            warm.push(e.coeffs.clone());
        }
        estimates.push(e);
    }
    estimates.reverse();

    let witnesses: Vec<Vec<f64>> = estimates.iter().map(|e| e.coeffs.clone()).collect();
    let l1 = is_l1(norm);
    let sorted = if l1 { witness_profiles(b, &witnesses)? } else { Vec::new() };
    let profiles: Vec<Profile> = if l1 {
        Vec::new()
    } else {
        witnesses
            .iter()
            .map(|c| b.combine(c).map(|x| Profile::of(&x)))
            .collect::<Result<_>>()?
    };
    let mut eta = Vec::with_capacity(grid.len());
    let mut coeffs = Vec::with_capacity(grid.len());
    for (k, &t) in grid.iter().enumerate() {
        if t == 0.0 || t == 1.0 {
            eta.push(t);
            coeffs.push(witnesses[k].clone());
            continue;
        }
        let (v, i) = if l1 {
            cross_max_l1(&sorted, t)
        } else {
            profiles
                .iter()
                .enumerate()
                .map(|(i, p)| (norm.ratio(p, t), i))
                .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a })
        };
        let (v, i) = if estimates[k].value >= v { (estimates[k].value, k) } else { (v, i) };
        eta.push(v);
        coeffs.push(witnesses[i].clone());
    }
    Ok(EtaProfile {
        norm: match norm {
            HeadNorm::Space(s) => s.label(),
            HeadNorm::Mediant(s) => format!("mediant({})", s.label()),
        },
        taus: grid,
        eta,
        coeffs,
        spread: estimates.iter().map(|e| e.spread).collect(),
        hits: estimates.iter().map(|e| e.hits).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitVerdict {
    #[serde(rename = "→0-consistent")]
    ToZero,
    #[serde(rename = "→1-consistent")]
    ToOne,
    #[serde(rename = "intermediate at this resolution")]
    Intermediate,
}

impl fmt::Display for LimitVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitVerdict::ToZero => "→0-consistent",
            LimitVerdict::ToOne => "→1-consistent",
            LimitVerdict::Intermediate => "intermediate at this resolution",
        })
    }
}

/// Band around 0 and 1 used by the limit verdicts.
pub const LIMIT_BAND: f64 = 0.05;

impl LimitVerdict {
    pub fn of_tail(value: f64) -> Self {
        if value <= LIMIT_BAND {
            LimitVerdict::ToZero
        } else if value >= 1.0 - LIMIT_BAND {
            LimitVerdict::ToOne
        } else {
            LimitVerdict::Intermediate
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtaLimit {
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    pub verdict: LimitVerdict,
    pub band: f64,
}

/// `{2^-k : k = 1..log₂ n_cells − 2}`, decreasing.
pub fn default_limit_grid(n_cells: usize) -> Vec<f64> {
    let depth = (n_cells as f64).log2().floor() as i32 - 2;
    (1..=depth.max(2)).map(|k| 0.5f64.powi(k)).collect()
}

/// `η_E(B, τ)` along a decreasing grid with a verdict on the smallest `τ`.
pub fn eta_limit(
    b: &SubspaceSample,
    space: &SpaceSpec,
    taus: &[f64],
    cfg: &SearchConfig,
) -> Result<EtaLimit> {
    if taus.len() < 2 {
        return Err(domain("limit grid needs at least two points"));
    }
    let prof = eta_profile_in(b, taus, &HeadNorm::Space(space.clone()), cfg)?;
    let mut taus = prof.taus;
    let mut values = prof.eta;
    taus.reverse();
    values.reverse();
    Ok(EtaLimit {
        verdict: LimitVerdict::of_tail(*values.last().unwrap()),
        taus,
        values,
        band: LIMIT_BAND,
    })
}

/// `η*(B, t) = sup{h/η(B,h) : 0 < h ≤ t}` on `nodes`, with the underlying profile.
pub fn eta_star_with_profile(
    b: &SubspaceSample,
    nodes: &[f64],
    cfg: &SearchConfig,
) -> Result<(MonotoneFn, EtaProfile, InvolutionDiagnostics)> {
    let prof = eta_profile(b, nodes, cfg)?;
    let eta = MonotoneFn::new(prof.taus.clone(), prof.eta.clone())?;
    let (star, diag) = involution_general_with_diagnostics(&eta)?;
    Ok((star, prof, diag))
}

pub fn eta_star(b: &SubspaceSample, nodes: &[f64], cfg: &SearchConfig) -> Result<MonotoneFn> {
    eta_star_with_profile(b, nodes, cfg).map(|r| r.0)
}

/// `M(ψ)` with `ψ = (η*)*`, the computable surrogate of the boundary space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundarySpace {
    pub space: SpaceSpec,
    pub eta_star: MonotoneFn,
    pub profile: EtaProfile,
    /// `‖x‖_{M(ψ)}/‖x‖₁` for each stored witness.
    pub witness_ratios: Vec<f64>,
    /// Largest `|φ_{M(ψ)}(τ) − η*(τ)|` over the search nodes.
    pub fundamental_gap: f64,
    pub witness_ok: bool,
}

/// `ψ` is sampled on every cell boundary from the cross-maximum of the search
/// witnesses, so the Marcinkiewicz norm of each witness is checked exactly.
pub fn boundary_space(b: &SubspaceSample, nodes: &[f64], cfg: &SearchConfig) -> Result<BoundarySpace> {
    let (star, profile, _) = eta_star_with_profile(b, nodes, cfg)?;
    let n = b.n_cells();
    let mut dense_nodes: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    dense_nodes.extend_from_slice(&profile.taus);
    dense_nodes.sort_by(f64::total_cmp);
    dense_nodes.dedup();
    let mut dense = profile.witness_curve(b, &dense_nodes)?;
    dense[0] = 0.0;
    *dense.last_mut().unwrap() = 1.0;
    let eta_dense = MonotoneFn::new(dense_nodes, dense)?;
    let (star_dense, _) = involution_general_with_diagnostics(&eta_dense)?;
    let (psi, _) = involution_general_with_diagnostics(&star_dense)?;
    let space = SpaceSpec::marcinkiewicz(MFunction::new(psi)?, false);

    let mut witness_ratios = Vec::with_capacity(profile.coeffs.len());
    for c in &profile.coeffs {
        let x = b.combine(c)?;
        witness_ratios.push(space.norm(&x)? / x.l1_norm());
    }
    let mut fundamental_gap = 0.0_f64;
    for (&t, &s) in star.nodes().iter().zip(star.values()) {
        fundamental_gap = fundamental_gap.max((space.fundamental_function(t)? - s).abs());
    }
    let witness_ok = witness_ratios.iter().all(|&r| r <= 1.0 + cfg.tol.max(1e-9));
    Ok(BoundarySpace {
        space,
        eta_star: star,
        profile,
        witness_ratios,
        fundamental_gap,
        witness_ok,
    })
}
