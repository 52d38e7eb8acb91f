use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{degenerate, domain, Result};
use crate::grid::{head_integral_select, sort_desc};
use crate::rng::substream;
use crate::spaces::{Profile, SpaceSpec};
use crate::subspaces::SubspaceSample;

const INITIAL_STEP: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub n_restarts: usize,
    pub refine_steps: usize,
    pub step_decay: f64,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            n_restarts: 512,
            refine_steps: 200,
            step_decay: 0.9,
            seed: 0,
            tol: 1e-9,
        }
    }
}

impl SearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.refine_steps == 0 {
            return Err(domain("refine_steps must be positive"));
        }
        if !(self.step_decay > 0.0 && self.step_decay < 1.0) {
            return Err(domain(format!("step_decay {} outside (0,1)", self.step_decay)));
        }
        if !(self.tol > 0.0) {
            return Err(domain(format!("tol {} must be positive", self.tol)));
        }
        Ok(())
    }
}

/// Scale-invariant objective on span elements given by their cell values.
pub(crate) trait Objective: Sync {
    fn eval(&self, x: &[f64], scratch: &mut Vec<f64>) -> f64;
}

/// `∫₀^τ x* / ‖x‖₁`, by selection.
pub(crate) struct L1HeadRatio {
    pub tau: f64,
}

impl Objective for L1HeadRatio {
    fn eval(&self, x: &[f64], scratch: &mut Vec<f64>) -> f64 {
        scratch.clear();
        scratch.extend(x.iter().map(|v| v.abs()));
        let total: f64 = scratch.iter().sum::<f64>() / x.len() as f64;
        if total == 0.0 {
            return f64::NEG_INFINITY;
        }
        head_integral_select(scratch, self.tau) / total
    }
}

/// `‖x*χ_[0,τ]‖_p / ‖x‖_p` for finite `p`, by selection.
pub(crate) struct LpHeadRatio {
    pub tau: f64,
    pub p: f64,
}

impl Objective for LpHeadRatio {
    fn eval(&self, x: &[f64], scratch: &mut Vec<f64>) -> f64 {
        scratch.clear();
        if self.p == 2.0 {
            scratch.extend(x.iter().map(|v| v * v));
        } else {
            scratch.extend(x.iter().map(|v| v.abs().powf(self.p)));
        }
        let total: f64 = scratch.iter().sum::<f64>() / x.len() as f64;
        if total == 0.0 {
            return f64::NEG_INFINITY;
        }
        (head_integral_select(scratch, self.tau) / total).powf(1.0 / self.p)
    }
}

/// `‖x‖_u / ‖x‖₁`, `1 ≤ u < ∞`.
pub(crate) struct LuL1Ratio {
    pub u: f64,
}

impl Objective for LuL1Ratio {
    fn eval(&self, x: &[f64], _scratch: &mut Vec<f64>) -> f64 {
        let n = x.len() as f64;
        let l1: f64 = x.iter().map(|v| v.abs()).sum::<f64>() / n;
        if l1 == 0.0 {
            return f64::NEG_INFINITY;
        }
        let s: f64 = if self.u == 2.0 {
            x.iter().map(|v| v * v).sum()
        } else if self.u == 5.0 {
            x.iter().map(|v| {
                let a = v.abs();
                let a2 = a * a;
                a2 * a2 * a
            })
            .sum()
        } else {
            x.iter().map(|v| v.abs().powf(self.u)).sum()
        };
        (s / n).powf(1.0 / self.u) / l1
    }
}

/// Which norm measures the head and the whole element.
#[derive(Debug, Clone, PartialEq)]
pub enum HeadNorm {
    Space(SpaceSpec),
    /// `(‖x‖_E + ‖x‖₁)/2`.
    Mediant(SpaceSpec),
}

impl HeadNorm {
    pub(crate) fn ratio(&self, prof: &Profile, tau: f64) -> f64 {
        let head = prof.truncate(tau);
        let value = match self {
            HeadNorm::Space(space) => match (space.norm_profile(&head), space.norm_profile(prof)) {
                (Ok(a), Ok(b)) => a / b,
                _ => f64::NAN,
            },
            HeadNorm::Mediant(space) => {
                match (space.norm_profile(&head), space.norm_profile(prof)) {
                    (Ok(a), Ok(b)) => {
                        (a + head.head_integral(1.0)) / (b + prof.head_integral(1.0))
                    }
                    _ => f64::NAN,
                }
            }
        };
        if value.is_finite() {
            value
        } else {
            f64::NEG_INFINITY
        }
    }
}

pub(crate) struct NormHeadRatio<'a> {
    pub norm: &'a HeadNorm,
    pub tau: f64,
}

impl Objective for NormHeadRatio<'_> {
    fn eval(&self, x: &[f64], scratch: &mut Vec<f64>) -> f64 {
        scratch.clear();
        scratch.extend(x.iter().map(|v| v.abs()));
        if scratch.iter().all(|&v| v == 0.0) {
            return f64::NEG_INFINITY;
        }
        sort_desc(scratch);
        self.norm.ratio(&Profile::from_sorted(scratch.clone()), self.tau)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub value: f64,
    pub coeffs: Vec<f64>,
    /// Final value of every restart, in start order.
    pub restart_values: Vec<f64>,
    /// Best minus worst restart value.
    pub spread: f64,
    /// Restarts ending within `tol` of the best value.
    pub hits: usize,
}

/// Multistart hill climbing over coefficient vectors.
///
/// Starts are the warm starts, the basis vectors, the all-ones vector and
/// `n_restarts` Gaussian directions; start `i` draws from substream `(seed, i)`.
pub(crate) fn maximize(
    sample: &SubspaceSample,
    obj: &dyn Objective,
    cfg: &SearchConfig,
    warm: &[Vec<f64>],
) -> Result<SearchOutcome> {
    cfg.validate()?;
    let d = sample.dim();
    let mut starts: Vec<Option<Vec<f64>>> = warm
        .iter()
        .filter(|c| c.len() == d && c.iter().any(|&v| v != 0.0))
        .cloned()
        .map(Some)
        .collect();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        starts.push(Some(e));
    }
    if d > 1 {
        starts.push(Some(vec![1.0; d]));
    }
    starts.extend(std::iter::repeat(None).take(if d > 1 { cfg.n_restarts } else { 0 }));

    let results: Vec<(f64, Vec<f64>)> = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, start)| {
            let mut rng = substream(cfg.seed, i as u64);
            let c0 = start.unwrap_or_else(|| gaussian(&mut rng, d));
            climb(sample, obj, cfg, c0, &mut rng)
        })
        .collect();

    let (best_idx, best) = results
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, (v, _))| {
            if *v > bv {
                (i, *v)
            } else {
                (bi, bv)
            }
        });
    if !best.is_finite() {
        return Err(degenerate("span evaluates to zero in every search direction"));
    }
    let restart_values: Vec<f64> = results.iter().map(|r| r.0).collect();
    let worst = restart_values
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::INFINITY, f64::min);
    let hits = restart_values.iter().filter(|&&v| best - v <= cfg.tol).count();
    Ok(SearchOutcome {
        value: best,
        coeffs: results[best_idx].1.clone(),
        spread: best - worst,
        hits,
        restart_values,
    })
}

fn gaussian<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        if v.iter().any(|&x| x != 0.0) {
            return v;
        }
    }
}

fn climb<R: Rng>(
    sample: &SubspaceSample,
    obj: &dyn Objective,
    cfg: &SearchConfig,
    mut c: Vec<f64>,
    rng: &mut R,
) -> (f64, Vec<f64>) {
    let gens = sample.generators();
    let d = c.len();
    let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    c.iter_mut().for_each(|v| *v /= norm);
    let mut x = sample.combine_values(&c).expect("coefficient length matches span");
    let mut scratch = Vec::with_capacity(x.len());
    let mut trial = vec![0.0; x.len()];
    let mut f = obj.eval(&x, &mut scratch);
    let mut step = INITIAL_STEP;

    for _ in 0..cfg.refine_steps {
        let mut improved = false;
        for i in 0..d {
            for sign in [1.0, -1.0] {
                let delta = sign * step;
                for ((t, &xv), &g) in trial.iter_mut().zip(&x).zip(gens[i].values()) {
                    *t = xv + delta * g;
                }
                let ft = obj.eval(&trial, &mut scratch);
                if ft > f {
                    c[i] += delta;
                    std::mem::swap(&mut x, &mut trial);
                    f = ft;
                    improved = true;
                    break;
                }
            }
        }
        if d > 1 {
            let dir = gaussian(rng, d);
            let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            let dir: Vec<f64> = dir.iter().map(|v| step * v / len).collect();
            trial.copy_from_slice(&x);
            for (g, &a) in gens.iter().zip(&dir) {
                for (t, &gv) in trial.iter_mut().zip(g.values()) {
                    *t += a * gv;
                }
            }
            let ft = obj.eval(&trial, &mut scratch);
            if ft > f {
                c.iter_mut().zip(&dir).for_each(|(ci, a)| *ci += a);
                std::mem::swap(&mut x, &mut trial);
                f = ft;
                improved = true;
            }
        }
        if improved {
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                break;
            }
            c.iter_mut().for_each(|v| *v /= norm);
            x.iter_mut().for_each(|v| *v /= norm);
        } else {
            step *= cfg.step_decay;
            if step < cfg.tol {
                break;
            }
        }
    }
    // value of the returned witness itself, free of incremental drift
    let x = sample.combine_values(&c).expect("coefficient length matches span");
    (obj.eval(&x, &mut scratch), c)
}
