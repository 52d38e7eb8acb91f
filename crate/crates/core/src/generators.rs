//! Concrete function systems: Rademacher functions, symmetric stable families,
//! the weighted Rademacher system, disjoint blocks and the nested-tail sequence.

use rand::distributions::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::grid::{cells_for_measure, GridFunction};
use crate::rng::{substream, LabRng};
use crate::subspaces::SubspaceSample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    pub n_cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Rademacher { n: usize },
    StableFamily { p: f64, n: usize, seed: u64 },
    WeightedRademacher { p: f64, r: f64, n: usize },
    DisjointBlocks { n: usize },
    NestedTail { n: usize },
    Indicator { tau: f64 },
}

impl GeneratorSpec {
    pub fn new(family: Family, n_cells: usize) -> Self {
        Self { family, n_cells }
    }

    pub fn build(&self) -> Result<SubspaceSample> {
        let n_cells = self.n_cells;
        match self.family {
            Family::Rademacher { n } => rademacher_system(n, n_cells),
            Family::StableFamily { p, n, seed } => stable_family(p, n, seed, n_cells),
            Family::WeightedRademacher { p, r, n } => weighted_rademacher(p, r, n, n_cells),
            Family::DisjointBlocks { n } => disjoint_blocks(n, n_cells),
            Family::NestedTail { n } => {
                SubspaceSample::new(nested_tail_sequence(n, n_cells)?, format!("nested_tail({n})"))
            }
            Family::Indicator { tau } => SubspaceSample::new(
                vec![GridFunction::indicator_head(n_cells, tau)?],
                format!("indicator({tau})"),
            ),
        }
    }

    /// Generators in the grid CSV format, one block per generator separated by a blank line.
    pub fn to_csv(&self) -> Result<String> {
        let sample = self.build()?;
        Ok(sample
            .generators()
            .iter()
            .map(GridFunction::to_csv)
            .collect::<Vec<_>>()
            .join("\n"))
    }
}

fn check_dyadic(k: usize, n_cells: usize) -> Result<()> {
    if k >= usize::BITS as usize || n_cells % (1usize << k) != 0 {
        return Err(domain(format!("{n_cells} cells not divisible by 2^{k}")));
    }
    Ok(())
}

/// `r_k`: `+1` on even dyadic blocks of rank `k`, `-1` on odd ones.
pub fn rademacher(k: usize, n_cells: usize) -> Result<GridFunction> {
    if k == 0 {
        return Err(domain("Rademacher index starts at 1"));
    }
    check_dyadic(k, n_cells)?;
    let block = n_cells >> k;
    GridFunction::from_fn(n_cells, |j| if (j / block) % 2 == 0 { 1.0 } else { -1.0 })
}

/// `{r_1, …, r_n}`.
pub fn rademacher_system(n: usize, n_cells: usize) -> Result<SubspaceSample> {
    check_dyadic(n, n_cells)?;
    let gens = (1..=n)
        .map(|k| rademacher(k, n_cells))
        .collect::<Result<Vec<_>>>()?;
    SubspaceSample::new(gens, format!("rademacher({n})"))
}

/// Chambers–Mallows–Stuck sampler for the symmetric law with characteristic
/// function `exp(-|t|^α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableSampler {
    alpha: f64,
    one_minus_over_alpha: f64,
    inv_alpha: f64,
}

impl StableSampler {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(domain(format!("stability index {alpha} outside (1,2)")));
        }
        Ok(Self {
            alpha,
            one_minus_over_alpha: (1.0 - alpha) / alpha,
            inv_alpha: 1.0 / alpha,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        let e: f64 = rng.sample(Open01);
        let v = std::f64::consts::PI * (u - 0.5);
        let ln_w = (-e.ln()).ln();
        let c2 = ((1.0 - self.alpha) * v).cos();
        (self.alpha * v).sin()
            * (self.one_minus_over_alpha * (c2.ln() - ln_w) - self.inv_alpha * v.cos().ln()).exp()
    }

    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for o in out {
            *o = self.sample(rng);
        }
    }
}

/// Cell values of the `index`-th function of the stable family seeded by `seed`.
pub fn stable_values(p: f64, seed: u64, index: usize, n_cells: usize) -> Result<Vec<f64>> {
    let sampler = StableSampler::new(p)?;
    let mut rng: LabRng = substream(seed, index as u64);
    let mut out = vec![0.0; n_cells];
    sampler.fill(&mut rng, &mut out);
    Ok(out)
}

/// `n` independent functions with i.i.d. standard symmetric `p`-stable cell values.
pub fn stable_family(p: f64, n: usize, seed: u64, n_cells: usize) -> Result<SubspaceSample> {
    if n == 0 || n_cells == 0 {
        return Err(domain("stable family needs n ≥ 1 and n_cells ≥ 1"));
    }
    let gens = (0..n)
        .map(|m| GridFunction::new(stable_values(p, seed, m, n_cells)?))
        .collect::<Result<Vec<_>>>()?;
    SubspaceSample::new(gens, format!("stable(p={p},n={n},seed={seed})"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    NonDecreasing,
    NonIncreasing,
    Neither,
}

impl Monotonicity {
    pub fn of(values: &[f64]) -> Self {
        let up = values.windows(2).all(|w| w[1] >= w[0]);
        let down = values.windows(2).all(|w| w[1] <= w[0]);
        match (up, down) {
            (true, _) => Monotonicity::NonDecreasing,
            (false, true) => Monotonicity::NonIncreasing,
            _ => Monotonicity::Neither,
        }
    }
}

/// Weight `f` with `∫₀^τ f dψ = τ^{1/u}` at every node, `u = (p+r)/2`,
/// `ψ(t) = t·[ln(1+1/t)]^{1/2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferWeight {
    pub p: f64,
    pub r: f64,
    pub u: f64,
    /// One value per cell.
    pub f: Vec<f64>,
    /// Cell sums `Σ_{j<k} f_j Δψ_j` at nodes `k/n_cells`, `k = 0..=n_cells`.
    pub integral: Vec<f64>,
    pub monotonicity: Monotonicity,
}

/// `ψ(t) = t/φ(t)` with `φ(t) = [ln(1+1/t)]^{-1/2}`.
pub fn log_psi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t * (1.0 / t).ln_1p().sqrt()
    }
}

/// `φ(t) = [ln(1+1/t)]^{-1/2}`, the fundamental function of the exponential-square Orlicz space.
pub fn log_phi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (1.0 / t).ln_1p().sqrt().recip()
    }
}

pub fn transfer_weight(p: f64, r: f64, n_cells: usize) -> Result<TransferWeight> {
    if !(1.0 < p && p < r && r < 2.0) {
        return Err(domain(format!("need 1 < p < r < 2, got p={p}, r={r}")));
    }
    if n_cells < 2 {
        return Err(domain("weight needs at least two cells"));
    }
    let u = 0.5 * (p + r);
    let n = n_cells as f64;
    let big_f = |t: f64| t.powf(1.0 / u);
    let mut f = Vec::with_capacity(n_cells);
    let mut integral = Vec::with_capacity(n_cells + 1);
    integral.push(0.0);
    let mut acc = 0.0;
    for k in 0..n_cells {
        let (a, b) = (k as f64 / n, (k + 1) as f64 / n);
        let dpsi = log_psi(b) - log_psi(a);
        let fk = (big_f(b) - big_f(a)) / dpsi;
        if !(fk.is_finite() && fk > 0.0) {
            return Err(Error::Construction(format!("weight not positive on cell {k}")));
        }
        f.push(fk);
        acc += fk * dpsi;
        integral.push(acc);
    }
    for (k, &s) in integral.iter().enumerate().take(n_cells).skip(1) {
        let tau = k as f64 / n;
        let (lo, hi) = (tau.powf(1.0 / p), tau.powf(1.0 / r));
        if !(lo < s && s < hi) {
            return Err(Error::Construction(format!(
                "sandwich {lo} < {s} < {hi} violated at node {tau}"
            )));
        }
    }
    let monotonicity = Monotonicity::of(&f);
    Ok(TransferWeight {
        p,
        r,
        u,
        f,
        integral,
        monotonicity,
    })
}

/// `{f·r_k : k = 1..n}`.
pub fn weighted_rademacher(p: f64, r: f64, n: usize, n_cells: usize) -> Result<SubspaceSample> {
    check_dyadic(n, n_cells)?;
    let w = transfer_weight(p, r, n_cells)?;
    let weight = GridFunction::new(w.f)?;
    let gens = (1..=n)
        .map(|k| weight.mul(&rademacher(k, n_cells)?))
        .collect::<Result<Vec<_>>>()?;
    SubspaceSample::new(gens, format!("weighted_rademacher(p={p},r={r},n={n})"))
}

/// Indicators of `n` consecutive blocks of (nearly) equal size, each with unit `L₁` norm.
pub fn disjoint_blocks(n: usize, n_cells: usize) -> Result<SubspaceSample> {
    if n == 0 || n > n_cells {
        return Err(domain(format!("cannot cut {n_cells} cells into {n} blocks")));
    }
    let gens = (0..n)
        .map(|k| {
            let (a, b) = (k * n_cells / n, (k + 1) * n_cells / n);
            let height = n_cells as f64 / (b - a) as f64;
            GridFunction::from_fn(n_cells, |j| if (a..b).contains(&j) { height } else { 0.0 })
        })
        .collect::<Result<Vec<_>>>()?;
    SubspaceSample::new(gens, format!("disjoint_blocks({n})"))
}

/// Cell averages of `t^{-1/2}`; their Marcinkiewicz ratio against `√t` is exactly 2 at every cell boundary.
pub fn inverse_sqrt_profile(n_cells: usize) -> Result<GridFunction> {
    let scale = 2.0 * (n_cells as f64).sqrt();
    GridFunction::from_fn(n_cells, |j| {
        scale * ((j + 1) as f64).sqrt() - scale * (j as f64).sqrt()
    })
}

/// `x_k = x·χ_[0,4^{-k}]`, `k = 1..n`, with `x* = t^{-1/2}` in cell-average form.
pub fn nested_tail_sequence(n: usize, n_cells: usize) -> Result<Vec<GridFunction>> {
    if n == 0 {
        return Err(domain("nested tail needs n ≥ 1"));
    }
    let x = inverse_sqrt_profile(n_cells)?;
    (1..=n)
        .map(|k| {
            let tau = 0.25f64.powi(k as i32);
            let cells = cells_for_measure(n_cells, tau)
                .ok()
                .filter(|&c| c > 0)
                .ok_or_else(|| domain(format!("4^-{k} is below the resolution of {n_cells} cells")))?;
            GridFunction::from_fn(n_cells, |j| if j < cells { x.values()[j] } else { 0.0 })
        })
        .collect()
}
