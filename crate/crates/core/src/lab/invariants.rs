use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::eta_bound::experiment_search;
use super::{Comparison, ExperimentReport};
use crate::envelopes::{standard_nodes, MFunction};
use crate::error::Result;
use crate::generators::nested_tail_sequence;
use crate::grid::GridFunction;
use crate::rng::{substream, LabRng};
use crate::spaces::{Profile, SpaceSpec};
use crate::subspaces::appendix::{in_m_epsilon, s_epsilon_set, tail_ratio};
use crate::subspaces::{eta_in_mediant, eta_in_space, eta, eta_profile, HeadNorm, SubspaceSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantGroup {
    /// Indicator norms against closed forms.
    Fundamental,
    /// `L₁ ≤ E ≤ L∞` and `M(t^{1/q}) ≤ L_p ≤ Λ(t^{1/p})`.
    Sandwich,
    /// Head integrals against exhaustive subset maxima.
    HardyLittlewood,
    /// Symmetry, lattice monotonicity and the triangle inequality.
    NormAxioms,
    /// Level-set bounds on random functions.
    Appendix,
    /// Truncations of `t^{-1/2}` in `M(√t)`.
    NestedTail,
    /// Profile bounds, finite families in `L_p`, the renormed mediant bound.
    Growth,
}

impl InvariantGroup {
    pub const ALL: [InvariantGroup; 7] = [
        InvariantGroup::Fundamental,
        InvariantGroup::Sandwich,
        InvariantGroup::HardyLittlewood,
        InvariantGroup::NormAxioms,
        InvariantGroup::Appendix,
        InvariantGroup::NestedTail,
        InvariantGroup::Growth,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InvariantConfig {
    pub seed: u64,
    pub groups: Vec<InvariantGroup>,
    pub exponents: Vec<f64>,
    pub n_functions: usize,
    pub n_cells: usize,
    /// Largest grid for the exhaustive subset check.
    pub brute_force_cells: usize,
    pub appendix_cases: usize,
    pub nested_tail_len: usize,
    pub growth_families: usize,
    /// Relative slack for inequalities between independently rounded quantities.
    pub slack: f64,
}

impl Default for InvariantConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            groups: InvariantGroup::ALL.to_vec(),
            exponents: vec![1.25, 1.5, 2.0, 3.0],
            n_functions: 1000,
            n_cells: 64,
            brute_force_cells: 12,
            appendix_cases: 500,
            nested_tail_len: 8,
            growth_families: 8,
            slack: 1e-10,
        }
    }
}

impl InvariantConfig {
    pub fn only(groups: &[InvariantGroup]) -> Self {
        Self {
            groups: groups.to_vec(),
            ..Self::default()
        }
    }
}

/// Counts violations of one invariant and remembers the first.
struct Tally {
    name: &'static str,
    cases: usize,
    violations: usize,
    first: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self { name, cases: 0, violations: 0, first: None }
    }

    fn record(&mut self, ok: bool, context: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.violations += 1;
            if self.first.is_none() {
                self.first = Some(context());
            }
        }
    }

    fn emit(self, r: &mut ExperimentReport, min_cases: usize) {
        r.check(&format!("{}_violations", self.name), self.violations as f64, Comparison::AtMost, 0.0);
        r.check(&format!("{}_cases", self.name), self.cases as f64, Comparison::AtLeast, min_cases as f64);
        if let Some(f) = self.first {
            r.note(format!("{}: first violation {f}", self.name));
        }
    }
}

/// A mix of flat, heavy-tailed, sparse and piecewise-constant shapes.
fn random_function(rng: &mut LabRng, n_cells: usize) -> GridFunction {
    loop {
        let shape = rng.gen_range(0..4);
        let a: f64 = rng.gen_range(0.05..0.95);
        let values: Vec<f64> = match shape {
            0 => (0..n_cells).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            1 => (0..n_cells)
                .map(|_| {
                    let u: f64 = rng.gen_range(1e-6..1.0);
                    let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    s * u.powf(-a)
                })
                .collect(),
            2 => (0..n_cells)
                .map(|_| if rng.gen_bool(a * 0.3) { rng.gen_range(-10.0..10.0) } else { 0.0 })
                .collect(),
            _ => {
                let levels: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
                (0..n_cells).map(|j| levels[4 * j / n_cells] + 0.01 * rng.gen_range(-1.0..1.0)).collect()
            }
        };
        if values.iter().any(|&v| v != 0.0) {
            return GridFunction::new(values).expect("finite values");
        }
    }
}

/// Spaces exercised by the randomized checks, all on uniform nodes of the grid.
fn test_spaces(n_cells: usize, exponents: &[f64]) -> Result<Vec<SpaceSpec>> {
    let nodes = standard_nodes(0, n_cells);
    let mut out = vec![SpaceSpec::l1(), SpaceSpec::orlicz_exp_square(false)];
    for &p in exponents {
        out.push(SpaceSpec::lp(p)?);
        out.push(SpaceSpec::lorentz(MFunction::power(&nodes, 1.0 / p)?)?);
        out.push(SpaceSpec::marcinkiewicz(MFunction::power(&nodes, 1.0 / p)?, false));
    }
    Ok(out)
}

fn le(a: f64, b: f64, slack: f64) -> bool {
    a <= b + slack * b.abs().max(1.0)
}

fn fundamental(r: &mut ExperimentReport, cfg: &InvariantConfig) -> Result<()> {
    let nodes = standard_nodes(10, 0);
    let mut lorentz = Tally::new("lorentz_indicator");
    let mut marc = Tally::new("marcinkiewicz_indicator");
    let mut orlicz = Tally::new("orlicz_indicator");
    let mut worst = [0.0_f64; 3];
    for &p in &cfg.exponents {
        let phi = MFunction::power(&nodes, 1.0 / p)?;
        let l = SpaceSpec::lorentz(phi.clone())?;
        let m = SpaceSpec::marcinkiewicz(phi, false);
        for k in 1..=10 {
            let t = 0.5f64.powi(k);
            let closed = t.powf(1.0 / p);
            let dl = (l.fundamental_function(t)? - closed).abs();
            let dm = (m.fundamental_function(t)? - t / closed).abs();
            worst[0] = worst[0].max(dl);
            worst[1] = worst[1].max(dm);
            lorentz.record(dl <= 1e-12, || format!("p={p} tau={t} dev={dl}"));
            marc.record(dm <= 1e-9, || format!("p={p} tau={t} dev={dm}"));
        }
    }
    let o = SpaceSpec::orlicz_exp_square(false);
    for k in 1..=10 {
        let t = 0.5f64.powi(k);
        let d = (o.fundamental_function(t)? - (1.0 / t).ln_1p().powf(-0.5)).abs();
        worst[2] = worst[2].max(d);
        orlicz.record(d <= 1e-9, || format!("tau={t} dev={d}"));
    }
    let n = cfg.exponents.len() * 10;
    lorentz.emit(r, n);
    marc.emit(r, n);
    orlicz.emit(r, 10);
    r.fit("lorentz_indicator_max_dev", worst[0], 0.0);
    r.fit("marcinkiewicz_indicator_max_dev", worst[1], 0.0);
    r.fit("orlicz_indicator_max_dev", worst[2], 0.0);
    Ok(())
}

fn sandwich(r: &mut ExperimentReport, cfg: &InvariantConfig) -> Result<()> {
    let nodes = standard_nodes(0, cfg.n_cells);
    let mut minimal = Tally::new("minimal_maximal_sandwich");
    let mut extremal = Tally::new("extremal_sandwich");
    let spaces = test_spaces(cfg.n_cells, &cfg.exponents)?;
    let extremes = cfg
        .exponents
        .iter()
        .map(|&p| {
            Ok((
                p,
                SpaceSpec::marcinkiewicz(MFunction::power(&nodes, 1.0 - 1.0 / p)?, false),
                SpaceSpec::lp(p)?,
                SpaceSpec::lorentz(MFunction::power(&nodes, 1.0 / p)?)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    for i in 0..cfg.n_functions {
        let mut rng = substream(cfg.seed, i as u64);
        let x = random_function(&mut rng, cfg.n_cells);
        let (l1, linf) = (x.l1_norm(), x.linf_norm());
        for s in &spaces {
            let v = s.normalized_norm(&x)?;
            minimal.record(le(l1, v, cfg.slack) && le(v, linf, cfg.slack), || {
                format!("seed={} case={i} space={} {l1} ≤ {v} ≤ {linf}", cfg.seed, s.label())
            });
        }
        for (p, m, lp, lo) in &extremes {
            let (a, b, c) = (m.norm(&x)?, lp.norm(&x)?, lo.norm(&x)?);
            extremal.record(le(a, b, cfg.slack) && le(b, c, cfg.slack), || {
                format!("seed={} case={i} p={p}: {a} ≤ {b} ≤ {c}", cfg.seed)
            });
        }
    }
    minimal.emit(r, cfg.n_functions);
    extremal.emit(r, cfg.n_functions * cfg.exponents.len());
    Ok(())
}

/// Integer values keep every subset sum exact, so agreement is bitwise.
fn hardy_littlewood(r: &mut ExperimentReport, cfg: &InvariantConfig) -> Result<()> {
    let mut tally = Tally::new("hardy_littlewood");
    for n in 1..=cfg.brute_force_cells {
        let mut rng = substream(cfg.seed ^ 0x484c, n as u64);
        let x = GridFunction::new((0..n).map(|_| rng.gen_range(-1000i32..=1000) as f64).collect())?;
        let mut best = vec![f64::NEG_INFINITY; n + 1];
        for mask in 0u32..(1 << n) {
            let k = mask.count_ones() as usize;
            let s: f64 = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| x.values()[j].abs()).sum();
            best[k] = best[k].max(s);
        }
        for (k, &b) in best.iter().enumerate() {
            let h = x.head_integral(k as f64 / n as f64)?;
            let oracle = b / n as f64;
            tally.record(h == oracle, || format!("n={n} k={k}: {h} vs {oracle}"));
        }
    }
    let cases = (1..=cfg.brute_force_cells).map(|n| n + 1).sum();
    tally.emit(r, cases);
    Ok(())
}

fn norm_axioms(r: &mut ExperimentReport, cfg: &InvariantConfig) -> Result<()> {
    let spaces = test_spaces(cfg.n_cells, &cfg.exponents)?;
    let mut symmetry = Tally::new("symmetry");
    let mut lattice = Tally::new("lattice_monotonicity");
    let mut triangle = Tally::new("triangle");
    let cases = (cfg.n_functions / 5).max(1);
    for i in 0..cases {
        let mut rng = substream(cfg.seed ^ 0x4e41, i as u64);
        let x = random_function(&mut rng, cfg.n_cells);
        let y = random_function(&mut rng, cfg.n_cells);
        let mut perm = x.values().to_vec();
        perm.shuffle(&mut rng);
        let perm = GridFunction::new(perm)?;
        let damp = GridFunction::new(x.values().iter().map(|v| v * rng.gen_range(0.0..=1.0)).collect())?;
        let sum = x.add(&y)?;
        for s in &spaces {
            let (nx, ny) = (s.norm(&x)?, s.norm(&y)?);
            let np = s.norm(&perm)?;
            symmetry.record((nx - np).abs() <= 1e-12 * nx.max(1.0), || {
                format!("seed={} case={i} {}: {nx} vs {np}", cfg.seed, s.label())
            });
            let nd = s.norm(&damp)?;
            lattice.record(le(nd, nx, cfg.slack), || {
                format!("seed={} case={i} {}: {nd} > {nx}", cfg.seed, s.label())
            });
            let ns = s.norm(&sum)?;
            triangle.record(le(ns, nx + ny, cfg.slack), || {
                format!("seed={} case={i} {}: {ns} > {nx} + {ny}", cfg.seed, s.label())
            });
        }
    }
    let n = cases * spaces.len();
    symmetry.emit(r, n);
    lattice.emit(r, n);
    triangle.emit(r, n);
    Ok(())
}

/// Level-set bounds with `φ_E(1) = 1`:
/// `x ∉ M_ε ⇒ ‖x*χ_[0,ε]‖ ≥ (1−ε)‖x‖`;
/// `x ∈ M_ε ⇒ ‖xχ_e‖ ≥ εφ_E(ε/2)‖x‖` for `mes e ≥ 1−ε/2`;
/// `x ∈ M_ε ⇒ ‖x‖₁ ≥ ε²‖x‖`;
/// `mes S_ε ≤ ε ⇒ ‖x‖₁ ≤ (φ_{E′}(ε)+ε)‖x‖`.
fn appendix(r: &mut ExperimentReport, cfg: &InvariantConfig) -> Result<()> {
    let spaces = test_spaces(cfg.n_cells, &cfg.exponents)?;
    let mut head = Tally::new("top_set_head_bound");
    let mut tail = Tally::new("m_epsilon_tail_bound");
    let mut l1_lower = Tally::new("m_epsilon_l1_lower_bound");
    let mut holder = Tally::new("small_level_set_l1_upper_bound");
    let target = cfg.appendix_cases;
    let mut i = 0u64;
    while [&head, &tail, &l1_lower, &holder].iter().any(|t| t.cases < target) && i < 200 * target as u64 {
        let mut rng = substream(cfg.seed ^ 0x4150, i);
        i += 1;
        let x = random_function(&mut rng, cfg.n_cells);
        let space = &spaces[rng.gen_range(0..spaces.len())];
        let eps: f64 = rng.gen_range(0.02..0.9);
        let norm = space.normalized_norm(&x)?;
        let c = space.norming_constant()?;
        let ctx = |what: &str, a: f64, b: f64| {
            format!("seed={} case={} {} eps={eps}: {what} {a} vs {b}", cfg.seed, i - 1, space.label())
        };
        if in_m_epsilon(&x, eps, space)? {
            if tail.cases < target {
                let lhs = tail_ratio(&x, space, eps / 2.0)?;
                let rhs = eps * space.fundamental_function(eps / 2.0)? / c;
                tail.record(le(rhs, lhs, cfg.slack), || ctx("tail", lhs, rhs));
            }
            if l1_lower.cases < target {
                let l1 = x.l1_norm();
                l1_lower.record(le(eps * eps * norm, l1, cfg.slack), || ctx("l1", l1, eps * eps * norm));
            }
        } else if head.cases < target {
            let lhs = space.normalized_norm_profile(&Profile::of(&x).truncate(eps))?;
            head.record(le((1.0 - eps) * norm, lhs, cfg.slack), || ctx("head", lhs, (1.0 - eps) * norm));
        }
        let dual_known = !matches!(space, SpaceSpec::Orlicz { .. });
        if dual_known && holder.cases < target && s_epsilon_set(&x, eps, space)?.measure() <= eps {
            let phi_dual = eps / (space.fundamental_function(eps)? / c);
            let l1 = x.l1_norm();
            let rhs = (phi_dual + eps) * norm;
            holder.record(le(l1, rhs, cfg.slack), || ctx("holder", l1, rhs));
        }
    }
    for t in [head, tail, l1_lower, holder] {
        t.emit(r, target);
    }
    Ok(())
}

fn nested_tail(r: &mut ExperimentReport, cfg: &InvariantConfig) -> Result<()> {
    let n_cells = 1usize << (2 * cfg.nested_tail_len);
    let seq = nested_tail_sequence(cfg.nested_tail_len, n_cells)?;
    let m = SpaceSpec::marcinkiewicz(MFunction::power(&standard_nodes(0, n_cells), 0.5)?, false);
    let l1: Vec<f64> = seq.iter().map(GridFunction::l1_norm).collect();
    let mn = seq.iter().map(|x| m.norm(x)).collect::<Result<Vec<_>>>()?;
    let ks: Vec<f64> = (1..=seq.len()).map(|k| k as f64).collect();
    r.curve("nested_tail_l1", "k", ks.clone(), l1.clone());
    r.curve("nested_tail_marcinkiewicz", "k", ks, mn.clone());
    let max_step = l1.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    r.check("nested_tail_l1_max_increment", max_step, Comparison::Below, 0.0);
    r.check("nested_tail_l1_final_over_initial", l1[l1.len() - 1] / l1[0], Comparison::Below, 0.02);
    let min_m = mn.iter().copied().fold(f64::INFINITY, f64::min);
    r.check("nested_tail_marcinkiewicz_min_over_initial", min_m / mn[0], Comparison::AtLeast, 0.9);
    Ok(())
}

fn random_span(rng: &mut LabRng, dim: usize, n_cells: usize) -> Result<SubspaceSample> {
    let gens = (0..dim).map(|_| random_function(rng, n_cells)).collect();
    SubspaceSample::new(gens, "random")
}

fn growth(r: &mut ExperimentReport, cfg: &InvariantConfig) -> Result<()> {
    let search = experiment_search(cfg.seed);
    let nodes = standard_nodes(0, 256);
    let taus = [0.0, 1.0 / 64.0, 0.125, 0.5, 1.0];
    let mut bounds = Tally::new("eta_profile_bounds");
    let mut mediant = Tally::new("mediant_bound");
    let mut halving_gap = 0.0_f64;
    for i in 0..cfg.growth_families {
        let mut rng = substream(cfg.seed ^ 0x4757, i as u64);
        let dim = rng.gen_range(1..=3);
        let span = random_span(&mut rng, dim, 256)?;
        let prof = eta_profile(&span, &taus, &search)?;
        let v = prof.bound_violations(1e-12);
        bounds.record(v.is_empty(), || format!("seed={} family={i}: {}", cfg.seed, v.join("; ")));

        let space = if i % 2 == 0 {
            SpaceSpec::lp(2.0)?
        } else {
            SpaceSpec::lorentz(MFunction::power(&nodes, 0.5)?)?
        };
        let tau = 0.125;
        let med = eta_in_mediant(&span, tau, &space, &search)?;
        let e = eta_in_space(&span, tau, &space, &search)?;
        let l = eta(&span, tau, &search)?;
        // the mediant witness is also a candidate in E and in L₁
        let w = Profile::of(&span.combine(&med.coeffs)?);
        let e_val = e.value.max(HeadNorm::Space(space.clone()).ratio(&w, tau));
        let l_val = l.value.max(HeadNorm::Space(SpaceSpec::l1()).ratio(&w, tau));
        mediant.record(le(med.value, e_val.max(l_val), 1e-12), || {
            format!("seed={} family={i}: {} > max({e_val}, {l_val})", cfg.seed, med.value)
        });
        halving_gap = halving_gap.max((med.value - 0.5 * (e_val + l_val)).abs());
    }
    bounds.emit(r, cfg.growth_families);
    mediant.emit(r, cfg.growth_families);
    r.report_only("mediant_halving_gap", halving_gap, Comparison::AtMost, 1e-6);

    // finite families in L_p have η_{L_p}(K, τ) → 0
    let n_cells = 1 << 12;
    let tail_taus: Vec<f64> = (4..=12).map(|k| 0.5f64.powi(k)).collect();
    for (j, p) in [1.5, 2.0].into_iter().enumerate() {
        let mut rng = substream(cfg.seed ^ 0x5431, j as u64);
        let gens = (0..3)
            .map(|_| GridFunction::new((0..n_cells).map(|_| rng.gen_range(-1.0..1.0)).collect()))
            .collect::<Result<Vec<_>>>()?;
        let span = SubspaceSample::new(gens, "bounded")?;
        let lp = SpaceSpec::lp(p)?;
        let values = tail_taus
            .iter()
            .map(|&t| eta_in_space(&span, t, &lp, &search).map(|e| e.value))
            .collect::<Result<Vec<_>>>()?;
        r.check(&format!("finite_family_l{p}_tail"), values[values.len() - 1], Comparison::Below, 0.05);
        r.curve(&format!("finite_family_l{p}_eta"), "tau", tail_taus.clone(), values);
    }
    Ok(())
}

/// Randomized checks of every structural invariant; zero violations required.
pub fn invariant_suite(cfg: &InvariantConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    let mut r = ExperimentReport::new("invariants", cfg);
    for g in &cfg.groups {
        match g {
            InvariantGroup::Fundamental => fundamental(&mut r, cfg)?,
            InvariantGroup::Sandwich => sandwich(&mut r, cfg)?,
            InvariantGroup::HardyLittlewood => hardy_littlewood(&mut r, cfg)?,
            InvariantGroup::NormAxioms => norm_axioms(&mut r, cfg)?,
            InvariantGroup::Appendix => appendix(&mut r, cfg)?,
            InvariantGroup::NestedTail => nested_tail(&mut r, cfg)?,
            InvariantGroup::Growth => growth(&mut r, cfg)?,
        }
    }
    Ok(r.finish(started))
}
