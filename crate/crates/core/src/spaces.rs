//! Symmetric-space norms evaluated on rearrangements.
//!
//! Every evaluator works on a [`Profile`], the non-increasing rearrangement of a
//! step function stored as pieces of given length. This makes truncations
//! `x*·χ_[0,τ]` exact for any `τ`, including those that split a grid cell.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::envelopes::{MFunction, MonotoneFn};
use crate::error::{degenerate, domain, Error, Result};
use crate::grid::GridFunction;

const LUXEMBURG_REL_TOL: f64 = 1e-13;
const LUXEMBURG_MAX_ITERS: usize = 400;
const CONCAVITY_TOL: f64 = 1e-9;

/// A non-increasing, non-negative step function on `[0, total]`, `total ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    values: Vec<f64>,
    ends: Vec<f64>,
}

impl Profile {
    /// Rearrangement of `x`, one piece per cell.
    pub fn of(x: &GridFunction) -> Self {
        Self::from_sorted(x.sorted_abs_desc())
    }

    /// Cells already sorted non-increasing and non-negative.
    pub fn from_sorted(sorted: Vec<f64>) -> Self {
        let n = sorted.len() as f64;
        let ends = (1..=sorted.len()).map(|k| k as f64 / n).collect();
        Self {
            values: sorted,
            ends,
        }
    }

    /// The single piece `c·χ_[0,τ]`.
    pub fn indicator(tau: f64, c: f64) -> Self {
        if tau <= 0.0 || c == 0.0 {
            return Self {
                values: vec![],
                ends: vec![],
            };
        }
        Self {
            values: vec![c.abs()],
            ends: vec![tau.min(1.0)],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn ends(&self) -> &[f64] {
        &self.ends
    }

    fn starts(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(0.0).chain(self.ends.iter().copied())
    }

    fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values
            .iter()
            .zip(self.starts())
            .zip(&self.ends)
            .map(|((&v, a), &b)| (v, a, b))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `x*·χ_[0,τ]`.
    pub fn truncate(&self, tau: f64) -> Self {
        let mut values = Vec::new();
        let mut ends = Vec::new();
        for (v, a, b) in self.pieces() {
            if a >= tau {
                break;
            }
            values.push(v);
            ends.push(b.min(tau));
        }
        Self { values, ends }
    }

    /// `x*·χ_[δ,1]` shifted to start at 0: the rearrangement of `x` with its
    /// top-`δ` mass removed.
    pub fn remove_head(&self, delta: f64) -> Self {
        let mut values = Vec::new();
        let mut ends = Vec::new();
        for (v, _, b) in self.pieces() {
            if b <= delta {
                continue;
            }
            values.push(v);
            ends.push(b - delta);
        }
        Self { values, ends }
    }

    pub fn head_integral(&self, h: f64) -> f64 {
        let mut sum = 0.0;
        for (v, a, b) in self.pieces() {
            if a >= h {
                break;
            }
            sum += v * (b.min(h) - a);
        }
        sum
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c.abs()).collect(),
            ends: self.ends.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Growth {
    /// `M(u) = exp(u²) − 1`.
    ExpSquare,
}

impl Growth {
    pub fn modular(self, u: f64) -> f64 {
        match self {
            Growth::ExpSquare => (u * u).exp_m1(),
        }
    }

    pub fn inverse(self, y: f64) -> f64 {
        match self {
            Growth::ExpSquare => y.ln_1p().sqrt(),
        }
    }
}

/// Which symmetric norm to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    #[serde(rename = "lp")]
    LebesgueP {
        #[serde(serialize_with = "ser_exponent", deserialize_with = "de_exponent")]
        p: f64,
    },
    Lorentz {
        phi: MFunction,
        #[serde(default)]
        ac_part: bool,
    },
    Marcinkiewicz {
        phi: MFunction,
        #[serde(default)]
        ac_part: bool,
    },
    Orlicz {
        growth: Growth,
        #[serde(default)]
        ac_part: bool,
    },
}

fn ser_exponent<S: Serializer>(p: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if p.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*p)
    }
}

fn de_exponent<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Exp {
        Num(f64),
        Str(String),
    }
    match Exp::deserialize(d)? {
        Exp::Num(p) => Ok(p),
        Exp::Str(s) if s == "inf" || s == "infinity" => Ok(f64::INFINITY),
        Exp::Str(s) => Err(serde::de::Error::custom(format!("bad exponent {s:?}"))),
    }
}

impl SpaceSpec {
    pub fn lp(p: f64) -> Result<Self> {
        let spec = SpaceSpec::LebesgueP { p };
        spec.validate()?;
        Ok(spec)
    }

    pub fn l1() -> Self {
        SpaceSpec::LebesgueP { p: 1.0 }
    }

    pub fn linf() -> Self {
        SpaceSpec::LebesgueP { p: f64::INFINITY }
    }

    pub fn lorentz(phi: MFunction) -> Result<Self> {
        let spec = SpaceSpec::Lorentz {
            phi,
            ac_part: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn marcinkiewicz(phi: MFunction, ac_part: bool) -> Self {
        SpaceSpec::Marcinkiewicz { phi, ac_part }
    }

    pub fn orlicz_exp_square(ac_part: bool) -> Self {
        SpaceSpec::Orlicz {
            growth: Growth::ExpSquare,
            ac_part,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceSpec::LebesgueP { p } => {
                if p.is_nan() || *p < 1.0 {
                    return Err(domain(format!("Lebesgue exponent must be in [1,inf], got {p}")));
                }
            }
            SpaceSpec::Lorentz { phi, .. } => {
                if !phi.is_concave(CONCAVITY_TOL) {
                    return Err(Error::Validation(
                        "Lorentz weight must be concave (non-increasing slopes)".into(),
                    ));
                }
            }
            SpaceSpec::Marcinkiewicz { .. } | SpaceSpec::Orlicz { .. } => {}
        }
        Ok(())
    }

    /// Whether the space is read as its absolutely continuous part `E₀`.
    pub fn is_order_continuous(&self) -> bool {
        match self {
            SpaceSpec::LebesgueP { p } => p.is_finite(),
            SpaceSpec::Lorentz { .. } => true,
            SpaceSpec::Marcinkiewicz { ac_part, .. } | SpaceSpec::Orlicz { ac_part, .. } => {
                *ac_part
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            SpaceSpec::LebesgueP { p } => format!("L_{p}"),
            SpaceSpec::Lorentz { .. } => "Lorentz".into(),
            SpaceSpec::Marcinkiewicz { ac_part, .. } => {
                if *ac_part { "Marcinkiewicz_0" } else { "Marcinkiewicz" }.into()
            }
            SpaceSpec::Orlicz { ac_part, .. } => {
                if *ac_part { "Orlicz_exp_square_0" } else { "Orlicz_exp_square" }.into()
            }
        }
    }

    pub fn norm(&self, x: &GridFunction) -> Result<f64> {
        self.norm_profile(&Profile::of(x))
    }

    pub fn norm_profile(&self, prof: &Profile) -> Result<f64> {
        self.validate()?;
        Ok(match self {
            SpaceSpec::LebesgueP { p } => lp_norm(prof, *p),
            SpaceSpec::Lorentz { phi, .. } => lorentz_norm(prof, phi),
            SpaceSpec::Marcinkiewicz { phi, .. } => marcinkiewicz_norm(prof, phi)?,
            SpaceSpec::Orlicz { growth, .. } => luxemburg_norm(prof, *growth)?,
        })
    }

    /// `‖x*·χ_[0,τ]‖_E`.
    pub fn head_norm(&self, x: &GridFunction, tau: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(domain(format!("tau {tau} outside [0,1]")));
        }
        self.norm_profile(&Profile::of(x).truncate(tau))
    }

    /// `φ_E(τ) = ‖χ_[0,τ]‖_E`.
    pub fn fundamental_function(&self, tau: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(domain(format!("tau {tau} outside [0,1]")));
        }
        self.norm_profile(&Profile::indicator(tau, 1.0))
    }

    /// `φ_E(1)`; equals 1 for every normed space here except the raw Luxemburg norm.
    pub fn norming_constant(&self) -> Result<f64> {
        self.fundamental_function(1.0)
    }

    /// `‖x‖_E/φ_E(1)`, the representative with `φ_E(1) = 1`.
    pub fn normalized_norm_profile(&self, prof: &Profile) -> Result<f64> {
        Ok(self.norm_profile(prof)? / self.norming_constant()?)
    }

    pub fn normalized_norm(&self, x: &GridFunction) -> Result<f64> {
        self.normalized_norm_profile(&Profile::of(x))
    }

    pub fn fundamental_curve(&self, nodes: &[f64]) -> Result<MonotoneFn> {
        let values = nodes
            .iter()
            .map(|&t| self.fundamental_function(t))
            .collect::<Result<Vec<_>>>()?;
        MonotoneFn::new(nodes.to_vec(), values)
    }

    /// `φ_{E′}(t) = t/φ_E(t)` sampled on `nodes`.
    pub fn dual_fundamental(&self, nodes: &[f64]) -> Result<MonotoneFn> {
        let fundamental = self.fundamental_curve(nodes)?;
        if fundamental.values()[1..].iter().any(|&v| v <= 0.0) {
            return Err(degenerate("fundamental function vanishes away from 0"));
        }
        let values = nodes
            .iter()
            .zip(fundamental.values())
            .map(|(&t, &v)| if t == 0.0 { 0.0 } else { t / v })
            .collect();
        MonotoneFn::new(nodes.to_vec(), values)
    }

    /// `‖x*·χ_[0,ε]‖_E` along `eps_grid`, with an `E₀` verdict at the smallest `ε`.
    pub fn ac_tail_profile(
        &self,
        x: &GridFunction,
        eps_grid: &[f64],
        threshold_fraction: f64,
    ) -> Result<AcTailProfile> {
        if eps_grid.is_empty() {
            return Err(domain("empty epsilon grid"));
        }
        let prof = Profile::of(x);
        let total = self.norm_profile(&prof)?;
        let mut eps = eps_grid.to_vec();
        eps.sort_by(f64::total_cmp);
        let profile = eps
            .iter()
            .map(|&e| {
                if !(0.0..=1.0).contains(&e) {
                    return Err(domain(format!("epsilon {e} outside [0,1]")));
                }
                self.norm_profile(&prof.truncate(e))
            })
            .collect::<Result<Vec<_>>>()?;
        let threshold = threshold_fraction * total;
        Ok(AcTailProfile {
            in_e0_at_resolution: profile[0] < threshold,
            eps,
            profile,
            threshold,
            norm: total,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcTailProfile {
    pub eps: Vec<f64>,
    pub profile: Vec<f64>,
    pub threshold: f64,
    pub norm: f64,
    pub in_e0_at_resolution: bool,
}

pub const DEFAULT_AC_THRESHOLD: f64 = 0.05;

fn lp_norm(prof: &Profile, p: f64) -> f64 {
    if p.is_infinite() {
        return prof.max();
    }
    if p == 1.0 {
        return prof.pieces().map(|(v, a, b)| v * (b - a)).sum();
    }
    let s: f64 = prof.pieces().map(|(v, a, b)| v.powf(p) * (b - a)).sum();
    s.powf(1.0 / p)
}

fn lorentz_norm(prof: &Profile, phi: &MFunction) -> f64 {
    let mut sum = 0.0;
    let mut prev = 0.0;
    for (v, _, b) in prof.pieces() {
        let next = phi.eval(b);
        sum += v * (next - prev);
        prev = next;
    }
    sum
}

fn marcinkiewicz_norm(prof: &Profile, phi: &MFunction) -> Result<f64> {
    let mut best = 0.0_f64;
    let mut head = 0.0;
    for (v, a, b) in prof.pieces() {
        head += v * (b - a);
        if head == 0.0 {
            continue;
        }
        let w = phi.eval(b);
        if w <= 0.0 {
            return Err(degenerate(format!("phi vanishes at h={b}")));
        }
        best = best.max(head / w);
    }
    Ok(best)
}

fn luxemburg_norm(prof: &Profile, growth: Growth) -> Result<f64> {
    if prof.is_zero() {
        return Ok(0.0);
    }
    let (top, len0) = (prof.values[0], prof.ends[0]);
    let modular = |lambda: f64| -> f64 {
        prof.pieces()
            .map(|(v, a, b)| (b - a) * growth.modular(v / lambda))
            .sum()
    };
    // closed-form brackets, nudged outward so rounding cannot break them
    let mut lo = top / growth.inverse(1.0 / len0) * (1.0 - 1e-9);
    let mut hi = top / growth.inverse(1.0) * (1.0 + 1e-9);
    if modular(lo) < 1.0 || modular(hi) > 1.0 {
        return Err(Error::Numeric(format!(
            "Luxemburg bracket [{lo}, {hi}] does not straddle the unit modular"
        )));
    }
    for _ in 0..LUXEMBURG_MAX_ITERS {
        if hi - lo <= LUXEMBURG_REL_TOL * hi {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if modular(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Numeric(format!(
        "Luxemburg bisection did not converge: bracket [{lo}, {hi}]"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderSlack {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Checks `‖f·x‖₁ ≤ ‖x‖_E ‖f‖_{E′}` for an implemented dual pair.
pub fn holder_check(
    f: &GridFunction,
    x: &GridFunction,
    space: &SpaceSpec,
    dual: &SpaceSpec,
) -> Result<HolderSlack> {
    if !is_dual_pair(space, dual) {
        return Err(domain(format!(
            "unsupported dual pair ({}, {})",
            space.label(),
            dual.label()
        )));
    }
    let lhs = f.mul(x)?.l1_norm();
    let rhs = space.norm(x)? * dual.norm(f)?;
    Ok(HolderSlack {
        lhs,
        rhs,
        slack: rhs - lhs,
        holds: lhs <= rhs + 1e-10,
    })
}

fn is_dual_pair(a: &SpaceSpec, b: &SpaceSpec) -> bool {
    match (a, b) {
        (SpaceSpec::LebesgueP { p }, SpaceSpec::LebesgueP { p: q }) => {
            let inv = |r: f64| if r.is_infinite() { 0.0 } else { 1.0 / r };
            (inv(*p) + inv(*q) - 1.0).abs() < 1e-12
        }
        (SpaceSpec::Lorentz { phi, .. }, SpaceSpec::Marcinkiewicz { phi: psi, .. })
        | (SpaceSpec::Marcinkiewicz { phi: psi, .. }, SpaceSpec::Lorentz { phi, .. }) => {
            phi == psi
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelopes::standard_nodes;

    fn g(v: &[f64]) -> GridFunction {
        GridFunction::new(v.to_vec()).unwrap()
    }

    fn nodes() -> Vec<f64> {
        standard_nodes(12, 64)
    }

    #[test]
    fn lp_examples() {
        let x = g(&[3.0, 2.0, 2.0, 1.0]);
        assert_eq!(SpaceSpec::l1().norm(&x).unwrap(), 2.0);
        assert_eq!(SpaceSpec::linf().norm(&x).unwrap(), 3.0);
        let l2 = SpaceSpec::lp(2.0).unwrap().norm(&x).unwrap();
        assert!((l2 - (18.0f64 / 4.0).sqrt()).abs() < 1e-15);
        assert!(SpaceSpec::lp(0.5).is_err());
        assert!(SpaceSpec::LebesgueP { p: 0.5 }.norm(&x).is_err());
    }

    #[test]
    fn lorentz_sqrt_example() {
        let phi = MFunction::power(&nodes(), 0.5).unwrap();
        let x = g(&[3.0, 2.0, 2.0, 1.0]);
        let expected = 3.0 * 0.5
            + 2.0 * (0.5f64.sqrt() - 0.5)
            + 2.0 * (0.75f64.sqrt() - 0.5f64.sqrt())
            + (1.0 - 0.75f64.sqrt());
        let got = SpaceSpec::lorentz(phi).unwrap().norm(&x).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 2.3660).abs() < 1e-4);
    }

    #[test]
    fn lorentz_rejects_non_concave_weight() {
        let quasi = MFunction::from_fn(&nodes(), |t| if t < 0.5 { t } else { 0.5 + (t - 0.5) * 1.0 })
            .unwrap();
        assert!(SpaceSpec::lorentz(quasi).is_ok());
        let bumpy = MFunction::from_fn(&[0.0, 0.25, 0.5, 1.0], |t| match t {
            t if t <= 0.25 => 0.5,
            t if t <= 0.5 => 0.55,
            _ => 1.0,
        })
        .unwrap();
        assert!(matches!(SpaceSpec::lorentz(bumpy), Err(Error::Validation(_))));
    }

    #[test]
    fn orlicz_indicator_closed_form() {
        let spec = SpaceSpec::orlicz_exp_square(false);
        let x = GridFunction::from_fn(3, |k| if k == 0 { 1.0 } else { 0.0 }).unwrap();
        let expected = 4.0f64.ln().powf(-0.5);
        assert!((spec.norm(&x).unwrap() - expected).abs() < 1e-10);
        assert!((expected - 0.84933).abs() < 1e-5);
        assert_eq!(spec.norm(&GridFunction::zeros(4).unwrap()).unwrap(), 0.0);
        for k in 1..=10 {
            let tau = 0.5f64.powi(k);
            let want = (1.0 / tau).ln_1p().powf(-0.5);
            assert!((spec.fundamental_function(tau).unwrap() - want).abs() < 1e-9);
        }
    }

    #[test]
    fn fundamental_function_examples() {
        let tau = 0.5f64.powi(4);
        for p in [1.0, 1.5, 2.0, 3.0] {
            let got = SpaceSpec::lp(p).unwrap().fundamental_function(tau).unwrap();
            assert!((got - tau.powf(1.0 / p)).abs() < 1e-15);
        }
        let m = SpaceSpec::marcinkiewicz(MFunction::power(&nodes(), 0.5).unwrap(), false);
        assert!((m.fundamental_function(0.25).unwrap() - 0.5).abs() < 1e-15);
        // brute force over grid h of min(h,τ)/√h on a 64-cell indicator
        let x = GridFunction::indicator_head(64, 0.25).unwrap();
        let brute = (1..=64)
            .map(|k| {
                let h = k as f64 / 64.0;
                h.min(0.25) / h.sqrt()
            })
            .fold(0.0, f64::max);
        assert!((m.norm(&x).unwrap() - brute).abs() < 1e-15);
    }

    #[test]
    fn dual_fundamental_examples() {
        let ns = nodes();
        let d = SpaceSpec::lp(2.0).unwrap().dual_fundamental(&ns).unwrap();
        for (&t, &v) in ns.iter().zip(d.values()) {
            assert!((v - t.sqrt()).abs() < 1e-14);
        }
        let d = SpaceSpec::l1().dual_fundamental(&ns).unwrap();
        assert!(d.values()[1..].iter().all(|&v| (v - 1.0).abs() < 1e-15));
        // the dual of Λ(φ) is M(φ), whose fundamental function is φ*
        let phi = MFunction::power(&ns, 1.0 / 1.5).unwrap();
        let d = SpaceSpec::lorentz(phi.clone()).unwrap().dual_fundamental(&ns).unwrap();
        let m = SpaceSpec::marcinkiewicz(phi, false);
        for (&t, &v) in ns.iter().zip(d.values()) {
            assert!((v - m.fundamental_function(t).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn holder_examples() {
        let one = GridFunction::constant(8, 1.0).unwrap();
        let l2 = SpaceSpec::lp(2.0).unwrap();
        let s = holder_check(&one, &one, &l2, &l2).unwrap();
        assert!(s.holds && s.slack.abs() < 1e-15);
        assert!(holder_check(&one, &one, &l2, &SpaceSpec::l1()).is_err());
        // indicator test function: ‖x·χ_[0,τ]‖₁ ≤ τ^{1/q} ‖x‖_p
        let x = g(&[5.0, -1.0, 2.0, 0.5, 0.0, 3.0, -2.0, 1.0]);
        let f = GridFunction::indicator_head(8, 0.25).unwrap();
        let (p, q) = (3.0, 1.5);
        let s = holder_check(&f, &x, &SpaceSpec::lp(p).unwrap(), &SpaceSpec::lp(q).unwrap())
            .unwrap();
        assert!(s.holds);
        let bound = 0.25f64.powf(1.0 / q) * SpaceSpec::lp(p).unwrap().norm(&x).unwrap();
        assert!((s.rhs - bound).abs() < 1e-14);
    }

    #[test]
    fn ac_tail_examples() {
        let x = g(&[1.0, -3.0, 2.0, 0.5, 0.25, 1.0, 2.0, 1.0]);
        let eps = [0.125, 0.25, 0.5, 1.0];
        let prof = SpaceSpec::lp(2.0).unwrap().ac_tail_profile(&x, &eps, 0.05).unwrap();
        assert!(prof.profile.windows(2).all(|w| w[0] <= w[1]));
        for (&e, &v) in prof.eps.iter().zip(&prof.profile) {
            assert!(v <= 3.0 * e.sqrt() + 1e-15);
        }
        let one = GridFunction::constant(16, 1.0).unwrap();
        let spec = SpaceSpec::orlicz_exp_square(false);
        let prof = spec.ac_tail_profile(&one, &eps, 0.05).unwrap();
        for (&e, &v) in prof.eps.iter().zip(&prof.profile) {
            assert!((v - spec.fundamental_function(e).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn profile_truncation_splits_cells() {
        let prof = Profile::of(&g(&[3.0, 2.0, 2.0, 1.0]));
        let t = prof.truncate(0.375);
        assert_eq!(t.values(), &[3.0, 2.0]);
        assert_eq!(t.ends(), &[0.25, 0.375]);
        assert_eq!(SpaceSpec::l1().norm_profile(&t).unwrap(), 1.0);
        let r = prof.remove_head(0.375);
        assert_eq!(r.values(), &[2.0, 2.0, 1.0]);
        assert!((SpaceSpec::l1().norm_profile(&r).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_forms() {
        let spec: SpaceSpec = serde_json::from_str(r#"{"kind":"lp","p":1.5}"#).unwrap();
        assert_eq!(spec, SpaceSpec::LebesgueP { p: 1.5 });
        let spec: SpaceSpec = serde_json::from_str(r#"{"kind":"lp","p":"inf"}"#).unwrap();
        assert_eq!(spec, SpaceSpec::linf());
        let spec: SpaceSpec =
            serde_json::from_str(r#"{"kind":"orlicz","growth":"exp_square"}"#).unwrap();
        assert_eq!(spec, SpaceSpec::orlicz_exp_square(false));
        let m = SpaceSpec::marcinkiewicz(MFunction::power(&[0.0, 0.5, 1.0], 0.5).unwrap(), false);
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains(r#""kind":"marcinkiewicz""#) && text.contains(r#""ac_part":false"#));
        assert_eq!(serde_json::from_str::<SpaceSpec>(&text).unwrap(), m);
        assert_eq!(
            serde_json::to_string(&SpaceSpec::linf()).unwrap(),
            r#"{"kind":"lp","p":"inf"}"#
        );
    }
}
