//! Sampled monotone functions on `[0, 1]`: M-functions, involutions and least
//! concave majorants.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{degenerate, domain, Error, Result};

const MONO_TOL: f64 = 1e-12;

/// A non-decreasing, non-negative function sampled on nodes `0 = t_0 < … < t_m = 1`,
/// linear between nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMonotone")]
pub struct MonotoneFn {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawMonotone {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawMonotone> for MonotoneFn {
    type Error = Error;

    fn try_from(raw: RawMonotone) -> Result<Self> {
        MonotoneFn::new(raw.nodes, raw.values)
    }
}

impl MonotoneFn {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(Error::Validation(format!(
                "need at least two nodes and matching values, got {} nodes / {} values",
                nodes.len(),
                values.len()
            )));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(Error::Validation("nodes must start at 0 and end at 1".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Validation("nodes must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Validation("values must be finite and non-negative".into()));
        }
        if values[0] != 0.0 {
            return Err(Error::Validation("value at node 0 must be 0".into()));
        }
        if let Some(k) = values
            .windows(2)
            .position(|w| w[1] < w[0] - MONO_TOL * w[0].max(1.0))
        {
            return Err(Error::Validation(format!(
                "values decrease between nodes {} and {}",
                k,
                k + 1
            )));
        }
        Ok(Self { nodes, values })
    }

    /// Samples `f` on `nodes`; `f(0)` is forced to 0.
    pub fn from_fn(nodes: &[f64], f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = nodes
            .iter()
            .map(|&t| if t == 0.0 { 0.0 } else { f(t) })
            .collect();
        Self::new(nodes.to_vec(), values)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(domain(format!("evaluation point {t} outside [0,1]")));
        }
        Ok(self.eval(t))
    }

    /// Interpolated value; `t` is clamped to `[0, 1]`.
    pub(crate) fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match self.nodes.binary_search_by(|n| n.total_cmp(&t)) {
            Ok(k) => self.values[k],
            Err(k) => {
                let (t0, t1) = (self.nodes[k - 1], self.nodes[k]);
                let (v0, v1) = (self.values[k - 1], self.values[k]);
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// Non-increasing consecutive slopes (within a relative tolerance).
    pub fn is_concave(&self, tol: f64) -> bool {
        let slopes = self.slopes();
        slopes
            .windows(2)
            .all(|w| w[1] <= w[0] + tol * w[0].abs().max(1.0))
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.nodes
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(t, v)| (v[1] - v[0]) / (t[1] - t[0]))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,value\n");
        for (t, v) in self.nodes.iter().zip(&self.values) {
            let _ = writeln!(out, "{t:?},{v:?}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if line.starts_with("node") {
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected two columns: {line:?}")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad number {s:?}: {e}")))
            };
            nodes.push(parse(a)?);
            values.push(parse(b)?);
        }
        Self::new(nodes, values)
    }
}

/// A normalized quasiconcave function: `ψ(0)=0`, `ψ(1)=1`, `ψ` and `t/ψ(t)`
/// non-decreasing on the nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MonotoneFn", into = "MonotoneFn")]
pub struct MFunction(MonotoneFn);

impl TryFrom<MonotoneFn> for MFunction {
    type Error = Error;

    fn try_from(f: MonotoneFn) -> Result<Self> {
        MFunction::new(f)
    }
}

impl From<MFunction> for MonotoneFn {
    fn from(m: MFunction) -> Self {
        m.0
    }
}

impl MFunction {
    pub fn new(f: MonotoneFn) -> Result<Self> {
        let last = *f.values.last().unwrap();
        if (last - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("M-function must equal 1 at t=1, got {last}")));
        }
        let mut prev = 0.0_f64;
        for (&t, &v) in f.nodes.iter().zip(&f.values).skip(1) {
            if v > 0.0 {
                let ratio = t / v;
                if ratio < prev - MONO_TOL * prev.max(1.0) {
                    return Err(Error::Validation(format!(
                        "t/psi(t) decreases at node {t}"
                    )));
                }
                prev = ratio;
            }
        }
        Ok(Self(f))
    }

    pub fn from_fn(nodes: &[f64], f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(MonotoneFn::from_fn(nodes, f)?)
    }

    /// `t^a` for `a` in `[0, 1]`.
    pub fn power(nodes: &[f64], a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(domain(format!("power {a} outside [0,1]")));
        }
        Self::from_fn(nodes, |t| t.powf(a))
    }

    pub fn as_monotone(&self) -> &MonotoneFn {
        &self.0
    }

    pub fn nodes(&self) -> &[f64] {
        &self.0.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.0.values
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        self.0.evaluate(t)
    }

    pub(crate) fn eval(&self, t: f64) -> f64 {
        self.0.eval(t)
    }

    pub fn is_concave(&self, tol: f64) -> bool {
        self.0.is_concave(tol)
    }
}

/// `{0} ∪ {2^-k : 1 ≤ k ≤ depth} ∪ {j/uniform : 1 ≤ j ≤ uniform}`, sorted.
pub fn standard_nodes(depth: u32, uniform: usize) -> Vec<f64> {
    let mut nodes = vec![0.0, 1.0];
    nodes.extend((1..=depth).map(|k| (0.5f64).powi(k as i32)));
    nodes.extend((1..uniform).map(|j| j as f64 / uniform as f64));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    nodes
}

/// `{0} ∪ {2^-k : 0 ≤ k ≤ depth}`.
pub fn dyadic_nodes(depth: u32) -> Vec<f64> {
    standard_nodes(depth, 1)
}

/// `ψ*(t) = t/ψ(t)` sampled on the same nodes.
pub fn involution_quasiconcave(psi: &MFunction) -> Result<MFunction> {
    let nodes = psi.nodes();
    let mut values = Vec::with_capacity(nodes.len());
    values.push(0.0);
    for (&t, &v) in nodes.iter().zip(psi.values()).skip(1) {
        if v <= 0.0 {
            return Err(degenerate(format!("psi vanishes at t={t}")));
        }
        values.push(t / v);
    }
    MFunction::new(MonotoneFn::new(nodes.to_vec(), values)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InvolutionDiagnostics {
    /// `h/η(h)` is larger at the smallest positive node than at the next one, so
    /// the supremum may keep growing under refinement toward 0.
    pub rising_at_origin: bool,
}

/// `η*(t) = sup{h/η(h) : 0 < h ≤ t, h a node}`, `η*(0) = 0`.
pub fn involution_general(eta: &MonotoneFn) -> Result<MonotoneFn> {
    involution_general_with_diagnostics(eta).map(|(f, _)| f)
}

pub fn involution_general_with_diagnostics(
    eta: &MonotoneFn,
) -> Result<(MonotoneFn, InvolutionDiagnostics)> {
    let nodes = eta.nodes();
    let mut values = Vec::with_capacity(nodes.len());
    values.push(0.0);
    let mut best = 0.0_f64;
    let mut ratios = Vec::with_capacity(nodes.len());
    for (&h, &v) in nodes.iter().zip(eta.values()).skip(1) {
        if v <= 0.0 {
            return Err(degenerate(format!("eta vanishes at h={h}")));
        }
        let r = h / v;
        ratios.push(r);
        best = best.max(r);
        values.push(best);
    }
    let rising_at_origin = ratios.len() >= 2 && ratios[0] > ratios[1];
    Ok((
        MonotoneFn::new(nodes.to_vec(), values)?,
        InvolutionDiagnostics { rising_at_origin },
    ))
}

/// Upper concave envelope of the node points, evaluated back on the nodes.
pub fn least_concave_majorant(phi: &MonotoneFn) -> MonotoneFn {
    let pts: Vec<(f64, f64)> = phi.nodes.iter().copied().zip(phi.values.iter().copied()).collect();
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b when it lies on or below the chord a→p
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut values = Vec::with_capacity(pts.len());
    let mut seg = 0;
    for &(t, v) in &pts {
        while seg + 1 < hull.len() - 1 && hull[seg + 1].0 < t {
            seg += 1;
        }
        let (a, b) = (hull[seg], hull[(seg + 1).min(hull.len() - 1)]);
        let on_hull = if b.0 > a.0 {
            a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
        } else {
            a.1
        };
        values.push(on_hull.max(v));
    }
    MonotoneFn {
        nodes: phi.nodes.clone(),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fine_nodes() -> Vec<f64> {
        standard_nodes(12, 64)
    }

    #[test]
    fn evaluate_examples() {
        let id = MonotoneFn::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(id.evaluate(0.5).unwrap(), 0.5);
        assert_eq!(id.evaluate(0.0).unwrap(), 0.0);
        assert!(id.evaluate(1.5).is_err());
        let f = MonotoneFn::from_fn(&[0.0, 0.25, 1.0], |t| t.sqrt()).unwrap();
        assert_eq!(f.evaluate(0.25).unwrap(), 0.5);
    }

    #[test]
    fn rejects_invalid_samples() {
        assert!(MonotoneFn::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.6, 0.5]).is_err());
        assert!(MonotoneFn::new(vec![0.0, 0.5, 0.5, 1.0], vec![0.0; 4]).is_err());
        assert!(MonotoneFn::new(vec![0.1, 1.0], vec![0.0, 1.0]).is_err());
        assert!(MonotoneFn::new(vec![0.0, 1.0], vec![0.5, 1.0]).is_err());
        // t² is not quasiconcave
        assert!(MFunction::from_fn(&fine_nodes(), |t| t * t).is_err());
        assert!(MFunction::from_fn(&fine_nodes(), |t| 0.5 * t).is_err());
    }

    #[test]
    fn quasiconcave_involution_examples() {
        let nodes = fine_nodes();
        let sqrt = MFunction::power(&nodes, 0.5).unwrap();
        let inv = involution_quasiconcave(&sqrt).unwrap();
        for (a, b) in inv.values().iter().zip(sqrt.values()) {
            assert!((a - b).abs() < 1e-15);
        }
        let lin = MFunction::power(&nodes, 1.0).unwrap();
        let inv = involution_quasiconcave(&lin).unwrap();
        assert_eq!(inv.values()[0], 0.0);
        assert!(inv.values()[1..].iter().all(|&v| (v - 1.0).abs() < 1e-15));
        let p = MFunction::power(&nodes, 2.0 / 3.0).unwrap();
        let inv = involution_quasiconcave(&p).unwrap();
        for (&t, &v) in nodes.iter().zip(inv.values()) {
            assert!((v - t.powf(1.0 / 3.0)).abs() < 1e-14);
        }
        let back = involution_quasiconcave(&inv).unwrap();
        for (a, b) in back.values().iter().zip(p.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn general_involution_examples() {
        let nodes = fine_nodes();
        let sqrt = MonotoneFn::from_fn(&nodes, f64::sqrt).unwrap();
        let inv = involution_general(&sqrt).unwrap();
        for (a, b) in inv.values().iter().zip(sqrt.values()) {
            assert!((a - b).abs() < 1e-15);
        }
        // η ≥ t everywhere ⇒ η* ≤ 1
        let eta = MonotoneFn::from_fn(&nodes, |t| (t * 1.5).min(1.0).max(t.powf(0.3))).unwrap();
        assert!(involution_general(&eta).unwrap().values().iter().all(|&v| v <= 1.0));
        let zero = MonotoneFn::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(involution_general(&zero), Err(Error::Degenerate(_))));
    }

    #[test]
    fn general_involution_flags_sublinear_eta() {
        let nodes = fine_nodes();
        let (_, diag) =
            involution_general_with_diagnostics(&MonotoneFn::from_fn(&nodes, |t| t * t).unwrap())
                .unwrap();
        assert!(diag.rising_at_origin);
        let (_, diag) =
            involution_general_with_diagnostics(&MonotoneFn::from_fn(&nodes, f64::sqrt).unwrap())
                .unwrap();
        assert!(!diag.rising_at_origin);
    }

    #[test]
    fn general_matches_closed_form_on_m_functions() {
        let nodes = fine_nodes();
        for a in [0.2, 0.5, 0.8, 1.0] {
            let m = MFunction::power(&nodes, a).unwrap();
            let closed = involution_quasiconcave(&m).unwrap();
            let general = involution_general(m.as_monotone()).unwrap();
            for (x, y) in closed.values().iter().zip(general.values()) {
                assert!((x - y).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn majorant_examples() {
        let f = MonotoneFn::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.2, 1.0]).unwrap();
        let m = least_concave_majorant(&f);
        assert_eq!(m.evaluate(0.5).unwrap(), 0.5);
        let concave = MonotoneFn::from_fn(&fine_nodes(), f64::sqrt).unwrap();
        assert_eq!(least_concave_majorant(&concave), concave);
    }

    #[test]
    fn majorant_of_parabola_by_chord_oracle() {
        let nodes: Vec<f64> = (0..=200).map(|k| k as f64 / 200.0).collect();
        let f = MonotoneFn::from_fn(&nodes, |t| t * t).unwrap();
        let m = least_concave_majorant(&f);
        // oracle: the majorant at t is the max over chords between node pairs spanning t
        for (i, &t) in nodes.iter().enumerate() {
            let mut best = f.values()[i];
            for a in 0..=i {
                for b in i..nodes.len() {
                    let (ta, tb) = (nodes[a], nodes[b]);
                    let v = if tb > ta {
                        f.values()[a] + (f.values()[b] - f.values()[a]) * (t - ta) / (tb - ta)
                    } else {
                        f.values()[a]
                    };
                    best = best.max(v);
                }
            }
            assert!((m.values()[i] - best).abs() < 1e-12);
            assert!((m.values()[i] - t).abs() <= 1.0 / 200.0);
        }
        assert!(m.is_concave(1e-12));
    }

    #[test]
    fn csv_roundtrip() {
        let f = MonotoneFn::from_fn(&fine_nodes(), |t| t.powf(0.7)).unwrap();
        assert_eq!(MonotoneFn::from_csv(&f.to_csv()).unwrap(), f);
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<MonotoneFn>(&json).unwrap(), f);
    }
}
