//! Step functions on a uniform partition of `[0, 1]`.
//!
//! A [`GridFunction`] takes the value `values[k]` on `[k/n, (k+1)/n)`. Every
//! quantity in this crate (rearrangements, head integrals, symmetric norms) is
//! computed exactly on this representation.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct GridFunction {
    n_cells: usize,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawGrid {
    n_cells: usize,
    values: Vec<f64>,
}

impl TryFrom<RawGrid> for GridFunction {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        if raw.values.len() != raw.n_cells {
            return Err(Error::Parse(format!(
                "n_cells={} but {} values",
                raw.n_cells,
                raw.values.len()
            )));
        }
        GridFunction::new(raw.values)
    }
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("a grid function needs at least one cell"));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(domain(format!("non-finite value at cell {k}")));
        }
        Ok(Self {
            n_cells: values.len(),
            values,
        })
    }

    /// Builds a function from values already known to be finite.
    pub(crate) fn from_finite(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty() && values.iter().all(|v| v.is_finite()));
        Self {
            n_cells: values.len(),
            values,
        }
    }

    pub fn constant(n_cells: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; n_cells])
    }

    pub fn zeros(n_cells: usize) -> Result<Self> {
        Self::constant(n_cells, 0.0)
    }

    /// `χ_[0,τ]`; `τ` must be a multiple of `1/n_cells`.
    pub fn indicator_head(n_cells: usize, tau: f64) -> Result<Self> {
        let k = cells_for_measure(n_cells, tau)?;
        let mut values = vec![0.0; n_cells];
        values[..k].iter_mut().for_each(|v| *v = 1.0);
        Self::new(values)
    }

    pub fn from_fn(n_cells: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((0..n_cells).map(f).collect())
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn cell_width(&self) -> f64 {
        1.0 / self.n_cells as f64
    }

    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.n_cells as f64
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() / self.n_cells as f64
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_cells != other.n_cells {
            return Err(Error::Dimension {
                left: self.n_cells,
                right: other.n_cells,
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(values)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| c * v).collect())
    }

    pub fn abs(&self) -> Self {
        Self::from_finite(self.values.iter().map(|v| v.abs()).collect())
    }

    /// `x · χ_e`.
    pub fn restrict(&self, e: &CellSet) -> Result<Self> {
        if e.n_cells() != self.n_cells {
            return Err(Error::Dimension {
                left: self.n_cells,
                right: e.n_cells(),
            });
        }
        let values = self
            .values
            .iter()
            .zip(e.mask())
            .map(|(&v, &m)| if m { v } else { 0.0 })
            .collect();
        Ok(Self::from_finite(values))
    }

    /// `n_x(s) = mes{t : x(t) > s}`.
    pub fn distribution(&self, s: f64) -> f64 {
        self.values.iter().filter(|&&v| v > s).count() as f64 / self.n_cells as f64
    }

    /// `|values|` sorted non-increasing.
    pub fn sorted_abs_desc(&self) -> Vec<f64> {
        let mut abs: Vec<f64> = self.values.iter().map(|v| v.abs()).collect();
        sort_desc(&mut abs);
        abs
    }

    /// The non-increasing rearrangement `x*`.
    pub fn rearrangement(&self) -> Self {
        Self::from_finite(self.sorted_abs_desc())
    }

    /// Indices of the cells in rearrangement order; ties keep the original order.
    pub fn rearrangement_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.n_cells).collect();
        idx.sort_by(|&a, &b| {
            self.values[b]
                .abs()
                .partial_cmp(&self.values[a].abs())
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        idx
    }

    /// `K(x, h) = ∫₀ʰ x*(t) dt`, exact including the partial cell.
    pub fn head_integral(&self, h: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&h) {
            return Err(domain(format!("head integral needs h in [0,1], got {h}")));
        }
        Ok(head_integral_sorted(&self.sorted_abs_desc(), h))
    }

    pub fn equimeasurable(&self, other: &Self, tol: f64) -> Result<bool> {
        self.check_same(other)?;
        let a = self.sorted_abs_desc();
        let b = other.sorted_abs_desc();
        Ok(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol))
    }

    /// CSV form: a `n_cells=<N>` header, then one value per line.
    pub fn to_csv(&self) -> String {
        let mut out = format!("n_cells={}\n", self.n_cells);
        for v in &self.values {
            let _ = writeln!(out, "{v:?}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty CSV".into()))?;
        let n: usize = header
            .strip_prefix("n_cells=")
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad n_cells: {e}")))?;
        let values = lines
            .map(|l| {
                l.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad value {l:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        GridFunction::try_from(RawGrid { n_cells: n, values })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grid function serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Number of whole cells making up measure `tau`; errors if `tau` is off-grid.
pub fn cells_for_measure(n_cells: usize, tau: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(domain(format!("measure {tau} outside [0,1]")));
    }
    let scaled = tau * n_cells as f64;
    let k = scaled.round();
    if (scaled - k).abs() > 1e-9 * n_cells as f64 {
        return Err(domain(format!(
            "measure {tau} is not a multiple of 1/{n_cells}"
        )));
    }
    Ok(k as usize)
}

pub(crate) fn sort_desc(v: &mut [f64]) {
    v.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
}

/// Head integral of an already sorted (non-increasing, non-negative) cell array.
pub(crate) fn head_integral_sorted(sorted: &[f64], h: f64) -> f64 {
    let n = sorted.len();
    let scaled = h * n as f64;
    let k = (scaled.floor() as usize).min(n);
    let frac = scaled - k as f64;
    let mut sum: f64 = sorted[..k].iter().sum();
    if k < n && frac > 0.0 {
        sum += frac * sorted[k];
    }
    sum / n as f64
}

/// Head integral of unsorted absolute values by selection; reorders `scratch`.
pub(crate) fn head_integral_select(scratch: &mut [f64], h: f64) -> f64 {
    let n = scratch.len();
    let scaled = h * n as f64;
    let k = (scaled.floor() as usize).min(n);
    let frac = scaled - k as f64;
    let desc = |a: &f64, b: &f64| b.partial_cmp(a).unwrap_or(Ordering::Equal);
    let mut sum = 0.0;
    if k == n {
        sum = scratch.iter().sum();
    } else {
        if k > 0 {
            scratch.select_nth_unstable_by(k, desc);
            sum = scratch[..k].iter().sum();
            if frac > 0.0 {
                // the (k+1)-th largest is the maximum of the remainder
                let next = scratch[k..].iter().fold(0.0_f64, |m, &v| m.max(v));
                sum += frac * next;
            }
        } else if frac > 0.0 {
            sum = frac * scratch.iter().fold(0.0_f64, |m, &v| m.max(v));
        }
    }
    sum / n as f64
}

/// A union of whole cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSet {
    n_cells: usize,
    mask: Vec<bool>,
}

impl CellSet {
    pub fn new(mask: Vec<bool>) -> Result<Self> {
        if mask.is_empty() {
            return Err(domain("a cell set needs at least one cell"));
        }
        Ok(Self {
            n_cells: mask.len(),
            mask,
        })
    }

    pub fn empty(n_cells: usize) -> Self {
        Self {
            n_cells,
            mask: vec![false; n_cells],
        }
    }

    pub fn full(n_cells: usize) -> Self {
        Self {
            n_cells,
            mask: vec![true; n_cells],
        }
    }

    pub fn from_indices(n_cells: usize, idx: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut set = Self::empty(n_cells);
        for i in idx {
            if i >= n_cells {
                return Err(domain(format!("cell {i} out of range for {n_cells} cells")));
            }
            set.mask[i] = true;
        }
        Ok(set)
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn measure(&self) -> f64 {
        self.count() as f64 / self.n_cells as f64
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.mask[cell]
    }

    pub fn insert(&mut self, cell: usize) {
        self.mask[cell] = true;
    }

    pub fn complement(&self) -> Self {
        Self {
            n_cells: self.n_cells,
            mask: self.mask.iter().map(|m| !m).collect(),
        }
    }

    fn combine(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Result<Self> {
        if self.n_cells != other.n_cells {
            return Err(Error::Dimension {
                left: self.n_cells,
                right: other.n_cells,
            });
        }
        Ok(Self {
            n_cells: self.n_cells,
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a && !b)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !(a && b))
    }

    pub fn indicator(&self) -> GridFunction {
        GridFunction::from_finite(self.mask.iter().map(|&m| f64::from(u8::from(m))).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(v: &[f64]) -> GridFunction {
        GridFunction::new(v.to_vec()).unwrap()
    }

    #[test]
    fn integrate_and_l1() {
        assert_eq!(GridFunction::constant(7, 1.0).unwrap().integrate(), 1.0);
        assert_eq!(g(&[3.0, 2.0, 2.0, 1.0]).integrate(), 2.0);
        let x = g(&[1.5, -0.25, 3.0]);
        assert_eq!(x.add(&x.scale(-1.0).unwrap()).unwrap().integrate(), 0.0);
        assert_eq!(g(&[1.0, 1.0, -1.0, -1.0]).l1_norm(), 1.0);
        assert_eq!(g(&[3.0, 2.0, 2.0, 1.0]).l1_norm(), 2.0);
        assert_eq!(GridFunction::zeros(5).unwrap().l1_norm(), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(GridFunction::new(vec![]).is_err());
        assert!(GridFunction::new(vec![1.0, f64::NAN]).is_err());
        let a = g(&[1.0, 2.0]);
        let b = g(&[1.0, 2.0, 3.0]);
        assert!(matches!(a.add(&b), Err(Error::Dimension { .. })));
        assert!(a.restrict(&CellSet::full(3)).is_err());
        assert!(a.equimeasurable(&b, 0.0).is_err());
    }

    #[test]
    fn restrict_examples() {
        let one = GridFunction::constant(4, 1.0).unwrap();
        assert_eq!(one.restrict(&CellSet::full(4)).unwrap(), one);
        let x = g(&[3.0, 2.0, 2.0, 1.0]);
        let e = CellSet::new(vec![true, false, false, false]).unwrap();
        assert_eq!(x.restrict(&e).unwrap().values(), &[3.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn pointwise_ops() {
        assert_eq!(g(&[-1.0, 2.0]).abs().values(), &[1.0, 2.0]);
        assert_eq!(g(&[1.0, 2.0]).scale(0.0).unwrap().values(), &[0.0, 0.0]);
        let a = g(&[1.0, 0.0, 2.0, 0.0]);
        let b = g(&[0.0, 5.0, 0.0, -1.0]);
        assert!(a.mul(&b).unwrap().is_zero());
    }

    #[test]
    fn distribution_examples() {
        let x = g(&[3.0, 1.0, 1.0, 1.0]);
        assert_eq!(x.distribution(2.0), 0.25);
        assert_eq!(x.distribution(0.5), 1.0);
        assert_eq!(x.distribution(3.0), 0.0);
        assert_eq!(x.distribution(10.0), 0.0);
    }

    #[test]
    fn rearrangement_examples() {
        assert_eq!(g(&[1.0, 3.0, 2.0, 2.0]).rearrangement().values(), &[3.0, 2.0, 2.0, 1.0]);
        let dec = g(&[4.0, 2.0, 2.0, 0.5]);
        assert_eq!(dec.rearrangement(), dec);
        assert_eq!(g(&[-1.0, 0.5, -3.0]).rearrangement().values(), &[3.0, 1.0, 0.5]);
        assert_eq!(g(&[1.0, -2.0, 2.0]).rearrangement_order(), vec![1, 2, 0]);
    }

    #[test]
    fn head_integral_examples() {
        let x = g(&[3.0, 2.0, 2.0, 1.0]);
        assert_eq!(x.head_integral(0.5).unwrap(), 1.25);
        assert_eq!(x.head_integral(0.375).unwrap(), 1.0);
        assert_eq!(x.head_integral(1.0).unwrap(), x.l1_norm());
        assert_eq!(x.head_integral(0.0).unwrap(), 0.0);
        assert!(x.head_integral(1.5).is_err());
        assert!(x.head_integral(-0.1).is_err());
    }

    #[test]
    fn select_matches_sort() {
        let x = g(&[0.3, -4.0, 2.5, 2.5, 1.0, -0.1, 7.0]);
        for k in 0..=70 {
            let h = k as f64 / 70.0;
            let mut scratch: Vec<f64> = x.values().iter().map(|v| v.abs()).collect();
            let a = head_integral_select(&mut scratch, h);
            let b = x.head_integral(h).unwrap();
            assert!((a - b).abs() < 1e-14, "h={h}: {a} vs {b}");
        }
    }

    #[test]
    fn equimeasurable_examples() {
        let x = g(&[1.0, 3.0, -2.0, 0.0]);
        assert!(x.equimeasurable(&g(&[0.0, -2.0, 1.0, 3.0]), 0.0).unwrap());
        assert!(x.equimeasurable(&x.scale(-1.0).unwrap(), 0.0).unwrap());
        assert!(!g(&[1.0, 0.0, 0.0, 0.0])
            .equimeasurable(&g(&[1.0, 1.0, 0.0, 0.0]), 1e-12)
            .unwrap());
    }

    #[test]
    fn indicator_head_requires_grid_measure() {
        let x = GridFunction::indicator_head(8, 0.375).unwrap();
        assert_eq!(x.values(), &[1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(GridFunction::indicator_head(8, 0.3).is_err());
    }

    #[test]
    fn csv_and_json_roundtrip() {
        let x = g(&[0.1, -1e-300, 3.0e17, 1.0 / 3.0, -0.0]);
        let back = GridFunction::from_csv(&x.to_csv()).unwrap();
        assert!(x.values().iter().zip(back.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
        let back = GridFunction::from_json(&x.to_json()).unwrap();
        assert_eq!(back, x);
        assert!(x.to_csv().starts_with("n_cells=5\n"));
        assert!(GridFunction::from_json(r#"{"n_cells":3,"values":[1.0]}"#).is_err());
        assert!(GridFunction::from_csv("n_cells=2\n1.0\n").is_err());
    }

    #[test]
    fn cell_set_algebra() {
        let a = CellSet::from_indices(6, [0, 1, 2]).unwrap();
        let b = CellSet::from_indices(6, [2, 3]).unwrap();
        assert_eq!(a.measure(), 0.5);
        assert_eq!(a.union(&b).unwrap().count(), 4);
        assert_eq!(a.intersection(&b).unwrap().count(), 1);
        assert_eq!(a.difference(&b).unwrap().count(), 2);
        assert!(!a.is_disjoint(&b));
        assert!(a.difference(&b).unwrap().is_disjoint(&b));
        assert_eq!(a.complement().measure(), 0.5);
        assert!(CellSet::from_indices(3, [3]).is_err());
    }
}
