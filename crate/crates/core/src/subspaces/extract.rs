//! Extraction of an almost disjoint subsequence from a `Δ_E`-system.
//!
//! Each selected `y_j` gets a small set `d_j` outside of which its relative
//! norm is at most `ε_j`. With `D(j) = ∪_{m>j} d_m` the witnesses
//! `ŷ_j = y_j χ_{d_j \ D(j)}` are pairwise disjoint, and
//! `‖y_j − ŷ_j‖ ≤ ‖y_j χ_{e_j}‖ + ‖y_j χ_{D(j)}‖`, so keeping the second term
//! below `ε_j‖y_j‖` gives the `2ε_j` bound.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::grid::{CellSet, GridFunction};
use crate::spaces::{Profile, SpaceSpec};
use crate::subspaces::appendix::modulus_ac;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetRule {
    /// `Σ_{m>j} mes d_m ≤ v(y_j, ε_j)`, the absolute-continuity modulus.
    WorstCase,
    /// `‖y_j χ_{D(j)}‖_E ≤ ε_j‖y_j‖_E` checked on the actual sets.
    #[default]
    ExactSet,
}

/// `ε_j = 2^{-j}`, `j = 1..=n`.
pub fn default_schedule(n: usize) -> Vec<f64> {
    (1..=n).map(|j| 0.5f64.powi(j as i32)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extraction {
    pub rule: BudgetRule,
    pub indices: Vec<usize>,
    pub eps: Vec<f64>,
    /// `d_j`, the sets carrying all but `ε_j` of `y_j`.
    #[serde(skip)]
    pub removed: Vec<CellSet>,
    /// `c_j = d_j \ D(j)`, the witness supports.
    #[serde(skip)]
    pub supports: Vec<CellSet>,
    #[serde(skip)]
    pub witnesses: Vec<GridFunction>,
    pub removed_measure: Vec<f64>,
    pub support_measure: Vec<f64>,
    /// `‖y_j − ŷ_j‖_E/‖y_j‖_E`.
    pub errors: Vec<f64>,
    pub pairwise_disjoint: bool,
}

impl Extraction {
    pub fn within_bound(&self) -> bool {
        self.errors.iter().zip(&self.eps).all(|(e, eps)| *e <= 2.0 * eps)
    }
}

/// Smallest top-value set `d` with `‖yχ_{d^c}‖_E ≤ ε‖y‖_E`.
fn minimal_head_set(y: &GridFunction, space: &SpaceSpec, eps: f64) -> Result<CellSet> {
    let n = y.n_cells();
    let prof = Profile::of(y);
    let total = space.norm_profile(&prof)?;
    let fits = |k: usize| -> Result<bool> {
        Ok(space.norm_profile(&prof.remove_head(k as f64 / n as f64))? <= eps * total)
    };
    let (mut lo, mut hi) = (0usize, n);
    if fits(0)? {
        hi = 0;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if fits(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    CellSet::from_indices(n, y.rearrangement_order().into_iter().take(hi))
}

fn restricted_ratio(y: &GridFunction, set: &CellSet, space: &SpaceSpec) -> Result<f64> {
    Ok(space.norm(&y.restrict(set)?)? / space.norm(y)?)
}

/// Greedy extraction following the selection order of the sequence.
pub fn extract_almost_disjoint(
    seq: &[GridFunction],
    space: &SpaceSpec,
    schedule: &[f64],
    rule: BudgetRule,
) -> Result<Extraction> {
    if !space.is_order_continuous() {
        return Err(Error::Validation(format!(
            "{} is not order continuous; extraction requires E = E₀",
            space.label()
        )));
    }
    if seq.is_empty() || schedule.is_empty() {
        return Err(domain("empty sequence or schedule"));
    }
    if schedule.windows(2).any(|w| w[1] > w[0]) || schedule.iter().any(|&e| !(e > 0.0)) {
        return Err(domain("schedule must be positive and non-increasing"));
    }
    let n = seq[0].n_cells();
    if let Some(bad) = seq.iter().find(|y| y.n_cells() != n) {
        return Err(Error::Dimension { left: n, right: bad.n_cells() });
    }
    if let Some(i) = seq.iter().position(GridFunction::is_zero) {
        return Err(domain(format!("sequence element {i} is zero")));
    }

    let mut indices: Vec<usize> = Vec::new();
    let mut removed: Vec<CellSet> = Vec::new();
    let mut moduli: Vec<f64> = Vec::new();
    let mut next = 0;
    for (step, &eps) in schedule.iter().enumerate() {
        let mut chosen = None;
        let mut last_reason = String::from("sequence exhausted");
        'scan: for m in next..seq.len() {
            // the whole support first (exact witnesses), then the smallest admissible set
            let support = CellSet::new(seq[m].values().iter().map(|&v| v != 0.0).collect())?;
            let minimal = minimal_head_set(&seq[m], space, eps)?;
            for d in [support, minimal] {
                if d.count() == n {
                    last_reason = format!("element {m} has no proper set at ε={eps}");
                    continue;
                }
                match admits(seq, &indices, &removed, &moduli, &d, space, schedule, rule)? {
                    None => {
                        chosen = Some((m, d));
                        break 'scan;
                    }
                    Some(reason) => last_reason = format!("element {m}: {reason}"),
                }
            }
        }
        let Some((m, d)) = chosen else {
            return Err(Error::ExtractionFailed {
                step: step + 1,
                reason: last_reason,
            });
        };
        if rule == BudgetRule::WorstCase {
            let y = &seq[m];
            moduli.push(modulus_ac(y, space, eps * space.normalized_norm(y)?)?);
        }
        indices.push(m);
        removed.push(d);
        next = m + 1;
    }

    // c_j = d_j \ D(j), D(j) = ∪_{m>j} d_m
    let k = indices.len();
    let mut supports = vec![CellSet::empty(n); k];
    let mut later = CellSet::empty(n);
    for j in (0..k).rev() {
        supports[j] = removed[j].difference(&later)?;
        later = later.union(&removed[j])?;
    }
    let mut witnesses = Vec::with_capacity(k);
    let mut errors = Vec::with_capacity(k);
    for (j, &i) in indices.iter().enumerate() {
        let y = &seq[i];
        let w = y.restrict(&supports[j])?;
        errors.push(space.norm(&y.sub(&w)?)? / space.norm(y)?);
        witnesses.push(w);
    }
    let pairwise_disjoint = (0..k).all(|a| (a + 1..k).all(|b| supports[a].is_disjoint(&supports[b])));
    let out = Extraction {
        rule,
        eps: schedule[..k].to_vec(),
        removed_measure: removed.iter().map(CellSet::measure).collect(),
        support_measure: supports.iter().map(CellSet::measure).collect(),
        indices,
        removed,
        supports,
        witnesses,
        errors,
        pairwise_disjoint,
    };
    if !out.pairwise_disjoint {
        return Err(Error::ExtractionFailed {
            step: k,
            reason: "witness supports overlap".into(),
        });
    }
    if let Some(j) = out.errors.iter().zip(&out.eps).position(|(e, eps)| *e > 2.0 * eps) {
        return Err(Error::ExtractionFailed {
            step: j + 1,
            reason: format!("error {} exceeds 2ε = {}", out.errors[j], 2.0 * out.eps[j]),
        });
    }
    Ok(out)
}

/// `None` if adding `d` keeps every earlier budget, otherwise the reason it does not.
#[allow(clippy::too_many_arguments)]
fn admits(
    seq: &[GridFunction],
    indices: &[usize],
    removed: &[CellSet],
    moduli: &[f64],
    d: &CellSet,
    space: &SpaceSpec,
    schedule: &[f64],
    rule: BudgetRule,
) -> Result<Option<String>> {
    match rule {
        BudgetRule::WorstCase => {
            let mut tail = d.measure();
            for j in (0..indices.len()).rev() {
                if tail > moduli[j] {
                    return Ok(Some(format!(
                        "tail measure {tail} exceeds modulus {} of selection {}",
                        moduli[j],
                        j + 1
                    )));
                }
                tail += removed[j].measure();
            }
        }
        BudgetRule::ExactSet => {
            let mut later = d.clone();
            for j in (0..indices.len()).rev() {
                let r = restricted_ratio(&seq[indices[j]], &later, space)?;
                if r > schedule[j] {
                    return Ok(Some(format!(
                        "overlap ratio {r} exceeds ε = {} of selection {}",
                        schedule[j],
                        j + 1
                    )));
                }
                later = later.union(&removed[j])?;
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelopes::{standard_nodes, MFunction};
    use crate::generators::{disjoint_blocks, nested_tail_sequence};

    #[test]
    fn disjoint_input_is_returned_unchanged() {
        let blocks = disjoint_blocks(4, 64).unwrap();
        let out = extract_almost_disjoint(blocks.generators(), &SpaceSpec::lp(2.0).unwrap(), &default_schedule(4), BudgetRule::ExactSet).unwrap();
        assert_eq!(out.indices, vec![0, 1, 2, 3]);
        assert!(out.errors.iter().all(|&e| e < 1e-12));
        for (w, y) in out.witnesses.iter().zip(blocks.generators()) {
            assert_eq!(w, y);
        }
    }

    #[test]
    fn nested_spikes_in_l2() {
        let n_cells = 1 << 16;
        let seq: Vec<GridFunction> = (1..=8)
            .map(|k| {
                let cells = n_cells >> (2 * k);
                let h = 2f64.powi(k as i32);
                GridFunction::from_fn(n_cells, |j| if j < cells { h } else { 0.0 }).unwrap()
            })
            .collect();
        let out = extract_almost_disjoint(&seq, &SpaceSpec::lp(2.0).unwrap(), &default_schedule(3), BudgetRule::ExactSet).unwrap();
        assert!(out.pairwise_disjoint && out.within_bound());
        assert!(out.indices.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn nested_tail_is_rejected_without_order_continuity() {
        let n_cells = 1 << 10;
        let seq = nested_tail_sequence(4, n_cells).unwrap();
        let phi = MFunction::power(&standard_nodes(0, n_cells), 0.5).unwrap();
        let err = extract_almost_disjoint(&seq, &SpaceSpec::marcinkiewicz(phi, false), &default_schedule(3), BudgetRule::ExactSet);
        assert!(matches!(err, Err(Error::Validation(_))));
    }
}
