use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{Comparison, ExperimentReport};
use crate::envelopes::{standard_nodes, MFunction};
use crate::error::{domain, Error, Result};
use crate::generators::{disjoint_blocks, nested_tail_sequence};
use crate::grid::{cells_for_measure, GridFunction};
use crate::spaces::SpaceSpec;
use crate::subspaces::{default_schedule, extract_almost_disjoint, BudgetRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceKind {
    /// Bumps on disjoint dyadic blocks over a small constant background.
    DeltaSystem { len: usize },
    /// `2^k χ_[0,4^{-k}]`, unit in `L₂`.
    NestedSpikes { len: usize },
    DisjointBlocks { len: usize },
    /// Truncations of `t^{-1/2}`; lives in `M(√t)` but not in its separable part.
    NestedTail { len: usize },
}

impl SequenceKind {
    fn len(self) -> usize {
        match self {
            SequenceKind::DeltaSystem { len }
            | SequenceKind::NestedSpikes { len }
            | SequenceKind::DisjointBlocks { len }
            | SequenceKind::NestedTail { len } => len,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    pub sequence: SequenceKind,
    pub n_cells: usize,
    pub space: SpaceSpec,
    pub schedule: Vec<f64>,
    pub rule: BudgetRule,
}

impl ExtractionConfig {
    /// Default space and schedule for each sequence: `L₂` except the nested
    /// tail, which is posed in `M(√t)` without the separable part.
    pub fn for_sequence(sequence: SequenceKind, n_cells: usize) -> Result<Self> {
        let (space, steps) = match sequence {
            SequenceKind::DeltaSystem { len } => (SpaceSpec::lp(2.0)?, len),
            SequenceKind::NestedSpikes { len } => (SpaceSpec::lp(2.0)?, len.min(3)),
            SequenceKind::DisjointBlocks { len } => (SpaceSpec::lp(2.0)?, len),
            SequenceKind::NestedTail { len } => (
                SpaceSpec::marcinkiewicz(MFunction::power(&standard_nodes(0, n_cells), 0.5)?, false),
                len.min(3),
            ),
        };
        Ok(Self {
            sequence,
            n_cells,
            space,
            schedule: default_schedule(steps),
            rule: BudgetRule::ExactSet,
        })
    }
}

/// `y_k = α_k χ_{B_k} + β_k`, `B_k = [1 − 2^{1−k}, 1 − 2^{-k})`, `β_k = 2^{-k}/4`,
/// with `α_k` chosen so that `‖y_k‖₂ = 1`.
pub fn delta_system_sequence(len: usize, n_cells: usize) -> Result<Vec<GridFunction>> {
    if len == 0 {
        return Err(domain("delta system needs len ≥ 1"));
    }
    (1..=len)
        .map(|k| {
            let m = 0.5f64.powi(k as i32);
            let start = n_cells - cells_for_measure(n_cells, 2.0 * m)?;
            let width = cells_for_measure(n_cells, m).ok().filter(|&c| c > 0).ok_or_else(|| {
                domain(format!("block 2^-{k} is below the resolution of {n_cells} cells"))
            })?;
            let beta = m / 4.0;
            let top = ((1.0 - beta * beta * (1.0 - m)) / m).sqrt();
            GridFunction::from_fn(n_cells, |j| {
                if (start..start + width).contains(&j) {
                    top
                } else {
                    beta
                }
            })
        })
        .collect()
}

fn build_sequence(kind: SequenceKind, n_cells: usize) -> Result<Vec<GridFunction>> {
    match kind {
        SequenceKind::DeltaSystem { len } => delta_system_sequence(len, n_cells),
        SequenceKind::NestedSpikes { len } => (1..=len)
            .map(|k| {
                let cells = cells_for_measure(n_cells, 0.25f64.powi(k as i32))?;
                if cells == 0 {
                    return Err(domain(format!("spike {k} is below grid resolution")));
                }
                let h = 2f64.powi(k as i32);
                GridFunction::from_fn(n_cells, |j| if j < cells { h } else { 0.0 })
            })
            .collect(),
        SequenceKind::DisjointBlocks { len } => Ok(disjoint_blocks(len, n_cells)?.generators().to_vec()),
        SequenceKind::NestedTail { len } => nested_tail_sequence(len, n_cells),
    }
}

/// Runs the extraction and records both guarantees, or the structured failure.
pub fn extraction_demo(cfg: &ExtractionConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    if cfg.sequence.len() == 0 {
        return Err(domain("empty sequence"));
    }
    let seq = build_sequence(cfg.sequence, cfg.n_cells)?;
    let mut r = ExperimentReport::new("extraction", cfg);
    match extract_almost_disjoint(&seq, &cfg.space, &cfg.schedule, cfg.rule) {
        Ok(out) => {
            let steps: Vec<f64> = (1..=out.indices.len()).map(|j| j as f64).collect();
            r.curve("index", "j", steps.clone(), out.indices.iter().map(|&i| i as f64).collect());
            r.curve("eps", "j", steps.clone(), out.eps.clone());
            r.curve("error", "j", steps.clone(), out.errors.clone());
            r.curve("removed_measure", "j", steps.clone(), out.removed_measure.clone());
            r.curve("support_measure", "j", steps, out.support_measure.clone());
            r.check("selected", out.indices.len() as f64, Comparison::AtLeast, cfg.schedule.len() as f64);
            r.check("pairwise_disjoint", out.pairwise_disjoint as u8 as f64, Comparison::AtLeast, 1.0);
            let worst = out
                .errors
                .iter()
                .zip(&out.eps)
                .map(|(e, eps)| e / (2.0 * eps))
                .fold(0.0, f64::max);
            r.check("max_error_over_2eps", worst, Comparison::AtMost, 1.0);
        }
        Err(Error::Validation(msg)) if !cfg.space.is_order_continuous() => {
            r.check("precondition_rejected", 1.0, Comparison::AtLeast, 1.0);
            r.note(msg);
        }
        Err(Error::ExtractionFailed { step, reason }) => {
            r.check("extraction_completed", 0.0, Comparison::AtLeast, 1.0);
            r.note(format!("failed at step {step}: {reason}"));
        }
        Err(e) => return Err(e),
    }
    Ok(r.finish(started))
}
