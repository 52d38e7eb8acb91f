use serde::{Deserialize, Serialize};

use crate::error::{degenerate, domain, Error, Result};
use crate::grid::GridFunction;

const GRAM_DET_MIN: f64 = 1e-12;

/// A finite set of generators spanning a subspace of `L₁`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceSample {
    generators: Vec<GridFunction>,
    label: String,
    #[serde(default)]
    warnings: Vec<String>,
}

impl SubspaceSample {
    pub fn new(generators: Vec<GridFunction>, label: impl Into<String>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(domain("subspace needs at least one generator"));
        };
        let n = first.n_cells();
        for (i, g) in generators.iter().enumerate() {
            if g.n_cells() != n {
                return Err(Error::Dimension {
                    left: n,
                    right: g.n_cells(),
                });
            }
            if g.is_zero() {
                return Err(degenerate(format!("generator {i} is identically zero")));
            }
        }
        let mut sample = Self {
            generators,
            label: label.into(),
            warnings: Vec::new(),
        };
        let det = sample.gram_determinant();
        if det <= GRAM_DET_MIN {
            sample.warnings.push(format!(
                "generators nearly dependent: normalized Gram determinant {det:e}"
            ));
        }
        Ok(sample)
    }

    pub fn generators(&self) -> &[GridFunction] {
        &self.generators
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn n_cells(&self) -> usize {
        self.generators[0].n_cells()
    }

    /// `Σ cᵢ gᵢ` as raw cell values.
    pub fn combine_values(&self, c: &[f64]) -> Result<Vec<f64>> {
        if c.len() != self.dim() {
            return Err(Error::Dimension {
                left: self.dim(),
                right: c.len(),
            });
        }
        let mut out = vec![0.0; self.n_cells()];
        for (g, &ci) in self.generators.iter().zip(c) {
            if ci == 0.0 {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(g.values()) {
                *o += ci * v;
            }
        }
        Ok(out)
    }

    pub fn combine(&self, c: &[f64]) -> Result<GridFunction> {
        GridFunction::new(self.combine_values(c)?)
    }

    /// Determinant of the Gram matrix of the `L₂`-normalized generators; lies in `[0, 1]`.
    pub fn gram_determinant(&self) -> f64 {
        let unit: Vec<Vec<f64>> = self
            .generators
            .iter()
            .map(|g| {
                let norm = g.values().iter().map(|v| v * v).sum::<f64>().sqrt();
                g.values().iter().map(|v| v / norm).collect()
            })
            .collect();
        let k = unit.len();
        let mut gram = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i..k {
                let d: f64 = unit[i].iter().zip(&unit[j]).map(|(a, b)| a * b).sum();
                gram[i][j] = d;
                gram[j][i] = d;
            }
        }
        determinant(gram)
    }
}

fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let k = a.len();
    let mut det = 1.0;
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..k {
            let factor = a[row][col] / a[col][col];
            for c in col..k {
                a[row][c] -= factor * a[col][c];
            }
        }
    }
    det
}
