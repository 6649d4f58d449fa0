//! Dissimilarity matrix construction and slicing.
//!
//! Rows are input samples, columns are prototypes; entry (i, j) is the TWEC
//! dissimilarity between sample i and prototype j. Rows double as embedding
//! vectors, columns (and column sub-blocks) as entropy-estimation samples.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{OdseError, Result};
use crate::graph::{LabelDissimConfig, LabeledGraph};
use crate::twec::{twec, TwecWeights};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissimilarityMatrix {
    values: Vec<f64>, // row-major, rows x cols
    rows: usize,
    cols: usize,
    row_ids: Vec<String>,
    col_ids: Vec<String>,
}

impl DissimilarityMatrix {
    pub fn from_rows(
        row_vectors: Vec<Vec<f64>>,
        row_ids: Vec<String>,
        col_ids: Vec<String>,
    ) -> Result<Self> {
        let rows = row_vectors.len();
        let cols = col_ids.len();
        if row_ids.len() != rows {
            return Err(OdseError::Config(format!(
                "row id count {} != row count {}",
                row_ids.len(),
                rows
            )));
        }
        let mut values = Vec::with_capacity(rows * cols);
        for r in &row_vectors {
            if r.len() != cols {
                return Err(OdseError::Config(format!(
                    "row length {} != column count {}",
                    r.len(),
                    cols
                )));
            }
            values.extend_from_slice(r);
        }
        Ok(DissimilarityMatrix {
            values,
            rows,
            cols,
            row_ids,
            col_ids,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[String] {
        &self.col_ids
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    /// Row i as an embedding vector of length `cols`.
    pub fn row_embedding(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    /// Column j materialized as a vector of length `rows`.
    pub fn column(&self, j: usize) -> Result<Vec<f64>> {
        if j >= self.cols {
            return Err(OdseError::ColumnOutOfRange {
                index: j,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    /// All columns materialized, in column order.
    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).collect())
            .collect()
    }

    /// The n x k sub-matrix keeping the given columns, in subset order.
    pub fn filter_columns(&self, subset: &[usize]) -> Result<DissimilarityMatrix> {
        let mut seen = std::collections::HashSet::new();
        for &j in subset {
            if j >= self.cols {
                return Err(OdseError::ColumnOutOfRange {
                    index: j,
                    cols: self.cols,
                });
            }
            if !seen.insert(j) {
                return Err(OdseError::Config(format!("duplicate column index {j}")));
            }
        }
        let mut values = Vec::with_capacity(self.rows * subset.len());
        for i in 0..self.rows {
            for &j in subset {
                values.push(self.get(i, j));
            }
        }
        Ok(DissimilarityMatrix {
            values,
            rows: self.rows,
            cols: subset.len(),
            row_ids: self.row_ids.clone(),
            col_ids: subset.iter().map(|&j| self.col_ids[j].clone()).collect(),
        })
    }

    /// CSV dump with prototype ids as the header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.col_ids.join(","));
        out.push('\n');
        for i in 0..self.rows {
            let row: Vec<String> = self
                .row_embedding(i)
                .iter()
                .map(|v| format!("{v}"))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Builds the samples x prototypes TWEC dissimilarity matrix.
///
/// Cells are independent; computation parallelizes over rows and is
/// bit-identical to the serial evaluation.
pub fn build_dm(
    samples: &[LabeledGraph],
    prototypes: &[LabeledGraph],
    w: &TwecWeights,
    cfg: &LabelDissimConfig,
) -> Result<DissimilarityMatrix> {
    if samples.is_empty() || prototypes.is_empty() {
        return Err(OdseError::EmptySample("dissimilarity matrix inputs"));
    }
    let rows: Vec<Vec<f64>> = samples
        .par_iter()
        .map(|s| {
            prototypes
                .iter()
                .map(|p| twec(s, p, w, cfg))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    DissimilarityMatrix::from_rows(
        rows,
        samples.iter().map(|g| g.id().to_string()).collect(),
        prototypes.iter().map(|g| g.id().to_string()).collect(),
    )
}
