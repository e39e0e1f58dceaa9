use crate::error::{Error, Result};

use super::prior::SUM_TOLERANCE;

/// Conditional distribution `P(Y = y | X = x)` of a discrete-output mechanism,
/// stored row-major with one row per input `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ChannelMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDistribution(
                "channel must be non-empty".into(),
            ));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        for (x, row) in data.chunks_exact(cols).enumerate() {
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "row {x} has an entry outside [0, inf)"
                )));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::InvalidDistribution(format!(
                    "row {x} sums to {total}, expected 1"
                )));
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                got: bad.len(),
            });
        }
        Self::new(n, cols, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.cols..(x + 1) * self.cols]
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.cols + y]
    }

    /// Output distribution `P(Y = y)` under input weights `p`.
    pub fn output_marginal(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (x, &px) in p.iter().enumerate() {
            if px == 0.0 {
                continue;
            }
            for (o, w) in out.iter_mut().zip(self.row(x)) {
                *o += px * w;
            }
        }
        out
    }

    /// Applies a deterministic post-processing map `y -> map[y]` onto `n_out` outputs.
    pub fn merge_columns(&self, map: &[usize], n_out: usize) -> Result<Self> {
        if map.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: map.len(),
            });
        }
        if let Some(&bad) = map.iter().find(|&&j| j >= n_out) {
            return Err(Error::invalid(format!("column target {bad} >= {n_out}")));
        }
        let mut data = vec![0.0; self.rows * n_out];
        for x in 0..self.rows {
            for (y, &w) in self.row(x).iter().enumerate() {
                data[x * n_out + map[y]] += w;
            }
        }
        Self::new(self.rows, n_out, data)
    }

    /// Reorders rows so that row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: perm.len(),
            });
        }
        let data = perm
            .iter()
            .flat_map(|&j| self.row(j).iter().copied())
            .collect();
        Self::new(self.rows, self.cols, data)
    }
}
