//! Row-major numeric tables shared across the crate.

use crate::error::{Error, Result};

/// An `n × d` table of real-valued observations, one row per sample point.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl SampleSet {
    /// Builds a sample set from row vectors. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Ok(SampleSet {
                values: Vec::new(),
                rows: 0,
                cols: 0,
            });
        }
        let cols = rows[0].len();
        let mut values = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    left: cols,
                    right: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Ok(SampleSet {
            values,
            rows: rows.len(),
            cols,
        })
    }

    /// Builds a sample set from a flat row-major buffer.
    pub fn from_flat(values: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::invalid(format!(
                "flat buffer of length {} cannot hold {} x {} values",
                values.len(),
                rows,
                cols
            )));
        }
        Ok(SampleSet { values, rows, cols })
    }

    /// Single-column sample set from a vector of scalars.
    pub fn from_scalars(values: &[f64]) -> Self {
        SampleSet {
            values: values.to_vec(),
            rows: values.len(),
            cols: 1,
        }
    }

    /// Number of sample points.
    pub fn n(&self) -> usize {
        self.rows
    }

    /// Dimension of each sample point.
    pub fn dim(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.cols.max(1))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Concatenates two sample sets with equal column dimension.
    pub fn concat(&self, other: &SampleSet) -> Result<SampleSet> {
        if !self.is_empty() && !other.is_empty() && self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                left: self.cols,
                right: other.cols,
            });
        }
        let cols = if self.is_empty() { other.cols } else { self.cols };
        let mut values = Vec::with_capacity(self.values.len() + other.values.len());
        values.extend_from_slice(&self.values);
        values.extend_from_slice(&other.values);
        Ok(SampleSet {
            values,
            rows: self.rows + other.rows,
            cols,
        })
    }

    /// New sample set holding the rows selected by `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> SampleSet {
        let mut values = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        SampleSet {
            values,
            rows: indices.len(),
            cols: self.cols,
        }
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows_iter().map(move |r| r[j])
    }
}

/// Dense rectangular matrix; used for Gram matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            values: vec![0.0; rows * cols],
            rows,
            cols,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.values[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_rows_rejects_ragged() {
        let err = SampleSet::from_rows(&[vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn subset_selects_in_order() {
        let s = SampleSet::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let sub = s.subset(&[2, 0]);
        assert_eq!(sub.row(0), &[3.0]);
        assert_eq!(sub.row(1), &[1.0]);
    }

    #[test]
    fn concat_checks_dims() {
        let a = SampleSet::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let b = SampleSet::from_rows(&[vec![1.0]]).unwrap();
        assert!(a.concat(&b).is_err());
        let c = SampleSet::from_rows(&[vec![3.0, 4.0]]).unwrap();
        let joined = a.concat(&c).unwrap();
        assert_eq!(joined.n(), 2);
        assert_eq!(joined.row(1), &[3.0, 4.0]);
    }
}
