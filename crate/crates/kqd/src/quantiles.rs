//! Order statistics, empirical quantiles, and projection of samples through
//! RKHS directions.
//!
//! Throughout the crate the j-th order statistic `[v]_j` is the j-th
//! *smallest* element of `v`, and the empirical α-quantile of n values is
//! `[v]_{⌈αn⌉}` (clamped to the first order statistic for α = 0).

use crate::data::SampleSet;
use crate::directions::Direction;
use crate::error::{Error, Result};

/// One-dimensional images u(x₁), …, u(xₙ) of a sample under a direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedSample {
    values: Vec<f64>,
    sorted: bool,
}

impl ProjectedSample {
    pub fn new(values: Vec<f64>) -> Self {
        ProjectedSample {
            values,
            sorted: false,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_sorted(&self) -> bool {
        self.sorted
    }

    /// Sorts the values ascending. Done once; every order statistic afterwards
    /// is an array lookup.
    pub fn sort(&mut self) {
        if !self.sorted {
            self.values.sort_unstable_by(f64::total_cmp);
            self.sorted = true;
        }
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// j-th smallest element, j in 1..=n.
pub fn order_statistic(values: &[f64], j: usize) -> Result<f64> {
    let n = values.len();
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, len: n });
    }
    let mut scratch = values.to_vec();
    let (_, kth, _) = scratch.select_nth_unstable_by(j - 1, f64::total_cmp);
    Ok(*kth)
}

/// Empirical α-quantile: the ⌈αn⌉-th smallest value, clamped to the first
/// order statistic when α = 0.
pub fn empirical_quantile(values: &[f64], alpha: f64) -> Result<f64> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptyInput("empirical quantile of an empty vector"));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!(
            "quantile level must lie in [0, 1], got {alpha}"
        )));
    }
    // The subtraction guards against upward rounding in α·n (0.95 · 300
    // evaluates to 285.00000000000003, whose ceiling would skip an index).
    let scaled = alpha * n as f64;
    let j = ((scaled - 1e-9).ceil().max(1.0) as usize).min(n);
    order_statistic(values, j)
}

/// Projects every row of `points` through `direction`.
pub fn project(direction: &Direction, points: &SampleSet) -> Result<ProjectedSample> {
    Ok(ProjectedSample::new(direction.evaluate_batch(points)?))
}
