//! Kernel evaluation, Gram matrices, and median-heuristic bandwidth selection.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Matrix, SampleSet};
use crate::error::{Error, Result};

/// A kernel family together with its parameters.
///
/// * `Rbf`: k(x, y) = exp(-||x - y||² / (2σ²))
/// * `Laplacian`: k(x, y) = exp(-||x - y||₂ / σ)
/// * `Linear`: k(x, y) = ⟨x, y⟩
/// * `Polynomial`: k(x, y) = (⟨x, y⟩ + c)^T
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum KernelSpec {
    Rbf { bandwidth: f64 },
    Laplacian { bandwidth: f64 },
    Linear,
    Polynomial { degree: u32, offset: f64 },
}

impl KernelSpec {
    pub fn rbf(bandwidth: f64) -> Result<Self> {
        let k = KernelSpec::Rbf { bandwidth };
        k.validate()?;
        Ok(k)
    }

    pub fn laplacian(bandwidth: f64) -> Result<Self> {
        let k = KernelSpec::Laplacian { bandwidth };
        k.validate()?;
        Ok(k)
    }

    pub fn linear() -> Self {
        KernelSpec::Linear
    }

    pub fn polynomial(degree: u32, offset: f64) -> Result<Self> {
        let k = KernelSpec::Polynomial { degree, offset };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Rbf { bandwidth } | KernelSpec::Laplacian { bandwidth } => {
                if !(bandwidth > 0.0) || !bandwidth.is_finite() {
                    return Err(Error::invalid(format!(
                        "bandwidth must be a positive finite number, got {bandwidth}"
                    )));
                }
            }
            KernelSpec::Linear => {}
            KernelSpec::Polynomial { degree, offset } => {
                if degree < 1 {
                    return Err(Error::invalid("polynomial degree must be at least 1"));
                }
                if !offset.is_finite() {
                    return Err(Error::invalid("polynomial offset must be finite"));
                }
            }
        }
        Ok(())
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            KernelSpec::Rbf { .. } => "rbf",
            KernelSpec::Laplacian { .. } => "laplacian",
            KernelSpec::Linear => "linear",
            KernelSpec::Polynomial { .. } => "poly",
        }
    }

    /// Evaluates k(x, y). The two points must have equal dimension.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        Ok(self.eval_unchecked(x, y))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Rbf { bandwidth } => {
                let sq: f64 = x
                    .iter()
                    .zip(y.iter())
                    .map(|(a, b)| {
                        let d = a - b;
                        d * d
                    })
                    .sum();
                (-sq / (2.0 * bandwidth * bandwidth)).exp()
            }
            KernelSpec::Laplacian { bandwidth } => {
                let sq: f64 = x
                    .iter()
                    .zip(y.iter())
                    .map(|(a, b)| {
                        let d = a - b;
                        d * d
                    })
                    .sum();
                (-sq.sqrt() / bandwidth).exp()
            }
            KernelSpec::Linear => dot(x, y),
            KernelSpec::Polynomial { degree, offset } => (dot(x, y) + offset).powi(degree as i32),
        }
    }
}

#[inline]
fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b).sum()
}

/// Gram matrix with entry (i, j) = k(xᵢ, yⱼ).
pub fn gram(kernel: &KernelSpec, x: &SampleSet, y: &SampleSet) -> Result<Matrix> {
    kernel.validate()?;
    if !x.is_empty() && !y.is_empty() && x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    let mut out = Matrix::zeros(x.n(), y.n());
    for i in 0..x.n() {
        let xi = x.row(i);
        for j in 0..y.n() {
            out.set(i, j, kernel.eval_unchecked(xi, y.row(j)));
        }
    }
    Ok(out)
}

/// Median-heuristic bandwidth: the median of the squared pairwise Euclidean
/// distances over the pooled sample. Self-pairs (distance zero) are excluded.
pub fn median_heuristic(x: &SampleSet, y: &SampleSet) -> Result<f64> {
    median_heuristic_with_diagonal(x, y, false)
}

/// Median heuristic with control over self-pairs. `include_diagonal` restores
/// the literal all-ordered-pairs reading: every unordered pair counted twice
/// plus one zero per pooled point.
pub fn median_heuristic_with_diagonal(
    x: &SampleSet,
    y: &SampleSet,
    include_diagonal: bool,
) -> Result<f64> {
    if !x.is_empty() && !y.is_empty() && x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    let points: Vec<&[f64]> = x.rows_iter().chain(y.rows_iter()).collect();
    let n = points.len();
    if n < 2 {
        return Err(Error::EmptyInput("median heuristic needs at least two pooled points"));
    }
    let mut dists = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let sq: f64 = points[i]
                .iter()
                .zip(points[j].iter())
                .map(|(a, b)| {
                    let d = a - b;
                    d * d
                })
                .sum();
            dists.push(sq);
        }
    }
    if include_diagonal {
        let mut all = Vec::with_capacity(2 * dists.len() + n);
        for &d in &dists {
            all.push(d);
            all.push(d);
        }
        all.resize(2 * dists.len() + n, 0.0);
        dists = all;
    }
    let median = median_in_place(&mut dists);
    if !(median > 0.0) {
        return Err(Error::DegenerateData(
            "all pairwise distances are zero; cannot pick a bandwidth".into(),
        ));
    }
    Ok(median)
}

/// Median of a scratch buffer; even counts average the two central order
/// statistics.
fn median_in_place(values: &mut [f64]) -> f64 {
    let m = values.len();
    let mid = m / 2;
    let (left, kth, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    if m % 2 == 1 {
        *kth
    } else {
        let below = left.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (below + *kth) / 2.0
    }
}

/// How to obtain a bandwidth for kernels that need one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Bandwidth {
    /// Median heuristic on the pooled sample.
    Median,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelFamily {
    Rbf,
    Laplacian,
    Linear,
    Polynomial,
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rbf" => Ok(KernelFamily::Rbf),
            "laplacian" => Ok(KernelFamily::Laplacian),
            "linear" => Ok(KernelFamily::Linear),
            "poly" | "polynomial" => Ok(KernelFamily::Polynomial),
            other => Err(Error::invalid(format!(
                "unknown kernel family '{other}' (expected rbf|laplacian|linear|poly)"
            ))),
        }
    }
}

/// A kernel whose bandwidth may still need to be resolved from data.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelConfig {
    pub family: KernelFamily,
    pub bandwidth: Bandwidth,
    pub degree: u32,
    pub offset: f64,
    /// Count self-pairs when taking the median (see `median_heuristic_with_diagonal`).
    pub median_include_diagonal: bool,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            family: KernelFamily::Rbf,
            bandwidth: Bandwidth::Median,
            degree: 3,
            offset: 1.0,
            median_include_diagonal: false,
        }
    }
}

impl KernelConfig {
    /// Resolves the configuration into a concrete kernel, computing the
    /// median-heuristic bandwidth from the pooled `(x, y)` sample when asked.
    pub fn resolve(&self, x: &SampleSet, y: &SampleSet) -> Result<KernelSpec> {
        match self.family {
            KernelFamily::Linear => Ok(KernelSpec::Linear),
            KernelFamily::Polynomial => KernelSpec::polynomial(self.degree, self.offset),
            KernelFamily::Rbf | KernelFamily::Laplacian => {
                let bw = match self.bandwidth {
                    Bandwidth::Fixed(v) => v,
                    Bandwidth::Median => {
                        median_heuristic_with_diagonal(x, y, self.median_include_diagonal)?
                    }
                };
                match self.family {
                    KernelFamily::Rbf => KernelSpec::rbf(bw),
                    _ => KernelSpec::laplacian(bw),
                }
            }
        }
    }

    /// As [`KernelConfig::resolve`] for an already-pooled sample.
    pub fn resolve_pooled(&self, pooled: &SampleSet) -> Result<KernelSpec> {
        let empty = SampleSet::from_rows(&[])?;
        self.resolve(pooled, &empty)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(rows: &[&[f64]]) -> SampleSet {
        SampleSet::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rbf_at_coincident_points_is_one() {
        let k = KernelSpec::rbf(1.0).unwrap();
        assert_eq!(k.eval(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn polynomial_cubed() {
        let k = KernelSpec::polynomial(3, 1.0).unwrap();
        assert_eq!(k.eval(&[1.0], &[1.0]).unwrap(), 8.0);
    }

    #[test]
    fn linear_is_dot_product() {
        let k = KernelSpec::linear();
        assert_eq!(k.eval(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
    }

    #[test]
    fn eval_rejects_dimension_mismatch() {
        let k = KernelSpec::linear();
        assert!(k.eval(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn eval_is_symmetric() {
        let kernels = [
            KernelSpec::rbf(0.7).unwrap(),
            KernelSpec::laplacian(1.3).unwrap(),
            KernelSpec::linear(),
            KernelSpec::polynomial(3, 1.0).unwrap(),
        ];
        let x = [0.3, -1.2, 2.0];
        let y = [1.1, 0.4, -0.5];
        for k in &kernels {
            assert_eq!(k.eval(&x, &y).unwrap(), k.eval(&y, &x).unwrap());
        }
    }

    #[test]
    fn rbf_bounded_by_one() {
        let k = KernelSpec::rbf(2.0).unwrap();
        let v = k.eval(&[0.0], &[3.0]).unwrap();
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn gram_linear_matches_hand_values() {
        let x = set(&[&[1.0], &[2.0]]);
        let g = gram(&KernelSpec::linear(), &x, &x).unwrap();
        assert_eq!(g.get(0, 0), 1.0);
        assert_eq!(g.get(0, 1), 2.0);
        assert_eq!(g.get(1, 0), 2.0);
        assert_eq!(g.get(1, 1), 4.0);
    }

    #[test]
    fn gram_rbf_unit_diagonal_and_transpose() {
        let k = KernelSpec::rbf(1.0).unwrap();
        let x = set(&[&[0.0, 1.0], &[2.0, -1.0], &[0.5, 0.5]]);
        let y = set(&[&[1.0, 1.0], &[-2.0, 0.0]]);
        let gxx = gram(&k, &x, &x).unwrap();
        for i in 0..3 {
            assert_eq!(gxx.get(i, i), 1.0);
        }
        let gxy = gram(&k, &x, &y).unwrap();
        let gyx = gram(&k, &y, &x).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                assert_eq!(gxy.get(i, j), gyx.get(j, i));
            }
        }
    }

    #[test]
    fn median_of_single_pair() {
        let x = set(&[&[0.0]]);
        let y = set(&[&[2.0]]);
        assert_eq!(median_heuristic(&x, &y).unwrap(), 4.0);
    }

    #[test]
    fn median_of_three_points() {
        // pooled {0, 1, 3}: squared distances {1, 9, 4}, median 4
        let x = set(&[&[0.0], &[1.0]]);
        let y = set(&[&[3.0]]);
        assert_eq!(median_heuristic(&x, &y).unwrap(), 4.0);
    }

    #[test]
    fn median_with_duplicate_points() {
        // pooled {5, 5, 1}: squared distances {0, 16, 16}, median 16
        let x = set(&[&[5.0], &[5.0]]);
        let y = set(&[&[1.0]]);
        assert_eq!(median_heuristic(&x, &y).unwrap(), 16.0);
    }

    #[test]
    fn median_including_diagonal() {
        // pooled {0, 1, 3}: ordered pairs give {0,0,0, 1,1, 4,4, 9,9}, median 1
        let x = set(&[&[0.0], &[1.0]]);
        let y = set(&[&[3.0]]);
        assert_eq!(median_heuristic_with_diagonal(&x, &y, true).unwrap(), 1.0);
    }

    #[test]
    fn median_rejects_identical_points() {
        let x = set(&[&[2.0], &[2.0]]);
        let y = set(&[&[2.0]]);
        assert!(matches!(
            median_heuristic(&x, &y),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn median_even_count_averages_central_pair() {
        // pooled {0, 1, 2, 3}: squared distances {1, 4, 9, 1, 4, 1} -> sorted
        // {1,1,1,4,4,9}, median (1+4)/2 = 2.5
        let x = set(&[&[0.0], &[1.0]]);
        let y = set(&[&[2.0], &[3.0]]);
        assert_eq!(median_heuristic(&x, &y).unwrap(), 2.5);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(KernelSpec::rbf(0.0).is_err());
        assert!(KernelSpec::rbf(-1.0).is_err());
        assert!(KernelSpec::laplacian(f64::NAN).is_err());
        assert!(KernelSpec::polynomial(0, 1.0).is_err());
    }

    #[test]
    fn config_resolves_median_bandwidth() {
        let x = set(&[&[0.0]]);
        let y = set(&[&[2.0]]);
        let cfg = KernelConfig::default();
        match cfg.resolve(&x, &y).unwrap() {
            KernelSpec::Rbf { bandwidth } => assert_eq!(bandwidth, 4.0),
            other => panic!("expected rbf, got {other:?}"),
        }
    }
}
