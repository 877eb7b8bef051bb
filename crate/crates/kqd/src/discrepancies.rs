//! Discrepancy statistics between two samples: expected and supremum kernel
//! quantile discrepancies, their centered p = 2 variant, the MMD estimator
//! family, and one-dimensional / sliced Wasserstein distances.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::SampleSet;
use crate::directions::Direction;
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;

/// Density f_ν over quantile levels [0, 1].
///
/// `Uniform` weighs all levels equally; `Triangle` peaks at the median and
/// vanishes at the extremes; `ReverseTriangle` is its reflection and
/// up-weighs extreme quantiles. All densities integrate to one.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantileWeighting {
    Uniform,
    Triangle,
    ReverseTriangle,
    Custom(WeightingTable),
}

impl QuantileWeighting {
    pub fn density(&self, t: f64) -> f64 {
        match self {
            QuantileWeighting::Uniform => 1.0,
            QuantileWeighting::Triangle => {
                if !(0.0..=1.0).contains(&t) {
                    0.0
                } else if t <= 0.5 {
                    4.0 * t
                } else {
                    4.0 * (1.0 - t)
                }
            }
            QuantileWeighting::ReverseTriangle => {
                if !(0.0..=1.0).contains(&t) {
                    0.0
                } else if t <= 0.5 {
                    2.0 - 4.0 * t
                } else {
                    4.0 * t - 2.0
                }
            }
            QuantileWeighting::Custom(table) => table.density(t),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            QuantileWeighting::Uniform => "uniform",
            QuantileWeighting::Triangle => "triangle",
            QuantileWeighting::ReverseTriangle => "reverse-triangle",
            QuantileWeighting::Custom(_) => "custom",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "uniform" => Ok(QuantileWeighting::Uniform),
            "triangle" => Ok(QuantileWeighting::Triangle),
            "reverse-triangle" => Ok(QuantileWeighting::ReverseTriangle),
            other => Err(Error::invalid(format!(
                "unknown quantile weighting '{other}' (expected uniform|triangle|reverse-triangle)"
            ))),
        }
    }
}

/// Piecewise-linear density table on a grid spanning [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightingTable {
    grid: Vec<f64>,
    density: Vec<f64>,
}

impl WeightingTable {
    /// Validates the grid and checks the trapezoid-rule integral is 1 ± 1e-6.
    pub fn new(grid: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if grid.len() != density.len() || grid.len() < 2 {
            return Err(Error::invalid(
                "weighting table needs matching grid/density of length at least 2",
            ));
        }
        if grid[0] != 0.0 || *grid.last().unwrap() != 1.0 {
            return Err(Error::invalid("weighting grid must span [0, 1]"));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("weighting grid must be strictly increasing"));
        }
        if density.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("weighting density must be finite and nonnegative"));
        }
        let integral: f64 = grid
            .windows(2)
            .zip(density.windows(2))
            .map(|(g, d)| (g[1] - g[0]) * (d[0] + d[1]) / 2.0)
            .sum();
        if (integral - 1.0).abs() > 1e-6 {
            return Err(Error::invalid(format!(
                "weighting density integrates to {integral}, expected 1"
            )));
        }
        Ok(WeightingTable { grid, density })
    }

    pub fn density(&self, t: f64) -> f64 {
        if !(0.0..=1.0).contains(&t) {
            return 0.0;
        }
        let hi = self.grid.partition_point(|g| *g < t).min(self.grid.len() - 1);
        if hi == 0 {
            return self.density[0];
        }
        let lo = hi - 1;
        let span = self.grid[hi] - self.grid[lo];
        let w = (t - self.grid[lo]) / span;
        self.density[lo] * (1.0 - w) + self.density[hi] * w
    }
}

/// Parameters of a kernel quantile discrepancy estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct KqdConfig {
    /// Power p of the discrepancy.
    pub p: u32,
    /// Number of directions to sample.
    pub l: usize,
    /// Number of landmarks per direction.
    pub m: usize,
    pub weighting: QuantileWeighting,
    pub seed: u64,
}

impl KqdConfig {
    /// Defaults for a sample of size n: p = 2, l = m = ⌈ln n⌉, uniform ν.
    pub fn for_sample_size(n: usize, seed: u64) -> Self {
        let count = crate::directions::default_projection_count(n);
        KqdConfig {
            p: 2,
            l: count,
            m: count,
            weighting: QuantileWeighting::Uniform,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 1 {
            return Err(Error::invalid("power p must be at least 1"));
        }
        if self.l < 1 || self.m < 1 {
            return Err(Error::invalid("direction and landmark counts must be at least 1"));
        }
        Ok(())
    }
}

/// A discrepancy on both scales: `distance` is the p-th root of the
/// (zero-clamped) `pth_power`, which itself is kept raw and may be negative
/// for estimators built from U-statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerDistance {
    pub distance: f64,
    pub pth_power: f64,
}

impl PowerDistance {
    fn from_power(pth_power: f64, p: u32) -> Self {
        PowerDistance {
            distance: pth_power.max(0.0).powf(1.0 / p as f64),
            pth_power,
        }
    }
}

/// Per-direction weighted quantile mismatch:
/// (1/n) Σⱼ |[x]ⱼ - [y]ⱼ|ᵖ f_ν(j/n) over sorted projections.
pub(crate) fn weighted_quantile_term(
    sorted_x: &[f64],
    sorted_y: &[f64],
    p: u32,
    weighting: &QuantileWeighting,
) -> f64 {
    let n = sorted_x.len();
    let mut acc = 0.0;
    for j in 1..=n {
        let delta = (sorted_x[j - 1] - sorted_y[j - 1]).abs().powi(p as i32);
        acc += delta * weighting.density(j as f64 / n as f64);
    }
    acc / n as f64
}

fn check_equal_sizes(x: &SampleSet, y: &SampleSet) -> Result<usize> {
    if x.n() != y.n() {
        return Err(Error::invalid(format!(
            "quantile discrepancies need equal sample sizes, got {} and {}",
            x.n(),
            y.n()
        )));
    }
    if x.is_empty() {
        return Err(Error::EmptyInput("discrepancy of empty samples"));
    }
    Ok(x.n())
}

fn projected_terms(
    x: &SampleSet,
    y: &SampleSet,
    p: u32,
    weighting: &QuantileWeighting,
    directions: &[Direction],
) -> Result<Vec<f64>> {
    if directions.is_empty() {
        return Err(Error::EmptyInput("at least one direction is required"));
    }
    let mut terms = Vec::with_capacity(directions.len());
    for dir in directions {
        let mut px = dir.evaluate_batch(x)?;
        let mut py = dir.evaluate_batch(y)?;
        px.sort_unstable_by(f64::total_cmp);
        py.sort_unstable_by(f64::total_cmp);
        terms.push(weighted_quantile_term(&px, &py, p, weighting));
    }
    Ok(terms)
}

/// Expected kernel quantile discrepancy over the given directions:
/// the p-th root of (1/(l·n)) Σᵢ Σⱼ |[uᵢ(x)]ⱼ - [uᵢ(y)]ⱼ|ᵖ f_ν(j/n).
///
/// Directions are sampled separately (see [`crate::directions`]) so that a
/// permutation test can reuse one draw across relabelings.
pub fn ekqd(
    x: &SampleSet,
    y: &SampleSet,
    cfg: &KqdConfig,
    directions: &[Direction],
) -> Result<PowerDistance> {
    cfg.validate()?;
    check_equal_sizes(x, y)?;
    let terms = projected_terms(x, y, cfg.p, &cfg.weighting, directions)?;
    let mean = terms.iter().sum::<f64>() / terms.len() as f64;
    Ok(PowerDistance::from_power(mean, cfg.p))
}

/// Supremum variant: the p-th root of the largest per-direction term.
pub fn supkqd(
    x: &SampleSet,
    y: &SampleSet,
    cfg: &KqdConfig,
    directions: &[Direction],
) -> Result<PowerDistance> {
    cfg.validate()?;
    check_equal_sizes(x, y)?;
    let terms = projected_terms(x, y, cfg.p, &cfg.weighting, directions)?;
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(PowerDistance::from_power(max, cfg.p))
}

/// Centered discrepancy for p = 2, combining the plain quantile term with the
/// unbiased MMD and a mean-difference correction:
/// √max(0, e-KQD₂² + MMD²_U - (1/l) Σᵢ (mean uᵢ(x) - mean uᵢ(y))²).
pub fn ekqd_centered(
    x: &SampleSet,
    y: &SampleSet,
    kernel: &KernelSpec,
    cfg: &KqdConfig,
    directions: &[Direction],
) -> Result<PowerDistance> {
    cfg.validate()?;
    if cfg.p != 2 {
        return Err(Error::UnsupportedConfiguration(
            "the centered discrepancy is defined for p = 2 only".into(),
        ));
    }
    let n = check_equal_sizes(x, y)?;
    if directions.is_empty() {
        return Err(Error::EmptyInput("at least one direction is required"));
    }
    let mut quantile_acc = 0.0;
    let mut mean_diff_acc = 0.0;
    for dir in directions {
        let mut px = dir.evaluate_batch(x)?;
        let mut py = dir.evaluate_batch(y)?;
        px.sort_unstable_by(f64::total_cmp);
        py.sort_unstable_by(f64::total_cmp);
        quantile_acc += weighted_quantile_term(&px, &py, 2, &cfg.weighting);
        let mx = px.iter().sum::<f64>() / n as f64;
        let my = py.iter().sum::<f64>() / n as f64;
        let d = mx - my;
        mean_diff_acc += d * d;
    }
    let l = directions.len() as f64;
    let mmd = mmd2_u(x, y, kernel)?;
    let raw = (quantile_acc / l + mmd) - mean_diff_acc / l;
    Ok(PowerDistance::from_power(raw, 2))
}

/// Sums used by the MMD estimators over one pair of equally sized samples:
/// `two_off` is Σ_{i≠j} k(aᵢ, bⱼ) accumulated over unordered pairs, `diag` is
/// Σᵢ k(aᵢ, bᵢ). The unordered-pair accumulation makes every estimator built
/// from these sums bitwise symmetric in its arguments.
fn paired_sums(kernel: &KernelSpec, a: &SampleSet, b: &SampleSet) -> (f64, f64) {
    let n = a.n();
    let mut two_off = 0.0;
    for i in 0..n {
        let ai = a.row(i);
        for j in (i + 1)..n {
            two_off += kernel.eval_unchecked(ai, b.row(j)) + kernel.eval_unchecked(a.row(j), b.row(i));
        }
    }
    let mut diag = 0.0;
    for i in 0..n {
        diag += kernel.eval_unchecked(a.row(i), b.row(i));
    }
    (two_off, diag)
}

fn check_mmd_inputs(x: &SampleSet, y: &SampleSet, min_n: usize) -> Result<()> {
    if x.n() < min_n || y.n() < min_n {
        return Err(Error::invalid(format!(
            "MMD estimator needs at least {min_n} points per sample, got {} and {}",
            x.n(),
            y.n()
        )));
    }
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    Ok(())
}

/// Unbiased squared-MMD U-statistic. May be negative.
pub fn mmd2_u(x: &SampleSet, y: &SampleSet, kernel: &KernelSpec) -> Result<f64> {
    check_mmd_inputs(x, y, 2)?;
    kernel.validate()?;
    let nx = x.n() as f64;
    let ny = y.n() as f64;
    if x.n() == y.n() {
        let (sxx, _) = paired_sums(kernel, x, x);
        let (syy, _) = paired_sums(kernel, y, y);
        let (cross_off, cross_diag) = paired_sums(kernel, x, y);
        let within = sxx / (nx * (nx - 1.0)) + syy / (ny * (ny - 1.0));
        Ok(within - 2.0 * ((cross_off + cross_diag) / (nx * ny)))
    } else {
        let (sxx, _) = paired_sums(kernel, x, x);
        let (syy, _) = paired_sums(kernel, y, y);
        let mut cross = 0.0;
        for xi in x.rows_iter() {
            for yj in y.rows_iter() {
                cross += kernel.eval_unchecked(xi, yj);
            }
        }
        let within = sxx / (nx * (nx - 1.0)) + syy / (ny * (ny - 1.0));
        Ok(within - 2.0 * (cross / (nx * ny)))
    }
}

/// Biased squared-MMD V-statistic. Nonnegative up to rounding, and exactly
/// zero on identical samples.
pub fn mmd2_v(x: &SampleSet, y: &SampleSet, kernel: &KernelSpec) -> Result<f64> {
    check_mmd_inputs(x, y, 1)?;
    kernel.validate()?;
    let nx = x.n() as f64;
    let ny = y.n() as f64;
    if x.n() == y.n() {
        let (sxx, dxx) = paired_sums(kernel, x, x);
        let (syy, dyy) = paired_sums(kernel, y, y);
        let (cross_off, cross_diag) = paired_sums(kernel, x, y);
        let within = (sxx + dxx) / (nx * nx) + (syy + dyy) / (ny * ny);
        Ok(within - 2.0 * ((cross_off + cross_diag) / (nx * ny)))
    } else {
        let (sxx, dxx) = paired_sums(kernel, x, x);
        let (syy, dyy) = paired_sums(kernel, y, y);
        let mut cross = 0.0;
        for xi in x.rows_iter() {
            for yj in y.rows_iter() {
                cross += kernel.eval_unchecked(xi, yj);
            }
        }
        let within = (sxx + dxx) / (nx * nx) + (syy + dyy) / (ny * ny);
        Ok(within - 2.0 * (cross / (nx * ny)))
    }
}

/// Linear-time MMD estimator: the mean of ⌊n/2⌋ h-statistics over
/// consecutive disjoint pairs. A trailing odd point is dropped.
pub fn mmd2_linear(x: &SampleSet, y: &SampleSet, kernel: &KernelSpec) -> Result<f64> {
    check_mmd_inputs(x, y, 2)?;
    if x.n() != y.n() {
        return Err(Error::invalid(
            "the linear MMD estimator needs equal sample sizes",
        ));
    }
    kernel.validate()?;
    let pairs = x.n() / 2;
    let mut acc = 0.0;
    for i in 0..pairs {
        let (a, b) = (2 * i, 2 * i + 1);
        let same = kernel.eval_unchecked(x.row(a), x.row(b)) + kernel.eval_unchecked(y.row(a), y.row(b));
        let cross = kernel.eval_unchecked(x.row(a), y.row(b)) + kernel.eval_unchecked(x.row(b), y.row(a));
        acc += same - cross;
    }
    Ok(acc / pairs as f64)
}

/// Incomplete-U-statistic MMD over the first `r` subdiagonals:
/// 2/(r(2n-r-1)) Σⱼ₌₁ʳ Σᵢ₌₁ⁿ⁻ʲ k(xᵢ,xᵢ₊ⱼ) + k(yᵢ,yᵢ₊ⱼ) - k(xᵢ,yᵢ₊ⱼ) - k(xᵢ₊ⱼ,yᵢ).
pub fn mmd2_multi(x: &SampleSet, y: &SampleSet, kernel: &KernelSpec, r: usize) -> Result<f64> {
    check_mmd_inputs(x, y, 2)?;
    if x.n() != y.n() {
        return Err(Error::invalid(
            "the incomplete MMD estimator needs equal sample sizes",
        ));
    }
    kernel.validate()?;
    let n = x.n();
    if r < 1 || r > n - 1 {
        return Err(Error::invalid(format!(
            "subdiagonal count r = {r} out of range 1..={}",
            n - 1
        )));
    }
    let mut acc = 0.0;
    for j in 1..=r {
        for i in 0..(n - j) {
            let same =
                kernel.eval_unchecked(x.row(i), x.row(i + j)) + kernel.eval_unchecked(y.row(i), y.row(i + j));
            let cross =
                kernel.eval_unchecked(x.row(i), y.row(i + j)) + kernel.eval_unchecked(x.row(i + j), y.row(i));
            acc += same - cross;
        }
    }
    Ok(2.0 * acc / (r as f64 * (2 * n - r - 1) as f64))
}

/// Default subdiagonal count ⌈(ln n)²⌉ clamped to 1..=n-1.
pub fn default_multi_r(n: usize) -> usize {
    let raw = (n.max(2) as f64).ln().powi(2).ceil() as usize;
    raw.clamp(1, n.saturating_sub(1).max(1))
}

/// (1/n) Σⱼ |[x]ⱼ - [y]ⱼ|ᵖ over sorted copies; the p-th power of the
/// one-dimensional p-Wasserstein distance between empirical measures.
pub fn wasserstein_1d_power(x: &[f64], y: &[f64], p: u32) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::EmptyInput("wasserstein distance of empty vectors"));
    }
    if p < 1 {
        return Err(Error::invalid("power p must be at least 1"));
    }
    let mut sx = x.to_vec();
    let mut sy = y.to_vec();
    sx.sort_unstable_by(f64::total_cmp);
    sy.sort_unstable_by(f64::total_cmp);
    Ok(weighted_quantile_term(&sx, &sy, p, &QuantileWeighting::Uniform))
}

/// One-dimensional p-Wasserstein distance via matched order statistics.
pub fn wasserstein_1d(x: &[f64], y: &[f64], p: u32) -> Result<f64> {
    Ok(wasserstein_1d_power(x, y, p)?.powf(1.0 / p as f64))
}

/// Aggregation mode for the sliced Wasserstein distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwMode {
    Expected,
    Max,
}

/// Draws unit vectors uniformly on the sphere S^{d-1}.
pub fn sample_sphere(dim: usize, count: usize, rng: &mut impl Rng) -> Result<Vec<Vec<f64>>> {
    if dim < 1 {
        return Err(Error::invalid("sphere directions need dimension at least 1"));
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            out.push(v.iter().map(|a| a / norm).collect());
        }
    }
    Ok(out)
}

/// Sliced Wasserstein distance over freshly drawn directions.
pub fn sliced_wasserstein(
    x: &SampleSet,
    y: &SampleSet,
    l: usize,
    p: u32,
    rng: &mut impl Rng,
    mode: SwMode,
) -> Result<f64> {
    if x.dim() < 1 {
        return Err(Error::invalid("sliced Wasserstein needs dimension at least 1"));
    }
    let directions = sample_sphere(x.dim(), l.max(1), rng)?;
    sliced_wasserstein_with_directions(x, y, &directions, p, mode)
}

/// Sliced Wasserstein distance over caller-supplied unit directions.
pub fn sliced_wasserstein_with_directions(
    x: &SampleSet,
    y: &SampleSet,
    directions: &[Vec<f64>],
    p: u32,
    mode: SwMode,
) -> Result<f64> {
    let n = check_equal_sizes(x, y)?;
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    if directions.is_empty() {
        return Err(Error::EmptyInput("at least one direction is required"));
    }
    let mut powers = Vec::with_capacity(directions.len());
    for u in directions {
        if u.len() != x.dim() {
            return Err(Error::DimensionMismatch {
                left: u.len(),
                right: x.dim(),
            });
        }
        let px: Vec<f64> = x.rows_iter().map(|row| dot(row, u)).collect();
        let py: Vec<f64> = y.rows_iter().map(|row| dot(row, u)).collect();
        debug_assert_eq!(px.len(), n);
        powers.push(wasserstein_1d_power(&px, &py, p)?);
    }
    let power = match mode {
        SwMode::Expected => powers.iter().sum::<f64>() / powers.len() as f64,
        SwMode::Max => powers.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    Ok(power.powf(1.0 / p as f64))
}

#[inline]
fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b).sum()
}
