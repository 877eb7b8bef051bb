//! Permutation-based two-sample hypothesis testing and rejection-rate
//! estimation.
//!
//! A test pools the two samples, resolves the kernel bandwidth and samples
//! projection directions once from the pooled data, and then recomputes the
//! statistic under uniformly random relabelings of the pooled points. The
//! threshold is the empirical (1 - level) quantile of the permuted
//! statistics, and the null is rejected when the observed statistic strictly
//! exceeds it.
//!
//! All statistic construction depends on the pooled sample only — the pooled
//! points are brought into a canonical order before bandwidths or directions
//! are derived from them — so swapping the two input labels leaves a
//! symmetric statistic's test result unchanged bit for bit.
//!
//! Statistics are evaluated on their raw power scale (which can be negative
//! for U-statistics); thresholding is unaffected because the map to the
//! distance scale is monotone.

use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Matrix, SampleSet};
use crate::datagen::GeneratorSpec;
use crate::directions::{
    default_projection_count, sample_directions_with_policy, LandmarkPolicy, ReferenceMeasure,
};
use crate::discrepancies::{
    default_multi_r, mmd2_linear, mmd2_multi, sample_sphere, weighted_quantile_term,
    QuantileWeighting,
};
use crate::error::{Error, Result};
use crate::kernels::{KernelConfig, KernelFamily, KernelSpec};
use crate::quantiles::empirical_quantile;
use crate::rng::substream;

const TAG_DIRECTIONS: u64 = 1;
const TAG_PERMUTATION: u64 = 2;
const TAG_TRIAL_DATA: u64 = 3;
const TAG_TRIAL_TEST: u64 = 4;

/// Pooled sizes up to this use a precomputed Gram matrix inside the
/// permutation loop; larger pools recompute kernel sums from points.
const POOLED_GRAM_LIMIT: usize = 2048;

/// Outcome of one permutation test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    /// Observed statistic on its raw power scale.
    pub statistic: f64,
    /// Empirical (1 - level) quantile of the permuted statistics.
    pub threshold: f64,
    /// (1 + #{permuted >= observed}) / (1 + n_permutations); always in (0, 1].
    pub p_value: f64,
    /// statistic > threshold (strict, so a degenerate null never rejects).
    pub reject: bool,
    pub n_permutations: usize,
    /// Wall-clock seconds. Not serialized, so emitted reports stay
    /// byte-identical across reruns with the same seed.
    #[serde(skip)]
    pub wall_time: f64,
}

/// The statistics available to the test harness and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StatisticKind {
    Ekqd,
    EkqdCentered,
    SupKqd,
    MmdU,
    MmdV,
    MmdLinear,
    MmdMulti,
    Sw,
    MaxSw,
}

impl StatisticKind {
    pub const ALL: [StatisticKind; 9] = [
        StatisticKind::Ekqd,
        StatisticKind::EkqdCentered,
        StatisticKind::SupKqd,
        StatisticKind::MmdU,
        StatisticKind::MmdV,
        StatisticKind::MmdLinear,
        StatisticKind::MmdMulti,
        StatisticKind::Sw,
        StatisticKind::MaxSw,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StatisticKind::Ekqd => "ekqd",
            StatisticKind::EkqdCentered => "ekqd-centered",
            StatisticKind::SupKqd => "supkqd",
            StatisticKind::MmdU => "mmd-u",
            StatisticKind::MmdV => "mmd-v",
            StatisticKind::MmdLinear => "mmd-lin",
            StatisticKind::MmdMulti => "mmd-multi",
            StatisticKind::Sw => "sw",
            StatisticKind::MaxSw => "max-sw",
        }
    }

    /// True for the statistics that project through kernel directions.
    pub fn is_quantile_based(&self) -> bool {
        matches!(
            self,
            StatisticKind::Ekqd | StatisticKind::EkqdCentered | StatisticKind::SupKqd
        )
    }

    /// True when the statistic evaluates a kernel (sliced Wasserstein does not).
    pub fn uses_kernel(&self) -> bool {
        !matches!(self, StatisticKind::Sw | StatisticKind::MaxSw)
    }
}

impl FromStr for StatisticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StatisticKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = StatisticKind::ALL.iter().map(|k| k.name()).collect();
                Error::invalid(format!(
                    "unknown statistic '{s}' (expected one of {})",
                    names.join("|")
                ))
            })
    }
}

/// Full configuration of a test statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct StatisticConfig {
    pub kind: StatisticKind,
    pub kernel: KernelConfig,
    pub p: u32,
    /// Number of directions; `None` means ⌈ln n⌉.
    pub l: Option<usize>,
    /// Number of landmarks per direction; `None` means ⌈ln n⌉.
    pub m: Option<usize>,
    pub weighting: QuantileWeighting,
    /// Subdiagonal count for mmd-multi; `None` means ⌈ln²n⌉.
    pub multi_r: Option<usize>,
    /// Resample landmarks per direction instead of sharing one draw.
    pub fresh_landmarks: bool,
}

impl StatisticConfig {
    pub fn new(kind: StatisticKind) -> Self {
        StatisticConfig {
            kind,
            kernel: KernelConfig::default(),
            p: 2,
            l: None,
            m: None,
            weighting: QuantileWeighting::Uniform,
            multi_r: None,
            fresh_landmarks: false,
        }
    }

    /// Deterministic one-line echo of the configuration.
    pub fn describe(&self) -> String {
        let bw = match self.kernel.bandwidth {
            crate::kernels::Bandwidth::Median => "median".to_string(),
            crate::kernels::Bandwidth::Fixed(v) => format!("{v}"),
        };
        let kernel = match self.kernel.family {
            KernelFamily::Rbf => format!("rbf(bandwidth={bw})"),
            KernelFamily::Laplacian => format!("laplacian(bandwidth={bw})"),
            KernelFamily::Linear => "linear".to_string(),
            KernelFamily::Polynomial => format!(
                "poly(degree={}, offset={})",
                self.kernel.degree, self.kernel.offset
            ),
        };
        let opt = |v: Option<usize>| v.map_or("auto".to_string(), |x| x.to_string());
        format!(
            "stat={} kernel={} p={} l={} m={} nu={} r={} fresh-landmarks={}",
            self.kind.name(),
            kernel,
            self.p,
            opt(self.l),
            opt(self.m),
            self.weighting.name(),
            opt(self.multi_r),
            self.fresh_landmarks,
        )
    }
}

/// One sweep point of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub param_value: f64,
    pub rejection_rate: f64,
}

/// Rejection rates of one method across a parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub method: String,
    pub param_name: String,
    pub points: Vec<SweepPoint>,
    pub trials: usize,
    pub seed: u64,
    pub config: String,
}

/// Lexicographic order of the pooled rows. Constructing bandwidths and
/// directions from the reordered pool makes them depend on the pooled
/// multiset only, not on which sample each point came from.
fn canonical_order(points: &SampleSet) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.n()).collect();
    idx.sort_unstable_by(|&a, &b| {
        let (ra, rb) = (points.row(a), points.row(b));
        for (x, y) in ra.iter().zip(rb.iter()) {
            match x.total_cmp(y) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });
    idx
}

enum ProjectedFlavor {
    Mean,
    Max,
    Centered,
}

struct ProjectedStat {
    /// Per direction: the projection of every pooled point.
    projections: Vec<Vec<f64>>,
    p: u32,
    weighting: QuantileWeighting,
    flavor: ProjectedFlavor,
    /// MMD block machinery for the centered flavor.
    mmd: Option<MmdBlockStat>,
}

impl ProjectedStat {
    fn evaluate(&self, x_idx: &[usize], y_idx: &[usize]) -> f64 {
        let n = x_idx.len() as f64;
        let l = self.projections.len() as f64;
        let mut quantile_acc = 0.0;
        let mut max_term = f64::NEG_INFINITY;
        let mut mean_diff_acc = 0.0;
        let mut px = Vec::with_capacity(x_idx.len());
        let mut py = Vec::with_capacity(y_idx.len());
        for proj in &self.projections {
            px.clear();
            py.clear();
            px.extend(x_idx.iter().map(|&i| proj[i]));
            py.extend(y_idx.iter().map(|&i| proj[i]));
            px.sort_unstable_by(f64::total_cmp);
            py.sort_unstable_by(f64::total_cmp);
            let term = weighted_quantile_term(&px, &py, self.p, &self.weighting);
            quantile_acc += term;
            max_term = max_term.max(term);
            if matches!(self.flavor, ProjectedFlavor::Centered) {
                let mx = px.iter().sum::<f64>() / n;
                let my = py.iter().sum::<f64>() / n;
                let d = mx - my;
                mean_diff_acc += d * d;
            }
        }
        match self.flavor {
            ProjectedFlavor::Mean => quantile_acc / l,
            ProjectedFlavor::Max => max_term,
            ProjectedFlavor::Centered => {
                let mmd = self
                    .mmd
                    .as_ref()
                    .expect("centered statistic carries MMD state")
                    .evaluate(x_idx, y_idx);
                (quantile_acc / l + mmd) - mean_diff_acc / l
            }
        }
    }
}

/// MMD over index partitions of a pooled sample. Within-group and cross
/// sums are recovered from two block sums plus the precomputed total, so one
/// evaluation costs two n² blocks instead of the full (2n)² grid.
struct MmdBlockStat {
    pooled: SampleSet,
    kernel: KernelSpec,
    gram: Option<Matrix>,
    /// Σ over all ordered pooled pairs, diagonal included.
    total_sum: f64,
    biased: bool,
}

impl MmdBlockStat {
    fn new(pooled: &SampleSet, kernel: &KernelSpec, biased: bool) -> Result<Self> {
        let gram = if pooled.n() <= POOLED_GRAM_LIMIT {
            Some(crate::kernels::gram(kernel, pooled, pooled)?)
        } else {
            None
        };
        let mut stat = MmdBlockStat {
            pooled: pooled.clone(),
            kernel: kernel.clone(),
            gram,
            total_sum: 0.0,
            biased,
        };
        let all: Vec<usize> = (0..stat.pooled.n()).collect();
        let (off, diag) = stat.block_sums(&all);
        stat.total_sum = 2.0 * off + diag;
        Ok(stat)
    }

    /// (Σ_{i<j} k(p_a, p_b), Σ_i k(p_a, p_a)) over the subset `idx`.
    fn block_sums(&self, idx: &[usize]) -> (f64, f64) {
        let mut sorted = idx.to_vec();
        sorted.sort_unstable();
        match &self.gram {
            Some(g) => {
                let mut off = 0.0;
                for (a, &i) in sorted.iter().enumerate() {
                    let row = g.row(i);
                    for &j in &sorted[a + 1..] {
                        off += row[j];
                    }
                }
                let diag = sorted.iter().map(|&i| g.get(i, i)).sum();
                (off, diag)
            }
            None => {
                let points = self.pooled.subset(&sorted);
                let k = &self.kernel;
                let m = points.n();
                let mut off = 0.0;
                for i in 0..m {
                    let pi = points.row(i);
                    for j in (i + 1)..m {
                        off += k.eval_unchecked(pi, points.row(j));
                    }
                }
                let diag = (0..m)
                    .map(|i| k.eval_unchecked(points.row(i), points.row(i)))
                    .sum();
                (off, diag)
            }
        }
    }

    fn evaluate(&self, x_idx: &[usize], y_idx: &[usize]) -> f64 {
        let (off_x, diag_x) = self.block_sums(x_idx);
        let (off_y, diag_y) = self.block_sums(y_idx);
        let full_x = 2.0 * off_x + diag_x;
        let full_y = 2.0 * off_y + diag_y;
        let cross = (self.total_sum - (full_x + full_y)) / 2.0;
        let nx = x_idx.len() as f64;
        let ny = y_idx.len() as f64;
        if self.biased {
            (full_x / (nx * nx) + full_y / (ny * ny)) - 2.0 * (cross / (nx * ny))
        } else {
            (2.0 * off_x / (nx * (nx - 1.0)) + 2.0 * off_y / (ny * (ny - 1.0)))
                - 2.0 * (cross / (nx * ny))
        }
    }
}

enum PairKind {
    Linear,
    Multi { r: usize },
}

/// Pair-pattern MMD estimators; these depend on within-group order, so the
/// groups are gathered exactly as indexed.
struct MmdPairsStat {
    pooled: SampleSet,
    kernel: KernelSpec,
    kind: PairKind,
}

impl MmdPairsStat {
    fn evaluate(&self, x_idx: &[usize], y_idx: &[usize]) -> f64 {
        let x = self.pooled.subset(x_idx);
        let y = self.pooled.subset(y_idx);
        match self.kind {
            PairKind::Linear => {
                mmd2_linear(&x, &y, &self.kernel).expect("validated at preparation")
            }
            PairKind::Multi { r } => {
                mmd2_multi(&x, &y, &self.kernel, r).expect("validated at preparation")
            }
        }
    }
}

enum Prepared {
    Projected(ProjectedStat),
    MmdBlock(MmdBlockStat),
    MmdPairs(MmdPairsStat),
}

impl Prepared {
    fn evaluate(&self, x_idx: &[usize], y_idx: &[usize]) -> f64 {
        match self {
            Prepared::Projected(s) => s.evaluate(x_idx, y_idx),
            Prepared::MmdBlock(s) => s.evaluate(x_idx, y_idx),
            Prepared::MmdPairs(s) => s.evaluate(x_idx, y_idx),
        }
    }
}

fn prepare_statistic(
    cfg: &StatisticConfig,
    pooled: &SampleSet,
    n: usize,
    kernel: &KernelSpec,
    rng: &mut impl Rng,
) -> Result<Prepared> {
    let l = cfg.l.unwrap_or_else(|| default_projection_count(n));
    let m = cfg.m.unwrap_or_else(|| default_projection_count(n));
    match cfg.kind {
        StatisticKind::Ekqd | StatisticKind::SupKqd | StatisticKind::EkqdCentered => {
            if cfg.kind == StatisticKind::EkqdCentered && cfg.p != 2 {
                return Err(Error::UnsupportedConfiguration(
                    "the centered discrepancy is defined for p = 2 only".into(),
                ));
            }
            let reference = ReferenceMeasure::pooled_points(pooled.clone())?;
            let policy = if cfg.fresh_landmarks {
                LandmarkPolicy::PerDirection
            } else {
                LandmarkPolicy::Shared
            };
            let dirs = sample_directions_with_policy(kernel, &reference, m, l, policy, rng)?;
            let projections: Result<Vec<Vec<f64>>> =
                dirs.iter().map(|d| d.evaluate_batch(pooled)).collect();
            let (flavor, mmd) = match cfg.kind {
                StatisticKind::Ekqd => (ProjectedFlavor::Mean, None),
                StatisticKind::SupKqd => (ProjectedFlavor::Max, None),
                _ => (
                    ProjectedFlavor::Centered,
                    Some(MmdBlockStat::new(pooled, kernel, false)?),
                ),
            };
            Ok(Prepared::Projected(ProjectedStat {
                projections: projections?,
                p: cfg.p,
                weighting: cfg.weighting.clone(),
                flavor,
                mmd,
            }))
        }
        StatisticKind::Sw | StatisticKind::MaxSw => {
            let dirs = sample_sphere(pooled.dim(), l, rng)?;
            let projections: Vec<Vec<f64>> = dirs
                .iter()
                .map(|u| {
                    pooled
                        .rows_iter()
                        .map(|row| row.iter().zip(u.iter()).map(|(a, b)| a * b).sum())
                        .collect()
                })
                .collect();
            let flavor = if cfg.kind == StatisticKind::Sw {
                ProjectedFlavor::Mean
            } else {
                ProjectedFlavor::Max
            };
            Ok(Prepared::Projected(ProjectedStat {
                projections,
                p: cfg.p,
                weighting: QuantileWeighting::Uniform,
                flavor,
                mmd: None,
            }))
        }
        StatisticKind::MmdU => Ok(Prepared::MmdBlock(MmdBlockStat::new(pooled, kernel, false)?)),
        StatisticKind::MmdV => Ok(Prepared::MmdBlock(MmdBlockStat::new(pooled, kernel, true)?)),
        StatisticKind::MmdLinear => {
            if n < 2 {
                return Err(Error::invalid("mmd-lin needs at least 2 points per sample"));
            }
            Ok(Prepared::MmdPairs(MmdPairsStat {
                pooled: pooled.clone(),
                kernel: kernel.clone(),
                kind: PairKind::Linear,
            }))
        }
        StatisticKind::MmdMulti => {
            if n < 2 {
                return Err(Error::invalid("mmd-multi needs at least 2 points per sample"));
            }
            let r = cfg.multi_r.unwrap_or_else(|| default_multi_r(n));
            if r < 1 || r > n - 1 {
                return Err(Error::invalid(format!(
                    "subdiagonal count r = {r} out of range 1..={}",
                    n - 1
                )));
            }
            Ok(Prepared::MmdPairs(MmdPairsStat {
                pooled: pooled.clone(),
                kernel: kernel.clone(),
                kind: PairKind::Multi { r },
            }))
        }
    }
}

/// Runs a permutation two-sample test of H₀: P = Q.
///
/// The kernel bandwidth (when `median`) and all projection directions are
/// derived once from the pooled sample and shared by the observed statistic
/// and every permuted replica.
pub fn permutation_test(
    x: &SampleSet,
    y: &SampleSet,
    cfg: &StatisticConfig,
    n_perms: usize,
    level: f64,
    rng: &mut impl Rng,
) -> Result<TestResult> {
    let start = Instant::now();
    if x.n() != y.n() {
        return Err(Error::invalid(format!(
            "the permutation test needs equal sample sizes, got {} and {}",
            x.n(),
            y.n()
        )));
    }
    if x.is_empty() {
        return Err(Error::EmptyInput("permutation test on empty samples"));
    }
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    if n_perms < 20 {
        return Err(Error::invalid(format!(
            "{n_perms} permutations make the threshold unreliable; use at least 20"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid("significance level must lie in (0, 1)"));
    }
    let n = x.n();
    let total = 2 * n;

    let pooled_raw = x.concat(y)?;
    let order = canonical_order(&pooled_raw);
    let pooled = pooled_raw.subset(&order);
    let mut position = vec![0usize; total];
    for (pos, &orig) in order.iter().enumerate() {
        position[orig] = pos;
    }
    let x_idx: Vec<usize> = (0..n).map(|i| position[i]).collect();
    let y_idx: Vec<usize> = (n..total).map(|i| position[i]).collect();

    let kernel = if cfg.kind.uses_kernel() {
        cfg.kernel.resolve_pooled(&pooled)?
    } else {
        KernelSpec::Linear
    };

    let base_seed: u64 = rng.gen();
    let mut dir_rng = substream(base_seed, &[TAG_DIRECTIONS]);
    let prepared = prepare_statistic(cfg, &pooled, n, &kernel, &mut dir_rng)?;

    let observed = prepared.evaluate(&x_idx, &y_idx);
    let permuted: Vec<f64> = (0..n_perms)
        .into_par_iter()
        .map(|j| {
            let mut perm_rng = substream(base_seed, &[TAG_PERMUTATION, j as u64]);
            let mut idx: Vec<usize> = (0..total).collect();
            idx.shuffle(&mut perm_rng);
            prepared.evaluate(&idx[..n], &idx[n..])
        })
        .collect();

    let threshold = empirical_quantile(&permuted, 1.0 - level)?;
    let exceed = permuted.iter().filter(|&&v| v >= observed).count();
    let p_value = (1 + exceed) as f64 / (1 + n_perms) as f64;
    Ok(TestResult {
        statistic: observed,
        threshold,
        p_value,
        reject: observed > threshold,
        n_permutations: n_perms,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Fraction of `trials` independent tests that reject. Each trial draws
/// fresh data and runs on its own deterministic substream of `seed`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_rejection_rate(
    gen_p: &GeneratorSpec,
    gen_q: &GeneratorSpec,
    n: usize,
    trials: usize,
    cfg: &StatisticConfig,
    n_perms: usize,
    level: f64,
    seed: u64,
) -> Result<f64> {
    if trials < 1 {
        return Err(Error::invalid("at least one trial is required"));
    }
    let rejects: Result<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let tag = t as u64;
            let mut rng_x = substream(seed, &[TAG_TRIAL_DATA, tag, 0]);
            let x = gen_p
                .sample(n, &mut rng_x)
                .map_err(|e| Error::invalid(format!("trial {t}: generator P failed: {e}")))?;
            let mut rng_y = substream(seed, &[TAG_TRIAL_DATA, tag, 1]);
            let y = gen_q
                .sample(n, &mut rng_y)
                .map_err(|e| Error::invalid(format!("trial {t}: generator Q failed: {e}")))?;
            let mut rng_test = substream(seed, &[TAG_TRIAL_TEST, tag]);
            let result = permutation_test(&x, &y, cfg, n_perms, level, &mut rng_test)
                .map_err(|e| Error::invalid(format!("trial {t}: {e}")))?;
            Ok(result.reject)
        })
        .collect();
    let rejects = rejects?;
    Ok(rejects.iter().filter(|r| **r).count() as f64 / trials as f64)
}

/// As [`estimate_rejection_rate`], packaged as a one-point experiment report.
#[allow(clippy::too_many_arguments)]
pub fn rejection_rate(
    gen_p: &GeneratorSpec,
    gen_q: &GeneratorSpec,
    n: usize,
    trials: usize,
    cfg: &StatisticConfig,
    n_perms: usize,
    level: f64,
    seed: u64,
) -> Result<ExperimentReport> {
    let rate = estimate_rejection_rate(gen_p, gen_q, n, trials, cfg, n_perms, level, seed)?;
    Ok(ExperimentReport {
        method: cfg.kind.name().to_string(),
        param_name: "n".to_string(),
        points: vec![SweepPoint {
            param_value: n as f64,
            rejection_rate: rate,
        }],
        trials,
        seed,
        config: format!(
            "{} perms={} level={} genP={} genQ={}",
            cfg.describe(),
            n_perms,
            level,
            gen_p.describe(),
            gen_q.describe()
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancies::{ekqd, mmd2_u, mmd2_v, KqdConfig};
    use crate::kernels::Bandwidth;
    use crate::rng::seeded;

    fn gaussian_pair(n: usize, d: usize, shift: f64, seed: u64) -> (SampleSet, SampleSet) {
        let p = GeneratorSpec::GaussianIso { dim: d };
        let q = GeneratorSpec::GaussianDiag {
            mean: vec![shift; d],
            variances: vec![1.0; d],
        };
        let x = p.sample(n, &mut seeded(seed)).unwrap();
        let y = q.sample(n, &mut seeded(seed + 1)).unwrap();
        (x, y)
    }

    fn fixed_rbf(kind: StatisticKind) -> StatisticConfig {
        let mut cfg = StatisticConfig::new(kind);
        cfg.kernel.bandwidth = Bandwidth::Fixed(1.0);
        cfg
    }

    #[test]
    fn same_seed_gives_identical_results() {
        let (x, y) = gaussian_pair(30, 2, 0.5, 3);
        let cfg = StatisticConfig::new(StatisticKind::Ekqd);
        let a = permutation_test(&x, &y, &cfg, 50, 0.05, &mut seeded(9)).unwrap();
        let b = permutation_test(&x, &y, &cfg, 50, 0.05, &mut seeded(9)).unwrap();
        assert_eq!(a.statistic.to_bits(), b.statistic.to_bits());
        assert_eq!(a.threshold.to_bits(), b.threshold.to_bits());
        assert_eq!(a.p_value, b.p_value);
        assert_eq!(a.reject, b.reject);
    }

    #[test]
    fn swapping_labels_leaves_result_unchanged() {
        let (x, y) = gaussian_pair(24, 3, 0.4, 11);
        for kind in [
            StatisticKind::Ekqd,
            StatisticKind::SupKqd,
            StatisticKind::EkqdCentered,
            StatisticKind::MmdU,
            StatisticKind::MmdV,
            StatisticKind::MmdLinear,
            StatisticKind::MmdMulti,
            StatisticKind::Sw,
            StatisticKind::MaxSw,
        ] {
            let cfg = StatisticConfig::new(kind);
            let a = permutation_test(&x, &y, &cfg, 40, 0.05, &mut seeded(21)).unwrap();
            let b = permutation_test(&y, &x, &cfg, 40, 0.05, &mut seeded(21)).unwrap();
            assert_eq!(
                a.statistic.to_bits(),
                b.statistic.to_bits(),
                "{}",
                kind.name()
            );
            assert_eq!(a.threshold.to_bits(), b.threshold.to_bits());
            assert_eq!(a.reject, b.reject);
        }
    }

    #[test]
    fn constant_statistic_never_rejects() {
        // Every pooled point identical: the statistic is 0 under every
        // relabeling, and 0 > 0 is false.
        let x = SampleSet::from_scalars(&[1.0; 10]);
        let cfg = fixed_rbf(StatisticKind::MmdU);
        let res = permutation_test(&x, &x, &cfg, 30, 0.05, &mut seeded(2)).unwrap();
        assert!(!res.reject);
        assert!(res.p_value > 0.0 && res.p_value <= 1.0);
    }

    #[test]
    fn too_few_permutations_error() {
        let x = SampleSet::from_scalars(&[0.0, 1.0]);
        let cfg = fixed_rbf(StatisticKind::MmdU);
        assert!(permutation_test(&x, &x, &cfg, 19, 0.05, &mut seeded(0)).is_err());
    }

    #[test]
    fn observed_statistic_matches_direct_mmd_ops() {
        let (x, y) = gaussian_pair(20, 2, 0.8, 5);
        let cfg_u = fixed_rbf(StatisticKind::MmdU);
        let res = permutation_test(&x, &y, &cfg_u, 30, 0.05, &mut seeded(1)).unwrap();
        let direct = mmd2_u(&x, &y, &KernelSpec::rbf(1.0).unwrap()).unwrap();
        assert!(
            (res.statistic - direct).abs() <= 1e-12 * direct.abs().max(1.0),
            "prepared {} vs direct {direct}",
            res.statistic
        );
        let cfg_v = fixed_rbf(StatisticKind::MmdV);
        let res_v = permutation_test(&x, &y, &cfg_v, 30, 0.05, &mut seeded(1)).unwrap();
        let direct_v = mmd2_v(&x, &y, &KernelSpec::rbf(1.0).unwrap()).unwrap();
        assert!((res_v.statistic - direct_v).abs() <= 1e-12 * direct_v.abs().max(1.0));
    }

    #[test]
    fn prepared_quantile_statistic_matches_public_op() {
        // Sampling directions from an identically seeded substream must make
        // the prepared statistic agree with the public operation.
        let (x, y) = gaussian_pair(16, 2, 0.6, 13);
        let pooled_raw = x.concat(&y).unwrap();
        let order = canonical_order(&pooled_raw);
        let pooled = pooled_raw.subset(&order);
        let mut position = vec![0usize; pooled.n()];
        for (pos, &orig) in order.iter().enumerate() {
            position[orig] = pos;
        }
        let x_idx: Vec<usize> = (0..16).map(|i| position[i]).collect();
        let y_idx: Vec<usize> = (16..32).map(|i| position[i]).collect();
        let kernel = KernelSpec::rbf(1.0).unwrap();

        let cfg = fixed_rbf(StatisticKind::Ekqd);
        let prepared =
            prepare_statistic(&cfg, &pooled, 16, &kernel, &mut seeded(42)).unwrap();
        let raw = prepared.evaluate(&x_idx, &y_idx);

        let reference = ReferenceMeasure::pooled_points(pooled.clone()).unwrap();
        let dirs = sample_directions_with_policy(
            &kernel,
            &reference,
            default_projection_count(16),
            default_projection_count(16),
            LandmarkPolicy::Shared,
            &mut seeded(42),
        )
        .unwrap();
        let kq_cfg = KqdConfig {
            p: 2,
            l: dirs.len(),
            m: dirs.len(),
            weighting: QuantileWeighting::Uniform,
            seed: 0,
        };
        let direct = ekqd(&x, &y, &kq_cfg, &dirs).unwrap();
        assert!(
            (raw - direct.pth_power).abs() <= 1e-12 * direct.pth_power.max(1e-12),
            "prepared {raw} vs direct {}",
            direct.pth_power
        );
    }

    #[test]
    fn rejection_rate_on_constant_data_is_zero() {
        let pool = SampleSet::from_scalars(&[2.0; 40]);
        let gen = GeneratorSpec::Custom { pool };
        let cfg = fixed_rbf(StatisticKind::MmdU);
        let report = rejection_rate(&gen, &gen, 10, 5, &cfg, 25, 0.05, 3).unwrap();
        assert_eq!(report.points[0].rejection_rate, 0.0);
        assert_eq!(report.trials, 5);
    }

    #[test]
    fn statistic_kind_parsing_round_trips() {
        for kind in StatisticKind::ALL {
            assert_eq!(kind.name().parse::<StatisticKind>().unwrap(), kind);
        }
        assert!("mmd".parse::<StatisticKind>().is_err());
    }
}
