//! Unit-norm RKHS directions sampled from a projected Gaussian measure.
//!
//! A direction is a function u(x) = Σⱼ cⱼ k(zⱼ, x) with unit RKHS norm. They
//! are sampled by drawing landmarks z₁:ₘ from a reference measure, drawing
//! λ₁:ₘ i.i.d. standard normal to form the raw field f(x) = m^{-1/2} Σⱼ λⱼ
//! k(zⱼ, x), and normalising f by its RKHS norm √(λᵀ K_zz λ / m).

use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::SampleSet;
use crate::error::{Error, Result};
use crate::kernels::{gram, KernelSpec};

/// Allowed deviation of a direction's squared RKHS norm from one.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-8;

/// A unit-norm RKHS function represented by landmarks and coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    landmarks: SampleSet,
    coefficients: Vec<f64>,
    kernel: KernelSpec,
}

impl Direction {
    /// Builds a direction and checks the unit-norm invariant
    /// cᵀ K_zz c = 1 ± `UNIT_NORM_TOLERANCE`.
    pub fn from_parts(
        landmarks: SampleSet,
        coefficients: Vec<f64>,
        kernel: KernelSpec,
    ) -> Result<Self> {
        if landmarks.n() != coefficients.len() {
            return Err(Error::DimensionMismatch {
                left: landmarks.n(),
                right: coefficients.len(),
            });
        }
        if landmarks.is_empty() {
            return Err(Error::EmptyInput("direction needs at least one landmark"));
        }
        let dir = Direction {
            landmarks,
            coefficients,
            kernel,
        };
        let norm_sq = dir.rkhs_norm_squared()?;
        if (norm_sq - 1.0).abs() > UNIT_NORM_TOLERANCE {
            return Err(Error::invalid(format!(
                "direction is not unit-norm: c'Kc = {norm_sq}"
            )));
        }
        Ok(dir)
    }

    pub fn landmarks(&self) -> &SampleSet {
        &self.landmarks
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn input_dim(&self) -> usize {
        self.landmarks.dim()
    }

    /// cᵀ K_zz c.
    pub fn rkhs_norm_squared(&self) -> Result<f64> {
        let k = gram(&self.kernel, &self.landmarks, &self.landmarks)?;
        Ok(quadratic_form(&self.coefficients, |i, j| k.get(i, j)))
    }

    /// u(x) = Σⱼ cⱼ k(zⱼ, x).
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.landmarks.dim() {
            return Err(Error::DimensionMismatch {
                left: self.landmarks.dim(),
                right: x.len(),
            });
        }
        Ok(self.evaluate_unchecked(x))
    }

    #[inline]
    pub(crate) fn evaluate_unchecked(&self, x: &[f64]) -> f64 {
        self.coefficients
            .iter()
            .zip(self.landmarks.rows_iter())
            .map(|(c, z)| c * self.kernel.eval_unchecked(z, x))
            .sum()
    }

    /// Evaluates the direction at every row of `points`.
    pub fn evaluate_batch(&self, points: &SampleSet) -> Result<Vec<f64>> {
        if points.dim() != self.landmarks.dim() && !points.is_empty() {
            return Err(Error::DimensionMismatch {
                left: self.landmarks.dim(),
                right: points.dim(),
            });
        }
        Ok(points
            .rows_iter()
            .map(|row| self.evaluate_unchecked(row))
            .collect())
    }

    /// For the linear kernel, the direction is the functional x ↦ ⟨w, x⟩ with
    /// w = Σⱼ cⱼ zⱼ. Returns `None` for other kernels.
    pub fn as_linear_vector(&self) -> Option<Vec<f64>> {
        if self.kernel != KernelSpec::Linear {
            return None;
        }
        let mut w = vec![0.0; self.landmarks.dim()];
        for (c, z) in self.coefficients.iter().zip(self.landmarks.rows_iter()) {
            for (wk, zk) in w.iter_mut().zip(z.iter()) {
                *wk += c * zk;
            }
        }
        Some(w)
    }
}

fn quadratic_form(c: &[f64], k: impl Fn(usize, usize) -> f64) -> f64 {
    let mut total = 0.0;
    for (i, ci) in c.iter().enumerate() {
        let mut row = 0.0;
        for (j, cj) in c.iter().enumerate() {
            row += k(i, j) * cj;
        }
        total += ci * row;
    }
    total
}

/// Where landmark points are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceMode {
    /// Uniform draws (with replacement) from the concatenation of the two
    /// input samples.
    PooledEmpirical,
    UserSupplied,
}

/// The measure landmark points are sampled from.
#[derive(Debug, Clone)]
pub struct ReferenceMeasure {
    points: SampleSet,
    mode: ReferenceMode,
}

impl ReferenceMeasure {
    /// Pooled empirical measure ½Pₙ + ½Qₙ of two samples.
    pub fn pooled(x: &SampleSet, y: &SampleSet) -> Result<Self> {
        let points = x.concat(y)?;
        Self::pooled_points(points)
    }

    /// Pooled empirical measure from an already-concatenated sample.
    pub fn pooled_points(points: SampleSet) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("reference measure needs points"));
        }
        Ok(ReferenceMeasure {
            points,
            mode: ReferenceMode::PooledEmpirical,
        })
    }

    /// User-supplied support points.
    pub fn from_points(points: SampleSet) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("reference measure needs points"));
        }
        Ok(ReferenceMeasure {
            points,
            mode: ReferenceMode::UserSupplied,
        })
    }

    pub fn points(&self) -> &SampleSet {
        &self.points
    }

    pub fn mode(&self) -> ReferenceMode {
        self.mode
    }

    fn draw_landmarks(&self, m: usize, rng: &mut impl Rng) -> SampleSet {
        let idx: Vec<usize> = (0..m).map(|_| rng.gen_range(0..self.points.n())).collect();
        self.points.subset(&idx)
    }
}

/// A raw (not yet normalised) Gaussian field f(x) = m^{-1/2} Σⱼ λⱼ k(zⱼ, x).
#[derive(Debug, Clone)]
pub struct GaussianFunction {
    landmarks: SampleSet,
    /// λⱼ / √m
    coefficients: Vec<f64>,
    kernel: KernelSpec,
}

impl GaussianFunction {
    /// Draws λ₁:ₘ ~ N(0, Idₘ) over the given landmarks.
    pub fn sample(kernel: KernelSpec, landmarks: &SampleSet, rng: &mut impl Rng) -> Result<Self> {
        if landmarks.is_empty() {
            return Err(Error::EmptyInput("gaussian function needs landmarks"));
        }
        let m = landmarks.n();
        let scale = 1.0 / (m as f64).sqrt();
        let coefficients = (0..m)
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        Ok(GaussianFunction {
            landmarks: landmarks.clone(),
            coefficients,
            kernel,
        })
    }

    /// ⟨f, g⟩_H = Σⱼ (λⱼ/√m)·g(zⱼ), by the reproducing property.
    pub fn inner_product(&self, g: &Direction) -> Result<f64> {
        let mut acc = 0.0;
        for (c, z) in self.coefficients.iter().zip(self.landmarks.rows_iter()) {
            acc += c * g.evaluate(z)?;
        }
        Ok(acc)
    }

    /// λᵀ K_zz λ / m.
    pub fn rkhs_norm_squared(&self) -> Result<f64> {
        let k = gram(&self.kernel, &self.landmarks, &self.landmarks)?;
        Ok(quadratic_form(&self.coefficients, |i, j| k.get(i, j)))
    }

    /// Normalises to a unit direction, failing when the norm is degenerate.
    pub fn normalize(self) -> Result<Direction> {
        let norm_sq = self.rkhs_norm_squared()?;
        if !(norm_sq > 0.0) || !norm_sq.is_finite() {
            return Err(Error::DegenerateData(format!(
                "gaussian field has non-positive squared norm {norm_sq}"
            )));
        }
        let norm = norm_sq.sqrt();
        let coefficients = self.coefficients.iter().map(|c| c / norm).collect();
        Direction::from_parts(self.landmarks, coefficients, self.kernel)
    }
}

/// Whether the l directions share one landmark draw or resample per direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LandmarkPolicy {
    /// One landmark set z₁:ₘ for all directions.
    Shared,
    /// Fresh landmarks for each direction.
    PerDirection,
}

/// Samples `l` unit-norm directions with `m` landmarks each, sharing one
/// landmark draw across directions.
pub fn sample_directions(
    kernel: &KernelSpec,
    reference: &ReferenceMeasure,
    m: usize,
    l: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Direction>> {
    sample_directions_with_policy(kernel, reference, m, l, LandmarkPolicy::Shared, rng)
}

/// As `sample_directions`, with an explicit landmark policy.
pub fn sample_directions_with_policy(
    kernel: &KernelSpec,
    reference: &ReferenceMeasure,
    m: usize,
    l: usize,
    policy: LandmarkPolicy,
    rng: &mut impl Rng,
) -> Result<Vec<Direction>> {
    if m == 0 || l == 0 {
        return Err(Error::invalid(
            "direction and landmark counts must be at least 1",
        ));
    }
    kernel.validate()?;
    let shared = match policy {
        LandmarkPolicy::Shared => Some(reference.draw_landmarks(m, rng)),
        LandmarkPolicy::PerDirection => None,
    };
    let mut directions = Vec::with_capacity(l);
    for _ in 0..l {
        let fresh;
        let landmarks = match &shared {
            Some(z) => z,
            None => {
                fresh = reference.draw_landmarks(m, rng);
                &fresh
            }
        };
        directions.push(sample_one(kernel, landmarks, rng)?);
    }
    Ok(directions)
}

const MAX_RESAMPLE_ATTEMPTS: usize = 10;

fn sample_one(
    kernel: &KernelSpec,
    landmarks: &SampleSet,
    rng: &mut impl Rng,
) -> Result<Direction> {
    for _ in 0..MAX_RESAMPLE_ATTEMPTS {
        let f = GaussianFunction::sample(kernel.clone(), landmarks, rng)?;
        match f.normalize() {
            Ok(direction) => return Ok(direction),
            Err(Error::DegenerateData(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegenerateData(format!(
        "could not sample a direction with positive norm in {MAX_RESAMPLE_ATTEMPTS} attempts"
    )))
}

/// Default direction and landmark count for a sample of size n: ⌈ln n⌉.
pub fn default_projection_count(n: usize) -> usize {
    ((n.max(1) as f64).ln().ceil() as usize).max(1)
}
