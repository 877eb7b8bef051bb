//! Synthetic data generators for the benchmark experiments.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::SampleSet;
use crate::error::{Error, Result};

/// A sampling recipe for one side of a two-sample problem.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    /// Standard Gaussian N(0, I_d).
    GaussianIso { dim: usize },
    /// Gaussian with the given mean vector and diagonal covariance.
    GaussianDiag { mean: Vec<f64>, variances: Vec<f64> },
    /// One-dimensional Laplace distribution.
    Laplace { location: f64, scale: f64 },
    /// Subsamples n rows without replacement from a fixed pool.
    Custom { pool: SampleSet },
}

impl GeneratorSpec {
    pub fn dim(&self) -> usize {
        match self {
            GeneratorSpec::GaussianIso { dim } => *dim,
            GeneratorSpec::GaussianDiag { mean, .. } => mean.len(),
            GeneratorSpec::Laplace { .. } => 1,
            GeneratorSpec::Custom { pool } => pool.dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GeneratorSpec::GaussianIso { dim } => {
                if *dim < 1 {
                    return Err(Error::invalid("gaussian dimension must be at least 1"));
                }
            }
            GeneratorSpec::GaussianDiag { mean, variances } => {
                if mean.is_empty() || mean.len() != variances.len() {
                    return Err(Error::DimensionMismatch {
                        left: mean.len(),
                        right: variances.len(),
                    });
                }
                if variances.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                    return Err(Error::invalid("variances must be positive"));
                }
            }
            GeneratorSpec::Laplace { scale, location } => {
                if !(*scale > 0.0) || !scale.is_finite() || !location.is_finite() {
                    return Err(Error::invalid("laplace scale must be positive"));
                }
            }
            GeneratorSpec::Custom { pool } => {
                if pool.is_empty() {
                    return Err(Error::EmptyInput("custom generator pool"));
                }
            }
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        match self {
            GeneratorSpec::GaussianIso { dim } => format!("gaussian-iso(d={dim})"),
            GeneratorSpec::GaussianDiag { mean, variances } => format!(
                "gaussian-diag(d={}, var[0..3]={:?})",
                mean.len(),
                &variances[..variances.len().min(3)]
            ),
            GeneratorSpec::Laplace { location, scale } => {
                format!("laplace(loc={location}, b={scale})")
            }
            GeneratorSpec::Custom { pool } => {
                format!("custom(pool={}x{})", pool.n(), pool.dim())
            }
        }
    }

    /// Draws `n` points.
    pub fn sample(&self, n: usize, rng: &mut impl Rng) -> Result<SampleSet> {
        self.validate()?;
        match self {
            GeneratorSpec::GaussianIso { dim } => Ok(sample_standard_normal(n, *dim, rng)),
            GeneratorSpec::GaussianDiag { mean, variances } => {
                let d = mean.len();
                let sds: Vec<f64> = variances.iter().map(|v| v.sqrt()).collect();
                let mut values = Vec::with_capacity(n * d);
                for _ in 0..n {
                    for j in 0..d {
                        let z: f64 = rng.sample(StandardNormal);
                        values.push(mean[j] + sds[j] * z);
                    }
                }
                SampleSet::from_flat(values, n, d)
            }
            GeneratorSpec::Laplace { location, scale } => {
                let values: Vec<f64> =
                    (0..n).map(|_| sample_laplace(*location, *scale, rng)).collect();
                SampleSet::from_flat(values, n, 1)
            }
            GeneratorSpec::Custom { pool } => {
                if n > pool.n() {
                    return Err(Error::invalid(format!(
                        "cannot draw {n} points without replacement from a pool of {}",
                        pool.n()
                    )));
                }
                // Partial Fisher-Yates over the index range.
                let mut idx: Vec<usize> = (0..pool.n()).collect();
                for i in 0..n {
                    let j = rng.gen_range(i..idx.len());
                    idx.swap(i, j);
                }
                Ok(pool.subset(&idx[..n]))
            }
        }
    }
}

/// n × d table of independent standard normal draws.
pub fn sample_standard_normal(n: usize, d: usize, rng: &mut impl Rng) -> SampleSet {
    let values: Vec<f64> = (0..n * d).map(|_| rng.sample(StandardNormal)).collect();
    SampleSet::from_flat(values, n, d).expect("sizes agree by construction")
}

/// Laplace inverse CDF at u ∈ (0, 1):
/// F⁻¹(u) = loc - b·sign(u - ½)·ln(1 - 2|u - ½|).
pub fn laplace_inverse_cdf(u: f64, location: f64, scale: f64) -> f64 {
    let centered = u - 0.5;
    location - scale * centered.signum() * (1.0 - 2.0 * centered.abs()).ln()
}

/// Laplace CDF, for goodness-of-fit checks.
pub fn laplace_cdf(x: f64, location: f64, scale: f64) -> f64 {
    let z = (x - location) / scale;
    if z < 0.0 {
        0.5 * z.exp()
    } else {
        1.0 - 0.5 * (-z).exp()
    }
}

fn sample_laplace(location: f64, scale: f64, rng: &mut impl Rng) -> f64 {
    // u = 0 would map to -inf; redraw (probability 2^-53 per draw).
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return laplace_inverse_cdf(u, location, scale);
        }
    }
}

/// Power-decay pair: X ~ N(0, I_d), Y ~ N(0, diag(4, 4, 4, 1, …, 1)).
pub fn gen_power_decay(d: usize, n: usize, rng: &mut impl Rng) -> Result<(SampleSet, SampleSet)> {
    if d < 3 {
        return Err(Error::invalid(
            "power-decay experiment needs dimension at least 3",
        ));
    }
    let p = GeneratorSpec::GaussianIso { dim: d };
    let mut variances = vec![1.0; d];
    variances[0] = 4.0;
    variances[1] = 4.0;
    variances[2] = 4.0;
    let q = GeneratorSpec::GaussianDiag {
        mean: vec![0.0; d],
        variances,
    };
    Ok((p.sample(n, rng)?, q.sample(n, rng)?))
}

/// Moment-matched pair in one dimension: X ~ N(0, 1) and Y ~ Laplace with
/// scale 1/√2, so both have mean 0 and variance 1.
pub fn gen_laplace_vs_gaussian(n: usize, rng: &mut impl Rng) -> Result<(SampleSet, SampleSet)> {
    let p = GeneratorSpec::GaussianIso { dim: 1 };
    let q = GeneratorSpec::Laplace {
        location: 0.0,
        scale: 1.0 / 2.0_f64.sqrt(),
    };
    Ok((p.sample(n, rng)?, q.sample(n, rng)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn column_stats(s: &SampleSet, j: usize) -> (f64, f64) {
        let n = s.n() as f64;
        let mean = s.column(j).sum::<f64>() / n;
        let var = s.column(j).map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        (mean, var)
    }

    #[test]
    fn power_decay_variance_profile() {
        let mut rng = seeded(42);
        let (x, y) = gen_power_decay(6, 2000, &mut rng).unwrap();
        for j in 0..3 {
            let (_, var) = column_stats(&y, j);
            assert!((var - 4.0).abs() < 0.8, "column {j}: var {var}");
        }
        for j in 3..6 {
            let (_, var) = column_stats(&y, j);
            assert!((var - 1.0).abs() < 0.2, "column {j}: var {var}");
        }
        for j in 0..6 {
            let (mean, _) = column_stats(&x, j);
            assert!(mean.abs() < 4.0 / (2000.0_f64).sqrt(), "column {j}: mean {mean}");
        }
    }

    #[test]
    fn power_decay_needs_three_dims() {
        assert!(gen_power_decay(2, 10, &mut seeded(0)).is_err());
    }

    #[test]
    fn laplace_matches_gaussian_moments() {
        let mut rng = seeded(7);
        let (x, y) = gen_laplace_vs_gaussian(10_000, &mut rng).unwrap();
        let (mx, _) = column_stats(&x, 0);
        let (my, vy) = column_stats(&y, 0);
        assert!(mx.abs() < 5.0 / 100.0);
        assert!(my.abs() < 5.0 / 100.0);
        assert!((vy - 1.0).abs() < 0.15);
        // Fourth moment separates the two: 6 for Laplace vs 3 for Gaussian.
        let m4 = y.column(0).map(|v| v.powi(4)).sum::<f64>() / 10_000.0;
        assert!((m4 - 6.0).abs() < 1.5, "fourth moment {m4}");
    }

    #[test]
    fn laplace_inverse_cdf_is_exact() {
        // Kolmogorov-Smirnov distance against the closed-form CDF.
        let mut rng = seeded(13);
        let b = 1.0 / 2.0_f64.sqrt();
        let gen = GeneratorSpec::Laplace {
            location: 0.0,
            scale: b,
        };
        let sample = gen.sample(10_000, &mut rng).unwrap();
        let mut values: Vec<f64> = sample.values().to_vec();
        values.sort_unstable_by(f64::total_cmp);
        let n = values.len() as f64;
        let mut ks: f64 = 0.0;
        for (i, v) in values.iter().enumerate() {
            let cdf = laplace_cdf(*v, 0.0, b);
            let hi = (i + 1) as f64 / n - cdf;
            let lo = cdf - i as f64 / n;
            ks = ks.max(hi.max(lo));
        }
        assert!(ks < 0.02, "KS statistic {ks}");
    }

    #[test]
    fn generators_are_deterministic_under_seed() {
        let spec = GeneratorSpec::GaussianDiag {
            mean: vec![1.0, -1.0],
            variances: vec![2.0, 0.5],
        };
        let a = spec.sample(50, &mut seeded(3)).unwrap();
        let b = spec.sample(50, &mut seeded(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn custom_pool_draws_without_replacement() {
        let pool = SampleSet::from_scalars(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let gen = GeneratorSpec::Custom { pool };
        let s = gen.sample(5, &mut seeded(1)).unwrap();
        let mut values: Vec<f64> = s.values().to_vec();
        values.sort_unstable_by(f64::total_cmp);
        assert_eq!(values, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!(gen.sample(6, &mut seeded(1)).is_err());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(GeneratorSpec::Laplace {
            location: 0.0,
            scale: 0.0
        }
        .validate()
        .is_err());
        assert!(GeneratorSpec::GaussianDiag {
            mean: vec![0.0],
            variances: vec![-1.0]
        }
        .validate()
        .is_err());
        assert!(GeneratorSpec::GaussianDiag {
            mean: vec![0.0, 0.0],
            variances: vec![1.0]
        }
        .validate()
        .is_err());
    }
}
