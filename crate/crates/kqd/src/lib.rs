//! Kernel quantile discrepancies and permutation two-sample testing.
//!
//! Distributions are compared through the quantiles of their one-dimensional
//! projections along unit-norm RKHS directions. Aggregating the projected
//! quantile mismatch over randomly sampled directions gives the expected
//! kernel quantile discrepancy (`ekqd`), its supremum variant (`supkqd`),
//! and a centered combination with the MMD (`ekqd_centered`). The classical
//! MMD estimator family (U, V, linear, incomplete) and expected/max sliced
//! Wasserstein distances are provided as baselines, and a permutation-test
//! harness turns any of these statistics into a two-sample hypothesis test.
//!
//! # Modules
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`kernels`] | kernel evaluation, Gram matrices, median heuristic |
//! | [`quantiles`] | order statistics, empirical quantiles, projections |
//! | [`directions`] | Gaussian sampling of unit-norm RKHS directions |
//! | [`discrepancies`] | e-KQD, sup-KQD, centered e-KQD, MMD family, sliced Wasserstein |
//! | [`testing`] | permutation tests and rejection-rate experiments |
//! | [`datagen`] | synthetic benchmark generators |
//! | [`io`] | CSV datasets and CSV/JSON report files |
//! | [`cli`] | the `kqd` command-line frontend |
//!
//! # Quick start
//!
//! ```
//! use kqd::datagen::gen_laplace_vs_gaussian;
//! use kqd::rng::seeded;
//! use kqd::testing::{permutation_test, StatisticConfig, StatisticKind};
//!
//! let mut rng = seeded(0);
//! let (x, y) = gen_laplace_vs_gaussian(200, &mut rng).unwrap();
//! let mut cfg = StatisticConfig::new(StatisticKind::Ekqd);
//! cfg.kernel.family = kqd::kernels::KernelFamily::Polynomial;
//! let result = permutation_test(&x, &y, &cfg, 300, 0.05, &mut rng).unwrap();
//! println!("p = {:.4}, reject = {}", result.p_value, result.reject);
//! ```
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod cli;
pub mod data;
pub mod datagen;
pub mod directions;
pub mod discrepancies;
mod error;
pub mod io;
pub mod kernels;
pub mod quantiles;
pub mod rng;
pub mod testing;

pub use data::{Matrix, SampleSet};
pub use error::{Error, Result};
