//! Shared oracles for integration tests. Everything here is written
//! independently of the library's computation paths: brute-force
//! enumerations and textbook formulas only.

#![allow(dead_code)]

use kqd::kernels::KernelSpec;
use kqd::SampleSet;
use rand::Rng;
use rand_distr::StandardNormal;

/// Exact 1D p-Wasserstein by exhaustive search over all assignments:
/// min over permutations σ of ((1/n) Σ |x_i - y_{σ(i)}|^p)^(1/p).
pub fn wasserstein_exhaustive(x: &[f64], y: &[f64], p: u32) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = y.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    permute(&mut perm, n, &mut |sigma| {
        let cost: f64 = x
            .iter()
            .zip(sigma.iter())
            .map(|(xi, &j)| (xi - y[j]).abs().powi(p as i32))
            .sum();
        best = best.min(cost / n as f64);
    });
    best.powf(1.0 / p as f64)
}

/// Heap's algorithm over the first `k` entries.
fn permute(indices: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k <= 1 {
        visit(indices);
        return;
    }
    for i in 0..k {
        permute(indices, k - 1, visit);
        if k % 2 == 0 {
            indices.swap(i, k - 1);
        } else {
            indices.swap(0, k - 1);
        }
    }
}

/// Literal double-sum U-statistic for the squared MMD, no shared terms.
pub fn mmd2_u_naive(x: &SampleSet, y: &SampleSet, kernel: &KernelSpec) -> f64 {
    let n = x.n() as f64;
    let m = y.n() as f64;
    let mut kxx = 0.0;
    for i in 0..x.n() {
        for j in 0..x.n() {
            if i != j {
                kxx += kernel.eval(x.row(i), x.row(j)).unwrap();
            }
        }
    }
    let mut kyy = 0.0;
    for i in 0..y.n() {
        for j in 0..y.n() {
            if i != j {
                kyy += kernel.eval(y.row(i), y.row(j)).unwrap();
            }
        }
    }
    let mut kxy = 0.0;
    for i in 0..x.n() {
        for j in 0..y.n() {
            kxy += kernel.eval(x.row(i), y.row(j)).unwrap();
        }
    }
    kxx / (n * (n - 1.0)) + kyy / (m * (m - 1.0)) - 2.0 * kxy / (n * m)
}

/// Literal double-sum V-statistic for the squared MMD.
pub fn mmd2_v_naive(x: &SampleSet, y: &SampleSet, kernel: &KernelSpec) -> f64 {
    let n = x.n() as f64;
    let m = y.n() as f64;
    let mut kxx = 0.0;
    for i in 0..x.n() {
        for j in 0..x.n() {
            kxx += kernel.eval(x.row(i), x.row(j)).unwrap();
        }
    }
    let mut kyy = 0.0;
    for i in 0..y.n() {
        for j in 0..y.n() {
            kyy += kernel.eval(y.row(i), y.row(j)).unwrap();
        }
    }
    let mut kxy = 0.0;
    for i in 0..x.n() {
        for j in 0..y.n() {
            kxy += kernel.eval(x.row(i), y.row(j)).unwrap();
        }
    }
    kxx / (n * n) + kyy / (m * m) - 2.0 * kxy / (n * m)
}

/// Literal incomplete-U MMD sum over the first `r` subdiagonals.
pub fn mmd2_multi_naive(x: &SampleSet, y: &SampleSet, kernel: &KernelSpec, r: usize) -> f64 {
    let n = x.n();
    let mut acc = 0.0;
    for j in 1..=r {
        for i in 0..(n - j) {
            acc += kernel.eval(x.row(i), x.row(i + j)).unwrap();
            acc += kernel.eval(y.row(i), y.row(i + j)).unwrap();
            acc -= kernel.eval(x.row(i), y.row(i + j)).unwrap();
            acc -= kernel.eval(x.row(i + j), y.row(i)).unwrap();
        }
    }
    2.0 * acc / (r as f64 * (2 * n - r - 1) as f64)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(matrix: &[Vec<f64>]) -> Vec<f64> {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-18 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// n x d table of standard normal draws.
pub fn gaussian_set(n: usize, d: usize, rng: &mut impl Rng) -> SampleSet {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    SampleSet::from_rows(&rows).unwrap()
}

/// As `gaussian_set` with every coordinate shifted.
pub fn shifted_gaussian_set(n: usize, d: usize, shift: f64, rng: &mut impl Rng) -> SampleSet {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..d)
                .map(|_| rng.sample::<f64, _>(StandardNormal) + shift)
                .collect()
        })
        .collect();
    SampleSet::from_rows(&rows).unwrap()
}
