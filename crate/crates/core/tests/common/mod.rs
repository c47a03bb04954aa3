//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// `rows×cols` product of uniform factors with inner dimension `rank`.
pub fn low_rank(rng: &mut ChaCha8Rng, rows: usize, cols: usize, rank: usize) -> DMatrix<f64> {
    uniform(rng, rows, rank) * uniform(rng, rank, cols)
}

/// Singular values by one-sided (Hestenes) Jacobi rotations, descending.
pub fn jacobi_singular_values(b: &DMatrix<f64>) -> Vec<f64> {
    let mut a = b.clone();
    let n = a.ncols();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dot(&a.column(q));
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..a.nrows() {
                    let (x, y) = (a[(i, p)], a[(i, q)]);
                    a[(i, p)] = c * x - s * y;
                    a[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n).map(|j| a.column(j).norm()).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

pub fn spectral_norm(b: &DMatrix<f64>) -> f64 {
    jacobi_singular_values(b).first().copied().unwrap_or(0.0)
}

/// Least squares by modified Gram–Schmidt with one reorthogonalization pass.
pub fn mgs_least_squares(x: &DMatrix<f64>, g: &[f64]) -> Vec<f64> {
    let (t, k) = x.shape();
    let mut q = x.clone();
    let mut r = DMatrix::<f64>::zeros(k, k);
    for j in 0..k {
        for _pass in 0..2 {
            for i in 0..j {
                let d = q.column(i).dot(&q.column(j));
                r[(i, j)] += d;
                for row in 0..t {
                    q[(row, j)] -= d * q[(row, i)];
                }
            }
        }
        let nrm = q.column(j).norm();
        r[(j, j)] = nrm;
        for row in 0..t {
            q[(row, j)] /= nrm;
        }
    }
    let qtg: Vec<f64> = (0..k).map(|j| (0..t).map(|i| q[(i, j)] * g[i]).sum()).collect();
    let mut w = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| r[(i, j)] * w[j]).sum();
        w[i] = (qtg[i] - s) / r[(i, i)];
    }
    w
}

/// Root of a continuous `f` on `[lo, hi]` with a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "no sign change");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
