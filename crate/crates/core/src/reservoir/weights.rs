use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

const MAX_ADJACENCY_DRAWS: usize = 100;

fn nonzero_uniform<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let v: f64 = rng.random_range(-1.0..=1.0);
        if v != 0.0 {
            return v;
        }
    }
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    a.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Exactly `round(f·n)` entries (ties to even) drawn uniform in `[-1, 1]` at
/// positions sampled without replacement; the rest are zero.
pub fn generate_mask(n: usize, f_w: f64, seed: u64) -> Result<Vec<f64>> {
    if !(f_w > 0.0 && f_w <= 1.0) {
        return Err(Error::InvalidParameter(format!("f_w must lie in (0, 1], got {f_w}")));
    }
    let count = (f_w * n as f64).round_ties_even() as usize;
    if count == 0 {
        return Err(Error::InvalidParameter(format!(
            "round({f_w} * {n}) = 0 nonzero input weights"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut mask = vec![0.0; n];
    for pos in sample(&mut rng, n, count).into_iter() {
        mask[pos] = nonzero_uniform(&mut rng);
    }
    Ok(mask)
}

/// Sparse random adjacency with zero diagonal, every row holding at least one
/// nonzero, scaled to the requested spectral radius.
pub fn generate_adjacency(m: usize, f_a: f64, target_radius: f64, seed: u64) -> Result<DMatrix<f64>> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("adjacency needs M >= 2, got {m}")));
    }
    if !(f_a > 0.0 && f_a <= 1.0) {
        return Err(Error::InvalidParameter(format!("f_a must lie in (0, 1], got {f_a}")));
    }
    if !(target_radius > 0.0) {
        return Err(Error::InvalidParameter("spectral radius must be positive".into()));
    }
    let off_diag = m * (m - 1);
    let count = ((f_a * off_diag as f64).round() as usize).clamp(1, off_diag);
    let mut rng = rng_from_seed(seed);

    for _ in 0..MAX_ADJACENCY_DRAWS {
        let mut a = DMatrix::zeros(m, m);
        for idx in sample(&mut rng, off_diag, count).into_iter() {
            let i = idx / (m - 1);
            let mut j = idx % (m - 1);
            if j >= i {
                j += 1;
            }
            a[(i, j)] = nonzero_uniform(&mut rng);
        }
        for i in 0..m {
            if a.row(i).iter().all(|&v| v == 0.0) {
                let mut j = rng.random_range(0..m - 1);
                if j >= i {
                    j += 1;
                }
                a[(i, j)] = nonzero_uniform(&mut rng);
            }
        }
        let raw = spectral_radius(&a);
        if raw > 1e-300 && raw.is_finite() {
            a *= target_radius / raw;
            return Ok(a);
        }
    }
    Err(Error::ZeroSpectralRadius {
        attempts: MAX_ADJACENCY_DRAWS,
    })
}
