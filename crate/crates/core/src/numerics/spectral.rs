//! Singular-value based diagnostics: covariance rank and the trailing-block
//! bound of a pivoted QR.

use nalgebra::DMatrix;

use super::qr::PivotedQR;
use crate::error::{Error, Result};

/// Singular values in non-increasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Numerical rank of `ΩᵀΩ`: the count of `σ_i(Ω)²` above `tol_rel · σ_1(Ω)²`,
/// computed from `Ω` itself.
pub fn covariance_rank(omega: &DMatrix<f64>, tol_rel: f64) -> usize {
    let sv = singular_values(omega);
    let lead = match sv.first() {
        Some(&s) if s > 0.0 => s * s,
        _ => return 0,
    };
    sv.iter().filter(|&&s| s * s > tol_rel * lead).count()
}

/// `(σ_{M-ℓ+1}(B), ‖R₂₂‖₂)` where `R₂₂` is the trailing `ℓ×ℓ` block of `R`.
///
/// Singular values of `B` are taken from `R`, which shares them because `Q`
/// is orthogonal.
pub fn r22_bound_check(qr: &PivotedQR, ell: usize) -> Result<(f64, f64)> {
    let m = qr.ncols();
    if ell == 0 || ell > m {
        return Err(Error::Index(format!("ell = {ell} outside 1..={m}")));
    }
    let r = qr.r();
    let sigma = singular_values(&r)[m - ell];
    let r22 = r.view((m - ell, m - ell), (ell, ell)).clone_owned();
    let r22_norm = singular_values(&r22)[0];
    Ok((sigma, r22_norm))
}
