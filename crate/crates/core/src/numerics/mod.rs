//! Dense linear algebra: pivoted QR, rank estimation, ridge regression and
//! error metrics.

mod metrics;
mod qr;
mod ridge;
mod spectral;

pub use metrics::{nrmse, NrmseMode};
pub use qr::{estimate_rank, qr_column_pivot, PivotedQR};
pub use ridge::{predict, ridge_fit, Readout, RIDGE_RANK_TOL};
pub use spectral::{covariance_rank, r22_bound_check, singular_values};

/// Default relative tolerance for rank estimates.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
