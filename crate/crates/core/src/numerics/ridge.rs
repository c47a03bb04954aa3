use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::qr::{estimate_rank, qr_column_pivot};
use crate::error::{Error, Result};

/// Relative pivot threshold used to detect rank deficiency when `lambda = 0`.
pub const RIDGE_RANK_TOL: f64 = 1e-10;

/// Trained linear readout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Readout {
    /// One weight per design column, followed by the intercept when
    /// `bias_included`.
    pub w: Vec<f64>,
    pub lambda: f64,
    pub bias_included: bool,
}

fn with_bias(x: &DMatrix<f64>) -> DMatrix<f64> {
    let (t, k) = x.shape();
    debug_assert!(t > 0);
    x.clone().insert_column(k, 1.0)
}

/// Minimizes `‖X·w − g‖² + λ‖w‖²` by a pivoted QR of the stacked system
/// `[X; √λ·I]`. The intercept, when requested, is regularized like every
/// other weight.
pub fn ridge_fit(x: &DMatrix<f64>, g: &[f64], lambda: f64, bias_included: bool) -> Result<Readout> {
    let (t, k0) = x.shape();
    if t == 0 || k0 == 0 {
        return Err(Error::Shape(format!("ridge design is {t}x{k0}")));
    }
    if g.len() != t {
        return Err(Error::Shape(format!("target length {} != {t} rows", g.len())));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
    }
    let design = if bias_included { with_bias(x) } else { x.clone() };
    let k = design.ncols();

    let (system, rhs) = if lambda > 0.0 {
        let root = lambda.sqrt();
        let mut s = DMatrix::zeros(t + k, k);
        s.view_mut((0, 0), (t, k)).copy_from(&design);
        for i in 0..k {
            s[(t + i, i)] = root;
        }
        let mut b = g.to_vec();
        b.resize(t + k, 0.0);
        (s, b)
    } else {
        if t < k {
            return Err(Error::Singular { rank: t, cols: k });
        }
        (design, g.to_vec())
    };

    let qr = qr_column_pivot(&system)?;
    let rank = estimate_rank(&qr, RIDGE_RANK_TOL);
    if rank < k {
        return Err(Error::Singular { rank, cols: k });
    }
    let w = qr.solve_least_squares(&rhs, k);
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular { rank, cols: k });
    }
    Ok(Readout {
        w,
        lambda,
        bias_included,
    })
}

/// `X·w`, with the intercept added when the readout carries one.
pub fn predict(x: &DMatrix<f64>, readout: &Readout) -> Result<Vec<f64>> {
    let k = x.ncols() + usize::from(readout.bias_included);
    if k != readout.w.len() {
        return Err(Error::Shape(format!(
            "design has {} columns (+bias: {}), readout has {} weights",
            x.ncols(),
            readout.bias_included,
            readout.w.len()
        )));
    }
    let intercept = if readout.bias_included { readout.w[k - 1] } else { 0.0 };
    let mut out = vec![intercept; x.nrows()];
    for (j, &wj) in readout.w[..x.ncols()].iter().enumerate() {
        if wj == 0.0 {
            continue;
        }
        for (o, v) in out.iter_mut().zip(x.column(j).iter()) {
            *o += wj * v;
        }
    }
    Ok(out)
}
