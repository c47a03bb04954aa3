//! Householder QR with greedy (Businger–Golub) column pivoting.
//!
//! The factorization is stored compactly: `R` in the upper triangle of the
//! work matrix and the essential part of each Householder vector below the
//! diagonal (leading component implicitly 1), as in LAPACK's `geqp3`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Downdated squared residual norms are recomputed from scratch once they
/// fall below this fraction of the last exact value.
const NORM_RECOMPUTE_RATIO: f64 = 1e-6;

/// Column-pivoted QR factorization `B·Π = Q·R` of a `T×M` matrix, `T ≥ M`.
#[derive(Debug, Clone)]
pub struct PivotedQR {
    compact: DMatrix<f64>,
    tau: Vec<f64>,
    /// `1 − tau[k]`, kept separately to avoid cancellation when `tau ≈ 1`.
    tau_c: Vec<f64>,
    /// `perm[k]` is the source column placed at position `k`.
    pub perm: Vec<usize>,
    /// `|R_kk|`, non-increasing.
    pub r_diag: Vec<f64>,
}

impl PivotedQR {
    pub fn nrows(&self) -> usize {
        self.compact.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.compact.ncols()
    }

    /// The `M×M` upper-triangular factor (the remaining `T-M` rows of the
    /// full `T×M` factor are zero).
    pub fn r(&self) -> DMatrix<f64> {
        let m = self.ncols();
        DMatrix::from_fn(m, m, |i, j| if i <= j { self.compact[(i, j)] } else { 0.0 })
    }

    /// Overwrites `b` (length `T`) with `Qᵀ·b`.
    pub fn apply_qt(&self, b: &mut [f64]) {
        let t = self.nrows();
        assert_eq!(b.len(), t, "apply_qt: length mismatch");
        for k in 0..self.ncols() {
            self.reflect(k, b);
        }
    }

    /// Overwrites `b` (length `T`) with `Q·b`.
    pub fn apply_q(&self, b: &mut [f64]) {
        let t = self.nrows();
        assert_eq!(b.len(), t, "apply_q: length mismatch");
        for k in (0..self.ncols()).rev() {
            self.reflect(k, b);
        }
    }

    fn reflect(&self, k: usize, b: &mut [f64]) {
        let tau = self.tau[k];
        if tau == 0.0 {
            return;
        }
        let v = &self.compact.as_slice()[k * self.nrows() + k + 1..(k + 1) * self.nrows()];
        let tail = &mut b[k..];
        let d = dot(v, &tail[1..]);
        let s = tau * (tail[0] + d);
        tail[0] = self.tau_c[k] * tail[0] - tau * d;
        axpy(-s, v, &mut tail[1..]);
    }

    /// First `M` columns of `Q`.
    pub fn q_thin(&self) -> DMatrix<f64> {
        self.q_columns(self.ncols())
    }

    /// The full `T×T` orthogonal factor.
    pub fn q_full(&self) -> DMatrix<f64> {
        self.q_columns(self.nrows())
    }

    fn q_columns(&self, count: usize) -> DMatrix<f64> {
        let t = self.nrows();
        let mut q = DMatrix::zeros(t, count);
        for j in 0..count {
            let mut e = vec![0.0; t];
            e[j] = 1.0;
            self.apply_q(&mut e);
            q.column_mut(j).copy_from_slice(&e);
        }
        q
    }

    /// Largest `|R_kj| - |R_kk|` over `j > k`. Positive values mean a diagonal
    /// entry is not the largest in its row.
    pub fn row_dominance_violation(&self) -> f64 {
        let m = self.ncols();
        let mut worst = f64::NEG_INFINITY;
        for k in 0..m {
            let d = self.compact[(k, k)].abs();
            for j in k + 1..m {
                worst = worst.max(self.compact[(k, j)].abs() - d);
            }
        }
        worst
    }

    /// Solves `min ‖B·x − b‖₂` through the factorization, using only the
    /// leading `rank` pivots. Returns `x` in source column order.
    pub fn solve_least_squares(&self, b: &[f64], rank: usize) -> Vec<f64> {
        let m = self.ncols();
        let mut c = b.to_vec();
        self.apply_qt(&mut c);
        let mut z = vec![0.0; m];
        for i in (0..rank).rev() {
            let s: f64 = (i + 1..rank).map(|j| self.compact[(i, j)] * z[j]).sum();
            z[i] = (c[i] - s) / self.compact[(i, i)];
        }
        let mut x = vec![0.0; m];
        for (k, &src) in self.perm.iter().enumerate() {
            x[src] = z[k];
        }
        x
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Greedy column-pivoted Householder QR.
///
/// At step `k` the remaining column with the largest residual norm is swapped
/// into position `k` and annihilated below the diagonal. Ties go to the lower
/// index.
pub fn qr_column_pivot(b: &DMatrix<f64>) -> Result<PivotedQR> {
    let (t, m) = b.shape();
    if t < m {
        return Err(Error::Shape(format!(
            "column-pivoted QR needs rows >= cols, got {t}x{m}"
        )));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("matrix contains non-finite entries".into()));
    }
    let mut a = b.clone();
    let mut perm: Vec<usize> = (0..m).collect();
    let mut tau = vec![0.0; m];
    let mut tau_c = vec![1.0; m];
    let mut r_diag = vec![0.0; m];

    let data = a.as_mut_slice();
    let mut norm_sq: Vec<f64> = (0..m).map(|j| sum_sq(&data[j * t..(j + 1) * t])).collect();
    let mut exact_sq = norm_sq.clone();

    for k in 0..m {
        let mut p = k;
        for j in k + 1..m {
            if norm_sq[j] > norm_sq[p] {
                p = j;
            }
        }
        if p != k {
            let (left, right) = data.split_at_mut(p * t);
            left[k * t..(k + 1) * t].swap_with_slice(&mut right[..t]);
            norm_sq.swap(k, p);
            exact_sq.swap(k, p);
            perm.swap(k, p);
        }

        let (head, rest) = data.split_at_mut((k + 1) * t);
        let col = &mut head[k * t..];
        let x = &mut col[k..];
        let nrm = sum_sq(x).sqrt();
        if nrm == 0.0 {
            tau[k] = 0.0;
            r_diag[k] = 0.0;
            continue;
        }
        let alpha = x[0];
        let beta = if alpha >= 0.0 { -nrm } else { nrm };
        tau[k] = (beta - alpha) / beta;
        tau_c[k] = alpha / beta;
        let scale = 1.0 / (alpha - beta);
        for v in &mut x[1..] {
            *v *= scale;
        }
        x[0] = beta;
        r_diag[k] = nrm;

        let v = &x[1..];
        let (tk, tck) = (tau[k], tau_c[k]);
        for (jj, other) in rest.chunks_exact_mut(t).enumerate() {
            let j = k + 1 + jj;
            let y = &mut other[k..];
            let d = dot(v, &y[1..]);
            let s = tk * (y[0] + d);
            y[0] = tck * y[0] - tk * d;
            axpy(-s, v, &mut y[1..]);

            let r = y[0];
            let down = norm_sq[j] - r * r;
            if down < NORM_RECOMPUTE_RATIO * exact_sq[j] || down <= 0.0 {
                let fresh = sum_sq(&y[1..]);
                norm_sq[j] = fresh;
                exact_sq[j] = fresh;
            } else {
                norm_sq[j] = down;
            }
        }
    }

    let qr = PivotedQR {
        compact: a,
        tau,
        tau_c,
        perm,
        r_diag,
    };
    let violation = qr.row_dominance_violation();
    if violation > 0.0 {
        let scale = qr.r_diag.first().copied().unwrap_or(0.0);
        if violation < 1e-12 * scale.max(1.0) {
            log::debug!("pivot row-dominance violated by {violation:e}");
        } else {
            log::warn!("pivot row-dominance violated by {violation:e}");
        }
    }
    Ok(qr)
}

#[inline]
fn sum_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Number of pivots with `|R_kk| > tol_rel · |R_00|`.
pub fn estimate_rank(qr: &PivotedQR, tol_rel: f64) -> usize {
    let lead = match qr.r_diag.first() {
        Some(&d) if d > 0.0 => d,
        _ => return 0,
    };
    qr.r_diag.iter().take_while(|&&d| d > tol_rel * lead).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn permuted(b: &DMatrix<f64>, perm: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(b.nrows(), perm.len(), |i, k| b[(i, perm[k])])
    }

    #[test]
    fn identity_factorization() {
        let b = DMatrix::<f64>::identity(3, 3);
        let qr = qr_column_pivot(&b).unwrap();
        let mut seen = qr.perm.clone();
        seen.sort();
        assert_eq!(seen, vec![0, 1, 2]);
        for d in &qr.r_diag {
            assert!((d - 1.0).abs() < 1e-15);
        }
        let rec = qr.q_thin() * qr.r();
        assert!((rec - permuted(&b, &qr.perm)).norm() < 1e-14);
    }

    #[test]
    fn two_column_hand_case() {
        let b = DMatrix::from_row_slice(3, 2, &[2.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let qr = qr_column_pivot(&b).unwrap();
        assert_eq!(qr.perm, vec![0, 1]);
        assert!((qr.r_diag[0] - 2.0).abs() < 1e-15);
        assert_eq!(qr.r_diag[1], 0.0);
    }

    #[test]
    fn zero_matrix() {
        let qr = qr_column_pivot(&DMatrix::zeros(4, 3)).unwrap();
        assert_eq!(qr.r_diag, vec![0.0; 3]);
        assert_eq!(estimate_rank(&qr, 1e-10), 0);
    }

    #[test]
    fn wide_matrix_rejected() {
        assert!(matches!(
            qr_column_pivot(&DMatrix::zeros(2, 3)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn duplicate_column_pivots_last() {
        let b = DMatrix::from_fn(20, 4, |i, j| {
            let j = if j == 3 { 1 } else { j };
            ((i * 7 + j * 13) as f64).sin() + j as f64 * 0.1
        });
        let qr = qr_column_pivot(&b).unwrap();
        let last = *qr.perm.last().unwrap();
        assert!(last == 1 || last == 3);
        assert!(qr.r_diag[3] < 1e-12 * qr.r_diag[0]);
        assert_eq!(estimate_rank(&qr, 1e-10), 3);
    }

    #[test]
    fn least_squares_solve() {
        let b = DMatrix::from_fn(6, 2, |i, j| if j == 0 { 1.0 } else { i as f64 });
        let y: Vec<f64> = (0..6).map(|i| 3.0 + 2.0 * i as f64).collect();
        let qr = qr_column_pivot(&b).unwrap();
        let x = qr.solve_least_squares(&y, 2);
        assert!((x[0] - 3.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }
}
