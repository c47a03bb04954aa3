//! C ABI for the shiftrc numerical kernels.
//!
//! Objects cross the boundary as opaque handles created by `*_new` functions
//! and released by the matching `*_free`. Every fallible call returns a
//! [`ShiftrcStatus`]; on failure a message is available from
//! [`shiftrc_last_error`] on the calling thread until its next failing call.
//! Matrices are exchanged in row-major order.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::DMatrix;
use shiftrc::numerics::{self, NrmseMode};
use shiftrc::reservoir::StateMatrix;
use shiftrc::shift_select::{self, ShiftedMatrix};
use shiftrc::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftrcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Shape = 3,
    Singular = 4,
    Length = 5,
    Domain = 6,
    BufferTooSmall = 7,
    Internal = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftrcNrmseMode {
    Global = 0,
    PaperLiteral = 1,
}

/// Dense `f64` matrix.
pub struct ShiftrcMatrix {
    inner: DMatrix<f64>,
}

/// Column-pivoted QR factorization of a [`ShiftrcMatrix`].
pub struct ShiftrcQr {
    inner: numerics::PivotedQR,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> ShiftrcStatus {
    match err {
        Error::Shape(_) | Error::Index(_) | Error::UnknownColumn { .. } => ShiftrcStatus::Shape,
        Error::Singular { .. } => ShiftrcStatus::Singular,
        Error::Length { .. } => ShiftrcStatus::Length,
        Error::Domain(_) | Error::DegenerateSignal { .. } | Error::DegenerateTarget { .. } => ShiftrcStatus::Domain,
        Error::InvalidParameter(_) | Error::Config(_) => ShiftrcStatus::InvalidArgument,
        _ => ShiftrcStatus::Internal,
    }
}

struct Fail(ShiftrcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ShiftrcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ShiftrcStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ShiftrcStatus::Internal
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(ShiftrcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

fn check_len(have: usize, need: usize, what: &str) -> Result<(), Fail> {
    if have < need {
        return Err(Fail(
            ShiftrcStatus::BufferTooSmall,
            format!("{what} holds {have} elements, {need} required"),
        ));
    }
    Ok(())
}

unsafe fn out_ptr<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn unshifted(m: &DMatrix<f64>) -> Result<ShiftedMatrix, Fail> {
    let s = StateMatrix::new(m.clone(), 0)?;
    Ok(shift_select::build_shifted_matrix(&s, 0)?)
}

/// Message for the last failing call on this thread, or null. Owned by the
/// library.
#[no_mangle]
pub extern "C" fn shiftrc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn shiftrc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies `rows*cols` row-major values into a new matrix.
///
/// # Safety
/// `data` must point to `rows*cols` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn shiftrc_matrix_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut ShiftrcMatrix,
) -> ShiftrcStatus {
    guard(|| {
        let n = rows
            .checked_mul(cols)
            .ok_or_else(|| Fail(ShiftrcStatus::InvalidArgument, "rows*cols overflows".into()))?;
        let values = slice(data, n, "data")?;
        let inner = DMatrix::from_row_slice(rows, cols, values);
        out_ptr(out, ShiftrcMatrix { inner })
    })
}

/// # Safety
/// `m` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn shiftrc_matrix_free(m: *mut ShiftrcMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle; `rows` and `cols` may be null.
#[no_mangle]
pub unsafe extern "C" fn shiftrc_matrix_shape(m: *const ShiftrcMatrix, rows: *mut usize, cols: *mut usize) -> ShiftrcStatus {
    guard(|| {
        let m = handle(m, "matrix")?;
        if let Some(r) = rows.as_mut() {
            *r = m.inner.nrows();
        }
        if let Some(c) = cols.as_mut() {
            *c = m.inner.ncols();
        }
        Ok(())
    })
}

/// Writes the matrix row-major into `buf` (capacity `len`).
///
/// # Safety
/// `m` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn shiftrc_matrix_copy(m: *const ShiftrcMatrix, buf: *mut f64, len: usize) -> ShiftrcStatus {
    guard(|| {
        let m = handle(m, "matrix")?;
        let (r, c) = m.inner.shape();
        check_len(len, r * c, "buf")?;
        let out = slice_mut(buf, r * c, "buf")?;
        for i in 0..r {
            for j in 0..c {
                out[i * c + j] = m.inner[(i, j)];
            }
        }
        Ok(())
    })
}

/// Time-shift augmentation of a `T×M` state matrix into
/// `(T−tau_max)×M(tau_max+1)`. Column `shift*M + node` holds `node` delayed
/// by `shift` samples.
///
/// # Safety
/// `states` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn shiftrc_build_shifted(
    states: *const ShiftrcMatrix,
    tau_max: usize,
    out: *mut *mut ShiftrcMatrix,
) -> ShiftrcStatus {
    guard(|| {
        let s = StateMatrix::new(handle(states, "states")?.inner.clone(), 0)?;
        let shifted = shift_select::build_shifted_matrix(&s, tau_max)?;
        out_ptr(out, ShiftrcMatrix { inner: shifted.values })
    })
}

/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn shiftrc_qr_new(m: *const ShiftrcMatrix, out: *mut *mut ShiftrcQr) -> ShiftrcStatus {
    guard(|| {
        let inner = numerics::qr_column_pivot(&handle(m, "matrix")?.inner)?;
        out_ptr(out, ShiftrcQr { inner })
    })
}

/// # Safety
/// `qr` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn shiftrc_qr_free(qr: *mut ShiftrcQr) {
    if !qr.is_null() {
        drop(Box::from_raw(qr));
    }
}

/// Number of columns `M` of the factored matrix.
///
/// # Safety
/// `qr` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn shiftrc_qr_ncols(qr: *const ShiftrcQr, out: *mut usize) -> ShiftrcStatus {
    guard(|| {
        let qr = handle(qr, "qr")?;
        *out.as_mut().ok_or_else(|| null("out"))? = qr.inner.ncols();
        Ok(())
    })
}

/// Pivot order: `perm[k]` is the source column at position `k`.
///
/// # Safety
/// `qr` must be a live handle and `buf` writable for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn shiftrc_qr_perm(qr: *const ShiftrcQr, buf: *mut usize, len: usize) -> ShiftrcStatus {
    guard(|| {
        let qr = handle(qr, "qr")?;
        let perm = &qr.inner.perm;
        check_len(len, perm.len(), "buf")?;
        slice_mut(buf, perm.len(), "buf")?.copy_from_slice(perm);
        Ok(())
    })
}

/// `|R_kk|` in pivot order.
///
/// # Safety
/// `qr` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn shiftrc_qr_r_diag(qr: *const ShiftrcQr, buf: *mut f64, len: usize) -> ShiftrcStatus {
    guard(|| {
        let qr = handle(qr, "qr")?;
        let d = &qr.inner.r_diag;
        check_len(len, d.len(), "buf")?;
        slice_mut(buf, d.len(), "buf")?.copy_from_slice(d);
        Ok(())
    })
}

/// Count of `|R_kk| > tol_rel·|R_00|`.
///
/// # Safety
/// `qr` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn shiftrc_qr_rank(qr: *const ShiftrcQr, tol_rel: f64, out: *mut usize) -> ShiftrcStatus {
    guard(|| {
        let qr = handle(qr, "qr")?;
        *out.as_mut().ok_or_else(|| null("out"))? = numerics::estimate_rank(&qr.inner, tol_rel);
        Ok(())
    })
}

/// Indices of the `m_red` columns ranked first by pivoted QR.
///
/// # Safety
/// `m` must be a live handle and `buf` writable for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn shiftrc_select_rrqr(
    m: *const ShiftrcMatrix,
    m_red: usize,
    buf: *mut usize,
    len: usize,
) -> ShiftrcStatus {
    guard(|| {
        check_len(len, m_red, "buf")?;
        let o2 = unshifted(&handle(m, "matrix")?.inner)?;
        let sel = shift_select::rrqr_select(&o2, m_red)?;
        let out = slice_mut(buf, m_red, "buf")?;
        for (o, c) in out.iter_mut().zip(&sel.retained) {
            *o = c.node;
        }
        Ok(())
    })
}

/// `m_red` distinct column indices drawn uniformly with the given seed.
///
/// # Safety
/// `m` must be a live handle and `buf` writable for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn shiftrc_select_random(
    m: *const ShiftrcMatrix,
    m_red: usize,
    seed: u64,
    buf: *mut usize,
    len: usize,
) -> ShiftrcStatus {
    guard(|| {
        check_len(len, m_red, "buf")?;
        let o2 = unshifted(&handle(m, "matrix")?.inner)?;
        let sel = shift_select::random_select(&o2, m_red, seed)?;
        let out = slice_mut(buf, m_red, "buf")?;
        for (o, c) in out.iter_mut().zip(&sel.retained) {
            *o = c.node;
        }
        Ok(())
    })
}

/// Ridge readout for `x` (`T×K`) and target `g` (length `T`). Writes `K`
/// weights, or `K+1` with the bias last when `bias` is nonzero.
///
/// # Safety
/// `x` must be a live handle, `g` readable for `g_len` doubles and `w`
/// writable for `w_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn shiftrc_ridge_fit(
    x: *const ShiftrcMatrix,
    g: *const f64,
    g_len: usize,
    lambda: f64,
    bias: bool,
    w: *mut f64,
    w_len: usize,
) -> ShiftrcStatus {
    guard(|| {
        let x = &handle(x, "x")?.inner;
        let g = slice(g, g_len, "g")?;
        let readout = numerics::ridge_fit(x, g, lambda, bias)?;
        let n = readout.w.len();
        check_len(w_len, n, "w")?;
        slice_mut(w, n, "w")?.copy_from_slice(readout.w.as_slice());
        Ok(())
    })
}

/// # Safety
/// `g` and `h` must be readable for `n` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn shiftrc_nrmse(
    g: *const f64,
    h: *const f64,
    n: usize,
    mode: ShiftrcNrmseMode,
    out: *mut f64,
) -> ShiftrcStatus {
    guard(|| {
        let mode = match mode {
            ShiftrcNrmseMode::Global => NrmseMode::Global,
            ShiftrcNrmseMode::PaperLiteral => NrmseMode::PaperLiteral,
        };
        let v = numerics::nrmse(slice(g, n, "g")?, slice(h, n, "h")?, mode)?;
        *out.as_mut().ok_or_else(|| null("out"))? = v;
        Ok(())
    })
}
