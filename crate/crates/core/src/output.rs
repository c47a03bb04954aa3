//! CSV / JSON writers shared by the command-line front end.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Formats a float with 17 significant digits (round-trip exact).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Empty string for `None`, otherwise [`fmt_f64`].
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

/// `n,node_0,...,node_{M-1}` table for a state matrix.
pub fn matrix_csv(values: &DMatrix<f64>, header_prefix: &str) -> String {
    let (rows, cols) = values.shape();
    let mut out = String::with_capacity(rows * cols * 24);
    out.push('n');
    for j in 0..cols {
        let _ = write!(out, ",{header_prefix}{j}");
    }
    out.push('\n');
    for i in 0..rows {
        let _ = write!(out, "{i}");
        for j in 0..cols {
            out.push(',');
            out.push_str(&fmt_f64(values[(i, j)]));
        }
        out.push('\n');
    }
    out
}

/// Single-column table `n,<name>`.
pub fn sequence_csv(name: &str, values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 28);
    let _ = writeln!(out, "n,{name}");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{i},{}", fmt_f64(*v));
    }
    out
}

/// `k,r_kk_abs` table of pivot magnitudes.
pub fn r_diag_csv(r_diag: &[f64]) -> String {
    let mut out = String::from("k,r_kk_abs\n");
    for (k, v) in r_diag.iter().enumerate() {
        let _ = writeln!(out, "{k},{}", fmt_f64(*v));
    }
    out
}

/// Git-style content hash: SHA-256 over `blob <len>\0<bytes>`, hex encoded.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}
