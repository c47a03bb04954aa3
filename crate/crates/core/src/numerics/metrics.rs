use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NrmseMode {
    /// `sqrt(Σ(g−h)² / Σg²)`
    #[default]
    Global,
    /// `sqrt((1/T) Σ (g−h)²/g²)`, skipping samples with `|g| < 1e-9`.
    PaperLiteral,
}

pub fn nrmse(g: &[f64], h: &[f64], mode: NrmseMode) -> Result<f64> {
    if g.len() != h.len() || g.is_empty() {
        return Err(Error::Shape(format!(
            "nrmse needs equal non-empty lengths, got {} and {}",
            g.len(),
            h.len()
        )));
    }
    match mode {
        NrmseMode::Global => {
            let den: f64 = g.iter().map(|v| v * v).sum();
            if den < 1e-18 {
                return Err(Error::DegenerateTarget { sum_sq: den });
            }
            let num: f64 = g.iter().zip(h).map(|(a, b)| (a - b) * (a - b)).sum();
            Ok((num / den).sqrt())
        }
        NrmseMode::PaperLiteral => {
            let mut sum = 0.0;
            let mut count = 0usize;
            for (a, b) in g.iter().zip(h) {
                if a.abs() < 1e-9 {
                    continue;
                }
                sum += (a - b) * (a - b) / (a * a);
                count += 1;
            }
            if count == 0 {
                return Err(Error::DegenerateTarget { sum_sq: 0.0 });
            }
            Ok((sum / count as f64).sqrt())
        }
    }
}
