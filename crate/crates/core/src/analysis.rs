//! Reservoir diagnostics: joint permutation entropy over all nodes and the
//! mean node–target correlation, plus the small rank statistics used to
//! judge trends across parameter sweeps.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::reservoir::StateMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowStride {
    /// Every window start position.
    #[default]
    Sliding,
    /// Non-overlapping windows.
    Disjoint,
}

impl WindowStride {
    fn step(self, window: usize) -> usize {
        match self {
            WindowStride::Sliding => 1,
            WindowStride::Disjoint => window,
        }
    }
}

/// Ordinal codes of one series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    pub symbols: Vec<u32>,
    pub window: usize,
}

/// 1-based rank of each point in the window; ties go to the earlier index.
pub fn ordinal_pattern(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0; values.len()];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = r + 1;
    }
    ranks
}

/// Lehmer code of a rank pattern: `Σ_i c_i·(w−1−i)!` with `c_i` the number of
/// later entries smaller than entry `i`. The identity pattern maps to 0.
pub fn lehmer_code(ranks: &[usize]) -> u32 {
    let w = ranks.len();
    let mut code = 0u64;
    for i in 0..w {
        let smaller = ranks[i + 1..].iter().filter(|&&r| r < ranks[i]).count() as u64;
        code = code * (w - i) as u64 + smaller;
    }
    code as u32
}

pub fn ordinal_symbols(series: &[f64], window: usize) -> Result<SymbolSequence> {
    ordinal_symbols_with_stride(series, window, WindowStride::Sliding)
}

pub fn ordinal_symbols_with_stride(series: &[f64], window: usize, stride: WindowStride) -> Result<SymbolSequence> {
    if window == 0 || series.len() < window {
        return Err(Error::Length {
            required: window.max(1),
            available: series.len(),
        });
    }
    let symbols = (0..=series.len() - window)
        .step_by(stride.step(window))
        .map(|s| lehmer_code(&ordinal_pattern(&series[s..s + window])))
        .collect();
    Ok(SymbolSequence { symbols, window })
}

/// Shannon entropy (bits) of the empirical distribution of joint symbols
/// `Λ(t) = (ψ_1(t), …, ψ_M(t))`.
pub fn reservoir_entropy(s: &StateMatrix, window: usize) -> Result<f64> {
    reservoir_entropy_with_stride(s, window, WindowStride::Sliding)
}

pub fn reservoir_entropy_with_stride(s: &StateMatrix, window: usize, stride: WindowStride) -> Result<f64> {
    let per_node = (0..s.nodes())
        .map(|j| {
            let col: Vec<f64> = s.values.column(j).iter().copied().collect();
            ordinal_symbols_with_stride(&col, window, stride)
        })
        .collect::<Result<Vec<_>>>()?;
    let positions = per_node.first().map_or(0, |p| p.symbols.len());
    if positions == 0 {
        return Ok(0.0);
    }
    let mut counts: HashMap<Vec<u32>, usize> = HashMap::new();
    for t in 0..positions {
        let key: Vec<u32> = per_node.iter().map(|p| p.symbols[t]).collect();
        *counts.entry(key).or_default() += 1;
    }
    Ok(entropy_bits(counts.into_values().collect(), positions))
}

/// Order-independent: counts are sorted before summation.
fn entropy_bits(mut counts: Vec<usize>, total: usize) -> f64 {
    counts.sort_unstable();
    let n = total as f64;
    let h: f64 = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelationMode {
    /// `|Pearson r|` at zero lag; zero-variance nodes count as 0.
    #[default]
    Pearson,
    /// `|Σχg / (Σχ · Σg)|`; NaN when either sum is below 1e-12 in magnitude.
    PaperLiteral,
}

/// Mean over nodes of the absolute zero-lag correlation with `g`.
pub fn node_target_correlation(s: &StateMatrix, g: &[f64], mode: CorrelationMode) -> Result<f64> {
    if g.len() != s.rows() {
        return Err(Error::Shape(format!("target length {} != {} state rows", g.len(), s.rows())));
    }
    if s.nodes() == 0 || g.is_empty() {
        return Err(Error::Shape("empty state matrix".into()));
    }
    let n = g.len() as f64;
    let g_sum: f64 = g.iter().sum();
    let g_mean = g_sum / n;
    let g_ss: f64 = g.iter().map(|v| (v - g_mean) * (v - g_mean)).sum();

    let mut total = 0.0;
    for j in 0..s.nodes() {
        let x = s.values.column(j);
        let c = match mode {
            CorrelationMode::Pearson => {
                let x_mean = x.iter().sum::<f64>() / n;
                let mut sxy = 0.0;
                let mut sxx = 0.0;
                for (xi, gi) in x.iter().zip(g) {
                    sxy += (xi - x_mean) * (gi - g_mean);
                    sxx += (xi - x_mean) * (xi - x_mean);
                }
                if sxx == 0.0 || g_ss == 0.0 {
                    0.0
                } else {
                    (sxy / (sxx * g_ss).sqrt()).abs().min(1.0)
                }
            }
            CorrelationMode::PaperLiteral => {
                let x_sum: f64 = x.iter().sum();
                if x_sum.abs() < 1e-12 || g_sum.abs() < 1e-12 {
                    f64::NAN
                } else {
                    let sxg: f64 = x.iter().zip(g).map(|(a, b)| a * b).sum();
                    (sxg / (x_sum * g_sum)).abs()
                }
            }
        };
        total += c;
    }
    Ok(total / s.nodes() as f64)
}

/// Average ranks (1-based), ties sharing the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation and its two-sided p-value from the Student-t
/// approximation with `n − 2` degrees of freedom.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::Shape("spearman needs two equal-length samples of size >= 3".into()));
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok((0.0, 1.0));
    }
    let rho = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    if rho.abs() >= 1.0 {
        return Ok((rho, 0.0));
    }
    let df = n - 2.0;
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Domain(e.to_string()))?;
    let p = 2.0 * (1.0 - dist.cdf(t.abs()));
    Ok((rho, p.clamp(0.0, 1.0)))
}

/// One-sided exact sign test: `P(X ≥ wins)` for `X ~ Binomial(n, 1/2)`.
pub fn sign_test_p(wins: usize, n: usize) -> f64 {
    if wins > n {
        return 0.0;
    }
    let mut total = 0.0;
    for k in wins..=n {
        total += binomial(n, k);
    }
    total / 2f64.powi(n as i32)
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
