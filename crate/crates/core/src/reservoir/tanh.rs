use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::weights::{generate_adjacency, generate_mask, spectral_radius};
use super::{check_drive, StateMatrix};
use crate::error::{Error, Result};

/// Parameters from which a leaky-tanh reservoir is drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TanhParams {
    #[serde(default = "TanhParams::default_nodes")]
    pub nodes: usize,
    #[serde(default = "TanhParams::default_alpha")]
    pub alpha: f64,
    #[serde(default = "TanhParams::default_radius")]
    pub spectral_radius: f64,
    #[serde(default = "TanhParams::default_f_a")]
    pub f_a: f64,
    #[serde(default = "TanhParams::default_f_w")]
    pub f_w: f64,
}

impl TanhParams {
    fn default_nodes() -> usize {
        50
    }
    fn default_alpha() -> f64 {
        0.35
    }
    fn default_radius() -> f64 {
        0.5
    }
    fn default_f_a() -> f64 {
        0.5
    }
    fn default_f_w() -> f64 {
        1.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::InvalidParameter("tanh reservoir needs at least 2 nodes".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        for (name, f) in [("f_a", self.f_a), ("f_w", self.f_w)] {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::InvalidParameter(format!("{name} must lie in (0, 1], got {f}")));
            }
        }
        if !(self.spectral_radius > 0.0) {
            return Err(Error::InvalidParameter("spectral_radius must be positive".into()));
        }
        Ok(())
    }
}

impl Default for TanhParams {
    fn default() -> Self {
        TanhParams {
            nodes: Self::default_nodes(),
            alpha: Self::default_alpha(),
            spectral_radius: Self::default_radius(),
            f_a: Self::default_f_a(),
            f_w: Self::default_f_w(),
        }
    }
}

/// A concrete leaky-tanh network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TanhReservoirConfig {
    pub m: usize,
    pub alpha: f64,
    pub adjacency: DMatrix<f64>,
    pub w_in: Vec<f64>,
    pub f_a: f64,
    pub f_w: f64,
    pub spectral_radius: f64,
}

impl TanhReservoirConfig {
    pub fn generate(p: &TanhParams, adjacency_seed: u64, input_seed: u64) -> Result<Self> {
        p.validate()?;
        let adjacency = generate_adjacency(p.nodes, p.f_a, p.spectral_radius, adjacency_seed)?;
        let w_in = generate_mask(p.nodes, p.f_w, input_seed)?;
        Ok(TanhReservoirConfig {
            m: p.nodes,
            alpha: p.alpha,
            adjacency,
            w_in,
            f_a: p.f_a,
            f_w: p.f_w,
            spectral_radius: p.spectral_radius,
        })
    }

    /// Explicit network, without the sparsity/radius invariants of
    /// [`generate`](Self::generate).
    pub fn from_parts(alpha: f64, adjacency: DMatrix<f64>, w_in: Vec<f64>) -> Result<Self> {
        let m = w_in.len();
        if adjacency.shape() != (m, m) {
            return Err(Error::Shape(format!(
                "adjacency {:?} does not match {m} input weights",
                adjacency.shape()
            )));
        }
        let nnz = |n: usize, it: &mut dyn Iterator<Item = &f64>| it.filter(|v| **v != 0.0).count() as f64 / n.max(1) as f64;
        let radius = if m > 0 { spectral_radius(&adjacency) } else { 0.0 };
        Ok(TanhReservoirConfig {
            m,
            alpha,
            f_a: nnz(m * m.saturating_sub(1), &mut adjacency.iter()),
            f_w: nnz(m, &mut w_in.iter()),
            spectral_radius: radius,
            adjacency,
            w_in,
        })
    }
}

/// `χ(n+1) = (1−α)χ(n) + α·tanh(A·χ(n) + W_in·s(n) + 1)`
#[derive(Debug, Clone)]
pub struct TanhReservoir {
    cfg: TanhReservoirConfig,
    state: DVector<f64>,
    w_in: DVector<f64>,
    scratch: DVector<f64>,
}

impl TanhReservoir {
    pub fn new(cfg: TanhReservoirConfig) -> Self {
        let m = cfg.m;
        let w_in = DVector::from_vec(cfg.w_in.clone());
        TanhReservoir {
            cfg,
            state: DVector::zeros(m),
            w_in,
            scratch: DVector::zeros(m),
        }
    }

    pub fn config(&self) -> &TanhReservoirConfig {
        &self.cfg
    }

    pub fn state(&self) -> &[f64] {
        self.state.as_slice()
    }

    pub fn set_state(&mut self, state: &[f64]) -> Result<()> {
        if state.len() != self.cfg.m {
            return Err(Error::Shape(format!("state length {} != {}", state.len(), self.cfg.m)));
        }
        self.state.copy_from_slice(state);
        Ok(())
    }

    pub fn reset(&mut self) {
        self.state.fill(0.0);
    }

    fn step(&mut self, s: f64) {
        let a = self.cfg.alpha;
        self.scratch.copy_from(&self.w_in);
        self.scratch.gemv(1.0, &self.cfg.adjacency, &self.state, s);
        for (x, pre) in self.state.iter_mut().zip(self.scratch.iter()) {
            *x = (1.0 - a) * *x + a * (pre + 1.0).tanh();
        }
    }

    pub fn run(&mut self, drive: &[f64], washout: usize) -> Result<StateMatrix> {
        check_drive(drive.len(), washout)?;
        let m = self.cfg.m;
        let rows = drive.len() - washout;
        let mut values = DMatrix::zeros(rows, m);
        for (n, &s) in drive.iter().enumerate() {
            self.step(s);
            if n >= washout {
                let r = n - washout;
                for (j, v) in self.state.iter().enumerate() {
                    values[(r, j)] = *v;
                }
            }
        }
        StateMatrix::new(values, washout)
    }
}

/// Runs a fresh reservoir (`χ(0) = 0`) over `drive`.
pub fn run_tanh_reservoir(cfg: &TanhReservoirConfig, drive: &[f64], washout: usize) -> Result<StateMatrix> {
    TanhReservoir::new(cfg.clone()).run(drive, washout)
}
