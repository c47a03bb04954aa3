//! Time-multiplexed opto-electronic delay oscillator.
//!
//! `τ_L·v̇(t) = −v(t) + β·sin²(v(t−τ_d) + φ + ρ·M(t)·s(t))`
//!
//! integrated with Heun's method at unit step. One drive sample is held for
//! one mask period `τ_in = M·θ`; within it the mask value for node `j` is held
//! for `θ` steps. The input term is taken as constant over each unit step, so
//! predictor and corrector see the same `M(t)·s(t)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::weights::generate_mask;
use super::{check_drive, StateMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OeoParams {
    #[serde(default = "OeoParams::default_nodes")]
    pub nodes: usize,
    /// Integration steps per virtual node.
    #[serde(default = "OeoParams::default_theta")]
    pub theta: usize,
    #[serde(default = "OeoParams::default_beta")]
    pub beta: f64,
    #[serde(default = "OeoParams::default_phi")]
    pub phi: f64,
    #[serde(default = "OeoParams::default_rho")]
    pub rho: f64,
    #[serde(default = "OeoParams::default_f_w")]
    pub f_w: f64,
    /// Steps before the end of a node interval at which the node is sampled.
    #[serde(default)]
    pub sample_offset: usize,
    #[serde(default)]
    pub initial_v: f64,
}

impl OeoParams {
    fn default_nodes() -> usize {
        10
    }
    fn default_theta() -> usize {
        40
    }
    fn default_beta() -> f64 {
        0.8
    }
    fn default_phi() -> f64 {
        0.2
    }
    fn default_rho() -> f64 {
        0.4
    }
    fn default_f_w() -> f64 {
        0.4
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes == 0 || self.theta == 0 {
            return Err(Error::InvalidParameter("OEO needs nodes >= 1 and theta >= 1".into()));
        }
        if self.sample_offset >= self.theta {
            return Err(Error::InvalidParameter(format!(
                "sample_offset {} must be < theta {}",
                self.sample_offset, self.theta
            )));
        }
        if !(self.f_w > 0.0 && self.f_w <= 1.0) {
            return Err(Error::InvalidParameter(format!("f_w must lie in (0, 1], got {}", self.f_w)));
        }
        if ![self.beta, self.phi, self.rho, self.initial_v].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite OEO parameter".into()));
        }
        Ok(())
    }
}

impl Default for OeoParams {
    fn default() -> Self {
        OeoParams {
            nodes: Self::default_nodes(),
            theta: Self::default_theta(),
            beta: Self::default_beta(),
            phi: Self::default_phi(),
            rho: Self::default_rho(),
            f_w: Self::default_f_w(),
            sample_offset: 0,
            initial_v: 0.0,
        }
    }
}

/// A concrete oscillator with its input mask.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OeoConfig {
    pub m: usize,
    pub theta: usize,
    pub beta: f64,
    pub phi: f64,
    pub rho: f64,
    pub tau_l: f64,
    pub tau_d: usize,
    pub mask: Vec<f64>,
    pub f_w: f64,
    pub sample_offset: usize,
    pub initial_v: f64,
}

impl OeoConfig {
    pub fn generate(p: &OeoParams, mask_seed: u64) -> Result<Self> {
        p.validate()?;
        let mask = generate_mask(p.nodes, p.f_w, mask_seed)?;
        Ok(Self::with_mask(p, mask))
    }

    /// Uses an explicit mask; `f_w` is recorded as the mask's nonzero fraction.
    pub fn with_mask(p: &OeoParams, mask: Vec<f64>) -> Self {
        let m = mask.len();
        let f_w = mask.iter().filter(|v| **v != 0.0).count() as f64 / m.max(1) as f64;
        OeoConfig {
            m,
            theta: p.theta,
            beta: p.beta,
            phi: p.phi,
            rho: p.rho,
            tau_l: 4.0 * p.theta as f64,
            tau_d: m * p.theta,
            mask,
            f_w,
            sample_offset: p.sample_offset,
            initial_v: p.initial_v,
        }
    }

    /// Integration steps per drive sample.
    pub fn tau_in(&self) -> usize {
        self.m * self.theta
    }
}

/// Stateful integrator; successive [`run`](Self::run) calls continue in time.
#[derive(Debug, Clone)]
pub struct OeoReservoir {
    cfg: OeoConfig,
    /// `history[t mod τ_d]` holds `v(t − τ_d)` before step `t`.
    history: Vec<f64>,
    v: f64,
    t: u64,
}

impl OeoReservoir {
    pub fn new(cfg: OeoConfig) -> Self {
        let tau_d = cfg.tau_d.max(1);
        let v = cfg.initial_v;
        OeoReservoir {
            cfg,
            history: vec![0.0; tau_d],
            v,
            t: 0,
        }
    }

    pub fn config(&self) -> &OeoConfig {
        &self.cfg
    }

    pub fn reset(&mut self) {
        self.history.fill(0.0);
        self.v = self.cfg.initial_v;
        self.t = 0;
    }

    /// Current `v(t)`.
    pub fn voltage(&self) -> f64 {
        self.v
    }

    pub fn run(&mut self, drive: &[f64], washout: usize) -> Result<StateMatrix> {
        check_drive(drive.len(), washout)?;
        let cfg = &self.cfg;
        let (m, theta) = (cfg.m, cfg.theta);
        let tau_d = self.history.len();
        let inv_tau_l = 1.0 / cfg.tau_l;
        let (beta, phi, rho) = (cfg.beta, cfg.phi, cfg.rho);
        let sample_shift = cfg.sample_offset + 1;

        let rows = drive.len() - washout;
        let mut values = DMatrix::zeros(rows, m);
        let mut v = self.v;
        let mut t = self.t;

        for (n, &s) in drive.iter().enumerate() {
            for (node, &mask) in cfg.mask.iter().enumerate() {
                let u = phi + rho * mask * s;
                for step in 0..theta {
                    let slot = (t % tau_d as u64) as usize;
                    let delayed_now = self.history[slot];
                    let delayed_next = if tau_d == 1 { v } else { self.history[(slot + 1) % tau_d] };

                    let f0 = (-v + beta * (delayed_now + u).sin().powi(2)) * inv_tau_l;
                    let pred = v + f0;
                    let f1 = (-pred + beta * (delayed_next + u).sin().powi(2)) * inv_tau_l;
                    let next = v + 0.5 * (f0 + f1);

                    self.history[slot] = v;
                    v = next;
                    t += 1;
                    if !v.is_finite() {
                        return Err(Error::Divergence { step: t as usize });
                    }
                    if n >= washout && step + sample_shift == theta {
                        values[(n - washout, node)] = v;
                    }
                }
            }
        }
        self.v = v;
        self.t = t;
        StateMatrix::new(values, washout)
    }
}

/// Runs a fresh oscillator (zero delay history) over `drive`.
pub fn run_oeo_reservoir(cfg: &OeoConfig, drive: &[f64], washout: usize) -> Result<StateMatrix> {
    OeoReservoir::new(cfg.clone()).run(drive, washout)
}
