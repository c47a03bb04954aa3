//! Reservoir simulators. Both back ends turn a drive sequence into a
//! [`StateMatrix`] whose row `n` is the reservoir's response after absorbing
//! drive sample `washout + n`.

mod oeo;
mod tanh;
mod weights;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use oeo::{run_oeo_reservoir, OeoConfig, OeoParams, OeoReservoir};
pub use tanh::{run_tanh_reservoir, TanhParams, TanhReservoir, TanhReservoirConfig};
pub use weights::{generate_adjacency, generate_mask, spectral_radius};

/// Default number of initial drive samples discarded.
pub const DEFAULT_WASHOUT: usize = 100;

/// `T×M` node time series.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix {
    pub values: DMatrix<f64>,
    pub node_ids: Vec<usize>,
    pub washout: usize,
}

impl StateMatrix {
    pub fn new(values: DMatrix<f64>, washout: usize) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Divergence { step: pos % values.nrows().max(1) });
        }
        let node_ids = (0..values.ncols()).collect();
        Ok(StateMatrix {
            values,
            node_ids,
            washout,
        })
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn nodes(&self) -> usize {
        self.values.ncols()
    }

    /// Rows `start..` as a new state matrix.
    pub fn tail_rows(&self, start: usize) -> StateMatrix {
        let n = self.rows().saturating_sub(start);
        StateMatrix {
            values: self.values.rows(start.min(self.rows()), n).clone_owned(),
            node_ids: self.node_ids.clone(),
            washout: self.washout + start,
        }
    }

    /// Writes `n,node_0,...,node_{M-1}` at 17 significant digits.
    pub fn to_csv(&self) -> String {
        crate::output::matrix_csv(&self.values, "node_")
    }
}

/// Either reservoir back end, with its parameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ReservoirParams {
    Oeo(OeoParams),
    Tanh(TanhParams),
}

impl ReservoirParams {
    pub fn nodes(&self) -> usize {
        match self {
            ReservoirParams::Oeo(p) => p.nodes,
            ReservoirParams::Tanh(p) => p.nodes,
        }
    }

    pub fn f_w(&self) -> f64 {
        match self {
            ReservoirParams::Oeo(p) => p.f_w,
            ReservoirParams::Tanh(p) => p.f_w,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ReservoirParams::Oeo(p) => p.validate(),
            ReservoirParams::Tanh(p) => p.validate(),
        }
    }
}

/// A built reservoir that keeps its internal state between runs.
#[derive(Debug, Clone)]
pub enum Reservoir {
    Oeo(OeoReservoir),
    Tanh(TanhReservoir),
}

impl Reservoir {
    /// Builds a reservoir from parameters; `seed` determines the mask (OEO)
    /// or the adjacency and input weights (leaky tanh).
    pub fn build(params: &ReservoirParams, seed: u64) -> Result<Self> {
        use crate::seed::{derive_seed, Role};
        Ok(match params {
            ReservoirParams::Oeo(p) => {
                Reservoir::Oeo(OeoReservoir::new(OeoConfig::generate(p, derive_seed(seed, Role::Mask, &[]))?))
            }
            ReservoirParams::Tanh(p) => Reservoir::Tanh(TanhReservoir::new(TanhReservoirConfig::generate(
                p,
                derive_seed(seed, Role::Adjacency, &[]),
                derive_seed(seed, Role::InputWeights, &[]),
            )?)),
        })
    }

    /// Feeds `drive`, dropping the first `washout` responses.
    pub fn run(&mut self, drive: &[f64], washout: usize) -> Result<StateMatrix> {
        match self {
            Reservoir::Oeo(r) => r.run(drive, washout),
            Reservoir::Tanh(r) => r.run(drive, washout),
        }
    }

    /// Restores the initial state.
    pub fn reset(&mut self) {
        match self {
            Reservoir::Oeo(r) => r.reset(),
            Reservoir::Tanh(r) => r.reset(),
        }
    }

    /// JSON echo of the configuration actually simulated.
    pub fn config_json(&self) -> serde_json::Value {
        match self {
            Reservoir::Oeo(r) => serde_json::to_value(r.config()).unwrap_or_default(),
            Reservoir::Tanh(r) => serde_json::to_value(r.config()).unwrap_or_default(),
        }
    }
}

fn check_drive(len: usize, washout: usize) -> Result<()> {
    if len <= washout {
        return Err(Error::Length {
            required: washout + 1,
            available: len,
        });
    }
    Ok(())
}
