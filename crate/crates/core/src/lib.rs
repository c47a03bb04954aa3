//! Reservoir computing with time-shifted node signals.
//!
//! A reservoir (leaky-tanh network or time-multiplexed opto-electronic delay
//! oscillator) is driven by a chaotic signal. Its node time series are
//! augmented with lagged copies, the most linearly independent
//! `(node, shift)` columns are ranked by column-pivoted QR, and a ridge
//! readout on the retained columns is compared against randomly selected
//! columns of the same size.

// Parameter checks use `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod numerics;
pub mod output;
pub mod pipeline;
pub mod reservoir;
pub mod seed;
pub mod shift_select;

pub use error::{Error, Result};
