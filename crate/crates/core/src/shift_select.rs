//! Time-shift augmentation of a state matrix and column subset selection.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::qr_column_pivot;
use crate::reservoir::StateMatrix;
use crate::seed::rng_from_seed;

/// A `(node, shift)` column label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct ColumnId {
    pub node: usize,
    pub shift: usize,
}

impl From<[usize; 2]> for ColumnId {
    fn from([node, shift]: [usize; 2]) -> Self {
        ColumnId { node, shift }
    }
}

impl From<ColumnId> for [usize; 2] {
    fn from(c: ColumnId) -> Self {
        [c.node, c.shift]
    }
}

/// Node signals with every lag `0..=tau_max`, in shift-major column order.
///
/// Column `(m, τ)` at row `t` is source entry `(t + tau_max − τ, m)`; the first
/// `tau_max` source rows only appear as lagged values.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedMatrix {
    pub values: DMatrix<f64>,
    pub columns: Vec<ColumnId>,
    pub tau_max: usize,
}

impl ShiftedMatrix {
    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    fn index(&self) -> HashMap<ColumnId, usize> {
        self.columns.iter().enumerate().map(|(i, c)| (*c, i)).collect()
    }
}

pub fn build_shifted_matrix(s: &StateMatrix, tau_max: usize) -> Result<ShiftedMatrix> {
    let (t, m) = s.values.shape();
    if tau_max >= t {
        return Err(Error::Length {
            required: tau_max + 1,
            available: t,
        });
    }
    let rows = t - tau_max;
    let cols = m * (tau_max + 1);
    let mut values = DMatrix::zeros(rows, cols);
    let mut columns = Vec::with_capacity(cols);
    for shift in 0..=tau_max {
        for node in 0..m {
            let k = shift * m + node;
            let start = tau_max - shift;
            values
                .column_mut(k)
                .copy_from(&s.values.view((start, node), (rows, 1)));
            columns.push(ColumnId {
                node: s.node_ids[node],
                shift,
            });
        }
    }
    Ok(ShiftedMatrix {
        values,
        columns,
        tau_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMethod {
    Rrqr,
    Random,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub method: SelectionMethod,
    pub m_red: usize,
    pub retained: Vec<ColumnId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot_order: Option<Vec<ColumnId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_diag: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SelectionResult {
    /// The first `m_red` entries of a full RRQR ranking.
    pub fn truncate(&self, m_red: usize) -> Result<SelectionResult> {
        let order = self
            .pivot_order
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("only RRQR rankings can be truncated".into()))?;
        check_m_red(m_red, order.len())?;
        Ok(SelectionResult {
            method: SelectionMethod::Rrqr,
            m_red,
            retained: order[..m_red].to_vec(),
            pivot_order: self.pivot_order.clone(),
            r_diag: self.r_diag.clone(),
            seed: None,
        })
    }

    pub fn explicit(columns: Vec<ColumnId>) -> SelectionResult {
        SelectionResult {
            method: SelectionMethod::Explicit,
            m_red: columns.len(),
            retained: columns,
            pivot_order: None,
            r_diag: None,
            seed: None,
        }
    }
}

fn check_m_red(m_red: usize, c: usize) -> Result<()> {
    if m_red == 0 || m_red > c {
        return Err(Error::InvalidParameter(format!("M_red = {m_red} outside 1..={c}")));
    }
    Ok(())
}

/// Ranks all columns by pivoted QR and keeps the first `m_red`.
pub fn rrqr_select(o2: &ShiftedMatrix, m_red: usize) -> Result<SelectionResult> {
    check_m_red(m_red, o2.ncols())?;
    let qr = qr_column_pivot(&o2.values)?;
    let order: Vec<ColumnId> = qr.perm.iter().map(|&k| o2.columns[k]).collect();
    Ok(SelectionResult {
        method: SelectionMethod::Rrqr,
        m_red,
        retained: order[..m_red].to_vec(),
        pivot_order: Some(order),
        r_diag: Some(qr.r_diag),
        seed: None,
    })
}

/// `m_red` distinct columns drawn uniformly without replacement.
pub fn random_select(o2: &ShiftedMatrix, m_red: usize, seed: u64) -> Result<SelectionResult> {
    check_m_red(m_red, o2.ncols())?;
    let mut rng = rng_from_seed(seed);
    let retained = sample(&mut rng, o2.ncols(), m_red)
        .into_iter()
        .map(|k| o2.columns[k])
        .collect();
    Ok(SelectionResult {
        method: SelectionMethod::Random,
        m_red,
        retained,
        pivot_order: None,
        r_diag: None,
        seed: Some(seed),
    })
}

/// Retained columns, in retained order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedMatrix {
    pub values: DMatrix<f64>,
    pub columns: Vec<ColumnId>,
}

pub fn reduce(o2: &ShiftedMatrix, sel: &SelectionResult) -> Result<ReducedMatrix> {
    let index = o2.index();
    let idx = sel
        .retained
        .iter()
        .map(|c| {
            index.get(c).copied().ok_or(Error::UnknownColumn {
                node: c.node,
                shift: c.shift,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let values = o2.values.select_columns(idx.iter());
    Ok(ReducedMatrix {
        values,
        columns: sel.retained.clone(),
    })
}
