//! Chaotic drive signals (Lorenz, Rössler) and the prediction / observer
//! task datasets built from them.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::output::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChaoticSystem {
    Lorenz,
    Rossler,
}

/// Parameters of a time-scaled chaotic flow.
///
/// The right-hand side of the flow is multiplied by `1 / time_scale`, and the
/// trajectory is sampled every `sample_interval` time units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaoticParams {
    pub system: ChaoticSystem,
    pub p: [f64; 3],
    pub time_scale: f64,
    pub dt_internal: f64,
    pub sample_interval: f64,
    pub transient_samples: usize,
}

impl ChaoticParams {
    /// Lorenz with p = (10, 28, 8/3) and time scale 10.
    pub fn lorenz() -> Self {
        ChaoticParams {
            system: ChaoticSystem::Lorenz,
            p: [10.0, 28.0, 8.0 / 3.0],
            time_scale: 10.0,
            dt_internal: 0.01,
            sample_interval: 1.0,
            transient_samples: 1000,
        }
    }

    /// Rössler with q = (0.2, 0.2, 5.7) and time scale 0.65.
    pub fn rossler() -> Self {
        ChaoticParams {
            system: ChaoticSystem::Rossler,
            p: [0.2, 0.2, 5.7],
            time_scale: 0.65,
            dt_internal: 0.01,
            sample_interval: 1.0,
            transient_samples: 1000,
        }
    }

    pub fn for_system(system: ChaoticSystem) -> Self {
        match system {
            ChaoticSystem::Lorenz => Self::lorenz(),
            ChaoticSystem::Rossler => Self::rossler(),
        }
    }

    /// Number of integrator steps per output sample.
    pub fn steps_per_sample(&self) -> Result<usize> {
        if !(self.time_scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time_scale must be positive, got {}",
                self.time_scale
            )));
        }
        if !(self.dt_internal > 0.0) || !(self.sample_interval > 0.0) {
            return Err(Error::InvalidParameter(
                "dt_internal and sample_interval must be positive".into(),
            ));
        }
        let ratio = self.sample_interval / self.dt_internal;
        let steps = ratio.round();
        if steps < 1.0 || (ratio - steps).abs() > 1e-9 * ratio {
            return Err(Error::InvalidParameter(format!(
                "sample_interval {} is not an integer multiple of dt_internal {}",
                self.sample_interval, self.dt_internal
            )));
        }
        Ok(steps as usize)
    }

    fn rhs(&self, s: [f64; 3]) -> [f64; 3] {
        let [x, y, z] = s;
        let [a, b, c] = self.p;
        let k = 1.0 / self.time_scale;
        match self.system {
            ChaoticSystem::Lorenz => [k * (a * (y - x)), k * (x * (b - z) - y), k * (x * y - c * z)],
            ChaoticSystem::Rossler => [k * (-y - z), k * (x + a * y), k * (b + z * (x - c))],
        }
    }

    fn rk4_step(&self, s: [f64; 3], h: f64) -> [f64; 3] {
        let add = |u: [f64; 3], v: [f64; 3], w: f64| [u[0] + w * v[0], u[1] + w * v[1], u[2] + w * v[2]];
        let k1 = self.rhs(s);
        let k2 = self.rhs(add(s, k1, 0.5 * h));
        let k3 = self.rhs(add(s, k2, 0.5 * h));
        let k4 = self.rhs(add(s, k3, h));
        [
            s[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            s[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            s[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        ]
    }
}

/// Sampled trajectory of a three-dimensional flow.
#[derive(Debug, Clone, PartialEq)]
pub struct Series3 {
    pub sample_interval: f64,
    pub rows: Vec<[f64; 3]>,
}

impl Series3 {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, axis: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[axis]).collect()
    }

    /// Writes `t,x,y,z` rows at 17 significant digits.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(self.rows.len() * 80);
        out.push_str("t,x,y,z\n");
        for (n, r) in self.rows.iter().enumerate() {
            let t = n as f64 * self.sample_interval;
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f64(t),
                fmt_f64(r[0]),
                fmt_f64(r[1]),
                fmt_f64(r[2])
            ));
        }
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
    }
}

/// Integrates the flow with classical RK4 at `dt_internal`, discards
/// `transient_samples` samples and returns the next `n_samples`.
pub fn integrate_chaotic(params: &ChaoticParams, initial_state: [f64; 3], n_samples: usize) -> Result<Series3> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    let steps = params.steps_per_sample()?;
    let h = params.dt_internal;
    let mut state = initial_state;
    let mut rows = Vec::with_capacity(n_samples);
    let total = params.transient_samples + n_samples;
    let mut step = 0usize;
    for sample in 0..total {
        if sample > 0 {
            for _ in 0..steps {
                state = params.rk4_step(state, h);
                step += 1;
                if !state.iter().all(|v| v.is_finite()) {
                    return Err(Error::Divergence { step });
                }
            }
        }
        if sample >= params.transient_samples {
            rows.push(state);
        }
    }
    Ok(Series3 {
        sample_interval: params.sample_interval,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    /// drive x[n], target x[n+1]
    #[serde(alias = "prediction")]
    OneStepPrediction,
    /// drive x[n], target z[n]
    Observer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: f64,
    pub std: f64,
}

/// Drive/target pairs for training and testing.
///
/// `drive_lead` holds samples immediately preceding the training split; they
/// are fed to a reservoir as washout and have no targets.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskDataset {
    pub drive_lead: Vec<f64>,
    pub drive_train: Vec<f64>,
    pub target_train: Vec<f64>,
    pub drive_test: Vec<f64>,
    pub target_test: Vec<f64>,
    pub task_kind: TaskKind,
    pub standardization: Option<Standardization>,
}

impl TaskDataset {
    /// Lead-in followed by the training drive.
    pub fn train_drive_with_lead(&self) -> Vec<f64> {
        let mut d = Vec::with_capacity(self.drive_lead.len() + self.drive_train.len());
        d.extend_from_slice(&self.drive_lead);
        d.extend_from_slice(&self.drive_train);
        d
    }
}

/// Default split lengths.
pub const DEFAULT_TRAIN_LEN: usize = 8000;
pub const DEFAULT_TEST_LEN: usize = 7500;

pub fn make_task(series: &Series3, task_kind: TaskKind, split: (usize, usize), standardize_drive: bool) -> Result<TaskDataset> {
    make_task_with_lead(series, task_kind, split, 0, standardize_drive)
}

/// Splits a trajectory into `lead` lead-in samples, `split.0` training samples
/// and `split.1` test samples, contiguously. Standardization statistics come
/// from the training drive only.
pub fn make_task_with_lead(
    series: &Series3,
    task_kind: TaskKind,
    split: (usize, usize),
    lead: usize,
    standardize_drive: bool,
) -> Result<TaskDataset> {
    let (t_train, t_test) = split;
    let required = lead + t_train + t_test + 1;
    if series.len() < required {
        return Err(Error::Length {
            required,
            available: series.len(),
        });
    }
    let x = series.column(0);
    let target_at = |n: usize| match task_kind {
        TaskKind::OneStepPrediction => series.rows[n + 1][0],
        TaskKind::Observer => series.rows[n][2],
    };
    let train = lead..lead + t_train;
    let test = lead + t_train..lead + t_train + t_test;

    let mut drive_lead = x[..lead].to_vec();
    let mut drive_train = x[train.clone()].to_vec();
    let mut drive_test = x[test.clone()].to_vec();
    let target_train = train.map(target_at).collect();
    let target_test = test.map(target_at).collect();

    let standardization = if standardize_drive {
        let (s, stats) = standardize(&drive_train, None)?;
        drive_train = s;
        drive_lead = standardize(&drive_lead, Some(stats))?.0;
        drive_test = standardize(&drive_test, Some(stats))?.0;
        Some(stats)
    } else {
        None
    };

    Ok(TaskDataset {
        drive_lead,
        drive_train,
        target_train,
        drive_test,
        target_test,
        task_kind,
        standardization,
    })
}

/// Returns `(sequence - mean) / std` with population std. When `stats` is
/// `None` they are computed from `sequence`.
pub fn standardize(sequence: &[f64], stats: Option<Standardization>) -> Result<(Vec<f64>, Standardization)> {
    let stats = match stats {
        Some(s) => s,
        None => {
            if sequence.len() < 2 {
                return Err(Error::Length {
                    required: 2,
                    available: sequence.len(),
                });
            }
            let n = sequence.len() as f64;
            let mean = sequence.iter().sum::<f64>() / n;
            let var = sequence.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            Standardization { mean, std: var.sqrt() }
        }
    };
    if !(stats.std >= 1e-12) {
        return Err(Error::DegenerateSignal { std: stats.std });
    }
    let out = sequence.iter().map(|v| (v - stats.mean) / stats.std).collect();
    Ok((out, stats))
}
