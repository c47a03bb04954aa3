//! Train/test orchestration: drive a reservoir, augment with time shifts,
//! select columns, fit the readout and score it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{node_target_correlation, reservoir_entropy_with_stride, CorrelationMode, WindowStride};
use crate::dynamics::{
    integrate_chaotic, make_task_with_lead, ChaoticParams, ChaoticSystem, Series3, TaskDataset, TaskKind,
    DEFAULT_TEST_LEN, DEFAULT_TRAIN_LEN,
};
use crate::error::{Error, Result};
use crate::numerics::{nrmse, predict, ridge_fit, NrmseMode, Readout};
use crate::reservoir::{OeoParams, Reservoir, ReservoirParams, StateMatrix, DEFAULT_WASHOUT};
use crate::seed::{derive_seed, rng_from_seed, Role};
use crate::shift_select::{
    build_shifted_matrix, random_select, reduce, rrqr_select, ColumnId, SelectionResult, ShiftedMatrix,
};

/// How the reservoir enters the test split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateCarry {
    /// Continue from the state left by the training run.
    #[default]
    Continue,
    /// Reset, then wash out on the last `washout` training drive samples.
    Fresh,
}

/// Integrator settings for the chaotic drive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSettings {
    #[serde(default = "DynamicsSettings::default_dt")]
    pub dt_internal: f64,
    #[serde(default = "DynamicsSettings::default_interval")]
    pub sample_interval: f64,
    #[serde(default = "DynamicsSettings::default_transient")]
    pub transient_samples: usize,
    #[serde(default = "DynamicsSettings::default_initial")]
    pub initial_state: [f64; 3],
    /// Half-width of a seeded uniform perturbation added to `initial_state`.
    #[serde(default)]
    pub initial_perturbation: f64,
}

impl DynamicsSettings {
    fn default_dt() -> f64 {
        0.01
    }
    fn default_interval() -> f64 {
        1.0
    }
    fn default_transient() -> usize {
        1000
    }
    fn default_initial() -> [f64; 3] {
        [1.0, 1.0, 1.0]
    }
}

impl Default for DynamicsSettings {
    fn default() -> Self {
        DynamicsSettings {
            dt_internal: Self::default_dt(),
            sample_interval: Self::default_interval(),
            transient_samples: Self::default_transient(),
            initial_state: Self::default_initial(),
            initial_perturbation: 0.0,
        }
    }
}

/// Everything that determines an experiment's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: ChaoticSystem,
    #[serde(default = "ExperimentConfig::default_task")]
    pub task: TaskKind,
    #[serde(default = "ExperimentConfig::default_reservoir")]
    pub reservoir: ReservoirParams,
    #[serde(default = "ExperimentConfig::default_tau_max")]
    pub tau_max: usize,
    #[serde(default)]
    pub m_red_grid: Vec<usize>,
    #[serde(default = "ExperimentConfig::default_lambda")]
    pub lambda: f64,
    #[serde(default = "ExperimentConfig::default_repeats")]
    pub n_masks: usize,
    #[serde(default = "ExperimentConfig::default_repeats")]
    pub n_random_subsets: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub nrmse_mode: NrmseMode,
    #[serde(default = "ExperimentConfig::default_washout")]
    pub washout: usize,
    #[serde(default = "ExperimentConfig::default_train_len")]
    pub train_len: usize,
    #[serde(default = "ExperimentConfig::default_test_len")]
    pub test_len: usize,
    #[serde(default = "ExperimentConfig::default_true")]
    pub standardize: bool,
    #[serde(default)]
    pub state_carry: StateCarry,
    #[serde(default)]
    pub bias: bool,
    #[serde(default)]
    pub dynamics: DynamicsSettings,
    /// Used by the diagnostics grid only.
    #[serde(default)]
    pub analysis: AnalysisSettings,
}

impl ExperimentConfig {
    fn default_task() -> TaskKind {
        TaskKind::OneStepPrediction
    }
    fn default_reservoir() -> ReservoirParams {
        ReservoirParams::Oeo(OeoParams::default())
    }
    fn default_tau_max() -> usize {
        10
    }
    fn default_lambda() -> f64 {
        1e-6
    }
    fn default_repeats() -> usize {
        20
    }
    fn default_washout() -> usize {
        DEFAULT_WASHOUT
    }
    fn default_train_len() -> usize {
        DEFAULT_TRAIN_LEN
    }
    fn default_test_len() -> usize {
        DEFAULT_TEST_LEN
    }
    fn default_true() -> bool {
        true
    }

    /// Defaults for a system: 10-node OEO, one-step prediction, `τ_max = 10`,
    /// grid `10, 20, ..., 110`.
    pub fn new(system: ChaoticSystem) -> Self {
        let mut cfg = ExperimentConfig {
            system,
            task: Self::default_task(),
            reservoir: Self::default_reservoir(),
            tau_max: Self::default_tau_max(),
            m_red_grid: Vec::new(),
            lambda: Self::default_lambda(),
            n_masks: Self::default_repeats(),
            n_random_subsets: Self::default_repeats(),
            master_seed: 0,
            nrmse_mode: NrmseMode::Global,
            washout: Self::default_washout(),
            train_len: Self::default_train_len(),
            test_len: Self::default_test_len(),
            standardize: true,
            state_carry: StateCarry::Continue,
            bias: false,
            dynamics: DynamicsSettings::default(),
            analysis: AnalysisSettings::default(),
        };
        cfg.m_red_grid = cfg.default_grid();
        cfg
    }

    /// `10, 20, ...` up to the column count, plus the column count itself.
    pub fn default_grid(&self) -> Vec<usize> {
        let c = self.total_columns();
        let mut grid: Vec<usize> = (1..=c / 10).map(|k| 10 * k).collect();
        if grid.last() != Some(&c) {
            grid.push(c);
        }
        grid
    }

    /// `M·(τ_max + 1)`.
    pub fn total_columns(&self) -> usize {
        self.reservoir.nodes() * (self.tau_max + 1)
    }

    pub fn chaotic_params(&self) -> ChaoticParams {
        let mut p = ChaoticParams::for_system(self.system);
        p.dt_internal = self.dynamics.dt_internal;
        p.sample_interval = self.dynamics.sample_interval;
        p.transient_samples = self.dynamics.transient_samples;
        p
    }

    pub fn validate(&self) -> Result<()> {
        self.reservoir.validate()?;
        let c = self.total_columns();
        if let Some(bad) = self.m_red_grid.iter().find(|&&m| m == 0 || m > c) {
            return Err(Error::Config(format!("m_red_grid entry {bad} outside 1..={c} (M*(tau_max+1))")));
        }
        if self.n_masks == 0 || self.n_random_subsets == 0 {
            return Err(Error::Config("n_masks and n_random_subsets must be >= 1".into()));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if self.train_len <= self.tau_max || self.test_len <= self.tau_max {
            return Err(Error::Config("train_len and test_len must exceed tau_max".into()));
        }
        if self.state_carry == StateCarry::Fresh && self.washout > self.train_len {
            return Err(Error::Config("fresh test state needs washout <= train_len".into()));
        }
        self.chaotic_params().steps_per_sample().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    fn mask_seed(&self, mask_id: u64) -> u64 {
        derive_seed(self.master_seed, Role::Mask, &[mask_id])
    }

    fn subset_seed(&self, mask_id: u64, subset_id: u64, m_red: usize) -> u64 {
        derive_seed(self.master_seed, Role::Subset, &[mask_id, subset_id, m_red as u64])
    }
}

/// Integrates the configured system long enough for lead-in, both splits and
/// the one-step target.
pub fn generate_series(cfg: &ExperimentConfig) -> Result<Series3> {
    let mut init = cfg.dynamics.initial_state;
    let p = cfg.dynamics.initial_perturbation;
    if p > 0.0 {
        use rand::Rng;
        let mut rng = rng_from_seed(derive_seed(cfg.master_seed, Role::InitialState, &[]));
        for v in &mut init {
            *v += rng.random_range(-p..=p);
        }
    }
    let n = cfg.washout + cfg.train_len + cfg.test_len + 1;
    integrate_chaotic(&cfg.chaotic_params(), init, n)
}

pub fn dataset_from_series(cfg: &ExperimentConfig, series: &Series3, task: TaskKind) -> Result<TaskDataset> {
    make_task_with_lead(series, task, (cfg.train_len, cfg.test_len), cfg.washout, cfg.standardize)
}

pub fn prepare_task(cfg: &ExperimentConfig) -> Result<TaskDataset> {
    dataset_from_series(cfg, &generate_series(cfg)?, cfg.task)
}

/// Drives the reservoir for mask `mask_id` through the training then test
/// drive. Returns `(train, test)` state matrices.
pub fn simulate(cfg: &ExperimentConfig, data: &TaskDataset, mask_id: u64) -> Result<(StateMatrix, StateMatrix)> {
    let mut reservoir = Reservoir::build(&cfg.reservoir, cfg.mask_seed(mask_id))?;
    simulate_with(cfg, data, &mut reservoir)
}

pub fn simulate_with(cfg: &ExperimentConfig, data: &TaskDataset, reservoir: &mut Reservoir) -> Result<(StateMatrix, StateMatrix)> {
    let lead = data.drive_lead.len();
    let train = reservoir.run(&data.train_drive_with_lead(), lead)?;
    let test = match cfg.state_carry {
        StateCarry::Continue => reservoir.run(&data.drive_test, 0)?,
        StateCarry::Fresh => {
            reservoir.reset();
            let w = cfg.washout.min(data.drive_train.len());
            let mut d = data.drive_train[data.drive_train.len() - w..].to_vec();
            d.extend_from_slice(&data.drive_test);
            reservoir.run(&d, w)?
        }
    };
    Ok((train, test))
}

/// Shifted train/test matrices with targets trimmed to the same row window.
#[derive(Debug, Clone)]
pub struct ShiftedTask {
    pub train: ShiftedMatrix,
    pub test: ShiftedMatrix,
    pub target_train: Vec<f64>,
    pub target_test: Vec<f64>,
}

impl ShiftedTask {
    pub fn new(train: &StateMatrix, test: &StateMatrix, data: &TaskDataset, tau_max: usize) -> Result<Self> {
        if train.rows() != data.target_train.len() || test.rows() != data.target_test.len() {
            return Err(Error::Shape(format!(
                "state rows ({}, {}) do not match target lengths ({}, {})",
                train.rows(),
                test.rows(),
                data.target_train.len(),
                data.target_test.len()
            )));
        }
        Ok(ShiftedTask {
            train: build_shifted_matrix(train, tau_max)?,
            test: build_shifted_matrix(test, tau_max)?,
            target_train: data.target_train[tau_max..].to_vec(),
            target_test: data.target_test[tau_max..].to_vec(),
        })
    }

    /// Shift-0 columns of every node: the unshifted reservoir on the same rows.
    pub fn baseline_columns(&self) -> Vec<ColumnId> {
        self.train.columns.iter().copied().filter(|c| c.shift == 0).collect()
    }
}

/// Readout fit on a selection.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub nrmse_train: f64,
    pub nrmse_test: f64,
    pub readout: Readout,
}

pub fn evaluate(task: &ShiftedTask, sel: &SelectionResult, lambda: f64, bias: bool, mode: NrmseMode) -> Result<Evaluation> {
    let train = reduce(&task.train, sel)?;
    let readout = ridge_fit(&train.values, &task.target_train, lambda, bias)?;
    let h_train = predict(&train.values, &readout)?;
    let test = reduce(&task.test, sel)?;
    let h_test = predict(&test.values, &readout)?;
    Ok(Evaluation {
        nrmse_train: nrmse(&task.target_train, &h_train, mode)?,
        nrmse_test: nrmse(&task.target_test, &h_test, mode)?,
        readout,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arm {
    Rrqr,
    Random,
    Baseline,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskResult {
    pub nrmse_train: f64,
    pub nrmse_test: f64,
    pub method: Arm,
    pub m_red: usize,
    pub mask_id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset_id: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelectionSpec {
    Rrqr { m_red: usize },
    Random { m_red: usize, subset_id: u64 },
    Baseline,
    Explicit(Vec<ColumnId>),
}

/// Result of one (mask, selection) cell with the fitted artifacts.
#[derive(Debug, Clone)]
pub struct SingleRun {
    pub result: TaskResult,
    pub selection: SelectionResult,
    pub readout: Readout,
}

pub fn run_single(cfg: &ExperimentConfig, mask_id: u64, spec: &SelectionSpec) -> Result<TaskResult> {
    cfg.validate()?;
    let data = prepare_task(cfg)?;
    Ok(run_single_on(cfg, &data, mask_id, spec)?.result)
}

/// [`run_single`] on an already prepared dataset.
pub fn run_single_on(cfg: &ExperimentConfig, data: &TaskDataset, mask_id: u64, spec: &SelectionSpec) -> Result<SingleRun> {
    let (train, test) = simulate(cfg, data, mask_id)?;
    let task = ShiftedTask::new(&train, &test, data, cfg.tau_max)?;
    run_on_task(cfg, &task, mask_id, spec)
}

pub fn run_on_task(cfg: &ExperimentConfig, task: &ShiftedTask, mask_id: u64, spec: &SelectionSpec) -> Result<SingleRun> {
    let (arm, selection, subset) = match spec {
        SelectionSpec::Rrqr { m_red } => (Arm::Rrqr, rrqr_select(&task.train, *m_red)?, None),
        SelectionSpec::Random { m_red, subset_id } => {
            let seed = cfg.subset_seed(mask_id, *subset_id, *m_red);
            (Arm::Random, random_select(&task.train, *m_red, seed)?, Some((*subset_id, seed)))
        }
        SelectionSpec::Baseline => (Arm::Baseline, SelectionResult::explicit(task.baseline_columns()), None),
        SelectionSpec::Explicit(cols) => (Arm::Explicit, SelectionResult::explicit(cols.clone()), None),
    };
    let ev = evaluate(task, &selection, cfg.lambda, cfg.bias, cfg.nrmse_mode)?;
    Ok(SingleRun {
        result: TaskResult {
            nrmse_train: ev.nrmse_train,
            nrmse_test: ev.nrmse_test,
            method: arm,
            m_red: selection.m_red,
            mask_id,
            subset_id: subset.map(|s| s.0),
            subset_seed: subset.map(|s| s.1),
        },
        selection,
        readout: ev.readout,
    })
}

/// `100·(Δ_rand − Δ_RRQR)/Δ_rand`.
pub fn percent_improvement(delta_rand: f64, delta_rrqr: f64) -> Result<f64> {
    if !(delta_rand > 0.0) {
        return Err(Error::Domain(format!("random-selection error must be positive, got {delta_rand}")));
    }
    Ok(100.0 * (delta_rand - delta_rrqr) / delta_rand)
}

/// Which selection arms a sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arms {
    Rrqr,
    Random,
    #[default]
    Both,
}

impl Arms {
    fn rrqr(self) -> bool {
        matches!(self, Arms::Rrqr | Arms::Both)
    }
    fn random(self) -> bool {
        matches!(self, Arms::Random | Arms::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m_red: usize,
    pub nrmse_rrqr_mean: Option<f64>,
    pub nrmse_rrqr_std: Option<f64>,
    pub nrmse_rand_mean: Option<f64>,
    pub nrmse_rand_std: Option<f64>,
    pub nrmse_baseline_mean: f64,
    pub percent_improvement: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    /// Every evaluated cell, ordered by mask, then baseline / RRQR / random.
    pub cells: Vec<TaskResult>,
    /// Full RRQR ranking per mask (empty when RRQR is not evaluated).
    pub rankings: Vec<SelectionResult>,
}

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

struct MaskCells {
    cells: Vec<TaskResult>,
    ranking: Option<SelectionResult>,
}

fn sweep_mask(cfg: &ExperimentConfig, data: &TaskDataset, mask_id: u64, arms: Arms) -> Result<MaskCells> {
    let (train, test) = simulate(cfg, data, mask_id)?;
    let task = ShiftedTask::new(&train, &test, data, cfg.tau_max)?;
    let mut cells = vec![run_on_task(cfg, &task, mask_id, &SelectionSpec::Baseline)?.result];

    let ranking = if arms.rrqr() {
        let full = rrqr_select(&task.train, task.train.ncols())?;
        for &m_red in &cfg.m_red_grid {
            let sel = full.truncate(m_red)?;
            let ev = evaluate(&task, &sel, cfg.lambda, cfg.bias, cfg.nrmse_mode)?;
            cells.push(TaskResult {
                nrmse_train: ev.nrmse_train,
                nrmse_test: ev.nrmse_test,
                method: Arm::Rrqr,
                m_red,
                mask_id,
                subset_id: None,
                subset_seed: None,
            });
        }
        Some(full)
    } else {
        None
    };
    if arms.random() {
        for &m_red in &cfg.m_red_grid {
            for subset_id in 0..cfg.n_random_subsets as u64 {
                let spec = SelectionSpec::Random { m_red, subset_id };
                cells.push(run_on_task(cfg, &task, mask_id, &spec)?.result);
            }
        }
    }
    Ok(MaskCells { cells, ranking })
}

/// RRQR vs random selection over the configured `M_red` grid, averaged over
/// masks (and random subsets).
pub fn sweep(cfg: &ExperimentConfig, arms: Arms) -> Result<SweepOutput> {
    cfg.validate()?;
    let data = prepare_task(cfg)?;
    let per_mask: Vec<MaskCells> = (0..cfg.n_masks as u64)
        .into_par_iter()
        .map(|mask_id| sweep_mask(cfg, &data, mask_id, arms))
        .collect::<Result<_>>()?;

    let cells: Vec<TaskResult> = per_mask.iter().flat_map(|m| m.cells.iter().cloned()).collect();
    let rankings = per_mask.into_iter().filter_map(|m| m.ranking).collect();

    let baseline: Vec<f64> = cells.iter().filter(|c| c.method == Arm::Baseline).map(|c| c.nrmse_test).collect();
    let (baseline_mean, _) = mean_std(&baseline);
    let collect = |arm: Arm, m_red: usize| -> Vec<f64> {
        cells
            .iter()
            .filter(|c| c.method == arm && c.m_red == m_red)
            .map(|c| c.nrmse_test)
            .collect()
    };
    let mut rows = Vec::with_capacity(cfg.m_red_grid.len());
    for &m_red in &cfg.m_red_grid {
        let rrqr = arms.rrqr().then(|| mean_std(&collect(Arm::Rrqr, m_red)));
        let rand = arms.random().then(|| mean_std(&collect(Arm::Random, m_red)));
        let improvement = match (rrqr, rand) {
            (Some((q, _)), Some((r, _))) => Some(percent_improvement(r, q)?),
            _ => None,
        };
        rows.push(SweepRow {
            m_red,
            nrmse_rrqr_mean: rrqr.map(|v| v.0),
            nrmse_rrqr_std: rrqr.map(|v| v.1),
            nrmse_rand_mean: rand.map(|v| v.0),
            nrmse_rand_std: rand.map(|v| v.1),
            nrmse_baseline_mean: baseline_mean,
            percent_improvement: improvement,
        });
    }
    Ok(SweepOutput { rows, cells, rankings })
}

/// Grid of input / adjacency sparsities for the reservoir diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSettings {
    #[serde(default = "AnalysisSettings::default_f_w")]
    pub f_w_grid: Vec<f64>,
    #[serde(default = "AnalysisSettings::default_f_a")]
    pub f_a_grid: Vec<f64>,
    #[serde(default = "AnalysisSettings::default_trials")]
    pub trials: usize,
    #[serde(default = "AnalysisSettings::default_window")]
    pub window: usize,
    #[serde(default)]
    pub stride: WindowStride,
    #[serde(default)]
    pub correlation: CorrelationMode,
}

impl AnalysisSettings {
    fn default_f_w() -> Vec<f64> {
        (1..=10).map(|k| k as f64 / 10.0).collect()
    }
    fn default_f_a() -> Vec<f64> {
        (1..=9).map(|k| k as f64 / 10.0).collect()
    }
    fn default_trials() -> usize {
        20
    }
    fn default_window() -> usize {
        4
    }

    pub fn validate(&self) -> Result<()> {
        if self.f_w_grid.is_empty() || self.f_a_grid.is_empty() || self.trials == 0 {
            return Err(Error::Config("analysis grids and trials must be non-empty".into()));
        }
        if self.window < 2 || self.window > 12 {
            return Err(Error::Config(format!("window must lie in 2..=12, got {}", self.window)));
        }
        Ok(())
    }
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        AnalysisSettings {
            f_w_grid: Self::default_f_w(),
            f_a_grid: Self::default_f_a(),
            trials: Self::default_trials(),
            window: Self::default_window(),
            stride: WindowStride::Sliding,
            correlation: CorrelationMode::Pearson,
        }
    }
}

/// One trial of the diagnostics grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisTrial {
    pub f_w: f64,
    pub f_a: Option<f64>,
    pub trial: u64,
    pub entropy_bits: f64,
    pub mean_correlation: f64,
    pub nrmse_observer: f64,
    pub nrmse_prediction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRow {
    pub f_w: f64,
    pub f_a: Option<f64>,
    pub entropy_bits: f64,
    pub mean_correlation: f64,
    pub nrmse_observer: f64,
    pub nrmse_prediction: f64,
}

#[derive(Debug, Clone)]
pub struct AnalysisOutput {
    pub rows: Vec<AnalysisRow>,
    pub trials: Vec<AnalysisTrial>,
}

fn with_sparsity(params: &ReservoirParams, f_w: f64, f_a: Option<f64>) -> ReservoirParams {
    match params {
        ReservoirParams::Oeo(p) => ReservoirParams::Oeo(OeoParams { f_w, ..p.clone() }),
        ReservoirParams::Tanh(p) => {
            let mut q = p.clone();
            q.f_w = f_w;
            if let Some(f_a) = f_a {
                q.f_a = f_a;
            }
            ReservoirParams::Tanh(q)
        }
    }
}

fn analysis_trial(
    cfg: &ExperimentConfig,
    settings: &AnalysisSettings,
    observer: &TaskDataset,
    prediction: &TaskDataset,
    (f_w, f_a): (f64, Option<f64>),
    trial: u64,
) -> Result<AnalysisTrial> {
    let params = with_sparsity(&cfg.reservoir, f_w, f_a);
    // Trials share seeds across grid cells so cells differ only in sparsity.
    let mut reservoir = Reservoir::build(&params, cfg.mask_seed(trial))?;
    let (train, test) = simulate_with(cfg, observer, &mut reservoir)?;
    let entropy_bits = reservoir_entropy_with_stride(&train, settings.window, settings.stride)?;
    let mean_correlation = node_target_correlation(&train, &observer.target_train, settings.correlation)?;
    let score = |data: &TaskDataset| -> Result<f64> {
        let readout = ridge_fit(&train.values, &data.target_train, cfg.lambda, cfg.bias)?;
        let h = predict(&test.values, &readout)?;
        nrmse(&data.target_test, &h, cfg.nrmse_mode)
    };
    Ok(AnalysisTrial {
        f_w,
        f_a,
        trial,
        entropy_bits,
        mean_correlation,
        nrmse_observer: score(observer)?,
        nrmse_prediction: score(prediction)?,
    })
}

/// Entropy, node–target correlation and unshifted-reservoir errors over the
/// `f_w × f_a` grid (`f_a` is ignored for the OEO back end).
pub fn analyze_grid(cfg: &ExperimentConfig, settings: &AnalysisSettings) -> Result<AnalysisOutput> {
    cfg.reservoir.validate()?;
    settings.validate()?;
    let series = generate_series(cfg)?;
    let observer = dataset_from_series(cfg, &series, TaskKind::Observer)?;
    let prediction = dataset_from_series(cfg, &series, TaskKind::OneStepPrediction)?;

    let f_a_values: Vec<Option<f64>> = match cfg.reservoir {
        ReservoirParams::Tanh(_) => settings.f_a_grid.iter().copied().map(Some).collect(),
        ReservoirParams::Oeo(_) => vec![None],
    };
    let cells: Vec<(f64, Option<f64>)> = settings
        .f_w_grid
        .iter()
        .flat_map(|&f_w| f_a_values.iter().map(move |&f_a| (f_w, f_a)))
        .collect();
    let jobs: Vec<((f64, Option<f64>), u64)> = cells
        .iter()
        .flat_map(|&cell| (0..settings.trials as u64).map(move |t| (cell, t)))
        .collect();
    let trials: Vec<AnalysisTrial> = jobs
        .par_iter()
        .map(|&(cell, t)| analysis_trial(cfg, settings, &observer, &prediction, cell, t))
        .collect::<Result<_>>()?;

    let rows = trials
        .chunks(settings.trials)
        .map(|chunk| {
            let avg = |f: fn(&AnalysisTrial) -> f64| chunk.iter().map(f).sum::<f64>() / chunk.len() as f64;
            AnalysisRow {
                f_w: chunk[0].f_w,
                f_a: chunk[0].f_a,
                entropy_bits: avg(|t| t.entropy_bits),
                mean_correlation: avg(|t| t.mean_correlation),
                nrmse_observer: avg(|t| t.nrmse_observer),
                nrmse_prediction: avg(|t| t.nrmse_prediction),
            }
        })
        .collect();
    Ok(AnalysisOutput { rows, trials })
}
