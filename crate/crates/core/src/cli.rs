//! Command-line front end: `generate`, `sweep`, `analyze`, `replay`.
//!
//! Every command writes its outputs plus one `manifest.json` into the output
//! directory. The manifest echoes the fully resolved configuration, so
//! `replay` reproduces every CSV byte for byte.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::NrmseMode;
use crate::output::{content_hash, fmt_f64, fmt_opt, r_diag_csv, sequence_csv, write_json, write_text};
use crate::pipeline::{
    analyze_grid, dataset_from_series, generate_series, simulate, sweep, AnalysisOutput, Arms, ExperimentConfig,
    SweepOutput,
};
use crate::reservoir::Reservoir;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(name = "shiftrc", version, about = "Time-shift selection for reservoir computers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write drive/target series for the configured task.
    Generate {
        #[command(flatten)]
        common: CommonArgs,
        /// Also export the mask-0 reservoir state matrices.
        #[arg(long)]
        export_states: bool,
    },
    /// RRQR vs random selection over the M_red grid.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = SubsetArg::Both)]
        subset: SubsetArg,
    },
    /// Entropy / correlation / error grid over input and adjacency sparsity.
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Re-run a previous command from its manifest.
    #[command(group = clap::ArgGroup::new("source").required(true))]
    Replay {
        /// Path to a manifest.json written by an earlier run.
        #[arg(value_name = "MANIFEST", group = "source")]
        manifest: Option<PathBuf>,
        #[arg(long = "replay", value_name = "MANIFEST", group = "source")]
        replay_flag: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, env = "SHIFTRC_THREADS")]
        threads: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; falls back to SHIFTRC_THREADS.
    #[arg(long, env = "SHIFTRC_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, value_enum)]
    pub nrmse_mode: Option<NrmseModeArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NrmseModeArg {
    Global,
    PaperLiteral,
}

impl From<NrmseModeArg> for NrmseMode {
    fn from(m: NrmseModeArg) -> Self {
        match m {
            NrmseModeArg::Global => NrmseMode::Global,
            NrmseModeArg::PaperLiteral => NrmseMode::PaperLiteral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SubsetArg {
    #[value(alias = "rrqr-only")]
    Rrqr,
    #[value(alias = "random-only")]
    Random,
    Both,
}

impl From<SubsetArg> for Arms {
    fn from(s: SubsetArg) -> Self {
        match s {
            SubsetArg::Rrqr => Arms::Rrqr,
            SubsetArg::Random => Arms::Random,
            SubsetArg::Both => Arms::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Generate,
    Sweep,
    Analyze,
}

/// Per-command options that are not part of the experiment configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CommandOptions {
    #[serde(default)]
    pub export_states: bool,
    #[serde(default)]
    pub subset: Arms,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: CommandKind,
    pub options: CommandOptions,
    pub config_echo: ExperimentConfig,
    pub tool_version: String,
    pub master_seed: u64,
    /// Git-style SHA-256 of the canonical config echo.
    pub input_hash: String,
    pub output_paths: Vec<String>,
    pub wall_time_seconds: f64,
}

/// Parses a JSON config; errors name the offending field and position.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if cfg.m_red_grid.is_empty() {
        cfg.m_red_grid = cfg.default_grid();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Config("--threads must be >= 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(f)
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate { common, export_states } => {
            let cfg = resolve(common)?;
            let opts = CommandOptions {
                export_states: *export_states,
                ..Default::default()
            };
            with_pool(common.threads, || execute(CommandKind::Generate, &cfg, opts, &common.out).map(drop))
        }
        Command::Sweep { common, subset } => {
            let cfg = resolve(common)?;
            let opts = CommandOptions {
                subset: (*subset).into(),
                ..Default::default()
            };
            with_pool(common.threads, || execute(CommandKind::Sweep, &cfg, opts, &common.out).map(drop))
        }
        Command::Analyze { common } => {
            let cfg = resolve(common)?;
            with_pool(common.threads, || {
                execute(CommandKind::Analyze, &cfg, CommandOptions::default(), &common.out).map(drop)
            })
        }
        Command::Replay {
            manifest,
            replay_flag,
            out,
            threads,
        } => {
            let path = manifest.as_ref().or(replay_flag.as_ref()).expect("clap enforces one source");
            with_pool(*threads, || replay(path, out).map(drop))
        }
    }
}

fn resolve(common: &CommonArgs) -> Result<ExperimentConfig> {
    let mut cfg = load_config(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    if let Some(mode) = common.nrmse_mode {
        cfg.nrmse_mode = mode.into();
    }
    Ok(cfg)
}

/// Runs a command against a resolved config and writes its manifest.
pub fn execute(kind: CommandKind, cfg: &ExperimentConfig, opts: CommandOptions, out: &Path) -> Result<RunManifest> {
    cfg.validate()?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let start = Instant::now();
    let outputs = match kind {
        CommandKind::Generate => cmd_generate(cfg, opts, out)?,
        CommandKind::Sweep => cmd_sweep(cfg, opts, out)?,
        CommandKind::Analyze => cmd_analyze(cfg, out)?,
    };
    let canonical = serde_json::to_vec(cfg)?;
    let manifest = RunManifest {
        command: kind,
        options: opts,
        config_echo: cfg.clone(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        master_seed: cfg.master_seed,
        input_hash: content_hash(&canonical),
        output_paths: outputs,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    write_json(&out.join(MANIFEST_NAME), &manifest)?;
    log::info!("wrote {} files to {}", manifest.output_paths.len() + 1, out.display());
    Ok(manifest)
}

pub fn replay(manifest_path: &Path, out: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(manifest_path)
        .map_err(|e| Error::Config(format!("{}: {e}", manifest_path.display())))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", manifest_path.display())))?;
    execute(manifest.command, &manifest.config_echo, manifest.options, out)
}

struct Outputs<'a> {
    dir: &'a Path,
    names: Vec<String>,
}

impl<'a> Outputs<'a> {
    fn new(dir: &'a Path) -> Self {
        Outputs { dir, names: Vec::new() }
    }

    fn text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        write_text(&path, text)?;
        self.names.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.text(name, &text)
    }
}

pub fn cmd_generate(cfg: &ExperimentConfig, opts: CommandOptions, out: &Path) -> Result<Vec<String>> {
    let series = generate_series(cfg)?;
    let data = dataset_from_series(cfg, &series, cfg.task)?;
    let mut o = Outputs::new(out);
    series.write_csv(&out.join("series.csv"))?;
    o.names.push("series.csv".into());
    o.text("drive_lead.csv", &sequence_csv("drive", &data.drive_lead))?;
    o.text("drive_train.csv", &sequence_csv("drive", &data.drive_train))?;
    o.text("target_train.csv", &sequence_csv("target", &data.target_train))?;
    o.text("drive_test.csv", &sequence_csv("drive", &data.drive_test))?;
    o.text("target_test.csv", &sequence_csv("target", &data.target_test))?;
    o.json("standardization.json", &data.standardization)?;
    if opts.export_states {
        let (train, test) = simulate(cfg, &data, 0)?;
        let reservoir = Reservoir::build(&cfg.reservoir, crate::seed::derive_seed(cfg.master_seed, crate::seed::Role::Mask, &[0]))?;
        o.text("states_train.csv", &train.to_csv())?;
        o.text("states_test.csv", &test.to_csv())?;
        o.json("states.config.json", &reservoir.config_json())?;
    }
    Ok(o.names)
}

pub fn sweep_csv(rows: &[crate::pipeline::SweepRow]) -> String {
    let mut s = String::from(
        "m_red,nrmse_rrqr_mean,nrmse_rrqr_std,nrmse_rand_mean,nrmse_rand_std,nrmse_baseline_mean,percent_improvement\n",
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.m_red,
            fmt_opt(r.nrmse_rrqr_mean),
            fmt_opt(r.nrmse_rrqr_std),
            fmt_opt(r.nrmse_rand_mean),
            fmt_opt(r.nrmse_rand_std),
            fmt_f64(r.nrmse_baseline_mean),
            fmt_opt(r.percent_improvement)
        );
    }
    s
}

pub fn write_sweep(result: &SweepOutput, out: &Path) -> Result<Vec<String>> {
    let mut o = Outputs::new(out);
    o.text("sweep.csv", &sweep_csv(&result.rows))?;
    o.json("cells.json", &result.cells)?;
    for (mask, ranking) in result.rankings.iter().enumerate() {
        o.json(&format!("diagnostics/selection_rrqr_mask{mask}.json"), ranking)?;
        if let Some(r_diag) = &ranking.r_diag {
            o.text(&format!("diagnostics/r_diag_mask{mask}.csv"), &r_diag_csv(r_diag))?;
        }
    }
    Ok(o.names)
}

pub fn cmd_sweep(cfg: &ExperimentConfig, opts: CommandOptions, out: &Path) -> Result<Vec<String>> {
    let result = sweep(cfg, opts.subset)?;
    write_sweep(&result, out)
}

pub fn analysis_csv(result: &AnalysisOutput) -> String {
    let mut s = String::from("f_w,f_a,entropy_bits,mean_correlation,nrmse_observer,nrmse_prediction\n");
    for r in &result.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt_f64(r.f_w),
            fmt_opt(r.f_a),
            fmt_f64(r.entropy_bits),
            fmt_f64(r.mean_correlation),
            fmt_f64(r.nrmse_observer),
            fmt_f64(r.nrmse_prediction)
        );
    }
    s
}

pub fn cmd_analyze(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<String>> {
    let result = analyze_grid(cfg, &cfg.analysis)?;
    let mut o = Outputs::new(out);
    o.text("analysis.csv", &analysis_csv(&result))?;
    o.json("analysis_trials.json", &result.trials)?;
    Ok(o.names)
}
