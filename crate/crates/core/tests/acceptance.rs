//! Acceptance criteria AC1–AC10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

mod common;

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{jacobi_singular_values, low_rank, mgs_least_squares, rel_diff, rng, uniform};
use nalgebra::DMatrix;
use rand::Rng;
use shiftrc::analysis::{reservoir_entropy, sign_test_p, spearman};
use shiftrc::cli::{execute, replay, CommandKind, CommandOptions};
use shiftrc::dynamics::{ChaoticSystem, TaskKind};
use shiftrc::numerics::{covariance_rank, estimate_rank, qr_column_pivot, r22_bound_check, ridge_fit};
use shiftrc::pipeline::{
    analyze_grid, prepare_task, run_on_task, simulate, sweep, AnalysisSettings, Arm, Arms, ExperimentConfig,
    SelectionSpec, ShiftedTask, SweepOutput,
};
use shiftrc::reservoir::{ReservoirParams, StateMatrix, TanhParams};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within(elapsed: Duration, limit_s: u64, detail: String) -> Outcome {
    if elapsed.as_secs_f64() < limit_s as f64 {
        Ok(detail)
    } else {
        Err(format!("{detail}; runtime {:.1}s exceeds {limit_s}s", elapsed.as_secs_f64()))
    }
}

fn ac1_qr_kernel() -> Outcome {
    let start = Instant::now();
    let mut r = rng(101);
    let (mut worst_rec, mut worst_orth) = (0.0f64, 0.0f64);
    for trial in 0..100 {
        let b = uniform(&mut r, 200, 50);
        let qr = qr_column_pivot(&b).map_err(|e| e.to_string())?;
        let q = qr.q_thin();
        let bp = DMatrix::from_fn(200, 50, |i, k| b[(i, qr.perm[k])]);
        let rec = (&q * qr.r() - bp).norm() / b.norm();
        let orth = (q.transpose() * &q - DMatrix::<f64>::identity(50, 50)).amax();
        worst_rec = worst_rec.max(rec);
        worst_orth = worst_orth.max(orth);
        if rec > 1e-12 || orth > 1e-12 {
            return Err(format!("trial {trial}: reconstruction {rec:e}, orthogonality {orth:e}"));
        }
        if qr.r_diag.windows(2).any(|w| w[0] < w[1]) {
            return Err(format!("trial {trial}: r_diag increases"));
        }
    }
    within(
        start.elapsed(),
        10,
        format!("100 matrices 200x50, max rel reconstruction {worst_rec:.1e}, max |QtQ-I| {worst_orth:.1e}"),
    )
}

fn ac2_trailing_block_bound() -> Outcome {
    let start = Instant::now();
    let mut r = rng(102);
    let mut margin = f64::INFINITY;
    for trial in 0..100 {
        let b = uniform(&mut r, 40, 10);
        let qr = qr_column_pivot(&b).map_err(|e| e.to_string())?;
        let sv = jacobi_singular_values(&b);
        for ell in 1..=10 {
            let (_, r22) = r22_bound_check(&qr, ell).map_err(|e| e.to_string())?;
            let sigma = sv[10 - ell];
            if sigma > r22 + 1e-10 {
                return Err(format!("trial {trial}, ell {ell}: sigma {sigma} > ||R22|| {r22}"));
            }
            margin = margin.min(r22 - sigma);
        }
    }
    within(start.elapsed(), 5, format!("100 matrices 40x10, all ell, min ||R22||-sigma {margin:.2e}"))
}

fn ac3_rank_oracle() -> Outcome {
    let mut r = rng(103);
    let mut hits = 0;
    for rank in 1..=9 {
        for _ in 0..10 {
            let b = low_rank(&mut r, 100, 10, rank);
            let qr = qr_column_pivot(&b).map_err(|e| e.to_string())?;
            let (q, c) = (estimate_rank(&qr, 1e-10), covariance_rank(&b, 1e-10));
            if q == rank && c == rank {
                hits += 1;
            } else {
                return Err(format!("rank {rank}: estimate_rank {q}, covariance_rank {c}"));
            }
        }
    }
    Ok(format!("{hits}/90 constructed-rank trials exact"))
}

fn ac4_ridge_oracle() -> Outcome {
    let mut r = rng(104);
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let x = uniform(&mut r, 30, 8);
        let g: Vec<f64> = (0..30).map(|_| r.random_range(-1.0..1.0)).collect();
        let w = ridge_fit(&x, &g, 0.0, false).map_err(|e| e.to_string())?.w;
        let oracle = mgs_least_squares(&x, &g);
        let diff: f64 = w.iter().zip(&oracle).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let rel = diff / oracle.iter().map(|v| v * v).sum::<f64>().sqrt();
        worst = worst.max(rel);
        if rel > 1e-10 {
            return Err(format!("system {trial}: relative difference {rel:e}"));
        }
    }
    let mut worst_ulp = 0.0f64;
    for k in 0..1000 {
        let x: f64 = r.random_range(-10.0..10.0);
        let g: f64 = r.random_range(-10.0..10.0);
        let lambda: f64 = r.random_range(0.0..5.0);
        let w = ridge_fit(&DMatrix::from_element(1, 1, x), &[g], lambda, false).map_err(|e| e.to_string())?.w[0];
        let closed = x * g / (x * x + lambda);
        let ulp = rel_diff(w, closed) / f64::EPSILON;
        worst_ulp = worst_ulp.max(ulp);
        if ulp > 4.0 {
            return Err(format!("scalar {k}: {w} vs {closed} ({ulp:.1} eps)"));
        }
    }
    Ok(format!(
        "50 systems max rel diff {worst:.1e}; 1000 scalars within {worst_ulp:.1} eps of x*g/(x^2+lambda)"
    ))
}

fn ac5_convergence() -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig::new(ChaoticSystem::Lorenz);
    let data = prepare_task(&cfg).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for mask in 0..5 {
        let (train, test) = simulate(&cfg, &data, mask).map_err(|e| e.to_string())?;
        let task = ShiftedTask::new(&train, &test, &data, cfg.tau_max).map_err(|e| e.to_string())?;
        let q = run_on_task(&cfg, &task, mask, &SelectionSpec::Rrqr { m_red: 110 }).map_err(|e| e.to_string())?;
        let spec = SelectionSpec::Random { m_red: 110, subset_id: 0 };
        let rd = run_on_task(&cfg, &task, mask, &spec).map_err(|e| e.to_string())?;
        let d = rel_diff(q.result.nrmse_test, rd.result.nrmse_test);
        worst = worst.max(d);
        if d > 1e-8 {
            return Err(format!("mask {mask}: {} vs {}", q.result.nrmse_test, rd.result.nrmse_test));
        }
    }
    within(start.elapsed(), 300, format!("5 masks, M_red=110, max rel diff {worst:.1e}"))
}

fn fig_config(system: ChaoticSystem, task: TaskKind) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(system);
    cfg.task = task;
    cfg.m_red_grid = vec![20, 30, 40, 50];
    cfg.n_masks = 10;
    cfg.n_random_subsets = 10;
    cfg
}

/// Masks on which RRQR beats that mask's mean random error, per grid point.
fn mask_wins(cfg: &ExperimentConfig, out: &SweepOutput, m_red: usize) -> usize {
    (0..cfg.n_masks as u64)
        .filter(|&mask| {
            let of = |arm: Arm| -> Vec<f64> {
                out.cells
                    .iter()
                    .filter(|c| c.method == arm && c.m_red == m_red && c.mask_id == mask)
                    .map(|c| c.nrmse_test)
                    .collect()
            };
            let rand = of(Arm::Random);
            of(Arm::Rrqr)[0] < rand.iter().sum::<f64>() / rand.len() as f64
        })
        .count()
}

fn ac6_lorenz_ordering() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    for (task, label) in [(TaskKind::OneStepPrediction, "prediction"), (TaskKind::Observer, "observer")] {
        let cfg = fig_config(ChaoticSystem::Lorenz, task);
        let out = sweep(&cfg, Arms::Both).map_err(|e| e.to_string())?;
        let mut peak = f64::NEG_INFINITY;
        for row in &out.rows {
            let (q, r) = (row.nrmse_rrqr_mean.unwrap(), row.nrmse_rand_mean.unwrap());
            let wins = mask_wins(&cfg, &out, row.m_red);
            let p = sign_test_p(wins, cfg.n_masks);
            peak = peak.max(row.percent_improvement.unwrap());
            if q >= r || p >= 0.05 {
                failures.push(format!("{label} M_red={}: rrqr {q:.4} rand {r:.4} wins {wins} p {p:.3}", row.m_red));
            }
        }
        if peak < 10.0 {
            failures.push(format!("{label}: peak improvement {peak:.1}% < 10%"));
        }
        notes.push(format!("{label} peak {peak:.1}%"));
    }
    if !failures.is_empty() {
        return Err(failures.join("; "));
    }
    within(
        start.elapsed(),
        1800,
        format!("RRQR < random at all 4 points, sign test p<0.05; {}", notes.join(", ")),
    )
}

fn ac7_rossler_ordering() -> Outcome {
    let start = Instant::now();
    let (mut better, mut total) = (0, 0);
    let mut notes = Vec::new();
    for (task, label) in [(TaskKind::OneStepPrediction, "prediction"), (TaskKind::Observer, "observer")] {
        let cfg = fig_config(ChaoticSystem::Rossler, task);
        let out = sweep(&cfg, Arms::Both).map_err(|e| e.to_string())?;
        let mut peak = f64::NEG_INFINITY;
        for row in &out.rows {
            total += 1;
            if row.nrmse_rrqr_mean.unwrap() <= row.nrmse_rand_mean.unwrap() {
                better += 1;
            }
            peak = peak.max(row.percent_improvement.unwrap());
        }
        notes.push(format!("{label} peak {peak:.1}%"));
    }
    let detail = format!("RRQR <= random at {better}/{total} points; {}", notes.join(", "));
    if better * 10 < total * 7 {
        return Err(detail);
    }
    within(start.elapsed(), 1800, detail)
}

fn ac8_entropy_trend() -> Outcome {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(ChaoticSystem::Lorenz);
    cfg.task = TaskKind::Observer;
    cfg.reservoir = ReservoirParams::Tanh(TanhParams::default());
    cfg.tau_max = 0;
    cfg.m_red_grid = vec![50];
    let settings = AnalysisSettings {
        f_w_grid: (1..=10).map(|k| k as f64 / 10.0).collect(),
        f_a_grid: vec![0.5],
        trials: 20,
        ..AnalysisSettings::default()
    };
    let out = analyze_grid(&cfg, &settings).map_err(|e| e.to_string())?;
    let f_w: Vec<f64> = out.rows.iter().map(|r| r.f_w).collect();
    let h: Vec<f64> = out.rows.iter().map(|r| r.entropy_bits).collect();
    let c: Vec<f64> = out.rows.iter().map(|r| r.mean_correlation).collect();
    let (rho_h, p_h) = spearman(&f_w, &h).map_err(|e| e.to_string())?;
    let (rho_c, p_c) = spearman(&f_w, &c).map_err(|e| e.to_string())?;
    let detail = format!(
        "entropy vs f_W rho {rho_h:.3} (p {p_h:.1e}); <C_T> vs f_W rho {rho_c:.3} (p {p_c:.1e}); H {:.2}->{:.2} bits",
        h[0],
        h[h.len() - 1]
    );
    if !(rho_h < 0.0 && p_h < 0.05 && rho_c > 0.0 && p_c < 0.05) {
        return Err(detail);
    }
    within(start.elapsed(), 1200, detail)
}

fn ac9_entropy_oracle() -> Outcome {
    let constant = StateMatrix::new(DMatrix::from_element(50, 5, 1.5), 0).map_err(|e| e.to_string())?;
    let h0 = reservoir_entropy(&constant, 4).map_err(|e| e.to_string())?;
    let alternating: Vec<f64> = (0..101).map(|n| (n % 2) as f64).collect();
    let two = StateMatrix::new(DMatrix::from_column_slice(101, 1, &alternating), 0).map_err(|e| e.to_string())?;
    let h1 = reservoir_entropy(&two, 2).map_err(|e| e.to_string())?;
    let detail = format!("constant H = {h0}, balanced two-symbol H = {h1}");
    if h0 == 0.0 && (h1 - 1.0).abs() <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn csv_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "csv") {
                files.push((p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

fn ac10_replay() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = fig_config(ChaoticSystem::Lorenz, TaskKind::Observer);
    cfg.n_masks = 3;
    cfg.n_random_subsets = 3;
    cfg.master_seed = 2024;
    let first = tmp.path().join("first");
    let again = tmp.path().join("again");
    execute(CommandKind::Sweep, &cfg, CommandOptions::default(), &first).map_err(|e| e.to_string())?;
    replay(&first.join("manifest.json"), &again).map_err(|e| e.to_string())?;
    let (a, b) = (csv_tree(&first), csv_tree(&again));
    if a.is_empty() || a != b {
        return Err(format!("{} CSVs originally, {} replayed, contents differ", a.len(), b.len()));
    }
    Ok(format!("{} CSV files bitwise identical after replay", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("AC1 QR kernel correctness", ac1_qr_kernel),
        ("AC2 trailing R block bound", ac2_trailing_block_bound),
        ("AC3 rank oracle", ac3_rank_oracle),
        ("AC4 ridge oracle", ac4_ridge_oracle),
        ("AC5 full-selection convergence", ac5_convergence),
        ("AC6 Lorenz RRQR ordering", ac6_lorenz_ordering),
        ("AC7 Rossler RRQR ordering", ac7_rossler_ordering),
        ("AC8 entropy and correlation trend", ac8_entropy_trend),
        ("AC9 entropy oracle", ac9_entropy_oracle),
        ("AC10 replay determinism", ac10_replay),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
