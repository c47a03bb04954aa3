mod common;

use std::collections::HashSet;

use common::{rng, uniform};
use nalgebra::DMatrix;
use shiftrc::dynamics::ChaoticSystem;
use shiftrc::numerics::{covariance_rank, DEFAULT_RANK_TOL};
use shiftrc::pipeline::{prepare_task, simulate, ExperimentConfig};
use shiftrc::reservoir::StateMatrix;
use shiftrc::shift_select::{build_shifted_matrix, random_select, reduce, rrqr_select, ColumnId, SelectionResult};

fn lorenz_states(rows: usize) -> StateMatrix {
    let mut cfg = ExperimentConfig::new(ChaoticSystem::Lorenz);
    cfg.train_len = rows;
    cfg.test_len = 50;
    let data = prepare_task(&cfg).unwrap();
    simulate(&cfg, &data, 0).unwrap().0
}

#[test]
fn duplicate_column_pivots_last() {
    let mut r = rng(21);
    let mut v = uniform(&mut r, 60, 6);
    let dup = v.column(2).into_owned();
    v.set_column(5, &dup);
    let o2 = build_shifted_matrix(&StateMatrix::new(v, 0).unwrap(), 0).unwrap();
    let sel = rrqr_select(&o2, 5).unwrap();
    let hits = sel.retained.iter().filter(|c| c.node == 2 || c.node == 5).count();
    assert_eq!(hits, 1);
}

#[test]
fn full_selection_is_full_set() {
    let mut r = rng(22);
    let o2 = build_shifted_matrix(&StateMatrix::new(uniform(&mut r, 30, 3), 0).unwrap(), 2).unwrap();
    let all: HashSet<ColumnId> = o2.columns.iter().copied().collect();
    let rrqr: HashSet<ColumnId> = rrqr_select(&o2, 9).unwrap().retained.into_iter().collect();
    let rand: HashSet<ColumnId> = random_select(&o2, 9, 123).unwrap().retained.into_iter().collect();
    assert_eq!(rrqr, all);
    assert_eq!(rand, all);
    let ordered = SelectionResult::explicit(o2.columns.clone());
    assert_eq!(reduce(&o2, &ordered).unwrap().values, o2.values);
}

#[test]
fn random_select_is_seed_deterministic() {
    let mut r = rng(23);
    let o2 = build_shifted_matrix(&StateMatrix::new(uniform(&mut r, 30, 5), 0).unwrap(), 3).unwrap();
    assert_eq!(random_select(&o2, 7, 9).unwrap(), random_select(&o2, 7, 9).unwrap());
    assert_ne!(random_select(&o2, 7, 9).unwrap().retained, random_select(&o2, 7, 10).unwrap().retained);
}

#[test]
fn single_draw_frequencies_are_uniform() {
    let o2 = build_shifted_matrix(&StateMatrix::new(DMatrix::zeros(20, 10), 0).unwrap(), 10).unwrap();
    let c = o2.ncols();
    assert_eq!(c, 110);
    let draws = 10_000;
    let mut counts = vec![0usize; c];
    for seed in 0..draws {
        let col = random_select(&o2, 1, seed).unwrap().retained[0];
        counts[col.shift * 10 + col.node] += 1;
    }
    let p = 1.0 / c as f64;
    let mean = draws as f64 * p;
    let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
    for (k, &n) in counts.iter().enumerate() {
        assert!((n as f64 - mean).abs() <= 3.0 * sigma + 1.0, "column {k}: {n}");
    }
}

#[test]
fn train_and_test_reductions_align() {
    let mut r = rng(24);
    let train = build_shifted_matrix(&StateMatrix::new(uniform(&mut r, 40, 4), 0).unwrap(), 2).unwrap();
    let test = build_shifted_matrix(&StateMatrix::new(uniform(&mut r, 25, 4), 0).unwrap(), 2).unwrap();
    let sel = rrqr_select(&train, 6).unwrap();
    let a = reduce(&train, &sel).unwrap();
    let b = reduce(&test, &sel).unwrap();
    assert_eq!(a.columns, b.columns);
    assert_eq!(b.values.shape(), (23, 6));
}

#[test]
fn rrqr_subset_preserves_rank() {
    let states = lorenz_states(2000);
    let o2 = build_shifted_matrix(&states, 10).unwrap();
    assert_eq!(o2.values.shape(), (1990, 110));
    let full_rank = covariance_rank(&o2.values, DEFAULT_RANK_TOL);
    let sel = rrqr_select(&o2, 30).unwrap();
    let reduced = reduce(&o2, &sel).unwrap();
    assert_eq!(covariance_rank(&reduced.values, DEFAULT_RANK_TOL), full_rank.min(30));
}

#[test]
fn rrqr_rank_dominates_random_rank() {
    // Loose tolerance so that near-dependent lagged columns count as dependent.
    let tol = 1e-6;
    let states = lorenz_states(1500);
    let o2 = build_shifted_matrix(&states, 10).unwrap();
    let mut wins = 0;
    let trials = 50;
    for trial in 0..trials {
        let m_red = 10 + 2 * trial as usize;
        let q = covariance_rank(&reduce(&o2, &rrqr_select(&o2, m_red).unwrap()).unwrap().values, tol);
        let r = covariance_rank(&reduce(&o2, &random_select(&o2, m_red, trial).unwrap()).unwrap().values, tol);
        if q >= r {
            wins += 1;
        }
    }
    assert!(wins * 10 >= trials * 9, "{wins}/{trials}");
}
