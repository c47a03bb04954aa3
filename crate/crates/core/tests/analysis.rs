mod common;

use common::{rng, uniform};
use proptest::prelude::*;
use shiftrc::analysis::{node_target_correlation, ordinal_symbols, reservoir_entropy, CorrelationMode};
use shiftrc::dynamics::{ChaoticSystem, TaskKind};
use shiftrc::pipeline::{analyze_grid, AnalysisSettings, ExperimentConfig};
use shiftrc::reservoir::{ReservoirParams, StateMatrix, TanhParams};

fn states(seed: u64, rows: usize, cols: usize) -> StateMatrix {
    StateMatrix::new(uniform(&mut rng(seed), rows, cols), 0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_bounds(seed in 0u64..1000, rows in 4usize..60, cols in 1usize..6, window in 2usize..5) {
        prop_assume!(rows >= window);
        let s = states(seed, rows, cols);
        let h = reservoir_entropy(&s, window).unwrap();
        let positions = rows - window + 1;
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (positions as f64).log2() + 1e-12);
        let mut distinct: Vec<Vec<u32>> = (0..positions).map(|t| {
            (0..cols).map(|j| ordinal_symbols(&s.values.column(j).as_slice()[t..t + window], window).unwrap().symbols[0]).collect()
        }).collect();
        distinct.sort();
        distinct.dedup();
        prop_assert!(h <= (distinct.len() as f64).log2() + 1e-12);
    }

    #[test]
    fn entropy_ignores_monotone_transforms(seed in 0u64..1000) {
        let s = states(seed, 40, 3);
        let t = StateMatrix::new(s.values.map(|v| (3.0 * v).exp() + v.powi(3)), 0).unwrap();
        prop_assert_eq!(reservoir_entropy(&s, 4).unwrap(), reservoir_entropy(&t, 4).unwrap());
    }

    #[test]
    fn entropy_ignores_node_order(seed in 0u64..1000) {
        let s = states(seed, 40, 4);
        let mut v = s.values.clone();
        v.swap_columns(0, 3);
        v.swap_columns(1, 2);
        let p = StateMatrix::new(v, 0).unwrap();
        prop_assert!((reservoir_entropy(&s, 3).unwrap() - reservoir_entropy(&p, 3).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn pearson_correlation_in_unit_interval(seed in 0u64..1000) {
        let s = states(seed, 30, 5);
        let g: Vec<f64> = uniform(&mut rng(seed + 1), 30, 1).as_slice().to_vec();
        let c = node_target_correlation(&s, &g, CorrelationMode::Pearson).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
    }
}

#[test]
fn constant_nodes_have_zero_entropy() {
    let s = StateMatrix::new(nalgebra::DMatrix::from_element(30, 4, 0.25), 0).unwrap();
    assert_eq!(reservoir_entropy(&s, 4).unwrap(), 0.0);
}

#[test]
fn sparse_input_raises_tanh_entropy() {
    let mut cfg = ExperimentConfig::new(ChaoticSystem::Lorenz);
    cfg.task = TaskKind::Observer;
    cfg.reservoir = ReservoirParams::Tanh(TanhParams::default());
    cfg.tau_max = 0;
    cfg.train_len = 3000;
    cfg.test_len = 1000;
    let settings = AnalysisSettings {
        f_w_grid: vec![0.1, 1.0],
        f_a_grid: vec![0.5],
        trials: 5,
        ..AnalysisSettings::default()
    };
    let out = analyze_grid(&cfg, &settings).unwrap();
    assert_eq!(out.rows.len(), 2);
    assert_eq!(out.trials.len(), 10);
    assert!(out.rows[0].entropy_bits > out.rows[1].entropy_bits, "{:?}", out.rows);
}
