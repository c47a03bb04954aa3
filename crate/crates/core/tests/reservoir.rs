mod common;

use common::bisect;
use shiftrc::reservoir::{
    generate_adjacency, generate_mask, run_oeo_reservoir, run_tanh_reservoir, spectral_radius, OeoConfig,
    OeoParams, Reservoir, ReservoirParams, TanhParams, TanhReservoirConfig,
};

#[test]
fn oeo_constant_drive_reaches_scalar_fixed_point() {
    let p = OeoParams::default();
    let (m0, s0) = (0.7, 0.5);
    let cfg = OeoConfig::with_mask(&p, vec![m0; p.nodes]);
    let states = run_oeo_reservoir(&cfg, &vec![s0; 300], 0).unwrap();
    let c = p.phi + p.rho * m0 * s0;
    let fixed = bisect(|v| p.beta * (v + c).sin().powi(2) - v, 0.0, p.beta);
    let last = states.values[(299, p.nodes - 1)];
    assert!((last - fixed).abs() < 1e-6, "{last} vs {fixed}");
    for node in 0..p.nodes {
        assert!((states.values[(299, node)] - fixed).abs() < 1e-6);
    }
}

#[test]
fn builds_are_deterministic_per_seed() {
    let drive: Vec<f64> = (0..200).map(|n| (n as f64 * 0.3).sin()).collect();
    for params in [ReservoirParams::Oeo(OeoParams::default()), ReservoirParams::Tanh(TanhParams::default())] {
        let a = Reservoir::build(&params, 77).unwrap().run(&drive, 50).unwrap();
        let b = Reservoir::build(&params, 77).unwrap().run(&drive, 50).unwrap();
        let c = Reservoir::build(&params, 78).unwrap().run(&drive, 50).unwrap();
        assert_eq!(a.values, b.values);
        assert_ne!(a.values, c.values);
    }
}

#[test]
fn oeo_states_bounded_under_chaotic_like_drive() {
    let p = OeoParams::default();
    let cfg = OeoConfig::generate(&p, 3).unwrap();
    let drive: Vec<f64> = (0..500).map(|n| 2.0 * (n as f64 * 0.37).sin() * (n as f64 * 0.05).cos()).collect();
    let s = run_oeo_reservoir(&cfg, &drive, 100).unwrap();
    assert!(s.values.iter().all(|v| v.abs() <= p.beta * 1.1));
}

#[test]
fn tanh_reservoir_from_generated_weights() {
    let p = TanhParams::default();
    let a = generate_adjacency(p.nodes, p.f_a, p.spectral_radius, 5).unwrap();
    assert!((spectral_radius(&a) - 0.5).abs() < 1e-8);
    let w_in = generate_mask(p.nodes, p.f_w, 6).unwrap();
    let cfg = TanhReservoirConfig::from_parts(p.alpha, a, w_in).unwrap();
    let drive: Vec<f64> = (0..400).map(|n| (n as f64 * 0.21).sin() * 3.0).collect();
    let s = run_tanh_reservoir(&cfg, &drive, 100).unwrap();
    assert_eq!(s.values.shape(), (300, 50));
    assert!(s.values.iter().all(|v| v.abs() <= 1.0));
}
