//! Properties of the Picard map and the outer iteration on small problems.

use oldroyd_core::accelerator::{AaConfig, Damping};
use oldroyd_core::picard::{estimate_contraction_ratio, solve_picard, solve_with_map};
use oldroyd_core::problems::{contraction_config, manufactured_config};
use oldroyd_core::{
    ContractionGeometry, ContractionInflow, DiscreteState, Error, FixedPointMap, InitialGuess, SolveConfig,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn aa(depth: usize, beta: f64, tol: f64) -> AaConfig {
    AaConfig {
        depth,
        damping: Damping::Constant(beta),
        tol_inf: tol,
        max_iter: 60,
        ..AaConfig::default()
    }
}

fn mms(lambda: f64, cfg: AaConfig) -> SolveConfig {
    manufactured_config(6, lambda, 0.5, cfg).unwrap()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn map_reads_only_the_velocity_block(seed in any::<u64>()) {
        let cfg = mms(0.4, aa(0, 1.0, 1e-8));
        let mut map = FixedPointMap::new(&cfg).unwrap();
        let layout = *cfg.space.layout();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = DiscreteState::zeros(layout);
        for v in a.velocity_mut() {
            *v = rng.random_range(-0.05..0.05);
        }
        let mut b = a.clone();
        // Stress and pressure follow the velocity block.
        for v in &mut a.coeffs[layout.num_velocity()..] {
            *v = rng.random_range(-1.0..1.0);
        }
        for v in &mut b.coeffs[layout.num_velocity()..] {
            *v = rng.random_range(-1.0..1.0);
        }
        let (ga, gb) = (map.evaluate(&a).unwrap(), map.evaluate(&b).unwrap());
        prop_assert!(inf_norm(&ga.difference(&gb).coeffs) <= 1e-14);
    }
}

#[test]
fn converged_state_passes_reevaluation() {
    let cfg = mms(0.3, aa(3, 1.0, 1e-9));
    let mut map = FixedPointMap::new(&cfg).unwrap();
    let (state, trace) = solve_with_map(&mut map, &cfg.initial_guess, &cfg.aa).unwrap();
    assert!(trace.converged());
    let again = map.evaluate(&state).unwrap();
    assert!(inf_norm(&again.difference(&state).coeffs) < cfg.aa.tol_inf);
}

#[test]
fn depth_zero_reproduces_picard_bitwise() {
    let cfg = mms(0.3, aa(0, 1.0, 1e-10));
    let (a, ta) = solve_picard(&cfg).unwrap();
    let mut map = FixedPointMap::new(&cfg).unwrap();
    let (b, tb) = solve_with_map(&mut map, &cfg.initial_guess, &cfg.aa).unwrap();
    assert_eq!(a.coeffs, b.coeffs);
    let ra: Vec<f64> = ta.rows.iter().map(|r| r.res_inf).collect();
    let rb: Vec<f64> = tb.rows.iter().map(|r| r.res_inf).collect();
    assert_eq!(ra, rb);
}

#[test]
fn every_linear_solve_has_a_trace_row() {
    for guess in [InitialGuess::Zero, InitialGuess::Stokes] {
        let cfg = mms(0.2, aa(2, 0.9, 1e-9));
        let mut map = FixedPointMap::new(&cfg).unwrap();
        let (_, trace) = solve_with_map(&mut map, &guess, &cfg.aa).unwrap();
        assert_eq!(map.solves(), trace.rows.len() + trace.setup_solves);
        assert_eq!(trace.setup_solves, usize::from(matches!(guess, InitialGuess::Stokes)));
        let ks: Vec<usize> = trace.rows.iter().map(|r| r.k).collect();
        assert_eq!(ks, (1..=trace.rows.len()).collect::<Vec<_>>());
    }
}

#[test]
fn repeated_solves_are_bitwise_identical() {
    let cfg = mms(0.5, aa(4, 0.8, 1e-9));
    let (a, _) = oldroyd_core::solve_aa_picard(&cfg).unwrap();
    let (b, _) = oldroyd_core::solve_aa_picard(&cfg).unwrap();
    assert_eq!(a.coeffs, b.coeffs);
}

#[test]
fn maximal_contraction_ratio_grows_with_small_lambda() {
    let mut maxima = Vec::new();
    for lambda in [0.05, 0.1, 0.2] {
        let (reference, trace) = oldroyd_core::solve_aa_picard(&mms(lambda, aa(5, 1.0, 1e-13))).unwrap();
        assert!(trace.converged());
        let ratios = estimate_contraction_ratio(&mms(lambda, aa(0, 1.0, 1e-10)), &reference, 1e-9).unwrap();
        assert!(!ratios.is_empty());
        maxima.push(ratios.iter().copied().fold(0.0, f64::max));
    }
    assert!(maxima.windows(2).all(|w| w[0] <= w[1]), "{maxima:?}");
}

#[test]
fn stokes_guess_converges_in_one_step_without_elasticity() {
    let cfg = SolveConfig {
        initial_guess: InitialGuess::Stokes,
        ..mms(0.0, aa(0, 1.0, 1e-10))
    };
    let (_, trace) = solve_picard(&cfg).unwrap();
    assert!(trace.converged());
    assert_eq!(trace.iterations(), 1);
    let (_, trace) = solve_picard(&SolveConfig {
        initial_guess: InitialGuess::Zero,
        ..cfg
    })
    .unwrap();
    assert_eq!(trace.iterations(), 2);
}

#[test]
fn mismatched_initial_guess_is_rejected() {
    let cfg = mms(0.1, aa(1, 1.0, 1e-8));
    let other = manufactured_config(3, 0.1, 0.5, aa(1, 1.0, 1e-8)).unwrap();
    let guess = InitialGuess::Provided(other.space.zero_state());
    let mut map = FixedPointMap::new(&cfg).unwrap();
    assert!(matches!(solve_with_map(&mut map, &guess, &cfg.aa), Err(Error::Dimension { .. })));
}

#[test]
fn open_channel_keeps_pressure_ungauged() {
    let cfg = contraction_config(
        &ContractionGeometry::default(),
        ContractionInflow::default(),
        8,
        4,
        0.3,
        8.0 / 9.0,
        aa(5, 1.0, 1e-8),
    )
    .unwrap();
    let map = FixedPointMap::new(&cfg).unwrap();
    assert!(!map.pressure_gauged());
    let (state, trace) = oldroyd_core::solve_aa_picard(&cfg).unwrap();
    assert!(trace.converged());
    // Traction-free outflow fixes the pressure level: it is not shifted to zero mean.
    assert!(cfg.space.pressure_mean(state.pressure()).abs() > 1e-8);
    let enclosed = FixedPointMap::new(&mms(0.1, aa(1, 1.0, 1e-8))).unwrap();
    assert!(enclosed.pressure_gauged());
}
