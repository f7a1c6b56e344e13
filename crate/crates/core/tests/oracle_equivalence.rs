//! Cross-route checks: density-matrix walk vs the pure-state vector oracle,
//! and position-space simulation vs momentum-space exact moments.

#[path = "support/vector_oracle.rs"]
mod vector_oracle;

use nmqw::{
    evolve, first_moment_exact, longtime_variance, position_distribution, second_moment_exact,
    variance, BlochVector, CoinDensity, CoinOperator, QuadratureSettings, StepSchedule, WalkConfig,
};
use num_complex::Complex64 as C64;
use vector_oracle::PureWalk;

#[test]
fn ideal_walk_matches_vector_oracle_to_machine_precision() {
    let steps = 50;
    let config = WalkConfig::new(steps, StepSchedule::ideal(steps)).unwrap();
    let mut oracle = PureWalk::symmetric();
    for state in evolve(&config) {
        let state = state.unwrap();
        let dist = position_distribution(&state);
        assert!(
            (variance(&dist) - oracle.variance()).abs() < 1e-10,
            "t = {}: {} vs {}",
            state.t(),
            variance(&dist),
            oracle.variance()
        );
        for (x, p) in oracle.probabilities() {
            assert!((dist.probability(x) - p).abs() < 1e-12, "t = {}, x = {x}", state.t());
        }
        if state.t() < steps {
            oracle.step();
        }
    }
}

#[test]
fn ideal_walk_ballistic_scaling() {
    let steps = 100;
    let config = WalkConfig::new(steps, StepSchedule::ideal(steps)).unwrap();
    let mut var50 = 0.0;
    let mut var100 = 0.0;
    for state in evolve(&config) {
        let state = state.unwrap();
        if state.t() == 50 {
            var50 = variance(&position_distribution(&state));
        }
        if state.t() == 100 {
            var100 = variance(&position_distribution(&state));
        }
    }
    let ratio = var100 / var50;
    assert!((3.4..=4.6).contains(&ratio), "var(100)/var(50) = {ratio}");
}

fn simulated_moments(steps: usize, kappa: C64, coin: &CoinDensity) -> Vec<(usize, f64, f64)> {
    let schedule = StepSchedule::frozen(kappa, steps).unwrap();
    let config =
        WalkConfig::with_coin(steps, *coin, CoinOperator::hadamard(), schedule).unwrap();
    evolve(&config)
        .map(|state| {
            let state = state.unwrap();
            let dist = position_distribution(&state);
            let m1: f64 = dist.points().map(|(x, p)| x as f64 * p).sum();
            let m2: f64 = dist.points().map(|(x, p)| (x * x) as f64 * p).sum();
            (state.t(), m1, m2)
        })
        .collect()
}

#[test]
fn frozen_kappa_moments_match_momentum_space() {
    let quad = QuadratureSettings::default();
    let coin = CoinDensity::symmetric();
    let bloch = BlochVector::from_coin(&coin);
    for &mag in &[0.2, 0.5, 0.8] {
        let kappa = C64::new(mag, 0.0);
        for &(t, m1_sim, m2_sim) in simulated_moments(30, kappa, &coin).iter().skip(1) {
            let m1 = first_moment_exact(t, kappa, &bloch, &quad).unwrap();
            let m2 = second_moment_exact(t, kappa, &bloch, &quad).unwrap();
            assert!((m1 - m1_sim).abs() < 1e-6, "kappa={mag} t={t}: <x> {m1} vs {m1_sim}");
            assert!((m2 - m2_sim).abs() < 1e-6, "kappa={mag} t={t}: <x2> {m2} vs {m2_sim}");
        }
    }
}

#[test]
fn frozen_kappa_moments_match_for_asymmetric_coin() {
    // a coin with r4 != 0 pins the sign convention of the first moment
    let quad = QuadratureSettings::default();
    let coin = CoinDensity::from_pure(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
    let bloch = BlochVector::from_coin(&coin);
    let kappa = C64::new(0.5, 0.0);
    for &(t, m1_sim, m2_sim) in simulated_moments(20, kappa, &coin).iter().skip(1) {
        let m1 = first_moment_exact(t, kappa, &bloch, &quad).unwrap();
        let m2 = second_moment_exact(t, kappa, &bloch, &quad).unwrap();
        assert!((m1 - m1_sim).abs() < 1e-6, "t={t}: <x> {m1} vs {m1_sim}");
        assert!((m2 - m2_sim).abs() < 1e-6, "t={t}: <x2> {m2} vs {m2_sim}");
    }
    // the drift is to the right for the |+1> coin
    let late = first_moment_exact(20, kappa, &bloch, &quad).unwrap();
    assert!(late > 0.0);
}

#[test]
fn complex_kappa_moments_match() {
    let quad = QuadratureSettings::default();
    let coin = CoinDensity::from_pure(C64::new(0.8, 0.0), C64::new(0.36, 0.48)).unwrap();
    let bloch = BlochVector::from_coin(&coin);
    let kappa = C64::new(0.3, -0.4);
    for &(t, m1_sim, m2_sim) in simulated_moments(15, kappa, &coin).iter().skip(1) {
        let m1 = first_moment_exact(t, kappa, &bloch, &quad).unwrap();
        let m2 = second_moment_exact(t, kappa, &bloch, &quad).unwrap();
        assert!((m1 - m1_sim).abs() < 1e-6, "t={t}: <x> {m1} vs {m1_sim}");
        assert!((m2 - m2_sim).abs() < 1e-6, "t={t}: <x2> {m2} vs {m2_sim}");
    }
}

#[test]
fn longtime_variance_tracks_simulation_at_desk_scale() {
    // frozen kappa = 0.3, t = 200: closed form within 2% of simulation
    let coin = CoinDensity::symmetric();
    let rows = simulated_moments(200, C64::new(0.3, 0.0), &coin);
    let (_, m1, m2) = rows[200];
    let var_sim = m2 - m1 * m1;
    let var_lt =
        longtime_variance(200, C64::new(0.3, 0.0), &BlochVector::from_coin(&coin)).unwrap();
    let rel = (var_sim - var_lt).abs() / var_sim;
    assert!(rel <= 0.02, "var_sim={var_sim} var_lt={var_lt} rel={rel}");
}
