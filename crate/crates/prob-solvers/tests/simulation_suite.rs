//! The Monte-Carlo oracle against exact chain payoffs: estimates must sit
//! within a few binomial standard errors of the exact value, and runs are
//! reproducible from their seed.

use game_core::fixtures::g2;
use game_core::generator::{corpus_rng, random_game, GeneratorConfig};
use num::ToPrimitive;
use prob_solvers::{
    induce_markov_chain, mc_omega_payoff, simulate_omega_payoff, StationaryProfile,
};

#[test]
fn estimates_are_reproducible_from_the_seed() {
    let g = g2();
    let mc = induce_markov_chain(&g, &StationaryProfile::uniform(&g)).expect("chain");
    let a = simulate_omega_payoff(&mc, g.objectives(), 2, 2_000, 42);
    let b = simulate_omega_payoff(&mc, g.objectives(), 2, 2_000, 42);
    assert_eq!(a, b);
    assert!((a[0].mean - 0.5).abs() <= 3.0 * a[0].std_error + 1e-12);
}

#[test]
fn estimates_agree_with_exact_payoffs_within_three_standard_errors() {
    let runs = 20_000;
    for k in 0..8u64 {
        let cfg = GeneratorConfig::new(2, 6);
        let g = random_game(&cfg, &mut corpus_rng(31_000 + k));
        let mc = induce_markov_chain(&g, &StationaryProfile::uniform(&g)).expect("chain");
        let exact = mc_omega_payoff(&mc, g.objectives(), 0).expect("payoff");
        let estimates = simulate_omega_payoff(&mc, g.objectives(), 0, runs, 31_500 + k);
        for (i, est) in estimates.iter().enumerate() {
            let p = exact[i].to_f64().expect("fits");
            // Binomial error from either side, whichever is wider, keeps
            // the check meaningful when one of the two sits at 0 or 1.
            let width = (p * (1.0 - p) / runs as f64).sqrt().max(est.std_error);
            assert!(
                (est.mean - p).abs() <= 3.0 * width,
                "game {k}, player {i}: estimate {} vs exact {p} (width {width})",
                est.mean
            );
        }
    }
}

#[test]
fn degenerate_payoffs_are_estimated_exactly() {
    // Every run from a is decided immediately: payoff 1 for the owner.
    let g = g2();
    let mc = induce_markov_chain(&g, &StationaryProfile::uniform(&g)).expect("chain");
    let from_a = simulate_omega_payoff(&mc, g.objectives(), 0, 500, 7);
    assert_eq!(from_a[0].mean, 1.0);
    assert_eq!(from_a[0].std_error, 0.0);
    let from_b = simulate_omega_payoff(&mc, g.objectives(), 1, 500, 7);
    assert_eq!(from_b[0].mean, 0.0);
}
