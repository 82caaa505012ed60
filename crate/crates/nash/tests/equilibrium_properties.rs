//! The positional search against independent full-certification sweeps,
//! plus the guarantees every certificate honours regardless of verdict:
//! widening a threshold box never flips an accept, verdicts can be
//! re-derived from the echoed numbers alone, and certified binary
//! positional payoffs are always confirmed by the qualitative decider.

use std::collections::BTreeSet;

use game_core::game::{Objective, Smg};
use game_core::generator::{corpus_rng, random_game, GeneratorConfig, ObjectiveKind};
use game_core::rational::{rat, Rational};
use nash::{
    certify_positional, certify_stationary, positional_profile_count, solve_posne,
    solve_posne_sequential, solve_qualne, ThresholdQuery, DEFAULT_PROFILE_CAP,
};
use num::{One, Zero};
use objectives::BinaryPayoff;
use prob_solvers::{enumerate_positional_profiles, StationaryProfile};
use proptest::prelude::*;

/// Three players chasing each other around a hub: `a` can move anywhere,
/// `b` and `c` can only loop or fall back to `a`, and the chance vertex
/// `s` scatters uniformly. Players 0 and 2 want `b` visited infinitely
/// often, player 1 wants the same for `c`.
///
/// No cycle through a positional profile can contain both `b` and `c`
/// (their rows admit no edge towards each other), so from `s` every pure
/// memoryless profile either starves someone below 1/3 or leaves a
/// profitable deviation — yet mixing at every vertex visits both forever.
fn merry_go_round() -> Smg {
    Smg::from_parts(
        3,
        vec![
            ("a".to_owned(), Some(0)),
            ("b".to_owned(), Some(1)),
            ("c".to_owned(), Some(2)),
            ("s".to_owned(), None),
        ],
        vec![
            (0, 0, None),
            (0, 1, None),
            (0, 2, None),
            (1, 0, None),
            (1, 1, None),
            (2, 0, None),
            (2, 2, None),
            (3, 0, Some(rat(1, 3))),
            (3, 1, Some(rat(1, 3))),
            (3, 2, Some(rat(1, 3))),
        ],
        vec![
            Objective::Buchi(BTreeSet::from([1])),
            Objective::Buchi(BTreeSet::from([2])),
            Objective::Buchi(BTreeSet::from([1])),
        ],
    )
    .expect("the hub game is well-formed")
}

#[test]
fn a_stationary_equilibrium_can_exist_where_no_positional_one_does() {
    let g = merry_go_round();
    let s = 3;
    let q = ThresholdQuery::new(vec![rat(1, 3); 3], vec![Rational::one(); 3])
        .expect("a valid box");

    // The full positional space is small enough to sweep by hand.
    assert_eq!(positional_profile_count(&g), Some(12));
    for p in enumerate_positional_profiles(&g) {
        let cert = certify_positional(&g, s, &p, &q).expect("certifiable profile");
        assert!(
            !cert.accepted,
            "no pure memoryless profile should be an equilibrium here, \
             but {:?} was accepted with payoff {:?}",
            p.choices, cert.payoff
        );
    }
    let swept = solve_posne(&g, s, &q, DEFAULT_PROFILE_CAP).expect("search runs");
    assert!(swept.is_none(), "the search must agree with the sweep");

    // Mixing uniformly everywhere keeps both b and c recurrent, so all
    // three objectives are met almost surely and nobody can gain.
    let uniform = StationaryProfile::uniform(&g);
    let cert = certify_stationary(&g, s, &uniform, &q).expect("certifiable profile");
    assert!(cert.accepted, "the uniform profile is an equilibrium: {:?}", cert.reasons);
    assert_eq!(cert.payoff, vec![Rational::one(); 3]);
}

#[test]
fn the_search_agrees_with_a_full_certification_sweep() {
    let mut accepted = 0;
    let mut rejected = 0;
    for round in 0..60u64 {
        let cfg = GeneratorConfig::new(2, 5);
        let g = random_game(&cfg, &mut corpus_rng(0x9051 + round));
        let demanding = ThresholdQuery::exact(vec![Rational::one(); g.players()])
            .expect("a valid box");
        for q in [ThresholdQuery::unconstrained(g.players()), demanding] {
            let first_by_sweep = enumerate_positional_profiles(&g).into_iter().find(|p| {
                certify_positional(&g, 0, p, &q).expect("certifiable profile").accepted
            });
            let found = solve_posne(&g, 0, &q, DEFAULT_PROFILE_CAP).expect("search runs");

            match (first_by_sweep, found) {
                (None, None) => rejected += 1,
                (Some(expected), Some((profile, cert))) => {
                    assert_eq!(profile, expected, "round {round}: not the first accept");
                    assert!(cert.accepted);
                    accepted += 1;
                }
                (sweep, search) => panic!(
                    "round {round}: sweep and search disagree \
                     (sweep found one: {}, search found one: {})",
                    sweep.is_some(),
                    search.is_some()
                ),
            }
        }
    }
    assert!(accepted >= 10, "only {accepted} accepting rounds; corpus too easy to reject");
    assert!(rejected >= 5, "only {rejected} rejecting rounds; corpus too easy to accept");
}

#[test]
fn parallel_and_sequential_searches_return_identical_results() {
    for round in 0..40u64 {
        let cfg = GeneratorConfig::new(3, 5);
        let g = random_game(&cfg, &mut corpus_rng(0xA11E + round));
        let tight = ThresholdQuery::new(
            vec![rat(1, 4); g.players()],
            vec![Rational::one(); g.players()],
        )
        .expect("a valid box");
        for q in [ThresholdQuery::unconstrained(g.players()), tight] {
            let a = solve_posne(&g, 0, &q, DEFAULT_PROFILE_CAP).expect("search runs");
            let b = solve_posne_sequential(&g, 0, &q, DEFAULT_PROFILE_CAP).expect("search runs");
            assert_eq!(a, b, "round {round}: thread count changed the answer");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Acceptance only tightens when the box does: any box containing the
    /// realised payoff yields the same verdict as the unconstrained one,
    /// because the no-regret half of the check ignores the box entirely.
    #[test]
    fn widening_the_box_never_flips_an_accept(
        seed in 0u64..4000,
        pick in 0usize..64,
        lo in 0u64..=4,
        hi in 0u64..=4,
        players in 1usize..4,
    ) {
        let cfg = GeneratorConfig::new(players, 4);
        let g = random_game(&cfg, &mut corpus_rng(seed));
        let profiles = enumerate_positional_profiles(&g);
        let p = &profiles[pick % profiles.len()];

        let free = ThresholdQuery::unconstrained(g.players());
        let base = certify_positional(&g, 0, p, &free).expect("certifiable profile");
        prop_assert!(base.consistent(&free));

        // The tightest box around the payoff, then one widened on both
        // sides by the sampled fractions of the available slack.
        let z = base.payoff.clone();
        let tight = ThresholdQuery::exact(z.clone()).expect("payoffs are in [0, 1]");
        let mins = z.iter().map(|zi| zi * rat(lo as i64, 4)).collect();
        let maxs = z
            .iter()
            .map(|zi| zi + (Rational::one() - zi) * rat(hi as i64, 4))
            .collect();
        let wide = ThresholdQuery::new(mins, maxs).expect("a valid box");
        prop_assert!(tight.within(&wide));

        for q in [&tight, &wide] {
            let cert = certify_positional(&g, 0, p, q).expect("certifiable profile");
            prop_assert_eq!(cert.accepted, base.accepted);
            prop_assert!(cert.consistent(q));
        }

        // A box that the payoff misses must reject and say why.
        if z[0] < Rational::one() {
            let mut mins = vec![Rational::zero(); g.players()];
            mins[0] = (&z[0] + Rational::one()) / rat(2, 1);
            let above = ThresholdQuery::new(mins, vec![Rational::one(); g.players()])
                .expect("a valid box");
            let cert = certify_positional(&g, 0, p, &above).expect("certifiable profile");
            prop_assert!(!cert.accepted);
            prop_assert!(cert.consistent(&above));
        }
    }

    /// Every certificate, for pure and mixed profiles alike, must be
    /// re-derivable from the numbers it echoes.
    #[test]
    fn verdicts_follow_from_the_echoed_numbers(seed in 0u64..4000, vertices in 2usize..6) {
        let cfg = GeneratorConfig::new(2, vertices);
        let g = random_game(&cfg, &mut corpus_rng(seed));
        let q = ThresholdQuery::new(
            vec![rat(1, 8); g.players()],
            vec![rat(7, 8); g.players()],
        ).expect("a valid box");

        let uniform = certify_stationary(&g, 0, &StationaryProfile::uniform(&g), &q)
            .expect("certifiable profile");
        prop_assert!(uniform.consistent(&q));

        let p = enumerate_positional_profiles(&g).into_iter().next().expect("non-empty");
        let pure = certify_positional(&g, 0, &p, &q).expect("certifiable profile");
        prop_assert!(pure.consistent(&q));
    }
}

#[test]
fn certified_binary_positional_payoffs_are_qualitative_instances() {
    let mut confirmed = 0;
    let mut seed = 0u64;
    while confirmed < 25 && seed < 400 {
        let cfg = GeneratorConfig::new(2, 5).with_kinds(&[ObjectiveKind::Parity]);
        let g = random_game(&cfg, &mut corpus_rng(0xB1A5 + seed));
        seed += 1;
        let free = ThresholdQuery::unconstrained(g.players());
        for p in enumerate_positional_profiles(&g).into_iter().take(64) {
            let cert = certify_positional(&g, 0, &p, &free).expect("certifiable profile");
            let binary: Option<Vec<bool>> = cert
                .payoff
                .iter()
                .map(|z| {
                    if z.is_one() {
                        Some(true)
                    } else if z.is_zero() {
                        Some(false)
                    } else {
                        None
                    }
                })
                .collect();
            let (Some(bits), true) = (binary, cert.accepted) else { continue };
            let x = BinaryPayoff::new(bits);
            let (holds, witness) = solve_qualne(&g, 0, &x).expect("decider runs");
            assert!(
                holds,
                "seed {seed}: profile {:?} certifies payoff {:?} but the \
                 qualitative decider denies it",
                p.choices, cert.payoff
            );
            assert!(witness.is_some(), "a positive answer must carry a witness");
            confirmed += 1;
            if confirmed >= 25 {
                break;
            }
        }
    }
    assert!(confirmed >= 25, "only {confirmed} binary equilibria found; widen the corpus");
}
