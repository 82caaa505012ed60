//! The payoff-union engines against the subset-enumeration oracle.

use std::collections::BTreeSet;

use game_core::game::{Objective, RabinPair, Smg};
use game_core::generator::{corpus_rng, random_game, GeneratorConfig, ObjectiveKind};
use objectives::oracle::payoff_union_brute_force;
use objectives::{ec_has_payoff, generic_ec_union, rabin_ec, streett_ec, BinaryPayoff};
use proptest::prelude::*;
use rand::Rng;

/// Complete digraph (no self-loops) on four vertices with two Streett
/// pairs. The losing demand is realised by many overlapping components —
/// {a, b, c} violates the second pair, {a, c} violates both — so a
/// single-pass subtraction would miss vertices; the full union is V.
#[test]
fn overlapping_violations_need_branching() {
    let names = ["a", "b", "c", "d"];
    let vertices = names.iter().map(|n| (n.to_string(), Some(0))).collect();
    let mut edges = Vec::new();
    for i in 0..4usize {
        for j in 0..4usize {
            if i != j {
                edges.push((i, j, None));
            }
        }
    }
    let pairs = vec![RabinPair::new([0], [1]), RabinPair::new([2], [3])];
    let g = Smg::from_parts(1, vertices, edges, vec![Objective::Streett(pairs)]).unwrap();
    let all: BTreeSet<usize> = g.vertices().collect();
    let x = BinaryPayoff::new(vec![false]);

    let union = streett_ec(&g, &x, &all);
    assert_eq!(union.vertices, all);
    assert_eq!(union.vertices, payoff_union_brute_force(&g, &x, &all));
    for w in &union.witnesses {
        assert!(ec_has_payoff(&g, w, &x));
    }
}

fn random_payoff(players: usize, rng: &mut rand_chacha::ChaCha8Rng) -> BinaryPayoff {
    BinaryPayoff::new((0..players).map(|_| rng.gen_bool(0.5)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn streett_engine_matches_brute_force(seed in 0u64..100_000, n in 1usize..8, players in 1usize..4) {
        let cfg = GeneratorConfig::new(players, n).with_kinds(&[ObjectiveKind::Streett]);
        let mut rng = corpus_rng(seed);
        let g = random_game(&cfg, &mut rng);
        let x = random_payoff(players, &mut rng);
        let u: BTreeSet<usize> = g.vertices().collect();
        let union = streett_ec(&g, &x, &u);
        prop_assert_eq!(&union.vertices, &payoff_union_brute_force(&g, &x, &u),
            "seed {} payoff {}", seed, x);
        let covered: BTreeSet<usize> =
            union.witnesses.iter().flat_map(|w| w.vertices().iter().copied()).collect();
        prop_assert_eq!(&covered, &union.vertices);
        for w in &union.witnesses {
            prop_assert!(ec_has_payoff(&g, w, &x));
        }
    }

    #[test]
    fn rabin_engine_matches_brute_force(seed in 0u64..100_000, n in 1usize..8, players in 1usize..4) {
        let cfg = GeneratorConfig::new(players, n).with_kinds(&[ObjectiveKind::Rabin]);
        let mut rng = corpus_rng(seed);
        let g = random_game(&cfg, &mut rng);
        let x = random_payoff(players, &mut rng);
        let u: BTreeSet<usize> = g.vertices().collect();
        let union = rabin_ec(&g, &x, &u);
        prop_assert_eq!(&union.vertices, &payoff_union_brute_force(&g, &x, &u),
            "seed {} payoff {}", seed, x);
        for w in &union.witnesses {
            prop_assert!(ec_has_payoff(&g, w, &x));
        }
    }

    #[test]
    fn generic_engine_matches_brute_force_on_mixed_games(
        seed in 0u64..100_000, n in 1usize..7, players in 1usize..4
    ) {
        let cfg = GeneratorConfig::new(players, n);
        let mut rng = corpus_rng(seed);
        let g = random_game(&cfg, &mut rng);
        let x = random_payoff(players, &mut rng);
        let u: BTreeSet<usize> = g.vertices().collect();
        let union = generic_ec_union(&g, &x, &u);
        prop_assert_eq!(&union.vertices, &payoff_union_brute_force(&g, &x, &u),
            "seed {} payoff {}", seed, x);
        for w in &union.witnesses {
            prop_assert!(ec_has_payoff(&g, w, &x));
        }
    }

    #[test]
    fn generic_engine_restricted_to_subsets(seed in 0u64..100_000, n in 2usize..7, mask in 1u32..128) {
        let cfg = GeneratorConfig::new(2, n);
        let mut rng = corpus_rng(seed);
        let g = random_game(&cfg, &mut rng);
        let x = random_payoff(2, &mut rng);
        let u: BTreeSet<usize> = g.vertices().filter(|v| mask & (1 << v) != 0).collect();
        let union = generic_ec_union(&g, &x, &u);
        prop_assert_eq!(&union.vertices, &payoff_union_brute_force(&g, &x, &u));
        prop_assert!(union.vertices.is_subset(&u));
    }
}

#[test]
#[should_panic(expected = "requires Streett")]
fn streett_engine_rejects_other_kinds() {
    let g = game_core::fixtures::g1();
    let all: BTreeSet<usize> = g.vertices().collect();
    streett_ec(&g, &BinaryPayoff::new(vec![true]), &all);
}
