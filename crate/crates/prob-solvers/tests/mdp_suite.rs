//! One-player optimisation: policy iteration against exhaustive policy
//! enumeration, long-run optima against the same, and the graph-based
//! almost-sure set against exact values.

use std::collections::BTreeSet;

use game_core::fixtures::g2_with_choice;
use game_core::game::{Objective, Smg};
use game_core::generator::{corpus_rng, random_game, GeneratorConfig, ObjectiveKind};
use game_core::rational::{rat, Rational};
use num::{One, Zero};
use prob_solvers::{
    almost_sure_reach_set, enumerate_omega_values, enumerate_reach_values, induce_mdp,
    mdp_max_reach_value, mdp_omega_value, ChainState, Mdp, StationaryProfile,
};

fn set(ids: &[usize]) -> BTreeSet<usize> {
    ids.iter().copied().collect()
}

fn solo_mdp(g: &Smg) -> Mdp {
    assert_eq!(g.players(), 1);
    let origin = g.vertices().map(ChainState::plain).collect();
    Mdp::new(g.clone(), origin).expect("one player")
}

/// In the choice fixture, picking the coin flip is strictly better than
/// the losing sink: value(c) = 1/2.
#[test]
fn choice_vertex_prefers_the_coin_flip() {
    let m = solo_mdp(&g2_with_choice());
    // a = 0, b = 1, c = 2, v0 = 3.
    let (values, policy) = mdp_max_reach_value(&m, &set(&[0])).expect("solvable");
    assert_eq!(values, vec![Rational::one(), Rational::zero(), rat(1, 2), rat(1, 2)]);
    assert_eq!(policy.choices[&2], 3, "c must move to the coin flip");
}

#[test]
fn freezing_the_other_players_makes_their_vertices_stochastic() {
    // Two players: vertex u belongs to player 1 and mixes; vertex c
    // belongs to player 0 and stays free.
    let g = Smg::from_parts(
        2,
        vec![
            ("a".to_owned(), Some(0)),
            ("b".to_owned(), Some(0)),
            ("c".to_owned(), Some(0)),
            ("u".to_owned(), Some(1)),
        ],
        vec![(0, 0, None), (1, 1, None), (2, 3, None), (2, 1, None), (3, 0, None), (3, 1, None)],
        vec![Objective::Buchi([0].into()), Objective::Buchi([1].into())],
    )
    .expect("valid game");
    let profile = StationaryProfile {
        rows: [(3usize, vec![(0usize, rat(1, 3)), (1usize, rat(2, 3))])].into_iter().collect(),
    };
    let m = induce_mdp(&g, &profile, 0).expect("induced");
    assert!(m.game().is_stochastic(3), "frozen vertex becomes chance");
    assert_eq!(m.game().prob(3, 0), Some(&rat(1, 3)));
    assert_eq!(m.game().owner(2), Some(0), "free player keeps the choice");
    let (values, _) = mdp_max_reach_value(&m, &set(&[0])).expect("solvable");
    assert_eq!(values[2], rat(1, 3), "c heads to u, which yields a with 1/3");
}

#[test]
fn induce_mdp_rejects_gaps_and_ignores_rows_of_the_free_player() {
    let g = g2_with_choice().with_ownership(
        2,
        vec![Some(0), Some(0), Some(1), None],
        vec![Objective::Buchi([0].into()), Objective::Buchi([1].into())],
    );
    // Covers only the free player's vertex: the frozen side is missing.
    let only_free = StationaryProfile {
        rows: [(2usize, vec![(3usize, Rational::one())])].into_iter().collect(),
    };
    assert!(induce_mdp(&g, &only_free, 1).is_err());
    // Covers everything: the row at the free vertex c is simply ignored.
    let full = StationaryProfile {
        rows: [
            (0usize, vec![(0usize, Rational::one())]),
            (1, vec![(1, Rational::one())]),
            (2, vec![(1, Rational::one())]),
        ]
        .into_iter()
        .collect(),
    };
    let m = induce_mdp(&g, &full, 1).expect("induced");
    assert_eq!(m.game().owner(2), Some(0));
    assert_eq!(m.game().succ_ids(2).collect::<Vec<_>>(), vec![1, 3], "choices survive");
}

fn mdp_corpus(games: usize, seed_base: u64, kinds: &[ObjectiveKind]) -> Vec<Mdp> {
    (0..games)
        .map(|k| {
            let cfg = GeneratorConfig::new(1, 6).with_kinds(kinds);
            let g = random_game(&cfg, &mut corpus_rng(seed_base + k as u64));
            solo_mdp(&g)
        })
        .collect()
}

/// Policy iteration must agree exactly with trying every positional
/// policy, on every state.
#[test]
fn policy_iteration_matches_exhaustive_enumeration() {
    for (k, m) in mdp_corpus(60, 21_000, &[ObjectiveKind::Buchi]).into_iter().enumerate() {
        let mut rng = corpus_rng(22_000 + k as u64);
        use rand::Rng;
        let target: BTreeSet<usize> =
            m.game().vertices().filter(|_| rng.gen_bool(0.3)).collect();
        let (fast, policy) = mdp_max_reach_value(&m, &target).expect("solvable");
        let slow = enumerate_reach_values(&m, &target).expect("solvable");
        assert_eq!(fast, slow, "corpus element {k} disagrees");
        // The returned policy attains the optimum everywhere at once.
        let chain = m.chain_under(&policy).expect("chain");
        let attained =
            prob_solvers::reach_probabilities_exact(&chain, &target).expect("solvable");
        assert_eq!(attained, slow, "the witness policy of element {k} is suboptimal");
    }
}

/// Long-run optima for classes where a positional policy is optimal
/// (reachability-style, parity, and Rabin-like acceptance) must agree
/// with brute force over positional policies.
#[test]
fn long_run_optimum_matches_positional_enumeration() {
    let kinds = [ObjectiveKind::Parity, ObjectiveKind::Buchi, ObjectiveKind::CoBuchi, ObjectiveKind::Rabin];
    for (k, m) in mdp_corpus(80, 23_000, &kinds).into_iter().enumerate() {
        let o = m.game().objective(0).clone();
        let outcome = mdp_omega_value(&m, &o).expect("solvable");
        let slow = enumerate_omega_values(&m, &o).expect("solvable");
        assert_eq!(outcome.values, slow, "corpus element {k} disagrees");
        // The reach policy realises the optimum: its chain already gets
        // the target union with the optimal probability.
        let chain = m.chain_under(&outcome.reach_policy).expect("chain");
        let reach = prob_solvers::reach_probabilities_exact(&chain, &outcome.target.vertices)
            .expect("solvable");
        assert_eq!(reach, outcome.values, "reach policy of element {k} is suboptimal");
    }
}

/// An empty acceptance family can never be a limit set, so the optimum is
/// zero everywhere.
#[test]
fn unsatisfiable_family_has_value_zero() {
    let m = solo_mdp(&g2_with_choice().with_objectives(vec![Objective::Muller(BTreeSet::new())]));
    let outcome = mdp_omega_value(&m, &Objective::Muller(BTreeSet::new())).expect("solvable");
    assert!(outcome.values.iter().all(|v| v.is_zero()));
    assert!(outcome.target.vertices.is_empty());
}

/// The graph-based almost-sure set must coincide with the states of exact
/// value one.
#[test]
fn almost_sure_set_is_exactly_the_value_one_region() {
    for (k, m) in mdp_corpus(60, 25_000, &[ObjectiveKind::Buchi]).into_iter().enumerate() {
        let mut rng = corpus_rng(26_000 + k as u64);
        use rand::Rng;
        let target: BTreeSet<usize> =
            m.game().vertices().filter(|_| rng.gen_bool(0.4)).collect();
        let sure = almost_sure_reach_set(&m, &target);
        let (values, _) = mdp_max_reach_value(&m, &target).expect("solvable");
        let by_value: BTreeSet<usize> =
            m.game().vertices().filter(|&v| values[v].is_one()).collect();
        assert_eq!(sure, by_value, "corpus element {k} disagrees");
    }
}
