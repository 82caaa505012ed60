//! End-to-end checks of the coalition analysis pipeline over real games:
//! fixed examples, enumeration oracles, punishment soundness on product
//! processes, determinacy under objective complementation, and extensional
//! acceptance equivalence of the parity reduction.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use game_core::game::{coalition_view, Objective, PlayerId, Smg, VertexId};
use game_core::generator::{corpus_rng, random_game, GeneratorConfig, ObjectiveKind};
use game_core::rational::Rational;
use num::{One, Zero};
use objectives::limit_sets::{accepts_limit_set, complement_objective};
use prob_solvers::chain::{induce_markov_chain, mc_omega_payoff_all_states};
use prob_solvers::mdp::{induce_mdp, mdp_omega_value};
use prob_solvers::oracle::enumerate_positional_profiles;
use prob_solvers::profiles::StationaryProfile;
use rand::seq::SliceRandom;
use zerosum::{
    coalition_analysis, positive_value_set, qualitative_parity_solve, to_parity,
    FiniteStateStrategy,
};

// ---------------------------------------------------------------------------
// Fixed examples
// ---------------------------------------------------------------------------

#[test]
fn g1_single_player_wins_surely() {
    let g = game_core::fixtures::g1();
    let sol = qualitative_parity_solve(&to_parity(&coalition_view(&g, 0).unwrap()));
    assert_eq!(sol.positive, [0].into_iter().collect());
    assert_eq!(sol.almost_sure, [0].into_iter().collect());
    assert_eq!(positive_value_set(&g, 0).unwrap(), [0].into_iter().collect());
    // Single player: nobody is left to punish them.
    assert!(coalition_analysis(&g, 0).unwrap().punishment.is_empty());
}

#[test]
fn g2_coin_flip_is_positive_but_not_almost_sure() {
    // Vertex ids: a = 0, b = 1, v0 = 2; Büchi {a}; v0 flips a fair coin.
    let g = game_core::fixtures::g2();
    let sol = qualitative_parity_solve(&to_parity(&coalition_view(&g, 0).unwrap()));
    assert_eq!(sol.positive, [0, 2].into_iter().collect());
    assert_eq!(sol.almost_sure, [0].into_iter().collect());
}

#[test]
fn empty_muller_family_has_empty_positive_set() {
    let g = Smg::from_parts(
        1,
        vec![("a".into(), Some(0)), ("b".into(), Some(0))],
        vec![(0, 1, None), (1, 0, None)],
        vec![Objective::Muller(BTreeSet::new())],
    )
    .unwrap();
    assert!(positive_value_set(&g, 0).unwrap().is_empty());
}

// ---------------------------------------------------------------------------
// Enumeration oracle: pipeline vs positional max-min over exact chain payoffs
// ---------------------------------------------------------------------------

/// Exact qualitative sets for `player` by enumerating positional profiles:
/// the player fixes their vertices, all other choices range adversarially,
/// and each fixed pair is evaluated exactly on the induced chain.
///
/// Valid whenever `player` has a positional optimal strategy (parity — so
/// also Büchi/co-Büchi — and the Rabin side), because against a fixed
/// positional protagonist the adversary also has a positional best response.
fn enumeration_sets(g: &Smg, player: PlayerId) -> (BTreeSet<VertexId>, BTreeSet<VertexId>) {
    let n = g.vertex_count();
    let mut by_own_part: BTreeMap<Vec<(VertexId, VertexId)>, Vec<Rational>> = BTreeMap::new();
    for profile in enumerate_positional_profiles(g) {
        let chain = induce_markov_chain(g, &profile.to_stationary()).unwrap();
        let payoff = &mc_omega_payoff_all_states(&chain, g.objectives()).unwrap()[player];
        let key: Vec<(VertexId, VertexId)> = profile
            .choices
            .iter()
            .filter(|(&v, _)| g.owner(v) == Some(player))
            .map(|(&v, &w)| (v, w))
            .collect();
        by_own_part
            .entry(key)
            .and_modify(|worst| {
                for v in 0..n {
                    if payoff[v] < worst[v] {
                        worst[v] = payoff[v].clone();
                    }
                }
            })
            .or_insert_with(|| payoff.clone());
    }
    let mut positive = BTreeSet::new();
    let mut almost = BTreeSet::new();
    for worst in by_own_part.values() {
        for v in 0..n {
            if worst[v] > Rational::zero() {
                positive.insert(v);
            }
            if worst[v].is_one() {
                almost.insert(v);
            }
        }
    }
    (positive, almost)
}

#[test]
fn pipeline_matches_positional_enumeration() {
    let mut rng = corpus_rng(0x2e05_0a11);
    let kinds = [ObjectiveKind::Parity, ObjectiveKind::Buchi, ObjectiveKind::CoBuchi];
    for round in 0..60 {
        let mut cfg = GeneratorConfig::new(2, 2 + round % 5);
        cfg.max_successors = 2;
        cfg.kinds = vec![kinds[round % kinds.len()]];
        let g = random_game(&cfg, &mut rng);
        for player in 0..g.players() {
            let sol = qualitative_parity_solve(&to_parity(&coalition_view(&g, player).unwrap()));
            let (oracle_pos, oracle_as) = enumeration_sets(&g, player);
            assert_eq!(sol.positive, oracle_pos, "positive set, player {player}, {g:?}");
            assert_eq!(sol.almost_sure, oracle_as, "almost-sure set, player {player}, {g:?}");
        }
    }
}

#[test]
fn pipeline_matches_positional_enumeration_on_rabin_protagonists() {
    let mut rng = corpus_rng(0x2e05_0a12);
    for round in 0..40 {
        let mut cfg = GeneratorConfig::new(2, 2 + round % 4);
        cfg.max_successors = 2;
        cfg.kinds = vec![ObjectiveKind::Rabin];
        cfg.max_pairs = 2;
        let g = random_game(&cfg, &mut rng);
        for player in 0..g.players() {
            if !matches!(g.objective(player), Objective::Rabin(_)) {
                continue;
            }
            let sol = qualitative_parity_solve(&to_parity(&coalition_view(&g, player).unwrap()));
            let (oracle_pos, oracle_as) = enumeration_sets(&g, player);
            assert_eq!(sol.positive, oracle_pos, "positive set, player {player}, {g:?}");
            assert_eq!(sol.almost_sure, oracle_as, "almost-sure set, player {player}, {g:?}");
        }
    }
}

// ---------------------------------------------------------------------------
// Punishment soundness: best response against the family is 0 exactly on
// the complement of the positive set
// ---------------------------------------------------------------------------

/// Composes `g` with the punishment family against `player` into a game
/// whose only real decisions belong to `player`; every other owned vertex
/// is frozen to the family's (pure) choice. States are (vertex, memory)
/// pairs of the shared strategy automaton, and the objective is `player`'s
/// objective lifted through the projection.
fn compose_with_family(
    g: &Smg,
    player: PlayerId,
    family: &BTreeMap<PlayerId, FiniteStateStrategy>,
) -> (Smg, StationaryProfile, usize) {
    let shape = family.values().next();
    let memory = shape.map_or(1, |s| s.memory_count);
    let initial = shape.map_or(0, |s| s.initial_memory);
    for s in family.values() {
        assert_eq!(s.memory_count, memory, "family shares one automaton");
        assert_eq!(s.initial_memory, initial, "family shares one automaton");
    }
    let n = g.vertex_count();
    let state = |v: VertexId, m: usize| v * memory + m;
    let next_memory = |v: VertexId, m: usize| -> usize {
        shape.map_or(0, |s| s.update[m][v])
    };

    let mut vertices = Vec::with_capacity(n * memory);
    for v in 0..n {
        for m in 0..memory {
            let owner = match g.owner(v) {
                Some(p) if p == player => Some(0),
                Some(_) => Some(1),
                None => None,
            };
            vertices.push((format!("s{v:03}m{m:03}"), owner));
        }
    }
    let mut edges = Vec::new();
    let mut frozen_rows: BTreeMap<VertexId, Vec<(VertexId, Rational)>> = BTreeMap::new();
    for v in 0..n {
        for m in 0..memory {
            let m2 = next_memory(v, m);
            match g.owner(v) {
                Some(p) if p == player => {
                    for w in g.succ_ids(v) {
                        edges.push((state(v, m), state(w, m2), None));
                    }
                }
                Some(p) => {
                    let w = family[&p].pure_choice(m, v).expect("family strategies are pure");
                    edges.push((state(v, m), state(w, m2), None));
                    frozen_rows.insert(state(v, m), vec![(state(w, m2), Rational::one())]);
                }
                None => {
                    for (w, pr) in g.successors(v) {
                        edges.push((state(v, m), state(*w, m2), pr.clone()));
                    }
                }
            }
        }
    }

    let lift_set = |s: &BTreeSet<VertexId>| -> BTreeSet<VertexId> {
        s.iter().flat_map(|&v| (0..memory).map(move |m| state(v, m))).collect()
    };
    let lifted = match g.objective(player) {
        Objective::Buchi(f) => Objective::Buchi(lift_set(f)),
        Objective::CoBuchi(f) => Objective::CoBuchi(lift_set(f)),
        Objective::Parity(p) => {
            let mut out = vec![0; n * memory];
            for v in 0..n {
                for m in 0..memory {
                    out[state(v, m)] = p[v];
                }
            }
            Objective::Parity(out)
        }
        Objective::Streett(pairs) => Objective::Streett(
            pairs
                .iter()
                .map(|p| game_core::game::RabinPair::new(lift_set(&p.fst), lift_set(&p.snd)))
                .collect(),
        ),
        Objective::Rabin(pairs) => Objective::Rabin(
            pairs
                .iter()
                .map(|p| game_core::game::RabinPair::new(lift_set(&p.fst), lift_set(&p.snd)))
                .collect(),
        ),
        Objective::Muller(_) => panic!("muller objectives are not set-liftable"),
    };

    let composed = Smg::from_parts(
        2,
        vertices,
        edges,
        vec![lifted.clone(), lifted],
    )
    .expect("composition is a valid game");
    (composed, StationaryProfile { rows: frozen_rows }, initial)
}

#[test]
fn punishment_family_pins_best_response_to_zero_exactly_off_the_positive_set() {
    let mut rng = corpus_rng(0x9ca1_ab1e);
    let kinds = [
        ObjectiveKind::Buchi,
        ObjectiveKind::CoBuchi,
        ObjectiveKind::Parity,
        ObjectiveKind::Rabin,
        ObjectiveKind::Streett,
    ];
    for round in 0..40 {
        let mut cfg = GeneratorConfig::new(2 + round % 2, 2 + round % 4);
        cfg.max_successors = 2;
        cfg.kinds = vec![kinds[round % kinds.len()]];
        cfg.max_pairs = 2;
        let g = random_game(&cfg, &mut rng);
        for player in 0..g.players() {
            let analysis = coalition_analysis(&g, player).unwrap();
            for s in analysis.punishment.values() {
                s.validate(&g).expect("punishment strategies are well-formed");
                assert!(s.is_pure());
            }
            let coalition_owns_everything_needed = (0..g.vertex_count())
                .all(|v| g.owner(v).is_none_or(|p| p == player || analysis.punishment.contains_key(&p)));
            assert!(coalition_owns_everything_needed);

            let (composed, frozen, initial) = compose_with_family(&g, player, &analysis.punishment);
            let mdp = induce_mdp(&composed, &frozen, 0).unwrap();
            let outcome = mdp_omega_value(&mdp, composed.objective(0)).unwrap();
            let memory = composed.vertex_count() / g.vertex_count();
            for v in 0..g.vertex_count() {
                let value = &outcome.values[v * memory + initial];
                assert_eq!(
                    value.is_zero(),
                    !analysis.positive.contains(&v),
                    "best response at {v} is {value}, positive set {:?}, game {g:?}",
                    analysis.positive
                );
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Determinacy under complementation: the protagonist wins almost surely
// exactly where a merged adversary with the complemented objective lacks
// positive value
// ---------------------------------------------------------------------------

#[test]
fn almost_sure_set_complements_the_merged_adversarys_positive_set() {
    let mut rng = corpus_rng(0xd0a1_17e5);
    for round in 0..60 {
        let mut cfg = GeneratorConfig::new(2, 2 + round % 4);
        cfg.max_successors = 2;
        cfg.kinds = vec![ObjectiveKind::ALL[round % 6]];
        cfg.max_pairs = 2;
        let g = random_game(&cfg, &mut rng);
        let n = g.vertex_count();
        for player in 0..g.players() {
            let sol = qualitative_parity_solve(&to_parity(&coalition_view(&g, player).unwrap()));
            let complemented = complement_objective(g.objective(player), n).unwrap();
            // Merge everyone else into player 0 of a fresh two-player game
            // chasing the complement; `player` becomes its player 1.
            let vertices: Vec<(String, Option<PlayerId>)> = (0..n)
                .map(|v| {
                    let owner = match g.owner(v) {
                        Some(p) if p == player => Some(1),
                        Some(_) => Some(0),
                        None => None,
                    };
                    (g.name(v).to_string(), owner)
                })
                .collect();
            let mut edges = Vec::new();
            for v in 0..n {
                for (w, pr) in g.successors(v) {
                    edges.push((v, *w, pr.clone()));
                }
            }
            let merged = Smg::from_parts(
                2,
                vertices,
                edges,
                vec![complemented, g.objective(player).clone()],
            )
            .unwrap();
            let adversary_positive = positive_value_set(&merged, 0).unwrap();
            let expected: BTreeSet<VertexId> =
                (0..n).filter(|v| !sol.almost_sure.contains(v)).collect();
            assert_eq!(
                adversary_positive, expected,
                "duality breach for player {player} on {g:?}"
            );
        }
    }
}

// ---------------------------------------------------------------------------
// Acceptance equivalence of the reduction, checked on every realizable
// limit set via closed walks
// ---------------------------------------------------------------------------

/// Non-empty vertex sets that are the limit set of some play: strongly
/// connected in the induced subgraph, every member keeping a successor
/// inside.
fn realizable_limit_sets(g: &Smg) -> Vec<BTreeSet<VertexId>> {
    let n = g.vertex_count();
    assert!(n <= 16);
    let mut out = Vec::new();
    'mask: for mask in 1u32..(1 << n) {
        let l: BTreeSet<VertexId> = (0..n).filter(|v| mask & (1 << v) != 0).collect();
        for &v in &l {
            if !g.succ_ids(v).any(|w| l.contains(&w)) {
                continue 'mask;
            }
        }
        let start = *l.first().unwrap();
        let forward = reach_within(g, &l, start, false);
        let backward = reach_within(g, &l, start, true);
        if forward == l && backward == l {
            out.push(l);
        }
    }
    out
}

fn reach_within(g: &Smg, l: &BTreeSet<VertexId>, start: VertexId, reverse: bool) -> BTreeSet<VertexId> {
    let mut seen: BTreeSet<VertexId> = [start].into_iter().collect();
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in l {
            let edge = if reverse {
                g.succ_ids(w).any(|x| x == v)
            } else {
                g.succ_ids(v).any(|x| x == w)
            };
            if edge && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen
}

/// A closed walk inside `l` visiting all of it, as a cyclic vertex sequence.
fn closed_walk(g: &Smg, l: &BTreeSet<VertexId>, order: &[VertexId]) -> Vec<VertexId> {
    let mut walk = vec![order[0]];
    let mut cur = order[0];
    for &target in order[1..].iter().chain(std::iter::once(&order[0])) {
        for step in path_within(g, l, cur, target) {
            walk.push(step);
        }
        cur = target;
    }
    walk.pop();
    walk
}

/// Shortest non-empty path `from → to` staying in `l`, excluding `from`.
fn path_within(g: &Smg, l: &BTreeSet<VertexId>, from: VertexId, to: VertexId) -> Vec<VertexId> {
    let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut queue: Vec<VertexId> = Vec::new();
    for w in g.succ_ids(from).filter(|w| l.contains(w)) {
        if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(w) {
            e.insert(from);
            queue.push(w);
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        if v == to {
            break;
        }
        for w in g.succ_ids(v).filter(|w| l.contains(w)) {
            if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(w) {
                e.insert(v);
                queue.push(w);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from || path.len() == 1 && parent[&cur] != from {
        cur = parent[&cur];
        if cur == from {
            break;
        }
        path.push(cur);
    }
    path.reverse();
    path
}

/// Follows the walk through the product until the (position, state) pair
/// repeats; returns the least priority on the resulting cycle.
fn walk_min_priority(pg: &zerosum::LarProduct, walk: &[VertexId]) -> u32 {
    let len = walk.len();
    let mut state = pg.initial_state(walk[0]);
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut trail: Vec<usize> = Vec::new();
    let mut pos = 0usize;
    loop {
        if let Some(&first) = seen.get(&(pos, state)) {
            return trail[first..].iter().map(|&s| pg.priority(s)).min().unwrap();
        }
        seen.insert((pos, state), trail.len());
        trail.push(state);
        let next_vertex = walk[(pos + 1) % len];
        state = pg
            .arena()
            .successors(state)
            .iter()
            .copied()
            .find(|&t| pg.project(t).0 == next_vertex)
            .expect("walk follows game edges");
        pos = (pos + 1) % len;
    }
}

#[test]
fn product_priorities_decide_exactly_like_the_objective_on_every_limit_set() {
    let mut rng = corpus_rng(0x11a2_ca11);
    for round in 0..90 {
        let mut cfg = GeneratorConfig::new(2, 2 + round % 5);
        cfg.max_successors = 3;
        cfg.kinds = vec![ObjectiveKind::ALL[round % 6]];
        cfg.max_pairs = 3;
        let g = random_game(&cfg, &mut rng);
        for player in 0..g.players() {
            let objective = g.objective(player).clone();
            let pg = to_parity(&coalition_view(&g, player).unwrap());
            for l in realizable_limit_sets(&g) {
                let expected = accepts_limit_set(&objective, &l);
                let mut order: Vec<VertexId> = l.iter().copied().collect();
                for variant in 0..3 {
                    if variant > 0 {
                        order.shuffle(&mut rng);
                    }
                    let walk = closed_walk(&g, &l, &order);
                    let got = walk_min_priority(&pg, &walk) % 2 == 0;
                    assert_eq!(
                        got, expected,
                        "limit set {l:?} via walk {walk:?} on {objective:?}"
                    );
                }
            }
        }
    }
}
