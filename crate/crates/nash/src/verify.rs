//! Judging claimed finite-state equilibria, trusting only the game.
//!
//! The claimed payoff is recomputed exactly on the product of the game
//! with every automaton. Each player's incentive to deviate is bounded by
//! the exact optimum of the product decision process in which that player
//! moves freely while everyone else's automaton stays frozen — the
//! strongest possible deviation, so acceptance really certifies a Nash
//! equilibrium among all strategies, not merely among finite-state ones.

use std::collections::{BTreeMap, BTreeSet};

use game_core::game::{GameError, Objective, PlayerId, RabinPair, Smg, VertexId};
use game_core::rational::Rational;
use num::{One, Zero};
use objectives::{generic_ec_union, maximal_end_components, BinaryPayoff};
use prob_solvers::{
    almost_sure_reach_set, mc_omega_payoff, mdp_max_reach_value, ChainState, MarkovChain, Mdp,
};
use zerosum::FiniteStateStrategy;

use crate::types::{Certificate, EquilibriumWitness, NashError, ThresholdQuery};

/// Hard cap on explored product states (game vertices × joint memory).
pub const VERIFY_PRODUCT_LIMIT: usize = 1 << 21;

/// Read-side view of a sub-tuple of the players' memories, packed into a
/// single index. Automata with identical structure (the shape synthesis
/// produces) collapse to one copy; otherwise the tuple is mixed-radix.
struct MemoryLens<'a> {
    strategies: &'a [FiniteStateStrategy],
    members: Vec<usize>,
    shared: bool,
    strides: Vec<usize>,
}

impl<'a> MemoryLens<'a> {
    fn new(
        strategies: &'a [FiniteStateStrategy],
        skip: Option<PlayerId>,
    ) -> Result<Self, NashError> {
        let members: Vec<usize> = (0..strategies.len()).filter(|&j| Some(j) != skip).collect();
        if members.is_empty() {
            return Ok(MemoryLens { strategies, members, shared: true, strides: vec![] });
        }
        let shared = members.windows(2).all(|w| {
            let (a, b) = (&strategies[w[0]], &strategies[w[1]]);
            a.memory_count == b.memory_count
                && a.initial_memory == b.initial_memory
                && a.update == b.update
        });
        if shared {
            return Ok(MemoryLens { strategies, members, shared, strides: vec![] });
        }
        let mut strides = Vec::with_capacity(members.len());
        let mut total: usize = 1;
        for &j in &members {
            strides.push(total);
            total = total.checked_mul(strategies[j].memory_count).ok_or(
                NashError::ProductTooLarge { states: usize::MAX, cap: VERIFY_PRODUCT_LIMIT },
            )?;
        }
        Ok(MemoryLens { strategies, members, shared, strides })
    }

    fn initial(&self) -> usize {
        if self.members.is_empty() {
            return 0;
        }
        if self.shared {
            return self.strategies[self.members[0]].initial_memory;
        }
        self.members
            .iter()
            .zip(&self.strides)
            .map(|(&j, &s)| self.strategies[j].initial_memory * s)
            .sum()
    }

    /// Memory of tracked player `j` inside the packed index.
    fn memory_of(&self, packed: usize, j: PlayerId) -> usize {
        if self.shared {
            return packed;
        }
        let k = self.members.iter().position(|&x| x == j).expect("player is tracked");
        (packed / self.strides[k]) % self.strategies[j].memory_count
    }

    /// All tracked automata read `v` simultaneously.
    fn advance(&self, packed: usize, v: VertexId) -> usize {
        if self.members.is_empty() {
            return 0;
        }
        if self.shared {
            return self.strategies[self.members[0]].update[packed][v];
        }
        self.members
            .iter()
            .zip(&self.strides)
            .map(|(&j, &s)| {
                let m = (packed / s) % self.strategies[j].memory_count;
                self.strategies[j].update[m][v] * s
            })
            .sum()
    }
}

fn check_vertex(g: &Smg, v0: VertexId) -> Result<(), NashError> {
    if v0 >= g.vertex_count() {
        return Err(NashError::Game(GameError::UnknownVertex(format!("#{v0}"))));
    }
    Ok(())
}

/// The Markov chain the witness induces from `v0`: states are pairs of a
/// game vertex and the packed joint memory, state 0 is the start, and
/// every state's origin records its vertex and memory. Only reachable
/// states are materialised.
pub fn witness_product_chain(
    g: &Smg,
    v0: VertexId,
    w: &EquilibriumWitness,
) -> Result<MarkovChain, NashError> {
    w.validate(g)?;
    check_vertex(g, v0)?;
    let lens = MemoryLens::new(&w.strategies, None)?;
    let mut index: BTreeMap<(VertexId, usize), usize> = BTreeMap::new();
    let mut states: Vec<(VertexId, usize)> = vec![(v0, lens.initial())];
    index.insert(states[0], 0);
    let mut rows: Vec<Vec<(usize, Rational)>> = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let (v, m) = states[head];
        head += 1;
        let moves: Vec<(VertexId, Rational)> = match g.owner(v) {
            Some(j) => w.strategies[j].output[&(lens.memory_of(m, j), v)].clone(),
            None => g
                .successors(v)
                .iter()
                .map(|(t, p)| (*t, p.clone().expect("chance edges carry probabilities")))
                .collect(),
        };
        let m2 = lens.advance(m, v);
        let mut row = Vec::with_capacity(moves.len());
        for (t, p) in moves {
            let id = *index.entry((t, m2)).or_insert_with(|| {
                states.push((t, m2));
                states.len() - 1
            });
            row.push((id, p));
        }
        if states.len() > VERIFY_PRODUCT_LIMIT {
            return Err(NashError::ProductTooLarge {
                states: states.len(),
                cap: VERIFY_PRODUCT_LIMIT,
            });
        }
        rows.push(row);
    }
    let origins =
        states.iter().map(|&(vertex, memory)| ChainState { vertex, memory }).collect();
    MarkovChain::new(rows, origins).map_err(Into::into)
}

/// The decision process player `i` faces when deviating: everyone else's
/// automaton is frozen into chance. States pair a game vertex with the
/// packed memory of the others; `i`'s vertices stay controlled, the rest
/// become stochastic. State 0 is `(v0, initial memories)`.
fn response_product(
    g: &Smg,
    v0: VertexId,
    w: &EquilibriumWitness,
    i: PlayerId,
) -> Result<Mdp, NashError> {
    let lens = MemoryLens::new(&w.strategies, Some(i))?;
    let mut index: BTreeMap<(VertexId, usize), usize> = BTreeMap::new();
    let mut states: Vec<(VertexId, usize)> = vec![(v0, lens.initial())];
    index.insert(states[0], 0);
    let mut edges: Vec<(usize, usize, Option<Rational>)> = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let (v, m) = states[head];
        let here = head;
        head += 1;
        let m2 = lens.advance(m, v);
        let mut id_of = |t: VertexId, states: &mut Vec<(VertexId, usize)>| -> usize {
            *index.entry((t, m2)).or_insert_with(|| {
                states.push((t, m2));
                states.len() - 1
            })
        };
        match g.owner(v) {
            Some(j) if j == i => {
                for t in g.succ_ids(v) {
                    let id = id_of(t, &mut states);
                    edges.push((here, id, None));
                }
            }
            Some(j) => {
                // Mixed outputs may name a target twice; chance rows may not.
                let mut merged: BTreeMap<VertexId, Rational> = BTreeMap::new();
                for (t, p) in &w.strategies[j].output[&(lens.memory_of(m, j), v)] {
                    *merged.entry(*t).or_insert_with(Rational::zero) += p;
                }
                for (t, p) in merged {
                    let id = id_of(t, &mut states);
                    edges.push((here, id, Some(p)));
                }
            }
            None => {
                for (t, p) in g.successors(v) {
                    let id = id_of(*t, &mut states);
                    edges.push((here, id, p.clone()));
                }
            }
        }
        if states.len() > VERIFY_PRODUCT_LIMIT {
            return Err(NashError::ProductTooLarge {
                states: states.len(),
                cap: VERIFY_PRODUCT_LIMIT,
            });
        }
    }
    // Zero-padded decimal names keep construction order and id order equal.
    let vertices: Vec<(String, Option<PlayerId>)> = states
        .iter()
        .enumerate()
        .map(|(s, &(v, _))| {
            (format!("{s:08}"), if g.owner(v) == Some(i) { Some(0) } else { None })
        })
        .collect();
    let product = Smg::from_parts(1, vertices, edges, vec![Objective::Buchi(BTreeSet::new())])
        .map_err(|v| NashError::Game(GameError::Invalid(v)))?;
    let origins =
        states.iter().map(|&(vertex, memory)| ChainState { vertex, memory }).collect();
    Mdp::new(product, origins).map_err(Into::into)
}

/// `o` read on product states through their base vertex. Muller families
/// do not lift this way (membership is about exact limit sets, not
/// vertexwise); [`response_target`] handles them separately.
fn lift_objective(o: &Objective, origins: &[ChainState]) -> Objective {
    let lift = |set: &BTreeSet<VertexId>| -> BTreeSet<VertexId> {
        origins
            .iter()
            .enumerate()
            .filter(|(_, cs)| set.contains(&cs.vertex))
            .map(|(s, _)| s)
            .collect()
    };
    let lift_pairs = |pairs: &[RabinPair]| -> Vec<RabinPair> {
        pairs.iter().map(|p| RabinPair::new(lift(&p.fst), lift(&p.snd))).collect()
    };
    match o {
        Objective::Buchi(f) => Objective::Buchi(lift(f)),
        Objective::CoBuchi(f) => Objective::CoBuchi(lift(f)),
        Objective::Parity(prio) => {
            Objective::Parity(origins.iter().map(|cs| prio[cs.vertex]).collect())
        }
        Objective::Streett(pairs) => Objective::Streett(lift_pairs(pairs)),
        Objective::Rabin(pairs) => Objective::Rabin(lift_pairs(pairs)),
        Objective::Muller(_) => unreachable!("Muller families are handled by region refinement"),
    }
}

/// Product states from which the deviator can win with the limit set:
/// the union of end components whose runs satisfy the base objective.
fn response_target(product: &Smg, origins: &[ChainState], o: &Objective) -> BTreeSet<VertexId> {
    let everything: BTreeSet<VertexId> = product.vertices().collect();
    match o {
        Objective::Muller(family) => {
            // A component is winning exactly when its base projection is a
            // member set; every such component sits inside a maximal one
            // with the same exact projection, so refining per member set
            // finds them all.
            let mut target = BTreeSet::new();
            for f in family {
                let region: BTreeSet<VertexId> = product
                    .vertices()
                    .filter(|&s| f.contains(&origins[s].vertex))
                    .collect();
                for mec in maximal_end_components(product, &region) {
                    let proj: BTreeSet<VertexId> =
                        mec.vertices().iter().map(|&s| origins[s].vertex).collect();
                    if &proj == f {
                        target.extend(mec.vertices().iter().copied());
                    }
                }
            }
            target
        }
        _ => {
            let viewed = product.with_objectives(vec![lift_objective(o, origins)]);
            generic_ec_union(&viewed, &BinaryPayoff::new(vec![true]), &everything).vertices
        }
    }
}

fn graph_reaches(g: &Smg, from: VertexId, target: &BTreeSet<VertexId>) -> bool {
    let mut seen = BTreeSet::from([from]);
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if target.contains(&v) {
            return true;
        }
        for t in g.succ_ids(v) {
            if seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    false
}

/// Player `i`'s exact optimal payoff against the frozen co-profile.
fn best_response_value(
    g: &Smg,
    v0: VertexId,
    w: &EquilibriumWitness,
    i: PlayerId,
) -> Result<Rational, NashError> {
    let mdp = response_product(g, v0, w, i)?;
    let target = response_target(mdp.game(), mdp.origins(), g.objective(i));
    if target.is_empty() || !graph_reaches(mdp.game(), 0, &target) {
        return Ok(Rational::zero());
    }
    if almost_sure_reach_set(&mdp, &target).contains(&0) {
        return Ok(Rational::one());
    }
    let (values, _) = mdp_max_reach_value(&mdp, &target)?;
    Ok(values[0].clone())
}

/// Checks a claimed finite-state equilibrium from `v0`: recomputes the
/// exact payoff of the induced product chain and every player's exact
/// best-response value against the frozen others, then demands the
/// payoff to equal the claim and no player to gain by deviating. The
/// certificate carries all recomputed numbers and, on rejection, names
/// each improving player.
pub fn verify_finite_state_profile(
    g: &Smg,
    v0: VertexId,
    w: &EquilibriumWitness,
) -> Result<Certificate, NashError> {
    let chain = witness_product_chain(g, v0, w)?;
    let payoff = mc_omega_payoff(&chain, g.objectives(), 0)?;
    let mut best_response = Vec::with_capacity(g.players());
    for i in 0..g.players() {
        best_response.push(best_response_value(g, v0, w, i)?);
    }
    let q = ThresholdQuery::from_binary(&w.payoff);
    let claim: String =
        w.payoff.bits().iter().map(|&b| if b { '1' } else { '0' }).collect();
    let memory: Vec<String> =
        w.strategies.iter().map(|s| s.memory_count.to_string()).collect();
    let echo = format!(
        "witness[payoff={claim}, memory={}] from {}",
        memory.join(","),
        g.name(v0)
    );
    Ok(Certificate::from_values(payoff, best_response, &q, echo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qualne::solve_qualne;
    use crate::types::Reason;
    use game_core::fixtures::{g1, g2};
    use game_core::generator::{corpus_rng, random_game, GeneratorConfig, ObjectiveKind};

    fn two_sinks_game() -> Smg {
        // "v" (player 1) picks between absorbing "a" and "b"; player 0
        // is happy everywhere, player 1 only at "a".
        Smg::from_parts(
            2,
            vec![("a".into(), None), ("b".into(), None), ("v".into(), Some(1))],
            vec![
                (0, 0, Some(Rational::one())),
                (1, 1, Some(Rational::one())),
                (2, 0, None),
                (2, 1, None),
            ],
            vec![
                Objective::Buchi(BTreeSet::from([0, 1, 2])),
                Objective::Buchi(BTreeSet::from([0])),
            ],
        )
        .unwrap()
    }

    fn positional(memory_like: usize, choice_b: bool) -> FiniteStateStrategy {
        // Player 1's automaton; `memory_like` > 1 exercises the
        // mixed-radix lens with behaviourally equal duplicated states.
        let target = if choice_b { 1 } else { 0 };
        let update = (0..memory_like)
            .map(|m| vec![(m + 1) % memory_like; 3])
            .collect::<Vec<_>>();
        let output = (0..memory_like)
            .map(|m| ((m, 2), vec![(target, Rational::one())]))
            .collect();
        FiniteStateStrategy {
            memory_count: memory_like,
            initial_memory: 0,
            update,
            owned: BTreeSet::from([2]),
            output,
        }
    }

    fn empty_handed() -> FiniteStateStrategy {
        FiniteStateStrategy {
            memory_count: 1,
            initial_memory: 0,
            update: vec![vec![0, 0, 0]],
            owned: BTreeSet::new(),
            output: BTreeMap::new(),
        }
    }

    #[test]
    fn deviation_gains_are_reported_with_the_player_named() {
        let g = two_sinks_game();
        // Prescribing "b" while claiming player 1 is held to zero is not
        // an equilibrium: switching to "a" wins outright.
        let w = EquilibriumWitness {
            strategies: vec![empty_handed(), positional(1, true)],
            payoff: BinaryPayoff::new(vec![true, false]),
        };
        let cert = verify_finite_state_profile(&g, 2, &w).unwrap();
        assert_eq!(cert.payoff, vec![Rational::one(), Rational::zero()]);
        assert_eq!(cert.best_response[1], Rational::one());
        assert!(!cert.accepted);
        assert!(cert.reasons.iter().any(|r| matches!(
            r,
            Reason::BestResponseExceedsPayoff { player: 1, .. }
        )));
    }

    #[test]
    fn honest_choices_are_accepted() {
        let g = two_sinks_game();
        let w = EquilibriumWitness {
            strategies: vec![empty_handed(), positional(1, false)],
            payoff: BinaryPayoff::new(vec![true, true]),
        };
        let cert = verify_finite_state_profile(&g, 2, &w).unwrap();
        assert!(cert.accepted, "{:?}", cert.reasons);
        assert_eq!(cert.payoff, vec![Rational::one(), Rational::one()]);
    }

    #[test]
    fn unequal_memory_counts_take_the_mixed_radix_path() {
        let g = two_sinks_game();
        // Three behaviourally identical memory states against one: the
        // verdicts must not change.
        let w = EquilibriumWitness {
            strategies: vec![empty_handed(), positional(3, true)],
            payoff: BinaryPayoff::new(vec![true, false]),
        };
        let cert = verify_finite_state_profile(&g, 2, &w).unwrap();
        assert!(!cert.accepted);
        assert_eq!(cert.best_response[1], Rational::one());

        let chain = witness_product_chain(&g, 2, &w).unwrap();
        // (v, m0) → (b, m1) → (b, m2) → (b, m0) → …
        assert_eq!(chain.states(), 4);
    }

    #[test]
    fn claims_that_misstate_the_payoff_are_rejected() {
        let g = two_sinks_game();
        let w = EquilibriumWitness {
            strategies: vec![empty_handed(), positional(1, false)],
            payoff: BinaryPayoff::new(vec![true, false]),
        };
        let cert = verify_finite_state_profile(&g, 2, &w).unwrap();
        assert!(!cert.accepted);
        assert_eq!(cert.payoff[1], Rational::one());
        assert!(cert
            .reasons
            .iter()
            .any(|r| matches!(r, Reason::PayoffAboveMaximum { player: 1, .. })));
    }

    #[test]
    fn the_loop_witness_verifies_exactly() {
        let g = g1();
        let (holds, witness) =
            solve_qualne(&g, 0, &BinaryPayoff::new(vec![true])).unwrap();
        assert!(holds);
        let w = witness.unwrap();
        let cert = verify_finite_state_profile(&g, 0, &w).unwrap();
        assert!(cert.accepted);
        assert_eq!(cert.payoff, vec![Rational::one()]);
        assert_eq!(cert.best_response, vec![Rational::one()]);
    }

    #[test]
    fn the_sink_witness_holds_the_player_to_zero() {
        let g = g2();
        let (holds, witness) =
            solve_qualne(&g, 1, &BinaryPayoff::new(vec![false])).unwrap();
        assert!(holds);
        let w = witness.unwrap();
        let cert = verify_finite_state_profile(&g, 1, &w).unwrap();
        assert!(cert.accepted, "{:?}", cert.reasons);
        assert_eq!(cert.payoff, vec![Rational::zero()]);
        assert_eq!(cert.best_response, vec![Rational::zero()]);
    }

    #[test]
    fn synthesized_witnesses_round_trip_through_the_judge() {
        let mut rng = corpus_rng(0x5e1f);
        let mut accepted = 0;
        for round in 0..60 {
            let cfg = GeneratorConfig {
                stochastic_percent: 25,
                kinds: vec![
                    ObjectiveKind::Buchi,
                    ObjectiveKind::CoBuchi,
                    ObjectiveKind::Parity,
                    ObjectiveKind::Streett,
                    ObjectiveKind::Rabin,
                ],
                ..GeneratorConfig::new(1 + round % 3, 5)
            };
            let g = random_game(&cfg, &mut rng);
            for mask in 0..(1u32 << g.players()) {
                let bits = (0..g.players()).map(|i| mask >> i & 1 == 1).collect();
                let x = BinaryPayoff::new(bits);
                let (holds, witness) = solve_qualne(&g, 0, &x).unwrap();
                if !holds {
                    continue;
                }
                let w = witness.expect("positive answers carry a witness");
                let cert = verify_finite_state_profile(&g, 0, &w).unwrap();
                assert!(cert.accepted, "round {round} payoff mask {mask}: {:?}", cert.reasons);
                let claimed: Vec<Rational> = x
                    .bits()
                    .iter()
                    .map(|&b| if b { Rational::one() } else { Rational::zero() })
                    .collect();
                assert_eq!(cert.payoff, claimed, "round {round} mask {mask}");
                accepted += 1;
            }
        }
        assert!(accepted >= 40, "only {accepted} witnesses exercised");
    }
}
