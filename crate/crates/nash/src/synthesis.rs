//! Turning a positive QualNE decision into a checkable finite-state
//! equilibrium.
//!
//! Every player runs an automaton with the same memory structure. In the
//! main mode the automata jointly steer the play: a *pursue* phase plays
//! the positional policy that reaches the target end components almost
//! surely, and a *sweep* phase keeps the play inside the entered witness
//! component while cycling through its vertices, so the limit set is the
//! whole component with probability one. The memory also records, after
//! every controlled vertex, which successor was prescribed; reading a
//! different successor identifies the owner as a deviator, and everyone
//! switches to the pre-computed coalition strategies that hold the
//! deviator to value zero. Chance moves never trigger the switch.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use game_core::game::{PlayerId, Smg, VertexId};
use game_core::rational::Rational;
use num::One;
use objectives::{is_end_component, BinaryPayoff, EndComponent};
use prob_solvers::{mdp_max_reach_value, StationaryProfile};
use zerosum::{coalition_analysis, CoalitionAnalysis, FiniteStateStrategy};

use crate::qualne::{build_qualne_mdp, QualneConstruction};
use crate::types::{EquilibriumWitness, NashError};

/// Joint-automaton minimisation is skipped above this many memory states;
/// the unminimised witness is just as sound, only larger.
const MINIMIZE_LIMIT: usize = 4096;

/// The stationary profile that sweeps an end component: every controlled
/// vertex mixes uniformly over its successors inside the component, so
/// the induced chain on the component is irreducible and its limit set is
/// the whole component almost surely. Rows are only given on the
/// component (the profile is partial elsewhere).
pub fn ec_sweep_profile(g: &Smg, c: &EndComponent) -> Result<StationaryProfile, NashError> {
    if !is_end_component(g, c.vertices()) {
        let names: Vec<&str> = c.vertices().iter().map(|&v| g.name(v)).collect();
        return Err(NashError::NotEndComponent(format!("{{{}}}", names.join(", "))));
    }
    let mut rows = BTreeMap::new();
    for &v in c.vertices() {
        if g.is_stochastic(v) {
            continue;
        }
        let inside: Vec<VertexId> = g.succ_ids(v).filter(|w| c.contains(*w)).collect();
        let weight = Rational::new(1.into(), (inside.len() as i64).into());
        rows.insert(v, inside.into_iter().map(|w| (w, weight.clone())).collect());
    }
    Ok(StationaryProfile { rows })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Phase {
    /// Following the positional reach policy toward the target union.
    Pursue,
    /// Inside witness component `witness`, heading for its `target`-th
    /// vertex (in ascending-id order).
    Sweep { witness: usize, target: usize },
}

/// Static data shared by every player's automaton.
struct CompositePlan<'a> {
    g: &'a Smg,
    /// Index ↔ phase; 0 is always [`Phase::Pursue`].
    phases: Vec<Phase>,
    /// Witness components as sorted original-id lists.
    sweep_lists: Vec<Vec<VertexId>>,
    /// `sweep_step[w][t][v]`: next vertex on a shortest in-component path
    /// from `v` toward list `w`'s `t`-th vertex (its shortest return
    /// cycle when `v` is that vertex).
    sweep_step: Vec<Vec<BTreeMap<VertexId, VertexId>>>,
    /// Positional reach policy toward the target union, in original ids.
    pursue: BTreeMap<VertexId, VertexId>,
    /// Per potential deviator: memory block of the punishment automata.
    punish: BTreeMap<PlayerId, PunishBlock>,
    /// 1 + players · vertices: encodings of "which successor was
    /// prescribed to which owner", plus "none".
    expect_count: usize,
    main_count: usize,
    total_count: usize,
    analyses: BTreeMap<PlayerId, CoalitionAnalysis>,
}

struct PunishBlock {
    offset: usize,
    memory_count: usize,
    initial: usize,
    /// The family's shared update table (trivial when the deviator has
    /// no co-players owning vertices).
    update: Vec<Vec<usize>>,
}

fn first_successor(g: &Smg, v: VertexId) -> VertexId {
    g.succ_ids(v).next().expect("every vertex has a successor")
}

/// Next vertex per source on shortest paths toward `goal` inside `c`,
/// ties resolved toward the smallest successor id. For `goal` itself the
/// entry is the first step of its shortest return cycle.
fn steps_toward(g: &Smg, c: &[VertexId], goal: VertexId) -> BTreeMap<VertexId, VertexId> {
    let inside: BTreeSet<VertexId> = c.iter().copied().collect();
    // Backward breadth-first search gives the distance to the goal.
    let mut preds: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &v in c {
        for w in g.succ_ids(v).filter(|w| inside.contains(w)) {
            preds.entry(w).or_default().push(v);
        }
    }
    let mut dist: BTreeMap<VertexId, usize> = BTreeMap::new();
    dist.insert(goal, 0);
    let mut queue = VecDeque::from([goal]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        for &p in preds.get(&v).into_iter().flatten() {
            dist.entry(p).or_insert_with(|| {
                queue.push_back(p);
                d + 1
            });
        }
    }
    c.iter()
        .map(|&v| {
            let step = g
                .succ_ids(v)
                .filter(|w| inside.contains(w))
                .min_by_key(|w| (dist[w], *w))
                .expect("components are closed and strongly connected");
            (v, step)
        })
        .collect()
}

impl<'a> CompositePlan<'a> {
    fn phase_index(&self, p: Phase) -> usize {
        match p {
            Phase::Pursue => 0,
            Phase::Sweep { witness, target } => {
                1 + self.sweep_lists[..witness].iter().map(Vec::len).sum::<usize>() + target
            }
        }
    }

    fn encode_expect(&self, prescribed: VertexId, owner: PlayerId) -> usize {
        1 + owner * self.g.vertex_count() + prescribed
    }

    fn decode_expect(&self, e: usize) -> Option<(VertexId, PlayerId)> {
        let n = self.g.vertex_count();
        e.checked_sub(1).map(|e| (e % n, e / n))
    }

    fn main_id(&self, phase: usize, expect: usize) -> usize {
        phase * self.expect_count + expect
    }

    fn advance(&self, phase: Phase, v: VertexId) -> Phase {
        match phase {
            Phase::Pursue => {
                match self.sweep_lists.iter().position(|c| c.binary_search(&v).is_ok()) {
                    Some(w) => {
                        let pos = self.sweep_lists[w].binary_search(&v).unwrap();
                        Phase::Sweep { witness: w, target: (pos + 1) % self.sweep_lists[w].len() }
                    }
                    None => Phase::Pursue,
                }
            }
            Phase::Sweep { witness, target } => {
                if self.sweep_lists[witness][target] == v {
                    Phase::Sweep {
                        witness,
                        target: (target + 1) % self.sweep_lists[witness].len(),
                    }
                } else {
                    Phase::Sweep { witness, target }
                }
            }
        }
    }

    /// The move prescribed at controlled vertex `v` in (already advanced)
    /// phase `p`; an arbitrary but fixed successor where the play cannot
    /// be (outside the zone in pursuit, outside the component in a sweep).
    fn prescription(&self, p: Phase, v: VertexId) -> VertexId {
        match p {
            Phase::Pursue => self.pursue.get(&v).copied().unwrap_or_else(|| first_successor(self.g, v)),
            Phase::Sweep { witness, target } => self.sweep_step[witness][target]
                .get(&v)
                .copied()
                .unwrap_or_else(|| first_successor(self.g, v)),
        }
    }

    fn next_memory(&self, m: usize, v: VertexId) -> usize {
        if m < self.main_count {
            let phase = self.phases[m / self.expect_count];
            let expect = m % self.expect_count;
            if let Some((s, d)) = self.decode_expect(expect) {
                if v != s {
                    match self.punish.get(&d) {
                        Some(block) => return block.offset + block.update[block.initial][v],
                        // Codes naming a vertex-less player are never
                        // produced; park them on themselves.
                        None => return m,
                    }
                }
            }
            let p = self.advance(phase, v);
            let expect = match self.g.owner(v) {
                Some(owner) => self.encode_expect(self.prescription(p, v), owner),
                None => 0,
            };
            self.main_id(self.phase_index(p), expect)
        } else {
            let (_, block) = self
                .punish
                .iter()
                .find(|(_, b)| (b.offset..b.offset + b.memory_count).contains(&m))
                .expect("memory id belongs to some punishment block");
            block.offset + block.update[m - block.offset][v]
        }
    }

    /// Output of player `j`'s automaton at owned vertex `v` in memory `m`.
    fn output(&self, j: PlayerId, m: usize, v: VertexId) -> Vec<(VertexId, Rational)> {
        let filler = vec![(first_successor(self.g, v), Rational::one())];
        let punished = |d: PlayerId, local: usize| -> Vec<(VertexId, Rational)> {
            if d == j {
                return filler.clone();
            }
            self.analyses[&d].punishment[&j].output[&(local, v)].clone()
        };
        if m < self.main_count {
            let phase = self.phases[m / self.expect_count];
            let expect = m % self.expect_count;
            if let Some((s, d)) = self.decode_expect(expect) {
                if v != s {
                    match self.punish.get(&d) {
                        Some(block) => return punished(d, block.initial),
                        None => return filler,
                    }
                }
            }
            vec![(self.prescription(self.advance(phase, v), v), Rational::one())]
        } else {
            let (&d, block) = self
                .punish
                .iter()
                .find(|(_, b)| (b.offset..b.offset + b.memory_count).contains(&m))
                .expect("memory id belongs to some punishment block");
            punished(d, m - block.offset)
        }
    }
}

/// Memory states reachable from `initial` under arbitrary vertex reads,
/// ascending.
fn reachable_memories(update: &[Vec<usize>], initial: usize) -> Vec<usize> {
    let mut seen = BTreeSet::from([initial]);
    let mut queue = VecDeque::from([initial]);
    while let Some(m) = queue.pop_front() {
        for &m2 in &update[m] {
            if seen.insert(m2) {
                queue.push_back(m2);
            }
        }
    }
    seen.into_iter().collect()
}

type OutputTable = BTreeMap<(usize, VertexId), Vec<(VertexId, Rational)>>;

/// Merges memory states that are joint-behaviourally equivalent: same
/// outputs for every player at every vertex, and equivalent successors.
/// Classes are numbered by their smallest member, preserving order.
fn minimise_joint(
    update: Vec<Vec<usize>>,
    outputs: Vec<OutputTable>,
    initial: usize,
) -> (Vec<Vec<usize>>, Vec<OutputTable>, usize) {
    let count = update.len();
    let mut class_of: Vec<usize> = {
        let mut signatures: BTreeMap<Vec<&Vec<(VertexId, Rational)>>, Vec<usize>> = BTreeMap::new();
        for m in 0..count {
            let sig: Vec<&Vec<(VertexId, Rational)>> = outputs
                .iter()
                .flat_map(|table| {
                    table.range((m, 0)..=(m, usize::MAX)).map(|(_, dist)| dist)
                })
                .collect();
            signatures.entry(sig).or_default().push(m);
        }
        let mut class_of = vec![0; count];
        for members in signatures.values() {
            for &m in members {
                class_of[m] = members[0];
            }
        }
        class_of
    };

    loop {
        let mut regrouped: BTreeMap<(usize, Vec<usize>), Vec<usize>> = BTreeMap::new();
        for m in 0..count {
            let key = (class_of[m], update[m].iter().map(|&m2| class_of[m2]).collect());
            regrouped.entry(key).or_default().push(m);
        }
        let next: Vec<usize> = {
            let mut next = vec![0; count];
            for members in regrouped.values() {
                for &m in members {
                    next[m] = members[0];
                }
            }
            next
        };
        if next == class_of {
            break;
        }
        class_of = next;
    }

    let representatives: Vec<usize> =
        class_of.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let rank: BTreeMap<usize, usize> =
        representatives.iter().enumerate().map(|(idx, &m)| (m, idx)).collect();
    let new_update: Vec<Vec<usize>> = representatives
        .iter()
        .map(|&m| update[m].iter().map(|&m2| rank[&class_of[m2]]).collect())
        .collect();
    let mut new_outputs: Vec<OutputTable> = vec![OutputTable::new(); outputs.len()];
    for (table, new_table) in outputs.iter().zip(new_outputs.iter_mut()) {
        for &m in &representatives {
            for (&(_, v), dist) in table.range((m, 0)..=(m, usize::MAX)) {
                new_table.insert((rank[&class_of[m]], v), dist.clone());
            }
        }
    }
    (new_update, new_outputs, rank[&class_of[initial]])
}

/// Builds the threat-strategy witness for a construction known to accept
/// at `v0`. Reuses the construction's coalition analyses and computes
/// the missing ones (players demanding payoff one can also deviate; the
/// strategies punishing them are sound regardless of their value).
pub(crate) fn synthesize_from_construction(
    g: &Smg,
    v0: VertexId,
    x: &BinaryPayoff,
    c: &QualneConstruction,
) -> Result<EquilibriumWitness, NashError> {
    if !c.holds_at(v0) {
        return Err(NashError::Unsynthesizable(format!(
            "no equilibrium with payoff {} from vertex {}",
            payoff_string(x),
            g.name(v0)
        )));
    }
    let n = g.vertex_count();

    let mut analyses: BTreeMap<PlayerId, CoalitionAnalysis> = BTreeMap::new();
    for d in (0..g.players()).filter(|&d| !g.owned_by(d).is_empty()) {
        match c.zero_analyses.get(&d) {
            Some(a) => analyses.insert(d, a.clone()),
            None => analyses.insert(d, coalition_analysis(g, d)?),
        };
    }

    // The pursue policy, mapped back to original vertex ids.
    let (_, policy) = mdp_max_reach_value(&c.mdp, &c.target.vertices)?;
    let pursue: BTreeMap<VertexId, VertexId> =
        policy.choices.iter().map(|(&v, &w)| (c.from_mdp[v], c.from_mdp[w])).collect();

    let sweep_lists: Vec<Vec<VertexId>> = c
        .target
        .witnesses
        .iter()
        .map(|ec| ec.vertices().iter().map(|&v| c.from_mdp[v]).collect())
        .collect();
    let sweep_step: Vec<Vec<BTreeMap<VertexId, VertexId>>> = sweep_lists
        .iter()
        .map(|list| list.iter().map(|&goal| steps_toward(g, list, goal)).collect())
        .collect();
    let mut phases = vec![Phase::Pursue];
    for (witness, list) in sweep_lists.iter().enumerate() {
        phases.extend((0..list.len()).map(|target| Phase::Sweep { witness, target }));
    }

    let expect_count = 1 + g.players() * n;
    let main_count = phases.len() * expect_count;
    let mut punish: BTreeMap<PlayerId, PunishBlock> = BTreeMap::new();
    let mut offset = main_count;
    for (&d, analysis) in &analyses {
        let block = match analysis.punishment.values().next() {
            Some(member) => {
                debug_assert!(analysis.punishment.values().all(|s| {
                    s.memory_count == member.memory_count
                        && s.initial_memory == member.initial_memory
                        && s.update == member.update
                }));
                PunishBlock {
                    offset,
                    memory_count: member.memory_count,
                    initial: member.initial_memory,
                    update: member.update.clone(),
                }
            }
            // Nobody owns a vertex besides the deviator: a single inert
            // memory state keeps the block well-formed.
            None => PunishBlock { offset, memory_count: 1, initial: 0, update: vec![vec![0; n]] },
        };
        offset += block.memory_count;
        punish.insert(d, block);
    }

    let plan = CompositePlan {
        g,
        phases,
        sweep_lists,
        sweep_step,
        pursue,
        punish,
        expect_count,
        main_count,
        total_count: offset,
        analyses,
    };

    let full_update: Vec<Vec<usize>> =
        (0..plan.total_count).map(|m| (0..n).map(|v| plan.next_memory(m, v)).collect()).collect();
    let mut full_outputs: Vec<OutputTable> = vec![OutputTable::new(); g.players()];
    for (j, table) in full_outputs.iter_mut().enumerate() {
        for v in g.owned_by(j) {
            for m in 0..plan.total_count {
                table.insert((m, v), plan.output(j, m, v));
            }
        }
    }

    // Keep only memories reachable from the start, then merge equivalent
    // ones (the latter only at small sizes).
    let kept = reachable_memories(&full_update, 0);
    let rank: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut update: Vec<Vec<usize>> =
        kept.iter().map(|&m| full_update[m].iter().map(|&m2| rank[&m2]).collect()).collect();
    let mut outputs: Vec<OutputTable> = full_outputs
        .into_iter()
        .map(|table| {
            table
                .into_iter()
                .filter_map(|((m, v), dist)| rank.get(&m).map(|&m2| ((m2, v), dist)))
                .collect()
        })
        .collect();
    let mut initial = rank[&0];
    if update.len() <= MINIMIZE_LIMIT {
        (update, outputs, initial) = minimise_joint(update, outputs, initial);
    }

    let strategies: Vec<FiniteStateStrategy> = outputs
        .into_iter()
        .enumerate()
        .map(|(j, output)| FiniteStateStrategy {
            memory_count: update.len(),
            initial_memory: initial,
            update: update.clone(),
            owned: g.owned_by(j).into_iter().collect(),
            output,
        })
        .collect();

    let witness = EquilibriumWitness { strategies, payoff: x.clone() };
    debug_assert!(witness.validate(g).is_ok());
    Ok(witness)
}

fn payoff_string(x: &BinaryPayoff) -> String {
    x.bits().iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Builds a finite-state equilibrium witness with payoff exactly `x`
/// from `v0`, failing when no such equilibrium exists.
pub fn synthesize_equilibrium(
    g: &Smg,
    v0: VertexId,
    x: &BinaryPayoff,
) -> Result<EquilibriumWitness, NashError> {
    if v0 >= g.vertex_count() {
        return Err(NashError::Game(game_core::game::GameError::UnknownVertex(format!(
            "#{v0}"
        ))));
    }
    let construction = build_qualne_mdp(g, x)?;
    synthesize_from_construction(g, v0, x, &construction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use game_core::fixtures::{g1, g2};
    use game_core::generator::{corpus_rng, random_game, GeneratorConfig, ObjectiveKind};
    use objectives::maximal_end_components;
    use prob_solvers::{ChainState, MarkovChain};

    #[test]
    fn the_loop_witness_has_a_single_memory_state() {
        let g = g1();
        let w = synthesize_equilibrium(&g, 0, &BinaryPayoff::new(vec![true])).unwrap();
        assert!(w.validate(&g).is_ok());
        assert_eq!(w.strategies.len(), 1);
        assert_eq!(w.strategies[0].memory_count, 1);
        assert_eq!(w.strategies[0].pure_choice(0, 0), Some(0));
    }

    #[test]
    fn synthesis_refuses_unachievable_payoffs() {
        let g = g2();
        match synthesize_equilibrium(&g, 2, &BinaryPayoff::new(vec![true])) {
            Err(NashError::Unsynthesizable(_)) => {}
            other => panic!("expected a precondition failure, got {other:?}"),
        }
    }

    #[test]
    fn sweep_profiles_are_uniform_over_inside_successors() {
        let g = g2();
        // {a} is an end component: a controlled self-loop.
        let ec = EndComponent::new(&g, BTreeSet::from([0])).unwrap();
        let p = ec_sweep_profile(&g, &ec).unwrap();
        assert_eq!(p.rows[&0], vec![(0, Rational::one())]);
        // {a, b} is not: it has no internal edges between the two loops,
        // so it is not strongly connected.
        assert!(EndComponent::new(&g, BTreeSet::from([0, 1])).is_none());
    }

    #[test]
    fn sweep_profiles_induce_irreducible_chains_on_the_component() {
        let mut rng = corpus_rng(0xeC5);
        let mut checked = 0;
        for round in 0..40 {
            let cfg = GeneratorConfig {
                kinds: vec![ObjectiveKind::Buchi],
                ..GeneratorConfig::new(2, 6)
            };
            let g = random_game(&cfg, &mut rng);
            let everything: BTreeSet<VertexId> = g.vertices().collect();
            for ec in maximal_end_components(&g, &everything) {
                let p = ec_sweep_profile(&g, &ec).unwrap();
                let members: Vec<VertexId> = ec.vertices().iter().copied().collect();
                let index: BTreeMap<VertexId, usize> =
                    members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
                let rows: Vec<Vec<(usize, Rational)>> = members
                    .iter()
                    .map(|&v| {
                        if g.is_stochastic(v) {
                            g.successors(v)
                                .iter()
                                .map(|(w, pr)| (index[w], pr.clone().unwrap()))
                                .collect()
                        } else {
                            p.rows[&v].iter().map(|(w, pr)| (index[w], pr.clone())).collect()
                        }
                    })
                    .collect();
                let origins = members.iter().map(|&v| ChainState::plain(v)).collect();
                let chain = MarkovChain::new(rows, origins).unwrap();
                let bsccs = chain.bottom_sccs();
                assert_eq!(bsccs.len(), 1, "round {round}: several closed classes");
                assert_eq!(bsccs[0].len(), members.len(), "round {round}: not irreducible");
                checked += 1;
            }
        }
        assert!(checked > 30, "only {checked} components exercised");
    }

    #[test]
    fn foreign_components_are_rejected() {
        let yardstick = g2();
        let whole: BTreeSet<VertexId> = yardstick.vertices().collect();
        // {a, b, v0} is not an end component of g2 (a and b never
        // reconnect), but the same ids do form one in a three-cycle game.
        assert!(EndComponent::new(&yardstick, whole.clone()).is_none());
        let loopy = Smg::from_parts(
            1,
            vec![("x".into(), Some(0)), ("y".into(), Some(0)), ("z".into(), Some(0))],
            vec![(0, 1, None), (1, 2, None), (2, 0, None)],
            vec![game_core::game::Objective::Buchi(BTreeSet::from([0]))],
        )
        .unwrap();
        let foreign = EndComponent::new(&loopy, whole).unwrap();
        match ec_sweep_profile(&yardstick, &foreign) {
            Err(NashError::NotEndComponent(_)) => {}
            other => panic!("expected rejection, got {other:?}"),
        }
    }
}
