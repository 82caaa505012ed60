//! Player-centric qualitative analysis: which vertices give a player any
//! chance at all, and how the rest of the table plays to deny everything
//! else.
//!
//! All entry points view the game through [`coalition_view`]: one player is
//! the protagonist, everybody else merges into an adversarial coalition.
//! The objective is reduced to parity on a record product and the product
//! is solved qualitatively; results project back to base vertices at the
//! initial record, which is sound because all objectives here depend only
//! on limit sets, so a state's verdict never depends on its record.
//!
//! The coalition's almost-sure strategy doubles as the *punishment* the
//! equilibrium layers threaten deviators with: from every vertex where the
//! protagonist's value is zero it keeps the protagonist's probability at
//! exactly zero, whatever the protagonist does, and it is decomposed here
//! into one automaton per coalition member so each player can carry their
//! own share of the threat.

use std::collections::{BTreeMap, BTreeSet};

use game_core::game::{coalition_view, GameError, PlayerId, Smg, VertexId};
use game_core::rational::Rational;
use num::One;

use crate::arena::{almost_sure_region, solve, Side};
use crate::product::{to_parity, LarProduct};
use crate::strategy::FiniteStateStrategy;

/// Everything the qualitative solve of one product yields.
pub struct QualitativeSolution {
    /// Base vertices from which the protagonist wins with probability one.
    pub almost_sure: BTreeSet<VertexId>,
    /// Base vertices from which the protagonist wins with positive
    /// probability against every coalition behaviour.
    pub positive: BTreeSet<VertexId>,
    /// Pure strategy winning almost surely from `almost_sure` and with
    /// positive probability from `positive`.
    pub protagonist: FiniteStateStrategy,
    /// Pure coalition strategy holding the protagonist to probability zero
    /// from every vertex outside `positive`.
    pub coalition: FiniteStateStrategy,
}

/// Full qualitative solve of a parity product, with finite-state witness
/// strategies for both sides.
pub fn qualitative_parity_solve(pg: &LarProduct) -> QualitativeSolution {
    let sets = solve(pg.arena());
    debug_assert!(memory_invariant(pg, &sets.almost_sure), "verdicts must not depend on records");
    debug_assert!(memory_invariant(pg, &sets.positive), "verdicts must not depend on records");
    QualitativeSolution {
        almost_sure: project_states(pg, &sets.almost_sure),
        positive: project_states(pg, &sets.positive),
        protagonist: strategy_from_choices(
            pg,
            pg.protagonist_vertices(),
            &sets.protagonist_choice,
        ),
        coalition: strategy_from_choices(pg, pg.coalition_vertices(), &sets.coalition_choice),
    }
}

/// The positive-value set of one player and the per-player punishment
/// family against them, from a single coalition-side solve.
#[derive(Debug, Clone)]
pub struct CoalitionAnalysis {
    /// Vertices where the player's value is strictly positive.
    pub positive: BTreeSet<VertexId>,
    /// One pure automaton per *other* player that owns at least one vertex;
    /// played jointly they hold the player to probability zero from every
    /// vertex outside `positive`. Players without vertices need no entry.
    pub punishment: BTreeMap<PlayerId, FiniteStateStrategy>,
}

/// Computes [`CoalitionAnalysis`] for `player`. This is the cheap path the
/// equilibrium layers use: one almost-sure solve on the coalition side
/// yields both the set (by determinacy, the protagonist has positive value
/// exactly where the coalition cannot win almost surely) and the threat.
pub fn coalition_analysis(g: &Smg, player: PlayerId) -> Result<CoalitionAnalysis, GameError> {
    let cg = coalition_view(g, player)?;
    let pg = to_parity(&cg);
    let (coalition_sure, coalition_choice) = almost_sure_region(pg.arena(), Side::Coalition);
    debug_assert!(memory_invariant(&pg, &coalition_sure), "verdicts must not depend on records");
    let positive = (0..pg.base_vertex_count())
        .filter(|&v| !coalition_sure[pg.initial_state(v)])
        .collect();
    let mut punishment = BTreeMap::new();
    for j in 0..g.players() {
        if j == player {
            continue;
        }
        let owned: BTreeSet<VertexId> =
            (0..g.vertex_count()).filter(|&v| g.owner(v) == Some(j)).collect();
        if owned.is_empty() {
            continue;
        }
        punishment.insert(j, strategy_from_choices(&pg, &owned, &coalition_choice));
    }
    Ok(CoalitionAnalysis { positive, punishment })
}

/// Base vertices from which `player` can win with positive probability no
/// matter how all other players behave.
pub fn positive_value_set(g: &Smg, player: PlayerId) -> Result<BTreeSet<VertexId>, GameError> {
    Ok(coalition_analysis(g, player)?.positive)
}

/// The per-player punishment family against `player`: played jointly by the
/// other players, it keeps `player`'s probability of winning at zero from
/// every vertex outside their positive-value set, against any behaviour of
/// `player`.
pub fn punishment_strategy(
    g: &Smg,
    player: PlayerId,
) -> Result<BTreeMap<PlayerId, FiniteStateStrategy>, GameError> {
    Ok(coalition_analysis(g, player)?.punishment)
}

fn project_states(pg: &LarProduct, flags: &[bool]) -> BTreeSet<VertexId> {
    (0..pg.base_vertex_count()).filter(|&v| flags[pg.initial_state(v)]).collect()
}

fn memory_invariant(pg: &LarProduct, flags: &[bool]) -> bool {
    (0..pg.state_count()).all(|s| {
        let (v, _) = pg.project(s);
        flags[s] == flags[pg.initial_state(v)]
    })
}

/// Packages per-state arena choices as a finite-state strategy over the
/// base game, using the product's record automaton as memory. Pairs the
/// product does not realise (no play can face `v` with that record) get an
/// arbitrary legal move; they are never consulted.
fn strategy_from_choices(
    pg: &LarProduct,
    owned: &BTreeSet<VertexId>,
    choice: &[Option<usize>],
) -> FiniteStateStrategy {
    let mut output = BTreeMap::new();
    for m in 0..pg.memory_count() {
        for &v in owned {
            let target = pg
                .state(v, m)
                .and_then(|s| choice[s])
                .map(|t| pg.project(t).0)
                .unwrap_or_else(|| fallback_successor(pg, v));
            output.insert((m, v), vec![(target, Rational::one())]);
        }
    }
    FiniteStateStrategy {
        memory_count: pg.memory_count(),
        initial_memory: pg.initial_memory(),
        update: pg.memory_update().to_vec(),
        owned: owned.clone(),
        output,
    }
}

fn fallback_successor(pg: &LarProduct, v: VertexId) -> VertexId {
    let s = pg.initial_state(v);
    pg.project(pg.arena().successors(s)[0]).0
}
