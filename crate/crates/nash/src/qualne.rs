//! QualNE: deciding Nash equilibria with an exact binary payoff.
//!
//! The decision reduces to a single-controller reachability question.
//! For every player demanding payoff zero, compute the set of vertices
//! where the coalition of everyone else can hold that player to
//! probability zero; the *zone* is the largest subarena avoiding every
//! such player's positive-value vertices. Inside the zone, merge all
//! players into one controller and ask whether the union of end
//! components realising exactly the demanded payoff is reachable almost
//! surely. A positive answer comes with a synthesized finite-state
//! witness built from the same analyses.

use std::collections::{BTreeMap, BTreeSet};

use game_core::game::{Objective, PlayerId, Smg, VertexId};
use objectives::{generic_ec_union, BinaryPayoff, EcUnion};
use prob_solvers::{almost_sure_reach_set, ChainState, Mdp};
use zerosum::{coalition_analysis, CoalitionAnalysis};

use crate::synthesis::synthesize_from_construction;
use crate::types::{EquilibriumWitness, NashError};

/// Everything the binary-payoff decision and the witness construction
/// share: the zone, the merged-controller process over it, the target
/// end components, the id maps between the two spaces, and the
/// coalition analyses of the zero-demand players (reused for threat
/// strategies).
#[derive(Debug)]
pub struct QualneConstruction {
    /// Greatest subarena, in original vertex ids, avoiding the
    /// positive-value set of every player whose demanded bit is zero.
    /// May be empty, in which case the process below is a placeholder.
    pub zone: BTreeSet<VertexId>,
    /// The zone with all players merged into one controller. Its
    /// objective marks `target`, and its provenance records point back
    /// at the original vertices.
    pub mdp: Mdp,
    /// Union of end components of the zone whose payoff is exactly the
    /// demanded one, in the merged process's vertex ids.
    pub target: EcUnion,
    /// Original vertex id → merged process id; empty when the zone is.
    pub to_mdp: BTreeMap<VertexId, VertexId>,
    /// Merged process id → original vertex id; empty when the zone is.
    pub from_mdp: Vec<VertexId>,
    /// Coalition analysis per zero-demand player: their positive-value
    /// set and the punishment strategies of everyone else.
    pub zero_analyses: BTreeMap<PlayerId, CoalitionAnalysis>,
}

/// Largest set closed under the subarena rules inside `keep`: controlled
/// vertices need a successor in the set, stochastic vertices all of them.
fn greatest_subarena(g: &Smg, keep: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    let mut zone = keep.clone();
    loop {
        let doomed: Vec<VertexId> = zone
            .iter()
            .copied()
            .filter(|&v| {
                if g.is_stochastic(v) {
                    !g.succ_ids(v).all(|w| zone.contains(&w))
                } else {
                    !g.succ_ids(v).any(|w| zone.contains(&w))
                }
            })
            .collect();
        if doomed.is_empty() {
            return zone;
        }
        for v in doomed {
            zone.remove(&v);
        }
    }
}

fn check_payoff_arity(g: &Smg, x: &BinaryPayoff) -> Result<(), NashError> {
    if !x.matches_players(g) {
        return Err(NashError::BadQuery(format!(
            "binary payoff names {} players, game has {}",
            x.len(),
            g.players()
        )));
    }
    Ok(())
}

/// Builds the merged-controller reachability instance for the demanded
/// binary payoff.
pub fn build_qualne_mdp(g: &Smg, x: &BinaryPayoff) -> Result<QualneConstruction, NashError> {
    check_payoff_arity(g, x)?;

    let mut zero_analyses = BTreeMap::new();
    for i in x.zero_players() {
        zero_analyses.insert(i, coalition_analysis(g, i)?);
    }
    let keep: BTreeSet<VertexId> = g
        .vertices()
        .filter(|v| zero_analyses.values().all(|a| !a.positive.contains(v)))
        .collect();
    let zone = greatest_subarena(g, &keep);

    if zone.is_empty() {
        // Placeholder process with an empty target: the decision below
        // is negative for every initial vertex, as demanded.
        let trivial = Smg::from_parts(
            1,
            vec![("empty".to_owned(), Some(0))],
            vec![(0, 0, None)],
            vec![Objective::Buchi(BTreeSet::new())],
        )
        .expect("placeholder process is valid");
        let mdp = Mdp::new(trivial, vec![ChainState::plain(0)])?;
        return Ok(QualneConstruction {
            zone,
            mdp,
            target: EcUnion::default(),
            to_mdp: BTreeMap::new(),
            from_mdp: Vec::new(),
            zero_analyses,
        });
    }

    let restricted = game_core::game::restrict(g, &zone)?;
    // `restrict` compacts ids in name order, and original ids are already
    // name-ordered, so the k-th zone vertex becomes restricted vertex k.
    let from_mdp: Vec<VertexId> = zone.iter().copied().collect();
    let to_mdp: BTreeMap<VertexId, VertexId> =
        from_mdp.iter().enumerate().map(|(idx, &orig)| (orig, idx)).collect();
    debug_assert!(from_mdp.iter().enumerate().all(|(idx, &orig)| restricted.name(idx) == g.name(orig)));

    let everything: BTreeSet<VertexId> = restricted.vertices().collect();
    let target = generic_ec_union(&restricted, x, &everything);

    let owners: Vec<Option<PlayerId>> = restricted
        .vertices()
        .map(|v| if restricted.is_stochastic(v) { None } else { Some(0) })
        .collect();
    let merged = restricted.with_ownership(1, owners, vec![Objective::Buchi(target.vertices.clone())]);
    let origins: Vec<ChainState> = from_mdp.iter().map(|&orig| ChainState::plain(orig)).collect();
    let mdp = Mdp::new(merged, origins)?;

    Ok(QualneConstruction { zone, mdp, target, to_mdp, from_mdp, zero_analyses })
}

impl QualneConstruction {
    /// Whether an equilibrium with the demanded payoff exists from `v0`:
    /// the vertex lies in the zone and the merged controller reaches the
    /// target end components almost surely.
    pub fn holds_at(&self, v0: VertexId) -> bool {
        match self.to_mdp.get(&v0) {
            None => false,
            Some(&m) => almost_sure_reach_set(&self.mdp, &self.target.vertices).contains(&m),
        }
    }
}

/// Decides whether some Nash equilibrium from `v0` has payoff exactly
/// `x`; a positive answer carries a synthesized finite-state witness.
pub fn solve_qualne(
    g: &Smg,
    v0: VertexId,
    x: &BinaryPayoff,
) -> Result<(bool, Option<EquilibriumWitness>), NashError> {
    if v0 >= g.vertex_count() {
        return Err(NashError::Game(game_core::game::GameError::UnknownVertex(format!(
            "#{v0}"
        ))));
    }
    let construction = build_qualne_mdp(g, x)?;
    if !construction.holds_at(v0) {
        return Ok((false, None));
    }
    let witness = synthesize_from_construction(g, v0, x, &construction)?;
    Ok((true, Some(witness)))
}
