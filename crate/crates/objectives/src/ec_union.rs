//! Union of all end components realising a demanded binary payoff.
//!
//! This is the combinatorial heart of the equilibrium deciders: given a
//! payoff bit per player, compute the set of vertices lying on *some* end
//! component whose limit set gives every player exactly that bit. The
//! union is returned together with witness components that cover it, so
//! downstream users can re-check every claim.
//!
//! For games in which every per-player demand can be phrased as a Streett
//! condition (winners of Büchi/co-Büchi/parity/Streett conditions, losers
//! of Rabin conditions — and symmetrically for `rabin_ec`), the search
//! recurses over maximal end components with two pruning rules, memoised
//! on the candidate vertex set:
//!
//! * a violated Streett-side pair (fires inside the candidate, obligation
//!   absent) forces every valid sub-component to avoid the firing set, so
//!   all such sets are removed in one step;
//! * an unwitnessed Rabin-side player branches over that player's pairs,
//!   removing one obligation set per branch.
//!
//! The candidate shrinks strictly along every edge of the recursion, so it
//! terminates; it can be exponential in adversarial instances (deciding
//! emptiness of the union covers propositional satisfiability), which is
//! acceptable at the instance sizes this workspace targets and is exactly
//! what the brute-force comparison suites exercise.
//!
//! Mixed or Muller demands go through a generic refinement instead:
//! maximal end components, then re-decomposition of each non-witness
//! candidate with one vertex removed at a time, again memoised.

use std::collections::{BTreeSet, HashMap};

use game_core::game::{Objective, RabinPair, Smg, VertexId};

use crate::end_components::{ec_has_payoff, maximal_end_components, EndComponent};
use crate::limit_sets::to_streett_pairs;
use crate::payoff::BinaryPayoff;

/// A union of end components together with the witnesses that cover it.
///
/// Invariants (checked in debug builds at construction sites): every
/// witness is an end component with the demanded payoff, and `vertices`
/// is exactly the union of the witnesses.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EcUnion {
    pub vertices: BTreeSet<VertexId>,
    pub witnesses: Vec<EndComponent>,
}

impl EcUnion {
    fn add(&mut self, witness: EndComponent) {
        self.vertices.extend(witness.vertices().iter().copied());
        if !self.witnesses.contains(&witness) {
            self.witnesses.push(witness);
        }
    }

    fn merge(&mut self, other: &EcUnion) {
        for w in &other.witnesses {
            self.add(w.clone());
        }
    }

    /// Drops witnesses that are covered by the others, keeping the
    /// largest first; purely cosmetic, the union is unchanged.
    fn compact(mut self) -> EcUnion {
        self.witnesses.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        let mut kept: Vec<EndComponent> = Vec::new();
        let mut covered: BTreeSet<VertexId> = BTreeSet::new();
        for w in self.witnesses {
            if !w.vertices().is_subset(&covered) {
                covered.extend(w.vertices().iter().copied());
                kept.push(w);
            }
        }
        self.witnesses = kept;
        debug_assert_eq!(covered, self.vertices);
        self
    }
}

/// Per-player demand in pair form.
enum Demand {
    /// Every pair: firing implies obligation (Streett reading).
    Conjunctive(Vec<RabinPair>),
    /// Some pair: firing without obligation (Rabin reading).
    Disjunctive(Vec<RabinPair>),
}

/// Union of all end components within `u` with payoff exactly `x`, for
/// games where every objective is a Streett condition.
///
/// Panics if some objective is not Streett; `generic_ec_union` dispatches.
pub fn streett_ec(g: &Smg, x: &BinaryPayoff, u: &BTreeSet<VertexId>) -> EcUnion {
    let demands = (0..g.players())
        .map(|i| match g.objective(i) {
            Objective::Streett(pairs) => {
                if x.bit(i) {
                    Demand::Conjunctive(pairs.clone())
                } else {
                    Demand::Disjunctive(pairs.clone())
                }
            }
            other => panic!("streett_ec requires Streett objectives, player {i} has {}", other.kind()),
        })
        .collect::<Vec<_>>();
    solve_pair_demands(g, &demands, u, x)
}

/// Union of all end components within `u` with payoff exactly `x`, for
/// games where every objective is a Rabin condition.
///
/// Same engine as [`streett_ec`] with the readings swapped: a Rabin winner
/// needs a witnessing pair, a Rabin loser must satisfy every pair in the
/// Streett reading.
pub fn rabin_ec(g: &Smg, x: &BinaryPayoff, u: &BTreeSet<VertexId>) -> EcUnion {
    let demands = (0..g.players())
        .map(|i| match g.objective(i) {
            Objective::Rabin(pairs) => {
                if x.bit(i) {
                    Demand::Disjunctive(pairs.clone())
                } else {
                    Demand::Conjunctive(pairs.clone())
                }
            }
            other => panic!("rabin_ec requires Rabin objectives, player {i} has {}", other.kind()),
        })
        .collect::<Vec<_>>();
    solve_pair_demands(g, &demands, u, x)
}

fn solve_pair_demands(
    g: &Smg,
    demands: &[Demand],
    u: &BTreeSet<VertexId>,
    x: &BinaryPayoff,
) -> EcUnion {
    assert!(x.matches_players(g));
    let mut memo: HashMap<BTreeSet<VertexId>, EcUnion> = HashMap::new();
    let result = pair_demand_rec(g, demands, u, &mut memo);
    debug_assert!(result.witnesses.iter().all(|w| ec_has_payoff(g, w, x)));
    result.compact()
}

fn pair_demand_rec(
    g: &Smg,
    demands: &[Demand],
    u: &BTreeSet<VertexId>,
    memo: &mut HashMap<BTreeSet<VertexId>, EcUnion>,
) -> EcUnion {
    if let Some(hit) = memo.get(u) {
        return hit.clone();
    }
    let mut result = EcUnion::default();
    for mec in maximal_end_components(g, u) {
        let c = mec.vertices();

        // Conjunctive players first: each violated pair (fires in c, no
        // obligation in c) rules its firing set out of every valid
        // sub-component, so one joint subtraction is complete.
        let mut banned: BTreeSet<VertexId> = BTreeSet::new();
        for demand in demands {
            if let Demand::Conjunctive(pairs) = demand {
                for p in pairs {
                    if !c.is_disjoint(&p.fst) && c.is_disjoint(&p.snd) {
                        banned.extend(p.fst.iter().copied());
                    }
                }
            }
        }
        if !banned.is_empty() {
            let shrunk: BTreeSet<VertexId> = c.difference(&banned).copied().collect();
            debug_assert!(shrunk.len() < c.len());
            if !shrunk.is_empty() {
                result.merge(&pair_demand_rec(g, demands, &shrunk, memo));
            }
            continue;
        }

        // All conjunctive demands hold on c. Find the first disjunctive
        // player without a witnessing pair, if any.
        let unwitnessed = demands.iter().find_map(|d| match d {
            Demand::Disjunctive(pairs)
                if !pairs.iter().any(|p| !c.is_disjoint(&p.fst) && c.is_disjoint(&p.snd)) =>
            {
                Some(pairs)
            }
            _ => None,
        });
        match unwitnessed {
            None => {
                // c itself realises every demand.
                result.add(mec);
            }
            Some(pairs) => {
                // Branch: a valid sub-component must make some pair of
                // this player fire while avoiding its obligation set,
                // which currently intersects c (else the pair could fire
                // in no sub-component at all).
                for p in pairs {
                    if c.is_disjoint(&p.fst) {
                        continue;
                    }
                    let shrunk: BTreeSet<VertexId> = c.difference(&p.snd).copied().collect();
                    debug_assert!(shrunk.len() < c.len());
                    if !shrunk.is_empty() {
                        result.merge(&pair_demand_rec(g, demands, &shrunk, memo));
                    }
                }
            }
        }
    }
    memo.insert(u.clone(), result.clone());
    result
}

/// Union of all end components within `u` with payoff exactly `x`, for
/// arbitrary objective mixes.
///
/// Uniform Streett and Rabin games dispatch to the pair engines; games
/// whose objectives all have a Streett presentation (Büchi, co-Büchi,
/// parity, Streett) are translated and dispatched too. Anything involving
/// Muller falls back to memoised refinement: check each maximal end
/// component directly, and if it is not itself a witness, re-decompose
/// with one vertex removed at a time.
pub fn generic_ec_union(g: &Smg, x: &BinaryPayoff, u: &BTreeSet<VertexId>) -> EcUnion {
    assert!(x.matches_players(g));
    let n = g.vertex_count();

    if g.objectives().iter().all(|o| matches!(o, Objective::Streett(_))) {
        return streett_ec(g, x, u);
    }
    if g.objectives().iter().all(|o| matches!(o, Objective::Rabin(_))) {
        return rabin_ec(g, x, u);
    }
    // A Rabin demand is a Streett demand for the complemented bit, so any
    // game without Muller objectives reduces to the Streett engine.
    let streett_forms: Option<Vec<Vec<RabinPair>>> = g
        .objectives()
        .iter()
        .map(|o| match o {
            Objective::Rabin(pairs) => Some(pairs.clone()),
            other => to_streett_pairs(other, n),
        })
        .collect();
    if let Some(all_pairs) = streett_forms {
        let flipped: Vec<bool> = g
            .objectives()
            .iter()
            .zip(x.bits())
            .map(|(o, &b)| if matches!(o, Objective::Rabin(_)) { !b } else { b })
            .collect();
        let converted = g.with_objectives(all_pairs.into_iter().map(Objective::Streett).collect());
        let result = streett_ec(&converted, &BinaryPayoff::new(flipped), u);
        debug_assert!(result.witnesses.iter().all(|w| ec_has_payoff(g, w, x)));
        return result;
    }

    let mut memo: HashMap<BTreeSet<VertexId>, EcUnion> = HashMap::new();
    let result = refine_rec(g, x, u, &mut memo);
    debug_assert!(result.witnesses.iter().all(|w| ec_has_payoff(g, w, x)));
    result.compact()
}

fn refine_rec(
    g: &Smg,
    x: &BinaryPayoff,
    u: &BTreeSet<VertexId>,
    memo: &mut HashMap<BTreeSet<VertexId>, EcUnion>,
) -> EcUnion {
    if let Some(hit) = memo.get(u) {
        return hit.clone();
    }
    let mut result = EcUnion::default();
    for mec in maximal_end_components(g, u) {
        if ec_has_payoff(g, &mec, x) {
            // Every payoff-x end component inside is covered by mec.
            result.add(mec);
        } else {
            let c = mec.vertices().clone();
            for &v in &c {
                let mut shrunk = c.clone();
                shrunk.remove(&v);
                if !shrunk.is_empty() {
                    result.merge(&refine_rec(g, x, &shrunk, memo));
                }
            }
        }
    }
    memo.insert(u.clone(), result.clone());
    result
}
