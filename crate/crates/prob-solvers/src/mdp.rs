//! One-player decision processes: best-response freezing, exact optimal
//! reachability by policy iteration, long-run optimal values, and the
//! almost-sure reachability set.

use std::collections::{BTreeMap, BTreeSet};

use game_core::game::{GameError, Objective, PlayerId, Smg, VertexId};
use game_core::rational::Rational;
use num::{One, Zero};
use objectives::{generic_ec_union, BinaryPayoff, EcUnion};
use thiserror::Error;

use crate::chain::{reach_probabilities_exact, ChainError, ChainState, MarkovChain};
use crate::profiles::{PositionalProfile, ProfileError, StationaryProfile};

#[derive(Debug, Error)]
pub enum MdpError {
    #[error("expected a one-player process, got {0} players")]
    NotSinglePlayer(usize),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// A one-player stochastic game: every controlled vertex belongs to the
/// single decision maker, everything else is chance. Carries provenance
/// back to the vertices (and strategy memory) it was built from.
#[derive(Debug, Clone)]
pub struct Mdp {
    game: Smg,
    origin: Vec<ChainState>,
}

impl Mdp {
    pub fn new(game: Smg, origin: Vec<ChainState>) -> Result<Self, MdpError> {
        if game.players() != 1 {
            return Err(MdpError::NotSinglePlayer(game.players()));
        }
        assert_eq!(origin.len(), game.vertex_count(), "one provenance entry per vertex");
        Ok(Mdp { game, origin })
    }

    pub fn game(&self) -> &Smg {
        &self.game
    }

    pub fn origin(&self, v: VertexId) -> ChainState {
        self.origin[v]
    }

    pub fn origins(&self) -> &[ChainState] {
        &self.origin
    }

    /// The chain obtained by fixing the decision maker to a positional
    /// policy. Provenance carries over.
    pub fn chain_under(&self, policy: &PositionalProfile) -> Result<MarkovChain, ChainError> {
        let g = &self.game;
        let mut rows = Vec::with_capacity(g.vertex_count());
        for v in g.vertices() {
            if g.is_stochastic(v) {
                rows.push(
                    g.successors(v)
                        .iter()
                        .map(|(w, p)| (*w, p.clone().expect("stochastic edges carry probabilities")))
                        .collect(),
                );
            } else {
                let w = *policy
                    .choices
                    .get(&v)
                    .ok_or_else(|| ProfileError::Missing(g.name(v).to_string()))?;
                if !g.has_edge(v, w) {
                    return Err(ProfileError::NotASuccessor {
                        from: g.name(v).to_string(),
                        to: g.name(w).to_string(),
                    }
                    .into());
                }
                rows.push(vec![(w, Rational::one())]);
            }
        }
        MarkovChain::new(rows, self.origin.clone())
    }
}

/// Freeze every player except `free` to the profile's rows; the result is
/// a one-player process in which `free`'s vertices keep their choices and
/// all other controlled vertices become chance vertices with the frozen
/// distribution. Rows the profile may carry for `free` are ignored.
pub fn induce_mdp(g: &Smg, p: &StationaryProfile, free: PlayerId) -> Result<Mdp, MdpError> {
    if free >= g.players() {
        return Err(GameError::NoSuchPlayer { player: free, players: g.players() }.into());
    }
    p.validate_covering(g, Some(free))?;
    let vertices: Vec<(String, Option<PlayerId>)> = g
        .vertices()
        .map(|v| {
            let owner = match g.owner(v) {
                Some(i) if i == free => Some(0),
                _ => None,
            };
            (g.name(v).to_string(), owner)
        })
        .collect();
    let mut edges: Vec<(usize, usize, Option<Rational>)> = Vec::new();
    for v in g.vertices() {
        match g.owner(v) {
            Some(i) if i != free => {
                for (w, pr) in &p.rows[&v] {
                    edges.push((v, *w, Some(pr.clone())));
                }
            }
            Some(_) => {
                for w in g.succ_ids(v) {
                    edges.push((v, w, None));
                }
            }
            None => {
                for (w, pr) in g.successors(v) {
                    edges.push((v, *w, pr.clone()));
                }
            }
        }
    }
    let objective = g.objective(free).clone();
    let game = Smg::from_parts(1, vertices, edges, vec![objective]).map_err(GameError::Invalid)?;
    debug_assert!(g.vertices().all(|v| game.name(v) == g.name(v)), "vertex ids must be stable");
    let origin = g.vertices().map(ChainState::plain).collect();
    Mdp::new(game, origin)
}

/// Exact optimal probability of reaching `target` from every vertex,
/// together with a positional policy attaining it everywhere.
///
/// Policy iteration with exact arithmetic: evaluation computes the true
/// reachability probabilities of the fixed policy (transient states that
/// cannot reach the target are pruned to exactly zero, which keeps the
/// evaluation at the least fixpoint), improvement switches a vertex only
/// on a strict gain and breaks ties toward the smallest vertex id, so the
/// whole procedure is deterministic and terminates.
pub fn mdp_max_reach_value(
    m: &Mdp,
    target: &BTreeSet<VertexId>,
) -> Result<(Vec<Rational>, PositionalProfile), MdpError> {
    let g = m.game();
    let controlled: Vec<VertexId> = g.vertices().filter(|&v| !g.is_stochastic(v)).collect();
    let mut choices: BTreeMap<VertexId, VertexId> = controlled
        .iter()
        .map(|&v| (v, g.succ_ids(v).next().expect("every vertex has a successor")))
        .collect();

    loop {
        let policy = PositionalProfile { choices: choices.clone() };
        let chain = m.chain_under(&policy)?;
        let values = reach_probabilities_exact(&chain, target)?;

        let mut improved = false;
        for &v in &controlled {
            let (best_w, best) = g
                .succ_ids(v)
                .map(|w| (w, &values[w]))
                .max_by(|(aw, av), (bw, bv)| av.cmp(bv).then(bw.cmp(aw)))
                .expect("every vertex has a successor");
            if *best > values[v] {
                choices.insert(v, best_w);
                improved = true;
            }
        }
        if !improved {
            debug_assert!(bellman_fixpoint(g, target, &values), "optimal values must be a fixpoint");
            return Ok((values, policy));
        }
    }
}

fn bellman_fixpoint(g: &Smg, target: &BTreeSet<VertexId>, values: &[Rational]) -> bool {
    g.vertices().all(|v| {
        if target.contains(&v) {
            return values[v].is_one();
        }
        if g.is_stochastic(v) {
            let mix = g
                .successors(v)
                .iter()
                .map(|(w, p)| p.as_ref().expect("stochastic edge") * &values[*w])
                .fold(Rational::zero(), |s, t| s + t);
            values[v] == mix
        } else {
            let best = g.succ_ids(v).map(|w| values[w].clone()).max().expect("successor");
            values[v] == best
        }
    })
}

/// Result of optimising a long-run objective on a one-player process.
#[derive(Debug, Clone)]
pub struct OmegaOutcome {
    /// Optimal satisfaction probability per vertex.
    pub values: Vec<Rational>,
    /// Union of end components whose limit sets satisfy the objective,
    /// with one witness component recorded per covered region.
    pub target: EcUnion,
    /// Positional policy maximising the probability of reaching `target`.
    pub reach_policy: PositionalProfile,
}

/// Exact optimal probability of satisfying `o` from every vertex.
///
/// The optimum equals the best probability of reaching the union of end
/// components that satisfy the objective, since inside such a component
/// the decision maker can realise exactly its limit set.
pub fn mdp_omega_value(m: &Mdp, o: &Objective) -> Result<OmegaOutcome, MdpError> {
    let viewed = m.game().with_objectives(vec![o.clone()]);
    let everything: BTreeSet<VertexId> = viewed.vertices().collect();
    let target = generic_ec_union(&viewed, &BinaryPayoff::new(vec![true]), &everything);
    let (values, reach_policy) = mdp_max_reach_value(m, &target.vertices)?;
    Ok(OmegaOutcome { values, target, reach_policy })
}

/// Vertices from which the decision maker can reach `target` with
/// probability one. Purely graph-based: no linear algebra involved.
///
/// Outer iteration shrinks a candidate set X; the inner least fixpoint
/// collects the vertices that can reach the target without ever being
/// forced out of X by chance.
pub fn almost_sure_reach_set(m: &Mdp, target: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    let g = m.game();
    let mut x: BTreeSet<VertexId> = g.vertices().collect();
    loop {
        let mut z: BTreeSet<VertexId> = target.intersection(&x).copied().collect();
        loop {
            let mut grew = false;
            for v in g.vertices() {
                if z.contains(&v) || !x.contains(&v) {
                    continue;
                }
                let admit = if g.is_stochastic(v) {
                    g.succ_ids(v).all(|w| x.contains(&w)) && g.succ_ids(v).any(|w| z.contains(&w))
                } else {
                    g.succ_ids(v).any(|w| z.contains(&w))
                };
                if admit {
                    z.insert(v);
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        if z == x {
            return x;
        }
        x = z;
    }
}
