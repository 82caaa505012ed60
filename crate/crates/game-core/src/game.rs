//! The game model: vertices, ownership, probabilistic transitions and one
//! winning condition per player.
//!
//! A [`Smg`] is a finite directed game graph. Every vertex is owned by
//! exactly one player or is stochastic ("chance"); outgoing edges of a
//! stochastic vertex carry probabilities that sum to one, edges of owned
//! vertices carry none. Every vertex has at least one successor, so plays
//! are infinite. Winning conditions are boolean conditions on the set of
//! vertices a play visits infinitely often; the colouring is the identity,
//! i.e. conditions talk directly about vertices.
//!
//! Construction goes through [`Smg::from_parts`] (or the JSON front end in
//! [`crate::format`]) and never produces a malformed game: all structural
//! invariants are checked up front and reported as [`Violation`]s, so
//! downstream algorithms can lean on them without re-checking.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Zero};
use thiserror::Error;

use crate::rational::{format_rational, in_unit_interval, Rational};

/// Player index, `0 .. players`.
pub type PlayerId = usize;
/// Vertex index, `0 .. vertex_count`. Assigned in lexicographic order of
/// vertex names, so serialization order is stable.
pub type VertexId = usize;

/// One pair of vertex sets shared by the Streett and Rabin readings.
///
/// Under Streett, a play satisfies the pair if visiting `fst` infinitely
/// often implies visiting `snd` infinitely often (all pairs must hold);
/// under Rabin it satisfies the pair if it visits `fst` infinitely often
/// and `snd` only finitely often (one pair suffices).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RabinPair {
    pub fst: BTreeSet<VertexId>,
    pub snd: BTreeSet<VertexId>,
}

impl RabinPair {
    pub fn new(fst: impl IntoIterator<Item = VertexId>, snd: impl IntoIterator<Item = VertexId>) -> Self {
        RabinPair { fst: fst.into_iter().collect(), snd: snd.into_iter().collect() }
    }
}

/// A winning condition, evaluated on the set of vertices visited
/// infinitely often (see `objectives::accepts_limit_set` for semantics).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Objective {
    /// Visit the set infinitely often.
    Buchi(BTreeSet<VertexId>),
    /// Eventually stay inside the set.
    CoBuchi(BTreeSet<VertexId>),
    /// Priority per vertex (index = vertex id, so the map is total); the
    /// least priority seen infinitely often must be even.
    Parity(Vec<u32>),
    /// Every pair must hold in the Streett reading.
    Streett(Vec<RabinPair>),
    /// Some pair must hold in the Rabin reading.
    Rabin(Vec<RabinPair>),
    /// The set of infinitely visited vertices must be a member.
    Muller(BTreeSet<BTreeSet<VertexId>>),
}

impl Objective {
    /// Short lowercase tag, matching the JSON exchange format.
    pub fn kind(&self) -> &'static str {
        match self {
            Objective::Buchi(_) => "buchi",
            Objective::CoBuchi(_) => "cobuchi",
            Objective::Parity(_) => "parity",
            Objective::Streett(_) => "streett",
            Objective::Rabin(_) => "rabin",
            Objective::Muller(_) => "muller",
        }
    }

    /// Largest vertex id mentioned, if any. Parity mentions `len - 1`.
    pub fn max_vertex(&self) -> Option<VertexId> {
        fn set_max(s: &BTreeSet<VertexId>) -> Option<VertexId> {
            s.iter().next_back().copied()
        }
        match self {
            Objective::Buchi(s) | Objective::CoBuchi(s) => set_max(s),
            Objective::Parity(p) => p.len().checked_sub(1),
            Objective::Streett(pairs) | Objective::Rabin(pairs) => pairs
                .iter()
                .filter_map(|p| set_max(&p.fst).max(set_max(&p.snd)))
                .max(),
            Objective::Muller(family) => family.iter().filter_map(set_max).max(),
        }
    }

    /// Rewrites every vertex id through `map`. `map` must be injective on
    /// the mentioned ids; parity additionally needs `new_len` for the new
    /// total priority vector, with unmapped slots defaulting to the old
    /// priority of whichever vertex maps there.
    pub fn remap(&self, map: impl Fn(VertexId) -> VertexId, new_len: usize) -> Objective {
        let remap_set =
            |s: &BTreeSet<VertexId>| -> BTreeSet<VertexId> { s.iter().map(|&v| map(v)).collect() };
        match self {
            Objective::Buchi(s) => Objective::Buchi(remap_set(s)),
            Objective::CoBuchi(s) => Objective::CoBuchi(remap_set(s)),
            Objective::Parity(p) => {
                let mut out = vec![0u32; new_len];
                for (v, &prio) in p.iter().enumerate() {
                    let nv = map(v);
                    if nv < new_len {
                        out[nv] = prio;
                    }
                }
                Objective::Parity(out)
            }
            Objective::Streett(pairs) => Objective::Streett(
                pairs.iter().map(|p| RabinPair { fst: remap_set(&p.fst), snd: remap_set(&p.snd) }).collect(),
            ),
            Objective::Rabin(pairs) => Objective::Rabin(
                pairs.iter().map(|p| RabinPair { fst: remap_set(&p.fst), snd: remap_set(&p.snd) }).collect(),
            ),
            Objective::Muller(family) => Objective::Muller(family.iter().map(remap_set).collect()),
        }
    }
}

/// One structural defect of a would-be game. `validate` reports all of
/// them rather than stopping at the first.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Violation {
    #[error("game has no vertices")]
    NoVertices,
    #[error("duplicate vertex name '{0}'")]
    DuplicateVertexName(String),
    #[error("vertex '{vertex}' is owned by player {player}, but the game has {players} players")]
    OwnerOutOfRange { vertex: String, player: PlayerId, players: usize },
    #[error("no successor at '{0}'")]
    NoSuccessor(String),
    #[error("duplicate edge {from} -> {to}")]
    DuplicateEdge { from: String, to: String },
    #[error("probability on controlled edge {from} -> {to}")]
    ProbabilityOnControlledEdge { from: String, to: String },
    #[error("missing probability on stochastic edge {from} -> {to}")]
    MissingProbability { from: String, to: String },
    #[error("probability {prob} out of range on edge {from} -> {to}")]
    ProbabilityOutOfRange { from: String, to: String, prob: String },
    #[error("probability sum != 1 at {vertex} (sum = {sum})")]
    ProbabilitySumNotOne { vertex: String, sum: String },
    #[error("expected {expected} objectives (one per player), found {found}")]
    ObjectiveCountMismatch { expected: usize, found: usize },
    #[error("objective for player {player} mentions unknown vertex id {vertex}")]
    ObjectiveVertexOutOfRange { player: PlayerId, vertex: VertexId },
    #[error("parity objective for player {player} is not total (covers {covered} of {expected} vertices)")]
    ParityNotTotal { player: PlayerId, covered: usize, expected: usize },
}

#[derive(Debug, Error)]
pub enum GameError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("invalid game: {}", render_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown vertex '{0}'")]
    UnknownVertex(String),
    #[error("no such player {player} (game has {players})")]
    NoSuchPlayer { player: PlayerId, players: usize },
    #[error("{0:?} is not a subarena")]
    NotSubarena(Vec<String>),
}

fn render_violations(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// A stochastic multiplayer game. Immutable once built; all structural
/// invariants hold by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smg {
    players: usize,
    /// Vertex names, lexicographically sorted; index is the [`VertexId`].
    names: Vec<String>,
    /// `Some(player)` for owned vertices, `None` for stochastic ones.
    owners: Vec<Option<PlayerId>>,
    /// Successor lists sorted by target id. The probability is present
    /// exactly on edges out of stochastic vertices.
    succ: Vec<Vec<(VertexId, Option<Rational>)>>,
    objectives: Vec<Objective>,
}

impl Smg {
    /// Builds and validates a game.
    ///
    /// `vertices` gives `(name, owner)` in any order; vertices are
    /// re-indexed into lexicographic name order, and the ids used in
    /// `edges` and `objectives` (which refer to positions in the *input*
    /// order) are rewritten accordingly. Callers that want stable indices
    /// simply pass names that are already sorted.
    pub fn from_parts(
        players: usize,
        vertices: Vec<(String, Option<PlayerId>)>,
        edges: Vec<(usize, usize, Option<Rational>)>,
        objectives: Vec<Objective>,
    ) -> Result<Smg, Vec<Violation>> {
        let mut violations = Vec::new();
        if vertices.is_empty() {
            violations.push(Violation::NoVertices);
            return Err(violations);
        }

        // Re-index into lexicographic name order.
        let mut order: Vec<usize> = (0..vertices.len()).collect();
        order.sort_by(|&a, &b| vertices[a].0.cmp(&vertices[b].0));
        let mut old_to_new = vec![0usize; vertices.len()];
        for (new, &old) in order.iter().enumerate() {
            old_to_new[old] = new;
        }
        let names: Vec<String> = order.iter().map(|&o| vertices[o].0.clone()).collect();
        let owners: Vec<Option<PlayerId>> = order.iter().map(|&o| vertices[o].1).collect();
        for w in names.windows(2) {
            if w[0] == w[1] {
                violations.push(Violation::DuplicateVertexName(w[0].clone()));
            }
        }
        if !violations.is_empty() {
            // Names are ambiguous; everything downstream would mislabel.
            return Err(violations);
        }
        let n = names.len();

        for (v, owner) in owners.iter().enumerate() {
            if let Some(p) = owner {
                if *p >= players {
                    violations.push(Violation::OwnerOutOfRange {
                        vertex: names[v].clone(),
                        player: *p,
                        players,
                    });
                }
            }
        }

        let mut succ: Vec<Vec<(VertexId, Option<Rational>)>> = vec![Vec::new(); n];
        let mut oob_edge = false;
        for (from, to, prob) in edges {
            if from >= n || to >= n {
                // Cannot be expressed through the name-based front end;
                // treat as a hard usage error.
                oob_edge = true;
                continue;
            }
            succ[old_to_new[from]].push((old_to_new[to], prob));
        }
        assert!(!oob_edge, "edge endpoint out of range in Smg::from_parts");

        for (v, row) in succ.iter_mut().enumerate() {
            row.sort_by_key(|&(w, _)| w);
            for pair in row.windows(2) {
                if pair[0].0 == pair[1].0 {
                    violations.push(Violation::DuplicateEdge {
                        from: names[v].clone(),
                        to: names[pair[0].0].clone(),
                    });
                }
            }
            if row.is_empty() {
                violations.push(Violation::NoSuccessor(names[v].clone()));
            }
            match owners[v] {
                Some(_) => {
                    for (w, p) in row.iter() {
                        if p.is_some() {
                            violations.push(Violation::ProbabilityOnControlledEdge {
                                from: names[v].clone(),
                                to: names[*w].clone(),
                            });
                        }
                    }
                }
                None => {
                    let mut sum = Rational::zero();
                    let mut complete = !row.is_empty();
                    for (w, p) in row.iter() {
                        match p {
                            None => {
                                violations.push(Violation::MissingProbability {
                                    from: names[v].clone(),
                                    to: names[*w].clone(),
                                });
                                complete = false;
                            }
                            Some(p) => {
                                if p.is_zero() || !in_unit_interval(p) {
                                    violations.push(Violation::ProbabilityOutOfRange {
                                        from: names[v].clone(),
                                        to: names[*w].clone(),
                                        prob: format_rational(p),
                                    });
                                    complete = false;
                                } else {
                                    sum += p;
                                }
                            }
                        }
                    }
                    if complete && !sum.is_one() {
                        violations.push(Violation::ProbabilitySumNotOne {
                            vertex: names[v].clone(),
                            sum: format_rational(&sum),
                        });
                    }
                }
            }
        }

        // Bounds are checked against the *input* indexing, before remap
        // (remapping would silently pad a short parity vector).
        if objectives.len() != players {
            violations.push(Violation::ObjectiveCountMismatch {
                expected: players,
                found: objectives.len(),
            });
        }
        let mut remappable = true;
        for (i, o) in objectives.iter().enumerate() {
            if let Objective::Parity(p) = o {
                if p.len() != n {
                    violations.push(Violation::ParityNotTotal {
                        player: i,
                        covered: p.len(),
                        expected: n,
                    });
                    remappable = false;
                }
            } else if let Some(max) = o.max_vertex() {
                if max >= n {
                    violations.push(Violation::ObjectiveVertexOutOfRange { player: i, vertex: max });
                    remappable = false;
                }
            }
        }
        let objectives: Vec<Objective> = if remappable {
            objectives.iter().map(|o| o.remap(|v| old_to_new[v], n)).collect()
        } else {
            objectives
        };

        if violations.is_empty() {
            Ok(Smg { players, names, owners, succ, objectives })
        } else {
            Err(violations)
        }
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    /// All vertex ids, `0..n`.
    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.names.len()
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v]
    }

    pub fn vertex_named(&self, name: &str) -> Option<VertexId> {
        self.names.binary_search_by(|probe| probe.as_str().cmp(name)).ok()
    }

    /// `Some(player)` for owned vertices, `None` for stochastic ones.
    pub fn owner(&self, v: VertexId) -> Option<PlayerId> {
        self.owners[v]
    }

    pub fn is_stochastic(&self, v: VertexId) -> bool {
        self.owners[v].is_none()
    }

    /// Successor list of `v`, sorted by target id; probabilities present
    /// exactly when `v` is stochastic.
    pub fn successors(&self, v: VertexId) -> &[(VertexId, Option<Rational>)] {
        &self.succ[v]
    }

    pub fn succ_ids(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.succ[v].iter().map(|&(w, _)| w)
    }

    pub fn has_edge(&self, v: VertexId, w: VertexId) -> bool {
        self.succ[v].binary_search_by_key(&w, |&(t, _)| t).is_ok()
    }

    /// Probability of the stochastic edge `v -> w`, if that edge exists
    /// and carries one.
    pub fn prob(&self, v: VertexId, w: VertexId) -> Option<&Rational> {
        self.succ[v]
            .binary_search_by_key(&w, |&(t, _)| t)
            .ok()
            .and_then(|idx| self.succ[v][idx].1.as_ref())
    }

    pub fn objective(&self, player: PlayerId) -> &Objective {
        &self.objectives[player]
    }

    pub fn objectives(&self) -> &[Objective] {
        &self.objectives
    }

    /// Vertices owned by `player`, ascending.
    pub fn owned_by(&self, player: PlayerId) -> Vec<VertexId> {
        self.vertices().filter(|&v| self.owners[v] == Some(player)).collect()
    }

    /// Same game with the objectives replaced (count must match).
    pub fn with_objectives(&self, objectives: Vec<Objective>) -> Smg {
        assert_eq!(objectives.len(), self.players);
        Smg { objectives, ..self.clone() }
    }

    /// Same graph, re-tagged with a different number of players and a
    /// fresh owner assignment (used to build derived one- and two-player
    /// games over an existing arena).
    pub fn with_ownership(&self, players: usize, owners: Vec<Option<PlayerId>>, objectives: Vec<Objective>) -> Smg {
        assert_eq!(owners.len(), self.names.len());
        assert_eq!(objectives.len(), players);
        for (v, o) in owners.iter().enumerate() {
            // Probability annotations are part of the edge data, so a
            // vertex may only switch between owners, not flavours.
            assert_eq!(o.is_none(), self.owners[v].is_none(), "vertex {v} changes flavour");
            if let Some(p) = o {
                assert!(*p < players);
            }
        }
        Smg { players, names: self.names.clone(), owners, succ: self.succ.clone(), objectives }
    }
}

impl fmt::Display for Smg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Smg({} players, {} vertices)", self.players, self.names.len())
    }
}

/// A game together with a distinguished start vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialisedSmg {
    pub game: Smg,
    pub initial: VertexId,
}

impl InitialisedSmg {
    pub fn new(game: Smg, initial: VertexId) -> Result<Self, GameError> {
        if initial >= game.vertex_count() {
            return Err(GameError::UnknownVertex(format!("#{initial}")));
        }
        Ok(InitialisedSmg { game, initial })
    }
}

/// Checks the subarena conditions for `U`: non-empty, every member keeps
/// at least one successor inside, and stochastic members keep all of them.
pub fn is_subarena(g: &Smg, u: &BTreeSet<VertexId>) -> bool {
    if u.is_empty() || u.iter().any(|&v| v >= g.vertex_count()) {
        return false;
    }
    u.iter().all(|&v| {
        if g.is_stochastic(v) {
            g.succ_ids(v).all(|w| u.contains(&w))
        } else {
            g.succ_ids(v).any(|w| u.contains(&w))
        }
    })
}

/// The game induced on a subarena `U`: vertices outside `U` and edges
/// leaving `U` disappear, ids are compacted (name order is preserved), and
/// each objective is rewritten to the surviving vertices — sets are
/// intersected with `U`, parity is restricted, and Muller members not
/// contained in `U` are dropped. Rejects `U` that is not a subarena.
pub fn restrict(g: &Smg, u: &BTreeSet<VertexId>) -> Result<Smg, GameError> {
    if !is_subarena(g, u) {
        let offenders = u
            .iter()
            .filter(|&&v| v < g.vertex_count())
            .filter(|&&v| {
                if g.is_stochastic(v) {
                    !g.succ_ids(v).all(|w| u.contains(&w))
                } else {
                    !g.succ_ids(v).any(|w| u.contains(&w))
                }
            })
            .map(|&v| g.name(v).to_owned())
            .collect();
        return Err(GameError::NotSubarena(offenders));
    }
    let kept: Vec<VertexId> = u.iter().copied().collect();
    let new_id: BTreeMap<VertexId, usize> =
        kept.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let vertices: Vec<(String, Option<PlayerId>)> =
        kept.iter().map(|&v| (g.name(v).to_owned(), g.owner(v))).collect();
    let mut edges = Vec::new();
    for &v in &kept {
        for (w, p) in g.successors(v) {
            if let Some(&nw) = new_id.get(w) {
                edges.push((new_id[&v], nw, p.clone()));
            }
        }
    }
    let objectives: Vec<Objective> = g
        .objectives()
        .iter()
        .map(|o| restrict_objective(o, u, &new_id, kept.len()))
        .collect();
    Smg::from_parts(g.players(), vertices, edges, objectives).map_err(GameError::Invalid)
}

fn restrict_objective(
    o: &Objective,
    u: &BTreeSet<VertexId>,
    new_id: &BTreeMap<VertexId, usize>,
    new_len: usize,
) -> Objective {
    let cut = |s: &BTreeSet<VertexId>| -> BTreeSet<VertexId> {
        s.iter().filter_map(|v| new_id.get(v).copied()).collect()
    };
    match o {
        Objective::Buchi(s) => Objective::Buchi(cut(s)),
        Objective::CoBuchi(s) => Objective::CoBuchi(cut(s)),
        Objective::Parity(p) => {
            let mut out = vec![0u32; new_len];
            for (&old, &new) in new_id.iter() {
                out[new] = p[old];
            }
            Objective::Parity(out)
        }
        Objective::Streett(pairs) => Objective::Streett(
            pairs.iter().map(|p| RabinPair { fst: cut(&p.fst), snd: cut(&p.snd) }).collect(),
        ),
        Objective::Rabin(pairs) => Objective::Rabin(
            pairs.iter().map(|p| RabinPair { fst: cut(&p.fst), snd: cut(&p.snd) }).collect(),
        ),
        Objective::Muller(family) => Objective::Muller(
            family.iter().filter(|m| m.is_subset(u)).map(|m| cut(m)).collect(),
        ),
    }
}

/// The two-sided view of one player against the coalition of all others.
///
/// The underlying game is unchanged; `protagonist` marks whose objective
/// is at stake. The coalition's objective is by definition the complement
/// of the protagonist's, so it is never materialised here — consumers that
/// need it complement on demand.
#[derive(Debug, Clone)]
pub struct CoalitionGame {
    pub game: Smg,
    pub protagonist: PlayerId,
}

impl CoalitionGame {
    /// Which side a vertex belongs to: `Some(true)` protagonist,
    /// `Some(false)` coalition, `None` stochastic.
    pub fn side(&self, v: VertexId) -> Option<bool> {
        self.game.owner(v).map(|p| p == self.protagonist)
    }
}

/// Builds the coalition view for `player`.
pub fn coalition_view(g: &Smg, player: PlayerId) -> Result<CoalitionGame, GameError> {
    if player >= g.players() {
        return Err(GameError::NoSuchPlayer { player, players: g.players() });
    }
    Ok(CoalitionGame { game: g.clone(), protagonist: player })
}
