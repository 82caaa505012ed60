//! Seeded random game generation for cross-check corpora.
//!
//! The brute-force comparison suites (library tests and the CLI's `oracle`
//! subcommand) run on corpora of small random games. Generation is fully
//! deterministic in the seed (ChaCha8), so a reported discrepancy can be
//! reproduced from its seed alone. Vertex names are zero-padded, which
//! keeps generated ids in generation order after canonical sorting.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::game::{Objective, PlayerId, RabinPair, Smg, VertexId};
use crate::rational::Rational;

/// Which objective shapes the generator may hand out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    Buchi,
    CoBuchi,
    Parity,
    Streett,
    Rabin,
    Muller,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 6] = [
        ObjectiveKind::Buchi,
        ObjectiveKind::CoBuchi,
        ObjectiveKind::Parity,
        ObjectiveKind::Streett,
        ObjectiveKind::Rabin,
        ObjectiveKind::Muller,
    ];
}

#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub players: usize,
    pub vertices: usize,
    /// Chance of a vertex being stochastic, as percent 0..=100.
    pub stochastic_percent: u32,
    /// Upper bound on out-degree (at least 1 edge is always created).
    pub max_successors: usize,
    pub kinds: Vec<ObjectiveKind>,
    /// Upper bound on Streett/Rabin pair count (at least 1).
    pub max_pairs: usize,
    /// Priorities are drawn from `0..=max_priority`.
    pub max_priority: u32,
}

impl GeneratorConfig {
    pub fn new(players: usize, vertices: usize) -> Self {
        GeneratorConfig {
            players,
            vertices,
            stochastic_percent: 35,
            max_successors: 3,
            kinds: ObjectiveKind::ALL.to_vec(),
            max_pairs: 2,
            max_priority: 3,
        }
    }

    pub fn with_kinds(mut self, kinds: &[ObjectiveKind]) -> Self {
        self.kinds = kinds.to_vec();
        self
    }
}

/// Deterministic RNG for a corpus element: one seed, one game.
pub fn corpus_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generates one structurally valid random game.
pub fn random_game(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Smg {
    assert!(cfg.vertices >= 1);
    let n = cfg.vertices;
    let mut vertices = Vec::with_capacity(n);
    for v in 0..n {
        let stochastic = rng.gen_range(0..100) < cfg.stochastic_percent;
        let owner: Option<PlayerId> = if stochastic || cfg.players == 0 {
            None
        } else {
            Some(rng.gen_range(0..cfg.players))
        };
        vertices.push((format!("v{v:03}"), owner));
    }

    let mut edges = Vec::new();
    for v in 0..n {
        let degree = rng.gen_range(1..=cfg.max_successors.clamp(1, n));
        let mut targets = BTreeSet::new();
        targets.insert(rng.gen_range(0..n));
        while targets.len() < degree {
            targets.insert(rng.gen_range(0..n));
        }
        if vertices[v].1.is_none() {
            // Integer weights normalised by their sum give exact
            // probabilities that add up to 1.
            let weights: Vec<u32> = targets.iter().map(|_| rng.gen_range(1..=4)).collect();
            let total: u32 = weights.iter().sum();
            for (w, weight) in targets.iter().zip(weights) {
                edges.push((v, *w, Some(Rational::new(weight.into(), total.into()))));
            }
        } else {
            for w in targets {
                edges.push((v, w, None));
            }
        }
    }

    let objectives = (0..cfg.players).map(|_| random_objective(cfg, rng)).collect();
    Smg::from_parts(cfg.players, vertices, edges, objectives)
        .expect("generator output is structurally valid by construction")
}

/// Generates one objective of an allowed kind over `cfg.vertices` ids.
pub fn random_objective(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Objective {
    let n = cfg.vertices;
    let kind = cfg.kinds[rng.gen_range(0..cfg.kinds.len())];
    let subset = |rng: &mut ChaCha8Rng, nonempty: bool| -> BTreeSet<VertexId> {
        loop {
            let s: BTreeSet<VertexId> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
            if !s.is_empty() || !nonempty {
                return s;
            }
        }
    };
    match kind {
        ObjectiveKind::Buchi => Objective::Buchi(subset(rng, false)),
        ObjectiveKind::CoBuchi => Objective::CoBuchi(subset(rng, false)),
        ObjectiveKind::Parity => {
            Objective::Parity((0..n).map(|_| rng.gen_range(0..=cfg.max_priority)).collect())
        }
        ObjectiveKind::Streett => Objective::Streett(random_pairs(cfg, rng)),
        ObjectiveKind::Rabin => Objective::Rabin(random_pairs(cfg, rng)),
        ObjectiveKind::Muller => {
            let members = rng.gen_range(0..=3.min(n));
            Objective::Muller((0..members).map(|_| subset(rng, true)).collect())
        }
    }
}

fn random_pairs(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Vec<RabinPair> {
    let n = cfg.vertices;
    let count = rng.gen_range(1..=cfg.max_pairs.max(1));
    let small_subset = |rng: &mut ChaCha8Rng| -> BTreeSet<VertexId> {
        let size = rng.gen_range(0..=2.min(n));
        let mut s = BTreeSet::new();
        while s.len() < size {
            s.insert(rng.gen_range(0..n));
        }
        s
    };
    (0..count)
        .map(|_| RabinPair { fst: small_subset(rng), snd: small_subset(rng) })
        .collect()
}
