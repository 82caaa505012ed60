//! Finite-state strategies: automata with output that play a game.
//!
//! A strategy observes the play one vertex at a time. At each step it first
//! answers for the current vertex (when it owns it), then folds the vertex
//! into its memory:
//!
//! * at memory `m` on vertex `v`, the move is drawn from `output[(m, v)]`;
//! * the next memory is `update[m][v]`.
//!
//! The update table is total over memory × vertices, so a strategy can be
//! dropped into any point of any play — in particular at the moment some
//! player deviates — and still track the history from there on.

use std::collections::{BTreeMap, BTreeSet};

use game_core::game::{Smg, VertexId};
use game_core::rational::Rational;
use num::{One, Zero};
use thiserror::Error;

/// A finite automaton with output, playing for a fixed set of vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteStateStrategy {
    /// Number of memory states.
    pub memory_count: usize,
    /// Memory before the first vertex is read.
    pub initial_memory: usize,
    /// `update[m][v]` is the memory after reading vertex `v` in memory `m`;
    /// one full row per memory state.
    pub update: Vec<Vec<usize>>,
    /// Vertices this strategy answers for.
    pub owned: BTreeSet<VertexId>,
    /// `output[(m, v)]` is the move distribution at owned vertex `v` in
    /// memory `m`; present for every such pair.
    pub output: BTreeMap<(usize, VertexId), Vec<(VertexId, Rational)>>,
}

#[derive(Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("memory bounds are inconsistent: {0}")]
    MemoryBounds(String),
    #[error("update table is not total: {0}")]
    UpdatePartial(String),
    #[error("output missing for memory {memory} at vertex {vertex}")]
    OutputMissing { memory: usize, vertex: VertexId },
    #[error("output at memory {memory}, vertex {vertex} is not a distribution over successors: {why}")]
    OutputInvalid { memory: usize, vertex: VertexId, why: String },
}

impl FiniteStateStrategy {
    /// A memoryless strategy from a fixed choice per owned vertex.
    pub fn positional(choices: &BTreeMap<VertexId, VertexId>, vertex_count: usize) -> Self {
        let output = choices
            .iter()
            .map(|(&v, &w)| ((0usize, v), vec![(w, Rational::one())]))
            .collect();
        FiniteStateStrategy {
            memory_count: 1,
            initial_memory: 0,
            update: vec![vec![0; vertex_count]],
            owned: choices.keys().copied().collect(),
            output,
        }
    }

    /// Checks the automaton shape against a game: the update table is total,
    /// outputs exist for every memory × owned vertex, and each output is a
    /// probability distribution supported on real successors.
    pub fn validate(&self, g: &Smg) -> Result<(), StrategyError> {
        let n = g.vertex_count();
        if self.memory_count == 0 {
            return Err(StrategyError::MemoryBounds("no memory states".into()));
        }
        if self.initial_memory >= self.memory_count {
            return Err(StrategyError::MemoryBounds(format!(
                "initial memory {} out of {} states",
                self.initial_memory, self.memory_count
            )));
        }
        if self.update.len() != self.memory_count {
            return Err(StrategyError::UpdatePartial(format!(
                "{} update rows for {} memory states",
                self.update.len(),
                self.memory_count
            )));
        }
        for (m, row) in self.update.iter().enumerate() {
            if row.len() != n {
                return Err(StrategyError::UpdatePartial(format!(
                    "memory {m} covers {} of {n} vertices",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&m2| m2 >= self.memory_count) {
                return Err(StrategyError::MemoryBounds(format!(
                    "memory {m} transitions to non-existent state {bad}"
                )));
            }
        }
        for &v in &self.owned {
            for m in 0..self.memory_count {
                let Some(dist) = self.output.get(&(m, v)) else {
                    return Err(StrategyError::OutputMissing { memory: m, vertex: v });
                };
                if dist.is_empty() {
                    return Err(StrategyError::OutputInvalid {
                        memory: m,
                        vertex: v,
                        why: "empty support".into(),
                    });
                }
                let mut total = Rational::zero();
                for (w, p) in dist {
                    if !g.succ_ids(v).any(|s| s == *w) {
                        return Err(StrategyError::OutputInvalid {
                            memory: m,
                            vertex: v,
                            why: format!("target {w} is not a successor"),
                        });
                    }
                    if *p <= Rational::zero() {
                        return Err(StrategyError::OutputInvalid {
                            memory: m,
                            vertex: v,
                            why: "non-positive weight in support".into(),
                        });
                    }
                    total += p.clone();
                }
                if !total.is_one() {
                    return Err(StrategyError::OutputInvalid {
                        memory: m,
                        vertex: v,
                        why: format!("weights sum to {total}"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Whether every output is a point distribution.
    pub fn is_pure(&self) -> bool {
        self.output.values().all(|d| d.len() == 1)
    }

    /// The unique move at `(m, v)` when the strategy is pure there.
    pub fn pure_choice(&self, m: usize, v: VertexId) -> Option<VertexId> {
        match self.output.get(&(m, v)).map(Vec::as_slice) {
            Some([(w, _)]) => Some(*w),
            _ => None,
        }
    }

    /// Memory after reading `v` in memory `m`.
    pub fn next_memory(&self, m: usize, v: VertexId) -> usize {
        self.update[m][v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use game_core::fixtures::g1;
    use game_core::rational::rat;

    #[test]
    fn positional_strategies_validate_on_their_game() {
        let g = g1();
        // g1: single player owning vertex 0 ("v") with a self loop.
        let mut choices = BTreeMap::new();
        for v in 0..g.vertex_count() {
            if g.owner(v) == Some(0) {
                let w = g.succ_ids(v).next().expect("vertex has a successor");
                choices.insert(v, w);
            }
        }
        let s = FiniteStateStrategy::positional(&choices, g.vertex_count());
        s.validate(&g).expect("positional strategy is well-formed");
        assert!(s.is_pure());
    }

    #[test]
    fn validation_rejects_foreign_targets_and_bad_weights() {
        let g = g1();
        let v = (0..g.vertex_count())
            .find(|&v| g.owner(v) == Some(0))
            .expect("g1 has an owned vertex");
        let w = g.succ_ids(v).next().unwrap();

        let mut bad_target = BTreeMap::new();
        bad_target.insert(v, v + 17);
        let s = FiniteStateStrategy::positional(&bad_target, g.vertex_count());
        assert!(matches!(s.validate(&g), Err(StrategyError::OutputInvalid { .. })));

        let mut s2 = FiniteStateStrategy::positional(
            &[(v, w)].into_iter().collect(),
            g.vertex_count(),
        );
        s2.output.insert((0, v), vec![(w, rat(1, 2))]);
        assert!(matches!(s2.validate(&g), Err(StrategyError::OutputInvalid { .. })));
    }
}
