//! Markov chains induced by fully fixed profiles, exact reachability, and
//! long-run payoffs per objective.
//!
//! A play of a finite chain settles almost surely into one bottom SCC and
//! then visits all of it infinitely often, so the limit set is the BSCC
//! itself. Long-run payoffs therefore reduce to: find the bottom SCCs,
//! evaluate each objective on their projections to game vertices, and sum
//! exact reachability probabilities of the accepting ones.

use std::collections::BTreeSet;

use game_core::game::{Objective, Smg, VertexId};
use game_core::rational::Rational;
use num::{One, Zero};
use objectives::{accepts_limit_set, scc_decomposition};
use thiserror::Error;

use crate::linalg::{solve_exact, LinalgError};
use crate::profiles::{ProfileError, StationaryProfile};

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("profile does not induce a chain: {0}")]
    Profile(#[from] ProfileError),
    #[error("state {state} has {problem}")]
    BadRow { state: usize, problem: String },
    #[error("linear solve failed: {0}")]
    Linalg(#[from] LinalgError),
}

/// Where a chain state came from: a game vertex, possibly paired with a
/// strategy-memory element when the chain is a product construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ChainState {
    pub vertex: VertexId,
    pub memory: usize,
}

impl ChainState {
    pub fn plain(vertex: VertexId) -> Self {
        ChainState { vertex, memory: 0 }
    }
}

/// A finite Markov chain with exact transition probabilities and a
/// provenance record per state.
#[derive(Debug, Clone)]
pub struct MarkovChain {
    rows: Vec<Vec<(usize, Rational)>>,
    origin: Vec<ChainState>,
}

impl MarkovChain {
    /// Validates and normalises rows: targets merged and sorted, all
    /// probabilities positive, each row non-empty and summing to one.
    pub fn new(rows: Vec<Vec<(usize, Rational)>>, origin: Vec<ChainState>) -> Result<Self, ChainError> {
        assert_eq!(rows.len(), origin.len(), "one provenance entry per state");
        let n = rows.len();
        let mut normalised = Vec::with_capacity(n);
        for (state, row) in rows.into_iter().enumerate() {
            let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(row.len());
            let mut sorted = row;
            sorted.sort_by_key(|&(t, _)| t);
            for (t, p) in sorted {
                if t >= n {
                    return Err(ChainError::BadRow { state, problem: format!("target {t} out of range") });
                }
                if p.is_zero() {
                    continue;
                }
                if p < Rational::zero() {
                    return Err(ChainError::BadRow { state, problem: "a negative probability".into() });
                }
                match merged.last_mut() {
                    Some((last, q)) if *last == t => *q += p,
                    _ => merged.push((t, p)),
                }
            }
            if merged.is_empty() {
                return Err(ChainError::BadRow { state, problem: "no outgoing probability".into() });
            }
            let sum: Rational = merged.iter().map(|(_, p)| p).fold(Rational::zero(), |s, p| s + p);
            if !sum.is_one() {
                return Err(ChainError::BadRow { state, problem: format!("row sum {sum}") });
            }
            normalised.push(merged);
        }
        Ok(MarkovChain { rows: normalised, origin })
    }

    pub fn states(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, s: usize) -> &[(usize, Rational)] {
        &self.rows[s]
    }

    pub fn origin(&self, s: usize) -> ChainState {
        self.origin[s]
    }

    /// States whose origin vertex lies in `vs`.
    pub fn states_over(&self, vs: &BTreeSet<VertexId>) -> BTreeSet<usize> {
        (0..self.states()).filter(|&s| vs.contains(&self.origin[s].vertex)).collect()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        self.rows.iter().map(|row| row.iter().map(|&(t, _)| t).collect()).collect()
    }

    /// Bottom SCCs: strongly connected components without outgoing edges,
    /// sorted by least state.
    pub fn bottom_sccs(&self) -> Vec<BTreeSet<usize>> {
        let adj = self.adjacency();
        let mut bsccs: Vec<BTreeSet<usize>> = scc_decomposition(&adj)
            .into_iter()
            .filter(|comp| {
                comp.iter().all(|&s| self.rows[s].iter().all(|&(t, _)| comp.binary_search(&t).is_ok()))
            })
            .map(|comp| comp.into_iter().collect())
            .collect();
        bsccs.sort();
        bsccs
    }
}

/// The chain obtained by fixing every controlled vertex of `g` to the
/// profile's distribution. States are game vertices.
pub fn induce_markov_chain(g: &Smg, p: &StationaryProfile) -> Result<MarkovChain, ChainError> {
    p.validate_covering(g, None)?;
    let mut rows = Vec::with_capacity(g.vertex_count());
    for v in g.vertices() {
        if g.is_stochastic(v) {
            rows.push(
                g.successors(v)
                    .iter()
                    .map(|(w, pr)| (*w, pr.clone().expect("stochastic edges carry probabilities")))
                    .collect(),
            );
        } else {
            rows.push(p.rows[&v].clone());
        }
    }
    let origin = g.vertices().map(ChainState::plain).collect();
    MarkovChain::new(rows, origin)
}

/// Exact probability, per state, of ever reaching `target`.
///
/// States that cannot reach `target` in the underlying graph are exactly
/// 0; target states are exactly 1; the rest solve the first-passage
/// linear system. The pruning step is what makes the system non-singular.
pub fn reach_probabilities_exact(
    mc: &MarkovChain,
    target: &BTreeSet<usize>,
) -> Result<Vec<Rational>, ChainError> {
    let n = mc.states();
    let mut can_reach = vec![false; n];
    // Backward closure from the target.
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        for &(t, _) in mc.row(s) {
            preds[t].push(s);
        }
    }
    let mut stack: Vec<usize> = target.iter().copied().filter(|&s| s < n).collect();
    for &s in &stack {
        can_reach[s] = true;
    }
    while let Some(s) = stack.pop() {
        for &p in &preds[s] {
            if !can_reach[p] {
                can_reach[p] = true;
                stack.push(p);
            }
        }
    }

    let interior: Vec<usize> =
        (0..n).filter(|&s| can_reach[s] && !target.contains(&s)).collect();
    let index_of = |s: usize| interior.binary_search(&s).ok();

    // p(s) = Σ_{t interior} P(s,t) p(t) + Σ_{t target} P(s,t)
    let m = interior.len();
    let mut a = vec![vec![Rational::zero(); m]; m];
    let mut b = vec![Rational::zero(); m];
    for (i, &s) in interior.iter().enumerate() {
        a[i][i] += Rational::one();
        for (t, pr) in mc.row(s) {
            if target.contains(t) {
                b[i] += pr;
            } else if let Some(j) = index_of(*t) {
                a[i][j] -= pr;
            }
        }
    }
    let solution = solve_exact(&a, &b)?;

    let mut out = vec![Rational::zero(); n];
    for &s in target {
        if s < n {
            out[s] = Rational::one();
        }
    }
    for (i, &s) in interior.iter().enumerate() {
        out[s] = solution[i].clone();
    }
    debug_assert!(out.iter().all(|p| *p >= Rational::zero() && *p <= Rational::one()));
    Ok(out)
}

/// Long-run payoff vector of the chain from `from`: for each player, the
/// probability that the limit set satisfies that player's objective.
///
/// Objectives are evaluated on bottom SCCs projected through the
/// provenance record to game vertices.
pub fn mc_omega_payoff(
    mc: &MarkovChain,
    objectives: &[Objective],
    from: usize,
) -> Result<Vec<Rational>, ChainError> {
    let payoffs = mc_omega_payoff_all_states(mc, objectives)?;
    Ok(payoffs.into_iter().map(|per_state| per_state[from].clone()).collect())
}

/// Like [`mc_omega_payoff`] but returns, per player, the payoff from every
/// state (one linear solve per player either way).
pub fn mc_omega_payoff_all_states(
    mc: &MarkovChain,
    objectives: &[Objective],
) -> Result<Vec<Vec<Rational>>, ChainError> {
    let bsccs = mc.bottom_sccs();
    let projections: Vec<BTreeSet<VertexId>> = bsccs
        .iter()
        .map(|b| b.iter().map(|&s| mc.origin(s).vertex).collect())
        .collect();
    let mut out = Vec::with_capacity(objectives.len());
    for o in objectives {
        let mut accepting: BTreeSet<usize> = BTreeSet::new();
        for (b, proj) in bsccs.iter().zip(&projections) {
            if accepts_limit_set(o, proj) {
                accepting.extend(b.iter().copied());
            }
        }
        out.push(reach_probabilities_exact(mc, &accepting)?);
    }
    Ok(out)
}
