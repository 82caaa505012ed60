//! Evaluating winning conditions on limit sets, and extensional
//! complementation.
//!
//! Every condition in this workspace is a tail condition determined by the
//! set of vertices a play visits infinitely often (its limit set), which
//! for an infinite play on a finite graph is always non-empty.

use std::collections::BTreeSet;

use game_core::game::{Objective, RabinPair, VertexId};
use thiserror::Error;

/// Decides whether a play with limit set `inf` satisfies `o`.
///
/// Panics on an empty `inf`: limit sets of infinite plays are never empty,
/// so an empty argument is always a caller bug.
pub fn accepts_limit_set(o: &Objective, inf: &BTreeSet<VertexId>) -> bool {
    assert!(!inf.is_empty(), "limit sets are non-empty by definition");
    match o {
        Objective::Buchi(f) => !inf.is_disjoint(f),
        Objective::CoBuchi(f) => inf.is_subset(f),
        Objective::Parity(prio) => {
            let min = inf.iter().map(|&v| prio[v]).min().expect("inf non-empty");
            min % 2 == 0
        }
        Objective::Streett(pairs) => pairs
            .iter()
            .all(|p| inf.is_disjoint(&p.fst) || !inf.is_disjoint(&p.snd)),
        Objective::Rabin(pairs) => pairs
            .iter()
            .any(|p| !inf.is_disjoint(&p.fst) && inf.is_disjoint(&p.snd)),
        Objective::Muller(family) => family.contains(inf),
    }
}

#[derive(Debug, Error)]
pub enum ComplementError {
    #[error("refusing to materialise the complement of a Muller family over {0} vertices")]
    MullerTooLarge(usize),
}

/// Upper bound on the vertex count for which a complemented Muller family
/// is materialised explicitly (2^16 candidate members).
pub const MULLER_COMPLEMENT_LIMIT: usize = 16;

/// Builds an objective accepting exactly the limit sets `o` rejects,
/// over a game with `n` vertices.
///
/// Büchi and co-Büchi complement into each other, parity shifts every
/// priority by one, and Streett/Rabin swap readings over the same pairs.
/// Only Muller needs the universe: its complement family is materialised
/// by enumerating non-empty subsets, which is refused above
/// [`MULLER_COMPLEMENT_LIMIT`] vertices.
pub fn complement_objective(o: &Objective, n: usize) -> Result<Objective, ComplementError> {
    let full: BTreeSet<VertexId> = (0..n).collect();
    Ok(match o {
        Objective::Buchi(f) => Objective::CoBuchi(full.difference(f).copied().collect()),
        Objective::CoBuchi(f) => Objective::Buchi(full.difference(f).copied().collect()),
        Objective::Parity(prio) => Objective::Parity(prio.iter().map(|p| p + 1).collect()),
        Objective::Streett(pairs) => Objective::Rabin(pairs.clone()),
        Objective::Rabin(pairs) => Objective::Streett(pairs.clone()),
        Objective::Muller(family) => {
            if n > MULLER_COMPLEMENT_LIMIT {
                return Err(ComplementError::MullerTooLarge(n));
            }
            let mut out = BTreeSet::new();
            for mask in 1u32..(1 << n) {
                let candidate: BTreeSet<VertexId> =
                    (0..n).filter(|v| mask & (1 << v) != 0).collect();
                if !family.contains(&candidate) {
                    out.insert(candidate);
                }
            }
            Objective::Muller(out)
        }
    })
}

/// Streett pairs equivalent to a min-parity condition: one pair per odd
/// priority `p` in use, firing on `{prio = p}` and requiring a smaller
/// even priority infinitely often.
pub fn parity_to_streett(prio: &[u32]) -> Vec<RabinPair> {
    let mut odd: Vec<u32> = prio.iter().copied().filter(|p| p % 2 == 1).collect();
    odd.sort_unstable();
    odd.dedup();
    odd.iter()
        .map(|&p| RabinPair {
            fst: prio.iter().enumerate().filter(|&(_, &q)| q == p).map(|(v, _)| v).collect(),
            snd: prio
                .iter()
                .enumerate()
                .filter(|&(_, &q)| q % 2 == 0 && q < p)
                .map(|(v, _)| v)
                .collect(),
        })
        .collect()
}

/// Rabin pairs equivalent to a min-parity condition: one pair per even
/// priority `q` in use, firing on `{prio = q}` with everything smaller
/// forbidden.
pub fn parity_to_rabin(prio: &[u32]) -> Vec<RabinPair> {
    let mut even: Vec<u32> = prio.iter().copied().filter(|p| p % 2 == 0).collect();
    even.sort_unstable();
    even.dedup();
    even.iter()
        .map(|&q| RabinPair {
            fst: prio.iter().enumerate().filter(|&(_, &p)| p == q).map(|(v, _)| v).collect(),
            snd: prio.iter().enumerate().filter(|&(_, &p)| p < q).map(|(v, _)| v).collect(),
        })
        .collect()
}

/// The Streett pairs accepting exactly what `o` accepts, for every kind
/// that has a polynomial Streett presentation (everything except Muller,
/// and except Rabin which only complements into Streett).
pub fn to_streett_pairs(o: &Objective, n: usize) -> Option<Vec<RabinPair>> {
    let full: BTreeSet<VertexId> = (0..n).collect();
    match o {
        Objective::Buchi(f) => Some(vec![RabinPair { fst: full, snd: f.clone() }]),
        Objective::CoBuchi(f) => Some(vec![RabinPair {
            fst: full.difference(f).copied().collect(),
            snd: BTreeSet::new(),
        }]),
        Objective::Parity(prio) => Some(parity_to_streett(prio)),
        Objective::Streett(pairs) => Some(pairs.clone()),
        Objective::Rabin(_) | Objective::Muller(_) => None,
    }
}
