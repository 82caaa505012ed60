//! PosNE search: walk every positional profile in lexicographic order of
//! its choice table and return the first one whose certificate accepts.
//! The sweep is embarrassingly parallel; the parallel build keeps the
//! sequential result by always taking the earliest accepted index.

use game_core::game::{Smg, VertexId};
use prob_solvers::{enumerate_positional_profiles, PositionalProfile, ENUMERATION_LIMIT};
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::certify::certify_positional;
use crate::types::{Certificate, NashError, ThresholdQuery};

/// Default bound on how many profiles a search may enumerate.
pub const DEFAULT_PROFILE_CAP: usize = 1 << 20;

/// Number of positional profiles of `g`, if it fits a `usize`.
pub fn positional_profile_count(g: &Smg) -> Option<usize> {
    g.vertices()
        .filter(|&v| !g.is_stochastic(v))
        .map(|v| g.successors(v).len())
        .try_fold(1usize, |acc, d| acc.checked_mul(d))
}

fn enumerate_capped(g: &Smg, cap: usize) -> Result<Vec<PositionalProfile>, NashError> {
    let cap = cap.min(ENUMERATION_LIMIT);
    match positional_profile_count(g) {
        Some(count) if count <= cap => Ok(enumerate_positional_profiles(g)),
        Some(count) => Err(NashError::SearchSpaceExceeded { profiles: count, cap }),
        None => Err(NashError::SearchSpaceExceeded { profiles: usize::MAX, cap }),
    }
}

fn check_inputs(g: &Smg, v0: VertexId, q: &ThresholdQuery) -> Result<(), NashError> {
    if v0 >= g.vertex_count() {
        return Err(NashError::Game(game_core::game::GameError::UnknownVertex(format!(
            "#{v0}"
        ))));
    }
    if q.players() != g.players() {
        return Err(NashError::BadQuery(format!(
            "query names {} players, game has {}",
            q.players(),
            g.players()
        )));
    }
    Ok(())
}

fn certify_enumerated(
    g: &Smg,
    v0: VertexId,
    p: &PositionalProfile,
    q: &ThresholdQuery,
) -> Certificate {
    // Enumerated profiles are complete by construction and the inputs were
    // checked up front, so certification cannot fail here.
    certify_positional(g, v0, p, q).expect("enumerated profile certifies cleanly")
}

/// First accepted profile in lexicographic enumeration order, with its
/// certificate, or `None` once every profile is rejected.
///
/// Candidates are evaluated concurrently when the `parallel` feature is
/// on; the winner is still the earliest accepted profile, so the result
/// is identical to [`solve_posne_sequential`] regardless of thread count.
/// Searches larger than `cap` profiles are refused, never truncated.
pub fn solve_posne(
    g: &Smg,
    v0: VertexId,
    q: &ThresholdQuery,
    cap: usize,
) -> Result<Option<(PositionalProfile, Certificate)>, NashError> {
    check_inputs(g, v0, q)?;
    let profiles = enumerate_capped(g, cap)?;
    #[cfg(feature = "parallel")]
    {
        Ok(profiles.into_par_iter().find_map_first(|p| {
            let cert = certify_enumerated(g, v0, &p, q);
            cert.accepted.then_some((p, cert))
        }))
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(first_accepted_sequentially(g, v0, q, profiles))
    }
}

/// The reference single-threaded sweep; behaviourally identical to
/// [`solve_posne`].
pub fn solve_posne_sequential(
    g: &Smg,
    v0: VertexId,
    q: &ThresholdQuery,
    cap: usize,
) -> Result<Option<(PositionalProfile, Certificate)>, NashError> {
    check_inputs(g, v0, q)?;
    let profiles = enumerate_capped(g, cap)?;
    Ok(first_accepted_sequentially(g, v0, q, profiles))
}

fn first_accepted_sequentially(
    g: &Smg,
    v0: VertexId,
    q: &ThresholdQuery,
    profiles: Vec<PositionalProfile>,
) -> Option<(PositionalProfile, Certificate)> {
    profiles.into_iter().find_map(|p| {
        let cert = certify_enumerated(g, v0, &p, q);
        cert.accepted.then_some((p, cert))
    })
}
