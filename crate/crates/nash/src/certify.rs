//! Certifying candidate profiles: fix the profile, evaluate the induced
//! chain exactly, evaluate every player's best deviation exactly, and
//! accept only when nobody gains and the payoff sits inside the queried
//! box. Certification is the ground truth the search routines lean on.

use game_core::game::{Smg, VertexId};
use game_core::rational::Rational;
use prob_solvers::{
    induce_markov_chain, induce_mdp, mc_omega_payoff, mdp_omega_value, serialize_profile,
    PositionalProfile, StationaryProfile,
};

use crate::types::{Certificate, NashError, ThresholdQuery};

/// Exact payoff vector of the stationary profile `s` from `v0` and, per
/// player, the exact value of their best deviation against the others.
pub(crate) fn evaluate_profile(
    g: &Smg,
    v0: VertexId,
    s: &StationaryProfile,
) -> Result<(Vec<Rational>, Vec<Rational>), NashError> {
    let chain = induce_markov_chain(g, s)?;
    let payoff = mc_omega_payoff(&chain, g.objectives(), v0)?;
    let mut best_response = Vec::with_capacity(g.players());
    for i in 0..g.players() {
        let mdp = induce_mdp(g, s, i)?;
        let outcome = mdp_omega_value(&mdp, g.objective(i))?;
        best_response.push(outcome.values[v0].clone());
    }
    Ok((payoff, best_response))
}

/// Certifies a stationary profile: computes the exact payoff `z` of the
/// induced chain from `v0` and each player's exact best-response value
/// `r_i` when freed against the rest, then accepts iff for every player
/// `r_i <= z_i` and `min_i <= z_i <= max_i`.
pub fn certify_stationary(
    g: &Smg,
    v0: VertexId,
    s: &StationaryProfile,
    q: &ThresholdQuery,
) -> Result<Certificate, NashError> {
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
    s.validate_covering(g, None)?;
    let (payoff, best_response) = evaluate_profile(g, v0, s)?;
    Ok(Certificate::from_values(payoff, best_response, q, serialize_profile(s, g)))
}

/// Certifies a positional profile by certifying its Dirac embedding; the
/// resulting certificate is identical to the stationary one.
pub fn certify_positional(
    g: &Smg,
    v0: VertexId,
    p: &PositionalProfile,
    q: &ThresholdQuery,
) -> Result<Certificate, NashError> {
    certify_stationary(g, v0, &p.to_stationary(), q)
}
