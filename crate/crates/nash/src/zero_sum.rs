//! Equilibrium certification on zero-sum arenas, where a Nash
//! equilibrium is the same thing as a pair of optimal strategies.
//!
//! The certifier therefore pins the accepted payoff to the game value:
//! it recomputes the value `val` from scratch — enumerating positional
//! strategies for whichever side's objective class admits positional
//! optima and answering each with an exact MDP best response — and
//! accepts only pairs that are deviation-free *and* realise exactly
//! `(val, 1 − val)`. For equilibria the two conditions coincide, so the
//! pinned box is a genuine cross-check, not a narrowing.

use std::collections::BTreeSet;

use game_core::game::{GameError, PlayerId, Smg, VertexId};
use game_core::rational::{format_rational, Rational};
use num::One;
use objectives::accepts_limit_set;
use prob_solvers::{induce_mdp, mdp_omega_value, serialize_profile, StationaryProfile};

use crate::certify::evaluate_profile;
use crate::types::{Certificate, NashError, ThresholdQuery};

/// Largest vertex count for which the complementarity of the two
/// objectives is checked over every non-empty vertex subset.
pub const ZERO_SUM_CHECK_LIMIT: usize = 16;

/// Most positional strategies enumerated for one side of the value
/// oracle.
pub const ZERO_SUM_ORACLE_CAP: usize = 1 << 16;

/// Objective classes whose owner always has a positional optimal
/// strategy, making one-sided enumeration reach the game value.
fn positional_class(kind: &str) -> bool {
    matches!(kind, "buchi" | "cobuchi" | "parity" | "rabin")
}

/// Checks the two objectives are complementary on every non-empty
/// vertex subset.
fn check_complementary(g: &Smg) -> Result<(), NashError> {
    let n = g.vertex_count();
    if n > ZERO_SUM_CHECK_LIMIT {
        return Err(NashError::OracleUnsupported(format!(
            "complementarity check covers at most {ZERO_SUM_CHECK_LIMIT} vertices, game has {n}"
        )));
    }
    for mask in 1u32..(1u32 << n) {
        let limit: BTreeSet<VertexId> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
        if accepts_limit_set(g.objective(0), &limit) == accepts_limit_set(g.objective(1), &limit) {
            let members: Vec<&str> = limit.iter().map(|&v| g.name(v)).collect();
            return Err(NashError::NotZeroSum(format!(
                "objectives agree on the limit set {{{}}}",
                members.join(", ")
            )));
        }
    }
    Ok(())
}

/// Every Dirac profile over `i`'s vertices (everyone else's rows absent).
fn positional_sides(g: &Smg, i: PlayerId) -> Result<Vec<StationaryProfile>, NashError> {
    let owned = g.owned_by(i);
    let mut count = 1usize;
    for &v in &owned {
        count = count
            .checked_mul(g.successors(v).len())
            .filter(|&c| c <= ZERO_SUM_ORACLE_CAP)
            .ok_or_else(|| {
                NashError::OracleUnsupported(format!(
                    "more than {ZERO_SUM_ORACLE_CAP} positional strategies for player {i}"
                ))
            })?;
    }
    let mut sides = vec![StationaryProfile::default()];
    for &v in &owned {
        let mut grown = Vec::with_capacity(sides.len() * g.successors(v).len());
        for w in g.succ_ids(v) {
            for side in &sides {
                let mut next = side.clone();
                next.rows.insert(v, vec![(w, Rational::one())]);
                grown.push(next);
            }
        }
        sides = grown;
    }
    Ok(sides)
}

/// The game value for player 0 from `v0`, recomputed from first
/// principles: enumerate one side's positional strategies and answer
/// each with an exact one-player optimum for the other side.
fn game_value(g: &Smg, v0: VertexId) -> Result<Rational, NashError> {
    if g.players() == 1 {
        let mdp = induce_mdp(g, &StationaryProfile::default(), 0)?;
        return Ok(mdp_omega_value(&mdp, g.objective(0))?.values[v0].clone());
    }
    // A frozen side leaves a one-player game for the other, where the
    // exact optimum is available for every objective class. Enumerating
    // player i against those replies reaches the true value whenever
    // player i has a positional optimal strategy.
    let enumerate_side = |i: PlayerId| -> Result<Rational, NashError> {
        let other = 1 - i;
        let mut best: Option<Rational> = None;
        for side in positional_sides(g, i)? {
            let mdp = induce_mdp(g, &side, other)?;
            let reply = mdp_omega_value(&mdp, g.objective(other))?;
            // The opponent's optimum is what they can extort; player i
            // is guaranteed the complement.
            let guaranteed = Rational::one() - &reply.values[v0];
            if best.as_ref().is_none_or(|b| guaranteed > *b) {
                best = Some(guaranteed);
            }
        }
        Ok(best.expect("at least the empty side profile exists"))
    };
    if positional_class(g.objective(0).kind()) {
        enumerate_side(0)
    } else if positional_class(g.objective(1).kind()) {
        Ok(Rational::one() - enumerate_side(1)?)
    } else {
        Err(NashError::OracleUnsupported(format!(
            "neither a {} nor a {} objective guarantees positional optima",
            g.objective(0).kind(),
            g.objective(1).kind()
        )))
    }
}

/// Rows of `s` must cover exactly the vertices player `i` owns.
fn check_side(g: &Smg, i: PlayerId, s: &StationaryProfile) -> Result<(), NashError> {
    let owned: BTreeSet<VertexId> = g.owned_by(i).into_iter().collect();
    let covered: BTreeSet<VertexId> = s.rows.keys().copied().collect();
    if covered != owned {
        return Err(NashError::BadQuery(format!(
            "player {i}'s strategy covers {} vertices but owns {}",
            covered.len(),
            owned.len()
        )));
    }
    Ok(())
}

/// Certifies a pair of stationary strategies on a zero-sum arena (the
/// degenerate one-player case passes an empty second strategy). Accepts
/// iff both strategies are optimal; the certificate's payoff then equals
/// `(val, 1 − val)` for the independently recomputed game value `val`,
/// and any discrepancy — a profitable deviation or a payoff off the
/// value — is reported as a rejection reason.
pub fn certify_zero_sum_equilibrium(
    g: &Smg,
    v0: VertexId,
    first: &StationaryProfile,
    second: &StationaryProfile,
) -> Result<Certificate, NashError> {
    if v0 >= g.vertex_count() {
        return Err(NashError::Game(GameError::UnknownVertex(format!("#{v0}"))));
    }
    match g.players() {
        1 => {}
        2 => check_complementary(g)?,
        n => {
            return Err(NashError::NotZeroSum(format!(
                "a zero-sum game has two players, this one has {n}"
            )))
        }
    }
    check_side(g, 0, first)?;
    if g.players() == 2 {
        check_side(g, 1, second)?;
    } else if !second.rows.is_empty() {
        return Err(NashError::BadQuery(
            "a one-player game admits no second strategy".to_owned(),
        ));
    }
    let mut merged = first.clone();
    merged.rows.extend(second.rows.iter().map(|(&v, row)| (v, row.clone())));
    merged.validate_covering(g, None)?;

    let val = game_value(g, v0)?;
    let box_values = if g.players() == 2 {
        vec![val.clone(), Rational::one() - &val]
    } else {
        vec![val.clone()]
    };
    let q = ThresholdQuery::exact(box_values)?;
    let (payoff, best_response) = evaluate_profile(g, v0, &merged)?;
    let echo = format!(
        "zero-sum pair[value={}] {}",
        format_rational(&val),
        serialize_profile(&merged, g)
    );
    Ok(Certificate::from_values(payoff, best_response, &q, echo))
}
