//! Shared vocabulary of the equilibrium layer: threshold queries,
//! machine-checkable certificates, finite-state equilibrium witnesses, and
//! the error type every operation reports through.

use std::fmt;

use game_core::game::{GameError, PlayerId, Smg};
use game_core::rational::{format_rational, Rational};
use num::{One, Zero};
use objectives::{BinaryPayoff, ComplementError};
use prob_solvers::{ChainError, MdpError, ProfileError};
use thiserror::Error;
use zerosum::{FiniteStateStrategy, StrategyError};

/// Componentwise payoff bounds: a profile qualifies when every player's
/// payoff lies in `[min_i, max_i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdQuery {
    min: Vec<Rational>,
    max: Vec<Rational>,
}

impl ThresholdQuery {
    /// Bounds must be in `[0,1]` with `min ≤ max` componentwise.
    pub fn new(min: Vec<Rational>, max: Vec<Rational>) -> Result<Self, NashError> {
        if min.len() != max.len() {
            return Err(NashError::BadQuery(format!(
                "{} lower bounds against {} upper bounds",
                min.len(),
                max.len()
            )));
        }
        for (i, (lo, hi)) in min.iter().zip(&max).enumerate() {
            if lo < &Rational::zero() || hi > &Rational::one() || lo > hi {
                return Err(NashError::BadQuery(format!(
                    "player {i}: need 0 <= {} <= {} <= 1",
                    format_rational(lo),
                    format_rational(hi)
                )));
            }
        }
        Ok(ThresholdQuery { min, max })
    }

    /// Point query: payoff must equal `x` exactly.
    pub fn exact(x: Vec<Rational>) -> Result<Self, NashError> {
        ThresholdQuery::new(x.clone(), x)
    }

    /// Point query at a binary payoff vector.
    pub fn from_binary(x: &BinaryPayoff) -> Self {
        let v: Vec<Rational> = x
            .bits()
            .iter()
            .map(|&b| if b { Rational::one() } else { Rational::zero() })
            .collect();
        ThresholdQuery { min: v.clone(), max: v }
    }

    /// The vacuous query `[0,1]` for every player.
    pub fn unconstrained(players: usize) -> Self {
        ThresholdQuery {
            min: vec![Rational::zero(); players],
            max: vec![Rational::one(); players],
        }
    }

    pub fn players(&self) -> usize {
        self.min.len()
    }

    pub fn min(&self, i: PlayerId) -> &Rational {
        &self.min[i]
    }

    pub fn max(&self, i: PlayerId) -> &Rational {
        &self.max[i]
    }

    pub fn mins(&self) -> &[Rational] {
        &self.min
    }

    pub fn maxs(&self) -> &[Rational] {
        &self.max
    }

    /// Componentwise membership of a payoff vector.
    pub fn admits(&self, payoff: &[Rational]) -> bool {
        payoff.len() == self.min.len()
            && payoff
                .iter()
                .enumerate()
                .all(|(i, z)| &self.min[i] <= z && z <= &self.max[i])
    }

    /// Whether `self`'s box is contained in `other`'s.
    pub fn within(&self, other: &ThresholdQuery) -> bool {
        self.min.len() == other.min.len()
            && self.min.iter().zip(&other.min).all(|(a, b)| b <= a)
            && self.max.iter().zip(&other.max).all(|(a, b)| a <= b)
    }
}

/// One structured ground for rejecting (or qualifying) a candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reason {
    /// Some player can improve by deviating.
    BestResponseExceedsPayoff { player: PlayerId, best_response: Rational, payoff: Rational },
    /// Payoff misses the lower bound.
    PayoffBelowMinimum { player: PlayerId, payoff: Rational, minimum: Rational },
    /// Payoff misses the upper bound.
    PayoffAboveMaximum { player: PlayerId, payoff: Rational, maximum: Rational },
    /// Payoff differs from a demanded exact value.
    PayoffMismatch { player: PlayerId, payoff: Rational, demanded: Rational },
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::BestResponseExceedsPayoff { player, best_response, payoff } => write!(
                f,
                "player {player} gains by deviating: best response {} > payoff {}",
                format_rational(best_response),
                format_rational(payoff)
            ),
            Reason::PayoffBelowMinimum { player, payoff, minimum } => write!(
                f,
                "player {player}: payoff {} below minimum {}",
                format_rational(payoff),
                format_rational(minimum)
            ),
            Reason::PayoffAboveMaximum { player, payoff, maximum } => write!(
                f,
                "player {player}: payoff {} above maximum {}",
                format_rational(payoff),
                format_rational(maximum)
            ),
            Reason::PayoffMismatch { player, payoff, demanded } => write!(
                f,
                "player {player}: payoff {} instead of {}",
                format_rational(payoff),
                format_rational(demanded)
            ),
        }
    }
}

/// Machine-checkable outcome of certifying a candidate profile: exact
/// payoffs, exact best-response values, the verdict, and the grounds.
///
/// On `accepted`, for every player `i` the echoed numbers satisfy
/// `best_response[i] <= payoff[i]` and the queried bounds; `consistent`
/// re-derives the verdict from those numbers alone.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub accepted: bool,
    pub payoff: Vec<Rational>,
    pub best_response: Vec<Rational>,
    pub reasons: Vec<Reason>,
    /// Canonical rendering of the certified profile.
    pub echo: String,
}

impl Certificate {
    /// Builds the verdict from the numbers and the query; the only way a
    /// certificate is meant to be produced.
    pub fn from_values(
        payoff: Vec<Rational>,
        best_response: Vec<Rational>,
        q: &ThresholdQuery,
        echo: String,
    ) -> Certificate {
        assert_eq!(payoff.len(), q.players());
        assert_eq!(best_response.len(), q.players());
        let mut reasons = Vec::new();
        for i in 0..payoff.len() {
            if best_response[i] > payoff[i] {
                reasons.push(Reason::BestResponseExceedsPayoff {
                    player: i,
                    best_response: best_response[i].clone(),
                    payoff: payoff[i].clone(),
                });
            }
            if &payoff[i] < q.min(i) {
                reasons.push(Reason::PayoffBelowMinimum {
                    player: i,
                    payoff: payoff[i].clone(),
                    minimum: q.min(i).clone(),
                });
            }
            if &payoff[i] > q.max(i) {
                reasons.push(Reason::PayoffAboveMaximum {
                    player: i,
                    payoff: payoff[i].clone(),
                    maximum: q.max(i).clone(),
                });
            }
        }
        Certificate { accepted: reasons.is_empty(), payoff, best_response, reasons, echo }
    }

    /// Re-derives the verdict from the echoed numbers; true when the
    /// stored verdict matches.
    pub fn consistent(&self, q: &ThresholdQuery) -> bool {
        let holds = self.payoff.len() == q.players()
            && self.best_response.len() == self.payoff.len()
            && self.best_response.iter().zip(&self.payoff).all(|(r, z)| r <= z)
            && q.admits(&self.payoff);
        holds == self.accepted
    }
}

/// A claimed finite-state Nash equilibrium: one automaton per player plus
/// the binary payoff it is said to realise. `verify_finite_state_profile`
/// is the judge.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumWitness {
    pub strategies: Vec<FiniteStateStrategy>,
    pub payoff: BinaryPayoff,
}

impl EquilibriumWitness {
    /// Shape check: one automaton per player, each well-formed for `g`,
    /// jointly covering every controlled vertex exactly once.
    pub fn validate(&self, g: &Smg) -> Result<(), NashError> {
        if self.strategies.len() != g.players() {
            return Err(NashError::BadWitness(format!(
                "{} automata for {} players",
                self.strategies.len(),
                g.players()
            )));
        }
        if self.payoff.len() != g.players() {
            return Err(NashError::BadWitness(format!(
                "claimed payoff names {} players instead of {}",
                self.payoff.len(),
                g.players()
            )));
        }
        for (i, s) in self.strategies.iter().enumerate() {
            s.validate(g)?;
            let owned: Vec<_> = g.owned_by(i);
            if s.owned.iter().copied().collect::<Vec<_>>() != owned {
                return Err(NashError::BadWitness(format!(
                    "automaton {i} answers for {:?}, player owns {:?}",
                    s.owned, owned
                )));
            }
        }
        Ok(())
    }
}

/// What every operation in this crate reports through.
#[derive(Debug, Error)]
pub enum NashError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Mdp(#[from] MdpError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Complement(#[from] ComplementError),
    #[error("bad threshold query: {0}")]
    BadQuery(String),
    #[error("search space exceeded: {profiles} profiles against a cap of {cap}")]
    SearchSpaceExceeded { profiles: usize, cap: usize },
    #[error("support space exceeded: more than {cap} support relations")]
    SupportSpaceExceeded { cap: usize },
    #[error("bad support relation: {0}")]
    BadSupport(String),
    #[error("not a zero-sum game: {0}")]
    NotZeroSum(String),
    #[error("outside oracle scope: {0}")]
    OracleUnsupported(String),
    #[error("bad formula: {0}")]
    BadCnf(String),
    #[error("solver interaction failed: {0}")]
    SolverFailed(String),
    #[error("bad witness: {0}")]
    BadWitness(String),
    #[error("not an end component: {0}")]
    NotEndComponent(String),
    #[error("product state space of {states} states exceeds the cap of {cap}")]
    ProductTooLarge { states: usize, cap: usize },
    #[error("synthesis precondition failed: {0}")]
    Unsynthesizable(String),
}
