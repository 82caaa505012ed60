//! Core model for stochastic multiplayer games: exact rationals, the game
//! graph with per-player winning conditions, structural validation, the
//! JSON exchange format, and the subarena/restriction/coalition helpers
//! everything else is built on.

pub mod fixtures;
pub mod format;
pub mod game;
pub mod generator;
pub mod rational;

pub use format::{parse_game, parse_payoff_vector, serialize_game, ParsedGame};
pub use game::{
    coalition_view, is_subarena, restrict, CoalitionGame, GameError, InitialisedSmg, Objective,
    PlayerId, RabinPair, Smg, VertexId, Violation,
};
pub use rational::{format_rational, parse_rational, rat, Rational};
