//! Zero-sum qualitative analysis of stochastic games.
//!
//! This crate views a multiplayer game through the eyes of one player: that
//! player (the protagonist) keeps their objective, and all other players are
//! merged into a single adversarial coalition trying to falsify it. Every
//! ω-regular objective is first reduced to a parity condition on a finite
//! product with strategy memory, and the product is then solved by a
//! qualitative parity engine that needs no arithmetic at all.
//!
//! The crate answers the two questions the equilibrium layers rely on:
//! from which vertices can the protagonist win with positive probability
//! (no matter how the others play), and how do the others play to hold the
//! protagonist to probability zero everywhere else.

pub mod analysis;
pub mod arena;
pub mod product;
pub mod strategy;

pub use analysis::{
    coalition_analysis, positive_value_set, punishment_strategy, qualitative_parity_solve,
    CoalitionAnalysis, QualitativeSolution,
};
pub use arena::{almost_sure_region, solve, Arena, Owner, QualitativeSets, Side};
pub use product::{to_parity, LarProduct, PRODUCT_STATE_LIMIT};
pub use strategy::{FiniteStateStrategy, StrategyError};
