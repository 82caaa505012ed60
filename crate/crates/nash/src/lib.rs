//! Deciders, certifiers and synthesis for Nash equilibria in stochastic
//! multiplayer games with ω-regular objectives.
//!
//! The crate answers three families of questions about a game `G`, an
//! initial vertex `v0` and a box of payoff thresholds `x ≤ y`:
//!
//! * **qualitative** ([`solve_qualne`]): does some equilibrium achieve a
//!   binary payoff exactly, decided through a merged-coalition MDP;
//! * **positional** ([`solve_posne`]): does some pure positional profile
//!   certify as an equilibrium inside the box, by exhaustive sweep;
//! * **stationary** ([`solve_statne`], [`emit_statne_smt`]): does some
//!   stationary profile do so, searched per support through an
//!   existential-arithmetic solver and re-checked exactly.
//!
//! Accepting answers come with checkable artefacts: a [`Certificate`]
//! comparing the profile payoff against every unilateral best response,
//! or a finite-state [`EquilibriumWitness`] built from threat strategies
//! and replayed by [`verify_finite_state_profile`].

pub mod certify;
pub mod hardness;
pub mod posne;
pub mod qualne;
pub mod statne;
pub mod synthesis;
pub mod types;
pub mod verify;
pub mod witness_io;
pub mod zero_sum;

pub use certify::{certify_positional, certify_stationary};
pub use hardness::{gen_rabin_hardness_game, Cnf};
pub use posne::{
    positional_profile_count, solve_posne, solve_posne_sequential, DEFAULT_PROFILE_CAP,
};
pub use qualne::{build_qualne_mdp, solve_qualne, QualneConstruction};
pub use statne::{
    emit_statne_smt, enumerate_supports, solve_statne, statne_assignment, SmtScript,
    SolverConfig, StatneOutcome, SupportRelation, DEFAULT_SOLVER_TIMEOUT, DEFAULT_SUPPORT_CAP,
};
pub use synthesis::{ec_sweep_profile, synthesize_equilibrium};
pub use types::{Certificate, EquilibriumWitness, NashError, Reason, ThresholdQuery};
pub use verify::{verify_finite_state_profile, witness_product_chain, VERIFY_PRODUCT_LIMIT};
pub use witness_io::{parse_witness, serialize_witness};
pub use zero_sum::{certify_zero_sum_equilibrium, ZERO_SUM_CHECK_LIMIT, ZERO_SUM_ORACLE_CAP};
