//! Exact probabilistic solving for stochastic games: profiles, induced
//! Markov chains, fraction-free linear algebra, reachability and long-run
//! values on one-player processes, plus slow independent oracles.
//!
//! All decision-relevant numbers are arbitrary-precision rationals;
//! floating point appears only inside the Monte-Carlo oracle's step
//! sampling.

pub mod chain;
pub mod linalg;
pub mod mdp;
pub mod oracle;
pub mod profiles;

pub use chain::{
    induce_markov_chain, mc_omega_payoff, mc_omega_payoff_all_states, reach_probabilities_exact,
    ChainError, ChainState, MarkovChain,
};
pub use linalg::{solve_exact, LinalgError};
pub use mdp::{
    almost_sure_reach_set, induce_mdp, mdp_max_reach_value, mdp_omega_value, Mdp, MdpError,
    OmegaOutcome,
};
pub use oracle::{
    enumerate_omega_values, enumerate_positional_profiles, enumerate_reach_values,
    simulate_omega_payoff, SimulationEstimate, ENUMERATION_LIMIT,
};
pub use profiles::{
    parse_profile, serialize_profile, PositionalProfile, ProfileError, StationaryProfile,
};
