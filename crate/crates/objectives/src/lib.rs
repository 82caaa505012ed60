//! Winning-condition semantics and end-component machinery for stochastic
//! multiplayer games: evaluating conditions on limit sets, extensional
//! complementation, maximal end-component decomposition, and the union of
//! end components realising a demanded payoff vector.

pub mod ec_union;
pub mod end_components;
pub mod limit_sets;
pub mod oracle;
pub mod payoff;

pub use ec_union::{generic_ec_union, rabin_ec, streett_ec, EcUnion};
pub use end_components::{
    ec_has_payoff, induced_sccs, is_end_component, maximal_end_components, scc_decomposition,
    EndComponent,
};
pub use game_core::game::Objective;
pub use limit_sets::{
    accepts_limit_set, complement_objective, parity_to_rabin, parity_to_streett, to_streett_pairs,
    ComplementError,
};
pub use payoff::BinaryPayoff;
