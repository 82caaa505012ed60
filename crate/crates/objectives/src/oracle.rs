//! Brute-force reference implementations by subset enumeration.
//!
//! These are deliberately naive — every claim they make is checkable by
//! eye — and they are what the cross-check suites (and the CLI `oracle`
//! subcommand) compare the real algorithms against. They only work on
//! small vertex sets and refuse anything bigger.

use std::collections::BTreeSet;

use game_core::game::{Smg, VertexId};

use crate::end_components::{ec_has_payoff, is_end_component, EndComponent};
use crate::payoff::BinaryPayoff;

/// Largest candidate set the enumeration oracles accept.
pub const BRUTE_FORCE_LIMIT: usize = 16;

/// Every end component contained in `u`, by checking all non-empty
/// subsets.
pub fn all_end_components(g: &Smg, u: &BTreeSet<VertexId>) -> Vec<EndComponent> {
    let nodes: Vec<VertexId> = u.iter().copied().collect();
    assert!(
        nodes.len() <= BRUTE_FORCE_LIMIT,
        "brute-force enumeration refused for {} vertices",
        nodes.len()
    );
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << nodes.len()) {
        let candidate: BTreeSet<VertexId> = nodes
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask & (1 << i) != 0)
            .map(|(_, &v)| v)
            .collect();
        if is_end_component(g, &candidate) {
            out.push(EndComponent::new(g, candidate).expect("just checked"));
        }
    }
    out
}

/// The maximal end components inside `u`, derived from [`all_end_components`].
pub fn maximal_ecs_brute_force(g: &Smg, u: &BTreeSet<VertexId>) -> Vec<EndComponent> {
    let all = all_end_components(g, u);
    let mut maximal: Vec<EndComponent> = all
        .iter()
        .filter(|c| {
            !all.iter().any(|d| c.vertices() != d.vertices() && c.vertices().is_subset(d.vertices()))
        })
        .cloned()
        .collect();
    maximal.sort();
    maximal
}

/// Union of all end components inside `u` whose limit set realises `x`,
/// straight from the definition.
pub fn payoff_union_brute_force(g: &Smg, x: &BinaryPayoff, u: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    let mut union = BTreeSet::new();
    for c in all_end_components(g, u) {
        if ec_has_payoff(g, &c, x) {
            union.extend(c.vertices().iter().copied());
        }
    }
    union
}
