//! Slow independent oracles: exhaustive enumeration of positional
//! policies and seeded Monte-Carlo simulation of long-run payoffs.
//!
//! These deliberately avoid the production code paths (no policy
//! iteration, no end-component analysis for the simulator) so they can
//! serve as cross-checks in tests.

use std::collections::BTreeMap;

use game_core::game::{Objective, Smg, VertexId};
use game_core::rational::Rational;
use num::ToPrimitive;
use objectives::accepts_limit_set;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{mc_omega_payoff_all_states, reach_probabilities_exact, MarkovChain};
use crate::mdp::{Mdp, MdpError};
use crate::profiles::PositionalProfile;

/// Hard cap on the number of positional profiles the enumerators will
/// materialise; beyond this the oracle is not the right tool.
pub const ENUMERATION_LIMIT: usize = 1 << 22;

/// Every pure memoryless profile of `g`, covering all controlled vertices
/// of all players, in lexicographic order of their choice tables.
pub fn enumerate_positional_profiles(g: &Smg) -> Vec<PositionalProfile> {
    let controlled: Vec<VertexId> = g.vertices().filter(|&v| !g.is_stochastic(v)).collect();
    let degrees: Vec<usize> = controlled.iter().map(|&v| g.successors(v).len()).collect();
    let total: usize = degrees.iter().try_fold(1usize, |acc, &d| {
        let next = acc.checked_mul(d)?;
        (next <= ENUMERATION_LIMIT).then_some(next)
    })
    .unwrap_or_else(|| panic!("profile space exceeds the enumeration limit of {ENUMERATION_LIMIT}"));

    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; controlled.len()];
    loop {
        let choices: BTreeMap<VertexId, VertexId> = controlled
            .iter()
            .zip(&digits)
            .map(|(&v, &d)| (v, g.successors(v)[d].0))
            .collect();
        out.push(PositionalProfile { choices });
        let mut pos = controlled.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < degrees[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Best reachability probability per vertex over all positional policies,
/// by brute force.
pub fn enumerate_reach_values(
    m: &Mdp,
    target: &std::collections::BTreeSet<VertexId>,
) -> Result<Vec<Rational>, MdpError> {
    let mut best: Option<Vec<Rational>> = None;
    for policy in enumerate_positional_profiles(m.game()) {
        let chain = m.chain_under(&policy)?;
        let values = reach_probabilities_exact(&chain, target)?;
        best = Some(match best {
            None => values,
            Some(b) => b.into_iter().zip(values).map(|(x, y)| x.max(y)).collect(),
        });
    }
    Ok(best.expect("at least the empty policy exists"))
}

/// Best long-run satisfaction probability per vertex over all positional
/// policies, by brute force. Only meaningful as an optimum oracle for
/// objective classes where some positional policy is optimal.
pub fn enumerate_omega_values(m: &Mdp, o: &Objective) -> Result<Vec<Rational>, MdpError> {
    let mut best: Option<Vec<Rational>> = None;
    for policy in enumerate_positional_profiles(m.game()) {
        let chain = m.chain_under(&policy)?;
        let values = mc_omega_payoff_all_states(&chain, std::slice::from_ref(o))?.remove(0);
        best = Some(match best {
            None => values,
            Some(b) => b.into_iter().zip(values).map(|(x, y)| x.max(y)).collect(),
        });
    }
    Ok(best.expect("at least the empty policy exists"))
}

/// An empirical estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub runs: usize,
}

impl SimulationEstimate {
    fn from_hits(hits: usize, runs: usize) -> Self {
        let mean = hits as f64 / runs as f64;
        let std_error = (mean * (1.0 - mean) / runs as f64).sqrt();
        SimulationEstimate { mean, std_error, runs }
    }
}

/// Seeded Monte-Carlo estimate of the long-run payoff vector of a chain.
///
/// Each run walks from `from` until it enters a bottom SCC; from there the
/// limit set is that component with probability one, so the per-run
/// outcome for every objective is decided exactly without truncating the
/// walk at an arbitrary horizon. Only the step sampling uses floating
/// point.
pub fn simulate_omega_payoff(
    mc: &MarkovChain,
    objectives: &[Objective],
    from: usize,
    runs: usize,
    seed: u64,
) -> Vec<SimulationEstimate> {
    assert!(runs > 0, "at least one run");
    let bsccs = mc.bottom_sccs();
    let mut bscc_of: Vec<Option<usize>> = vec![None; mc.states()];
    for (k, b) in bsccs.iter().enumerate() {
        for &s in b {
            bscc_of[s] = Some(k);
        }
    }
    let accepting: Vec<Vec<bool>> = objectives
        .iter()
        .map(|o| {
            bsccs
                .iter()
                .map(|b| {
                    let proj = b.iter().map(|&s| mc.origin(s).vertex).collect();
                    accepts_limit_set(o, &proj)
                })
                .collect()
        })
        .collect();
    let cumulative: Vec<Vec<(usize, f64)>> = (0..mc.states())
        .map(|s| {
            let mut acc = 0.0;
            mc.row(s)
                .iter()
                .map(|(t, p)| {
                    acc += p.to_f64().expect("probability fits in f64");
                    (*t, acc)
                })
                .collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = vec![0usize; objectives.len()];
    for _ in 0..runs {
        let mut s = from;
        let settled = loop {
            if let Some(k) = bscc_of[s] {
                break k;
            }
            let r: f64 = rng.gen();
            let row = &cumulative[s];
            s = row
                .iter()
                .find(|&&(_, c)| r < c)
                .map(|&(t, _)| t)
                .unwrap_or(row.last().expect("rows are non-empty").0);
        };
        for (i, acc) in accepting.iter().enumerate() {
            if acc[settled] {
                hits[i] += 1;
            }
        }
    }
    hits.into_iter().map(|h| SimulationEstimate::from_hits(h, runs)).collect()
}
