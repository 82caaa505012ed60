//! Reading and writing equilibrium witnesses as structured text.
//!
//! The format is JSON with fully deterministic ordering: strategies by
//! player, update rows by memory state, update columns by vertex id
//! (which is name order), output rows keyed by zero-padded memory state
//! and vertex name. Probabilities are exact `p/q` strings, the claimed
//! payoff a bit string. Everything a replay needs is in the document;
//! everything else (who owns what, the objectives) lives in the game it
//! is replayed against.

use std::collections::BTreeMap;

use game_core::game::Smg;
use game_core::rational::{format_rational, parse_rational};
use objectives::BinaryPayoff;
use serde::{Deserialize, Serialize};
use zerosum::FiniteStateStrategy;

use crate::types::{EquilibriumWitness, NashError};

#[derive(Serialize, Deserialize)]
struct WitnessDoc {
    payoff: String,
    strategies: Vec<StrategyDoc>,
}

#[derive(Serialize, Deserialize)]
struct StrategyDoc {
    player: usize,
    memory_count: usize,
    initial_memory: usize,
    /// `update[m][v]` is the memory after reading vertex `v` in state `m`.
    update: Vec<Vec<usize>>,
    /// `"{memory:06}:{vertex}"` to the prescribed distribution.
    output: BTreeMap<String, Vec<(String, String)>>,
}

fn bad(msg: impl Into<String>) -> NashError {
    NashError::BadWitness(msg.into())
}

/// Renders a witness into the deterministic JSON exchange form.
pub fn serialize_witness(g: &Smg, w: &EquilibriumWitness) -> String {
    let payoff: String = w.payoff.bits().iter().map(|&b| if b { '1' } else { '0' }).collect();
    let strategies = w
        .strategies
        .iter()
        .enumerate()
        .map(|(player, s)| StrategyDoc {
            player,
            memory_count: s.memory_count,
            initial_memory: s.initial_memory,
            update: s.update.clone(),
            output: s
                .output
                .iter()
                .map(|(&(m, v), row)| {
                    let key = format!("{m:06}:{}", g.name(v));
                    let row = row
                        .iter()
                        .map(|(w, p)| (g.name(*w).to_owned(), format_rational(p)))
                        .collect();
                    (key, row)
                })
                .collect(),
        })
        .collect();
    let doc = WitnessDoc { payoff, strategies };
    serde_json::to_string_pretty(&doc).expect("witness documents always serialize")
}

/// Parses the JSON exchange form back into a witness for `g`, resolving
/// vertex names and validating the result's shape.
pub fn parse_witness(text: &str, g: &Smg) -> Result<EquilibriumWitness, NashError> {
    let doc: WitnessDoc =
        serde_json::from_str(text).map_err(|e| bad(format!("not a witness document: {e}")))?;
    let payoff = BinaryPayoff::parse(&doc.payoff, g.players())
        .map_err(|e| bad(format!("claimed payoff: {e}")))?;
    let mut strategies = Vec::with_capacity(doc.strategies.len());
    for (expected, s) in doc.strategies.into_iter().enumerate() {
        if s.player != expected {
            return Err(bad(format!(
                "strategies out of order: found player {} at position {expected}",
                s.player
            )));
        }
        let mut output = BTreeMap::new();
        for (key, row) in &s.output {
            let (m, name) = key
                .split_once(':')
                .ok_or_else(|| bad(format!("output key {key:?} is not memory:vertex")))?;
            let m: usize =
                m.parse().map_err(|_| bad(format!("output key {key:?} has no memory state")))?;
            let v = g
                .vertex_named(name)
                .ok_or_else(|| bad(format!("output key {key:?} names an unknown vertex")))?;
            let mut parsed = Vec::with_capacity(row.len());
            for (target, prob) in row {
                let t = g
                    .vertex_named(target)
                    .ok_or_else(|| bad(format!("unknown successor {target:?} under {key:?}")))?;
                let p = parse_rational(prob)
                    .map_err(|e| bad(format!("bad probability under {key:?}: {e}")))?;
                parsed.push((t, p));
            }
            output.insert((m, v), parsed);
        }
        let owned = output.keys().map(|&(_, v)| v).collect();
        strategies.push(FiniteStateStrategy {
            memory_count: s.memory_count,
            initial_memory: s.initial_memory,
            update: s.update,
            owned,
            output,
        });
    }
    let witness = EquilibriumWitness { strategies, payoff };
    witness.validate(g)?;
    Ok(witness)
}
