//! Memoryless strategy profiles: positional (pure) and stationary (mixed).
//!
//! Profiles are stored over vertex ids; the JSON form used by the CLI is
//! name-based and converted against a concrete game. A profile may be
//! partial (e.g. covering all players but one) — which vertices must be
//! covered is a per-operation requirement, checked by `validate_covering`.

use std::collections::BTreeMap;

use game_core::game::{PlayerId, Smg, VertexId};
use game_core::rational::{format_rational, parse_rational, Rational};
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProfileError {
    #[error("profile chooses at '{0}', which is not a controlled vertex")]
    NotControlled(String),
    #[error("profile misses controlled vertex '{0}'")]
    Missing(String),
    #[error("choice at '{from}' is not a successor: '{to}'")]
    NotASuccessor { from: String, to: String },
    #[error("distribution at '{vertex}' {problem}")]
    BadDistribution { vertex: String, problem: String },
    #[error("unknown vertex '{0}'")]
    UnknownVertex(String),
    #[error("{0}")]
    Format(String),
}

/// Pure memoryless profile: one successor per covered vertex.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PositionalProfile {
    pub choices: BTreeMap<VertexId, VertexId>,
}

/// Mixed memoryless profile: one distribution over successors per covered
/// vertex.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StationaryProfile {
    pub rows: BTreeMap<VertexId, Vec<(VertexId, Rational)>>,
}

impl PositionalProfile {
    pub fn new(choices: BTreeMap<VertexId, VertexId>) -> Self {
        PositionalProfile { choices }
    }

    pub fn to_stationary(&self) -> StationaryProfile {
        StationaryProfile {
            rows: self
                .choices
                .iter()
                .map(|(&v, &w)| (v, vec![(w, Rational::one())]))
                .collect(),
        }
    }

    /// Checks that every choice is legal and that every controlled vertex
    /// outside `skip`'s ownership is covered.
    pub fn validate_covering(&self, g: &Smg, skip: Option<PlayerId>) -> Result<(), ProfileError> {
        self.to_stationary().validate_covering(g, skip)
    }
}

impl StationaryProfile {
    /// The profile playing uniformly at random at every controlled vertex.
    pub fn uniform(g: &Smg) -> Self {
        let rows = g
            .vertices()
            .filter(|&v| !g.is_stochastic(v))
            .map(|v| {
                let k = g.successors(v).len();
                let share = game_core::rational::rat(1, k as i64);
                (v, g.succ_ids(v).map(|w| (w, share.clone())).collect())
            })
            .collect();
        StationaryProfile { rows }
    }

    /// The support: for each covered vertex, the successors with positive
    /// probability.
    pub fn support(&self) -> BTreeMap<VertexId, Vec<VertexId>> {
        self.rows
            .iter()
            .map(|(&v, row)| (v, row.iter().map(|&(w, _)| w).collect()))
            .collect()
    }

    /// True if every row is a Dirac distribution.
    pub fn is_pure(&self) -> bool {
        self.rows.values().all(|row| row.len() == 1)
    }

    pub fn as_positional(&self) -> Option<PositionalProfile> {
        if !self.is_pure() {
            return None;
        }
        Some(PositionalProfile {
            choices: self.rows.iter().map(|(&v, row)| (v, row[0].0)).collect(),
        })
    }

    /// Checks well-formedness against `g`: rows sit on controlled
    /// vertices, supports are successors, probabilities are positive and
    /// sum to 1 — and that every controlled vertex is covered, except
    /// those owned by `skip`.
    pub fn validate_covering(&self, g: &Smg, skip: Option<PlayerId>) -> Result<(), ProfileError> {
        for (&v, row) in &self.rows {
            if v >= g.vertex_count() {
                return Err(ProfileError::UnknownVertex(format!("#{v}")));
            }
            let name = || g.name(v).to_owned();
            if g.is_stochastic(v) {
                return Err(ProfileError::NotControlled(name()));
            }
            if row.is_empty() {
                return Err(ProfileError::BadDistribution {
                    vertex: name(),
                    problem: "is empty".into(),
                });
            }
            let mut sum = Rational::zero();
            let mut seen = std::collections::BTreeSet::new();
            for (w, p) in row {
                if !g.has_edge(v, *w) {
                    return Err(ProfileError::NotASuccessor { from: name(), to: g.name(*w).to_owned() });
                }
                if !seen.insert(*w) {
                    return Err(ProfileError::BadDistribution {
                        vertex: name(),
                        problem: format!("mentions '{}' twice", g.name(*w)),
                    });
                }
                if !p.is_positive() {
                    return Err(ProfileError::BadDistribution {
                        vertex: name(),
                        problem: format!("has non-positive probability {}", format_rational(p)),
                    });
                }
                sum += p;
            }
            if !sum.is_one() {
                return Err(ProfileError::BadDistribution {
                    vertex: name(),
                    problem: format!("sums to {}", format_rational(&sum)),
                });
            }
        }
        for v in g.vertices() {
            match g.owner(v) {
                Some(p) if Some(p) != skip && !self.rows.contains_key(&v) => {
                    return Err(ProfileError::Missing(g.name(v).to_owned()));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Name-based JSON form: `{"c": {"v0": "1/2", "b": "1/2"}, "a": "a"}` —
/// a string value is shorthand for a Dirac choice.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RowDoc {
    Dirac(String),
    Mixed(BTreeMap<String, String>),
}

/// Parses the name-based JSON profile form against a game.
pub fn parse_profile(text: &str, g: &Smg) -> Result<StationaryProfile, ProfileError> {
    let doc: BTreeMap<String, RowDoc> =
        serde_json::from_str(text).map_err(|e| ProfileError::Format(e.to_string()))?;
    let mut rows = BTreeMap::new();
    for (vertex, row) in doc {
        let v = g
            .vertex_named(&vertex)
            .ok_or_else(|| ProfileError::UnknownVertex(vertex.clone()))?;
        let entries: Vec<(VertexId, Rational)> = match row {
            RowDoc::Dirac(target) => {
                let w = g
                    .vertex_named(&target)
                    .ok_or_else(|| ProfileError::UnknownVertex(target.clone()))?;
                vec![(w, Rational::one())]
            }
            RowDoc::Mixed(map) => {
                let mut entries = Vec::with_capacity(map.len());
                for (target, prob) in map {
                    let w = g
                        .vertex_named(&target)
                        .ok_or_else(|| ProfileError::UnknownVertex(target.clone()))?;
                    let p = parse_rational(&prob).map_err(|e| ProfileError::Format(e.to_string()))?;
                    if !p.is_zero() {
                        entries.push((w, p));
                    }
                }
                entries.sort_by_key(|&(w, _)| w);
                entries
            }
        };
        rows.insert(v, entries);
    }
    Ok(StationaryProfile { rows })
}

/// Serializes a profile into the name-based JSON form (canonical: sorted
/// keys, Dirac rows as plain strings).
pub fn serialize_profile(p: &StationaryProfile, g: &Smg) -> String {
    let mut doc: BTreeMap<String, RowDoc> = BTreeMap::new();
    for (&v, row) in &p.rows {
        let entry = if row.len() == 1 && row[0].1.is_one() {
            RowDoc::Dirac(g.name(row[0].0).to_owned())
        } else {
            RowDoc::Mixed(
                row.iter().map(|(w, p)| (g.name(*w).to_owned(), format_rational(p))).collect(),
            )
        };
        doc.insert(g.name(v).to_owned(), entry);
    }
    let mut out = serde_json::to_string_pretty(&doc).expect("profile serialization cannot fail");
    out.push('\n');
    out
}
