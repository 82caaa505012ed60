//! JSON exchange format: parsing and bit-exact canonical serialization.
//!
//! A document looks like
//!
//! ```json
//! {
//!   "players": 2,
//!   "vertices": [{"id": "a", "owner": 0}, {"id": "s", "owner": "chance"}],
//!   "edges": [{"from": "s", "to": "a", "prob": "1/2"}, {"from": "a", "to": "s"}],
//!   "objectives": [
//!     {"type": "buchi", "set": ["a"]},
//!     {"type": "parity", "priorities": {"a": 0, "s": 1}}
//!   ],
//!   "initial": "s"
//! }
//! ```
//!
//! `prob` must be present exactly on edges out of stochastic vertices and
//! is written in the `"p/q"` form. Objective types are `buchi`, `cobuchi`,
//! `parity` (total priority map), `streett` / `rabin` (pair lists with
//! fields `F` and `G`), and `muller` (list of vertex sets). The optional
//! `colours` field is reserved for a future explicit colouring; in the
//! current format it must be the identity map when present.
//!
//! Serialization is canonical: object keys sorted, vertex and edge lists
//! in lexicographic id order, probabilities in lowest terms. Parsing a
//! canonical document and re-serializing reproduces it byte for byte.
//! Edges with probability `0` are dropped at parse time with a warning;
//! they carry no semantics but commonly appear in generated input.

use std::collections::BTreeMap;

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::game::{GameError, Objective, RabinPair, Smg, Violation};
use crate::rational::{format_rational, parse_rational, Rational};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameDoc {
    players: usize,
    vertices: Vec<VertexDoc>,
    edges: Vec<EdgeDoc>,
    objectives: Vec<ObjectiveDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial: Option<String>,
    /// Reserved: explicit colouring. Must equal the identity when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    colours: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexDoc {
    id: String,
    owner: OwnerDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum OwnerDoc {
    Player(usize),
    Keyword(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    from: String,
    to: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    prob: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum ObjectiveDoc {
    Buchi { set: Vec<String> },
    Cobuchi { set: Vec<String> },
    Parity { priorities: BTreeMap<String, u32> },
    Streett { pairs: Vec<PairDoc> },
    Rabin { pairs: Vec<PairDoc> },
    Muller { family: Vec<Vec<String>> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairDoc {
    #[serde(rename = "F")]
    f: Vec<String>,
    #[serde(rename = "G")]
    g: Vec<String>,
}

/// Result of a successful parse: the validated game, the optional initial
/// vertex, and non-fatal warnings (currently only dropped zero edges).
#[derive(Debug, Clone)]
pub struct ParsedGame {
    pub game: Smg,
    pub initial: Option<usize>,
    pub warnings: Vec<String>,
}

/// Parses and validates a game document.
///
/// Syntax errors come back as [`GameError::Syntax`] with serde_json's
/// line/column annotation; semantic problems are collected into
/// [`GameError::Invalid`] so a caller sees all of them at once.
pub fn parse_game(text: &str) -> Result<ParsedGame, GameError> {
    let doc: GameDoc =
        serde_json::from_str(text).map_err(|e| GameError::Syntax(e.to_string()))?;

    let mut violations = Vec::new();
    let mut warnings = Vec::new();

    // Resolve names against the lexicographically sorted vertex list so
    // that document indices equal final Smg indices.
    let mut sorted: Vec<&VertexDoc> = doc.vertices.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let index: BTreeMap<&str, usize> =
        sorted.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
    if index.len() != doc.vertices.len() {
        for w in sorted.windows(2) {
            if w[0].id == w[1].id {
                violations.push(Violation::DuplicateVertexName(w[0].id.clone()));
            }
        }
        return Err(GameError::Invalid(violations));
    }
    let resolve = |name: &str| -> Result<usize, GameError> {
        index.get(name).copied().ok_or_else(|| GameError::UnknownVertex(name.to_owned()))
    };

    let mut vertices = Vec::with_capacity(sorted.len());
    for v in &sorted {
        let owner = match &v.owner {
            OwnerDoc::Player(p) => Some(*p),
            OwnerDoc::Keyword(k) if k == "chance" => None,
            OwnerDoc::Keyword(k) => {
                return Err(GameError::Syntax(format!(
                    "owner of '{}' must be a player index or \"chance\", got \"{k}\"",
                    v.id
                )))
            }
        };
        vertices.push((v.id.clone(), owner));
    }

    let mut edges = Vec::with_capacity(doc.edges.len());
    for e in &doc.edges {
        let from = resolve(&e.from)?;
        let to = resolve(&e.to)?;
        let prob = match &e.prob {
            None => None,
            Some(text) => {
                let p = parse_rational(text)
                    .map_err(|err| GameError::Syntax(format!("edge {} -> {}: {err}", e.from, e.to)))?;
                // A zero-probability edge out of a stochastic vertex is an
                // explicit "not there"; on an owned vertex the annotation
                // itself is the mistake, so leave it for validation.
                if p.is_zero() && vertices[from].1.is_none() {
                    warnings.push(format!("dropping zero-probability edge {} -> {}", e.from, e.to));
                    continue;
                }
                Some(p)
            }
        };
        edges.push((from, to, prob));
    }

    let mut objectives = Vec::with_capacity(doc.objectives.len());
    for o in &doc.objectives {
        objectives.push(objective_from_doc(o, sorted.len(), &resolve)?);
    }

    let initial = match &doc.initial {
        None => None,
        Some(name) => Some(resolve(name)?),
    };

    if let Some(colours) = &doc.colours {
        for (from, to) in colours {
            resolve(from)?;
            if from != to {
                return Err(GameError::Syntax(format!(
                    "colour map must be the identity, but '{from}' maps to '{to}'"
                )));
            }
        }
    }

    match Smg::from_parts(doc.players, vertices, edges, objectives) {
        Ok(game) => Ok(ParsedGame { game, initial, warnings }),
        Err(mut vs) => {
            violations.append(&mut vs);
            Err(GameError::Invalid(violations))
        }
    }
}

fn objective_from_doc(
    doc: &ObjectiveDoc,
    n: usize,
    resolve: &impl Fn(&str) -> Result<usize, GameError>,
) -> Result<Objective, GameError> {
    let set = |names: &[String]| -> Result<std::collections::BTreeSet<usize>, GameError> {
        names.iter().map(|s| resolve(s)).collect()
    };
    Ok(match doc {
        ObjectiveDoc::Buchi { set: s } => Objective::Buchi(set(s)?),
        ObjectiveDoc::Cobuchi { set: s } => Objective::CoBuchi(set(s)?),
        ObjectiveDoc::Parity { priorities } => {
            let mut out = vec![u32::MAX; n];
            for (name, prio) in priorities {
                out[resolve(name)?] = *prio;
            }
            // A partial map yields a short vector here, which validation
            // then reports as non-total with the player index attached.
            out.retain(|&p| p != u32::MAX);
            Objective::Parity(out)
        }
        ObjectiveDoc::Streett { pairs } => Objective::Streett(
            pairs
                .iter()
                .map(|p| Ok(RabinPair { fst: set(&p.f)?, snd: set(&p.g)? }))
                .collect::<Result<_, GameError>>()?,
        ),
        ObjectiveDoc::Rabin { pairs } => Objective::Rabin(
            pairs
                .iter()
                .map(|p| Ok(RabinPair { fst: set(&p.f)?, snd: set(&p.g)? }))
                .collect::<Result<_, GameError>>()?,
        ),
        ObjectiveDoc::Muller { family } => Objective::Muller(
            family.iter().map(|m| set(m)).collect::<Result<_, GameError>>()?,
        ),
    })
}

/// Serializes a game (plus optional initial vertex) into the canonical
/// document. Canonical means: serde_json's sorted object keys, vertices
/// and edges in lexicographic id order, probabilities in lowest terms and
/// a trailing newline — so equal games always produce identical bytes.
pub fn serialize_game(g: &Smg, initial: Option<usize>) -> String {
    let vertices: Vec<VertexDoc> = g
        .vertices()
        .map(|v| VertexDoc {
            id: g.name(v).to_owned(),
            owner: match g.owner(v) {
                Some(p) => OwnerDoc::Player(p),
                None => OwnerDoc::Keyword("chance".to_owned()),
            },
        })
        .collect();
    let mut edges = Vec::new();
    for v in g.vertices() {
        for (w, p) in g.successors(v) {
            edges.push(EdgeDoc {
                from: g.name(v).to_owned(),
                to: g.name(*w).to_owned(),
                prob: p.as_ref().map(format_rational),
            });
        }
    }
    let objectives: Vec<ObjectiveDoc> =
        g.objectives().iter().map(|o| objective_to_doc(g, o)).collect();
    let doc = GameDoc {
        players: g.players(),
        vertices,
        edges,
        objectives,
        initial: initial.map(|v| g.name(v).to_owned()),
        colours: None,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("document serialization cannot fail");
    out.push('\n');
    out
}

fn objective_to_doc(g: &Smg, o: &Objective) -> ObjectiveDoc {
    let names = |s: &std::collections::BTreeSet<usize>| -> Vec<String> {
        s.iter().map(|&v| g.name(v).to_owned()).collect()
    };
    match o {
        Objective::Buchi(s) => ObjectiveDoc::Buchi { set: names(s) },
        Objective::CoBuchi(s) => ObjectiveDoc::Cobuchi { set: names(s) },
        Objective::Parity(p) => ObjectiveDoc::Parity {
            priorities: p.iter().enumerate().map(|(v, &prio)| (g.name(v).to_owned(), prio)).collect(),
        },
        Objective::Streett(pairs) => ObjectiveDoc::Streett {
            pairs: pairs.iter().map(|p| PairDoc { f: names(&p.fst), g: names(&p.snd) }).collect(),
        },
        Objective::Rabin(pairs) => ObjectiveDoc::Rabin {
            pairs: pairs.iter().map(|p| PairDoc { f: names(&p.fst), g: names(&p.snd) }).collect(),
        },
        Objective::Muller(family) => ObjectiveDoc::Muller {
            family: family.iter().map(|m| names(m)).collect(),
        },
    }
}

/// Parses a payoff vector: either a compact bit string like `"101"` or a
/// comma-separated list of rationals like `"1/2,1,0"`.
pub fn parse_payoff_vector(text: &str, players: usize) -> Result<Vec<Rational>, GameError> {
    let s = text.trim();
    let values: Vec<Rational> = if s.contains(',') || s.contains('/') {
        s.split(',')
            .map(|part| parse_rational(part).map_err(|e| GameError::Syntax(e.to_string())))
            .collect::<Result<_, _>>()?
    } else if s.chars().all(|c| c == '0' || c == '1') && !s.is_empty() {
        s.chars().map(|c| if c == '1' { rat_one() } else { Rational::zero() }).collect()
    } else {
        s.split(',')
            .map(|part| parse_rational(part).map_err(|e| GameError::Syntax(e.to_string())))
            .collect::<Result<_, _>>()?
    };
    if values.len() != players {
        return Err(GameError::Syntax(format!(
            "payoff vector '{text}' has {} entries, game has {players} players",
            values.len()
        )));
    }
    Ok(values)
}

fn rat_one() -> Rational {
    num::One::one()
}
