//! CNF formulas and the two-player game family that ties equilibrium
//! decisions to propositional satisfiability.
//!
//! The game alternates between clause vertices, where the *assigner*
//! picks a literal of that clause, and literal vertices, where the
//! *challenger* picks the next clause to visit. The assigner's Rabin
//! condition asks for some variable whose two polarities do not both
//! recur; choosing literals along a satisfying assignment achieves
//! that, while for an unsatisfiable formula the challenger can always
//! replay a contradictory pair of clauses forever. The challenger's own
//! condition holds on every play, so only the assigner's payoff varies.

use std::collections::BTreeSet;
use std::fmt;

use game_core::game::{GameError, InitialisedSmg, Objective, RabinPair, Smg};

use crate::types::NashError;

/// Largest variable or clause count the vertex-naming scheme supports
/// (two-digit indices keep name order aligned with index order).
pub const CNF_DIMENSION_LIMIT: usize = 100;

/// Largest variable count the truth-table satisfiability check accepts.
pub const TRUTH_TABLE_LIMIT: usize = 20;

/// A propositional formula in conjunctive normal form.
///
/// Literals are `(variable, negated)` pairs with zero-based variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    variables: usize,
    clauses: Vec<Vec<(usize, bool)>>,
}

impl Cnf {
    /// Builds a formula, rejecting empty clause lists, empty clauses,
    /// out-of-range variables and oversized dimensions.
    pub fn new(variables: usize, clauses: Vec<Vec<(usize, bool)>>) -> Result<Self, NashError> {
        if variables > CNF_DIMENSION_LIMIT || clauses.len() > CNF_DIMENSION_LIMIT {
            return Err(NashError::BadCnf(format!(
                "at most {CNF_DIMENSION_LIMIT} variables and clauses are supported"
            )));
        }
        if clauses.is_empty() {
            return Err(NashError::BadCnf("a formula needs at least one clause".into()));
        }
        for (j, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(NashError::BadCnf(format!("clause {j} is empty")));
            }
            if let Some(&(v, _)) = clause.iter().find(|&&(v, _)| v >= variables) {
                return Err(NashError::BadCnf(format!(
                    "clause {j} uses variable {v}, but only {variables} are declared"
                )));
            }
        }
        Ok(Cnf { variables, clauses })
    }

    /// Parses the usual DIMACS format: optional `c` comment lines, one
    /// `p cnf <variables> <clauses>` header, then whitespace-separated
    /// nonzero literals with `0` terminating each clause.
    pub fn parse_dimacs(text: &str) -> Result<Self, NashError> {
        let bad = |msg: String| NashError::BadCnf(msg);
        let mut header: Option<(usize, usize)> = None;
        let mut clauses: Vec<Vec<(usize, bool)>> = Vec::new();
        let mut current: Vec<(usize, bool)> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                if header.is_some() {
                    return Err(bad("duplicate problem line".into()));
                }
                let fields: Vec<&str> = rest.split_whitespace().collect();
                match fields.as_slice() {
                    ["cnf", vars, count] => {
                        let vars = vars.parse().map_err(|_| bad("bad variable count".into()))?;
                        let count = count.parse().map_err(|_| bad("bad clause count".into()))?;
                        header = Some((vars, count));
                    }
                    _ => return Err(bad(format!("unrecognised problem line: p{rest}"))),
                }
                continue;
            }
            let (vars, _) = header.ok_or_else(|| bad("literals before the problem line".into()))?;
            for token in line.split_whitespace() {
                let lit: i64 = token
                    .parse()
                    .map_err(|_| bad(format!("unrecognised literal token: {token}")))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    let var = lit.unsigned_abs() as usize - 1;
                    if var >= vars {
                        return Err(bad(format!(
                            "literal {lit} exceeds the declared {vars} variables"
                        )));
                    }
                    current.push((var, lit < 0));
                }
            }
        }
        let (vars, count) = header.ok_or_else(|| bad("missing problem line".into()))?;
        if !current.is_empty() {
            return Err(bad("unterminated final clause".into()));
        }
        if clauses.len() != count {
            return Err(bad(format!(
                "problem line promises {count} clauses, found {}",
                clauses.len()
            )));
        }
        Cnf::new(vars, clauses)
    }

    /// Number of declared variables.
    pub fn variables(&self) -> usize {
        self.variables
    }

    /// The clauses as `(variable, negated)` literal lists.
    pub fn clauses(&self) -> &[Vec<(usize, bool)>] {
        &self.clauses
    }

    /// Evaluates the formula under a full assignment.
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        assert_eq!(assignment.len(), self.variables, "assignment has wrong arity");
        self.clauses
            .iter()
            .all(|clause| clause.iter().any(|&(v, neg)| assignment[v] != neg))
    }

    /// Truth-table satisfiability check, exponential in the variable
    /// count and therefore limited to [`TRUTH_TABLE_LIMIT`] variables.
    pub fn is_satisfiable(&self) -> bool {
        assert!(
            self.variables <= TRUTH_TABLE_LIMIT,
            "truth table over {} variables is out of reach",
            self.variables
        );
        let mut assignment = vec![false; self.variables];
        (0u64..1 << self.variables).any(|mask| {
            for (v, slot) in assignment.iter_mut().enumerate() {
                *slot = mask & (1 << v) != 0;
            }
            self.evaluate(&assignment)
        })
    }
}

impl fmt::Display for Cnf {
    /// DIMACS rendering, parseable by [`Cnf::parse_dimacs`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.variables, self.clauses.len())?;
        for clause in &self.clauses {
            for &(v, neg) in clause {
                write!(f, "{}{} ", if neg { "-" } else { "" }, v + 1)?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

fn literal_name(variable: usize, negated: bool) -> String {
    format!("{}{variable:02}", if negated { 'n' } else { 'p' })
}

/// Builds the satisfiability game of a formula, initialised at the
/// first clause vertex.
///
/// Vertices are named `c<j>` for clauses and `p<i>`/`n<i>` for the
/// positive/negative literal of each variable that occurs in some
/// clause. The assigner (player 0) owns the clause vertices and moves
/// to a literal of the clause; the challenger (player 1) owns the
/// literal vertices and moves to any clause. Player 0's objective holds
/// one Rabin pair per occurring variable and polarity, asking that the
/// polarity recurs while its opposite is eventually avoided; player 1's
/// single pair accepts every play.
pub fn gen_rabin_hardness_game(cnf: &Cnf) -> Result<InitialisedSmg, NashError> {
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for clause in cnf.clauses() {
        used.extend(clause.iter().map(|&(v, _)| v));
    }

    let mut vertices: Vec<(String, Option<usize>)> = Vec::new();
    for j in 0..cnf.clauses().len() {
        vertices.push((format!("c{j:02}"), Some(0)));
    }
    for &v in &used {
        vertices.push((literal_name(v, false), Some(1)));
        vertices.push((literal_name(v, true), Some(1)));
    }
    let index_of = |name: &str| vertices.iter().position(|(n, _)| n == name).unwrap();

    let mut edges: Vec<(usize, usize, Option<game_core::rational::Rational>)> = Vec::new();
    for (j, clause) in cnf.clauses().iter().enumerate() {
        let from = index_of(&format!("c{j:02}"));
        let targets: BTreeSet<usize> =
            clause.iter().map(|&(v, neg)| index_of(&literal_name(v, neg))).collect();
        edges.extend(targets.into_iter().map(|to| (from, to, None)));
    }
    for &v in &used {
        for neg in [false, true] {
            let from = index_of(&literal_name(v, neg));
            for j in 0..cnf.clauses().len() {
                edges.push((from, index_of(&format!("c{j:02}")), None));
            }
        }
    }

    let mut assigner_pairs = Vec::new();
    for &v in &used {
        let pos = index_of(&literal_name(v, false));
        let neg = index_of(&literal_name(v, true));
        assigner_pairs.push(RabinPair::new([pos], [neg]));
        assigner_pairs.push(RabinPair::new([neg], [pos]));
    }
    let everything: Vec<usize> = (0..vertices.len()).collect();
    let objectives = vec![
        Objective::Rabin(assigner_pairs),
        Objective::Rabin(vec![RabinPair::new(everything, [])]),
    ];

    let initial = index_of("c00");
    let game = Smg::from_parts(2, vertices, edges, objectives)
        .map_err(|v| NashError::Game(GameError::Invalid(v)))?;
    InitialisedSmg::new(game, initial).map_err(NashError::Game)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn contradiction() -> Cnf {
        // (x) and (not x)
        Cnf::new(1, vec![vec![(0, false)], vec![(0, true)]]).unwrap()
    }

    fn single_literal() -> Cnf {
        // (x)
        Cnf::new(1, vec![vec![(0, false)]]).unwrap()
    }

    fn random_cnf(rng: &mut impl Rng) -> Cnf {
        let variables = rng.gen_range(1..=4);
        let clauses = (0..rng.gen_range(1..=6))
            .map(|_| {
                (0..rng.gen_range(1..=3))
                    .map(|_| (rng.gen_range(0..variables), rng.gen()))
                    .collect()
            })
            .collect();
        Cnf::new(variables, clauses).unwrap()
    }

    #[test]
    fn truth_table_matches_hand_answers() {
        assert!(!contradiction().is_satisfiable());
        assert!(single_literal().is_satisfiable());
        let majority = Cnf::new(
            3,
            vec![
                vec![(0, false), (1, false)],
                vec![(1, false), (2, false)],
                vec![(0, false), (2, false)],
                vec![(0, true), (1, true), (2, true)],
            ],
        )
        .unwrap();
        // Exactly the assignments with one or two true variables work.
        assert!(majority.is_satisfiable());
        assert!(majority.evaluate(&[true, true, false]));
        assert!(!majority.evaluate(&[true, true, true]));
        assert!(!majority.evaluate(&[false, false, false]));
    }

    #[test]
    fn dimacs_round_trips_and_rejects_garbage() {
        let text = "c a comment\np cnf 3 2\n1 -2 0\n-1 2 3 0\n";
        let cnf = Cnf::parse_dimacs(text).unwrap();
        assert_eq!(cnf.variables(), 3);
        assert_eq!(cnf.clauses(), &[vec![(0, false), (1, true)], vec![(0, true), (1, false), (2, false)]]);
        assert_eq!(Cnf::parse_dimacs(&cnf.to_string()).unwrap(), cnf);

        for bad in [
            "1 -2 0\n",                    // literals before the header
            "p cnf 1 1\n2 0\n",            // undeclared variable
            "p cnf 1 1\n1\n",              // unterminated clause
            "p cnf 1 2\n1 0\n",            // clause count mismatch
            "p cnf 1 1\n0\n",              // empty clause
            "p dnf 1 1\n1 0\n",            // wrong format tag
            "p cnf 1 1\np cnf 1 1\n1 0\n", // duplicate header
        ] {
            assert!(Cnf::parse_dimacs(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn the_game_has_the_advertised_shape() {
        // (x or not y) and (y)
        let cnf = Cnf::new(2, vec![vec![(0, false), (1, true)], vec![(1, false)]]).unwrap();
        let init = gen_rabin_hardness_game(&cnf).unwrap();
        let g = &init.game;
        assert_eq!(init.initial, g.vertex_named("c00").unwrap());
        let names: Vec<&str> = (0..g.vertex_count()).map(|v| g.name(v)).collect();
        assert_eq!(names, ["c00", "c01", "n00", "n01", "p00", "p01"]);
        assert_eq!(g.owner(0), Some(0));
        assert_eq!(g.owner(4), Some(1));
        // Clause vertices reach exactly the literals they contain, while
        // every literal vertex reaches every clause.
        let succs = |v| g.succ_ids(v).collect::<Vec<_>>();
        assert_eq!(succs(0), vec![g.vertex_named("n01").unwrap(), g.vertex_named("p00").unwrap()]);
        assert_eq!(succs(1), vec![g.vertex_named("p01").unwrap()]);
        for lit in 2..6 {
            assert_eq!(succs(lit), vec![0, 1]);
        }
        match g.objective(0) {
            Objective::Rabin(pairs) => assert_eq!(pairs.len(), 4),
            other => panic!("unexpected objective {other:?}"),
        }
    }

    #[test]
    fn empty_formulas_and_empty_clauses_are_refused() {
        assert!(Cnf::new(1, vec![]).is_err());
        assert!(Cnf::new(1, vec![vec![(0, false)], vec![]]).is_err());
        assert!(Cnf::new(0, vec![vec![(0, false)]]).is_err());
    }

    #[test]
    fn the_assigner_wins_the_zero_sum_game_exactly_when_satisfiable() {
        let mut rng = game_core::generator::corpus_rng(0x5a7);
        let mut formulas = vec![contradiction(), single_literal()];
        formulas.extend((0..6).map(|_| random_cnf(&mut rng)));
        for cnf in formulas {
            let init = gen_rabin_hardness_game(&cnf).unwrap();
            let analysis = zerosum::coalition_analysis(&init.game, 0).unwrap();
            assert_eq!(
                analysis.positive.contains(&init.initial),
                cnf.is_satisfiable(),
                "formula:\n{cnf}"
            );
        }
    }

    #[test]
    fn full_scale_formulas_stay_fast() {
        // The largest shape the satisfiability tie-in is exercised with:
        // four variables and six clauses.
        let mut rng = game_core::generator::corpus_rng(0xf5);
        for round in 0..3 {
            let clauses = (0..6)
                .map(|_| {
                    (0..rng.gen_range(2..=3))
                        .map(|_| (rng.gen_range(0..4usize), rng.gen()))
                        .collect()
                })
                .collect();
            let cnf = Cnf::new(4, clauses).unwrap();
            let init = gen_rabin_hardness_game(&cnf).unwrap();
            let started = std::time::Instant::now();
            let analysis = zerosum::coalition_analysis(&init.game, 0).unwrap();
            let elapsed = started.elapsed();
            assert_eq!(analysis.positive.contains(&init.initial), cnf.is_satisfiable());
            assert!(
                elapsed.as_secs() < 60,
                "round {round} took {elapsed:?}, budget is one minute"
            );
            eprintln!("round {round}: {} vertices solved in {elapsed:?}", init.game.vertex_count());
        }
    }
}
