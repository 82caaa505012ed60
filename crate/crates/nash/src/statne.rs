//! Stationary equilibria through existential real arithmetic.
//!
//! Once the support of a stationary profile is fixed, everything
//! qualitative about the induced chain is fixed too: which bottom
//! strongly connected classes form, which of them satisfy each player's
//! objective (`F_i`), which vertices can reach a good class (`R_i`), and
//! inside which components a deviating player could win (`T_i`). What
//! remains — the actual probabilities, payoffs and best-response values —
//! is a finite conjunction of polynomial (in)equalities over the reals:
//!
//! * `phi` — the candidate numbers form distributions positive exactly
//!   on the support;
//! * `eta_i` — `z_i` is the payoff: one on good classes, zero where no
//!   good class is reachable, flow-consistent in between;
//! * `theta_i` — `r_i` dominates the deviator's optimum: one on `T_i`,
//!   superharmonic against the frozen co-players, monotone under the
//!   deviator's own choices (an overestimate only strengthens the test);
//! * the final block — `r_i ≤ z_i` at the start, and the payoff box.
//!
//! The conjunction is satisfiable iff a stationary equilibrium with that
//! exact support and a payoff inside the box exists. [`solve_statne`]
//! walks the supports, ships each script to an external solver, and
//! treats the reply as a hint only: models are rationalised and
//! re-certified exactly before anything is reported.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::io::Read;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use game_core::game::{GameError, PlayerId, Smg, VertexId};
use game_core::rational::Rational;
use num::bigint::BigInt;
use num::{One, Signed, Zero};
use objectives::{accepts_limit_set, generic_ec_union, scc_decomposition, BinaryPayoff};
use prob_solvers::{
    induce_markov_chain, induce_mdp, mc_omega_payoff_all_states, mdp_omega_value,
    StationaryProfile,
};

use crate::certify::certify_stationary;
use crate::types::{Certificate, NashError, ThresholdQuery};

/// Upper bound on enumerated supports before `solve_statne` refuses.
pub const DEFAULT_SUPPORT_CAP: usize = 1 << 14;

/// How long one external-solver call may run by default.
pub const DEFAULT_SOLVER_TIMEOUT: Duration = Duration::from_secs(30);

/// Denominator ceilings tried when rounding solver models to rationals.
const RATIONALIZE_LADDER: [u64; 10] = [1, 2, 4, 8, 16, 64, 256, 4096, 65_536, 1_000_000];

/// Which successors each controlled vertex may use with positive
/// probability. Stochastic vertices are not mentioned; their rows are the
/// game's own.
pub type SupportRelation = BTreeMap<VertexId, BTreeSet<VertexId>>;

// ---------------------------------------------------------------------
// Formula values
// ---------------------------------------------------------------------

/// Polynomial term over the script variables.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Var(String),
    Const(Rational),
    Sum(Vec<Term>),
    Prod(Vec<Term>),
}

impl Term {
    fn render(&self, out: &mut String) {
        match self {
            Term::Var(name) => out.push_str(name),
            Term::Const(c) => render_rational(c, out),
            Term::Sum(ts) => render_nary("+", ts, &Rational::zero(), out),
            Term::Prod(ts) => render_nary("*", ts, &Rational::one(), out),
        }
    }

    fn evaluate(&self, assignment: &BTreeMap<String, Rational>) -> Result<Rational, NashError> {
        match self {
            Term::Var(name) => assignment.get(name).cloned().ok_or_else(|| {
                NashError::SolverFailed(format!("assignment does not bind {name}"))
            }),
            Term::Const(c) => Ok(c.clone()),
            Term::Sum(ts) => ts.iter().try_fold(Rational::zero(), |acc, t| {
                Ok(acc + t.evaluate(assignment)?)
            }),
            Term::Prod(ts) => ts.iter().try_fold(Rational::one(), |acc, t| {
                Ok(acc * t.evaluate(assignment)?)
            }),
        }
    }
}

fn render_rational(c: &Rational, out: &mut String) {
    let negative = c.is_negative();
    if negative {
        out.push_str("(- ");
    }
    let abs = c.abs();
    if abs.denom().is_one() {
        let _ = write!(out, "{}", abs.numer());
    } else {
        let _ = write!(out, "(/ {} {})", abs.numer(), abs.denom());
    }
    if negative {
        out.push(')');
    }
}

fn render_nary(op: &str, ts: &[Term], empty: &Rational, out: &mut String) {
    match ts {
        [] => render_rational(empty, out),
        [t] => t.render(out),
        _ => {
            let _ = write!(out, "({op}");
            for t in ts {
                out.push(' ');
                t.render(out);
            }
            out.push(')');
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Eq,
    Le,
    Lt,
}

/// One labelled conjunct `lhs ⋈ rhs` of the emitted sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct Conjunct {
    pub label: String,
    pub lhs: Term,
    pub cmp: Cmp,
    pub rhs: Term,
}

impl Conjunct {
    fn holds(&self, assignment: &BTreeMap<String, Rational>) -> Result<bool, NashError> {
        let l = self.lhs.evaluate(assignment)?;
        let r = self.rhs.evaluate(assignment)?;
        Ok(match self.cmp {
            Cmp::Eq => l == r,
            Cmp::Le => l <= r,
            Cmp::Lt => l < r,
        })
    }
}

/// What a script variable stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarRole {
    /// Probability the profile moves `from → to`.
    Alpha { from: VertexId, to: VertexId },
    /// `player`'s payoff from `vertex` under the profile.
    Payoff { player: PlayerId, vertex: VertexId },
    /// Upper bound on `player`'s best-response value from `vertex`.
    BestResponse { player: PlayerId, vertex: VertexId },
}

/// A quantifier-free nonlinear-real-arithmetic sentence with a variable
/// manifest, rendered deterministically into the standard exchange
/// format. Satisfiable iff a stationary equilibrium with the frozen
/// support and a payoff inside the queried box exists.
#[derive(Debug, Clone, PartialEq)]
pub struct SmtScript {
    pub variables: Vec<(String, VarRole)>,
    pub conjuncts: Vec<Conjunct>,
}

impl SmtScript {
    /// The full solver input: logic, declarations, one labelled assert
    /// per conjunct, `check-sat`, and a model query for every variable.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("(set-logic QF_NRA)\n");
        for (name, _) in &self.variables {
            let _ = writeln!(out, "(declare-const {name} Real)");
        }
        for c in &self.conjuncts {
            let _ = writeln!(out, "; {}", c.label);
            out.push_str("(assert (");
            out.push_str(match c.cmp {
                Cmp::Eq => "=",
                Cmp::Le => "<=",
                Cmp::Lt => "<",
            });
            out.push(' ');
            c.lhs.render(&mut out);
            out.push(' ');
            c.rhs.render(&mut out);
            out.push_str("))\n");
        }
        out.push_str("(check-sat)\n(get-value (");
        for (i, (name, _)) in self.variables.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(name);
        }
        out.push_str("))\n");
        out
    }

    /// Truth value of every conjunct under an exact assignment, in
    /// emission order.
    pub fn evaluate(
        &self,
        assignment: &BTreeMap<String, Rational>,
    ) -> Result<Vec<(String, bool)>, NashError> {
        self.conjuncts
            .iter()
            .map(|c| Ok((c.label.clone(), c.holds(assignment)?)))
            .collect()
    }
}

fn alpha_name(v: VertexId, w: VertexId) -> String {
    format!("a_{v}_{w}")
}

fn payoff_name(i: PlayerId, v: VertexId) -> String {
    format!("z_{i}_{v}")
}

fn response_name(i: PlayerId, v: VertexId) -> String {
    format!("r_{i}_{v}")
}

// ---------------------------------------------------------------------
// Supports and their derived sets
// ---------------------------------------------------------------------

/// Validates a support relation and fills in the rows of controlled
/// vertices with a single successor (those are forced and may be
/// omitted).
pub fn complete_support(g: &Smg, s: &SupportRelation) -> Result<SupportRelation, NashError> {
    let mut full = SupportRelation::new();
    for (&v, row) in s {
        if v >= g.vertex_count() {
            return Err(NashError::BadSupport(format!("no vertex #{v}")));
        }
        if g.is_stochastic(v) {
            return Err(NashError::BadSupport(format!(
                "{} is a chance vertex; its row is fixed by the game",
                g.name(v)
            )));
        }
        if row.is_empty() {
            return Err(NashError::BadSupport(format!("empty row for {}", g.name(v))));
        }
        let succs: BTreeSet<VertexId> = g.succ_ids(v).collect();
        for &w in row {
            if !succs.contains(&w) {
                return Err(NashError::BadSupport(format!(
                    "{} -> {} is not an edge",
                    g.name(v),
                    g.name(w.min(g.vertex_count().saturating_sub(1)))
                )));
            }
        }
        full.insert(v, row.clone());
    }
    for v in g.vertices().filter(|&v| !g.is_stochastic(v)) {
        if full.contains_key(&v) {
            continue;
        }
        let succs: Vec<VertexId> = g.succ_ids(v).collect();
        if succs.len() == 1 {
            full.insert(v, succs.into_iter().collect());
        } else {
            return Err(NashError::BadSupport(format!(
                "{} has {} successors; its support row must be given",
                g.name(v),
                succs.len()
            )));
        }
    }
    Ok(full)
}

/// Per-vertex successor lists of the support graph: support edges at
/// controlled vertices, all edges at chance vertices.
fn support_adjacency(g: &Smg, s: &SupportRelation) -> Vec<Vec<usize>> {
    g.vertices()
        .map(|v| {
            if g.is_stochastic(v) {
                g.succ_ids(v).collect()
            } else {
                s[&v].iter().copied().collect()
            }
        })
        .collect()
}

/// Union of the bottom classes of `adj` whose vertex set satisfies
/// player `i`'s objective (the recurrent part every run settles in).
fn good_bottom_classes(g: &Smg, adj: &[Vec<usize>], i: PlayerId) -> BTreeSet<VertexId> {
    let mut good = BTreeSet::new();
    for scc in scc_decomposition(adj) {
        let members: BTreeSet<VertexId> = scc.iter().copied().collect();
        let bottom = scc.iter().all(|&v| adj[v].iter().all(|w| members.contains(w)));
        if bottom && accepts_limit_set(g.objective(i), &members) {
            good.extend(members);
        }
    }
    good
}

fn backward_reach(adj: &[Vec<usize>], target: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); adj.len()];
    for (v, row) in adj.iter().enumerate() {
        for &w in row {
            preds[w].push(v);
        }
    }
    let mut seen = target.clone();
    let mut queue: VecDeque<usize> = target.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        for &p in &preds[v] {
            if seen.insert(p) {
                queue.push_back(p);
            }
        }
    }
    seen
}

/// The one-player view player `i` faces after deviating: everyone else
/// frozen onto their support rows (weights are irrelevant for component
/// analysis), `i` keeping every edge.
fn deviator_view(g: &Smg, s: &SupportRelation, i: PlayerId) -> Smg {
    let vertices: Vec<(String, Option<PlayerId>)> = g
        .vertices()
        .map(|v| (g.name(v).to_owned(), (g.owner(v) == Some(i)).then_some(0)))
        .collect();
    let mut edges: Vec<(usize, usize, Option<Rational>)> = Vec::new();
    for v in g.vertices() {
        match g.owner(v) {
            Some(j) if j == i => edges.extend(g.succ_ids(v).map(|w| (v, w, None))),
            Some(_) => {
                let row = &s[&v];
                let p = Rational::new(1.into(), (row.len() as i64).into());
                edges.extend(row.iter().map(|&w| (v, w, Some(p.clone()))));
            }
            None => edges.extend(g.successors(v).iter().map(|(w, pr)| (v, *w, pr.clone()))),
        }
    }
    Smg::from_parts(1, vertices, edges, vec![g.objective(i).clone()])
        .expect("support rows keep the arena well-formed")
}

/// Product states from which player `i` can force a winning limit set
/// while the co-players follow the support.
fn deviation_win_region(g: &Smg, s: &SupportRelation, i: PlayerId) -> BTreeSet<VertexId> {
    let view = deviator_view(g, s, i);
    let everything: BTreeSet<VertexId> = view.vertices().collect();
    generic_ec_union(&view, &BinaryPayoff::new(vec![true]), &everything).vertices
}

// ---------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------

/// Emits the sentence whose satisfiability is equivalent to the
/// existence of a stationary equilibrium from `v0` with support exactly
/// `s` and payoff inside `q`'s box. Single-successor rows of `s` may be
/// omitted; everything else must be present and consistent with the
/// arena.
pub fn emit_statne_smt(
    g: &Smg,
    v0: VertexId,
    q: &ThresholdQuery,
    s: &SupportRelation,
) -> Result<SmtScript, NashError> {
    if v0 >= g.vertex_count() {
        return Err(NashError::Game(GameError::UnknownVertex(format!("#{v0}"))));
    }
    if q.players() != g.players() {
        return Err(NashError::BadQuery(format!(
            "{} bounds for {} players",
            q.players(),
            g.players()
        )));
    }
    let s = complete_support(g, s)?;
    let adj = support_adjacency(g, &s);

    let mut variables: Vec<(String, VarRole)> = Vec::new();
    for (&v, row) in &s {
        for &w in row {
            variables.push((alpha_name(v, w), VarRole::Alpha { from: v, to: w }));
        }
    }
    for i in 0..g.players() {
        for v in g.vertices() {
            variables.push((payoff_name(i, v), VarRole::Payoff { player: i, vertex: v }));
        }
    }
    for i in 0..g.players() {
        for v in g.vertices() {
            variables.push((response_name(i, v), VarRole::BestResponse { player: i, vertex: v }));
        }
    }

    let mut conjuncts: Vec<Conjunct> = Vec::new();
    let one = Term::Const(Rational::one());
    let nil = Term::Const(Rational::zero());

    // phi: each supported edge strictly positive, each row summing to one.
    for (&v, row) in &s {
        for &w in row {
            conjuncts.push(Conjunct {
                label: format!("phi:pos:{}:{}", g.name(v), g.name(w)),
                lhs: nil.clone(),
                cmp: Cmp::Lt,
                rhs: Term::Var(alpha_name(v, w)),
            });
        }
        conjuncts.push(Conjunct {
            label: format!("phi:sum:{}", g.name(v)),
            lhs: Term::Sum(row.iter().map(|&w| Term::Var(alpha_name(v, w))).collect()),
            cmp: Cmp::Eq,
            rhs: one.clone(),
        });
    }

    // The outgoing row of `v` as terms weighting `value(w)`.
    let weighted = |v: VertexId, value: &dyn Fn(VertexId) -> String| -> Vec<Term> {
        if g.is_stochastic(v) {
            g.successors(v)
                .iter()
                .map(|(w, p)| {
                    Term::Prod(vec![
                        Term::Const(p.clone().expect("chance edges carry probabilities")),
                        Term::Var(value(*w)),
                    ])
                })
                .collect()
        } else {
            s[&v]
                .iter()
                .map(|&w| Term::Prod(vec![Term::Var(alpha_name(v, w)), Term::Var(value(w))]))
                .collect()
        }
    };

    for i in 0..g.players() {
        // eta_i: z is one on good bottom classes, zero where none is
        // reachable, and flow-consistent in between.
        let good = good_bottom_classes(g, &adj, i);
        let can_reach_good = backward_reach(&adj, &good);
        for v in g.vertices() {
            let z = Term::Var(payoff_name(i, v));
            if good.contains(&v) {
                conjuncts.push(Conjunct {
                    label: format!("eta:{i}:one:{}", g.name(v)),
                    lhs: z,
                    cmp: Cmp::Eq,
                    rhs: one.clone(),
                });
            } else if !can_reach_good.contains(&v) {
                conjuncts.push(Conjunct {
                    label: format!("eta:{i}:zero:{}", g.name(v)),
                    lhs: z,
                    cmp: Cmp::Eq,
                    rhs: nil.clone(),
                });
            } else {
                conjuncts.push(Conjunct {
                    label: format!("eta:{i}:flow:{}", g.name(v)),
                    lhs: z,
                    cmp: Cmp::Eq,
                    rhs: Term::Sum(weighted(v, &|w| payoff_name(i, w))),
                });
            }
        }

        // theta_i: r dominates the deviator's optimum — a unit bound,
        // one on the deviation-winning components, superharmonic under
        // the frozen co-players, monotone under i's own alternatives.
        let win = deviation_win_region(g, &s, i);
        for v in g.vertices() {
            let r = Term::Var(response_name(i, v));
            conjuncts.push(Conjunct {
                label: format!("theta:{i}:lo:{}", g.name(v)),
                lhs: nil.clone(),
                cmp: Cmp::Le,
                rhs: r.clone(),
            });
            conjuncts.push(Conjunct {
                label: format!("theta:{i}:hi:{}", g.name(v)),
                lhs: r.clone(),
                cmp: Cmp::Le,
                rhs: one.clone(),
            });
            if win.contains(&v) {
                conjuncts.push(Conjunct {
                    label: format!("theta:{i}:win:{}", g.name(v)),
                    lhs: r.clone(),
                    cmp: Cmp::Eq,
                    rhs: one.clone(),
                });
            }
            if g.owner(v) == Some(i) {
                for w in g.succ_ids(v) {
                    conjuncts.push(Conjunct {
                        label: format!("theta:{i}:dev:{}:{}", g.name(v), g.name(w)),
                        lhs: Term::Var(response_name(i, w)),
                        cmp: Cmp::Le,
                        rhs: r.clone(),
                    });
                }
            } else {
                conjuncts.push(Conjunct {
                    label: format!("theta:{i}:flow:{}", g.name(v)),
                    lhs: Term::Sum(weighted(v, &|w| response_name(i, w))),
                    cmp: Cmp::Le,
                    rhs: r.clone(),
                });
            }
        }
    }

    // Final block: no profitable deviation at the start, payoff in the box.
    for i in 0..g.players() {
        conjuncts.push(Conjunct {
            label: format!("final:{i}:noregret"),
            lhs: Term::Var(response_name(i, v0)),
            cmp: Cmp::Le,
            rhs: Term::Var(payoff_name(i, v0)),
        });
        conjuncts.push(Conjunct {
            label: format!("final:{i}:atleast"),
            lhs: Term::Const(q.min(i).clone()),
            cmp: Cmp::Le,
            rhs: Term::Var(payoff_name(i, v0)),
        });
        conjuncts.push(Conjunct {
            label: format!("final:{i}:atmost"),
            lhs: Term::Var(payoff_name(i, v0)),
            cmp: Cmp::Le,
            rhs: Term::Const(q.max(i).clone()),
        });
    }

    Ok(SmtScript { variables, conjuncts })
}

/// The canonical assignment a profile with support `s` induces: its own
/// probabilities for the alpha variables, its exact payoffs for `z`, and
/// its exact best-response values for `r`. The profile's support must
/// match `s` exactly.
pub fn statne_assignment(
    g: &Smg,
    s: &SupportRelation,
    p: &StationaryProfile,
) -> Result<BTreeMap<String, Rational>, NashError> {
    let s = complete_support(g, s)?;
    p.validate_covering(g, None)?;
    let support_of_p: SupportRelation = p
        .support()
        .into_iter()
        .map(|(v, ws)| (v, ws.into_iter().collect()))
        .collect();
    if support_of_p != s {
        return Err(NashError::BadSupport(
            "profile support differs from the frozen relation".to_owned(),
        ));
    }
    let mut assignment = BTreeMap::new();
    for (v, row) in &p.rows {
        for (w, prob) in row {
            assignment.insert(alpha_name(*v, *w), prob.clone());
        }
    }
    let chain = induce_markov_chain(g, p)?;
    let payoffs = mc_omega_payoff_all_states(&chain, g.objectives())?;
    for (i, per_state) in payoffs.iter().enumerate() {
        for v in g.vertices() {
            assignment.insert(payoff_name(i, v), per_state[v].clone());
        }
    }
    for i in 0..g.players() {
        let mdp = induce_mdp(g, p, i)?;
        let outcome = mdp_omega_value(&mdp, g.objective(i))?;
        for v in g.vertices() {
            assignment.insert(response_name(i, v), outcome.values[v].clone());
        }
    }
    Ok(assignment)
}

// ---------------------------------------------------------------------
// Support enumeration
// ---------------------------------------------------------------------

/// Every support relation of the arena, ordered by total size and then
/// lexicographically by the sorted pair list. Errors out when more than
/// `cap` relations exist.
pub fn enumerate_supports(g: &Smg, cap: usize) -> Result<Vec<SupportRelation>, NashError> {
    let controlled: Vec<VertexId> = g.vertices().filter(|&v| !g.is_stochastic(v)).collect();
    let mut count: usize = 1;
    for &v in &controlled {
        let deg = g.succ_ids(v).count();
        let options = (1usize << deg) - 1;
        count = count
            .checked_mul(options)
            .filter(|&c| c <= cap)
            .ok_or(NashError::SupportSpaceExceeded { cap })?;
    }
    let mut supports: Vec<SupportRelation> = vec![SupportRelation::new()];
    for &v in &controlled {
        let succs: Vec<VertexId> = g.succ_ids(v).collect();
        let mut grown = Vec::with_capacity(supports.len() * ((1 << succs.len()) - 1));
        for mask in 1u32..(1 << succs.len()) {
            let row: BTreeSet<VertexId> = succs
                .iter()
                .enumerate()
                .filter(|&(k, _)| mask >> k & 1 == 1)
                .map(|(_, &w)| w)
                .collect();
            for s in &supports {
                let mut bigger = s.clone();
                bigger.insert(v, row.clone());
                grown.push(bigger);
            }
        }
        supports = grown;
    }
    supports.sort_by_key(|s| {
        let size: usize = s.values().map(BTreeSet::len).sum();
        let pairs: Vec<(VertexId, VertexId)> =
            s.iter().flat_map(|(&v, ws)| ws.iter().map(move |&w| (v, w))).collect();
        (size, pairs)
    });
    Ok(supports)
}

// ---------------------------------------------------------------------
// External solver bridge
// ---------------------------------------------------------------------

/// How to reach the external real-arithmetic solver: a program with
/// leading arguments; the script path is appended as the last argument.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub command: Vec<String>,
    pub timeout: Duration,
}

impl SolverConfig {
    /// Splits a command line on whitespace; the first token is the
    /// program.
    pub fn from_command(line: &str, timeout: Duration) -> Result<Self, NashError> {
        let command: Vec<String> = line.split_whitespace().map(str::to_owned).collect();
        if command.is_empty() {
            return Err(NashError::SolverFailed("empty solver command".to_owned()));
        }
        Ok(SolverConfig { command, timeout })
    }
}

#[derive(Debug)]
enum SolverReply {
    Sat(BTreeMap<String, Rational>),
    /// `sat` whose model could not be parsed into rationals.
    SatUnparsed,
    Unsat,
    Unknown,
}

fn run_solver(cfg: &SolverConfig, script: &str) -> Result<SolverReply, NashError> {
    let dir = tempfile::tempdir()
        .map_err(|e| NashError::SolverFailed(format!("cannot create workspace: {e}")))?;
    let path = dir.path().join("query.smt2");
    std::fs::write(&path, script)
        .map_err(|e| NashError::SolverFailed(format!("cannot write script: {e}")))?;
    let mut child = Command::new(&cfg.command[0])
        .args(&cfg.command[1..])
        .arg(&path)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| NashError::SolverFailed(format!("cannot start {}: {e}", cfg.command[0])))?;
    let started = Instant::now();
    let finished = loop {
        match child.try_wait() {
            Ok(Some(_)) => break true,
            Ok(None) if started.elapsed() > cfg.timeout => {
                let _ = child.kill();
                let _ = child.wait();
                break false;
            }
            Ok(None) => std::thread::sleep(Duration::from_millis(5)),
            Err(e) => return Err(NashError::SolverFailed(format!("wait failed: {e}"))),
        }
    };
    if !finished {
        return Ok(SolverReply::Unknown);
    }
    let mut text = String::new();
    if let Some(mut out) = child.stdout.take() {
        let _ = out.read_to_string(&mut text);
    }
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    match lines.next() {
        Some("unsat") => Ok(SolverReply::Unsat),
        Some("sat") => {
            let rest: String = lines.collect::<Vec<_>>().join("\n");
            match parse_model(&rest) {
                Some(model) => Ok(SolverReply::Sat(model)),
                None => Ok(SolverReply::SatUnparsed),
            }
        }
        _ => Ok(SolverReply::Unknown),
    }
}

// --- s-expression model parsing ---

#[derive(Debug)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
            }
            c => current.push(c),
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

fn parse_sexps(tokens: &[String]) -> Option<Vec<Sexp>> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    for t in tokens {
        match t.as_str() {
            "(" => stack.push(Vec::new()),
            ")" => {
                let done = stack.pop()?;
                stack.last_mut()?.push(Sexp::List(done));
            }
            atom => stack.last_mut()?.push(Sexp::Atom(atom.to_owned())),
        }
    }
    (stack.len() == 1).then(|| stack.pop().unwrap())
}

/// Exact rational meaning of a model value: integers, decimals,
/// `(/ p q)`, and unary minus. Algebraic irrationals yield `None`.
fn sexp_rational(s: &Sexp) -> Option<Rational> {
    match s {
        Sexp::Atom(a) => atom_rational(a),
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(op), x] if op == "-" => Some(-sexp_rational(x)?),
            [Sexp::Atom(op), x] if op == "+" => sexp_rational(x),
            [Sexp::Atom(op), x, y] if op == "/" => {
                let d = sexp_rational(y)?;
                (!d.is_zero()).then(|| sexp_rational(x).map(|n| n / d))?
            }
            _ => None,
        },
    }
}

fn atom_rational(a: &str) -> Option<Rational> {
    let (negative, digits) = match a.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, a),
    };
    let value = match digits.split_once('.') {
        Some((whole, frac)) => {
            if !whole.chars().all(|c| c.is_ascii_digit())
                || !frac.chars().all(|c| c.is_ascii_digit())
                || (whole.is_empty() && frac.is_empty())
            {
                return None;
            }
            let scale = num::pow(BigInt::from(10u32), frac.len());
            let units: BigInt = if whole.is_empty() { BigInt::zero() } else { whole.parse().ok()? };
            let cents: BigInt = if frac.is_empty() { BigInt::zero() } else { frac.parse().ok()? };
            Rational::new(units * &scale + cents, scale)
        }
        None => {
            if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
                return None;
            }
            Rational::from_integer(digits.parse().ok()?)
        }
    };
    Some(if negative { -value } else { value })
}

/// Reads a `get-value` reply (or a `model`/`define-fun` block) into
/// exact per-variable rationals. Unparseable values fail the whole model.
fn parse_model(text: &str) -> Option<BTreeMap<String, Rational>> {
    let sexps = parse_sexps(&tokenize(text))?;
    let mut model = BTreeMap::new();
    let mut bind = |items: &[Sexp]| -> bool {
        match items {
            [Sexp::Atom(name), value] => match sexp_rational(value) {
                Some(r) => {
                    model.insert(name.clone(), r);
                    true
                }
                None => false,
            },
            [Sexp::Atom(kw), Sexp::Atom(name), Sexp::List(args), Sexp::Atom(sort), value]
                if kw == "define-fun" && args.is_empty() && sort == "Real" =>
            {
                match sexp_rational(value) {
                    Some(r) => {
                        model.insert(name.clone(), r);
                        true
                    }
                    None => false,
                }
            }
            _ => false,
        }
    };
    for top in &sexps {
        let Sexp::List(items) = top else { return None };
        // Either a list of (name value) pairs, or a model wrapper.
        let entries: &[Sexp] = match items.first() {
            Some(Sexp::Atom(kw)) if kw == "model" => &items[1..],
            Some(Sexp::Atom(kw)) if kw == "define-fun" => std::slice::from_ref(top),
            _ => items,
        };
        for entry in entries {
            match entry {
                Sexp::List(pair) => {
                    if !bind(pair) {
                        return None;
                    }
                }
                Sexp::Atom(_) => return None,
            }
        }
    }
    Some(model)
}

/// Best rational approximation of `x` with denominator at most
/// `max_den`, by continued-fraction convergents.
fn best_approximation(x: &Rational, max_den: &BigInt) -> Rational {
    let mut p0 = BigInt::one();
    let mut q0 = BigInt::zero();
    let mut p1 = x.floor().to_integer();
    let mut q1 = BigInt::one();
    let mut frac = x - x.floor();
    while !frac.is_zero() {
        // frac ∈ (0,1), so its reciprocal is positive and truncation
        // equals the floor.
        let inv = frac.recip();
        let a = inv.to_integer();
        frac = inv.fract();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if &q2 > max_den {
            break;
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
    }
    Rational::new(p1, q1)
}

// ---------------------------------------------------------------------
// The decision procedure
// ---------------------------------------------------------------------

/// Outcome of the stationary search. Only `Found` carries a claim that
/// was proven internally; the other two qualify how far the solver-aided
/// sweep got.
#[derive(Debug, Clone, PartialEq)]
pub enum StatneOutcome {
    /// A profile that the exact certifier accepts.
    Found { profile: StationaryProfile, certificate: Certificate },
    /// Every support was conclusively refuted by the solver.
    NoneWithinScope,
    /// Some supports could not be settled (unknown replies, timeouts, or
    /// models that resisted exact reconstruction).
    Inconclusive { unsettled_supports: usize },
}

/// Builds a profile from per-edge values, optionally rounded to
/// denominators at most `bound`, rows renormalised to sum to one. `None`
/// when a value collapses to zero or negative (the support would break).
fn profile_from_alphas(
    s: &SupportRelation,
    alphas: &BTreeMap<(VertexId, VertexId), Rational>,
    bound: Option<&BigInt>,
) -> Option<StationaryProfile> {
    let mut rows = BTreeMap::new();
    for (&v, row) in s {
        let mut entries: Vec<(VertexId, Rational)> = Vec::with_capacity(row.len());
        let mut total = Rational::zero();
        for &w in row {
            let raw = alphas.get(&(v, w))?;
            let value = match bound {
                Some(b) => best_approximation(raw, b),
                None => raw.clone(),
            };
            if value <= Rational::zero() {
                return None;
            }
            total += &value;
            entries.push((w, value));
        }
        for (_, value) in &mut entries {
            *value /= &total;
        }
        rows.insert(v, entries);
    }
    Some(StationaryProfile { rows })
}

/// Turns a solver model into an exactly certified profile, trying the
/// parsed values first and ever-coarser rationalisations after.
fn exactify(
    g: &Smg,
    v0: VertexId,
    q: &ThresholdQuery,
    s: &SupportRelation,
    model: &BTreeMap<String, Rational>,
) -> Option<(StationaryProfile, Certificate)> {
    let mut alphas: BTreeMap<(VertexId, VertexId), Rational> = BTreeMap::new();
    for (&v, row) in s {
        for &w in row {
            alphas.insert((v, w), model.get(&alpha_name(v, w))?.clone());
        }
    }
    let mut tried: Vec<StationaryProfile> = Vec::new();
    let bounds = std::iter::once(None)
        .chain(RATIONALIZE_LADDER.iter().map(|&d| Some(BigInt::from(d))));
    for bound in bounds {
        let Some(candidate) = profile_from_alphas(s, &alphas, bound.as_ref()) else {
            continue;
        };
        if tried.contains(&candidate) {
            continue;
        }
        if let Ok(cert) = certify_stationary(g, v0, &candidate, q) {
            if cert.accepted {
                return Some((candidate, cert));
            }
        }
        tried.push(candidate);
    }
    None
}

/// Searches for a stationary equilibrium from `v0` with payoff inside
/// `q`'s box: supports in increasing size, one emitted sentence and one
/// external-solver call each, every `sat` model rationalised and
/// re-certified by [`certify_stationary`] before being believed. A
/// support is only ruled out by an `unsat` reply; anything murkier is
/// counted and the sweep continues.
pub fn solve_statne(
    g: &Smg,
    v0: VertexId,
    q: &ThresholdQuery,
    solver: &SolverConfig,
    cap: usize,
) -> Result<StatneOutcome, NashError> {
    if v0 >= g.vertex_count() {
        return Err(NashError::Game(GameError::UnknownVertex(format!("#{v0}"))));
    }
    if q.players() != g.players() {
        return Err(NashError::BadQuery(format!(
            "{} bounds for {} players",
            q.players(),
            g.players()
        )));
    }
    let mut unsettled = 0usize;
    for s in enumerate_supports(g, cap)? {
        let script = emit_statne_smt(g, v0, q, &s)?;
        match run_solver(solver, &script.render())? {
            SolverReply::Unsat => {}
            SolverReply::Unknown | SolverReply::SatUnparsed => unsettled += 1,
            SolverReply::Sat(model) => match exactify(g, v0, q, &s, &model) {
                Some((profile, certificate)) => {
                    return Ok(StatneOutcome::Found { profile, certificate });
                }
                None => unsettled += 1,
            },
        }
    }
    if unsettled > 0 {
        Ok(StatneOutcome::Inconclusive { unsettled_supports: unsettled })
    } else {
        Ok(StatneOutcome::NoneWithinScope)
    }
}
