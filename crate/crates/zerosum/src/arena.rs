//! Qualitative solving of two-player stochastic parity arenas.
//!
//! The arena keeps only what qualitative questions can see: who moves where,
//! which successors exist, and the priority of every vertex. Transition
//! probabilities are deliberately absent — whether the protagonist wins with
//! probability one (or with positive probability) depends only on the
//! supports of the stochastic vertices, never on the exact weights.
//!
//! The protagonist wins a play when the least priority occurring infinitely
//! often is even; the coalition wins when it is odd. `solve` computes, for
//! the protagonist, the almost-sure region, the positive region, and pure
//! positional strategies for both sides:
//!
//! * the protagonist's choice wins with probability one from the almost-sure
//!   region and with positive probability from the positive region;
//! * the coalition's choice holds the protagonist to probability zero from
//!   every vertex outside the positive region (and to probability strictly
//!   below one outside the almost-sure region).
//!
//! The solver is an attractor-peeling recursion. When the least priority `d`
//! favours the solved side it attracts to the `d`-vertices and recurses on
//! the trap left behind; when `d` favours the adversary it first wins the
//! trap that avoids `d`, extends it with the almost-sure reachability region,
//! and replaces the whole extension by a freshly won sink before continuing.
//! Every step reuses only positive attractors, so all intermediate vertex
//! sets leave genuine subarenas behind (chance vertices never lose edges).

use std::collections::VecDeque;

/// Who moves at a vertex.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Owner {
    Protagonist,
    Coalition,
    Chance,
}

/// The side a computation is carried out for.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Protagonist,
    Coalition,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Protagonist => Side::Coalition,
            Side::Coalition => Side::Protagonist,
        }
    }

    fn owner(self) -> Owner {
        match self {
            Side::Protagonist => Owner::Protagonist,
            Side::Coalition => Owner::Coalition,
        }
    }

    /// Whether a priority is the kind this side wants to see dominate.
    fn favours(self, priority: u32) -> bool {
        (priority % 2 == 0) == (self == Side::Protagonist)
    }
}

/// A finite two-player stochastic parity arena (supports only).
#[derive(Clone, Debug)]
pub struct Arena {
    owner: Vec<Owner>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    prio: Vec<u32>,
}

impl Arena {
    /// Builds an arena. Successor lists are sorted and deduplicated; every
    /// vertex must keep at least one successor.
    pub fn new(owner: Vec<Owner>, succ: Vec<Vec<usize>>, prio: Vec<u32>) -> Arena {
        let n = owner.len();
        assert_eq!(succ.len(), n, "owner/successor tables must agree");
        assert_eq!(prio.len(), n, "owner/priority tables must agree");
        let mut succ = succ;
        for (v, row) in succ.iter_mut().enumerate() {
            row.sort_unstable();
            row.dedup();
            assert!(!row.is_empty(), "vertex {v} has no successor");
            assert!(row.iter().all(|&w| w < n), "vertex {v} has an out-of-range successor");
        }
        let mut pred = vec![Vec::new(); n];
        for (v, row) in succ.iter().enumerate() {
            for &w in row {
                pred[w].push(v);
            }
        }
        Arena { owner, succ, pred, prio }
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn owner_of(&self, v: usize) -> Owner {
        self.owner[v]
    }

    pub fn priority(&self, v: usize) -> u32 {
        self.prio[v]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    fn min_priority(&self) -> Option<u32> {
        self.prio.iter().copied().min()
    }

    /// Least set containing `target` that `side` can enter with positive
    /// probability in one step, iterated: `side` and chance vertices join on
    /// some successor inside, the adversary joins only when trapped (all
    /// successors inside). Also returns, for `side`-owned members outside the
    /// target, a successor strictly closer to the target.
    fn positive_attractor(&self, side: Side, target: &[bool]) -> (Vec<bool>, Vec<Option<usize>>) {
        let n = self.len();
        let mut inside = target.to_vec();
        let mut choice: Vec<Option<usize>> = vec![None; n];
        let mut need: Vec<usize> = (0..n)
            .map(|v| if self.owner[v] == side.other().owner() { self.succ[v].len() } else { 1 })
            .collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| inside[v]).collect();
        while let Some(w) = queue.pop_front() {
            for &v in &self.pred[w] {
                if inside[v] {
                    continue;
                }
                need[v] -= 1;
                if need[v] == 0 {
                    inside[v] = true;
                    if self.owner[v] == side.owner() {
                        choice[v] = Some(w);
                    }
                    queue.push_back(v);
                }
            }
        }
        (inside, choice)
    }

    /// Vertices from which `side` can force reaching `target` with
    /// probability one, with a positional choice witnessing it.
    fn almost_sure_reach(&self, side: Side, target: &[bool]) -> (Vec<bool>, Vec<Option<usize>>) {
        let n = self.len();
        let mut live = vec![true; n];
        loop {
            let mut reach = vec![false; n];
            let mut choice: Vec<Option<usize>> = vec![None; n];
            let mut need: Vec<usize> = (0..n)
                .map(|v| if self.owner[v] == side.other().owner() { self.succ[v].len() } else { 1 })
                .collect();
            let mut queue: VecDeque<usize> = VecDeque::new();
            for v in 0..n {
                if target[v] && live[v] {
                    reach[v] = true;
                    queue.push_back(v);
                }
            }
            while let Some(w) = queue.pop_front() {
                for &v in &self.pred[w] {
                    if reach[v] || !live[v] {
                        continue;
                    }
                    let joins = match self.owner[v] {
                        Owner::Chance => self.succ[v].iter().all(|&s| live[s]),
                        o if o == side.owner() => {
                            choice[v] = Some(w);
                            true
                        }
                        _ => {
                            need[v] -= 1;
                            need[v] == 0
                        }
                    };
                    if joins {
                        reach[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            if reach == live {
                return (reach, choice);
            }
            live = reach;
        }
    }

    /// Restriction to `keep`. Panics if a kept vertex loses every successor,
    /// or if a kept chance vertex loses any branch of its support — callers
    /// only restrict to complements of positive attractors, which preserve
    /// both properties. Returns the sub-arena and the map new id → old id.
    fn restrict(&self, keep: &[bool]) -> (Arena, Vec<usize>) {
        let trace: Vec<usize> = (0..self.len()).filter(|&v| keep[v]).collect();
        let mut back = vec![usize::MAX; self.len()];
        for (i, &v) in trace.iter().enumerate() {
            back[v] = i;
        }
        let mut owner = Vec::with_capacity(trace.len());
        let mut prio = Vec::with_capacity(trace.len());
        let mut succ = Vec::with_capacity(trace.len());
        for &v in &trace {
            owner.push(self.owner[v]);
            prio.push(self.prio[v]);
            let row: Vec<usize> =
                self.succ[v].iter().filter(|&&w| keep[w]).map(|&w| back[w]).collect();
            assert!(!row.is_empty(), "restriction removed every successor of a kept vertex");
            if self.owner[v] == Owner::Chance {
                assert_eq!(
                    row.len(),
                    self.succ[v].len(),
                    "restriction must keep chance supports intact"
                );
            }
            succ.push(row);
        }
        (Arena::new(owner, succ, prio), trace)
    }

    /// Replaces the `absorb` region by a single absorbing chance sink of the
    /// given priority; every edge into the region is rerouted to the sink.
    /// Remaining priorities are shifted by two so the sink's priority is the
    /// strict minimum. Returns the arena, the map new id → old id for the
    /// surviving vertices, and the sink's id (the last one).
    fn redirect(&self, absorb: &[bool], sink_priority: u32) -> (Arena, Vec<usize>, usize) {
        let trace: Vec<usize> = (0..self.len()).filter(|&v| !absorb[v]).collect();
        let sink = trace.len();
        let mut back = vec![usize::MAX; self.len()];
        for (i, &v) in trace.iter().enumerate() {
            back[v] = i;
        }
        let mut owner = Vec::with_capacity(sink + 1);
        let mut prio = Vec::with_capacity(sink + 1);
        let mut succ = Vec::with_capacity(sink + 1);
        for &v in &trace {
            owner.push(self.owner[v]);
            prio.push(self.prio[v] + 2);
            let mut row: Vec<usize> = Vec::with_capacity(self.succ[v].len());
            let mut to_sink = false;
            for &w in &self.succ[v] {
                if absorb[w] {
                    to_sink = true;
                } else {
                    row.push(back[w]);
                }
            }
            if to_sink {
                row.push(sink);
            }
            succ.push(row);
        }
        owner.push(Owner::Chance);
        prio.push(sink_priority);
        succ.push(vec![sink]);
        (Arena::new(owner, succ, prio), trace, sink)
    }
}

/// Almost-sure winning region of `side` together with a pure positional
/// strategy that wins with probability one from every vertex of the region.
/// The strategy maps `side`-owned vertices of the region to successors.
pub fn almost_sure_region(a: &Arena, side: Side) -> (Vec<bool>, Vec<Option<usize>>) {
    let n0 = a.len();
    let mut won = vec![false; n0];
    let mut choice: Vec<Option<usize>> = vec![None; n0];
    // `cur` is the still-unresolved arena; `trace` maps its ids to original
    // ids, `usize::MAX` marking synthetic sinks that stand for already won
    // territory.
    let mut cur = a.clone();
    let mut trace: Vec<usize> = (0..n0).collect();

    loop {
        let n = cur.len();
        if n == 0 {
            return (won, choice);
        }
        let d = cur.min_priority().expect("non-empty arena has a priority");
        let p_d: Vec<bool> = (0..n).map(|v| cur.prio[v] == d).collect();

        // Resolves a choice target in `cur` ids to an original successor of
        // `orig`; synthetic targets become any already-won successor.
        let resolve = |orig: usize, target: usize, won: &Vec<bool>, trace: &Vec<usize>| -> usize {
            let t = trace[target];
            if t != usize::MAX {
                t
            } else {
                *a.succ[orig]
                    .iter()
                    .find(|&&s| won[s])
                    .expect("synthetic successor must stand for a won vertex")
            }
        };

        if side.favours(d) {
            let (attr, attr_choice) = cur.positive_attractor(side, &p_d);
            let keep: Vec<bool> = attr.iter().map(|&b| !b).collect();
            let (trap, trap_trace) = cur.restrict(&keep);
            let (trap_won, trap_choice) = solve_almost_sure(&trap, side);
            if trap_won.iter().all(|&b| b) {
                // The whole remaining arena is won: inside the trap play its
                // winning strategy, in the attractor head for priority `d`,
                // and at `d` itself anything goes.
                for v in 0..n {
                    let orig = trace[v];
                    if orig == usize::MAX {
                        continue;
                    }
                    won[orig] = true;
                }
                for (i, &v) in trap_trace.iter().enumerate() {
                    if cur.owner[v] == side.owner() {
                        if let Some(c) = trap_choice[i] {
                            let orig = trace[v];
                            if orig != usize::MAX {
                                choice[orig] = Some(resolve(orig, trap_trace[c], &won, &trace));
                            }
                        }
                    }
                }
                for v in 0..n {
                    let orig = trace[v];
                    if orig == usize::MAX || cur.owner[v] != side.owner() || choice[orig].is_some()
                    {
                        continue;
                    }
                    let target = attr_choice[v].unwrap_or(cur.succ[v][0]);
                    choice[orig] = Some(resolve(orig, target, &won, &trace));
                }
                return (won, choice);
            }
            // Some trap vertices are lost even with the attractor available;
            // their positive attractor for the adversary is lost too, and the
            // answer lives entirely in what remains.
            let mut bad = vec![false; n];
            for (i, &v) in trap_trace.iter().enumerate() {
                if !trap_won[i] {
                    bad[v] = true;
                }
            }
            let (doomed, _) = cur.positive_attractor(side.other(), &bad);
            let keep2: Vec<bool> = doomed.iter().map(|&b| !b).collect();
            let (next, next_trace) = cur.restrict(&keep2);
            trace = next_trace.iter().map(|&v| trace[v]).collect();
            cur = next;
        } else {
            let (attr, _) = cur.positive_attractor(side.other(), &p_d);
            let keep: Vec<bool> = attr.iter().map(|&b| !b).collect();
            let (trap, trap_trace) = cur.restrict(&keep);
            let (trap_won, trap_choice) = solve_almost_sure(&trap, side);
            if trap_won.iter().all(|&b| !b) {
                // Avoiding the unfavourable priority wins nowhere, so the
                // adversary can grind every remaining vertex down to it.
                return (won, choice);
            }
            let mut core = vec![false; n];
            for (i, &v) in trap_trace.iter().enumerate() {
                if trap_won[i] {
                    core[v] = true;
                }
            }
            let (extension, reach_choice) = cur.almost_sure_reach(side, &core);
            debug_assert!((0..n).all(|v| !core[v] || extension[v]));
            // Mark the extension as won, then record its strategies: inside
            // the core the trap strategy, elsewhere the reachability one.
            for v in 0..n {
                if extension[v] {
                    let orig = trace[v];
                    if orig != usize::MAX {
                        won[orig] = true;
                    }
                }
            }
            for (i, &v) in trap_trace.iter().enumerate() {
                if trap_won[i] && cur.owner[v] == side.owner() {
                    if let Some(c) = trap_choice[i] {
                        let orig = trace[v];
                        if orig != usize::MAX {
                            choice[orig] = Some(resolve(orig, trap_trace[c], &won, &trace));
                        }
                    }
                }
            }
            for v in 0..n {
                if extension[v] && !core[v] && cur.owner[v] == side.owner() {
                    if let Some(c) = reach_choice[v] {
                        let orig = trace[v];
                        if orig != usize::MAX {
                            choice[orig] = Some(resolve(orig, c, &won, &trace));
                        }
                    }
                }
            }
            let sink_priority = if side == Side::Protagonist { 0 } else { 1 };
            let (next, next_trace, sink) = cur.redirect(&extension, sink_priority);
            let mut lifted: Vec<usize> = next_trace.iter().map(|&v| trace[v]).collect();
            debug_assert_eq!(lifted.len(), sink);
            lifted.push(usize::MAX);
            trace = lifted;
            cur = next;
        }
    }
}

/// Recursive entry point used on the `d`-avoiding traps. The trap misses the
/// current minimal priority entirely, so the recursion depth is bounded by
/// the number of distinct priorities.
fn solve_almost_sure(a: &Arena, side: Side) -> (Vec<bool>, Vec<Option<usize>>) {
    almost_sure_region(a, side)
}

/// Qualitative solution of a parity arena: protagonist sets and positional
/// strategies for both sides.
#[derive(Clone, Debug)]
pub struct QualitativeSets {
    /// Protagonist wins with probability one.
    pub almost_sure: Vec<bool>,
    /// Protagonist wins with positive probability.
    pub positive: Vec<bool>,
    /// Total on protagonist vertices. Wins almost surely from `almost_sure`
    /// and with positive probability from `positive`.
    pub protagonist_choice: Vec<Option<usize>>,
    /// Total on coalition vertices. Holds the protagonist to probability
    /// zero from every vertex outside `positive`.
    pub coalition_choice: Vec<Option<usize>>,
}

/// Full qualitative solve. The positive regions are obtained by peeling
/// positive attractors of almost-sure regions layer by layer; the peeling of
/// one side must terminate exactly at the almost-sure region of the other,
/// which is computed independently — the cross-check is asserted and doubles
/// as an extensional determinacy test on every run.
pub fn solve(a: &Arena) -> QualitativeSets {
    let n = a.len();
    let (as_p, choice_p) = almost_sure_region(a, Side::Protagonist);
    let (as_c, choice_c) = almost_sure_region(a, Side::Coalition);
    for v in 0..n {
        assert!(!(as_p[v] && as_c[v]), "a vertex cannot be almost-sure for both sides");
    }

    let positive_p = positive_layers(a, Side::Protagonist, &as_p, &choice_p, &as_c);
    let positive_c = positive_layers(a, Side::Coalition, &as_c, &choice_c, &as_p);

    let mut protagonist_choice = positive_p.choice;
    let mut coalition_choice = positive_c.choice;
    for v in 0..n {
        if a.owner[v] == Owner::Protagonist && protagonist_choice[v].is_none() {
            protagonist_choice[v] = Some(a.succ[v][0]);
        }
        if a.owner[v] == Owner::Coalition && coalition_choice[v].is_none() {
            coalition_choice[v] = Some(a.succ[v][0]);
        }
    }

    QualitativeSets {
        almost_sure: as_p,
        positive: positive_p.region,
        protagonist_choice,
        coalition_choice,
    }
}

struct Layered {
    region: Vec<bool>,
    choice: Vec<Option<usize>>,
}

/// The positive region of `side` is the union of positive attractors of
/// almost-sure regions, peeled until the almost-sure region of the remaining
/// subarena is empty. The result must be the complement of the other side's
/// almost-sure region; anything else is a solver bug and panics.
fn positive_layers(
    a: &Arena,
    side: Side,
    first_won: &[bool],
    first_choice: &[Option<usize>],
    other_almost_sure: &[bool],
) -> Layered {
    let n = a.len();
    let mut region = vec![false; n];
    let mut choice: Vec<Option<usize>> = vec![None; n];
    let mut cur = a.clone();
    let mut trace: Vec<usize> = (0..n).collect();
    let mut first = true;
    loop {
        let (won, won_choice) = if first {
            (first_won.to_vec(), first_choice.to_vec())
        } else {
            almost_sure_region(&cur, side)
        };
        first = false;
        if won.iter().all(|&b| !b) {
            break;
        }
        let (attr, attr_choice) = cur.positive_attractor(side, &won);
        for v in 0..cur.len() {
            if !attr[v] {
                continue;
            }
            let orig = trace[v];
            region[orig] = true;
            if cur.owner_of(v) == side.owner() {
                let target = if won[v] { won_choice[v] } else { attr_choice[v] };
                if let Some(c) = target {
                    choice[orig] = Some(trace[c]);
                }
            }
        }
        let keep: Vec<bool> = attr.iter().map(|&b| !b).collect();
        let (next, next_trace) = cur.restrict(&keep);
        trace = next_trace.iter().map(|&v| trace[v]).collect();
        cur = next;
    }
    for v in 0..n {
        assert_eq!(
            region[v], !other_almost_sure[v],
            "positive region must complement the adversary's almost-sure region (vertex {v})"
        );
    }
    Layered { region, choice }
}
