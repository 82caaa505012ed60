//! Reduction of every supported winning condition to a parity condition on
//! a finite product of the game with strategy memory.
//!
//! Büchi, co-Büchi and parity conditions need no memory: a priority per
//! vertex already captures them. Rabin and Streett conditions are handled
//! with an index-appearance record — a permutation of the pair indices in
//! which an index moves to the front whenever its second component is
//! visited — and Muller conditions with a latest-appearance record over
//! colours, where the colour of a vertex moves to the front on every visit.
//! In both cases the priority of a product state depends on how deep in the
//! record the current visit strikes, so that the least priority seen
//! infinitely often is even exactly when the original condition holds.
//!
//! Colours for the Muller record are the vertices that occur in some member
//! of the family, plus one shared colour for all remaining vertices. Members
//! are subsets of the occurring vertices, so a limit set maps to a member's
//! colour image exactly when it *is* that member: the compression never
//! changes acceptance.
//!
//! The product is built over reachable states only, seeding every base
//! vertex with the initial record so that strategies extracted from it can
//! be started anywhere — in particular at a deviation point.

use std::collections::{BTreeSet, HashMap, VecDeque};

use game_core::game::{CoalitionGame, Objective, RabinPair, VertexId};

use crate::arena::{Arena, Owner};

/// Hard cap on product states; exceeding it panics rather than thrashing.
pub const PRODUCT_STATE_LIMIT: usize = 1 << 21;

/// How the memory record reacts to a visit, and which priority the visit
/// emits. Records are small permutations stored front-first.
enum MemoryLaw {
    /// No memory: the priority is a function of the vertex alone.
    Plain { prio: Vec<u32> },
    /// Index-appearance record over Rabin pairs. `flip` is 0 when the
    /// protagonist's condition is the Rabin reading of the pairs and 1 when
    /// it is the Streett reading (which complements the Rabin one, so every
    /// priority shifts by one).
    PairRecord { pairs: Vec<RabinPair>, flip: u32 },
    /// Latest-appearance record over colours; `accept` holds the colour
    /// images of the family members.
    ColourRecord { colour_of: Vec<u8>, classes: usize, accept: BTreeSet<BTreeSet<u8>> },
}

impl MemoryLaw {
    fn for_objective(o: &Objective, n: usize) -> MemoryLaw {
        match o {
            Objective::Parity(prio) => MemoryLaw::Plain { prio: prio.clone() },
            Objective::Buchi(f) => MemoryLaw::Plain {
                prio: (0..n).map(|v| if f.contains(&v) { 0 } else { 1 }).collect(),
            },
            Objective::CoBuchi(f) => MemoryLaw::Plain {
                prio: (0..n).map(|v| if f.contains(&v) { 2 } else { 1 }).collect(),
            },
            Objective::Rabin(pairs) => {
                // A pair whose first component is empty can never fire.
                let mut usable: Vec<RabinPair> =
                    pairs.iter().filter(|p| !p.fst.is_empty()).cloned().collect();
                usable.sort();
                usable.dedup();
                if usable.is_empty() {
                    MemoryLaw::Plain { prio: vec![1; n] }
                } else {
                    MemoryLaw::PairRecord { pairs: usable, flip: 0 }
                }
            }
            Objective::Streett(pairs) => {
                // A pair whose first component is empty holds vacuously.
                let mut usable: Vec<RabinPair> =
                    pairs.iter().filter(|p| !p.fst.is_empty()).cloned().collect();
                usable.sort();
                usable.dedup();
                if usable.is_empty() {
                    MemoryLaw::Plain { prio: vec![0; n] }
                } else {
                    MemoryLaw::PairRecord { pairs: usable, flip: 1 }
                }
            }
            Objective::Muller(family) => {
                // Empty sets are never limit sets of infinite plays.
                let members: Vec<&BTreeSet<VertexId>> =
                    family.iter().filter(|m| !m.is_empty()).collect();
                if members.is_empty() {
                    return MemoryLaw::Plain { prio: vec![1; n] };
                }
                let relevant: BTreeSet<VertexId> =
                    members.iter().flat_map(|m| m.iter().copied()).collect();
                let mut colour_of = vec![relevant.len() as u8; n];
                for (c, &v) in relevant.iter().enumerate() {
                    colour_of[v] = c as u8;
                }
                let classes =
                    relevant.len() + usize::from(relevant.len() < n);
                let accept = members
                    .iter()
                    .map(|m| m.iter().map(|&v| colour_of[v]).collect())
                    .collect();
                MemoryLaw::ColourRecord { colour_of, classes, accept }
            }
        }
    }

    fn initial(&self) -> Vec<u8> {
        match self {
            MemoryLaw::Plain { .. } => Vec::new(),
            MemoryLaw::PairRecord { pairs, .. } => (0..pairs.len() as u8).collect(),
            MemoryLaw::ColourRecord { classes, .. } => (0..*classes as u8).collect(),
        }
    }

    fn update(&self, record: &[u8], v: VertexId) -> Vec<u8> {
        match self {
            MemoryLaw::Plain { .. } => Vec::new(),
            MemoryLaw::PairRecord { pairs, .. } => {
                // Indices whose second component is visited move to the
                // front, keeping their relative order.
                let mut front = Vec::new();
                let mut rest = Vec::new();
                for &j in record {
                    if pairs[j as usize].snd.contains(&v) {
                        front.push(j);
                    } else {
                        rest.push(j);
                    }
                }
                front.extend(rest);
                front
            }
            MemoryLaw::ColourRecord { colour_of, .. } => {
                let c = colour_of[v];
                let mut out = Vec::with_capacity(record.len());
                out.push(c);
                out.extend(record.iter().copied().filter(|&x| x != c));
                out
            }
        }
    }

    /// Priority emitted when `v` is visited with (pre-update) record `m`.
    ///
    /// For pair records, a visit of some second component at 1-based record
    /// depth `b` emits `2(k−b)+1`, a visit of some first component whose
    /// index sits at depth `f` *after* the update emits `2(k−f)+2`, and a
    /// visit touching nothing emits `2k+1`; simultaneous signals take the
    /// minimum. Eventually the indices whose second component dies out sink
    /// to the deepest positions and stay, so the least priority seen
    /// infinitely often is even exactly when one of them has its first
    /// component visited infinitely often — the Rabin reading. For colour
    /// records, a visit of a colour at depth `p` emits `2(K−p)` when the
    /// first `p` record entries form an accepted colour set and `2(K−p)+1`
    /// otherwise; the deepest depth hit infinitely often is the size of the
    /// limit set's colour image, where the window is exactly that image.
    fn priority(&self, record: &[u8], v: VertexId) -> u32 {
        match self {
            MemoryLaw::Plain { prio } => prio[v],
            MemoryLaw::PairRecord { pairs, flip } => {
                let k = pairs.len() as u32;
                let bad = record
                    .iter()
                    .enumerate()
                    .filter(|&(_, &j)| pairs[j as usize].snd.contains(&v))
                    .map(|(pos, _)| pos as u32 + 1)
                    .max();
                let updated;
                let good = {
                    updated = self.update(record, v);
                    updated
                        .iter()
                        .enumerate()
                        .filter(|&(_, &j)| pairs[j as usize].fst.contains(&v))
                        .map(|(pos, _)| pos as u32 + 1)
                        .max()
                };
                let mut p = 2 * k + 1;
                if let Some(b) = bad {
                    p = p.min(2 * (k - b) + 1);
                }
                if let Some(f) = good {
                    p = p.min(2 * (k - f) + 2);
                }
                p + flip
            }
            MemoryLaw::ColourRecord { colour_of, classes, accept } => {
                let kk = *classes as u32;
                let c = colour_of[v];
                let pos = record.iter().position(|&x| x == c).expect("record is a permutation");
                let p = pos as u32 + 1;
                let window: BTreeSet<u8> = record[..=pos].iter().copied().collect();
                2 * (kk - p) + u32::from(!accept.contains(&window))
            }
        }
    }
}

/// A parity product: the game unrolled with record memory, a priority per
/// product state, and the projection back to the base game.
///
/// The protagonist wins the product from a state iff, in the base game, they
/// win from the projected vertex having already seen the history the record
/// encodes; since all conditions here depend only on limit sets, the
/// qualitative verdict of a state does not depend on its record at all.
pub struct LarProduct {
    arena: Arena,
    /// Product state → (base vertex, memory id).
    states: Vec<(VertexId, usize)>,
    index: HashMap<(VertexId, usize), usize>,
    memory_count: usize,
    initial_memory: usize,
    /// Total memory transition table, `update[m][v]`. Transitions that no
    /// play can take (the vertex cannot follow any carrier of the memory)
    /// stay put; every reachable history is tracked exactly.
    memory_update: Vec<Vec<usize>>,
    /// Base vertices owned by the protagonist / by the coalition.
    protagonist_vertices: BTreeSet<VertexId>,
    coalition_vertices: BTreeSet<VertexId>,
    base_vertex_count: usize,
}

impl LarProduct {
    pub fn arena(&self) -> &Arena {
        &self.arena
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn memory_count(&self) -> usize {
        self.memory_count
    }

    pub fn initial_memory(&self) -> usize {
        self.initial_memory
    }

    pub fn memory_update(&self) -> &[Vec<usize>] {
        &self.memory_update
    }

    /// Base vertex and memory of a product state.
    pub fn project(&self, state: usize) -> (VertexId, usize) {
        self.states[state]
    }

    pub fn state(&self, v: VertexId, memory: usize) -> Option<usize> {
        self.index.get(&(v, memory)).copied()
    }

    /// The product state a play starting at `v` begins in.
    pub fn initial_state(&self, v: VertexId) -> usize {
        self.index[&(v, self.initial_memory)]
    }

    pub fn priority(&self, state: usize) -> u32 {
        self.arena.priority(state)
    }

    pub fn protagonist_vertices(&self) -> &BTreeSet<VertexId> {
        &self.protagonist_vertices
    }

    pub fn coalition_vertices(&self) -> &BTreeSet<VertexId> {
        &self.coalition_vertices
    }

    pub fn base_vertex_count(&self) -> usize {
        self.base_vertex_count
    }
}

/// Unrolls the protagonist's objective into a parity product.
///
/// Parity, Büchi and co-Büchi objectives pass through with a single memory
/// state; Rabin and Streett objectives get an index-appearance record over
/// their pairs; Muller objectives get a latest-appearance record over
/// colours. Every base vertex is seeded with the initial record, so the
/// product contains a start state for any entry point.
///
/// Panics when the reachable product exceeds [`PRODUCT_STATE_LIMIT`] states.
pub fn to_parity(cg: &CoalitionGame) -> LarProduct {
    let g = &cg.game;
    let n = g.vertex_count();
    let law = MemoryLaw::for_objective(g.objective(cg.protagonist), n);

    let mut records: Vec<Vec<u8>> = vec![law.initial()];
    let mut record_ids: HashMap<Vec<u8>, usize> = HashMap::new();
    record_ids.insert(records[0].clone(), 0);

    let mut states: Vec<(VertexId, usize)> = Vec::new();
    let mut index: HashMap<(VertexId, usize), usize> = HashMap::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    for v in 0..n {
        let id = states.len();
        states.push((v, 0));
        index.insert((v, 0), id);
        queue.push_back(id);
    }

    let mut succ: Vec<Vec<usize>> = Vec::new();
    while let Some(s) = queue.pop_front() {
        let (v, m) = states[s];
        let next_record = law.update(&records[m], v);
        let m2 = *record_ids.entry(next_record.clone()).or_insert_with(|| {
            records.push(next_record);
            records.len() - 1
        });
        let mut row = Vec::new();
        for w in g.succ_ids(v) {
            let t = *index.entry((w, m2)).or_insert_with(|| {
                let id = states.len();
                assert!(
                    id < PRODUCT_STATE_LIMIT,
                    "parity product exceeds {PRODUCT_STATE_LIMIT} states"
                );
                states.push((w, m2));
                queue.push_back(id);
                id
            });
            row.push(t);
        }
        debug_assert_eq!(succ.len(), s, "states are expanded in discovery order");
        succ.push(row);
    }

    let owner: Vec<Owner> = states
        .iter()
        .map(|&(v, _)| match g.owner(v) {
            Some(p) if p == cg.protagonist => Owner::Protagonist,
            Some(_) => Owner::Coalition,
            None => Owner::Chance,
        })
        .collect();
    let prio: Vec<u32> =
        states.iter().map(|&(v, m)| law.priority(&records[m], v)).collect();
    let arena = Arena::new(owner, succ, prio);

    let memory_update: Vec<Vec<usize>> = records
        .iter()
        .map(|rec| {
            (0..n)
                .map(|v| {
                    let r = law.update(rec, v);
                    record_ids.get(&r).copied().unwrap_or_else(|| record_ids[rec.as_slice()])
                })
                .collect()
        })
        .collect();

    let mut protagonist_vertices = BTreeSet::new();
    let mut coalition_vertices = BTreeSet::new();
    for v in 0..n {
        match g.owner(v) {
            Some(p) if p == cg.protagonist => {
                protagonist_vertices.insert(v);
            }
            Some(_) => {
                coalition_vertices.insert(v);
            }
            None => {}
        }
    }

    LarProduct {
        arena,
        states,
        index,
        memory_count: records.len(),
        initial_memory: 0,
        memory_update,
        protagonist_vertices,
        coalition_vertices,
        base_vertex_count: n,
    }
}
