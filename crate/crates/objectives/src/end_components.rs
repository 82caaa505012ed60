//! End components and their decomposition.
//!
//! An end component is a set of vertices that a suitably chosen profile
//! can keep the play in forever with probability 1 while visiting all of
//! it infinitely often: every member keeps a successor inside, stochastic
//! members keep *all* successors inside, and the induced graph is
//! strongly connected. Limit sets of plays are almost surely end
//! components, which is why all long-run analyses here reduce to them.

use std::collections::BTreeSet;

use game_core::game::{Smg, VertexId};

use crate::limit_sets::accepts_limit_set;
use crate::payoff::BinaryPayoff;

/// A verified end component of a particular game.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct EndComponent {
    vertices: BTreeSet<VertexId>,
}

impl EndComponent {
    /// Wraps a vertex set after checking the end-component conditions.
    pub fn new(g: &Smg, vertices: BTreeSet<VertexId>) -> Option<EndComponent> {
        if is_end_component(g, &vertices) {
            Some(EndComponent { vertices })
        } else {
            None
        }
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Checks the three end-component conditions for `c`.
pub fn is_end_component(g: &Smg, c: &BTreeSet<VertexId>) -> bool {
    if c.is_empty() || c.iter().any(|&v| v >= g.vertex_count()) {
        return false;
    }
    for &v in c {
        if g.is_stochastic(v) {
            if !g.succ_ids(v).all(|w| c.contains(&w)) {
                return false;
            }
        } else if !g.succ_ids(v).any(|w| c.contains(&w)) {
            return false;
        }
    }
    strongly_connected_within(g, c)
}

/// Iterative Tarjan over the subgraph induced by `within`, returning the
/// strongly connected components (vertices sorted inside each component).
/// Singleton components without a self-loop are included; callers that
/// need non-trivial components filter afterwards.
pub fn induced_sccs(g: &Smg, within: &BTreeSet<VertexId>) -> Vec<BTreeSet<VertexId>> {
    let nodes: Vec<VertexId> = within.iter().copied().collect();
    let adj: Vec<Vec<usize>> = nodes
        .iter()
        .map(|&v| g.succ_ids(v).filter_map(|w| nodes.binary_search(&w).ok()).collect())
        .collect();
    scc_decomposition(&adj)
        .into_iter()
        .map(|comp| comp.into_iter().map(|i| nodes[i]).collect())
        .collect()
}

/// Iterative Tarjan on an adjacency-list digraph over `0..adj.len()`.
/// Every vertex lands in exactly one component; components come out in
/// reverse topological order of the condensation.
pub fn scc_decomposition(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut out = Vec::new();

    // Explicit DFS frames: (node, iterator position into successor list).
    let mut frames: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while !frames.is_empty() {
            let (v, pos) = {
                let top = frames.last_mut().expect("loop condition");
                let v = top.0;
                let pos = top.1;
                top.1 += 1;
                (v, pos)
            };
            if pos < adj[v].len() {
                let w = adj[v][pos];
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    component.sort_unstable();
                    out.push(component);
                }
            }
        }
    }
    out
}

fn strongly_connected_within(g: &Smg, c: &BTreeSet<VertexId>) -> bool {
    if c.len() == 1 {
        let v = *c.iter().next().unwrap();
        return g.has_edge(v, v);
    }
    let sccs = induced_sccs(g, c);
    sccs.len() == 1 && sccs[0].len() == c.len()
}

/// Maximal end components contained in `U`.
///
/// Iterative pruning: drop vertices that no end component inside the
/// current candidate can contain (stochastic ones with a branch outside,
/// anything without an inside successor), split along strongly connected
/// components, repeat. The result is pairwise disjoint, and every end
/// component inside `U` is contained in exactly one entry. Output is
/// sorted by least vertex.
pub fn maximal_end_components(g: &Smg, u: &BTreeSet<VertexId>) -> Vec<EndComponent> {
    let mut result: Vec<EndComponent> = Vec::new();
    let mut work: Vec<BTreeSet<VertexId>> = vec![u
        .iter()
        .copied()
        .filter(|&v| v < g.vertex_count())
        .collect()];

    while let Some(mut x) = work.pop() {
        // Stabilise: remove vertices that cannot sit in any end component
        // inside x; each removal can invalidate others, so iterate.
        loop {
            let doomed: Vec<VertexId> = x
                .iter()
                .copied()
                .filter(|&v| {
                    if g.is_stochastic(v) {
                        !g.succ_ids(v).all(|w| x.contains(&w))
                    } else {
                        !g.succ_ids(v).any(|w| x.contains(&w))
                    }
                })
                .collect();
            if doomed.is_empty() {
                break;
            }
            for v in doomed {
                x.remove(&v);
            }
        }
        if x.is_empty() {
            continue;
        }
        let comps = induced_sccs(g, &x);
        if comps.len() == 1 && comps[0].len() == x.len() {
            // Stabilisation guarantees successors inside, including the
            // self-loop in the singleton case, so x is an end component.
            result.push(EndComponent { vertices: x });
        } else {
            work.extend(comps);
        }
    }

    result.sort();
    debug_assert!(result.iter().all(|c| is_end_component(g, &c.vertices)));
    result
}

/// Whether the end component `c`, if realised as a limit set, gives every
/// player exactly the demanded payoff bit.
pub fn ec_has_payoff(g: &Smg, c: &EndComponent, x: &BinaryPayoff) -> bool {
    assert!(x.matches_players(g));
    (0..g.players()).all(|i| accepts_limit_set(g.objective(i), c.vertices()) == x.bit(i))
}
