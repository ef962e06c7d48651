//! Maximum clique by Bron–Kerbosch with Tomita pivoting.
//!
//! The outer level walks vertices in degeneracy order, so each top-level call
//! only sees later neighbors as candidates and earlier neighbors as excluded.
//! Branches that cannot beat the incumbent (`|R| + |P| <= best`) are cut.

use crate::graph::{Graph, VertexSet};

/// A maximum clique: `size` is `ω(G)` and `witness` lists its vertices in
/// ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueResult {
    pub size: usize,
    pub witness: Vec<usize>,
}

/// Vertices in the order they are removed when repeatedly deleting a vertex
/// of minimum remaining degree (ties: lowest index).
pub fn degeneracy_order(g: &Graph) -> Vec<usize> {
    let n = g.order();
    let mut remaining = VertexSet::prefix(n);
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = remaining
            .iter()
            .min_by_key(|&v| degree[v])
            .expect("remaining is non-empty");
        remaining.remove(v);
        for u in g.neighbors(v).intersection(&remaining).iter() {
            degree[u] -= 1;
        }
        order.push(v);
    }
    order
}

pub fn max_clique(g: &Graph) -> CliqueResult {
    let n = g.order();
    // Any single vertex is a clique; Graph guarantees order >= 1.
    let mut best: Vec<usize> = vec![0];
    let order = degeneracy_order(g);
    let mut later = VertexSet::prefix(n);
    let mut current = Vec::with_capacity(n);
    for &v in &order {
        later.remove(v);
        let candidates = g.neighbors(v).intersection(&later);
        if candidates.len() < best.len() {
            continue;
        }
        let excluded = g.neighbors(v).difference(&later);
        current.push(v);
        expand(g, &mut current, candidates, excluded, &mut best);
        current.pop();
    }
    best.sort_unstable();
    CliqueResult {
        size: best.len(),
        witness: best,
    }
}

fn expand(g: &Graph, current: &mut Vec<usize>, mut candidates: VertexSet, mut excluded: VertexSet, best: &mut Vec<usize>) {
    if candidates.is_empty() {
        if current.len() > best.len() {
            best.clone_from(current);
        }
        return;
    }
    if current.len() + candidates.len() <= best.len() {
        return;
    }
    // Tomita pivot: the vertex of P ∪ X with the most neighbors in P.
    let pivot = candidates
        .union(&excluded)
        .iter()
        .max_by_key(|&u| (g.neighbors(u).intersection_len(&candidates), std::cmp::Reverse(u)))
        .expect("P is non-empty");
    let branch = candidates.difference(g.neighbors(pivot));
    for v in branch.iter() {
        if current.len() + candidates.len() <= best.len() {
            return;
        }
        let nv = g.neighbors(v);
        current.push(v);
        expand(g, current, candidates.intersection(nv), excluded.intersection(nv), best);
        current.pop();
        candidates.remove(v);
        excluded.insert(v);
    }
}
