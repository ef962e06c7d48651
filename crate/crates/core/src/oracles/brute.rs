//! Exhaustive reference solvers for small graphs. They share no code with the
//! search-based solvers and exist to cross-check them.

use thiserror::Error;

use crate::graph::Graph;

pub const BRUTE_CLIQUE_MAX_ORDER: usize = 16;
pub const BRUTE_CHROMATIC_MAX_ORDER: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("brute-force solver limited to order {limit}, got {order}")]
pub struct TooLarge {
    pub order: usize,
    pub limit: usize,
}

fn adjacency_masks(g: &Graph) -> Vec<u32> {
    (0..g.order())
        .map(|v| (0..g.order()).filter(|&u| g.has_edge(v, u)).fold(0u32, |m, u| m | (1 << u)))
        .collect()
}

/// Largest clique size over all `2^n` vertex subsets.
pub fn brute_force_clique(g: &Graph) -> Result<usize, TooLarge> {
    let n = g.order();
    if n > BRUTE_CLIQUE_MAX_ORDER {
        return Err(TooLarge { order: n, limit: BRUTE_CLIQUE_MAX_ORDER });
    }
    let adj = adjacency_masks(g);
    let mut best = 0;
    for subset in 1u32..(1u32 << n) {
        let size = subset.count_ones() as usize;
        if size <= best {
            continue;
        }
        let is_clique = (0..n)
            .filter(|&v| subset & (1 << v) != 0)
            .all(|v| subset & !(1 << v) & !adj[v] == 0);
        if is_clique {
            best = size;
        }
    }
    Ok(best)
}

/// Smallest `c` admitting a proper `c`-coloring, found by trying every
/// assignment in vertex order with vertex 0 fixed to the first color.
pub fn brute_force_chromatic(g: &Graph) -> Result<usize, TooLarge> {
    let n = g.order();
    if n > BRUTE_CHROMATIC_MAX_ORDER {
        return Err(TooLarge { order: n, limit: BRUTE_CHROMATIC_MAX_ORDER });
    }
    let adj = adjacency_masks(g);
    for colors in 1..=n {
        let mut assignment = vec![usize::MAX; n];
        assignment[0] = 0;
        if extend(&adj, colors, 1, &mut assignment) {
            return Ok(colors);
        }
    }
    unreachable!("n colors always suffice")
}

fn extend(adj: &[u32], colors: usize, v: usize, assignment: &mut [usize]) -> bool {
    if v == assignment.len() {
        return true;
    }
    for c in 0..colors {
        let clash = (0..v).any(|u| adj[v] & (1 << u) != 0 && assignment[u] == c);
        if !clash {
            assignment[v] = c;
            if extend(adj, colors, v + 1, assignment) {
                return true;
            }
        }
    }
    assignment[v] = usize::MAX;
    false
}
