//! Exact chromatic number by DSATUR branch and bound.
//!
//! The search starts from a maximum clique colored `1..=|C|`, which is both
//! the lower bound and the symmetry break. Vertices outside the clique whose
//! degree drops below `|C|` are peeled off first and colored greedily at the
//! end; they can never force an extra color. The remaining core is colored
//! greedily with DSATUR for an initial upper bound, then searched exhaustively:
//! the next vertex is the uncolored one with the highest saturation (ties:
//! highest degree, then lowest index), and it is tried with every used color
//! it admits plus one new color while that can still beat the incumbent.

use thiserror::Error;

use super::clique::{max_clique, CliqueResult};
use crate::graph::{Graph, VertexSet};

/// Default cap on search nodes per graph.
pub const DEFAULT_NODE_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("coloring search exceeded its budget of {budget} nodes")]
    BudgetExceeded { budget: u64 },
}

/// An optimal coloring: `chromatic` is `χ(G)`; `assignment[v] ∈ 1..=chromatic`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringResult {
    pub chromatic: usize,
    pub assignment: Vec<usize>,
}

impl ColoringResult {
    /// No edge is monochromatic and the colors used are exactly `1..=chromatic`.
    pub fn is_valid_for(&self, g: &Graph) -> bool {
        if self.assignment.len() != g.order() {
            return false;
        }
        let proper = g.edges().all(|(u, v)| self.assignment[u] != self.assignment[v]);
        let used: VertexSet = self.assignment.iter().copied().collect();
        proper && used == VertexSet::prefix(self.chromatic + 1).difference(&VertexSet::prefix(1))
    }
}

/// `χ(G)` with an unlimited search budget.
pub fn chromatic_number(g: &Graph) -> ColoringResult {
    let clique = max_clique(g);
    chromatic_number_seeded(g, &clique, u64::MAX).expect("unlimited budget")
}

/// `χ(G)` given a maximum clique of `g`, giving up after `budget` search nodes.
pub fn chromatic_number_seeded(g: &Graph, clique: &CliqueResult, budget: u64) -> Result<ColoringResult, SolverError> {
    let n = g.order();
    let lower = clique.size;
    let in_clique: VertexSet = clique.witness.iter().copied().collect();

    // Peel non-clique vertices of degree < lower within what remains.
    let mut core = VertexSet::prefix(n);
    let mut peeled = Vec::new();
    loop {
        let low = core
            .difference(&in_clique)
            .iter()
            .find(|&v| g.neighbors(v).intersection_len(&core) < lower);
        match low {
            Some(v) => {
                core.remove(v);
                peeled.push(v);
            }
            None => break,
        }
    }

    let mut search = Search::new(g, core, budget);
    for (i, &v) in clique.witness.iter().enumerate() {
        search.assign(v, i + 1);
    }
    search.used = lower;
    search.solve(lower)?;

    let mut assignment = search.best_assignment;
    let mut chromatic = search.best;
    for &v in peeled.iter().rev() {
        let taken: VertexSet = g.neighbors(v).iter().map(|u| assignment[u]).collect();
        let c = (1..).find(|&c| !taken.contains(c)).expect("some color is free");
        assignment[v] = c;
        chromatic = chromatic.max(c);
    }
    Ok(ColoringResult { chromatic, assignment })
}

struct Search<'a> {
    g: &'a Graph,
    /// 0 = uncolored.
    color: Vec<usize>,
    /// Colors on colored neighbors, per vertex.
    forbidden: Vec<VertexSet>,
    uncolored: VertexSet,
    degree: Vec<usize>,
    used: usize,
    best: usize,
    best_assignment: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl<'a> Search<'a> {
    fn new(g: &'a Graph, core: VertexSet, budget: u64) -> Self {
        let n = g.order();
        Search {
            g,
            color: vec![0; n],
            forbidden: vec![VertexSet::EMPTY; n],
            uncolored: core,
            degree: (0..n).map(|v| g.neighbors(v).intersection_len(&core)).collect(),
            used: 0,
            best: usize::MAX,
            best_assignment: vec![0; n],
            nodes: 0,
            budget,
        }
    }

    /// Colors `v` with `c`; returns the neighbors whose forbidden set grew.
    fn assign(&mut self, v: usize, c: usize) -> Vec<usize> {
        self.color[v] = c;
        self.uncolored.remove(v);
        let mut touched = Vec::new();
        for u in self.g.neighbors(v).intersection(&self.uncolored).iter() {
            if !self.forbidden[u].contains(c) {
                self.forbidden[u].insert(c);
                touched.push(u);
            }
        }
        touched
    }

    fn unassign(&mut self, v: usize, c: usize, touched: &[usize]) {
        for &u in touched {
            self.forbidden[u].remove(c);
        }
        self.color[v] = 0;
        self.uncolored.insert(v);
    }

    fn select(&self) -> Option<usize> {
        self.uncolored
            .iter()
            .max_by_key(|&v| (self.forbidden[v].len(), self.degree[v], std::cmp::Reverse(v)))
    }

    fn record(&mut self) {
        self.best = self.used;
        self.best_assignment.clone_from(&self.color);
    }

    fn greedy(&mut self) {
        let mut trail = Vec::new();
        let saved_used = self.used;
        while let Some(v) = self.select() {
            let c = (1..).find(|&c| !self.forbidden[v].contains(c)).expect("some color is free");
            let touched = self.assign(v, c);
            self.used = self.used.max(c);
            trail.push((v, c, touched));
        }
        self.record();
        for (v, c, touched) in trail.into_iter().rev() {
            self.unassign(v, c, &touched);
        }
        self.used = saved_used;
    }

    fn solve(&mut self, lower: usize) -> Result<(), SolverError> {
        self.greedy();
        if self.best > lower {
            self.branch(lower)?;
        }
        Ok(())
    }

    fn branch(&mut self, lower: usize) -> Result<(), SolverError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(SolverError::BudgetExceeded { budget: self.budget });
        }
        if self.used >= self.best {
            return Ok(());
        }
        let Some(v) = self.select() else {
            self.record();
            return Ok(());
        };
        let limit = (self.used + 1).min(self.best - 1);
        for c in 1..=limit {
            if c >= self.best {
                break;
            }
            if self.forbidden[v].contains(c) {
                continue;
            }
            let saved_used = self.used;
            let touched = self.assign(v, c);
            self.used = self.used.max(c);
            let r = self.branch(lower);
            self.used = saved_used;
            self.unassign(v, c, &touched);
            r?;
            if self.best == lower || self.used >= self.best {
                return Ok(());
            }
        }
        Ok(())
    }
}
