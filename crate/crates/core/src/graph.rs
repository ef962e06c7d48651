//! Dense undirected simple graphs over a fixed vertex budget.
//!
//! Vertices are `0..order`. Each adjacency row is a [`VertexSet`] bitset, so
//! the matrix is stored densely and neighborhood intersections are a few word
//! operations. This is the only graph representation in the crate; the
//! networks consume the same matrix row-major as 0/1 values.

use std::fmt;

use thiserror::Error;

/// Largest supported graph order.
pub const MAX_ORDER: usize = 256;

const WORDS: usize = MAX_ORDER / 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph order must be at least 1")]
    EmptyGraph,
    #[error("graph order {0} exceeds the supported maximum of {MAX_ORDER}")]
    OrderTooLarge(usize),
    #[error("permutation acts on {perm} vertices but the graph has {graph}")]
    SizeMismatch { perm: usize, graph: usize },
    #[error("cannot pad a graph of order {order} down to {target}")]
    PadBelowOrder { order: usize, target: usize },
    #[error("not a permutation: {0}")]
    NotBijection(String),
    #[error("invalid edge ({0}, {1})")]
    InvalidEdge(usize, usize),
    #[error("adjacency matrix is not symmetric with zero diagonal")]
    InvalidMatrix,
}

/// Fixed-capacity bitset over vertex indices `0..MAX_ORDER`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct VertexSet([u64; WORDS]);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet([0; WORDS]);

    /// The set `{0, 1, ..., n-1}`.
    pub fn prefix(n: usize) -> Self {
        debug_assert!(n <= MAX_ORDER);
        let mut s = Self::EMPTY;
        for (w, word) in s.0.iter_mut().enumerate() {
            let lo = w * 64;
            if n >= lo + 64 {
                *word = u64::MAX;
            } else if n > lo {
                *word = (1u64 << (n - lo)) - 1;
            }
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.0[v >> 6] |= 1 << (v & 63);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        self.0[v >> 6] &= !(1 << (v & 63));
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.0[v >> 6] & (1 << (v & 63)) != 0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a &= b;
        }
        out
    }

    #[inline]
    pub fn union(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a |= b;
        }
        out
    }

    #[inline]
    pub fn difference(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a &= !b;
        }
        out
    }

    #[inline]
    pub fn intersection_len(&self, other: &Self) -> usize {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Smallest element, if any.
    #[inline]
    pub fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    /// Ascending iterator over the members.
    pub fn iter(&self) -> VertexSetIter {
        VertexSetIter {
            words: self.0,
            word: 0,
        }
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

pub struct VertexSetIter {
    words: [u64; WORDS],
    word: usize,
}

impl Iterator for VertexSetIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        while self.word < WORDS {
            let w = self.words[self.word];
            if w != 0 {
                let bit = w.trailing_zeros() as usize;
                self.words[self.word] = w & (w - 1);
                return Some(self.word * 64 + bit);
            }
            self.word += 1;
        }
        None
    }
}

/// Simple undirected graph on vertices `0..order`, stored as a symmetric
/// adjacency matrix with zero diagonal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    rows: Vec<VertexSet>,
}

impl Graph {
    /// Graph with `order` vertices and no edges.
    pub fn empty(order: usize) -> Result<Self, GraphError> {
        check_order(order)?;
        Ok(Graph {
            rows: vec![VertexSet::EMPTY; order],
        })
    }

    /// The complete graph `K_n`.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        check_order(n)?;
        let all = VertexSet::prefix(n);
        let rows = (0..n)
            .map(|v| {
                let mut r = all;
                r.remove(v);
                r
            })
            .collect();
        Ok(Graph { rows })
    }

    pub fn from_edges(order: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(order)?;
        for &(u, v) in edges {
            if u == v || u >= order || v >= order {
                return Err(GraphError::InvalidEdge(u, v));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Builds a graph from a row-major 0/1 matrix, validating symmetry and
    /// the zero diagonal.
    pub fn from_matrix(order: usize, matrix: &[u8]) -> Result<Self, GraphError> {
        check_order(order)?;
        if matrix.len() != order * order {
            return Err(GraphError::InvalidMatrix);
        }
        let mut g = Self::empty(order)?;
        for i in 0..order {
            if matrix[i * order + i] != 0 {
                return Err(GraphError::InvalidMatrix);
            }
            for j in i + 1..order {
                let a = matrix[i * order + j];
                if a != matrix[j * order + i] || a > 1 {
                    return Err(GraphError::InvalidMatrix);
                }
                if a == 1 {
                    g.add_edge(i, j);
                }
            }
        }
        Ok(g)
    }

    pub(crate) fn add_edge(&mut self, u: usize, v: usize) {
        self.rows[u].insert(v);
        self.rows[v].insert(u);
    }

    pub(crate) fn remove_edge(&mut self, u: usize, v: usize) {
        self.rows[u].remove(v);
        self.rows[v].remove(u);
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.rows[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.order()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// `|E|`.
    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(VertexSet::len).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j` in row-major upper-triangle order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().filter(move |&j| j > i).map(move |j| (i, j)))
    }

    /// Relabels vertex `i` as `perm[i]`.
    pub fn permute(&self, perm: &VertexPermutation) -> Result<Graph, GraphError> {
        if perm.len() != self.order() {
            return Err(GraphError::SizeMismatch {
                perm: perm.len(),
                graph: self.order(),
            });
        }
        let mut rows = vec![VertexSet::EMPTY; self.order()];
        for (i, row) in self.rows.iter().enumerate() {
            rows[perm.apply(i)] = row.iter().map(|j| perm.apply(j)).collect();
        }
        Ok(Graph { rows })
    }

    /// Appends isolated vertices until the graph has `target` vertices.
    pub fn pad_to_order(&self, target: usize) -> Result<Graph, GraphError> {
        if target < self.order() {
            return Err(GraphError::PadBelowOrder {
                order: self.order(),
                target,
            });
        }
        check_order(target)?;
        let mut rows = self.rows.clone();
        rows.resize(target, VertexSet::EMPTY);
        Ok(Graph { rows })
    }

    /// The cycle `C_n` (`n >= 3`).
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        if n < 3 {
            return Err(GraphError::InvalidEdge(0, 0));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    /// The star `K_{1,leaves}` with centre 0.
    pub fn star(leaves: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::from_edges(leaves + 1, &edges)
    }

    /// The Petersen graph: outer 5-cycle 0..5, inner pentagram 5..10.
    pub fn petersen() -> Self {
        let mut edges = Vec::with_capacity(15);
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Self::from_edges(10, &edges).expect("static edge list")
    }

    /// Row-major adjacency matrix as 0/1 values of `T`.
    pub fn adjacency_values<T: Copy>(&self, zero: T, one: T) -> Vec<T> {
        let n = self.order();
        let mut out = vec![zero; n * n];
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.iter() {
                out[i * n + j] = one;
            }
        }
        out
    }

    /// True iff every pair of vertices in `set` is adjacent.
    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(a, &u)| {
            set[a + 1..]
                .iter()
                .all(|&v| u != v && u < self.order() && v < self.order() && self.has_edge(u, v))
        })
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(order={}, edges=", self.order())?;
        f.debug_list().entries(self.edges()).finish()?;
        write!(f, ")")
    }
}

fn check_order(n: usize) -> Result<(), GraphError> {
    if n == 0 {
        Err(GraphError::EmptyGraph)
    } else if n > MAX_ORDER {
        Err(GraphError::OrderTooLarge(n))
    } else {
        Ok(())
    }
}

/// `K_n`. Rejects `n = 0`.
pub fn complete_graph(n: usize) -> Result<Graph, GraphError> {
    Graph::complete(n)
}

pub fn edge_count(g: &Graph) -> usize {
    g.edge_count()
}

pub fn apply_permutation(g: &Graph, perm: &VertexPermutation) -> Result<Graph, GraphError> {
    g.permute(perm)
}

pub fn pad_to_order(g: &Graph, target: usize) -> Result<Graph, GraphError> {
    g.pad_to_order(target)
}

/// A bijection on `0..n`, mapping vertex `i` to `mapping[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexPermutation {
    mapping: Vec<usize>,
}

impl VertexPermutation {
    pub fn identity(n: usize) -> Self {
        VertexPermutation {
            mapping: (0..n).collect(),
        }
    }

    pub fn new(mapping: Vec<usize>) -> Result<Self, GraphError> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n {
                return Err(GraphError::NotBijection(format!("image {m} out of range 0..{n}")));
            }
            if std::mem::replace(&mut seen[m], true) {
                return Err(GraphError::NotBijection(format!("image {m} appears twice")));
            }
        }
        Ok(VertexPermutation { mapping })
    }

    /// Transposition of `a` and `b` on `n` points.
    pub fn swap(n: usize, a: usize, b: usize) -> Result<Self, GraphError> {
        let mut mapping: Vec<usize> = (0..n).collect();
        if a >= n || b >= n {
            return Err(GraphError::NotBijection(format!("swap ({a}, {b}) on {n} points")));
        }
        mapping.swap(a, b);
        Ok(VertexPermutation { mapping })
    }

    #[inline]
    pub fn apply(&self, v: usize) -> usize {
        self.mapping[v]
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.mapping
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m] = i;
        }
        VertexPermutation { mapping: inv }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &VertexPermutation) -> Result<Self, GraphError> {
        if self.len() != first.len() {
            return Err(GraphError::SizeMismatch {
                perm: first.len(),
                graph: self.len(),
            });
        }
        Ok(VertexPermutation {
            mapping: first.mapping.iter().map(|&i| self.mapping[i]).collect(),
        })
    }
}
