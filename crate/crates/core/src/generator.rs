//! Random embedded graphs.
//!
//! A graph for source order `n` is built by deleting a uniformly drawn number
//! `j ∈ {0, …, n(n−1)/2}` of edges from a shuffled `K_n`, padding with
//! isolated vertices up to the vertex budget `N`, and relabeling all `N`
//! vertices with a uniform random permutation.
//!
//! # Reproducibility
//!
//! Every graph slot `(seed, n, index)` owns an independent random stream.
//! The stream seed is [`substream_seed`], a chain of SplitMix64 finalizers over
//! the tuple, and the stream itself is ChaCha8 (`rand_chacha::ChaCha8Rng`)
//! seeded through `SeedableRng::seed_from_u64`. Ranges are always sampled as
//! `u64` and shuffles are an explicit Fisher–Yates, so the output does not
//! depend on pointer width, thread count, or platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexPermutation, MAX_ORDER};

pub type SlotRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("source order {n} outside 2..={max}")]
    OrderOutOfRange { n: usize, max: usize },
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Parameters of a generation run: `k` graphs for every `n ∈ {2, …, N}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GenConfig {
    pub max_order: usize,
    pub per_order_count: usize,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(max_order: usize, per_order_count: usize, seed: u64) -> Result<Self, GenerateError> {
        let cfg = GenConfig {
            max_order,
            per_order_count,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), GenerateError> {
        if self.max_order < 2 || self.max_order > MAX_ORDER {
            return Err(GenerateError::InvalidConfig(format!(
                "max_order must be in 2..={MAX_ORDER}, got {}",
                self.max_order
            )));
        }
        if self.per_order_count == 0 {
            return Err(GenerateError::InvalidConfig("per_order_count must be at least 1".into()));
        }
        Ok(())
    }

    /// `k(N−1)`.
    pub fn total(&self) -> usize {
        self.per_order_count * (self.max_order - 1)
    }

    /// Slots in emission order: `n` ascending, then repetition index ascending.
    pub fn slots(&self) -> impl Iterator<Item = Slot> + '_ {
        (2..=self.max_order).flat_map(move |n| {
            (0..self.per_order_count as u64).map(move |index| Slot { n, index })
        })
    }
}

/// One position in a batch: source order and repetition index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slot {
    pub n: usize,
    pub index: u64,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the stream for `(seed, n, index, attempt)`.
///
/// `attempt` is 0 for the first draw of a slot; the labeling pipeline bumps it
/// when a graph has to be replaced.
pub fn substream_seed(seed: u64, n: usize, index: u64, attempt: u32) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ n as u64);
    h = splitmix64(h ^ index);
    splitmix64(h ^ attempt as u64)
}

pub fn slot_rng(seed: u64, slot: Slot, attempt: u32) -> SlotRng {
    ChaCha8Rng::seed_from_u64(substream_seed(seed, slot.n, slot.index, attempt))
}

/// In-place Fisher–Yates shuffle drawing `u64` indices.
pub fn shuffle<T, R: Rng + ?Sized>(items: &mut [T], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i as u64) as usize;
        items.swap(i, j);
    }
}

/// Uniformly random bijection on `0..n`.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> VertexPermutation {
    let mut labels: Vec<usize> = (0..n).collect();
    shuffle(&mut labels, rng);
    VertexPermutation::new(labels).expect("shuffled identity is a bijection")
}

/// `K_n` with `deleted` edges removed after shuffling the edge list.
pub fn complete_minus_random_edges<R: Rng + ?Sized>(
    n: usize,
    deleted: usize,
    rng: &mut R,
) -> Result<Graph, GenerateError> {
    let mut g = Graph::complete(n)?;
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    if deleted > edges.len() {
        return Err(GenerateError::InvalidConfig(format!(
            "cannot delete {deleted} of {} edges",
            edges.len()
        )));
    }
    shuffle(&mut edges, rng);
    for &(u, v) in &edges[..deleted] {
        g.remove_edge(u, v);
    }
    Ok(g)
}

/// `G⁰ₙ`: draws `j` uniformly from `{0, …, n(n−1)/2}` and deletes `j` edges of
/// a shuffled `K_n`.
pub fn random_subgraph_of_complete<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Graph, GenerateError> {
    if !(2..=MAX_ORDER).contains(&n) {
        return Err(GenerateError::OrderOutOfRange { n, max: MAX_ORDER });
    }
    let m = (n * (n - 1) / 2) as u64;
    let j = rng.gen_range(0..=m) as usize;
    complete_minus_random_edges(n, j, rng)
}

/// `Gₙ = σ(pad(G⁰ₙ, N))` for a uniform permutation `σ`.
pub fn generate_embedded<R: Rng + ?Sized>(n: usize, max_order: usize, rng: &mut R) -> Result<Graph, GenerateError> {
    if n < 2 || n > max_order || max_order > MAX_ORDER {
        return Err(GenerateError::OrderOutOfRange { n, max: max_order });
    }
    let base = random_subgraph_of_complete(n, rng)?;
    let padded = base.pad_to_order(max_order)?;
    let sigma = random_permutation(max_order, rng);
    Ok(padded.permute(&sigma)?)
}

/// The graph of one slot for a given attempt.
pub fn generate_slot(cfg: &GenConfig, slot: Slot, attempt: u32) -> Result<Graph, GenerateError> {
    let mut rng = slot_rng(cfg.seed, slot, attempt);
    generate_embedded(slot.n, cfg.max_order, &mut rng)
}

/// All `k(N−1)` graphs of `cfg`, in slot order. The result is a pure function
/// of `cfg`; work is spread over the current rayon pool.
pub fn generate_batch(cfg: &GenConfig) -> Result<Vec<Graph>, GenerateError> {
    cfg.validate()?;
    let slots: Vec<Slot> = cfg.slots().collect();
    slots
        .par_iter()
        .map(|&slot| generate_slot(cfg, slot, 0))
        .collect()
}
