//! Labeled graph datasets.
//!
//! A [`Dataset`] is one split (train, valid or test) of labeled graphs that
//! all share the same order. Datasets are built by generating and labeling a
//! [`GenConfig`] batch ([`build_dataset`]), persisted in the binary format of
//! [`format`], and summarized by [`compute_stats`].

mod build;
pub mod csv;
pub mod format;
mod split;
mod stats;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::Graph;
use crate::oracles::Labels;

pub use build::{build_dataset, label_dataset, BuildReport, Regeneration, MAX_ATTEMPTS};
pub use format::{read_dataset, write_dataset, FORMAT_VERSION};
pub use split::split_dataset;
pub use stats::{compute_stats, DistributionStats};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt header: {0}")]
    CorruptHeader(String),
    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { found: u16, expected: u16 },
    #[error("truncated records: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("{extra} unexpected trailing bytes")]
    TrailingBytes { extra: usize },
    #[error("record {index}: {reason}")]
    InvalidRecord { index: usize, reason: String },
    #[error("graph order {0} cannot be stored (1..=255)")]
    UnsupportedOrder(usize),
    #[error("dataset is empty")]
    Empty,
    #[error("invalid split fractions: {0}")]
    InvalidFractions(String),
    #[error("slot n={n} index={index}: solver budget exhausted after {attempts} attempts")]
    BudgetExhausted { n: usize, index: u64, attempts: u32 },
    #[error("record {index}: solver budget exhausted")]
    LabelBudget { index: usize },
    #[error(transparent)]
    Generate(#[from] crate::generator::GenerateError),
}

/// Which dataset role a file plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub fn tag(self) -> u8 {
        match self {
            Split::Train => 0,
            Split::Valid => 1,
            Split::Test => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Split::Train),
            1 => Some(Split::Valid),
            2 => Some(Split::Test),
            _ => None,
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "valid" | "validation" => Ok(Split::Valid),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split '{other}' (train|valid|test)")),
        }
    }
}

/// The label a model is trained to predict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    /// `χ(G)`.
    Chromatic,
    /// `ω(G)`.
    Clique,
}

impl Target {
    pub fn of(self, record: &LabeledGraph) -> usize {
        match self {
            Target::Chromatic => record.chromatic,
            Target::Clique => record.clique,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Chromatic => "chi",
            Target::Clique => "omega",
        })
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chi" | "chromatic" => Ok(Target::Chromatic),
            "omega" | "clique" => Ok(Target::Clique),
            other => Err(format!("unknown target '{other}' (chi|omega)")),
        }
    }
}

/// A graph with its exact labels. `chromatic == clique == 0` marks a record
/// that has not been labeled yet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub chromatic: usize,
    pub clique: usize,
    /// Order `n` of the complete graph the record was cut from.
    pub source_order: usize,
    pub edges: usize,
}

impl LabeledGraph {
    pub fn new(graph: Graph, labels: Labels, source_order: usize) -> Self {
        let edges = graph.edge_count();
        LabeledGraph {
            graph,
            chromatic: labels.chromatic,
            clique: labels.clique,
            source_order,
            edges,
        }
    }

    pub fn unlabeled(graph: Graph, source_order: usize) -> Self {
        let edges = graph.edge_count();
        LabeledGraph {
            graph,
            chromatic: 0,
            clique: 0,
            source_order,
            edges,
        }
    }

    pub fn is_labeled(&self) -> bool {
        self.chromatic != 0 || self.clique != 0
    }

    /// Checks `1 <= clique <= chromatic <= order` (or both zero) and the
    /// stored edge count.
    pub fn validate(&self) -> Result<(), String> {
        let order = self.graph.order();
        if self.edges != self.graph.edge_count() {
            return Err(format!(
                "stored edge count {} but graph has {}",
                self.edges,
                self.graph.edge_count()
            ));
        }
        if self.source_order > order {
            return Err(format!("source order {} exceeds graph order {order}", self.source_order));
        }
        if self.is_labeled() && !(1 <= self.clique && self.clique <= self.chromatic && self.chromatic <= order) {
            return Err(format!(
                "labels violate 1 <= clique ({}) <= chromatic ({}) <= order ({order})",
                self.clique, self.chromatic
            ));
        }
        Ok(())
    }
}

/// One split of labeled graphs of a common order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub split: Split,
    pub order: usize,
    /// Seed of the generation run (or of the split shuffle) that produced it.
    pub seed: u64,
    pub format_version: u16,
    pub records: Vec<LabeledGraph>,
}

impl Dataset {
    pub fn new(split: Split, order: usize, seed: u64, records: Vec<LabeledGraph>) -> Result<Self, DatasetError> {
        let ds = Dataset {
            split,
            order,
            seed,
            format_version: FORMAT_VERSION,
            records,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.order == 0 || self.order > 255 {
            return Err(DatasetError::UnsupportedOrder(self.order));
        }
        for (index, r) in self.records.iter().enumerate() {
            if r.graph.order() != self.order {
                return Err(DatasetError::InvalidRecord {
                    index,
                    reason: format!("order {} differs from dataset order {}", r.graph.order(), self.order),
                });
            }
            r.validate().map_err(|reason| DatasetError::InvalidRecord { index, reason })?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn graphs(&self) -> impl Iterator<Item = &Graph> {
        self.records.iter().map(|r| &r.graph)
    }

    pub fn targets(&self, target: Target) -> Vec<f64> {
        self.records.iter().map(|r| target.of(r) as f64).collect()
    }

    /// The first `n` records as a dataset of the same split.
    pub fn head(&self, n: usize) -> Dataset {
        Dataset {
            split: self.split,
            order: self.order,
            seed: self.seed,
            format_version: self.format_version,
            records: self.records.iter().take(n).cloned().collect(),
        }
    }
}
