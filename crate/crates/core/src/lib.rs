//! Random graphs with exact chromatic and clique numbers, neural regressors
//! that predict them from the adjacency matrix, and the metrics used to score
//! those predictions.

pub mod generator;
pub mod graph;
pub mod oracles;

pub use generator::{generate_batch, generate_embedded, GenConfig};
pub use graph::{Graph, GraphError, VertexPermutation, VertexSet};
pub use oracles::{chromatic_number, label_graph, max_clique, ColoringResult, CliqueResult, Labels};
pub mod dataset;
pub mod metrics;
pub mod learner;
pub mod nn;
