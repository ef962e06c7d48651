//! A small dense-tensor neural network engine: dense, 2-D convolution,
//! max-pooling, flatten, concat and activation layers wired as a DAG, with
//! hand-written backpropagation, Adam, and an MAE training loop.
//!
//! Feature maps are laid out height × width × channels. Everything is generic
//! over [`Scalar`] so the same code runs in `f32` for training and `f64` for
//! gradient checking.

mod adam;
pub mod checkpoint;
mod kernels;
mod network;
pub mod spec;
mod tensor;
mod train;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, NumAssign};
use thiserror::Error;

pub use adam::Adam;
pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, CHECKPOINT_MAGIC};
pub use network::{encode_graph, predict_batch, Network, Trace};
pub use spec::{Activation, LayerSpec, ModelSpec, Node};
pub use tensor::Tensor;
pub use train::{evaluate_mae, samples_from_dataset, train, train_samples, EpochRecord, History, Sample, TrainConfig};

pub trait Scalar: Float + NumAssign + Sum + Send + Sync + Debug + Display + Default + 'static {
    fn from_f64(v: f64) -> Self;
    fn as_f64(self) -> f64;
}

impl Scalar for f32 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

#[derive(Debug, Error)]
pub enum NnError {
    #[error("shape error at node {node} ({name}): {message}")]
    Shape { node: usize, name: String, message: String },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("input has {found} values, model expects {expected} (shape {shape:?})")]
    InputSize { expected: usize, found: usize, shape: Vec<usize> },
    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },
    #[error("empty {0} set")]
    EmptyDataset(&'static str),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("architecture file line {line}: {message}")]
    ArchParse { line: usize, message: String },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("checkpoint was written for model hash {found:016x}, expected {expected:016x}")]
    SpecHashMismatch { expected: u64, found: u64 },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
