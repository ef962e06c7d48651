//! The four model families: an edge-count linear regression, a deep dense
//! network over the flattened adjacency matrix, a sequential CNN and a wide
//! CNN with five parallel convolution pipelines.
//!
//! Network widths take a scale factor in `(0, 1]`. Each filter or unit count
//! becomes `round(count · scale)` (halves rounded up), never less than 1, so
//! `scale = 1` gives the full-size models and small scales give cheap ones
//! with the same topology.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dataset::{Dataset, Target};
use crate::graph::Graph;
use crate::nn::{Activation, LayerSpec, ModelSpec, NnError};

#[derive(Debug, Error)]
pub enum LearnerError {
    #[error("scale must lie in (0, 1], got {0}")]
    InvalidScale(f64),
    #[error("unknown architecture '{0}' (expected regression, dense, seq_cnn or wide_cnn)")]
    UnknownArch(String),
    #[error("regression needs at least two distinct edge counts")]
    DegenerateDesign,
    #[error("regression needs a non-empty training set")]
    EmptyDataset,
    #[error("regression file: {0}")]
    Parse(String),
    #[error("{0}")]
    Nn(#[from] NnError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArchKind {
    Regression,
    Dense,
    SeqCnn,
    WideCnn,
}

impl ArchKind {
    pub const ALL: [ArchKind; 4] = [ArchKind::Regression, ArchKind::Dense, ArchKind::SeqCnn, ArchKind::WideCnn];

    pub fn name(self) -> &'static str {
        match self {
            ArchKind::Regression => "regression",
            ArchKind::Dense => "dense",
            ArchKind::SeqCnn => "seq_cnn",
            ArchKind::WideCnn => "wide_cnn",
        }
    }

    /// Whether inputs are `N × N × 1` maps rather than flat vectors.
    pub fn is_convolutional(self) -> bool {
        matches!(self, ArchKind::SeqCnn | ArchKind::WideCnn)
    }
}

impl fmt::Display for ArchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ArchKind {
    type Err = LearnerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ArchKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| LearnerError::UnknownArch(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArchitectureId {
    pub kind: ArchKind,
    pub scale: f64,
}

impl ArchitectureId {
    pub fn new(kind: ArchKind, scale: f64) -> Result<Self, LearnerError> {
        check_scale(scale)?;
        Ok(ArchitectureId { kind, scale })
    }

    /// Network for graphs of the given order; `None` for the regression.
    pub fn build(&self, order: usize) -> Result<Option<ModelSpec>, LearnerError> {
        match self.kind {
            ArchKind::Regression => Ok(None),
            ArchKind::Dense => build_dense(order, self.scale).map(Some),
            ArchKind::SeqCnn => build_seq_cnn(order, self.scale).map(Some),
            ArchKind::WideCnn => build_wide_cnn(order, self.scale).map(Some),
        }
    }
}

fn check_scale(scale: f64) -> Result<(), LearnerError> {
    if scale > 0.0 && scale <= 1.0 {
        Ok(())
    } else {
        Err(LearnerError::InvalidScale(scale))
    }
}

/// `round(count · scale)` with halves rounded up, at least 1.
pub fn scaled(count: usize, scale: f64) -> usize {
    ((count as f64 * scale + 0.5).floor() as usize).max(1)
}

pub const LEAKY_SLOPE: f64 = 0.3;

fn leaky() -> Activation {
    Activation::LeakyRelu(LEAKY_SLOPE)
}

fn conv(filters: usize, kernel: usize, stride: usize) -> LayerSpec {
    LayerSpec::Conv2d {
        filters,
        kernel: (kernel, kernel),
        stride: (stride, stride),
        activation: leaky(),
    }
}

fn dense(units: usize, activation: Activation) -> LayerSpec {
    LayerSpec::Dense { units, activation }
}

fn head(spec: &mut ModelSpec, from: usize, layers: usize, units: usize, activation: Activation) {
    let mut prev = from;
    for i in 1..=layers {
        prev = spec.add(format!("dense{i}"), dense(units, activation), &[prev]);
    }
    spec.add("out", dense(1, Activation::Linear), &[prev]);
}

fn checked(spec: ModelSpec) -> Result<ModelSpec, LearnerError> {
    spec.shape_plan()?;
    Ok(spec)
}

/// Flattened `N²` input, 13 ReLU layers of 1000 units, linear output.
pub fn build_dense(order: usize, scale: f64) -> Result<ModelSpec, LearnerError> {
    check_scale(scale)?;
    let mut spec = ModelSpec::new(&[order * order]);
    head(&mut spec, 0, 13, scaled(1000, scale), Activation::Relu);
    checked(spec)
}

/// conv 3×3 (512) → pool 2 → conv 3×3 (64) → pool 2 → flatten → 7 × 300 →
/// linear output, LeakyReLU everywhere before the output.
pub fn build_seq_cnn(order: usize, scale: f64) -> Result<ModelSpec, LearnerError> {
    check_scale(scale)?;
    let mut spec = ModelSpec::new(&[order, order, 1]);
    let c1 = spec.add("conv1", conv(scaled(512, scale), 3, 1), &[0]);
    let p1 = spec.add("pool1", LayerSpec::MaxPool2d { pool: 2 }, &[c1]);
    let c2 = spec.add("conv2", conv(scaled(64, scale), 3, 1), &[p1]);
    let p2 = spec.add("pool2", LayerSpec::MaxPool2d { pool: 2 }, &[c2]);
    let flat = spec.add("flatten", LayerSpec::Flatten, &[p2]);
    head(&mut spec, flat, 7, scaled(300, scale), leaky());
    checked(spec)
}

/// Five parallel pipelines from the input, concatenated into a 7 × 200
/// head:
///
/// | branch | layers |
/// |--------|--------|
/// | p1 | conv 3×3/1 → pool 2 → conv 3×3/1 → pool 2 |
/// | p2 | conv 5×5/5 → pool 2 → conv 5×5/1 |
/// | p3 | conv 10×10/10 → pool 2 → conv 2×2/1 |
/// | p4 | conv 25×25/25 |
/// | p5 | conv N×N/1 |
///
/// First convolutions have 512 filters, second ones 64. The kernel plan is
/// laid out for order 50; other orders are accepted when every branch still
/// fits.
pub fn build_wide_cnn(order: usize, scale: f64) -> Result<ModelSpec, LearnerError> {
    check_scale(scale)?;
    let first = scaled(512, scale);
    let second = scaled(64, scale);
    let pool = || LayerSpec::MaxPool2d { pool: 2 };
    let mut spec = ModelSpec::new(&[order, order, 1]);
    let mut branches = Vec::new();

    let a = spec.add("p1_conv1", conv(first, 3, 1), &[0]);
    let a = spec.add("p1_pool1", pool(), &[a]);
    let a = spec.add("p1_conv2", conv(second, 3, 1), &[a]);
    let a = spec.add("p1_pool2", pool(), &[a]);
    branches.push(spec.add("p1_flatten", LayerSpec::Flatten, &[a]));

    let a = spec.add("p2_conv1", conv(first, 5, 5), &[0]);
    let a = spec.add("p2_pool1", pool(), &[a]);
    let a = spec.add("p2_conv2", conv(second, 5, 1), &[a]);
    branches.push(spec.add("p2_flatten", LayerSpec::Flatten, &[a]));

    let a = spec.add("p3_conv1", conv(first, 10, 10), &[0]);
    let a = spec.add("p3_pool1", pool(), &[a]);
    let a = spec.add("p3_conv2", conv(second, 2, 1), &[a]);
    branches.push(spec.add("p3_flatten", LayerSpec::Flatten, &[a]));

    let a = spec.add("p4_conv1", conv(first, 25, 25), &[0]);
    branches.push(spec.add("p4_flatten", LayerSpec::Flatten, &[a]));

    let a = spec.add("p5_conv1", conv(first, order, 1), &[0]);
    branches.push(spec.add("p5_flatten", LayerSpec::Flatten, &[a]));

    let cat = spec.add("concat", LayerSpec::Concat, &branches);
    head(&mut spec, cat, 7, scaled(200, scale), leaky());
    checked(spec)
}

/// `ŷ = slope · |E| + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionModel {
    pub slope: f64,
    pub intercept: f64,
}

const REGRESSION_FORMAT: &str = "chiomega-regression/1";

impl RegressionModel {
    pub fn predict(&self, edges: usize) -> f64 {
        self.slope * edges as f64 + self.intercept
    }

    pub fn predict_graph(&self, g: &Graph) -> f64 {
        self.predict(g.edge_count())
    }

    pub fn to_text(&self) -> String {
        format!(
            "format = {REGRESSION_FORMAT}\nslope = {:?}\nintercept = {:?}\n",
            self.slope, self.intercept
        )
    }

    pub fn from_text(text: &str) -> Result<Self, LearnerError> {
        let mut format = None;
        let mut slope = None;
        let mut intercept = None;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| LearnerError::Parse(format!("expected 'key = value', got '{line}'")))?;
            let (k, v) = (k.trim(), v.trim());
            let num = || {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| LearnerError::Parse(format!("bad number '{v}'")))
            };
            match k {
                "format" => format = Some(v.to_string()),
                "slope" => slope = Some(num()?),
                "intercept" => intercept = Some(num()?),
                _ => return Err(LearnerError::Parse(format!("unknown key '{k}'"))),
            }
        }
        if format.as_deref() != Some(REGRESSION_FORMAT) {
            return Err(LearnerError::Parse(format!("expected format = {REGRESSION_FORMAT}")));
        }
        match (slope, intercept) {
            (Some(slope), Some(intercept)) => Ok(RegressionModel { slope, intercept }),
            _ => Err(LearnerError::Parse("missing slope or intercept".into())),
        }
    }
}

/// Ordinary least squares of `ys` on `xs`.
pub fn fit_points(xs: &[f64], ys: &[f64]) -> Result<RegressionModel, LearnerError> {
    assert_eq!(xs.len(), ys.len(), "paired samples");
    if xs.is_empty() {
        return Err(LearnerError::EmptyDataset);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(LearnerError::DegenerateDesign);
    }
    let slope = sxy / sxx;
    Ok(RegressionModel {
        slope,
        intercept: my - slope * mx,
    })
}

/// Least-squares fit of the target on edge count over a training set.
pub fn fit_regression(ds: &Dataset, target: Target) -> Result<RegressionModel, LearnerError> {
    let xs: Vec<f64> = ds.records.iter().map(|r| r.edges as f64).collect();
    fit_points(&xs, &ds.targets(target))
}
