use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::kernels::{self, ConvGeom};
use super::spec::{LayerSpec, ModelSpec};
use super::{NnError, Scalar, Tensor};
use crate::graph::Graph;

/// Samples per gradient chunk. Chunks are reduced in index order, so batch
/// gradients do not depend on thread scheduling.
pub(crate) const GRAD_CHUNK: usize = 16;

type LossAndGrads<T> = (T, Vec<Vec<T>>);

/// A [`ModelSpec`] with weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Network<T> {
    spec: ModelSpec,
    plan: Vec<Vec<usize>>,
    params: Vec<Tensor<T>>,
    /// Index of each node's weight tensor (bias follows it), by node id.
    param_of: Vec<Option<usize>>,
}

/// Every intermediate value of one forward pass.
#[derive(Debug, Clone)]
pub struct Trace<T> {
    outputs: Vec<Vec<T>>,
    pre: Vec<Vec<T>>,
    argmax: Vec<Vec<usize>>,
}

impl<T: Scalar> Trace<T> {
    /// Output of node `id` (0 is the input).
    pub fn output(&self, id: usize) -> &[T] {
        &self.outputs[id]
    }

    /// Pre-activation values of a dense, conv or activation node.
    pub fn pre_activation(&self, id: usize) -> Option<&[T]> {
        let p = &self.pre[id];
        (!p.is_empty()).then_some(p.as_slice())
    }

    /// Flat input index selected by each window of a pooling node.
    pub fn pool_argmax(&self, id: usize) -> Option<&[usize]> {
        let a = &self.argmax[id];
        (!a.is_empty()).then_some(a.as_slice())
    }

    pub fn prediction(&self) -> T {
        self.outputs.last().expect("trace has output")[0]
    }
}

fn param_index(spec: &ModelSpec) -> Vec<Option<usize>> {
    let mut next = 0;
    let mut out = vec![None];
    for node in &spec.nodes {
        match node.layer {
            LayerSpec::Dense { .. } | LayerSpec::Conv2d { .. } => {
                out.push(Some(next));
                next += 2;
            }
            _ => out.push(None),
        }
    }
    out
}

impl<T: Scalar> Network<T> {
    /// Glorot-uniform weights drawn from a seeded stream, zero biases. The
    /// draws are made in `f64` so the same seed gives the same network in
    /// either precision, up to rounding.
    pub fn new(spec: ModelSpec, seed: u64) -> Result<Self, NnError> {
        let plan = spec.shape_plan()?;
        let shapes = spec.param_shapes()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = Vec::with_capacity(shapes.len());
        for shape in shapes {
            if shape.len() == 1 {
                params.push(Tensor::zeros(&shape));
                continue;
            }
            let (fan_in, fan_out) = match shape.as_slice() {
                [i, o] => (*i, *o),
                [kh, kw, c, f] => (kh * kw * c, kh * kw * f),
                _ => unreachable!("weights are 2-D or 4-D"),
            };
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let dist = Uniform::new_inclusive(-limit, limit);
            let n: usize = shape.iter().product();
            let data = (0..n).map(|_| T::from_f64(dist.sample(&mut rng))).collect();
            params.push(Tensor::from_vec(&shape, data)?);
        }
        let param_of = param_index(&spec);
        Ok(Network {
            spec,
            plan,
            params,
            param_of,
        })
    }

    /// Wraps existing weights, checking them against the architecture.
    pub fn from_params(spec: ModelSpec, params: Vec<Tensor<T>>) -> Result<Self, NnError> {
        let plan = spec.shape_plan()?;
        let shapes = spec.param_shapes()?;
        if shapes.len() != params.len() {
            return Err(NnError::InvalidModel(format!(
                "model has {} parameter tensors, got {}",
                shapes.len(),
                params.len()
            )));
        }
        for (i, (s, p)) in shapes.iter().zip(&params).enumerate() {
            if s.as_slice() != p.shape() {
                return Err(NnError::InvalidModel(format!(
                    "parameter {i} has shape {:?}, expected {s:?}",
                    p.shape()
                )));
            }
        }
        let param_of = param_index(&spec);
        Ok(Network {
            spec,
            plan,
            params,
            param_of,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn shape_plan(&self) -> &[Vec<usize>] {
        &self.plan
    }

    pub fn params(&self) -> &[Tensor<T>] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [Tensor<T>] {
        &mut self.params
    }

    pub fn param_count(&self) -> usize {
        self.params.iter().map(Tensor::len).sum()
    }

    pub fn input_len(&self) -> usize {
        self.spec.input_len()
    }

    /// Same network in another precision.
    pub fn cast<U: Scalar>(&self) -> Network<U> {
        let params = self
            .params
            .iter()
            .map(|p| {
                let data = p.data().iter().map(|v| U::from_f64(v.as_f64())).collect();
                Tensor::from_vec(p.shape(), data).expect("same shape")
            })
            .collect();
        Network {
            spec: self.spec.clone(),
            plan: self.plan.clone(),
            params,
            param_of: self.param_of.clone(),
        }
    }

    fn check_input(&self, input: &[T]) -> Result<(), NnError> {
        if input.len() != self.input_len() {
            return Err(NnError::InputSize {
                expected: self.input_len(),
                found: input.len(),
                shape: self.spec.input.clone(),
            });
        }
        Ok(())
    }

    pub fn forward(&self, input: &[T]) -> Result<T, NnError> {
        Ok(self.forward_trace(input)?.prediction())
    }

    pub fn forward_trace(&self, input: &[T]) -> Result<Trace<T>, NnError> {
        self.check_input(input)?;
        let n = self.spec.nodes.len() + 1;
        let mut outputs: Vec<Vec<T>> = Vec::with_capacity(n);
        let mut pre: Vec<Vec<T>> = vec![Vec::new(); n];
        let mut argmax: Vec<Vec<usize>> = vec![Vec::new(); n];
        outputs.push(input.to_vec());
        for (i, node) in self.spec.nodes.iter().enumerate() {
            let id = i + 1;
            let len: usize = self.plan[id].iter().product();
            let src = &outputs[node.inputs[0]];
            let out = match &node.layer {
                LayerSpec::Dense { activation, .. } => {
                    let p = self.param_of[id].expect("dense has params");
                    let mut z = vec![T::zero(); len];
                    kernels::dense_forward(src, self.params[p].data(), self.params[p + 1].data(), &mut z);
                    let mut y = vec![T::zero(); len];
                    kernels::activate(*activation, &z, &mut y);
                    pre[id] = z;
                    y
                }
                LayerSpec::Conv2d { activation, .. } => {
                    let p = self.param_of[id].expect("conv has params");
                    let geom = self.conv_geom(id);
                    let mut z = vec![T::zero(); len];
                    kernels::conv_forward(&geom, src, self.params[p].data(), self.params[p + 1].data(), &mut z);
                    let mut y = vec![T::zero(); len];
                    kernels::activate(*activation, &z, &mut y);
                    pre[id] = z;
                    y
                }
                LayerSpec::MaxPool2d { pool } => {
                    let s = &self.plan[node.inputs[0]];
                    let mut y = vec![T::zero(); len];
                    let mut arg = vec![0usize; len];
                    kernels::maxpool_forward(src, (s[0], s[1], s[2]), *pool, &mut y, &mut arg);
                    argmax[id] = arg;
                    y
                }
                LayerSpec::Flatten => src.clone(),
                LayerSpec::Concat => {
                    let mut y = Vec::with_capacity(len);
                    for &j in &node.inputs {
                        y.extend_from_slice(&outputs[j]);
                    }
                    y
                }
                LayerSpec::Activation(act) => {
                    let mut y = vec![T::zero(); len];
                    kernels::activate(*act, src, &mut y);
                    pre[id] = src.clone();
                    y
                }
            };
            outputs.push(out);
        }
        Ok(Trace { outputs, pre, argmax })
    }

    fn conv_geom(&self, id: usize) -> ConvGeom {
        let node = self.spec.node(id);
        let s = &self.plan[node.inputs[0]];
        match node.layer {
            LayerSpec::Conv2d {
                filters, kernel, stride, ..
            } => ConvGeom {
                h: s[0],
                w: s[1],
                c: s[2],
                kh: kernel.0,
                kw: kernel.1,
                sh: stride.0,
                sw: stride.1,
                f: filters,
            },
            _ => unreachable!("not a convolution"),
        }
    }

    /// Zeroed buffers shaped like the parameters.
    pub fn zero_grads(&self) -> Vec<Vec<T>> {
        self.params.iter().map(|p| vec![T::zero(); p.len()]).collect()
    }

    /// Backpropagates `d loss / d prediction` through a trace, adding the
    /// parameter gradients into `grads`.
    pub fn backward(&self, trace: &Trace<T>, dloss: T, grads: &mut [Vec<T>]) {
        let n = self.spec.nodes.len() + 1;
        let mut d: Vec<Vec<T>> = vec![Vec::new(); n];
        d[n - 1] = vec![dloss];
        for id in (1..n).rev() {
            let mut g = std::mem::take(&mut d[id]);
            if g.is_empty() {
                continue;
            }
            let node = self.spec.node(id);
            let src_id = node.inputs[0];
            // Gradients are not propagated into the model input.
            let want_dx = src_id != 0;
            if want_dx && d[src_id].is_empty() && !matches!(node.layer, LayerSpec::Concat) {
                d[src_id] = vec![T::zero(); trace.outputs[src_id].len()];
            }
            match &node.layer {
                LayerSpec::Dense { activation, .. } => {
                    kernels::activate_backward(*activation, &trace.pre[id], &mut g);
                    let p = self.param_of[id].expect("dense has params");
                    let (gw, gb) = split_pair(grads, p);
                    let dx = if want_dx { Some(d[src_id].as_mut_slice()) } else { None };
                    kernels::dense_backward(&trace.outputs[src_id], self.params[p].data(), &g, gw, gb, dx);
                }
                LayerSpec::Conv2d { activation, .. } => {
                    kernels::activate_backward(*activation, &trace.pre[id], &mut g);
                    let p = self.param_of[id].expect("conv has params");
                    let geom = self.conv_geom(id);
                    let (gw, gb) = split_pair(grads, p);
                    let dx = if want_dx { Some(d[src_id].as_mut_slice()) } else { None };
                    kernels::conv_backward(&geom, &trace.outputs[src_id], self.params[p].data(), &g, gw, gb, dx);
                }
                LayerSpec::MaxPool2d { .. } => {
                    if want_dx {
                        kernels::maxpool_backward(&g, &trace.argmax[id], &mut d[src_id]);
                    }
                }
                LayerSpec::Flatten => {
                    if want_dx {
                        for (a, &b) in d[src_id].iter_mut().zip(&g) {
                            *a += b;
                        }
                    }
                }
                LayerSpec::Activation(act) => {
                    if want_dx {
                        kernels::activate_backward(*act, &trace.pre[id], &mut g);
                        for (a, &b) in d[src_id].iter_mut().zip(&g) {
                            *a += b;
                        }
                    }
                }
                LayerSpec::Concat => {
                    let mut off = 0;
                    for &j in &node.inputs {
                        let len = trace.outputs[j].len();
                        if j != 0 {
                            if d[j].is_empty() {
                                d[j] = vec![T::zero(); len];
                            }
                            for (a, &b) in d[j].iter_mut().zip(&g[off..off + len]) {
                                *a += b;
                            }
                        }
                        off += len;
                    }
                }
            }
        }
    }

    /// Adds the MAE gradient of one sample into `grads` and returns its
    /// absolute error. A prediction equal to the target contributes nothing.
    pub fn accumulate_gradient(&self, input: &[T], target: T, grads: &mut [Vec<T>]) -> Result<T, NnError> {
        let trace = self.forward_trace(input)?;
        let residual = trace.prediction() - target;
        if residual.is_nan() {
            return Ok(residual);
        }
        let dloss = if residual > T::zero() {
            T::one()
        } else if residual < T::zero() {
            -T::one()
        } else {
            return Ok(T::zero());
        };
        self.backward(&trace, dloss, grads);
        Ok(residual.abs())
    }

    /// Mean absolute error and its gradient over a batch.
    pub fn batch_gradient(&self, batch: &[(&[T], T)]) -> Result<(T, Vec<Vec<T>>), NnError> {
        if batch.is_empty() {
            return Err(NnError::EmptyDataset("batch"));
        }
        let partials: Vec<Result<LossAndGrads<T>, NnError>> = batch
            .par_chunks(GRAD_CHUNK)
            .map(|chunk| {
                let mut grads = self.zero_grads();
                let mut loss = T::zero();
                for (x, t) in chunk {
                    loss += self.accumulate_gradient(x, *t, &mut grads)?;
                }
                Ok((loss, grads))
            })
            .collect();
        let mut total = T::zero();
        let mut grads: Option<Vec<Vec<T>>> = None;
        for part in partials {
            let (loss, g) = part?;
            total += loss;
            match grads.as_mut() {
                None => grads = Some(g),
                Some(acc) => {
                    for (a, b) in acc.iter_mut().zip(&g) {
                        for (x, &y) in a.iter_mut().zip(b) {
                            *x += y;
                        }
                    }
                }
            }
        }
        let mut grads = grads.expect("non-empty batch");
        let scale = T::one() / T::from_f64(batch.len() as f64);
        for g in grads.iter_mut() {
            for v in g.iter_mut() {
                *v *= scale;
            }
        }
        Ok((total * scale, grads))
    }
}

fn split_pair<T>(grads: &mut [Vec<T>], p: usize) -> (&mut [T], &mut [T]) {
    let (a, b) = grads[p..].split_at_mut(1);
    (a[0].as_mut_slice(), b[0].as_mut_slice())
}

/// Network input for a graph: the adjacency matrix flattened row-major, which
/// is also the `N × N × 1` layout convolutional models expect.
pub fn encode_graph<T: Scalar>(g: &Graph) -> Vec<T> {
    g.adjacency_values(T::zero(), T::one())
}

/// Predictions for a sequence of graphs, in order. Each prediction is an
/// independent forward pass, so results equal one-at-a-time calls exactly.
pub fn predict_batch<T: Scalar>(net: &Network<T>, graphs: &[Graph]) -> Result<Vec<T>, NnError> {
    graphs.par_iter().map(|g| net.forward(&encode_graph(g))).collect()
}
