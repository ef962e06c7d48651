//! Helpers shared by integration tests.
#![allow(dead_code)]

use chiomega_core::nn::{Activation, LayerSpec, ModelSpec, Network, Trace};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-5;
pub const GRAD_TOL: f64 = 1e-4;
/// Denominator floor of the relative error, so gradients that are zero up to
/// rounding compare as equal.
pub const GRAD_FLOOR: f64 = 1e-6;

#[derive(Debug, Default, Clone, Copy)]
pub struct GradCheck {
    pub max_rel_err: f64,
    pub checked: usize,
    /// Coordinates whose ±step crossed a ReLU, pooling or loss kink.
    pub skipped: usize,
}

impl GradCheck {
    pub fn merge(&mut self, other: GradCheck) {
        self.max_rel_err = self.max_rel_err.max(other.max_rel_err);
        self.checked += other.checked;
        self.skipped += other.skipped;
    }
}

/// Which side of every nondifferentiable point the forward pass is on.
fn kink_signature(net: &Network<f64>, trace: &Trace<f64>, target: f64) -> Vec<u64> {
    let mut sig = Vec::new();
    for (i, node) in net.spec().nodes.iter().enumerate() {
        let id = i + 1;
        match node.layer.activation() {
            Some(Activation::Relu) | Some(Activation::LeakyRelu(_)) => {
                if let Some(pre) = trace.pre_activation(id) {
                    sig.extend(pre.iter().map(|&v| (v > 0.0) as u64));
                }
            }
            _ => {}
        }
        if let Some(arg) = trace.pool_argmax(id) {
            sig.extend(arg.iter().map(|&a| a as u64));
        }
    }
    sig.push((trace.prediction() > target) as u64);
    sig
}

fn loss_and_signature(net: &Network<f64>, input: &[f64], target: f64) -> (f64, Vec<u64>) {
    let trace = net.forward_trace(input).unwrap();
    ((trace.prediction() - target).abs(), kink_signature(net, &trace, target))
}

/// Gives every parameter (biases included) a random value so no gradient
/// path is trivially zero.
pub fn randomize(net: &mut Network<f64>, rng: &mut ChaCha8Rng) {
    for p in net.params_mut() {
        if p.shape().len() == 1 {
            for v in p.data_mut() {
                *v = rng.gen_range(-0.1..0.1);
            }
        }
    }
}

/// Compares analytic MAE gradients with central differences on up to
/// `per_tensor` coordinates of each parameter tensor.
pub fn check_gradients(net: &Network<f64>, input: &[f64], per_tensor: usize, rng: &mut ChaCha8Rng) -> GradCheck {
    let pred = net.forward(input).unwrap();
    // Keep the residual well away from zero.
    let target = pred + if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let mut grads = net.zero_grads();
    net.accumulate_gradient(input, target, &mut grads).unwrap();
    let (_, base_sig) = loss_and_signature(net, input, target);

    let mut out = GradCheck::default();
    let mut probe = net.clone();
    for (t, tensor) in net.params().iter().enumerate() {
        let n = tensor.len();
        let coords: Vec<usize> = if n <= per_tensor {
            (0..n).collect()
        } else {
            (0..per_tensor).map(|_| rng.gen_range(0..n)).collect()
        };
        for c in coords {
            let orig = tensor.data()[c];
            probe.params_mut()[t].data_mut()[c] = orig + FD_STEP;
            let (lp, sp) = loss_and_signature(&probe, input, target);
            probe.params_mut()[t].data_mut()[c] = orig - FD_STEP;
            let (lm, sm) = loss_and_signature(&probe, input, target);
            probe.params_mut()[t].data_mut()[c] = orig;
            if sp != base_sig || sm != base_sig {
                out.skipped += 1;
                continue;
            }
            let numeric = (lp - lm) / (2.0 * FD_STEP);
            let analytic = grads[t][c];
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(GRAD_FLOOR);
            out.max_rel_err = out.max_rel_err.max(rel);
            out.checked += 1;
        }
    }
    out
}

pub fn random_input(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(0.0..1.0)).collect()
}

/// Runs `configs` independent weight draws of `spec` through the checker.
pub fn check_spec(spec: &ModelSpec, configs: u64, per_tensor: usize, seed: u64) -> GradCheck {
    let mut total = GradCheck::default();
    for k in 0..configs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1000).wrapping_add(k));
        let mut net = Network::<f64>::new(spec.clone(), rng.gen()).unwrap();
        randomize(&mut net, &mut rng);
        let input = random_input(spec.input_len(), &mut rng);
        total.merge(check_gradients(&net, &input, per_tensor, &mut rng));
    }
    total
}

fn dense(units: usize, activation: Activation) -> LayerSpec {
    LayerSpec::Dense { units, activation }
}

fn out() -> LayerSpec {
    dense(1, Activation::Linear)
}

fn conv(filters: usize, kernel: (usize, usize), stride: (usize, usize), activation: Activation) -> LayerSpec {
    LayerSpec::Conv2d {
        filters,
        kernel,
        stride,
        activation,
    }
}

const LEAKY: Activation = Activation::LeakyRelu(0.3);

/// Small models that each exercise one layer kind.
pub fn layer_kind_models() -> Vec<(&'static str, ModelSpec)> {
    let mut models = Vec::new();

    let mut m = ModelSpec::new(&[7]);
    let a = m.add("d1", dense(5, Activation::Relu), &[0]);
    let a = m.add("d2", dense(4, LEAKY), &[a]);
    let a = m.add("d3", dense(3, Activation::Linear), &[a]);
    m.add("out", out(), &[a]);
    models.push(("dense", m));

    let mut m = ModelSpec::new(&[7, 6, 2]);
    let a = m.add("c1", conv(3, (3, 2), (2, 1), LEAKY), &[0]);
    let a = m.add("c2", conv(4, (2, 2), (1, 2), Activation::Relu), &[a]);
    let a = m.add("c3", conv(2, (1, 1), (1, 1), Activation::Linear), &[a]);
    let a = m.add("flat", LayerSpec::Flatten, &[a]);
    m.add("out", out(), &[a]);
    models.push(("conv2d", m));

    let mut m = ModelSpec::new(&[9, 8, 1]);
    let a = m.add("c1", conv(3, (2, 2), (1, 1), LEAKY), &[0]);
    let a = m.add("p1", LayerSpec::MaxPool2d { pool: 2 }, &[a]);
    let a = m.add("p2", LayerSpec::MaxPool2d { pool: 3 }, &[a]);
    let a = m.add("flat", LayerSpec::Flatten, &[a]);
    m.add("out", out(), &[a]);
    models.push(("maxpool2d", m));

    let mut m = ModelSpec::new(&[4, 5, 3]);
    let a = m.add("flat", LayerSpec::Flatten, &[0]);
    let a = m.add("d1", dense(6, LEAKY), &[a]);
    m.add("out", out(), &[a]);
    models.push(("flatten", m));

    let mut m = ModelSpec::new(&[6, 6, 1]);
    let a = m.add("c1", conv(2, (3, 3), (1, 1), LEAKY), &[0]);
    let a = m.add("f1", LayerSpec::Flatten, &[a]);
    let b = m.add("c2", conv(3, (2, 2), (2, 2), Activation::Relu), &[0]);
    let b = m.add("p2", LayerSpec::MaxPool2d { pool: 3 }, &[b]);
    let b = m.add("f2", LayerSpec::Flatten, &[b]);
    let c = m.add("f3", LayerSpec::Flatten, &[0]);
    let d = m.add("cat", LayerSpec::Concat, &[a, b, c]);
    let d = m.add("d", dense(4, LEAKY), &[d]);
    m.add("out", out(), &[d]);
    models.push(("concat", m));

    let mut m = ModelSpec::new(&[6]);
    let a = m.add("d1", dense(5, Activation::Linear), &[0]);
    let a = m.add("relu", LayerSpec::Activation(Activation::Relu), &[a]);
    let a = m.add("d2", dense(5, Activation::Linear), &[a]);
    let a = m.add("leaky", LayerSpec::Activation(LEAKY), &[a]);
    let a = m.add("lin", LayerSpec::Activation(Activation::Linear), &[a]);
    m.add("out", out(), &[a]);
    models.push(("activation", m));

    models
}
