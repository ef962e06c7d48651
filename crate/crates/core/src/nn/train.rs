use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::network::encode_graph;
use super::{Adam, Network, NnError, Scalar};
use crate::dataset::{Dataset, Target};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without a validation improvement before stopping.
    pub patience: usize,
    /// Seeds the per-epoch shuffles.
    pub seed: u64,
    /// Stop as soon as validation MAE falls below this value.
    pub target_valid_mae: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-7,
            batch_size: 128,
            max_epochs: 100,
            patience: 5,
            seed: 0,
            target_valid_mae: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), NnError> {
        let bad = |m: &str| Err(NnError::InvalidConfig(m.to_string()));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("betas must lie in [0, 1)");
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return bad("epsilon must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch size must be at least 1");
        }
        if self.max_epochs == 0 {
            return bad("max epochs must be at least 1");
        }
        if self.patience == 0 {
            return bad("patience must be at least 1");
        }
        Ok(())
    }
}

/// One input vector and its regression target.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub input: Vec<T>,
    pub target: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean of the minibatch losses seen during the epoch.
    pub train_mae: f64,
    /// Validation MAE with the weights at the end of the epoch.
    pub valid_mae: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct History {
    pub epochs: Vec<EpochRecord>,
    /// Epoch whose weights were kept (1-based).
    pub best_epoch: usize,
    pub best_valid_mae: f64,
    pub stopped_early: bool,
}

impl History {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_mae,valid_mae\n");
        for e in &self.epochs {
            out.push_str(&format!("{},{},{}\n", e.epoch, e.train_mae, e.valid_mae));
        }
        out
    }
}

pub fn samples_from_dataset<T: Scalar>(ds: &Dataset, target: Target) -> Vec<Sample<T>> {
    ds.records
        .iter()
        .map(|r| Sample {
            input: encode_graph(&r.graph),
            target: T::from_f64(target.of(r) as f64),
        })
        .collect()
}

/// Mean absolute error of the network over `samples`.
pub fn evaluate_mae<T: Scalar>(net: &Network<T>, samples: &[Sample<T>]) -> Result<f64, NnError> {
    let errors: Vec<f64> = samples
        .par_iter()
        .map(|s| Ok((net.forward(&s.input)?.as_f64() - s.target.as_f64()).abs()))
        .collect::<Result<_, NnError>>()?;
    Ok(errors.iter().sum::<f64>() / errors.len().max(1) as f64)
}

/// Trains on labeled datasets.
pub fn train<T: Scalar>(
    net: &mut Network<T>,
    train_set: &Dataset,
    valid_set: &Dataset,
    target: Target,
    cfg: &TrainConfig,
) -> Result<History, NnError> {
    let tr = samples_from_dataset(train_set, target);
    let va = samples_from_dataset(valid_set, target);
    train_samples(net, &tr, &va, cfg)
}

/// Minibatch Adam on MAE with early stopping. Weights end at the epoch with
/// the lowest validation MAE.
pub fn train_samples<T: Scalar>(
    net: &mut Network<T>,
    train_set: &[Sample<T>],
    valid_set: &[Sample<T>],
    cfg: &TrainConfig,
) -> Result<History, NnError> {
    cfg.validate()?;
    if train_set.is_empty() {
        return Err(NnError::EmptyDataset("training"));
    }
    if valid_set.is_empty() {
        return Err(NnError::EmptyDataset("validation"));
    }
    let mut opt = Adam::new(cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut history = History {
        best_valid_mae: f64::INFINITY,
        ..History::default()
    };
    let mut best_params = net.params().to_vec();
    let mut since_best = 0;
    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for (b, idx) in order.chunks(cfg.batch_size).enumerate() {
            let batch: Vec<(&[T], T)> = idx
                .iter()
                .map(|&i| (train_set[i].input.as_slice(), train_set[i].target))
                .collect();
            let (loss, grads) = net.batch_gradient(&batch)?;
            let loss = loss.as_f64();
            if !loss.is_finite() || grads.iter().flatten().any(|g| !g.is_finite()) {
                return Err(NnError::NonFiniteLoss { epoch, batch: b + 1 });
            }
            loss_sum += loss * idx.len() as f64;
            opt.update(net.params_mut(), &grads);
        }
        let train_mae = loss_sum / train_set.len() as f64;
        let valid_mae = evaluate_mae(net, valid_set)?;
        if !valid_mae.is_finite() {
            return Err(NnError::NonFiniteLoss { epoch, batch: 0 });
        }
        log::debug!("epoch {epoch}: train MAE {train_mae:.4}, valid MAE {valid_mae:.4}");
        history.epochs.push(EpochRecord {
            epoch,
            train_mae,
            valid_mae,
        });
        if valid_mae < history.best_valid_mae {
            history.best_valid_mae = valid_mae;
            history.best_epoch = epoch;
            best_params.clone_from_slice(net.params());
            since_best = 0;
        } else {
            since_best += 1;
        }
        if cfg.target_valid_mae.is_some_and(|t| valid_mae < t) {
            history.stopped_early = epoch < cfg.max_epochs;
            break;
        }
        if since_best >= cfg.patience {
            history.stopped_early = epoch < cfg.max_epochs;
            break;
        }
    }
    net.params_mut().clone_from_slice(&best_params);
    Ok(history)
}
