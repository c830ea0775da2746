use std::io::Write;

use log::{debug, info};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nn::{Mode, NetworkState, Tensor};
use crate::real::Real;
use crate::train::{balanced_batch, sgd_momentum_step, TrainConfig};

/// Images with class indices.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSet<T = f32> {
    images: Vec<Tensor<T>>,
    labels: Vec<usize>,
    num_classes: usize,
}

impl<T: Real> TrainingSet<T> {
    pub fn new(images: Vec<Tensor<T>>, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if images.len() != labels.len() {
            return Err(Error::dim(format!(
                "{} images but {} labels",
                images.len(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(Error::Index {
                index: bad,
                len: num_classes,
            });
        }
        Ok(Self {
            images,
            labels,
            num_classes,
        })
    }

    pub fn images(&self) -> &[Tensor<T>] {
        &self.images
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Sample indices grouped by class.
    pub fn class_pools(&self) -> Vec<Vec<usize>> {
        let mut pools = vec![Vec::new(); self.num_classes];
        for (i, &l) in self.labels.iter().enumerate() {
            pools[l].push(i);
        }
        pools
    }

    pub fn class_counts(&self) -> Vec<usize> {
        self.class_pools().iter().map(Vec::len).collect()
    }

    /// Size after balancing every class up to the largest one.
    pub fn balanced_len(&self) -> usize {
        self.num_classes * self.class_counts().into_iter().max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossRecord {
    pub iteration: usize,
    pub epoch: usize,
    pub mean_loss: f64,
}

/// Writes `iteration,epoch,mean_loss` rows with a header line.
pub fn write_loss_csv<W: Write>(history: &[LossRecord], mut sink: W) -> Result<()> {
    writeln!(sink, "iteration,epoch,mean_loss")?;
    for r in history {
        writeln!(sink, "{},{},{}", r.iteration, r.epoch, r.mean_loss)?;
    }
    Ok(())
}

/// Trains `state` in place for exactly `config.max_epochs` epochs.
///
/// Each epoch runs `ceil(balanced_len / batch_size)` iterations of balanced
/// batch sampling, a training-mode forward pass, backpropagation and one
/// momentum step. The returned history holds the batch-mean loss (including
/// the weight-decay term) of every iteration. The state is left in
/// inference mode.
pub fn train_network<T: Real>(
    state: &mut NetworkState<T>,
    set: &TrainingSet<T>,
    config: &TrainConfig,
) -> Result<Vec<LossRecord>> {
    config.validate()?;
    if set.is_empty() {
        return Err(Error::InsufficientData("training set is empty".into()));
    }
    let k = state.spec().num_classes();
    if set.num_classes() != k {
        return Err(Error::dim(format!(
            "training set has {} classes, network predicts {k}",
            set.num_classes()
        )));
    }
    let pools = set.class_pools();
    let names = state.spec().task.class_names();
    if let Some(c) = pools.iter().position(Vec::is_empty) {
        return Err(Error::InsufficientData(format!(
            "no training samples for class {}",
            names.get(c).copied().unwrap_or("?")
        )));
    }

    let iterations = set.balanced_len().div_ceil(config.batch_size);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut history = Vec::with_capacity(config.max_epochs * iterations);
    state.set_mode(Mode::Training);
    let half_l2 = 0.5 * config.l2_coefficient;

    let result = (|| {
        for epoch in 0..config.max_epochs {
            let mut epoch_loss = 0.0;
            for _ in 0..iterations {
                let idx = balanced_batch(&pools, config.batch_size, &mut rng)?;
                let images: Vec<Tensor<T>> = idx.iter().map(|&i| set.images[i].clone()).collect();
                let labels: Vec<usize> = idx.iter().map(|&i| set.labels[i]).collect();
                let cache = state.forward_train(&images, &mut rng)?;
                let back = state.backward(&cache, &labels)?;
                let reg = if half_l2 > 0.0 {
                    half_l2 * state.decayed_square_norm().to_f64().unwrap()
                } else {
                    0.0
                };
                sgd_momentum_step(state, &back.grads, config)?;
                let loss = back.loss.to_f64().unwrap() + reg;
                if !loss.is_finite() {
                    return Err(Error::CorruptedState(format!(
                        "training diverged at epoch {epoch} (loss {loss})"
                    )));
                }
                epoch_loss += loss;
                history.push(LossRecord {
                    iteration: history.len(),
                    epoch,
                    mean_loss: loss,
                });
            }
            info!(
                "epoch {}/{}: mean loss {:.5}",
                epoch + 1,
                config.max_epochs,
                epoch_loss / iterations as f64
            );
        }
        debug!("trained {} iterations", history.len());
        Ok(())
    })();
    state.set_mode(Mode::Inference);
    result.map(|()| history)
}
