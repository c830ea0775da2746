use crate::error::{Error, Result};
use crate::nn::tensor::{batch_shape, Tensor};
use crate::nn::Mode;
use crate::real::Real;

pub const DEFAULT_EPSILON: f64 = 1e-5;
pub const DEFAULT_MOMENTUM: f64 = 0.1;

/// Per-channel batch normalization.
///
/// Training mode normalizes with the batch's mean and biased variance and
/// folds those statistics into the running estimates; inference mode uses the
/// running estimates only.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchNorm<T = f32> {
    pub gamma: Vec<T>,
    pub beta: Vec<T>,
    pub running_mean: Vec<T>,
    pub running_var: Vec<T>,
    pub epsilon: T,
    pub momentum: T,
}

/// Activations saved by a training-mode forward pass.
#[derive(Clone, Debug)]
pub struct BatchNormCache<T = f32> {
    normalized: Vec<Tensor<T>>,
    inv_std: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchNormGrads<T = f32> {
    pub gamma: Vec<T>,
    pub beta: Vec<T>,
}

impl<T: Real> BatchNormGrads<T> {
    pub fn zeros(channels: usize) -> Self {
        Self {
            gamma: vec![T::zero(); channels],
            beta: vec![T::zero(); channels],
        }
    }
}

impl<T: Real> BatchNorm<T> {
    pub fn new(channels: usize) -> Self {
        Self {
            gamma: vec![T::one(); channels],
            beta: vec![T::zero(); channels],
            running_mean: vec![T::zero(); channels],
            running_var: vec![T::one(); channels],
            epsilon: T::lit(DEFAULT_EPSILON),
            momentum: T::lit(DEFAULT_MOMENTUM),
        }
    }

    pub fn channels(&self) -> usize {
        self.gamma.len()
    }

    fn validate(&self, batch: &[Tensor<T>]) -> Result<()> {
        let shape = batch_shape(batch)?;
        let c = self.channels();
        if shape.channels != c {
            return Err(Error::dim(format!(
                "batch norm has {c} channels, input has {}",
                shape.channels
            )));
        }
        if [&self.beta, &self.running_mean, &self.running_var]
            .iter()
            .any(|v| v.len() != c)
        {
            return Err(Error::CorruptedState("batch norm parameter lengths disagree".into()));
        }
        if let Some(v) = self.running_var.iter().find(|v| !(**v >= T::zero())) {
            return Err(Error::CorruptedState(format!("running variance {v:?} is negative")));
        }
        Ok(())
    }

    /// Dispatches on `mode`; only training mode returns a cache.
    #[allow(clippy::type_complexity)]
    pub fn forward(&mut self, batch: &[Tensor<T>], mode: Mode) -> Result<(Vec<Tensor<T>>, Option<BatchNormCache<T>>)> {
        match mode {
            Mode::Training => self.forward_train(batch).map(|(y, c)| (y, Some(c))),
            Mode::Inference => self.forward_inference(batch).map(|y| (y, None)),
        }
    }

    pub fn forward_train(&mut self, batch: &[Tensor<T>]) -> Result<(Vec<Tensor<T>>, BatchNormCache<T>)> {
        self.validate(batch)?;
        if batch.len() < 2 {
            return Err(Error::InvalidBatch(format!(
                "training-mode batch norm needs at least 2 samples, got {}",
                batch.len()
            )));
        }
        let c = self.channels();
        let count = T::from(batch.len() * batch[0].shape().len() / c).unwrap();

        let mut mean = vec![T::zero(); c];
        for t in batch {
            for px in t.values().chunks_exact(c) {
                for (m, &v) in mean.iter_mut().zip(px) {
                    *m += v;
                }
            }
        }
        mean.iter_mut().for_each(|m| *m /= count);

        let mut var = vec![T::zero(); c];
        for t in batch {
            for px in t.values().chunks_exact(c) {
                for ((s, &v), &m) in var.iter_mut().zip(px).zip(&mean) {
                    let d = v - m;
                    *s += d * d;
                }
            }
        }
        var.iter_mut().for_each(|s| *s /= count);

        let inv_std: Vec<T> = var.iter().map(|&v| (v + self.epsilon).sqrt().recip()).collect();
        let mut normalized = Vec::with_capacity(batch.len());
        let mut outputs = Vec::with_capacity(batch.len());
        for t in batch {
            let mut xhat = t.clone();
            let mut y = t.clone();
            for (xp, yp) in xhat
                .values_mut()
                .chunks_exact_mut(c)
                .zip(y.values_mut().chunks_exact_mut(c))
            {
                for ch in 0..c {
                    let n = (xp[ch] - mean[ch]) * inv_std[ch];
                    xp[ch] = n;
                    yp[ch] = self.gamma[ch] * n + self.beta[ch];
                }
            }
            normalized.push(xhat);
            outputs.push(y);
        }

        let keep = T::one() - self.momentum;
        for ch in 0..c {
            self.running_mean[ch] = keep * self.running_mean[ch] + self.momentum * mean[ch];
            self.running_var[ch] = keep * self.running_var[ch] + self.momentum * var[ch];
        }

        Ok((outputs, BatchNormCache { normalized, inv_std }))
    }

    pub fn forward_inference(&self, batch: &[Tensor<T>]) -> Result<Vec<Tensor<T>>> {
        self.validate(batch)?;
        let c = self.channels();
        let scale: Vec<T> = (0..c)
            .map(|ch| self.gamma[ch] / (self.running_var[ch] + self.epsilon).sqrt())
            .collect();
        Ok(batch
            .iter()
            .map(|t| {
                let mut y = t.clone();
                for px in y.values_mut().chunks_exact_mut(c) {
                    for ch in 0..c {
                        px[ch] = (px[ch] - self.running_mean[ch]) * scale[ch] + self.beta[ch];
                    }
                }
                y
            })
            .collect())
    }

    /// Full batch-coupled derivative of a training-mode forward pass.
    ///
    /// Parameter gradients are added into `grads`.
    pub fn backward(
        &self,
        cache: &BatchNormCache<T>,
        upstream: &[Tensor<T>],
        grads: &mut BatchNormGrads<T>,
    ) -> Result<Vec<Tensor<T>>> {
        let c = self.channels();
        if upstream.len() != cache.normalized.len()
            || upstream
                .iter()
                .zip(&cache.normalized)
                .any(|(g, x)| g.shape() != x.shape())
        {
            return Err(Error::dim("batch norm upstream gradient does not match cached batch"));
        }
        let count = T::from(upstream.len() * upstream[0].shape().len() / c).unwrap();

        let mut sum_g = vec![T::zero(); c];
        let mut sum_gx = vec![T::zero(); c];
        for (g, x) in upstream.iter().zip(&cache.normalized) {
            for (gp, xp) in g.values().chunks_exact(c).zip(x.values().chunks_exact(c)) {
                for ch in 0..c {
                    sum_g[ch] += gp[ch];
                    sum_gx[ch] += gp[ch] * xp[ch];
                }
            }
        }
        for ch in 0..c {
            grads.gamma[ch] += sum_gx[ch];
            grads.beta[ch] += sum_g[ch];
        }

        // dx = gamma * inv_std / M * (M g - sum(g) - xhat * sum(g xhat))
        let coef: Vec<T> = (0..c).map(|ch| self.gamma[ch] * cache.inv_std[ch] / count).collect();
        Ok(upstream
            .iter()
            .zip(&cache.normalized)
            .map(|(g, x)| {
                let mut dx = g.clone();
                for (dp, xp) in dx.values_mut().chunks_exact_mut(c).zip(x.values().chunks_exact(c)) {
                    for ch in 0..c {
                        dp[ch] = coef[ch] * (count * dp[ch] - sum_g[ch] - xp[ch] * sum_gx[ch]);
                    }
                }
                dx
            })
            .collect())
    }
}
