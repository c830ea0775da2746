use rand::Rng;

use crate::error::{Error, Result};
use crate::nn::tensor::Tensor;
use crate::nn::Mode;
use crate::real::Real;

/// Inverted dropout: survivors are scaled by `1 / (1 - rate)` during
/// training so inference is the identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dropout {
    rate: f64,
}

/// Per-element keep flags drawn for one forward pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DropoutMask {
    keep: Vec<bool>,
}

impl DropoutMask {
    pub fn keep(&self) -> &[bool] {
        &self.keep
    }

    pub fn kept(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }
}

impl Dropout {
    pub fn new(rate: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::Parameter(format!("dropout rate must lie in [0, 1), got {rate}")));
        }
        Ok(Self { rate })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn sample_mask<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> DropoutMask {
        DropoutMask {
            keep: (0..len).map(|_| rng.random::<f64>() >= self.rate).collect(),
        }
    }

    pub fn forward<T: Real, R: Rng + ?Sized>(
        &self,
        input: &Tensor<T>,
        rng: &mut R,
        mode: Mode,
    ) -> Result<(Tensor<T>, Option<DropoutMask>)> {
        match mode {
            Mode::Inference => Ok((input.clone(), None)),
            Mode::Training => {
                let mask = self.sample_mask(input.shape().len(), rng);
                let out = self.apply(input, &mask)?;
                Ok((out, Some(mask)))
            }
        }
    }

    /// Applies `mask` with the inverted-dropout scale. Used for both the
    /// forward activations and the backward gradient.
    pub fn apply<T: Real>(&self, input: &Tensor<T>, mask: &DropoutMask) -> Result<Tensor<T>> {
        if mask.keep.len() != input.shape().len() {
            return Err(Error::dim(format!(
                "dropout mask has {} entries for {} values",
                mask.keep.len(),
                input.shape().len()
            )));
        }
        let scale = T::lit(1.0 / (1.0 - self.rate));
        let mut out = input.clone();
        for (v, &k) in out.values_mut().iter_mut().zip(&mask.keep) {
            *v = if k { *v * scale } else { T::zero() };
        }
        Ok(out)
    }

    pub fn backward<T: Real>(&self, mask: &DropoutMask, upstream: &Tensor<T>) -> Result<Tensor<T>> {
        self.apply(upstream, mask)
    }
}
