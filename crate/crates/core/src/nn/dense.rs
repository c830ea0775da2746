use crate::error::{Error, Result};
use crate::real::Real;

/// Fully connected layer, `y = W x + b` with `W` stored `out x in` row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense<T = f32> {
    in_units: usize,
    out_units: usize,
    pub weights: Vec<T>,
    pub biases: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseGrads<T = f32> {
    pub weights: Vec<T>,
    pub biases: Vec<T>,
}

impl<T: Real> DenseGrads<T> {
    pub fn zeros_like(layer: &Dense<T>) -> Self {
        Self {
            weights: vec![T::zero(); layer.weights.len()],
            biases: vec![T::zero(); layer.biases.len()],
        }
    }
}

impl<T: Real> Dense<T> {
    pub fn zeros(in_units: usize, out_units: usize) -> Self {
        Self {
            in_units,
            out_units,
            weights: vec![T::zero(); in_units * out_units],
            biases: vec![T::zero(); out_units],
        }
    }

    pub fn from_parts(in_units: usize, out_units: usize, weights: Vec<T>, biases: Vec<T>) -> Result<Self> {
        if weights.len() != in_units * out_units || biases.len() != out_units {
            return Err(Error::dim(format!(
                "dense {in_units}->{out_units} needs {} weights and {out_units} biases, got {} and {}",
                in_units * out_units,
                weights.len(),
                biases.len()
            )));
        }
        Ok(Self {
            in_units,
            out_units,
            weights,
            biases,
        })
    }

    pub fn in_units(&self) -> usize {
        self.in_units
    }

    pub fn out_units(&self) -> usize {
        self.out_units
    }

    fn batch_rows(&self, input: &[T], width: usize, what: &str) -> Result<usize> {
        if width == 0 || !input.len().is_multiple_of(width) {
            return Err(Error::dim(format!(
                "dense {what} of length {} is not a multiple of {width}",
                input.len()
            )));
        }
        Ok(input.len() / width)
    }

    pub fn forward(&self, input: &[T]) -> Result<Vec<T>> {
        if input.len() != self.in_units {
            return Err(Error::dim(format!(
                "dense layer expects {} inputs, got {}",
                self.in_units,
                input.len()
            )));
        }
        self.forward_batch(input)
    }

    /// Row-major `batch x in_units` input to `batch x out_units` output.
    pub fn forward_batch(&self, input: &[T]) -> Result<Vec<T>> {
        let rows = self.batch_rows(input, self.in_units, "input")?;
        let mut out = Vec::with_capacity(rows * self.out_units);
        for _ in 0..rows {
            out.extend_from_slice(&self.biases);
        }
        // out += X * W^T
        T::gemm(
            rows,
            self.in_units,
            self.out_units,
            T::one(),
            input,
            self.in_units,
            1,
            &self.weights,
            1,
            self.in_units,
            T::one(),
            &mut out,
            self.out_units,
            1,
        );
        Ok(out)
    }

    /// Accumulates parameter gradients for a batch into `grads` and returns
    /// the input gradient, both row-major by sample.
    pub fn backward_batch(&self, input: &[T], upstream: &[T], grads: &mut DenseGrads<T>) -> Result<Vec<T>> {
        let rows = self.batch_rows(input, self.in_units, "input")?;
        if upstream.len() != rows * self.out_units {
            return Err(Error::dim(format!(
                "dense upstream gradient has {} values, expected {}",
                upstream.len(),
                rows * self.out_units
            )));
        }
        for g in upstream.chunks_exact(self.out_units) {
            for (b, &v) in grads.biases.iter_mut().zip(g) {
                *b += v;
            }
        }
        // dW += dY^T * X
        T::gemm(
            self.out_units,
            rows,
            self.in_units,
            T::one(),
            upstream,
            1,
            self.out_units,
            input,
            self.in_units,
            1,
            T::one(),
            &mut grads.weights,
            self.in_units,
            1,
        );
        // dX = dY * W
        let mut dx = vec![T::zero(); rows * self.in_units];
        T::gemm(
            rows,
            self.out_units,
            self.in_units,
            T::one(),
            upstream,
            self.out_units,
            1,
            &self.weights,
            self.in_units,
            1,
            T::zero(),
            &mut dx,
            self.in_units,
            1,
        );
        Ok(dx)
    }
}
