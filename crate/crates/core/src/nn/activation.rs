use crate::error::{Error, Result};
use crate::nn::tensor::Tensor;
use crate::real::Real;

pub fn relu_in_place<T: Real>(values: &mut [T]) {
    for v in values {
        if !(*v > T::zero()) {
            *v = T::zero();
        }
    }
}

/// Zeroes `upstream` wherever the forward input was not strictly positive.
pub fn relu_backward_in_place<T: Real>(input: &[T], upstream: &mut [T]) {
    for (g, &x) in upstream.iter_mut().zip(input) {
        if !(x > T::zero()) {
            *g = T::zero();
        }
    }
}

pub fn relu<T: Real>(input: &Tensor<T>) -> Tensor<T> {
    let mut out = input.clone();
    relu_in_place(out.values_mut());
    out
}

pub fn relu_backward<T: Real>(input: &Tensor<T>, upstream: &Tensor<T>) -> Result<Tensor<T>> {
    if input.shape() != upstream.shape() {
        return Err(Error::dim(format!(
            "relu upstream gradient {} does not match input {}",
            upstream.shape(),
            input.shape()
        )));
    }
    let mut g = upstream.clone();
    relu_backward_in_place(input.values(), g.values_mut());
    Ok(g)
}
