use crate::error::{Error, Result};
use crate::nn::tensor::{Shape, Tensor};
use crate::real::Real;

/// 2x2 max pooling with stride 2.
///
/// Returns the pooled tensor and, for every output cell, the flat input
/// offset of the winning element. Ties go to the first cell in row-major
/// scan order of the window.
pub fn maxpool2x2<T: Real>(input: &Tensor<T>) -> Result<(Tensor<T>, Vec<usize>)> {
    let s = input.shape();
    if !s.height.is_multiple_of(2) || !s.width.is_multiple_of(2) {
        return Err(Error::dim(format!(
            "2x2 pooling needs even spatial dimensions, got {s}"
        )));
    }
    let out_shape = Shape::new(s.height / 2, s.width / 2, s.channels);
    let mut out = Tensor::zeros(out_shape);
    let mut argmax = vec![0usize; out_shape.len()];
    let x = input.values();
    let mut o = 0;
    for h in 0..out_shape.height {
        for w in 0..out_shape.width {
            for c in 0..s.channels {
                let mut best = input.offset(2 * h, 2 * w, c);
                for (dh, dw) in [(0, 1), (1, 0), (1, 1)] {
                    let i = input.offset(2 * h + dh, 2 * w + dw, c);
                    if x[i] > x[best] {
                        best = i;
                    }
                }
                out.values_mut()[o] = x[best];
                argmax[o] = best;
                o += 1;
            }
        }
    }
    Ok((out, argmax))
}

/// Routes each upstream value to the input cell that won its window.
pub fn maxpool2x2_backward<T: Real>(input_shape: Shape, argmax: &[usize], upstream: &Tensor<T>) -> Result<Tensor<T>> {
    if upstream.shape().len() != argmax.len() {
        return Err(Error::dim(format!(
            "pooling upstream gradient has {} values for {} windows",
            upstream.shape().len(),
            argmax.len()
        )));
    }
    let mut grad = Tensor::zeros(input_shape);
    let dx = grad.values_mut();
    for (&i, &g) in argmax.iter().zip(upstream.values()) {
        dx[i] += g;
    }
    Ok(grad)
}
