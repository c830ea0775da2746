use crate::error::{Error, Result};
use crate::real::Real;

/// Numerically stable softmax (max-subtracted).
pub fn softmax<T: Real>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Cross-entropy of `softmax(logits)` against `label`, plus a precomputed
/// regularization term.
///
/// The returned gradient covers the logits only; the weight-decay gradient
/// is applied by the optimizer.
pub fn softmax_cross_entropy<T: Real>(logits: &[T], label: usize, l2_term: T) -> Result<(T, Vec<T>)> {
    if label >= logits.len() {
        return Err(Error::Index {
            index: label,
            len: logits.len(),
        });
    }
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let total: T = logits.iter().map(|&z| (z - max).exp()).sum();
    let log_z = max + total.ln();
    let loss = log_z - logits[label] + l2_term;
    let mut grad = softmax(logits);
    grad[label] -= T::one();
    Ok((loss, grad))
}
