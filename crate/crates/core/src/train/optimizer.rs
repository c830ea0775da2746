use crate::error::{Error, Result};
use crate::nn::{Gradients, NetworkState};
use crate::real::Real;
use crate::train::TrainConfig;

/// One SGD-with-momentum update:
///
/// ```text
/// g' = g + l2 * w      (kernels and dense weights only)
/// v  = momentum * v - lr * g'
/// w  = w + v
/// ```
pub fn sgd_momentum_step<T: Real>(
    state: &mut NetworkState<T>,
    grads: &Gradients<T>,
    config: &TrainConfig,
) -> Result<()> {
    let decay: Vec<bool> = state.param_info().iter().map(|i| i.decay).collect();
    let grads = grads.slices();
    let lr = T::lit(config.learning_rate);
    let momentum = T::lit(config.momentum);
    let l2 = T::lit(config.l2_coefficient);
    let pairs = state.params_with_velocity_mut();
    if grads.len() != pairs.len() {
        return Err(Error::dim("gradient set does not match the network"));
    }
    if let Some(i) = pairs
        .iter()
        .zip(&grads)
        .position(|((p, v), g)| p.len() != g.len() || v.len() != g.len())
    {
        return Err(Error::dim(format!("gradient tensor {i} has the wrong length")));
    }
    for (((w, v), g), decay) in pairs.into_iter().zip(grads).zip(decay) {
        for ((w, v), &g) in w.iter_mut().zip(v.iter_mut()).zip(g) {
            let g = if decay { g + l2 * *w } else { g };
            *v = momentum * *v - lr * g;
            *w += *v;
        }
    }
    Ok(())
}
