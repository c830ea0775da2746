//! Finite-difference gradient oracles shared by the gradient tests and the
//! acceptance runner.
#![allow(dead_code)]

use aphase_core::nn::{
    maxpool2x2, maxpool2x2_backward, relu, relu_backward, softmax_cross_entropy, BatchNorm, BatchNormGrads, Conv2d,
    ConvGrads, Dense, DenseGrads, Mode, NetworkSpec, NetworkState, Shape, Task, Tensor,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Layer checks use the step from the layer contracts; the full network
/// uses a smaller one so probes rarely straddle a ReLU or pooling switch.
pub const STEP: f64 = 1e-3;
pub const NETWORK_STEP: f64 = 1e-5;

/// `|a - n| / max(|a|, |n|, 1e-3)`.
pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-3)
}

pub fn max_rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| rel_err(a, n))
        .fold(0.0, f64::max)
}

/// Central differences of `f` with respect to every entry of `x`.
pub fn numeric_grad(x: &[f64], mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut x = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = x[i];
            x[i] = orig + STEP;
            let up = f(&x);
            x[i] = orig - STEP;
            let down = f(&x);
            x[i] = orig;
            (up - down) / (2.0 * STEP)
        })
        .collect()
}

fn uniform(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn tensor(shape: Shape, values: Vec<f64>) -> Tensor<f64> {
    Tensor::from_vec(shape, values).unwrap()
}

/// Values bounded away from zero so the probe never crosses a ReLU kink.
fn off_zero(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let m = rng.random_range(0.1..1.0);
            if rng.random::<bool>() {
                m
            } else {
                -m
            }
        })
        .collect()
}

pub fn conv_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = Shape::new(6, 4, 2);
    let x = uniform(&mut rng, shape.len());
    let k = uniform(&mut rng, 3 * 3 * 2 * 3);
    let b = uniform(&mut rng, 3);
    let out_len = Shape::new(6, 4, 3).len();
    let r = uniform(&mut rng, out_len);
    let loss = |x: &[f64], k: &[f64], b: &[f64]| {
        let conv = Conv2d::from_parts(2, 3, k.to_vec(), b.to_vec()).unwrap();
        dot(conv.forward(&tensor(shape, x.to_vec())).unwrap().values(), &r)
    };
    let conv = Conv2d::from_parts(2, 3, k.clone(), b.clone()).unwrap();
    let mut grads = ConvGrads::zeros_like(&conv);
    let dx = conv
        .backward(
            &tensor(shape, x.clone()),
            &tensor(Shape::new(6, 4, 3), r.clone()),
            &mut grads,
        )
        .unwrap();
    let nx = numeric_grad(&x, |x| loss(x, &k, &b));
    let nk = numeric_grad(&k, |k| loss(&x, k, &b));
    let nb = numeric_grad(&b, |b| loss(&x, &k, b));
    max_rel_err(dx.values(), &nx)
        .max(max_rel_err(&grads.kernels, &nk))
        .max(max_rel_err(&grads.biases, &nb))
}

pub fn batchnorm_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = Shape::new(3, 3, 2);
    let batch = 4;
    let x = uniform(&mut rng, batch * shape.len());
    let gamma = uniform(&mut rng, 2);
    let beta = uniform(&mut rng, 2);
    let r = uniform(&mut rng, batch * shape.len());
    let split = |x: &[f64]| -> Vec<Tensor<f64>> { x.chunks(shape.len()).map(|c| tensor(shape, c.to_vec())).collect() };
    let layer = |g: &[f64], b: &[f64]| {
        let mut bn = BatchNorm::<f64>::new(2);
        bn.gamma = g.to_vec();
        bn.beta = b.to_vec();
        bn
    };
    let loss = |x: &[f64], g: &[f64], b: &[f64]| {
        let (y, _) = layer(g, b).forward_train(&split(x)).unwrap();
        let flat: Vec<f64> = y.iter().flat_map(|t| t.values().to_vec()).collect();
        dot(&flat, &r)
    };
    let mut bn = layer(&gamma, &beta);
    let (_, cache) = bn.forward_train(&split(&x)).unwrap();
    let mut grads = BatchNormGrads::zeros(2);
    let dx = bn.backward(&cache, &split(&r), &mut grads).unwrap();
    let dx: Vec<f64> = dx.iter().flat_map(|t| t.values().to_vec()).collect();
    let nx = numeric_grad(&x, |x| loss(x, &gamma, &beta));
    let ng = numeric_grad(&gamma, |g| loss(&x, g, &beta));
    let nb = numeric_grad(&beta, |b| loss(&x, &gamma, b));
    max_rel_err(&dx, &nx)
        .max(max_rel_err(&grads.gamma, &ng))
        .max(max_rel_err(&grads.beta, &nb))
}

pub fn relu_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = Shape::new(4, 4, 3);
    let x = off_zero(&mut rng, shape.len());
    let r = uniform(&mut rng, shape.len());
    let dx = relu_backward(&tensor(shape, x.clone()), &tensor(shape, r.clone())).unwrap();
    let nx = numeric_grad(&x, |x| dot(relu(&tensor(shape, x.to_vec())).values(), &r));
    max_rel_err(dx.values(), &nx)
}

pub fn maxpool_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = Shape::new(6, 4, 2);
    // Distinct values at least 0.01 apart so no window has a near tie.
    let mut x: Vec<f64> = (0..shape.len()).map(|i| i as f64 * 0.01).collect();
    for i in (1..x.len()).rev() {
        x.swap(i, rng.random_range(0..=i));
    }
    let out = Shape::new(3, 2, 2);
    let r = uniform(&mut rng, out.len());
    let (_, argmax) = maxpool2x2(&tensor(shape, x.clone())).unwrap();
    let dx = maxpool2x2_backward(shape, &argmax, &tensor(out, r.clone())).unwrap();
    let nx = numeric_grad(&x, |x| {
        dot(maxpool2x2(&tensor(shape, x.to_vec())).unwrap().0.values(), &r)
    });
    max_rel_err(dx.values(), &nx)
}

pub fn dense_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (inp, out, rows) = (8, 5, 3);
    let x = uniform(&mut rng, rows * inp);
    let w = uniform(&mut rng, out * inp);
    let b = uniform(&mut rng, out);
    let r = uniform(&mut rng, rows * out);
    let loss = |x: &[f64], w: &[f64], b: &[f64]| {
        let d = Dense::from_parts(inp, out, w.to_vec(), b.to_vec()).unwrap();
        dot(&d.forward_batch(x).unwrap(), &r)
    };
    let d = Dense::from_parts(inp, out, w.clone(), b.clone()).unwrap();
    let mut grads = DenseGrads::zeros_like(&d);
    let dx = d.backward_batch(&x, &r, &mut grads).unwrap();
    let nx = numeric_grad(&x, |x| loss(x, &w, &b));
    let nw = numeric_grad(&w, |w| loss(&x, w, &b));
    let nb = numeric_grad(&b, |b| loss(&x, &w, b));
    max_rel_err(&dx, &nx)
        .max(max_rel_err(&grads.weights, &nw))
        .max(max_rel_err(&grads.biases, &nb))
}

pub fn softmax_ce_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for classes in [2, 3] {
        let z: Vec<f64> = uniform(&mut rng, classes).iter().map(|v| 3.0 * v).collect();
        for label in 0..classes {
            let (_, g) = softmax_cross_entropy(&z, label, 0.0).unwrap();
            let n = numeric_grad(&z, |z| softmax_cross_entropy(z, label, 0.0).unwrap().0);
            worst = worst.max(max_rel_err(&g, &n));
        }
    }
    worst
}

/// Every layer check, by name.
pub fn layer_errors(seed: u64) -> Vec<(&'static str, f64)> {
    vec![
        ("conv", conv_error(seed)),
        ("batch norm", batchnorm_error(seed)),
        ("relu", relu_error(seed)),
        ("max-pool", maxpool_error(seed)),
        ("dense", dense_error(seed)),
        ("softmax cross-entropy", softmax_ce_error(seed)),
    ]
}

/// Miniature network (8x8 input) in `f64`: analytic gradients of the mean
/// batch loss against central differences over every parameter. Dropout
/// masks are identical across evaluations because the mask RNG is reseeded.
pub fn network_error(task: Task, seed: u64) -> f64 {
    let spec = NetworkSpec::with_input(task, Shape::new(8, 8, 1)).unwrap();
    let mut net = NetworkState::<f64>::init(spec, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    // Non-trivial batch-norm parameters so gamma and beta gradients are exercised.
    for n in net.norms.iter_mut() {
        for g in n.gamma.iter_mut() {
            *g = rng.random_range(0.5..1.5);
        }
        for b in n.beta.iter_mut() {
            *b = rng.random_range(-0.5..0.5);
        }
    }
    let k = task.num_classes();
    let batch: Vec<Tensor<f64>> = (0..4)
        .map(|_| tensor(spec.input, uniform(&mut rng, spec.input.len())))
        .collect();
    let labels: Vec<usize> = (0..4).map(|i| i % k).collect();
    net.set_mode(Mode::Training);
    let mask_seed = seed.wrapping_add(17);
    let loss = |net: &mut NetworkState<f64>| {
        let mut r = ChaCha8Rng::seed_from_u64(mask_seed);
        let cache = net.forward_train(&batch, &mut r).unwrap();
        net.backward(&cache, &labels).unwrap()
    };
    let analytic = loss(&mut net).grads;
    let analytic: Vec<Vec<f64>> = analytic.slices().iter().map(|s| s.to_vec()).collect();
    let mut worst: f64 = 0.0;
    for (t, a) in analytic.iter().enumerate() {
        for (i, &a) in a.iter().enumerate() {
            let orig = net.params()[t][i];
            net.params_with_velocity_mut()[t].0[i] = orig + NETWORK_STEP;
            let up = loss(&mut net).loss;
            net.params_with_velocity_mut()[t].0[i] = orig - NETWORK_STEP;
            let down = loss(&mut net).loss;
            net.params_with_velocity_mut()[t].0[i] = orig;
            worst = worst.max(rel_err(a, (up - down) / (2.0 * NETWORK_STEP)));
        }
    }
    worst
}
