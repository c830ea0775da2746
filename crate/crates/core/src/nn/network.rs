//! The two hand-wired classifiers: three conv/batch-norm/ReLU stages (the
//! first two max-pooled, the last followed by 50% dropout), two hidden dense
//! layers and a 2- or 3-unit output.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nn::activation::{relu_backward_in_place, relu_in_place};
use crate::nn::batchnorm::{BatchNorm, BatchNormCache, BatchNormGrads};
use crate::nn::conv::{Conv2d, ConvGrads, KERNEL_SIZE};
use crate::nn::dense::{Dense, DenseGrads};
use crate::nn::dropout::{Dropout, DropoutMask};
use crate::nn::loss::softmax_cross_entropy;
use crate::nn::pool::{maxpool2x2, maxpool2x2_backward};
use crate::nn::tensor::{batch_shape, Shape, Tensor};
use crate::nn::Mode;
use crate::real::Real;

pub const CONV_FILTERS: [usize; 3] = [2, 4, 8];
pub const DROPOUT_RATE: f64 = 0.5;
pub const IMAGE_SHAPE: Shape = Shape::new(120, 64, 1);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Task {
    /// A-phase versus N-phase.
    AN,
    /// A1 / A2 / A3.
    Subtype,
}

impl Task {
    pub fn num_classes(self) -> usize {
        self.class_names().len()
    }

    pub fn class_names(self) -> &'static [&'static str] {
        match self {
            Task::AN => &["A", "N"],
            Task::Subtype => &["A1", "A2", "A3"],
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            Task::AN => 0,
            Task::Subtype => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Task::AN),
            1 => Some(Task::Subtype),
            _ => None,
        }
    }

    /// Short human label, as used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            Task::AN => "A/N",
            Task::Subtype => "A1/A2/A3",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::AN => "an",
            Task::Subtype => "subtype",
        })
    }
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "an" | "a/n" => Ok(Task::AN),
            "subtype" | "a1/a2/a3" => Ok(Task::Subtype),
            other => Err(Error::Parameter(format!(
                "unknown task `{other}` (expected `an` or `subtype`)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerKind {
    Input,
    Conv { filters: usize },
    BatchNorm,
    Relu,
    MaxPool,
    Dropout,
    Flatten,
    Dense { units: usize },
    Output { units: usize },
    Softmax,
}

/// Output extent of one layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extent {
    Image(Shape),
    Vector(usize),
}

impl fmt::Display for Extent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extent::Image(s) => s.fmt(f),
            Extent::Vector(n) => write!(f, "{n}"),
        }
    }
}

/// Architecture description. The hidden dense width always equals the
/// flattened size of the last convolution stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NetworkSpec {
    pub task: Task,
    pub input: Shape,
}

impl NetworkSpec {
    /// The full-size network on 120 x 64 spectrogram images.
    pub fn new(task: Task) -> Self {
        Self {
            task,
            input: IMAGE_SHAPE,
        }
    }

    /// Same layer sequence on a smaller single-channel input; height and
    /// width must be multiples of 4.
    pub fn with_input(task: Task, input: Shape) -> Result<Self> {
        if input.channels != 1
            || input.height == 0
            || input.width == 0
            || !input.height.is_multiple_of(4)
            || !input.width.is_multiple_of(4)
        {
            return Err(Error::dim(format!(
                "network input must be single-channel with sides divisible by 4, got {input}"
            )));
        }
        Ok(Self { task, input })
    }

    pub fn num_classes(&self) -> usize {
        self.task.num_classes()
    }

    pub fn stage_input(&self, stage: usize) -> Shape {
        let div = 1 << stage.min(2);
        let channels = if stage == 0 {
            self.input.channels
        } else {
            CONV_FILTERS[stage - 1]
        };
        Shape::new(self.input.height / div, self.input.width / div, channels)
    }

    fn final_shape(&self) -> Shape {
        Shape::new(self.input.height / 4, self.input.width / 4, CONV_FILTERS[2])
    }

    pub fn flat_units(&self) -> usize {
        self.final_shape().len()
    }

    /// Expected output extent of every layer, in order.
    pub fn layers(&self) -> Vec<(LayerKind, Extent)> {
        let mut out = vec![(LayerKind::Input, Extent::Image(self.input))];
        for (stage, &filters) in CONV_FILTERS.iter().enumerate() {
            let s = self.stage_input(stage);
            let conv = Extent::Image(Shape::new(s.height, s.width, filters));
            out.push((LayerKind::Conv { filters }, conv));
            out.push((LayerKind::BatchNorm, conv));
            out.push((LayerKind::Relu, conv));
            if stage < 2 {
                out.push((
                    LayerKind::MaxPool,
                    Extent::Image(Shape::new(s.height / 2, s.width / 2, filters)),
                ));
            } else {
                out.push((LayerKind::Dropout, conv));
            }
        }
        let flat = self.flat_units();
        out.push((LayerKind::Flatten, Extent::Vector(flat)));
        out.push((LayerKind::Dense { units: flat }, Extent::Vector(flat)));
        out.push((LayerKind::Relu, Extent::Vector(flat)));
        out.push((LayerKind::Dense { units: flat }, Extent::Vector(flat)));
        out.push((LayerKind::Relu, Extent::Vector(flat)));
        let k = self.num_classes();
        out.push((LayerKind::Output { units: k }, Extent::Vector(k)));
        out.push((LayerKind::Softmax, Extent::Vector(k)));
        out
    }
}

/// Name, dimensions and weight-decay flag of one learnable tensor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamInfo {
    pub name: String,
    pub dims: Vec<usize>,
    pub decay: bool,
}

/// One value per learnable parameter, shape-congruent with the network.
/// Serves both as a gradient and as an optimizer velocity buffer.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients<T = f32> {
    pub convs: [ConvGrads<T>; 3],
    pub norms: [BatchNormGrads<T>; 3],
    pub dense: [DenseGrads<T>; 3],
}

impl<T: Real> Gradients<T> {
    pub fn zeros_like(net: &NetworkState<T>) -> Self {
        Self {
            convs: std::array::from_fn(|i| ConvGrads::zeros_like(&net.convs[i])),
            norms: std::array::from_fn(|i| BatchNormGrads::zeros(net.norms[i].channels())),
            dense: std::array::from_fn(|i| DenseGrads::zeros_like(&net.dense[i])),
        }
    }

    /// Tensors in canonical parameter order.
    pub fn slices(&self) -> Vec<&[T]> {
        let mut out: Vec<&[T]> = Vec::with_capacity(18);
        for i in 0..3 {
            out.push(&self.convs[i].kernels);
            out.push(&self.convs[i].biases);
            out.push(&self.norms[i].gamma);
            out.push(&self.norms[i].beta);
        }
        for d in &self.dense {
            out.push(&d.weights);
            out.push(&d.biases);
        }
        out
    }

    pub fn slices_mut(&mut self) -> Vec<&mut [T]> {
        let mut out: Vec<&mut [T]> = Vec::with_capacity(18);
        for (c, n) in self.convs.iter_mut().zip(self.norms.iter_mut()) {
            out.push(&mut c.kernels);
            out.push(&mut c.biases);
            out.push(&mut n.gamma);
            out.push(&mut n.beta);
        }
        for d in &mut self.dense {
            out.push(&mut d.weights);
            out.push(&mut d.biases);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.slices().iter().all(|s| s.iter().all(|v| *v == T::zero()))
    }
}

/// Learnable parameters, batch-norm statistics and optimizer velocity for
/// one instantiated architecture.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkState<T = f32> {
    spec: NetworkSpec,
    pub convs: [Conv2d<T>; 3],
    pub norms: [BatchNorm<T>; 3],
    pub dense: [Dense<T>; 3],
    pub velocity: Gradients<T>,
    mode: Mode,
}

/// Logits for a batch, row-major `batch x classes`.
#[derive(Clone, Debug, PartialEq)]
pub struct Logits<T = f32> {
    pub classes: usize,
    pub values: Vec<T>,
}

impl<T: Real> Logits<T> {
    pub fn rows(&self) -> usize {
        self.values.len() / self.classes
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.classes..(i + 1) * self.classes]
    }

    /// Index of the largest logit per row; the lowest index wins ties.
    pub fn argmax(&self) -> Vec<usize> {
        self.values
            .chunks_exact(self.classes)
            .map(|row| {
                let mut best = 0;
                for (i, &v) in row.iter().enumerate().skip(1) {
                    if v > row[best] {
                        best = i;
                    }
                }
                best
            })
            .collect()
    }
}

struct StageCache<T> {
    input: Vec<Tensor<T>>,
    norm: BatchNormCache<T>,
    /// Post-ReLU activations; positive exactly where the pre-activation was.
    activated: Vec<Tensor<T>>,
    argmax: Vec<Vec<usize>>,
    masks: Vec<DropoutMask>,
}

/// Activations retained by a training-mode forward pass.
pub struct ForwardCache<T = f32> {
    stages: Vec<StageCache<T>>,
    flat: Vec<T>,
    hidden1: Vec<T>,
    hidden2: Vec<T>,
    pub logits: Logits<T>,
}

/// Mean cross-entropy over the batch and the gradient of that mean.
pub struct Backward<T = f32> {
    pub loss: T,
    pub grads: Gradients<T>,
}

fn glorot<T: Real, R: Rng>(rng: &mut R, len: usize, fan_in: usize, fan_out: usize) -> Vec<T> {
    let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
    (0..len).map(|_| T::lit(rng.random_range(-bound..bound))).collect()
}

impl<T: Real> NetworkState<T> {
    /// Glorot-uniform weights, zero biases, identity batch norm and zero
    /// velocity. Deterministic given `seed`; weights are drawn in `f64` so
    /// every precision sees the same initialization.
    pub fn init(spec: NetworkSpec, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let taps = KERNEL_SIZE * KERNEL_SIZE;
        let convs = std::array::from_fn(|i| {
            let cin = spec.stage_input(i).channels;
            let cout = CONV_FILTERS[i];
            let mut c = Conv2d::zeros(cin, cout);
            c.kernels = glorot(&mut rng, c.kernels.len(), taps * cin, taps * cout);
            c
        });
        let norms = std::array::from_fn(|i| BatchNorm::new(CONV_FILTERS[i]));
        let flat = spec.flat_units();
        let widths = [flat, flat, flat, spec.num_classes()];
        let dense = std::array::from_fn(|i| {
            let mut d = Dense::zeros(widths[i], widths[i + 1]);
            d.weights = glorot(&mut rng, d.weights.len(), widths[i], widths[i + 1]);
            d
        });
        Self::from_layers(spec, convs, norms, dense)
    }

    pub(crate) fn from_layers(
        spec: NetworkSpec,
        convs: [Conv2d<T>; 3],
        norms: [BatchNorm<T>; 3],
        dense: [Dense<T>; 3],
    ) -> Self {
        let mut state = Self {
            spec,
            convs,
            norms,
            dense,
            velocity: Gradients {
                convs: std::array::from_fn(|_| ConvGrads {
                    kernels: vec![],
                    biases: vec![],
                }),
                norms: std::array::from_fn(|_| BatchNormGrads::zeros(0)),
                dense: std::array::from_fn(|_| DenseGrads {
                    weights: vec![],
                    biases: vec![],
                }),
            },
            mode: Mode::Inference,
        };
        state.velocity = Gradients::zeros_like(&state);
        state
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn set_mode(&mut self, mode: Mode) {
        self.mode = mode;
    }

    /// Learnable tensors in canonical order (matches [`Gradients::slices`]).
    pub fn param_info(&self) -> Vec<ParamInfo> {
        let mut out = Vec::with_capacity(18);
        for i in 0..3 {
            let n = i + 1;
            let c = &self.convs[i];
            out.push(ParamInfo {
                name: format!("conv{n}.kernels"),
                dims: c.kernel_dims().to_vec(),
                decay: true,
            });
            out.push(ParamInfo {
                name: format!("conv{n}.biases"),
                dims: vec![c.out_channels()],
                decay: false,
            });
            out.push(ParamInfo {
                name: format!("bn{n}.gamma"),
                dims: vec![c.out_channels()],
                decay: false,
            });
            out.push(ParamInfo {
                name: format!("bn{n}.beta"),
                dims: vec![c.out_channels()],
                decay: false,
            });
        }
        for (i, d) in self.dense.iter().enumerate() {
            let base = if i == 2 {
                "output".to_string()
            } else {
                format!("dense{}", i + 1)
            };
            out.push(ParamInfo {
                name: format!("{base}.weights"),
                dims: vec![d.out_units(), d.in_units()],
                decay: true,
            });
            out.push(ParamInfo {
                name: format!("{base}.biases"),
                dims: vec![d.out_units()],
                decay: false,
            });
        }
        out
    }

    pub fn params(&self) -> Vec<&[T]> {
        let mut out: Vec<&[T]> = Vec::with_capacity(18);
        for i in 0..3 {
            out.push(&self.convs[i].kernels);
            out.push(&self.convs[i].biases);
            out.push(&self.norms[i].gamma);
            out.push(&self.norms[i].beta);
        }
        for d in &self.dense {
            out.push(&d.weights);
            out.push(&d.biases);
        }
        out
    }

    /// Parameters paired with their velocity buffers, in canonical order.
    pub fn params_with_velocity_mut(&mut self) -> Vec<(&mut [T], &mut [T])> {
        let Self {
            convs,
            norms,
            dense,
            velocity,
            ..
        } = self;
        let mut params: Vec<&mut [T]> = Vec::with_capacity(18);
        for (c, n) in convs.iter_mut().zip(norms.iter_mut()) {
            params.push(&mut c.kernels);
            params.push(&mut c.biases);
            params.push(&mut n.gamma);
            params.push(&mut n.beta);
        }
        for d in dense.iter_mut() {
            params.push(&mut d.weights);
            params.push(&mut d.biases);
        }
        params.into_iter().zip(velocity.slices_mut()).collect()
    }

    /// Sum of squares of every weight subject to decay.
    pub fn decayed_square_norm(&self) -> T {
        self.param_info()
            .iter()
            .zip(self.params())
            .filter(|(info, _)| info.decay)
            .map(|(_, p)| p.iter().map(|&w| w * w).sum::<T>())
            .sum()
    }

    fn check_batch(&self, batch: &[Tensor<T>]) -> Result<()> {
        let shape = batch_shape(batch)?;
        if shape != self.spec.input {
            return Err(Error::dim(format!(
                "network expects {} inputs, got {shape}",
                self.spec.input
            )));
        }
        Ok(())
    }

    fn flatten(batch: &[Tensor<T>]) -> Vec<T> {
        let mut flat = Vec::with_capacity(batch.len() * batch[0].shape().len());
        for t in batch {
            flat.extend_from_slice(t.values());
        }
        flat
    }

    fn dense_head(&self, flat: &[T]) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
        let mut h1 = self.dense[0].forward_batch(flat)?;
        relu_in_place(&mut h1);
        let mut h2 = self.dense[1].forward_batch(&h1)?;
        relu_in_place(&mut h2);
        let logits = self.dense[2].forward_batch(&h2)?;
        Ok((h1, h2, logits))
    }

    /// Inference-mode logits. Never mutates the state.
    pub fn predict(&self, batch: &[Tensor<T>]) -> Result<Logits<T>> {
        self.check_batch(batch)?;
        let mut x: Vec<Tensor<T>> = batch.to_vec();
        for stage in 0..3 {
            let conv: Vec<Tensor<T>> = x.iter().map(|t| self.convs[stage].forward(t)).collect::<Result<_>>()?;
            let mut y = self.norms[stage].forward_inference(&conv)?;
            for t in &mut y {
                relu_in_place(t.values_mut());
            }
            x = if stage < 2 {
                y.iter().map(|t| maxpool2x2(t).map(|p| p.0)).collect::<Result<_>>()?
            } else {
                y
            };
        }
        let (_, _, logits) = self.dense_head(&Self::flatten(&x))?;
        Ok(Logits {
            classes: self.spec.num_classes(),
            values: logits,
        })
    }

    /// Forward pass in the state's current mode. Training mode updates the
    /// batch-norm running statistics, draws dropout masks from `rng` and
    /// returns the activations needed by [`NetworkState::backward`].
    pub fn forward<R: Rng + ?Sized>(
        &mut self,
        batch: &[Tensor<T>],
        rng: &mut R,
    ) -> Result<(Logits<T>, Option<ForwardCache<T>>)> {
        match self.mode {
            Mode::Inference => Ok((self.predict(batch)?, None)),
            Mode::Training => {
                let cache = self.forward_train(batch, rng)?;
                Ok((cache.logits.clone(), Some(cache)))
            }
        }
    }

    pub fn forward_train<R: Rng + ?Sized>(&mut self, batch: &[Tensor<T>], rng: &mut R) -> Result<ForwardCache<T>> {
        self.check_batch(batch)?;
        let dropout = Dropout::new(DROPOUT_RATE)?;
        let mut x: Vec<Tensor<T>> = batch.to_vec();
        let mut stages = Vec::with_capacity(3);
        for stage in 0..3 {
            let conv: Vec<Tensor<T>> = x.iter().map(|t| self.convs[stage].forward(t)).collect::<Result<_>>()?;
            let (mut y, norm) = self.norms[stage].forward_train(&conv)?;
            for t in &mut y {
                relu_in_place(t.values_mut());
            }
            let mut argmax = Vec::new();
            let mut masks = Vec::new();
            let next: Vec<Tensor<T>> = if stage < 2 {
                let mut pooled = Vec::with_capacity(y.len());
                for t in &y {
                    let (p, a) = maxpool2x2(t)?;
                    pooled.push(p);
                    argmax.push(a);
                }
                pooled
            } else {
                let mut dropped = Vec::with_capacity(y.len());
                for t in &y {
                    let mask = dropout.sample_mask(t.shape().len(), rng);
                    dropped.push(dropout.apply(t, &mask)?);
                    masks.push(mask);
                }
                dropped
            };
            stages.push(StageCache {
                input: std::mem::replace(&mut x, next),
                norm,
                activated: y,
                argmax,
                masks,
            });
        }
        let flat = Self::flatten(&x);
        let (hidden1, hidden2, logits) = self.dense_head(&flat)?;
        Ok(ForwardCache {
            stages,
            flat,
            hidden1,
            hidden2,
            logits: Logits {
                classes: self.spec.num_classes(),
                values: logits,
            },
        })
    }

    /// Gradient of the batch-mean cross-entropy with respect to every
    /// learnable parameter.
    pub fn backward(&self, cache: &ForwardCache<T>, labels: &[usize]) -> Result<Backward<T>> {
        let k = self.spec.num_classes();
        let rows = cache.logits.rows();
        if labels.len() != rows {
            return Err(Error::dim(format!("{} labels for a batch of {rows}", labels.len())));
        }
        let scale = T::one() / T::from(rows).unwrap();
        let mut loss = T::zero();
        let mut dlogits = Vec::with_capacity(rows * k);
        for (i, &label) in labels.iter().enumerate() {
            let (l, g) = softmax_cross_entropy(cache.logits.row(i), label, T::zero())?;
            loss += l;
            dlogits.extend(g.into_iter().map(|v| v * scale));
        }
        loss *= scale;

        let mut grads = Gradients::zeros_like(self);
        let mut dh2 = self.dense[2].backward_batch(&cache.hidden2, &dlogits, &mut grads.dense[2])?;
        relu_backward_in_place(&cache.hidden2, &mut dh2);
        let mut dh1 = self.dense[1].backward_batch(&cache.hidden1, &dh2, &mut grads.dense[1])?;
        relu_backward_in_place(&cache.hidden1, &mut dh1);
        let dflat = self.dense[0].backward_batch(&cache.flat, &dh1, &mut grads.dense[0])?;

        let last = self.spec.stage_input(2);
        let last = Shape::new(last.height, last.width, CONV_FILTERS[2]);
        let mut upstream: Vec<Tensor<T>> = dflat
            .chunks_exact(last.len())
            .map(|c| Tensor::from_vec(last, c.to_vec()))
            .collect::<Result<_>>()?;

        let dropout = Dropout::new(DROPOUT_RATE)?;
        for stage in (0..3).rev() {
            let sc = &cache.stages[stage];
            let mut dact: Vec<Tensor<T>> = if stage < 2 {
                upstream
                    .iter()
                    .zip(&sc.argmax)
                    .zip(&sc.activated)
                    .map(|((g, a), act)| maxpool2x2_backward(act.shape(), a, g))
                    .collect::<Result<_>>()?
            } else {
                upstream
                    .iter()
                    .zip(&sc.masks)
                    .map(|(g, m)| dropout.backward(m, g))
                    .collect::<Result<_>>()?
            };
            for (g, act) in dact.iter_mut().zip(&sc.activated) {
                relu_backward_in_place(act.values(), g.values_mut());
            }
            let dconv = self.norms[stage].backward(&sc.norm, &dact, &mut grads.norms[stage])?;
            upstream = sc
                .input
                .iter()
                .zip(&dconv)
                .map(|(x, g)| self.convs[stage].backward(x, g, &mut grads.convs[stage]))
                .collect::<Result<_>>()?;
        }
        Ok(Backward { loss, grads })
    }

    /// Runs one image through every layer in inference mode and records the
    /// extent each layer actually produced.
    pub fn trace_shapes(&self, image: &Tensor<T>) -> Result<Vec<(LayerKind, Extent)>> {
        let batch = std::slice::from_ref(image);
        self.check_batch(batch)?;
        let mut out = vec![(LayerKind::Input, Extent::Image(image.shape()))];
        let mut x = image.clone();
        for stage in 0..3 {
            let c = self.convs[stage].forward(&x)?;
            out.push((
                LayerKind::Conv {
                    filters: c.shape().channels,
                },
                Extent::Image(c.shape()),
            ));
            let mut y = self.norms[stage].forward_inference(std::slice::from_ref(&c))?.remove(0);
            out.push((LayerKind::BatchNorm, Extent::Image(y.shape())));
            relu_in_place(y.values_mut());
            out.push((LayerKind::Relu, Extent::Image(y.shape())));
            x = if stage < 2 {
                let p = maxpool2x2(&y)?.0;
                out.push((LayerKind::MaxPool, Extent::Image(p.shape())));
                p
            } else {
                out.push((LayerKind::Dropout, Extent::Image(y.shape())));
                y
            };
        }
        let flat = x.values().to_vec();
        out.push((LayerKind::Flatten, Extent::Vector(flat.len())));
        let mut h = flat;
        for (i, d) in self.dense.iter().enumerate() {
            h = d.forward(&h)?;
            if i < 2 {
                out.push((LayerKind::Dense { units: h.len() }, Extent::Vector(h.len())));
                relu_in_place(&mut h);
                out.push((LayerKind::Relu, Extent::Vector(h.len())));
            } else {
                out.push((LayerKind::Output { units: h.len() }, Extent::Vector(h.len())));
            }
        }
        out.push((LayerKind::Softmax, Extent::Vector(h.len())));
        Ok(out)
    }
}

/// Full-size network for `task`, initialized from `seed`.
pub fn init_network(task: Task, seed: u64) -> NetworkState<f32> {
    NetworkState::init(NetworkSpec::new(task), seed)
}
