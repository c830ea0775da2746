use crate::error::{Error, Result};
use crate::nn::tensor::{Shape, Tensor};
use crate::real::Real;

pub const KERNEL_SIZE: usize = 3;
const TAPS: usize = KERNEL_SIZE * KERNEL_SIZE;

/// 3x3 stride-1 convolution with one pixel of zero padding on every border,
/// so the spatial size is preserved.
///
/// Kernels are laid out `(kernel_h, kernel_w, in_channels, out_channels)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Conv2d<T = f32> {
    in_channels: usize,
    out_channels: usize,
    pub kernels: Vec<T>,
    pub biases: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvGrads<T = f32> {
    pub kernels: Vec<T>,
    pub biases: Vec<T>,
}

impl<T: Real> ConvGrads<T> {
    pub fn zeros_like(conv: &Conv2d<T>) -> Self {
        Self {
            kernels: vec![T::zero(); conv.kernels.len()],
            biases: vec![T::zero(); conv.biases.len()],
        }
    }
}

impl<T: Real> Conv2d<T> {
    pub fn zeros(in_channels: usize, out_channels: usize) -> Self {
        Self {
            in_channels,
            out_channels,
            kernels: vec![T::zero(); TAPS * in_channels * out_channels],
            biases: vec![T::zero(); out_channels],
        }
    }

    pub fn from_parts(in_channels: usize, out_channels: usize, kernels: Vec<T>, biases: Vec<T>) -> Result<Self> {
        if kernels.len() != TAPS * in_channels * out_channels || biases.len() != out_channels {
            return Err(Error::dim(format!(
                "conv {in_channels}->{out_channels} needs {} kernel weights and {out_channels} biases, got {} and {}",
                TAPS * in_channels * out_channels,
                kernels.len(),
                biases.len()
            )));
        }
        Ok(Self {
            in_channels,
            out_channels,
            kernels,
            biases,
        })
    }

    pub fn in_channels(&self) -> usize {
        self.in_channels
    }

    pub fn out_channels(&self) -> usize {
        self.out_channels
    }

    pub fn kernel_dims(&self) -> [usize; 4] {
        [KERNEL_SIZE, KERNEL_SIZE, self.in_channels, self.out_channels]
    }

    /// Offset of the `(ky, kx, ci, 0)` kernel row.
    #[inline]
    fn row(&self, ky: usize, kx: usize, ci: usize) -> usize {
        ((ky * KERNEL_SIZE + kx) * self.in_channels + ci) * self.out_channels
    }

    fn check_input(&self, input: &Tensor<T>) -> Result<()> {
        let s = input.shape();
        if s.is_empty() {
            return Err(Error::dim(format!("convolution input {s} is empty")));
        }
        if s.channels != self.in_channels {
            return Err(Error::dim(format!(
                "convolution expects {} input channels, got {}",
                self.in_channels, s.channels
            )));
        }
        Ok(())
    }

    pub fn output_shape(&self, input: Shape) -> Shape {
        Shape::new(input.height, input.width, self.out_channels)
    }

    pub fn forward(&self, input: &Tensor<T>) -> Result<Tensor<T>> {
        self.check_input(input)?;
        let s = input.shape();
        let (cin, cout) = (self.in_channels, self.out_channels);
        let x = input.values();
        let mut out = Tensor::zeros(self.output_shape(s));
        let y = out.values_mut();
        for h in 0..s.height {
            for w in 0..s.width {
                let o = (h * s.width + w) * cout;
                let acc = &mut y[o..o + cout];
                acc.copy_from_slice(&self.biases);
                for ky in 0..KERNEL_SIZE {
                    let Some(ih) = (h + ky).checked_sub(1).filter(|&i| i < s.height) else {
                        continue;
                    };
                    for kx in 0..KERNEL_SIZE {
                        let Some(iw) = (w + kx).checked_sub(1).filter(|&i| i < s.width) else {
                            continue;
                        };
                        let xi = (ih * s.width + iw) * cin;
                        for ci in 0..cin {
                            let v = x[xi + ci];
                            let r = self.row(ky, kx, ci);
                            for (a, &k) in acc.iter_mut().zip(&self.kernels[r..r + cout]) {
                                *a += v * k;
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Adds this sample's parameter gradients into `grads` and returns the
    /// gradient with respect to `input`.
    pub fn backward(&self, input: &Tensor<T>, upstream: &Tensor<T>, grads: &mut ConvGrads<T>) -> Result<Tensor<T>> {
        self.check_input(input)?;
        let s = input.shape();
        if upstream.shape() != self.output_shape(s) {
            return Err(Error::dim(format!(
                "convolution upstream gradient {} does not match output {}",
                upstream.shape(),
                self.output_shape(s)
            )));
        }
        let (cin, cout) = (self.in_channels, self.out_channels);
        let x = input.values();
        let g = upstream.values();
        let mut input_grad = Tensor::zeros(s);
        let dx = input_grad.values_mut();
        for h in 0..s.height {
            for w in 0..s.width {
                let o = (h * s.width + w) * cout;
                let go = &g[o..o + cout];
                for (b, &gv) in grads.biases.iter_mut().zip(go) {
                    *b += gv;
                }
                for ky in 0..KERNEL_SIZE {
                    let Some(ih) = (h + ky).checked_sub(1).filter(|&i| i < s.height) else {
                        continue;
                    };
                    for kx in 0..KERNEL_SIZE {
                        let Some(iw) = (w + kx).checked_sub(1).filter(|&i| i < s.width) else {
                            continue;
                        };
                        let xi = (ih * s.width + iw) * cin;
                        for ci in 0..cin {
                            let v = x[xi + ci];
                            let r = self.row(ky, kx, ci);
                            let mut back = T::zero();
                            for ((dk, &k), &gv) in grads.kernels[r..r + cout]
                                .iter_mut()
                                .zip(&self.kernels[r..r + cout])
                                .zip(go)
                            {
                                *dk += v * gv;
                                back += k * gv;
                            }
                            dx[xi + ci] += back;
                        }
                    }
                }
            }
        }
        Ok(input_grad)
    }
}
