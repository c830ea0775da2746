use std::fmt;

use crate::error::{Error, Result};
use crate::real::Real;

/// Height x width x channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
}

impl Shape {
    pub const fn new(height: usize, width: usize, channels: usize) -> Self {
        Self {
            height,
            width,
            channels,
        }
    }

    pub const fn len(&self) -> usize {
        self.height * self.width * self.channels
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.height, self.width, self.channels)
    }
}

/// Dense rank-3 array stored height-major, then width, then channel.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T = f32> {
    shape: Shape,
    values: Vec<T>,
}

impl<T: Real> Tensor<T> {
    pub fn zeros(shape: Shape) -> Self {
        Self {
            shape,
            values: vec![T::zero(); shape.len()],
        }
    }

    pub fn filled(shape: Shape, value: T) -> Self {
        Self {
            shape,
            values: vec![value; shape.len()],
        }
    }

    pub fn from_vec(shape: Shape, values: Vec<T>) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::dim(format!(
                "{} values cannot fill a tensor of shape {shape}",
                values.len()
            )));
        }
        Ok(Self { shape, values })
    }

    pub fn from_fn(shape: Shape, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut values = Vec::with_capacity(shape.len());
        for h in 0..shape.height {
            for w in 0..shape.width {
                for c in 0..shape.channels {
                    values.push(f(h, w, c));
                }
            }
        }
        Self { shape, values }
    }

    #[inline]
    pub fn shape(&self) -> Shape {
        self.shape
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn offset(&self, h: usize, w: usize, c: usize) -> usize {
        (h * self.shape.width + w) * self.shape.channels + c
    }

    #[inline]
    pub fn at(&self, h: usize, w: usize, c: usize) -> T {
        self.values[self.offset(h, w, c)]
    }

    #[inline]
    pub fn set(&mut self, h: usize, w: usize, c: usize, value: T) {
        let i = self.offset(h, w, c);
        self.values[i] = value;
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            shape: self.shape,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn cast<U: Real>(&self) -> Tensor<U> {
        Tensor {
            shape: self.shape,
            values: self
                .values
                .iter()
                .map(|&v| U::from(v).expect("finite cast between float types"))
                .collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn sum(&self) -> T {
        self.values.iter().copied().sum()
    }
}

/// Checks that a batch is non-empty and homogeneous, returning the common shape.
pub(crate) fn batch_shape<T: Real>(batch: &[Tensor<T>]) -> Result<Shape> {
    let first = batch
        .first()
        .ok_or_else(|| Error::InvalidBatch("batch is empty".into()))?
        .shape();
    if let Some(t) = batch.iter().find(|t| t.shape() != first) {
        return Err(Error::dim(format!("batch mixes shapes {first} and {}", t.shape())));
    }
    Ok(first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_height_major() {
        let t = Tensor::<f32>::from_fn(Shape::new(2, 3, 2), |h, w, c| (h * 100 + w * 10 + c) as f32);
        assert_eq!(t.values()[..4], [0.0, 1.0, 10.0, 11.0]);
        assert_eq!(t.at(1, 2, 1), 121.0);
        assert_eq!(t.offset(1, 0, 0), 6);
    }

    #[test]
    fn from_vec_rejects_wrong_length() {
        assert!(Tensor::<f32>::from_vec(Shape::new(2, 2, 1), vec![0.0; 3]).is_err());
    }
}
