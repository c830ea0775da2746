//! EEG A-phase classification with small convolutional networks trained
//! per subject on log-spectrogram images.
//!
//! * [`nn`]: tensors, layers and the two fixed architectures.
//! * [`train`]: SGD with momentum, class-balanced sampling, training loop and metrics.
//! * [`dsp`]: cubic-spline resampling and the log-spectrogram transform.
//! * [`data`]: EDF and CAP scoring parsers, segment extraction, synthetic subjects and the dataset container.
//! * [`experiments`]: training-fraction sweeps and expert-validation retraining.

// Negated comparisons deliberately treat NaN as out of range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod dsp;
pub mod error;
pub mod experiments;
mod io;
pub mod nn;
pub mod real;
pub mod train;

pub use data::{ClassCounts, Label, Segment, SubjectDataset};
pub use error::{Error, Result};
pub use experiments::{ExperimentConfig, ExperimentResult};
pub use nn::{Mode, NetworkSpec, NetworkState, Shape, Task, Tensor};
pub use real::Real;
pub use train::{ConfusionMatrix, TrainConfig};
