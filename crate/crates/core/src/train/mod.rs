//! Optimizer, class-balanced sampling, the training loop and evaluation.

mod config;
mod metrics;
mod optimizer;
mod sampling;
mod trainer;

pub use config::TrainConfig;
pub use metrics::{evaluate, predict_classes, ConfusionMatrix};
pub use optimizer::sgd_momentum_step;
pub use sampling::{balanced_batch, balanced_counts, oversample_balance};
pub use trainer::{train_network, write_loss_csv, LossRecord, TrainingSet};
