//! Tensor type, layer primitives and the two fixed classifier networks.

pub mod activation;
pub mod batchnorm;
pub mod checkpoint;
pub mod conv;
pub mod dense;
pub mod dropout;
pub mod loss;
pub mod network;
pub mod pool;
pub mod tensor;

pub use activation::{relu, relu_backward};
pub use batchnorm::{BatchNorm, BatchNormCache, BatchNormGrads};
pub use checkpoint::{encode_checkpoint, read_checkpoint, write_checkpoint};
pub use conv::{Conv2d, ConvGrads};
pub use dense::{Dense, DenseGrads};
pub use dropout::{Dropout, DropoutMask};
pub use loss::{softmax, softmax_cross_entropy};
pub use network::{
    init_network, Backward, Extent, ForwardCache, Gradients, LayerKind, Logits, NetworkSpec, NetworkState, ParamInfo,
    Task,
};
pub use pool::{maxpool2x2, maxpool2x2_backward};
pub use tensor::{Shape, Tensor};

/// Selects dropout and batch-norm behaviour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Training,
    Inference,
}
