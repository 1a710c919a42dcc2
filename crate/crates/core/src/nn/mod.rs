//! Minimal feed-forward network engine: layer-normalized ReLU MLPs with exact
//! reverse-mode gradients, Xavier initialization, Adam, and checkpoints.
//!
//! All arithmetic is `f64`. Values own their data; a parameter set may be
//! shared read-only between threads.

mod adam;
pub mod checkpoint;
mod network;

pub use adam::{AdamState, ADAM_BETA1, ADAM_BETA2, ADAM_EPS};
pub use checkpoint::Checkpoint;
pub use network::{
    backward, backward_single, forward, forward_batch, mlp_spec, predict, predict_batch,
    validate_spec, xavier_init, xavier_init_with_rng, GradientTape, Layer, LayerKind, LayerSpec,
    NetworkParams, ParamGrads, LAYERNORM_EPS,
};
