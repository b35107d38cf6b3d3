//! Minimal differentiable-network engine.
//!
//! Dense feed-forward classifiers over `f64`, cross-entropy loss,
//! gradients with respect to parameters and inputs, SGD with momentum and
//! warm-up/step-decay learning-rate schedules.

mod codec;
mod loss;
mod matrix;
mod net;
mod optim;
mod schedule;

pub use codec::{decode_net, encode_net, CHECKPOINT_MAGIC};
pub use loss::{cross_entropy, weighted_cross_entropy, LossOutput};
pub use matrix::Matrix;
pub use net::{Activation, Gradients, Layer, LayerGrad, Net, ObjectiveTerm, Trace};
pub use optim::Sgd;
pub use schedule::LrSchedule;
