//! Small dense-network engine with hand-written backpropagation.

mod gradcheck;
mod layer;
mod loss;
mod matrix;
mod network;
mod optim;

pub use gradcheck::{check_gradients, relative_error, GradCheck};
pub use layer::{dense_forward, dropout_forward, sigmoid, Activation, DenseLayer, DropoutSpec, LEAKY_RELU_SLOPE};
pub use loss::{bce_gradient, bce_loss, clamp_probability, clamped_ln, clamped_ln_derivative, EPSILON};
pub use matrix::Matrix;
pub use network::{DenseGradient, ForwardCache, Gradients, Layer, Network};
pub use optim::{AdamConfig, AdamState, Direction, SgdState};
