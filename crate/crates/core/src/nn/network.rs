use serde::{Deserialize, Serialize};

use super::layer::{dense_forward, dropout_forward, DenseLayer, DropoutSpec};
use super::Matrix;
use crate::error::{Error, Result};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Layer {
    Dense(DenseLayer),
    Dropout(DropoutSpec),
}

/// A feed-forward stack of dense and dropout layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub layers: Vec<Layer>,
}

/// Activations and dropout masks recorded by a forward pass.
///
/// `activations[0]` is the input, `activations[i + 1]` the output of layer `i`.
/// `masks[i]` is set only for dropout layers.
#[derive(Debug, Clone, Default)]
pub struct ForwardCache {
    pub activations: Vec<Matrix>,
    pub masks: Vec<Option<Matrix>>,
}

impl ForwardCache {
    pub fn output(&self) -> Option<&Matrix> {
        self.activations.last()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseGradient {
    pub weights: Matrix,
    pub biases: Vec<f64>,
}

/// Parameter gradients, one entry per dense layer in network order.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<DenseGradient>,
}

impl Gradients {
    /// Flattened views ordered like [`Network::parameters_mut`].
    pub fn tensors(&self) -> Vec<&[f64]> {
        self.layers
            .iter()
            .flat_map(|g| [g.weights.as_slice(), g.biases.as_slice()])
            .collect()
    }

    pub fn scale(&mut self, factor: f64) {
        for g in &mut self.layers {
            g.weights.as_mut_slice().iter_mut().for_each(|v| *v *= factor);
            g.biases.iter_mut().for_each(|v| *v *= factor);
        }
    }
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Self {
        Self { layers }
    }

    pub fn dense_layers(&self) -> impl Iterator<Item = &DenseLayer> {
        self.layers.iter().filter_map(|l| match l {
            Layer::Dense(d) => Some(d),
            Layer::Dropout(_) => None,
        })
    }

    pub fn input_dim(&self) -> Option<usize> {
        self.dense_layers().next().map(DenseLayer::inputs)
    }

    pub fn output_dim(&self) -> Option<usize> {
        self.dense_layers().last().map(DenseLayer::outputs)
    }

    pub fn parameter_count(&self) -> usize {
        self.dense_layers().map(DenseLayer::parameter_count).sum()
    }

    /// Mutable parameter views: weights then biases for each dense layer.
    pub fn parameters_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::new();
        for layer in &mut self.layers {
            if let Layer::Dense(d) = layer {
                out.push(d.weights.as_mut_slice());
                out.push(d.biases.as_mut_slice());
            }
        }
        out
    }

    pub fn parameters(&self) -> Vec<&[f64]> {
        self.dense_layers()
            .flat_map(|d| [d.weights.as_slice(), d.biases.as_slice()])
            .collect()
    }

    /// Forward pass without caching. Dropout is only active when `training`.
    pub fn predict(&self, input: &Matrix) -> Result<Matrix> {
        let mut x = input.clone();
        for layer in &self.layers {
            if let Layer::Dense(d) = layer {
                x = dense_forward(&x, d)?;
            }
        }
        Ok(x)
    }

    pub fn forward(&self, input: &Matrix, training: bool, rng: &mut Rng) -> Result<ForwardCache> {
        let mut cache = ForwardCache {
            activations: Vec::with_capacity(self.layers.len() + 1),
            masks: Vec::with_capacity(self.layers.len()),
        };
        cache.activations.push(input.clone());
        for layer in &self.layers {
            let x = cache.activations.last().expect("input pushed above");
            match layer {
                Layer::Dense(d) => {
                    let y = dense_forward(x, d)?;
                    cache.activations.push(y);
                    cache.masks.push(None);
                }
                Layer::Dropout(spec) => {
                    let (y, mask) = dropout_forward(x, spec, training, rng)?;
                    cache.activations.push(y);
                    cache.masks.push(Some(mask));
                }
            }
        }
        Ok(cache)
    }

    /// Backpropagates `upstream` (dL/d output) through the cached pass.
    ///
    /// Returns parameter gradients and dL/d input. Dropout masks from the
    /// cache are reused as-is.
    pub fn backward(&self, cache: &ForwardCache, upstream: &Matrix) -> Result<(Gradients, Matrix)> {
        if cache.activations.len() != self.layers.len() + 1 || cache.masks.len() != self.layers.len() {
            return Err(Error::State(format!(
                "forward cache holds {} activations for a {}-layer network; run forward first",
                cache.activations.len(),
                self.layers.len()
            )));
        }
        let output = &cache.activations[self.layers.len()];
        upstream.check_same_shape(output, "backward upstream gradient")?;

        let mut grad = upstream.clone();
        let mut dense_grads = Vec::new();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            match layer {
                Layer::Dense(d) => {
                    let y = &cache.activations[i + 1];
                    let x = &cache.activations[i];
                    // dL/dz = dL/dy ⊙ act'(z)
                    let mut dz = grad;
                    for (g, &yv) in dz.as_mut_slice().iter_mut().zip(y.as_slice()) {
                        *g *= d.activation.derivative_from_output(yv);
                    }
                    let dw = dz.transposed_matmul(x)?;
                    let mut db = vec![0.0; d.outputs()];
                    for r in 0..dz.rows() {
                        for (b, v) in db.iter_mut().zip(dz.row(r)) {
                            *b += v;
                        }
                    }
                    grad = dz.matmul(&d.weights)?;
                    dense_grads.push(DenseGradient { weights: dw, biases: db });
                }
                Layer::Dropout(_) => {
                    let mask = cache.masks[i]
                        .as_ref()
                        .ok_or_else(|| Error::State(format!("dropout mask missing for layer {i}")))?;
                    grad = grad.hadamard(mask)?;
                }
            }
        }
        dense_grads.reverse();
        Ok((Gradients { layers: dense_grads }, grad))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::layer::Activation;

    #[test]
    fn single_identity_layer_gradient() {
        let layer = DenseLayer::new(Matrix::from_rows(&[[0.7]]).unwrap(), vec![0.1], Activation::Identity).unwrap();
        let net = Network::new(vec![Layer::Dense(layer)]);
        let mut rng = Rng::new(0);
        let x = Matrix::from_rows(&[[1.0]]).unwrap();
        let cache = net.forward(&x, true, &mut rng).unwrap();
        let (g, _) = net.backward(&cache, &Matrix::filled(1, 1, 1.0)).unwrap();
        assert_eq!(g.layers[0].weights.as_slice(), &[1.0]);
        assert_eq!(g.layers[0].biases, vec![1.0]);
    }

    #[test]
    fn zero_upstream_gives_zero_gradients() {
        let mut rng = Rng::new(3);
        let net = Network::new(vec![
            Layer::Dense(DenseLayer::initialized(3, 4, Activation::Tanh, &mut rng)),
            Layer::Dropout(DropoutSpec::new(0.3).unwrap()),
            Layer::Dense(DenseLayer::initialized(4, 1, Activation::Sigmoid, &mut rng)),
        ]);
        let x = Matrix::from_fn(5, 3, |r, c| (r as f64 - c as f64) * 0.3);
        let cache = net.forward(&x, true, &mut rng).unwrap();
        let (g, dx) = net.backward(&cache, &Matrix::zeros(5, 1)).unwrap();
        assert!(g.tensors().iter().all(|t| t.iter().all(|&v| v == 0.0)));
        assert!(dx.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn missing_cache_is_state_error() {
        let mut rng = Rng::new(3);
        let net = Network::new(vec![Layer::Dense(DenseLayer::initialized(2, 1, Activation::Tanh, &mut rng))]);
        let err = net.backward(&ForwardCache::default(), &Matrix::zeros(1, 1)).unwrap_err();
        assert!(matches!(err, Error::State(_)));
    }
}
