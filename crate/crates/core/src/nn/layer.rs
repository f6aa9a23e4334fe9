use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Negative-side slope of the leaky ReLU.
pub const LEAKY_RELU_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
    LeakyRelu,
    Sigmoid,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::LeakyRelu => {
                if x > 0.0 {
                    x
                } else {
                    LEAKY_RELU_SLOPE * x
                }
            }
            Activation::Sigmoid => sigmoid(x),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the activation's output `y`.
    ///
    /// Valid for every variant here: leaky ReLU has a positive slope on both
    /// sides, so `y > 0` iff the pre-activation was positive.
    #[inline]
    pub fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - y * y,
            Activation::LeakyRelu => {
                if y > 0.0 {
                    1.0
                } else {
                    LEAKY_RELU_SLOPE
                }
            }
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Identity => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::LeakyRelu => "leaky_relu",
            Activation::Sigmoid => "sigmoid",
            Activation::Identity => "identity",
        }
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Fully connected layer; `weights` is `out × in`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub weights: Matrix,
    pub biases: Vec<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    pub fn new(weights: Matrix, biases: Vec<f64>, activation: Activation) -> Result<Self> {
        if biases.len() != weights.rows() {
            return Err(Error::dimension(
                "DenseLayer::new",
                format!("{} biases", weights.rows()),
                format!("{} biases", biases.len()),
            ));
        }
        Ok(Self {
            weights,
            biases,
            activation,
        })
    }

    /// Xavier/Glorot uniform for saturating activations, He-style uniform for
    /// leaky ReLU. Biases start at zero.
    pub fn initialized(inputs: usize, outputs: usize, activation: Activation, rng: &mut Rng) -> Self {
        let limit = match activation {
            Activation::LeakyRelu => {
                let gain = 2.0 / (1.0 + LEAKY_RELU_SLOPE * LEAKY_RELU_SLOPE);
                (3.0 * gain / inputs as f64).sqrt()
            }
            _ => (6.0 / (inputs + outputs) as f64).sqrt(),
        };
        let weights = Matrix::from_fn(outputs, inputs, |_, _| rng.uniform_in(-limit, limit));
        Self {
            weights,
            biases: vec![0.0; outputs],
            activation,
        }
    }

    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.as_slice().len() + self.biases.len()
    }
}

/// `activation(input · Wᵀ + b)`, row-wise.
pub fn dense_forward(input: &Matrix, layer: &DenseLayer) -> Result<Matrix> {
    if input.cols() != layer.inputs() {
        return Err(Error::dimension(
            "dense_forward",
            format!("input batch x{} for a {}->{} layer", layer.inputs(), layer.inputs(), layer.outputs()),
            input.shape_str(),
        ));
    }
    let mut out = input.matmul_transposed(&layer.weights)?;
    for r in 0..out.rows() {
        for (v, b) in out.row_mut(r).iter_mut().zip(&layer.biases) {
            *v = layer.activation.apply(*v + b);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DropoutSpec {
    pub rate: f64,
    /// Dropout only perturbs training passes; inference is a plain forward.
    pub training_only: bool,
}

impl DropoutSpec {
    pub fn new(rate: f64) -> Result<Self> {
        let spec = Self {
            rate,
            training_only: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.rate) {
            return Err(Error::Config(format!("dropout rate {} outside [0, 1)", self.rate)));
        }
        Ok(())
    }
}

/// Inverted dropout. Returns the output and the multiplicative mask that
/// produced it (entries are 0 or `1/(1-rate)` in training, 1 otherwise).
pub fn dropout_forward(
    input: &Matrix,
    spec: &DropoutSpec,
    training: bool,
    rng: &mut Rng,
) -> Result<(Matrix, Matrix)> {
    spec.validate()?;
    if !training || spec.rate == 0.0 {
        return Ok((input.clone(), Matrix::filled(input.rows(), input.cols(), 1.0)));
    }
    let keep = 1.0 / (1.0 - spec.rate);
    let mask = input.map(|_| if rng.uniform() < spec.rate { 0.0 } else { keep });
    let output = input.hadamard(&mask)?;
    Ok((output, mask))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer(w: &[&[f64]], b: &[f64], act: Activation) -> DenseLayer {
        DenseLayer::new(Matrix::from_rows(w).unwrap(), b.to_vec(), act).unwrap()
    }

    #[test]
    fn identity_layer_passes_through() {
        let l = layer(&[&[1.0, 0.0], &[0.0, 1.0]], &[0.0, 0.0], Activation::Identity);
        let x = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert_eq!(dense_forward(&x, &l).unwrap(), x);
    }

    #[test]
    fn tanh_of_zero() {
        let l = layer(&[&[5.0]], &[0.0], Activation::Tanh);
        let x = Matrix::from_rows(&[[0.0]]).unwrap();
        assert_eq!(dense_forward(&x, &l).unwrap().as_slice(), &[0.0]);
    }

    #[test]
    fn sigmoid_of_two() {
        // sigmoid(2) = 1 / (1 + e^-2) = 0.8807970779778823
        let l = layer(&[&[1.0]], &[1.0], Activation::Sigmoid);
        let x = Matrix::from_rows(&[[1.0]]).unwrap();
        let y = dense_forward(&x, &l).unwrap().get(0, 0);
        assert!((y - 0.880797).abs() < 1e-5, "{y}");
    }

    #[test]
    fn dense_shape_mismatch() {
        let l = layer(&[&[1.0, 2.0]], &[0.0], Activation::Identity);
        let x = Matrix::zeros(1, 3);
        let err = dense_forward(&x, &l).unwrap_err().to_string();
        assert!(err.contains("1x3"), "{err}");
    }

    #[test]
    fn dropout_zero_rate_is_identity() {
        let mut rng = Rng::new(1);
        let x = Matrix::from_fn(4, 5, |r, c| (r * 5 + c) as f64);
        let (y, mask) = dropout_forward(&x, &DropoutSpec::new(0.0).unwrap(), true, &mut rng).unwrap();
        assert_eq!(y, x);
        assert!(mask.as_slice().iter().all(|&m| m == 1.0));
    }

    #[test]
    fn dropout_inference_passthrough() {
        let mut rng = Rng::new(1);
        let x = Matrix::from_rows(&[[2.0, 4.0]]).unwrap();
        let (y, _) = dropout_forward(&x, &DropoutSpec::new(0.5).unwrap(), false, &mut rng).unwrap();
        assert_eq!(y.as_slice(), &[2.0, 4.0]);
    }

    #[test]
    fn dropout_rate_validation() {
        assert!(matches!(DropoutSpec::new(1.0), Err(Error::Config(_))));
        assert!(matches!(DropoutSpec::new(-0.1), Err(Error::Config(_))));
        let bad = DropoutSpec {
            rate: 1.5,
            training_only: true,
        };
        let mut rng = Rng::new(0);
        assert!(dropout_forward(&Matrix::zeros(1, 1), &bad, true, &mut rng).is_err());
    }

    #[test]
    fn dropout_preserves_expectation() {
        let mut rng = Rng::new(2024);
        let x = Matrix::from_fn(1000, 100, |r, c| 1.0 + ((r * 100 + c) % 7) as f64);
        let (y, mask) = dropout_forward(&x, &DropoutSpec::new(0.5).unwrap(), true, &mut rng).unwrap();
        let zeroed = mask.as_slice().iter().filter(|&&m| m == 0.0).count() as f64 / 1e5;
        assert!((0.49..=0.51).contains(&zeroed), "{zeroed}");
        let rel = (y.mean() - x.mean()).abs() / x.mean().abs();
        assert!(rel <= 0.02, "{rel}");
    }
}
