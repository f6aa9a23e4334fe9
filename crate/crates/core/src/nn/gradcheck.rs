//! Central finite-difference checks for [`Network::backward`].

use super::{Matrix, Network};
use crate::error::Result;
use crate::rng::Rng;

/// Worst agreement between analytic and numeric gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    pub max_relative_error: f64,
    pub checked: usize,
}

/// `|a − n| / max(|a|, |n|, floor)`. The floor keeps near-zero gradients,
/// where finite differences are pure round-off, from dominating.
pub fn relative_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

fn objective(net: &Network, input: &Matrix, weights: &Matrix, rng: &Rng) -> Result<f64> {
    // Same stream for every evaluation, so dropout masks stay frozen.
    let cache = net.forward(input, true, &mut rng.clone())?;
    let out = cache.output().expect("forward output");
    Ok(out.as_slice().iter().zip(weights.as_slice()).map(|(a, b)| a * b).sum())
}

/// Checks every parameter and input gradient of `L = Σ out ⊙ weights` with
/// step `h`. Dropout masks come from `rng` and are identical across passes.
pub fn check_gradients(net: &Network, input: &Matrix, weights: &Matrix, rng: &Rng, h: f64, floor: f64) -> Result<GradCheck> {
    let cache = net.forward(input, true, &mut rng.clone())?;
    let (grads, input_grad) = net.backward(&cache, weights)?;
    let analytic: Vec<f64> = grads.tensors().into_iter().flatten().copied().collect();

    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut probe = net.clone();
    let mut index = 0;
    let tensor_count = probe.parameters().len();
    for t in 0..tensor_count {
        let len = probe.parameters()[t].len();
        for j in 0..len {
            let original = probe.parameters()[t][j];
            probe.parameters_mut()[t][j] = original + h;
            let plus = objective(&probe, input, weights, rng)?;
            probe.parameters_mut()[t][j] = original - h;
            let minus = objective(&probe, input, weights, rng)?;
            probe.parameters_mut()[t][j] = original;
            let numeric = (plus - minus) / (2.0 * h);
            worst = worst.max(relative_error(analytic[index], numeric, floor));
            index += 1;
            checked += 1;
        }
    }

    let mut x = input.clone();
    for j in 0..x.as_slice().len() {
        let original = x.as_slice()[j];
        x.as_mut_slice()[j] = original + h;
        let plus = objective(net, &x, weights, rng)?;
        x.as_mut_slice()[j] = original - h;
        let minus = objective(net, &x, weights, rng)?;
        x.as_mut_slice()[j] = original;
        let numeric = (plus - minus) / (2.0 * h);
        worst = worst.max(relative_error(input_grad.as_slice()[j], numeric, floor));
        checked += 1;
    }
    Ok(GradCheck {
        max_relative_error: worst,
        checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, DenseLayer, DropoutSpec, Layer};

    #[test]
    fn small_mixed_network_passes() {
        let mut rng = Rng::new(5);
        let net = Network::new(vec![
            Layer::Dense(DenseLayer::initialized(3, 4, Activation::Tanh, &mut rng)),
            Layer::Dropout(DropoutSpec::new(0.25).unwrap()),
            Layer::Dense(DenseLayer::initialized(4, 2, Activation::Sigmoid, &mut rng)),
        ]);
        let input = Matrix::from_fn(5, 3, |_, _| rng.uniform_in(-1.0, 1.0));
        let weights = Matrix::from_fn(5, 2, |_, _| rng.uniform_in(-1.0, 1.0));
        let report = check_gradients(&net, &input, &weights, &Rng::new(9), 1e-5, 1e-7).unwrap();
        assert!(report.max_relative_error <= 1e-4, "{report:?}");
        assert_eq!(report.checked, 3 * 4 + 4 + 4 * 2 + 2 + 15);
    }

    #[test]
    fn detects_a_wrong_gradient() {
        assert!(relative_error(1.0, 1.1, 1e-7) > 0.09);
        assert_eq!(relative_error(0.0, 0.0, 1e-7), 0.0);
    }
}
