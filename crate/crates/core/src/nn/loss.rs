use super::Matrix;
use crate::error::{Error, Result};

/// Probabilities are clamped to `[EPSILON, 1 - EPSILON]` before any logarithm.
pub const EPSILON: f64 = 1e-7;

#[inline]
pub fn clamp_probability(p: f64) -> f64 {
    p.clamp(EPSILON, 1.0 - EPSILON)
}

/// `ln(clamp(p))`.
#[inline]
pub fn clamped_ln(p: f64) -> f64 {
    clamp_probability(p).ln()
}

/// Derivative of `ln(clamp(p))` with respect to `p` (zero where the clamp is active).
#[inline]
pub fn clamped_ln_derivative(p: f64) -> f64 {
    if (EPSILON..=1.0 - EPSILON).contains(&p) {
        1.0 / p
    } else {
        0.0
    }
}

fn check_pair(predictions: &Matrix, targets: &Matrix) -> Result<()> {
    if predictions.rows() == 0 {
        return Err(Error::Argument("binary cross-entropy of an empty batch".into()));
    }
    if predictions.cols() != 1 {
        return Err(Error::dimension("bce_loss", "batch x1 predictions", predictions.shape_str()));
    }
    predictions.check_same_shape(targets, "bce_loss targets")
}

/// Mean binary cross-entropy, `−(1/B) Σ [t ln p + (1−t) ln(1−p)]`.
pub fn bce_loss(predictions: &Matrix, targets: &Matrix) -> Result<f64> {
    check_pair(predictions, targets)?;
    let total: f64 = predictions
        .as_slice()
        .iter()
        .zip(targets.as_slice())
        .map(|(&p, &t)| t * clamped_ln(p) + (1.0 - t) * clamped_ln(1.0 - p))
        .sum();
    Ok(-total / predictions.rows() as f64)
}

/// dL/dp of [`bce_loss`].
pub fn bce_gradient(predictions: &Matrix, targets: &Matrix) -> Result<Matrix> {
    check_pair(predictions, targets)?;
    let n = predictions.rows() as f64;
    let data = predictions
        .as_slice()
        .iter()
        .zip(targets.as_slice())
        .map(|(&p, &t)| -(t * clamped_ln_derivative(p) - (1.0 - t) * clamped_ln_derivative(1.0 - p)) / n)
        .collect();
    Matrix::from_vec(predictions.rows(), 1, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[f64]) -> Matrix {
        Matrix::from_vec(v.len(), 1, v.to_vec()).unwrap()
    }

    #[test]
    fn half_probability_is_ln2() {
        let l = bce_loss(&col(&[0.5]), &col(&[1.0])).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn perfect_prediction_near_zero() {
        let l = bce_loss(&col(&[1.0 - EPSILON]), &col(&[1.0])).unwrap();
        assert!((0.0..=1.01e-7).contains(&l), "{l}");
        let l = bce_loss(&col(&[1.0]), &col(&[1.0])).unwrap();
        assert!(l.is_finite() && l >= 0.0);
    }

    #[test]
    fn two_sample_value() {
        // −½(ln 0.9 + ln 0.9) = 0.10536051565782628
        let l = bce_loss(&col(&[0.9, 0.1]), &col(&[1.0, 0.0])).unwrap();
        assert!((l - 0.105361).abs() < 1e-5, "{l}");
    }

    #[test]
    fn empty_batch_rejected() {
        assert!(matches!(bce_loss(&Matrix::zeros(0, 1), &Matrix::zeros(0, 1)), Err(Error::Argument(_))));
    }

    #[test]
    fn gradient_matches_difference_quotient() {
        let p = col(&[0.3, 0.8]);
        let t = col(&[1.0, 0.0]);
        let g = bce_gradient(&p, &t).unwrap();
        let h = 1e-6;
        for i in 0..2 {
            let mut plus = p.clone();
            let mut minus = p.clone();
            plus.as_mut_slice()[i] += h;
            minus.as_mut_slice()[i] -= h;
            let fd = (bce_loss(&plus, &t).unwrap() - bce_loss(&minus, &t).unwrap()) / (2.0 * h);
            assert!((fd - g.as_slice()[i]).abs() < 1e-6);
        }
    }

    proptest::proptest! {
        #[test]
        fn bce_non_negative_and_finite(p in 0.0f64..=1.0, t in proptest::bool::ANY) {
            let l = bce_loss(&col(&[p]), &col(&[if t { 1.0 } else { 0.0 }])).unwrap();
            proptest::prop_assert!(l.is_finite() && l >= 0.0);
        }
    }
}
