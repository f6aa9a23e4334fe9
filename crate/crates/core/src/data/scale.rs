use serde::{Deserialize, Serialize};

use super::dataset::{ProcessedDataset, Split};
use crate::error::{Error, Result};
use crate::nn::Matrix;

/// Per-feature min-max map onto `[−1, 1]`. Constant features map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Scaler {
    /// Fits on the listed rows only.
    pub fn fit(features: &Matrix, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Argument("cannot fit a scaler on zero rows".into()));
        }
        let cols = features.cols();
        let mut min = vec![f64::INFINITY; cols];
        let mut max = vec![f64::NEG_INFINITY; cols];
        for &r in rows {
            for (c, &v) in features.row(r).iter().enumerate() {
                min[c] = min[c].min(v);
                max[c] = max[c].max(v);
            }
        }
        Ok(Self { min, max })
    }

    pub fn features(&self) -> usize {
        self.min.len()
    }

    pub fn is_constant(&self, feature: usize) -> bool {
        self.max[feature] == self.min[feature]
    }

    fn check(&self, m: &Matrix) -> Result<()> {
        if m.cols() != self.features() {
            return Err(Error::dimension("scaler", format!("{} columns", self.features()), m.cols()));
        }
        Ok(())
    }

    pub fn transform_value(&self, feature: usize, v: f64) -> f64 {
        if self.is_constant(feature) {
            0.0
        } else {
            2.0 * (v - self.min[feature]) / (self.max[feature] - self.min[feature]) - 1.0
        }
    }

    pub fn transform(&self, m: &Matrix) -> Result<Matrix> {
        self.check(m)?;
        Ok(Matrix::from_fn(m.rows(), m.cols(), |r, c| self.transform_value(c, m.get(r, c))))
    }

    pub fn inverse_transform(&self, m: &Matrix) -> Result<Matrix> {
        self.check(m)?;
        Ok(Matrix::from_fn(m.rows(), m.cols(), |r, c| {
            let (lo, hi) = (self.min[c], self.max[c]);
            if lo == hi {
                lo
            } else {
                (m.get(r, c) + 1.0) * 0.5 * (hi - lo) + lo
            }
        }))
    }
}

/// Fits the scaler on training rows, stores it on the dataset, and returns the
/// scaled matrix for all rows. Test rows outside the training range may fall
/// outside `[−1, 1]`.
pub fn scale_fit_transform(dataset: &mut ProcessedDataset) -> Result<Matrix> {
    let train = dataset.split_indices(Split::Train);
    let scaler = Scaler::fit(&dataset.features, &train)?;
    let scaled = scaler.transform(&dataset.features)?;
    dataset.scaler = Some(scaler);
    Ok(scaled)
}
