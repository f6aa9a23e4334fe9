use crate::error::{Error, Result};
use crate::nn::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    /// Pearson coefficients; symmetric with a unit diagonal.
    pub matrix: Matrix,
    /// Columns with zero variance. Their off-diagonal entries are 0.
    pub constant_features: Vec<usize>,
}

/// Pearson correlation between the columns of `data`.
pub fn correlation_matrix(data: &Matrix) -> Result<Correlation> {
    let n = data.rows();
    if n < 2 {
        return Err(Error::Argument(format!("correlation needs at least 2 rows, got {n}")));
    }
    let p = data.cols();
    let means = data.column_means();
    let mut centered = data.clone();
    for r in 0..n {
        for (v, m) in centered.row_mut(r).iter_mut().zip(&means) {
            *v -= m;
        }
    }
    let cross = centered.transposed_matmul(&centered)?;
    let constant_features: Vec<usize> = (0..p).filter(|&j| cross.get(j, j) == 0.0).collect();

    let mut matrix = Matrix::zeros(p, p);
    for i in 0..p {
        matrix.set(i, i, 1.0);
        for j in (i + 1)..p {
            let denom = (cross.get(i, i) * cross.get(j, j)).sqrt();
            let r = if denom == 0.0 {
                0.0
            } else {
                (cross.get(i, j) / denom).clamp(-1.0, 1.0)
            };
            matrix.set(i, j, r);
            matrix.set(j, i, r);
        }
    }
    Ok(Correlation {
        matrix,
        constant_features,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_linearity() {
        let data = Matrix::from_fn(20, 2, |r, c| {
            let f1 = (r as f64 * 0.7).sin() * 5.0 + r as f64;
            if c == 0 {
                f1
            } else {
                3.0 * f1 + 2.0
            }
        });
        let corr = correlation_matrix(&data).unwrap();
        assert!((corr.matrix.get(0, 1) - 1.0).abs() < 1e-12);
        assert_eq!(corr.matrix.get(0, 0), 1.0);
    }

    #[test]
    fn constant_feature_is_zero_with_warning() {
        let data = Matrix::from_rows(&[[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]]).unwrap();
        let corr = correlation_matrix(&data).unwrap();
        assert_eq!(corr.constant_features, vec![1]);
        assert_eq!(corr.matrix.get(0, 1), 0.0);
        assert_eq!(corr.matrix.get(1, 1), 1.0);
    }

    #[test]
    fn too_few_rows() {
        assert!(matches!(correlation_matrix(&Matrix::zeros(1, 3)), Err(Error::Argument(_))));
    }
}
