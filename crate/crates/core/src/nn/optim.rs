use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_shapes(params: &[&mut [f64]], grads: &[&[f64]], context: &'static str) -> Result<()> {
    if params.len() != grads.len() {
        return Err(Error::dimension(context, format!("{} tensors", params.len()), format!("{} tensors", grads.len())));
    }
    for (i, (p, g)) in params.iter().zip(grads).enumerate() {
        if p.len() != g.len() {
            return Err(Error::dimension(
                context,
                format!("tensor {i} with {} elements", p.len()),
                format!("{} elements", g.len()),
            ));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate >= 0.0
            && self.learning_rate.is_finite()
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.epsilon > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid Adam settings {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub step: u64,
    first_moment: Vec<Vec<f64>>,
    second_moment: Vec<Vec<f64>>,
}

impl AdamState {
    /// Zeroed moments shaped like `shapes` (element count per tensor).
    pub fn new(config: AdamConfig, shapes: &[usize]) -> Self {
        Self {
            config,
            step: 0,
            first_moment: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            second_moment: shapes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    /// One bias-corrected Adam update (descending).
    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) -> Result<()> {
        check_shapes(params, grads, "adam_step")?;
        for (i, p) in params.iter().enumerate() {
            if self.first_moment.get(i).map(Vec::len) != Some(p.len()) {
                return Err(Error::dimension(
                    "adam_step moments",
                    format!("moment tensor {i} with {} elements", p.len()),
                    format!("{:?}", self.first_moment.get(i).map(Vec::len)),
                ));
            }
        }
        if self.first_moment.len() != params.len() {
            return Err(Error::dimension(
                "adam_step moments",
                format!("{} tensors", params.len()),
                format!("{} tensors", self.first_moment.len()),
            ));
        }
        self.step += 1;
        let AdamConfig {
            learning_rate,
            beta1,
            beta2,
            epsilon,
        } = self.config;
        let t = self.step as i32;
        let bias1 = 1.0 - beta1.powi(t);
        let bias2 = 1.0 - beta2.powi(t);
        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.first_moment.iter_mut().zip(self.second_moment.iter_mut()))
        {
            for j in 0..p.len() {
                let gj = g[j];
                m[j] = beta1 * m[j] + (1.0 - beta1) * gj;
                v[j] = beta2 * v[j] + (1.0 - beta2) * gj * gj;
                let m_hat = m[j] / bias1;
                let v_hat = v[j] / bias2;
                p[j] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Descend,
    Ascend,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdState {
    pub learning_rate: f64,
}

impl SgdState {
    pub fn new(learning_rate: f64) -> Result<Self> {
        if !(learning_rate >= 0.0 && learning_rate.is_finite()) {
            return Err(Error::Config(format!("SGD learning rate {learning_rate} must be non-negative")));
        }
        Ok(Self { learning_rate })
    }

    pub fn step(&self, params: &mut [&mut [f64]], grads: &[&[f64]], direction: Direction) -> Result<()> {
        check_shapes(params, grads, "sgd_step")?;
        let signed = match direction {
            Direction::Descend => -self.learning_rate,
            Direction::Ascend => self.learning_rate,
        };
        for (p, g) in params.iter_mut().zip(grads) {
            for (pj, gj) in p.iter_mut().zip(g.iter()) {
                *pj += signed * gj;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adam_zero_gradient_keeps_params() {
        let mut p = vec![0.5, -1.0];
        let mut adam = AdamState::new(AdamConfig::default(), &[2]);
        adam.step(&mut [&mut p], &[&[0.0, 0.0]]).unwrap();
        assert_eq!(p, vec![0.5, -1.0]);
        assert_eq!(adam.step, 1);
    }

    #[test]
    fn adam_first_step_moves_by_learning_rate() {
        // m̂ = 1, v̂ = 1 after bias correction, so Δ = lr / (1 + 1e-8).
        let mut p = vec![1.0];
        let mut adam = AdamState::new(AdamConfig::default(), &[1]);
        adam.step(&mut [&mut p], &[&[1.0]]).unwrap();
        assert!((p[0] - (1.0 - 0.001 / (1.0 + 1e-8))).abs() < 1e-15);
    }

    #[test]
    fn adam_monotone_on_constant_gradient() {
        let mut p = vec![1.0];
        let mut adam = AdamState::new(AdamConfig::default(), &[1]);
        adam.step(&mut [&mut p], &[&[1.0]]).unwrap();
        let after_one = p[0];
        adam.step(&mut [&mut p], &[&[1.0]]).unwrap();
        assert_eq!(adam.step, 2);
        assert!(p[0] < after_one && after_one < 1.0);
    }

    #[test]
    fn adam_shape_mismatch() {
        let mut p = vec![1.0, 2.0];
        let mut adam = AdamState::new(AdamConfig::default(), &[2]);
        assert!(matches!(adam.step(&mut [&mut p], &[&[1.0]]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn sgd_directions() {
        let sgd = SgdState::new(0.1).unwrap();
        let mut p = vec![1.0];
        sgd.step(&mut [&mut p], &[&[0.5]], Direction::Descend).unwrap();
        assert!((p[0] - 0.95).abs() < 1e-15);
        let mut p = vec![1.0];
        sgd.step(&mut [&mut p], &[&[0.5]], Direction::Ascend).unwrap();
        assert!((p[0] - 1.05).abs() < 1e-15);
        let mut p = vec![1.0];
        sgd.step(&mut [&mut p], &[&[0.0]], Direction::Descend).unwrap();
        assert_eq!(p[0], 1.0);
    }

    #[test]
    fn sgd_shape_mismatch() {
        let sgd = SgdState::new(0.1).unwrap();
        let mut p = vec![1.0];
        assert!(sgd.step(&mut [&mut p], &[&[1.0, 2.0]], Direction::Descend).is_err());
    }
}
