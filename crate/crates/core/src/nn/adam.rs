//! Adam optimizer over flat parameter tensors.

use crate::error::{Error, Result};
use crate::nn::NetworkParams;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// First/second-moment accumulators and the step counter.
///
/// `step` descends: callers maximizing an objective pass negated gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first_moment: Vec<Vec<f64>>,
    pub second_moment: Vec<Vec<f64>>,
    pub steps: u64,
}

impl AdamState {
    pub fn for_network(params: &NetworkParams) -> Self {
        Self::for_shapes(params.tensors().iter().map(|t| t.len()))
    }

    pub fn for_shapes(lengths: impl IntoIterator<Item = usize>) -> Self {
        let (m, v) = lengths.into_iter().map(|n| (vec![0.0; n], vec![0.0; n])).unzip();
        Self { first_moment: m, second_moment: v, steps: 0 }
    }

    /// One Adam update of `params` against `grads` with step size `lr`.
    pub fn step(&mut self, params: &mut NetworkParams, grads: &NetworkParams, lr: f64) -> Result<()> {
        if !params.same_shape(grads) {
            return Err(Error::shape("gradient shapes do not match parameters"));
        }
        self.step_tensors(params.tensors_mut(), grads.tensors(), lr)
    }

    /// Update for a single scalar parameter (one-element state).
    pub fn step_scalar(&mut self, value: &mut f64, grad: f64, lr: f64) -> Result<()> {
        self.step_tensors(vec![std::slice::from_mut(value)], vec![&[grad][..]], lr)
    }

    pub fn step_tensors(&mut self, params: Vec<&mut [f64]>, grads: Vec<&[f64]>, lr: f64) -> Result<()> {
        if params.len() != self.first_moment.len() || grads.len() != params.len() {
            return Err(Error::shape("optimizer state does not match parameter tensors"));
        }
        for (i, g) in grads.iter().enumerate() {
            if g.len() != self.first_moment[i].len() || params[i].len() != g.len() {
                return Err(Error::shape(format!("tensor {i}: optimizer state length mismatch")));
            }
            if let Some(j) = g.iter().position(|v| !v.is_finite()) {
                return Err(Error::numeric(format!(
                    "non-finite gradient in tensor {i} at index {j} (value {})",
                    g[j]
                )));
            }
        }
        self.steps += 1;
        let t = self.steps as i32;
        let bias1 = 1.0 - ADAM_BETA1.powi(t);
        let bias2 = 1.0 - ADAM_BETA2.powi(t);
        for (((p, g), m), v) in params
            .into_iter()
            .zip(grads)
            .zip(&mut self.first_moment)
            .zip(&mut self.second_moment)
        {
            for k in 0..p.len() {
                m[k] = ADAM_BETA1 * m[k] + (1.0 - ADAM_BETA1) * g[k];
                v[k] = ADAM_BETA2 * v[k] + (1.0 - ADAM_BETA2) * g[k] * g[k];
                let m_hat = m[k] / bias1;
                let v_hat = v[k] / bias2;
                p[k] -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
            }
        }
        Ok(())
    }
}
