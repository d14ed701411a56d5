//! Constrained discrete exponential families:
//!
//! ```text
//! p(z; θ) = exp(⟨z, θ⟩/τ − A(θ))   for z ∈ C,   0 otherwise
//! ```
//!
//! [`ExactOracle`] enumerates `C` once and provides the log-partition,
//! probabilities, marginals and faithful inverse-CDF sampling — the
//! brute-force ground truth everything else is verified against.
//! [`marginals_pam`] is the perturb-and-MAP approximation that scales past
//! enumerable spaces.

use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::noise::{perturb, NoiseSpec};
use crate::solvers::map;
use crate::space::{State, StateSpace};

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tau must be positive and finite, got {tau}")))
    }
}

fn check_theta(theta: &[f64], dim: usize) -> Result<()> {
    check_dim(dim, theta.len())?;
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("theta must be finite".into()));
    }
    Ok(())
}

/// Exhaustive oracle over an enumerable state space. Construction fails
/// with an enumeration error when `|C|` exceeds the cap, so code holding an
/// `ExactOracle` can assume tractability.
#[derive(Clone, Debug)]
pub struct ExactOracle {
    space: StateSpace,
    states: Vec<State>,
}

impl ExactOracle {
    pub fn new(space: StateSpace) -> Result<Self> {
        let states = space.enumerate()?;
        Ok(Self { space, states })
    }

    pub fn with_cap(space: StateSpace, cap: usize) -> Result<Self> {
        let states = space.enumerate_capped(cap)?;
        Ok(Self { space, states })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    /// All states of `C` in lexicographic order.
    pub fn states(&self) -> &[State] {
        &self.states
    }

    fn scaled_weights(&self, theta: &[f64], tau: f64) -> Result<Vec<f64>> {
        check_theta(theta, self.space.dim())?;
        check_tau(tau)?;
        Ok(self.states.iter().map(|z| z.dot(theta) / tau).collect())
    }

    /// Log-partition A(θ) = log Σ_{z∈C} exp(⟨z,θ⟩/τ), computed as a
    /// max-stabilized log-sum-exp (θ entries up to ±50 must survive).
    pub fn log_partition(&self, theta: &[f64], tau: f64) -> Result<f64> {
        let w = self.scaled_weights(theta, tau)?;
        Ok(log_sum_exp(&w))
    }

    /// Probability of every state, aligned with [`Self::states`].
    pub fn probabilities(&self, theta: &[f64], tau: f64) -> Result<Vec<f64>> {
        let w = self.scaled_weights(theta, tau)?;
        Ok(softmax(&w))
    }

    /// Probability of `z`; exactly 0 for z ∉ C.
    pub fn pmf(&self, z: &State, theta: &[f64], tau: f64) -> Result<f64> {
        if z.len() != self.space.dim() {
            return Ok(0.0);
        }
        match self.states.binary_search(z) {
            Err(_) => Ok(0.0),
            Ok(idx) => Ok(self.probabilities(theta, tau)?[idx]),
        }
    }

    /// Marginals μ(θ) = E\[ẑ\] = Σ_z p(z)·z.
    pub fn marginals(&self, theta: &[f64], tau: f64) -> Result<Vec<f64>> {
        let probs = self.probabilities(theta, tau)?;
        let mut mu = vec![0.0; self.space.dim()];
        for (z, p) in self.states.iter().zip(&probs) {
            for i in z.iter_ones() {
                mu[i] += p;
            }
        }
        Ok(mu)
    }

    /// Faithful sample via inverse CDF over the enumeration order.
    pub fn sample<R: Rng + ?Sized>(&self, theta: &[f64], tau: f64, rng: &mut R) -> Result<State> {
        let probs = self.probabilities(theta, tau)?;
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (z, p) in self.states.iter().zip(&probs) {
            acc += p;
            if u < acc {
                return Ok(z.clone());
            }
        }
        Ok(self.states.last().expect("non-empty state space").clone())
    }

    /// Exact expected loss E_{z∼p}\[ℓ(z)\] by enumeration.
    pub fn expected_loss<F>(&self, theta: &[f64], tau: f64, loss: F) -> Result<f64>
    where
        F: Fn(&State) -> f64,
    {
        let probs = self.probabilities(theta, tau)?;
        Ok(self
            .states
            .iter()
            .zip(&probs)
            .map(|(z, p)| p * loss(z))
            .sum())
    }

    /// Exact gradient ∇_θ E\[ℓ\] = Σ_z ℓ(z) p(z) (z − μ)/τ by enumeration.
    pub fn expected_loss_gradient<F>(&self, theta: &[f64], tau: f64, loss: F) -> Result<Vec<f64>>
    where
        F: Fn(&State) -> f64,
    {
        let probs = self.probabilities(theta, tau)?;
        let mu = {
            let mut mu = vec![0.0; self.space.dim()];
            for (z, p) in self.states.iter().zip(&probs) {
                for i in z.iter_ones() {
                    mu[i] += p;
                }
            }
            mu
        };
        let mut grad = vec![0.0; self.space.dim()];
        for (z, p) in self.states.iter().zip(&probs) {
            let scale = p * loss(z) / tau;
            for (i, g) in grad.iter_mut().enumerate() {
                let zi = if z.get(i) { 1.0 } else { 0.0 };
                *g += scale * (zi - mu[i]);
            }
        }
        Ok(grad)
    }
}

fn log_sum_exp(w: &[f64]) -> f64 {
    let max = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + w.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

fn softmax(w: &[f64]) -> Vec<f64> {
    let max = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = w.iter().map(|x| (x - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Perturb-and-MAP marginal estimate: (1/S) Σ_i MAP(θ + ε_i), ε_i ∼ ρ(ε).
/// Every summand is a valid state of `C`, so the estimate stays inside the
/// polytope.
pub fn marginals_pam<R: Rng + ?Sized>(
    space: &StateSpace,
    theta: &[f64],
    noise: &NoiseSpec,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_theta(theta, space.dim())?;
    if samples == 0 {
        return Err(Error::InvalidArgument("sample count must be >= 1".into()));
    }
    let mut counts = vec![0u64; space.dim()];
    for _ in 0..samples {
        let eps = perturb(theta, noise, rng)?;
        let perturbed: Vec<f64> = theta.iter().zip(&eps).map(|(t, e)| t + e).collect();
        let z = map(space, &perturbed)?.state;
        for i in z.iter_ones() {
            counts[i] += 1;
        }
    }
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / samples as f64)
        .collect())
}
