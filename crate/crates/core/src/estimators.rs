//! Gradient estimators for losses over discrete states.
//!
//! The implicit-MLE estimator couples two MAP calls through a shared noise
//! sample:
//!
//! ```text
//! ∇̂ = (1/S) Σ_i [ MAP(θ + ε_i) − MAP(θ′ + ε_i) ]
//! ```
//!
//! where θ′ comes from a target rule built out of the downstream gradient
//! ∇_z ℓ. Straight-through and score-function estimators plus an exact
//! marginal-difference oracle are provided as baselines, along with the
//! Hamming and regret losses used in solver-supervision settings.

use rand::Rng;

use crate::distribution::ExactOracle;
use crate::error::{check_dim, Error, Result};
use crate::noise::{perturb, NoiseSpec};
use crate::solvers::map;
use crate::space::{State, StateSpace};

/// Recipe mapping (θ, ∇_z ℓ) to target parameters θ′.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TargetRule {
    /// θ′ = θ − λ·∇_z ℓ. The 1/λ factor of the underlying implicit
    /// differentiation view is folded into the learning rate; the estimator
    /// itself never divides by λ.
    Pid { lambda: f64 },
    /// Coordinate-wise rule θ′_i = θ_i where [∇_z ℓ]_i = 0, −[∇_z ℓ]_i
    /// otherwise. The zero test is exact: the losses in scope (Hamming,
    /// regret) produce structurally exact zeros.
    Co,
}

impl TargetRule {
    pub fn pid(lambda: f64) -> Result<Self> {
        if lambda > 0.0 && lambda.is_finite() {
            Ok(Self::Pid { lambda })
        } else {
            Err(Error::InvalidArgument(format!(
                "lambda must be positive and finite, got {lambda}"
            )))
        }
    }

    /// Target parameters θ′ for the downstream gradient `dl_dz`.
    pub fn apply(&self, theta: &[f64], dl_dz: &[f64]) -> Result<Vec<f64>> {
        check_dim(theta.len(), dl_dz.len())?;
        match *self {
            Self::Pid { lambda } => Ok(theta
                .iter()
                .zip(dl_dz)
                .map(|(t, g)| t - lambda * g)
                .collect()),
            Self::Co => co_target(theta, dl_dz),
        }
    }
}

/// The combinatorial-optimization target rule:
/// θ′_i = θ_i if [∇_z ℓ]_i = 0, −[∇_z ℓ]_i otherwise.
pub fn co_target(theta: &[f64], dl_dz: &[f64]) -> Result<Vec<f64>> {
    check_dim(theta.len(), dl_dz.len())?;
    Ok(theta
        .iter()
        .zip(dl_dz)
        .map(|(&t, &g)| if g == 0.0 { t } else { -g })
        .collect())
}

/// Which estimator a harness should run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimatorKind {
    /// Implicit MLE: coupled perturb-and-MAP difference.
    Imle,
    /// Straight-through: downstream gradient passed through unchanged.
    Ste,
    /// Score function (REINFORCE) with faithful samples and exact marginals.
    Sfe,
    /// Exact gradient of the expected loss by enumeration.
    Exact,
}

/// Full estimator configuration as used by the training harnesses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorSpec {
    pub kind: EstimatorKind,
    pub noise: NoiseSpec,
    pub samples: usize,
    pub target: TargetRule,
}

/// Saved context of one forward pass. The backward pass must see the same
/// ε that produced the forward state.
#[derive(Clone, Debug)]
pub struct ForwardSample {
    pub state: State,
    pub epsilon: Vec<f64>,
}

/// A gradient estimate together with the forward state(s) that produced it.
#[derive(Clone, Debug)]
pub struct GradEstimate {
    pub values: Vec<f64>,
    pub samples: Vec<State>,
}

/// Forward pass: ẑ = MAP(θ + ε) with ε ∼ ρ(ε).
pub fn imle_forward<R: Rng + ?Sized>(
    space: &StateSpace,
    theta: &[f64],
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<ForwardSample> {
    check_dim(space.dim(), theta.len())?;
    let epsilon = perturb(theta, noise, rng)?;
    let perturbed: Vec<f64> = theta.iter().zip(&epsilon).map(|(t, e)| t + e).collect();
    let state = map(space, &perturbed)?.state;
    Ok(ForwardSample { state, epsilon })
}

/// Backward pass: ∇̂ = ẑ − MAP(θ′ + ε), reusing the forward ε.
pub fn imle_backward(
    space: &StateSpace,
    theta: &[f64],
    forward: &ForwardSample,
    dl_dz: &[f64],
    target: &TargetRule,
) -> Result<GradEstimate> {
    check_dim(space.dim(), theta.len())?;
    check_dim(theta.len(), forward.epsilon.len())?;
    check_dim(theta.len(), forward.state.len())?;
    check_dim(theta.len(), dl_dz.len())?;
    if dl_dz.iter().any(|g| !g.is_finite()) {
        return Err(Error::InvalidArgument("dl_dz must be finite".into()));
    }
    let theta_prime = target.apply(theta, dl_dz)?;
    let perturbed: Vec<f64> = theta_prime
        .iter()
        .zip(&forward.epsilon)
        .map(|(t, e)| t + e)
        .collect();
    let target_state = map(space, &perturbed)?.state;
    let values: Vec<f64> = forward
        .state
        .as_bits()
        .iter()
        .zip(target_state.as_bits())
        .map(|(&a, &b)| f64::from(a) - f64::from(b))
        .collect();
    Ok(GradEstimate {
        values,
        samples: vec![forward.state.clone()],
    })
}

/// S-sample estimator: averages forward/backward pairs, each sharing its
/// ε_i between the two MAP calls. The downstream gradient is evaluated at
/// each forward sample.
pub fn imle_gradient<R, F>(
    space: &StateSpace,
    theta: &[f64],
    noise: &NoiseSpec,
    samples: usize,
    target: &TargetRule,
    dl_dz_fn: F,
    rng: &mut R,
) -> Result<GradEstimate>
where
    R: Rng + ?Sized,
    F: Fn(&State) -> Vec<f64>,
{
    if samples == 0 {
        return Err(Error::InvalidArgument("sample count must be >= 1".into()));
    }
    let mut acc = vec![0.0; space.dim()];
    let mut used = Vec::with_capacity(samples);
    for _ in 0..samples {
        let fwd = imle_forward(space, theta, noise, rng)?;
        let dl_dz = dl_dz_fn(&fwd.state);
        let single = imle_backward(space, theta, &fwd, &dl_dz, target)?;
        for (a, v) in acc.iter_mut().zip(&single.values) {
            *a += v;
        }
        used.push(fwd.state);
    }
    let scale = 1.0 / samples as f64;
    Ok(GradEstimate {
        values: acc.into_iter().map(|a| a * scale).collect(),
        samples: used,
    })
}

/// Exact MLE gradient μ(θ) − μ(θ′), both by enumeration. Equals the
/// gradient of KL(q‖p) with respect to θ.
pub fn exact_mle_gradient(
    oracle: &ExactOracle,
    theta: &[f64],
    theta_prime: &[f64],
    tau: f64,
) -> Result<Vec<f64>> {
    let mu = oracle.marginals(theta, tau)?;
    let mu_prime = oracle.marginals(theta_prime, tau)?;
    Ok(mu.iter().zip(&mu_prime).map(|(a, b)| a - b).collect())
}

/// Straight-through estimator: the downstream gradient evaluated at
/// ẑ = MAP(θ + ε), passed through with an identity Jacobian.
pub fn ste_gradient<R, F>(
    space: &StateSpace,
    theta: &[f64],
    noise: &NoiseSpec,
    dl_dz_fn: F,
    rng: &mut R,
) -> Result<GradEstimate>
where
    R: Rng + ?Sized,
    F: Fn(&State) -> Vec<f64>,
{
    let fwd = imle_forward(space, theta, noise, rng)?;
    let values = dl_dz_fn(&fwd.state);
    check_dim(theta.len(), values.len())?;
    Ok(GradEstimate {
        values,
        samples: vec![fwd.state],
    })
}

/// Score-function estimator (1/S) Σ ℓ(ẑ_i)·(ẑ_i − μ(θ)) with faithful
/// samples and exact marginals. Requires an enumerable space.
pub fn sfe_gradient<R, F>(
    oracle: &ExactOracle,
    theta: &[f64],
    tau: f64,
    loss_fn: F,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<f64>>
where
    R: Rng + ?Sized,
    F: Fn(&State) -> f64,
{
    if samples == 0 {
        return Err(Error::InvalidArgument("sample count must be >= 1".into()));
    }
    let mu = oracle.marginals(theta, tau)?;
    let mut acc = vec![0.0; mu.len()];
    for _ in 0..samples {
        let z = oracle.sample(theta, tau, rng)?;
        let l = loss_fn(&z);
        for (i, a) in acc.iter_mut().enumerate() {
            let zi = if z.get(i) { 1.0 } else { 0.0 };
            *a += l * (zi - mu[i]);
        }
    }
    let scale = 1.0 / samples as f64;
    Ok(acc.into_iter().map(|a| a * scale).collect())
}

/// Normalized Hamming loss (1/m)·Σ(z_i + y_i − 2·z_i·y_i).
pub fn hamming_loss(z: &State, y: &State) -> Result<f64> {
    check_dim(z.len(), y.len())?;
    let m = z.len() as f64;
    let mismatches = z
        .as_bits()
        .iter()
        .zip(y.as_bits())
        .filter(|(a, b)| a != b)
        .count();
    Ok(mismatches as f64 / m)
}

/// Gradient of the Hamming loss with respect to z: (1 − 2y)/m. Does not
/// depend on z.
pub fn hamming_grad(y: &State) -> Vec<f64> {
    let m = y.len() as f64;
    y.as_bits()
        .iter()
        .map(|&b| (1.0 - 2.0 * f64::from(b)) / m)
        .collect()
}

/// Regret ⟨c, z⟩ − ⟨c, z*⟩ against a minimum-cost state z*. Nonnegative
/// whenever z* is optimal for c; its gradient with respect to z is c.
pub fn regret_loss(z: &State, costs: &[f64], z_star: &State) -> Result<f64> {
    check_dim(z.len(), costs.len())?;
    check_dim(z.len(), z_star.len())?;
    Ok(z.dot(costs) - z_star.dot(costs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::solvers;

    #[test]
    fn co_target_examples() {
        let theta = [1.0, -2.0, 3.0];
        assert_eq!(co_target(&theta, &[0.0, 0.0, 0.0]).unwrap(), theta.to_vec());

        let t = co_target(&[5.0, 5.0], &[-0.5, 0.0]).unwrap();
        assert_eq!(t, vec![0.5, 5.0]);

        // with dl_dz = c (all nonzero): θ′ = −c everywhere
        let c = [1.5, -0.3, 2.0];
        let t = co_target(&theta, &c).unwrap();
        assert_eq!(t, vec![-1.5, 0.3, -2.0]);
    }

    #[test]
    fn pid_target_is_shift_by_lambda() {
        let rule = TargetRule::pid(10.0).unwrap();
        let t = rule.apply(&[1.0, 2.0], &[0.1, -0.2]).unwrap();
        assert_eq!(t, vec![0.0, 4.0]);
        assert!(TargetRule::pid(0.0).is_err());
    }

    #[test]
    fn forward_with_dirac_is_plain_map() {
        let space = StateSpace::k_subset(6, 2).unwrap();
        let theta = [0.3, 2.0, -1.0, 0.9, 1.4, 0.0];
        let mut rng = stream(31, &[0]);
        let fwd = imle_forward(&space, &theta, &NoiseSpec::DiracZero, &mut rng).unwrap();
        assert_eq!(fwd.epsilon, vec![0.0; 6]);
        assert_eq!(fwd.state, solvers::map(&space, &theta).unwrap().state);
    }

    #[test]
    fn forward_stays_on_polytope_and_is_deterministic() {
        let space = StateSpace::k_subset(10, 5).unwrap();
        let theta: Vec<f64> = (0..10).map(|i| (i as f64) * 0.3 - 1.0).collect();
        let noise = NoiseSpec::sum_of_gamma(5, 1.0, 10).unwrap();
        let a = imle_forward(&space, &theta, &noise, &mut stream(31, &[1])).unwrap();
        let b = imle_forward(&space, &theta, &noise, &mut stream(31, &[1])).unwrap();
        assert_eq!(a.state.count_ones(), 5);
        assert_eq!(a.state, b.state);
        assert_eq!(a.epsilon, b.epsilon);
    }

    #[test]
    fn zero_downstream_gradient_gives_exactly_zero() {
        // θ′ = θ, and the backward pass reuses the forward ε, so the two MAP
        // calls coincide.
        let space = StateSpace::k_subset(8, 3).unwrap();
        let theta: Vec<f64> = (0..8).map(|i| (i as f64 * 0.7).sin()).collect();
        let noise = NoiseSpec::gumbel(1.0).unwrap();
        let rule = TargetRule::pid(50.0).unwrap();
        let mut rng = stream(31, &[2]);
        let fwd = imle_forward(&space, &theta, &noise, &mut rng).unwrap();
        let grad = imle_backward(&space, &theta, &fwd, &[0.0; 8], &rule).unwrap();
        assert_eq!(grad.values, vec![0.0; 8]);
    }

    #[test]
    fn mismatched_epsilon_is_distinguishable() {
        // with a decoupled ε the two MAP calls disagree for some seed even
        // though dl_dz = 0
        let space = StateSpace::k_subset(8, 3).unwrap();
        let theta: Vec<f64> = (0..8).map(|i| (i as f64 * 0.7).sin()).collect();
        let noise = NoiseSpec::gumbel(1.0).unwrap();
        let rule = TargetRule::pid(50.0).unwrap();
        let mut found_nonzero = false;
        for seed in 0..20 {
            let mut rng = stream(32, &[seed]);
            let fwd = imle_forward(&space, &theta, &noise, &mut rng).unwrap();
            let other = imle_forward(&space, &theta, &noise, &mut rng).unwrap();
            let mismatched = ForwardSample {
                state: fwd.state.clone(),
                epsilon: other.epsilon,
            };
            let grad = imle_backward(&space, &theta, &mismatched, &[0.0; 8], &rule).unwrap();
            if grad.values.iter().any(|&v| v != 0.0) {
                found_nonzero = true;
                break;
            }
        }
        assert!(found_nonzero);
    }

    #[test]
    fn perceptron_identity_on_k_subset() {
        // Hamming loss + CO target + δ₀ noise collapses to MAP(θ) − y
        let space = StateSpace::k_subset(5, 2).unwrap();
        let theta = [0.4, -0.1, 0.9, 0.2, -0.5];
        let y = State::from_indices(5, &[1, 3]);
        let mut rng = stream(33, &[0]);
        let fwd = imle_forward(&space, &theta, &NoiseSpec::DiracZero, &mut rng).unwrap();
        let grad = imle_backward(&space, &theta, &fwd, &hamming_grad(&y), &TargetRule::Co).unwrap();
        let map_state = solvers::map(&space, &theta).unwrap().state;
        let expect: Vec<f64> = map_state
            .as_bits()
            .iter()
            .zip(y.as_bits())
            .map(|(&a, &b)| f64::from(a) - f64::from(b))
            .collect();
        assert_eq!(grad.values, expect);
    }

    #[test]
    fn single_sample_estimates_are_ternary() {
        let space = StateSpace::k_subset(8, 3).unwrap();
        let noise = NoiseSpec::sum_of_gamma(3, 1.0, 10).unwrap();
        let rule = TargetRule::pid(5.0).unwrap();
        let mut rng = stream(33, &[1]);
        let theta: Vec<f64> = (0..8).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
        let b: Vec<f64> = (0..8).map(|_| rng.gen::<f64>()).collect();
        for _ in 0..50 {
            let grad = imle_gradient(
                &space,
                &theta,
                &noise,
                1,
                &rule,
                |z| z.as_bits().iter().zip(&b).map(|(&zi, bi)| 2.0 * (f64::from(zi) - bi)).collect(),
                &mut rng,
            )
            .unwrap();
            for v in grad.values {
                assert!(v == -1.0 || v == 0.0 || v == 1.0, "got {v}");
            }
        }
    }

    #[test]
    fn k_subset_gradient_coordinates_sum_to_zero() {
        let space = StateSpace::k_subset(6, 3).unwrap();
        let noise = NoiseSpec::gumbel(1.0).unwrap();
        let rule = TargetRule::pid(3.0).unwrap();
        let mut rng = stream(33, &[2]);
        let theta: Vec<f64> = (0..6).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let g: Vec<f64> = (0..6).map(|_| rng.gen::<f64>() - 0.5).collect();
        for samples in [1usize, 7, 100] {
            let grad =
                imle_gradient(&space, &theta, &noise, samples, &rule, |_| g.clone(), &mut rng)
                    .unwrap();
            assert!(grad.values.iter().sum::<f64>().abs() < 1e-9);
            // averaged differences of binary states stay in [−1, 1]
            assert!(grad.values.iter().all(|v| (-1.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn imle_mean_matches_exact_marginal_difference() {
        // constant downstream gradient: the S-sample estimate approaches
        // μ(θ) − μ(θ′) in sign on every clearly nonzero coordinate
        let space = StateSpace::k_subset(6, 3).unwrap();
        let oracle = ExactOracle::new(space).unwrap();
        let theta = [0.8, -0.6, 0.2, 1.1, -0.9, 0.4];
        let g = [0.9, -1.1, 0.7, -0.8, 1.2, -0.6];
        let lambda = 2.0;
        let rule = TargetRule::pid(lambda).unwrap();
        let noise = NoiseSpec::sum_of_gamma(3, 1.0, 10).unwrap();
        let theta_prime = rule.apply(&theta, &g).unwrap();
        let exact = exact_mle_gradient(&oracle, &theta, &theta_prime, 1.0).unwrap();

        let mut rng = stream(33, &[3]);
        let est = imle_gradient(&space, &theta, &noise, 1000, &rule, |_| g.to_vec(), &mut rng)
            .unwrap();
        let mut checked = 0;
        let mut matched = 0;
        for (e, v) in exact.iter().zip(&est.values) {
            if e.abs() > 0.05 {
                checked += 1;
                if e.signum() == v.signum() {
                    matched += 1;
                }
            }
        }
        assert!(checked > 0);
        assert!(
            matched as f64 >= 0.9 * checked as f64,
            "{matched}/{checked} signs matched"
        );
    }

    #[test]
    fn exact_mle_gradient_examples() {
        let oracle = ExactOracle::new(StateSpace::categorical(3).unwrap()).unwrap();
        let zero = exact_mle_gradient(&oracle, &[0.3, 0.1, -0.2], &[0.3, 0.1, -0.2], 1.0).unwrap();
        assert_eq!(zero, vec![0.0; 3]);

        let g = exact_mle_gradient(&oracle, &[0.0; 3], &[0.0, 0.0, 50.0], 1.0).unwrap();
        let want = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0 - 1.0];
        for (got, want) in g.iter().zip(want) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn exact_mle_gradient_matches_kl_finite_differences() {
        let space = StateSpace::k_subset(6, 3).unwrap();
        let oracle = ExactOracle::new(space).unwrap();
        let mut rng = stream(34, &[0]);
        let theta: Vec<f64> = (0..6).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let theta_prime: Vec<f64> = (0..6).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let grad = exact_mle_gradient(&oracle, &theta, &theta_prime, 1.0).unwrap();

        let kl = |t: &[f64]| -> f64 {
            let p = oracle.probabilities(t, 1.0).unwrap();
            let q = oracle.probabilities(&theta_prime, 1.0).unwrap();
            q.iter()
                .zip(&p)
                .filter(|(qi, _)| **qi > 0.0)
                .map(|(qi, pi)| qi * (qi.ln() - pi.ln()))
                .sum()
        };
        let h = 1e-5;
        for i in 0..6 {
            let mut plus = theta.clone();
            let mut minus = theta.clone();
            plus[i] += h;
            minus[i] -= h;
            let fd = (kl(&plus) - kl(&minus)) / (2.0 * h);
            assert!((fd - grad[i]).abs() < 1e-5, "coord {i}: {fd} vs {}", grad[i]);
        }
    }

    #[test]
    fn ste_passes_gradient_through() {
        let space = StateSpace::k_subset(4, 2).unwrap();
        let noise = NoiseSpec::gumbel(1.0).unwrap();
        let g = vec![0.5, -1.0, 0.25, 2.0];
        for seed in 0..5 {
            let mut rng = stream(35, &[seed]);
            let grad = ste_gradient(&space, &[0.0; 4], &noise, |_| g.clone(), &mut rng).unwrap();
            assert_eq!(grad.values, g);
        }
    }

    #[test]
    fn ste_toy_loss_is_shifted_state() {
        let space = StateSpace::k_subset(4, 2).unwrap();
        let b = [0.2, 0.4, 0.6, 0.8];
        let mut rng = stream(35, &[9]);
        let grad = ste_gradient(
            &space,
            &[0.1, 0.9, -0.4, 0.3],
            &NoiseSpec::DiracZero,
            |z| z.as_bits().iter().zip(&b).map(|(&zi, bi)| 2.0 * (f64::from(zi) - bi)).collect(),
            &mut rng,
        )
        .unwrap();
        let z = grad.samples[0].clone();
        let expect: Vec<f64> = z
            .as_bits()
            .iter()
            .zip(&b)
            .map(|(&zi, bi)| 2.0 * (f64::from(zi) - bi))
            .collect();
        assert_eq!(grad.values, expect);
    }

    #[test]
    fn sfe_constant_loss_has_small_norm() {
        let space = StateSpace::k_subset(6, 3).unwrap();
        let oracle = ExactOracle::new(space).unwrap();
        let mut rng = stream(36, &[0]);
        let theta: Vec<f64> = (0..6).map(|_| rng.gen::<f64>() - 0.5).collect();
        let c = 3.0;
        let grad = sfe_gradient(&oracle, &theta, 1.0, |_| c, 100_000, &mut rng).unwrap();
        let norm = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm < 0.05 * c, "norm {norm}");
    }

    #[test]
    fn sfe_single_sample_unit_loss_is_centered_state() {
        let space = StateSpace::k_subset(4, 2).unwrap();
        let oracle = ExactOracle::new(space).unwrap();
        let theta = [0.3, -0.2, 0.8, 0.1];
        let mu = oracle.marginals(&theta, 1.0).unwrap();
        let mut probe = stream(36, &[1]);
        let z = oracle.sample(&theta, 1.0, &mut probe).unwrap();
        let mut rng = stream(36, &[1]);
        let grad = sfe_gradient(&oracle, &theta, 1.0, |_| 1.0, 1, &mut rng).unwrap();
        for (i, g) in grad.iter().enumerate() {
            let zi = if z.get(i) { 1.0 } else { 0.0 };
            assert!((g - (zi - mu[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn sfe_matches_enumeration_gradient() {
        let space = StateSpace::k_subset(6, 3).unwrap();
        let oracle = ExactOracle::new(space).unwrap();
        let mut rng = stream(36, &[2]);
        let theta: Vec<f64> = (0..6).map(|_| rng.gen::<f64>() - 0.5).collect();
        let b: Vec<f64> = (0..6).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let loss = |z: &State| -> f64 {
            z.as_bits()
                .iter()
                .zip(&b)
                .map(|(&zi, bi)| (f64::from(zi) - bi).powi(2))
                .sum()
        };

        let est = sfe_gradient(&oracle, &theta, 1.0, loss, 100_000, &mut rng).unwrap();

        // independent oracle: central differences of the enumerated E[ℓ]
        let h = 1e-5;
        for i in 0..6 {
            let mut plus = theta.clone();
            let mut minus = theta.clone();
            plus[i] += h;
            minus[i] -= h;
            let fd = (oracle.expected_loss(&plus, 1.0, loss).unwrap()
                - oracle.expected_loss(&minus, 1.0, loss).unwrap())
                / (2.0 * h);
            assert!((est[i] - fd).abs() < 0.05, "coord {i}: {} vs {fd}", est[i]);
        }
    }

    #[test]
    fn hamming_examples() {
        let z = State::from_bits(vec![1, 0, 1]).unwrap();
        let y = State::from_bits(vec![0, 0, 1]).unwrap();
        assert_eq!(hamming_loss(&z, &z).unwrap(), 0.0);
        assert!((hamming_loss(&z, &y).unwrap() - 1.0 / 3.0).abs() < 1e-15);

        let grad = hamming_grad(&State::from_bits(vec![1, 0]).unwrap());
        assert_eq!(grad, vec![-0.5, 0.5]);

        let short = State::from_bits(vec![1]).unwrap();
        assert!(hamming_loss(&z, &short).is_err());
    }

    #[test]
    fn regret_examples() {
        let z_star = State::from_bits(vec![1, 0, 0]).unwrap();
        let z = State::from_bits(vec![0, 0, 1]).unwrap();
        let c = [1.0, 2.0, 3.0];
        assert_eq!(regret_loss(&z_star, &c, &z_star).unwrap(), 0.0);
        assert_eq!(regret_loss(&z, &c, &z_star).unwrap(), 2.0);
    }

    #[test]
    fn regret_is_nonnegative_against_oracle_optimum() {
        let space = StateSpace::k_subset(6, 2).unwrap();
        let oracle = ExactOracle::new(space).unwrap();
        let mut rng = stream(37, &[0]);
        for _ in 0..100 {
            let c: Vec<f64> = (0..6).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
            let neg_c: Vec<f64> = c.iter().map(|x| -x).collect();
            let z_star = solvers::map(&space, &neg_c).unwrap().state;
            let idx = rng.gen_range(0..oracle.states().len());
            let z = oracle.states()[idx].clone();
            assert!(regret_loss(&z, &c, &z_star).unwrap() >= -1e-12);
        }
    }
}
