//! Desk-scale training loops: gradient-based optimization of an expected
//! loss over a tractable k-subset distribution, hyperparameter sensitivity
//! grids, and conditional shortest-path learning with a linear upstream
//! model.
//!
//! Reported losses always come from the exact enumeration oracle;
//! estimators only drive the updates, never the measurement.

use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::distribution::ExactOracle;
use crate::error::{Error, Result};
use crate::estimators::{
    hamming_grad, hamming_loss, imle_backward, imle_forward, regret_loss, sfe_gradient,
    ste_gradient, EstimatorKind, EstimatorSpec, TargetRule,
};
use crate::noise::NoiseSpec;
use crate::rng::stream;
use crate::solvers::{map, map_grid_path};
use crate::space::{State, StateSpace};

/// Default perturbation-intensity grid for the sensitivity sweep.
pub const DEFAULT_LAMBDA_GRID: [f64; 5] = [1.0, 3.0, 10.0, 30.0, 100.0];

/// Default learning-rate grid for the sensitivity sweep.
pub const DEFAULT_LR_GRID: [f64; 5] = [0.01, 0.03, 0.1, 0.3, 1.0];

/// SGD-with-momentum settings shared by the harnesses. For the path
/// harness `steps` counts epochs over the dataset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SgdConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub steps: usize,
    pub runs: usize,
    pub seed: u64,
}

impl SgdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate < 0.0 || !self.learning_rate.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "learning_rate must be >= 0 and finite, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidArgument(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        // steps = 0 is allowed: it runs no updates and leaves parameters
        // at their initialization
        if self.runs == 0 {
            return Err(Error::InvalidArgument("runs must be >= 1".into()));
        }
        Ok(())
    }
}

/// One momentum step: v ← momentum·v + g; params ← params − lr·v.
pub fn sgd_step(
    params: &mut [f64],
    velocity: &mut [f64],
    grad: &[f64],
    learning_rate: f64,
    momentum: f64,
) {
    debug_assert_eq!(params.len(), grad.len());
    debug_assert_eq!(params.len(), velocity.len());
    for i in 0..params.len() {
        velocity[i] = momentum * velocity[i] + grad[i];
        params[i] -= learning_rate * velocity[i];
    }
}

/// Unconditional synthetic problem: minimize L(θ) = E_{ẑ∼p(·;θ)}[‖ẑ − b‖²]
/// over a k-subset distribution, with b drawn once and frozen.
#[derive(Clone, Debug)]
pub struct ToyProblem {
    pub m: usize,
    pub k: usize,
    pub b: Vec<f64>,
    pub estimator: EstimatorSpec,
}

impl ToyProblem {
    /// Draws the target vector b ∼ N(0, I) from its own seed, once.
    pub fn new(m: usize, k: usize, estimator: EstimatorSpec, target_seed: u64) -> Result<Self> {
        StateSpace::k_subset(m, k)?;
        let mut rng = stream(target_seed, &[0xb]);
        let b: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        Ok(Self { m, k, b, estimator })
    }

    fn loss_of(&self, z: &State) -> f64 {
        z.as_bits()
            .iter()
            .zip(&self.b)
            .map(|(&zi, bi)| (f64::from(zi) - bi).powi(2))
            .sum()
    }

    fn dl_dz(&self, z: &State) -> Vec<f64> {
        z.as_bits()
            .iter()
            .zip(&self.b)
            .map(|(&zi, bi)| 2.0 * (f64::from(zi) - bi))
            .collect()
    }
}

/// Per-run record: exact L(θ) after every update step.
#[derive(Clone, Debug)]
pub struct RunTrace {
    pub losses: Vec<f64>,
    pub wall_clock_s: f64,
}

impl RunTrace {
    /// Loss after the last update step; panics on a zero-step trace.
    pub fn final_loss(&self) -> f64 {
        *self.losses.last().expect("non-empty trace")
    }
}

/// Run `cfg.runs` independent optimizations of the toy problem, θ
/// initialized to 0 each run, recording the exact loss per step.
pub fn run_toy(problem: &ToyProblem, cfg: &SgdConfig) -> Result<Vec<RunTrace>> {
    cfg.validate()?;
    let space = StateSpace::k_subset(problem.m, problem.k)?;
    let oracle = ExactOracle::new(space)?;
    (0..cfg.runs)
        .into_par_iter()
        .map(|run| toy_single_run(problem, cfg, &space, &oracle, &[0x70, run as u64]))
        .collect()
}

fn toy_single_run(
    problem: &ToyProblem,
    cfg: &SgdConfig,
    space: &StateSpace,
    oracle: &ExactOracle,
    rng_tags: &[u64],
) -> Result<RunTrace> {
    let start = Instant::now();
    let mut rng = stream(cfg.seed, rng_tags);
    let est = &problem.estimator;
    let tau = 1.0;
    let mut theta = vec![0.0; problem.m];
    let mut velocity = vec![0.0; problem.m];
    let mut losses = Vec::with_capacity(cfg.steps);

    for _ in 0..cfg.steps {
        let grad = match est.kind {
            EstimatorKind::Imle => crate::estimators::imle_gradient(
                space,
                &theta,
                &est.noise,
                est.samples,
                &est.target,
                |z| problem.dl_dz(z),
                &mut rng,
            )?
            .values,
            EstimatorKind::Ste => {
                ste_gradient(space, &theta, &est.noise, |z| problem.dl_dz(z), &mut rng)?.values
            }
            EstimatorKind::Sfe => sfe_gradient(
                oracle,
                &theta,
                tau,
                |z| problem.loss_of(z),
                est.samples,
                &mut rng,
            )?,
            EstimatorKind::Exact => {
                oracle.expected_loss_gradient(&theta, tau, |z| problem.loss_of(z))?
            }
        };
        sgd_step(&mut theta, &mut velocity, &grad, cfg.learning_rate, cfg.momentum);
        losses.push(oracle.expected_loss(&theta, tau, |z| problem.loss_of(z))?);
    }

    Ok(RunTrace { losses, wall_clock_s: start.elapsed().as_secs_f64() })
}

/// Mean and standard deviation of the final loss over the runs of a cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellStat {
    pub mean: f64,
    pub std: f64,
}

/// Results of the λ × learning-rate sensitivity sweep for two noise arms.
#[derive(Clone, Debug)]
pub struct SensitivityGrid {
    pub lambdas: Vec<f64>,
    pub lrs: Vec<f64>,
    /// Final-loss statistics per (λ, lr) cell for the first noise arm.
    pub arm_a: Vec<Vec<CellStat>>,
    pub arm_b: Vec<Vec<CellStat>>,
    /// mean(arm_a) − mean(arm_b) per cell; negative means arm a wins.
    pub diff: Vec<Vec<f64>>,
}

/// Sweep the single-sample estimator of `problem` over a (λ, lr) grid for
/// two noise distributions, reusing the same frozen target b. The
/// estimator kind must be the coupled perturb-and-MAP one; its target rule
/// is replaced by PID(λ) per cell and its noise by the per-arm spec.
pub fn run_sensitivity_grid(
    problem: &ToyProblem,
    noise_a: &NoiseSpec,
    noise_b: &NoiseSpec,
    lambdas: &[f64],
    lrs: &[f64],
    cfg: &SgdConfig,
) -> Result<SensitivityGrid> {
    cfg.validate()?;
    if problem.estimator.kind != EstimatorKind::Imle {
        return Err(Error::InvalidArgument(
            "sensitivity grid sweeps the implicit-MLE estimator".into(),
        ));
    }
    if lambdas.is_empty() || lrs.is_empty() {
        return Err(Error::InvalidArgument("lambda and lr grids must be non-empty".into()));
    }
    let space = StateSpace::k_subset(problem.m, problem.k)?;
    let oracle = ExactOracle::new(space)?;

    // Both arms share per-(cell, run) streams: identical noise specs give
    // identical trajectories, and differing specs are compared under common
    // random numbers.
    let run_arm = |noise: &NoiseSpec| -> Result<Vec<Vec<CellStat>>> {
        lambdas
            .par_iter()
            .enumerate()
            .map(|(i, &lambda)| {
                lrs.iter()
                    .enumerate()
                    .map(|(j, &lr)| {
                        let mut cell_problem = problem.clone();
                        cell_problem.estimator.noise = *noise;
                        cell_problem.estimator.target = TargetRule::pid(lambda)?;
                        let cell_cfg = SgdConfig { learning_rate: lr, ..*cfg };
                        let finals: Vec<f64> = (0..cfg.runs)
                            .into_par_iter()
                            .map(|run| {
                                toy_single_run(
                                    &cell_problem,
                                    &cell_cfg,
                                    &space,
                                    &oracle,
                                    &[i as u64, j as u64, run as u64],
                                )
                                .map(|t| t.final_loss())
                            })
                            .collect::<Result<_>>()?;
                        let n = finals.len() as f64;
                        let mean = finals.iter().sum::<f64>() / n;
                        let var = if finals.len() > 1 {
                            finals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
                        } else {
                            0.0
                        };
                        Ok(CellStat { mean, std: var.sqrt() })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect()
    };

    let arm_a = run_arm(noise_a)?;
    let arm_b = run_arm(noise_b)?;
    let diff = arm_a
        .iter()
        .zip(&arm_b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a.mean - b.mean).collect())
        .collect();
    Ok(SensitivityGrid {
        lambdas: lambdas.to_vec(),
        lrs: lrs.to_vec(),
        arm_a,
        arm_b,
        diff,
    })
}

/// One supervised shortest-path instance: per-cell features, the hidden
/// true costs, and the optimal path under those costs.
#[derive(Clone, Debug)]
pub struct PathExample {
    /// Row-major per-cell feature vectors, `grid_size²` rows of length `d`.
    pub features: Vec<Vec<f64>>,
    pub true_costs: Vec<f64>,
    pub y_star: State,
}

#[derive(Clone, Debug)]
pub struct PathDataset {
    pub grid_size: usize,
    pub feature_dim: usize,
    pub examples: Vec<PathExample>,
}

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

/// Synthetic K×K dataset: cell features are standard normal, true costs
/// come from a hidden linear model through a softplus (so they stay
/// positive), and labels are solver-optimal paths. Deterministic under
/// `seed`.
pub fn gen_path_dataset(
    grid_size: usize,
    n_examples: usize,
    feature_dim: usize,
    seed: u64,
) -> Result<PathDataset> {
    if grid_size < 2 {
        return Err(Error::InvalidArgument("grid_size must be >= 2".into()));
    }
    if feature_dim < 2 {
        return Err(Error::InvalidArgument("feature_dim must be >= 2".into()));
    }
    if n_examples == 0 {
        return Err(Error::InvalidArgument("n_examples must be >= 1".into()));
    }
    let cells = grid_size * grid_size;
    let mut truth_rng = stream(seed, &[0]);
    let scale = 2.0 / (feature_dim as f64).sqrt();
    let w_star: Vec<f64> = (0..feature_dim)
        .map(|_| rng_normal(&mut truth_rng) * scale)
        .collect();
    let b_star = 1.0;

    let examples = (0..n_examples)
        .map(|idx| {
            let mut rng = stream(seed, &[1, idx as u64]);
            let features: Vec<Vec<f64>> = (0..cells)
                .map(|_| (0..feature_dim).map(|_| rng_normal(&mut rng)).collect())
                .collect();
            let true_costs: Vec<f64> = features
                .iter()
                .map(|x| softplus(dot(&w_star, x) + b_star))
                .collect();
            let y_star = map_grid_path(grid_size, grid_size, &true_costs)?.state;
            Ok(PathExample { features, true_costs, y_star })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(PathDataset { grid_size, feature_dim, examples })
}

fn rng_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Per-cell linear map realizing θ = h(x): θ_cell = ⟨w, x_cell⟩ + bias.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearModel {
    pub fn zeros(feature_dim: usize) -> Self {
        Self { weights: vec![0.0; feature_dim], bias: 0.0 }
    }

    /// Distribution parameters for one example (negated predicted costs).
    pub fn theta(&self, example: &PathExample) -> Vec<f64> {
        example
            .features
            .iter()
            .map(|x| dot(&self.weights, x) + self.bias)
            .collect()
    }
}

/// Supervision mode for path training.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathLoss {
    /// Per-cell Hamming distance to the optimal path; needs only y*.
    Hamming,
    /// Regret against the optimal cost; needs the true cost coefficients.
    Regret,
}

/// Per-epoch record of the path harness.
#[derive(Clone, Debug)]
pub struct PathTrace {
    pub accuracy: Vec<f64>,
    pub mean_loss: Vec<f64>,
    pub wall_clock_s: f64,
}

/// Train the linear model with the coupled perturb-and-MAP estimator,
/// back-propagating ∇̂_θ through the per-cell linear map
/// (∇_w = Σ_cell ∇̂_cell·x_cell, ∇_bias = Σ_cell ∇̂_cell).
/// `cfg.steps` counts epochs; examples are visited in dataset order.
pub fn train_path_model(
    dataset: &PathDataset,
    estimator: &EstimatorSpec,
    loss: PathLoss,
    cfg: &SgdConfig,
) -> Result<(LinearModel, PathTrace)> {
    cfg.validate()?;
    if estimator.kind != EstimatorKind::Imle {
        return Err(Error::InvalidArgument(
            "path training drives updates through the implicit-MLE estimator".into(),
        ));
    }
    let start = Instant::now();
    let space = StateSpace::grid_path(dataset.grid_size, dataset.grid_size)?;
    let d = dataset.feature_dim;
    let mut model = LinearModel::zeros(d);
    let mut velocity = vec![0.0; d + 1];
    let mut rng = stream(cfg.seed, &[0x9a7]);
    let mut accuracy = Vec::with_capacity(cfg.steps);
    let mut mean_loss = Vec::with_capacity(cfg.steps);

    for _ in 0..cfg.steps {
        for example in &dataset.examples {
            let theta = model.theta(example);
            let fwd = imle_forward(&space, &theta, &estimator.noise, &mut rng)?;
            let dl_dz = match loss {
                PathLoss::Hamming => hamming_grad(&example.y_star),
                PathLoss::Regret => example.true_costs.clone(),
            };
            let grad_theta =
                imle_backward(&space, &theta, &fwd, &dl_dz, &estimator.target)?.values;

            let mut grad = vec![0.0; d + 1];
            for (cell, g) in grad_theta.iter().enumerate() {
                if *g != 0.0 {
                    for (j, x) in example.features[cell].iter().enumerate() {
                        grad[j] += g * x;
                    }
                    grad[d] += g;
                }
            }
            let mut params: Vec<f64> = model.weights.clone();
            params.push(model.bias);
            sgd_step(&mut params, &mut velocity, &grad, cfg.learning_rate, cfg.momentum);
            model.bias = params.pop().expect("bias");
            model.weights = params;
        }
        accuracy.push(path_accuracy(&model, dataset)?);
        mean_loss.push(mean_path_loss(&model, dataset, loss)?);
    }

    let trace = PathTrace { accuracy, mean_loss, wall_clock_s: start.elapsed().as_secs_f64() };
    Ok((model, trace))
}

fn mean_path_loss(model: &LinearModel, dataset: &PathDataset, loss: PathLoss) -> Result<f64> {
    let space = StateSpace::grid_path(dataset.grid_size, dataset.grid_size)?;
    let mut total = 0.0;
    for example in &dataset.examples {
        let z = map(&space, &model.theta(example))?.state;
        total += match loss {
            PathLoss::Hamming => hamming_loss(&z, &example.y_star)?,
            PathLoss::Regret => {
                // read the optimum only through the solver on the costs
                let neg_c: Vec<f64> = example.true_costs.iter().map(|c| -c).collect();
                let z_star = map(&space, &neg_c)?.state;
                regret_loss(&z, &example.true_costs, &z_star)?
            }
        };
    }
    Ok(total / dataset.examples.len() as f64)
}

/// Fraction of examples whose predicted path has optimal true cost.
/// Cost equality, not path identity: distinct paths of equal true cost
/// both count.
pub fn path_accuracy(model: &LinearModel, dataset: &PathDataset) -> Result<f64> {
    let space = StateSpace::grid_path(dataset.grid_size, dataset.grid_size)?;
    let mut optimal = 0usize;
    for example in &dataset.examples {
        let z = map(&space, &model.theta(example))?.state;
        let predicted_cost = z.dot(&example.true_costs);
        let optimal_cost = example.y_star.dot(&example.true_costs);
        if predicted_cost <= optimal_cost + 1e-9 * optimal_cost.abs().max(1.0) {
            optimal += 1;
        }
    }
    Ok(optimal as f64 / dataset.examples.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_estimator(kind: EstimatorKind) -> EstimatorSpec {
        EstimatorSpec {
            kind,
            noise: NoiseSpec::sum_of_gamma(1, 5.0, 10).unwrap(),
            samples: 1,
            target: TargetRule::pid(10.0).unwrap(),
        }
    }

    #[test]
    fn sgd_vanilla_step() {
        let mut params = vec![1.0, 2.0];
        let mut velocity = vec![0.0, 0.0];
        sgd_step(&mut params, &mut velocity, &[0.5, -1.0], 1.0, 0.0);
        assert_eq!(params, vec![0.5, 3.0]);
    }

    #[test]
    fn sgd_zero_gradient_is_a_fixed_point() {
        let mut params = vec![1.0, 2.0];
        let mut velocity = vec![0.0, 0.0];
        for _ in 0..5 {
            sgd_step(&mut params, &mut velocity, &[0.0, 0.0], 0.3, 0.9);
        }
        assert_eq!(params, vec![1.0, 2.0]);
    }

    #[test]
    fn sgd_momentum_two_step_displacement() {
        // v₁ = g, v₂ = 1.9g ⇒ total displacement 2.9g at lr = 1
        let g = 0.75;
        let mut params = vec![0.0];
        let mut velocity = vec![0.0];
        sgd_step(&mut params, &mut velocity, &[g], 1.0, 0.9);
        sgd_step(&mut params, &mut velocity, &[g], 1.0, 0.9);
        assert!((params[0] + 2.9 * g).abs() < 1e-12);
    }

    #[test]
    fn exact_descent_is_monotone_for_small_lr() {
        let problem = ToyProblem::new(8, 4, toy_estimator(EstimatorKind::Exact), 41).unwrap();
        let cfg = SgdConfig {
            learning_rate: 0.01,
            momentum: 0.0,
            steps: 25,
            runs: 1,
            seed: 7,
        };
        let trace = &run_toy(&problem, &cfg).unwrap()[0];
        for w in trace.losses.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "loss increased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn run_toy_is_bit_deterministic() {
        let problem = ToyProblem::new(10, 5, toy_estimator(EstimatorKind::Imle), 41).unwrap();
        let cfg = SgdConfig {
            learning_rate: 0.1,
            momentum: 0.9,
            steps: 10,
            runs: 4,
            seed: 3,
        };
        let a = run_toy(&problem, &cfg).unwrap();
        let b = run_toy(&problem, &cfg).unwrap();
        for (ta, tb) in a.iter().zip(&b) {
            assert_eq!(ta.losses, tb.losses);
        }
    }

    #[test]
    fn zero_learning_rate_leaves_loss_at_initial_value() {
        let problem = ToyProblem::new(10, 5, toy_estimator(EstimatorKind::Imle), 41).unwrap();
        let cfg = SgdConfig {
            learning_rate: 0.0,
            momentum: 0.9,
            steps: 5,
            runs: 2,
            seed: 3,
        };
        let traces = run_toy(&problem, &cfg).unwrap();
        let first = traces[0].losses[0];
        for t in &traces {
            for &l in &t.losses {
                assert_eq!(l, first);
            }
        }
    }

    #[test]
    fn zero_learning_rate_column_keeps_initial_loss() {
        let problem = ToyProblem::new(6, 3, toy_estimator(EstimatorKind::Imle), 41).unwrap();
        let noise_a = NoiseSpec::sum_of_gamma(1, 5.0, 10).unwrap();
        let noise_b = NoiseSpec::gumbel(1.0).unwrap();
        let cfg = SgdConfig {
            learning_rate: 0.1,
            momentum: 0.9,
            steps: 5,
            runs: 3,
            seed: 11,
        };
        let grid =
            run_sensitivity_grid(&problem, &noise_a, &noise_b, &[1.0, 10.0], &[0.0, 0.1], &cfg)
                .unwrap();
        // the exact loss at θ = 0, where every run in the lr = 0 column stays
        let oracle = ExactOracle::new(StateSpace::k_subset(6, 3).unwrap()).unwrap();
        let initial = oracle
            .expected_loss(&[0.0; 6], 1.0, |z| problem.loss_of(z))
            .unwrap();
        for arm in [&grid.arm_a, &grid.arm_b] {
            for row in arm.iter() {
                assert_eq!(row[0].mean, initial);
                assert_eq!(row[0].std, 0.0);
            }
        }
    }

    #[test]
    fn identical_arms_give_zero_difference_matrix() {
        let problem = ToyProblem::new(6, 3, toy_estimator(EstimatorKind::Imle), 41).unwrap();
        let noise = NoiseSpec::sum_of_gamma(1, 5.0, 10).unwrap();
        let cfg = SgdConfig {
            learning_rate: 0.1,
            momentum: 0.9,
            steps: 5,
            runs: 3,
            seed: 11,
        };
        let grid =
            run_sensitivity_grid(&problem, &noise, &noise, &[1.0, 10.0], &[0.1, 0.3], &cfg)
                .unwrap();
        for row in &grid.diff {
            for &d in row {
                assert_eq!(d, 0.0);
            }
        }
    }

    #[test]
    fn dataset_generation_is_deterministic_and_valid() {
        let a = gen_path_dataset(4, 6, 3, 99).unwrap();
        let b = gen_path_dataset(4, 6, 3, 99).unwrap();
        let space = StateSpace::grid_path(4, 4).unwrap();
        for (ea, eb) in a.examples.iter().zip(&b.examples) {
            assert_eq!(ea.features, eb.features);
            assert_eq!(ea.true_costs, eb.true_costs);
            assert_eq!(ea.y_star, eb.y_star);
            assert!(space.contains(&ea.y_star));
            assert!(ea.true_costs.iter().all(|&c| c > 0.0));
        }
    }

    #[test]
    fn dataset_labels_match_enumeration_oracle() {
        let data = gen_path_dataset(3, 10, 2, 5).unwrap();
        let space = StateSpace::grid_path(3, 3).unwrap();
        let states = space.enumerate().unwrap();
        for example in &data.examples {
            let best = states
                .iter()
                .map(|z| z.dot(&example.true_costs))
                .fold(f64::INFINITY, f64::min);
            let got = example.y_star.dot(&example.true_costs);
            assert!((got - best).abs() < 1e-12, "label cost {got} vs best {best}");
        }
    }

    #[test]
    fn zero_epoch_training_is_the_untrained_baseline() {
        let data = gen_path_dataset(4, 8, 3, 7).unwrap();
        let est = EstimatorSpec {
            kind: EstimatorKind::Imle,
            noise: NoiseSpec::DiracZero,
            samples: 1,
            target: TargetRule::Co,
        };
        let cfg = SgdConfig {
            learning_rate: 0.05,
            momentum: 0.9,
            steps: 0,
            runs: 1,
            seed: 1,
        };
        let (model, trace) = train_path_model(&data, &est, PathLoss::Hamming, &cfg).unwrap();
        assert!(trace.accuracy.is_empty());
        let baseline = path_accuracy(&LinearModel::zeros(3), &data).unwrap();
        assert_eq!(path_accuracy(&model, &data).unwrap(), baseline);
    }

    #[test]
    fn pid_with_dirac_matches_manual_two_map_difference() {
        // per-example update equals MAP(θ) − MAP(θ − λ∇ℓ_H) pushed through
        // the chain rule
        let data = gen_path_dataset(4, 1, 3, 13).unwrap();
        let example = &data.examples[0];
        let space = StateSpace::grid_path(4, 4).unwrap();
        let lambda = 20.0;
        let model = LinearModel { weights: vec![0.1, -0.2, 0.3], bias: 0.4 };
        let theta = model.theta(example);

        let fwd = imle_forward(&space, &theta, &NoiseSpec::DiracZero, &mut stream(0, &[])).unwrap();
        let grad = imle_backward(
            &space,
            &theta,
            &fwd,
            &hamming_grad(&example.y_star),
            &TargetRule::pid(lambda).unwrap(),
        )
        .unwrap();

        let dl = hamming_grad(&example.y_star);
        let shifted: Vec<f64> = theta.iter().zip(&dl).map(|(t, g)| t - lambda * g).collect();
        let a = map(&space, &theta).unwrap().state;
        let b = map(&space, &shifted).unwrap().state;
        let manual: Vec<f64> = a
            .as_bits()
            .iter()
            .zip(b.as_bits())
            .map(|(&x, &y)| f64::from(x) - f64::from(y))
            .collect();
        assert_eq!(grad.values, manual);
    }

    #[test]
    fn accuracy_counts_cost_equality_not_path_identity() {
        // true costs admit two distinct optimal paths; a model predicting
        // the one the label search did not pick still counts as optimal
        let p_other = [0usize, 3, 7, 8]; // TL → down → diag → BR
        #[rustfmt::skip]
        let true_costs = vec![
            0.2, 0.2, 0.2,
            0.2, 9.0, 0.2,
            0.2, 0.2, 0.2,
        ];
        let y_star = map_grid_path(3, 3, &true_costs).unwrap().state;
        let alt = State::from_indices(9, &p_other);
        assert_ne!(y_star, alt, "label search should pick the other optimum");
        assert_eq!(y_star.dot(&true_costs), alt.dot(&true_costs));

        // d = 1 feature marking the alternative path's cells; weights make
        // those cells cheap and everything else expensive
        let features: Vec<Vec<f64>> = (0..9)
            .map(|c| vec![if p_other.contains(&c) { 1.0 } else { 0.0 }])
            .collect();
        let example = PathExample { features, true_costs, y_star };
        let dataset = PathDataset { grid_size: 3, feature_dim: 1, examples: vec![example] };
        let model = LinearModel { weights: vec![10.0], bias: -11.0 };
        let space = StateSpace::grid_path(3, 3).unwrap();
        let predicted = map(&space, &model.theta(&dataset.examples[0])).unwrap().state;
        assert_eq!(predicted, alt);
        assert_eq!(path_accuracy(&model, &dataset).unwrap(), 1.0);
    }

    #[test]
    fn perfect_cost_model_scores_full_accuracy() {
        // d = 2 features whose first coordinate is the true cost itself
        let base = gen_path_dataset(4, 10, 2, 21).unwrap();
        let examples: Vec<PathExample> = base
            .examples
            .into_iter()
            .map(|mut e| {
                for (cell, f) in e.features.iter_mut().enumerate() {
                    f[0] = e.true_costs[cell];
                    f[1] = 0.0;
                }
                e.y_star = map_grid_path(4, 4, &e.true_costs).unwrap().state;
                e
            })
            .collect();
        let data = PathDataset { grid_size: 4, feature_dim: 2, examples };
        let model = LinearModel { weights: vec![-1.0, 0.0], bias: 0.0 };
        assert_eq!(path_accuracy(&model, &data).unwrap(), 1.0);
    }
}
