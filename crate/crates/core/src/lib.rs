//! Implicit maximum-likelihood estimation for discrete exponential family
//! distributions and combinatorial solvers.
//!
//! The crate provides, bottom-up:
//!
//! - [`noise`]: perturbation distributions for perturb-and-MAP, including
//!   the Sum-of-Gamma family whose κ-fold sums follow a proper Gumbel law;
//! - [`space`]: binary state vectors and the constraint sets they live in
//!   (one-hot, k-subset, grid paths), with exhaustive enumeration for small
//!   instances;
//! - [`solvers`]: deterministic MAP oracles (argmax, top-k, Dijkstra);
//! - [`distribution`]: the exact brute-force oracle (log-partition,
//!   marginals, faithful sampling) and perturb-and-MAP marginal estimates;
//! - [`estimators`]: implicit-MLE, straight-through, score-function and
//!   exact gradient estimators plus the Hamming and regret losses;
//! - [`optim`]: reproducible desk-scale experiment harnesses.
//!
//! Everything is a pure function of its arguments and an injected seeded
//! RNG; see [`rng::stream`] for the stream-derivation scheme that keeps
//! parallel runs deterministic.

pub mod distribution;
pub mod error;
pub mod estimators;
pub mod noise;
pub mod optim;
pub mod rng;
pub mod solvers;
pub mod space;

pub use distribution::{marginals_pam, ExactOracle};
pub use error::{Error, Result};
pub use estimators::{
    co_target, exact_mle_gradient, hamming_grad, hamming_loss, imle_backward, imle_forward,
    imle_gradient, regret_loss, sfe_gradient, ste_gradient, EstimatorKind, EstimatorSpec,
    ForwardSample, GradEstimate, TargetRule,
};
pub use noise::{
    perturb, sample_gamma, sample_gumbel, sample_sog, sog_mean, sog_mean_bias, sog_variance,
    NoiseSpec, EULER_MASCHERONI,
};
pub use optim::{
    gen_path_dataset, path_accuracy, run_sensitivity_grid, run_toy, sgd_step, train_path_model,
    CellStat, LinearModel, PathDataset, PathExample, PathLoss, PathTrace, RunTrace,
    SensitivityGrid, SgdConfig, ToyProblem, DEFAULT_LAMBDA_GRID, DEFAULT_LR_GRID,
};
pub use solvers::{map, map_categorical, map_grid_path, map_k_subset, MapResult};
pub use space::{State, StateSpace};
