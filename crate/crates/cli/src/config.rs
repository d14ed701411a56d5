//! Flat key-value configuration: file ingestion, flag overrides,
//! per-experiment defaults, validation, and manifest echoing.
//!
//! The file format is INI-style without sections: one `key = value` per
//! line, `#` starts a comment, no nesting. A manifest written by a run is
//! itself a valid config file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};

use imle_core::{EstimatorKind, NoiseSpec, PathLoss, TargetRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    ToyTopk,
    Sensitivity,
    SogStats,
    GumbelMaxCheck,
    ShortestPath,
    OracleDump,
}

impl Experiment {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "toy-topk" => Ok(Self::ToyTopk),
            "sensitivity" => Ok(Self::Sensitivity),
            "sog-stats" => Ok(Self::SogStats),
            "gumbel-max-check" => Ok(Self::GumbelMaxCheck),
            "shortest-path" => Ok(Self::ShortestPath),
            "oracle-dump" => Ok(Self::OracleDump),
            other => bail!(
                "experiment: unknown value `{other}` (expected toy-topk, sensitivity, \
                 sog-stats, gumbel-max-check, shortest-path, or oracle-dump)"
            ),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::ToyTopk => "toy-topk",
            Self::Sensitivity => "sensitivity",
            Self::SogStats => "sog-stats",
            Self::GumbelMaxCheck => "gumbel-max-check",
            Self::ShortestPath => "shortest-path",
            Self::OracleDump => "oracle-dump",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseKind {
    Dirac,
    Gumbel,
    Sog,
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dirac => "dirac",
            Self::Gumbel => "gumbel",
            Self::Sog => "sog",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    Categorical,
    KSubset,
    GridPath,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Categorical => "categorical",
            Self::KSubset => "ksubset",
            Self::GridPath => "gridpath",
        })
    }
}

/// Fully resolved configuration of one invocation. Only the keys relevant
/// to `experiment` are consumed and echoed into the manifest.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub out: PathBuf,
    pub jobs: usize,
    pub force: bool,

    pub m: usize,
    pub k: usize,
    pub estimator: EstimatorKind,
    pub noise: NoiseKind,
    pub tau: f64,
    pub kappa: u32,
    pub s: u32,
    pub samples: usize,
    pub target_kind: TargetKind,
    pub lambda: f64,
    pub lr: f64,
    pub momentum: f64,
    pub steps: usize,
    pub runs: usize,

    pub lambdas: Vec<f64>,
    pub lrs: Vec<f64>,
    pub gumbel_tau: f64,

    pub grid_size: usize,
    pub n_examples: usize,
    pub feature_dim: usize,
    pub loss: PathLoss,

    pub space: SpaceKind,
    pub bins: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetKind {
    Pid,
    Co,
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pid => "pid",
            Self::Co => "co",
        })
    }
}

const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "seed",
    "out",
    "jobs",
    "force",
    "m",
    "k",
    "estimator",
    "noise",
    "tau",
    "kappa",
    "s",
    "samples",
    "target",
    "lambda",
    "lr",
    "momentum",
    "steps",
    "runs",
    "lambdas",
    "lrs",
    "gumbel_tau",
    "grid_size",
    "n_examples",
    "feature_dim",
    "loss",
    "space",
    "bins",
];

/// Raw key-value pairs, before defaulting and validation.
pub type RawConfig = BTreeMap<String, String>;

/// Parse a flat key-value file. Unknown keys are rejected by name.
pub fn parse_config_file(path: &Path) -> Result<RawConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<RawConfig> {
    let mut map = RawConfig::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{line}`", lineno + 1))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            bail!("line {}: unknown key `{key}`", lineno + 1);
        }
        map.insert(key, value);
    }
    Ok(map)
}

/// Apply flag overrides on top of file values.
pub fn merge_overrides(mut base: RawConfig, overrides: &RawConfig) -> Result<RawConfig> {
    for (key, value) in overrides {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            bail!("unknown key `{key}`");
        }
        base.insert(key.clone(), value.clone());
    }
    Ok(base)
}

fn get_parsed<T: std::str::FromStr>(raw: &RawConfig, key: &str, default: T) -> Result<T>
where
    T::Err: fmt::Display,
{
    match raw.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse::<T>()
            .map_err(|e| anyhow!("{key}: cannot parse `{v}`: {e}")),
    }
}

fn get_list(raw: &RawConfig, key: &str, default: &[f64]) -> Result<Vec<f64>> {
    match raw.get(key) {
        None => Ok(default.to_vec()),
        Some(v) => v
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|e| anyhow!("{key}: cannot parse `{tok}`: {e}"))
            })
            .collect(),
    }
}

fn positive(key: &str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        bail!("{key}: must be positive and finite, got {value}")
    }
}

/// Resolve raw pairs into a validated configuration. Defaults depend on
/// the experiment, so the resolved values written to the manifest fully
/// pin the run.
pub fn resolve(raw: &RawConfig) -> Result<ExperimentConfig> {
    let experiment = match raw.get("experiment") {
        Some(v) => Experiment::parse(v)?,
        None => bail!("experiment: missing required key"),
    };
    let out = match raw.get("out") {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => bail!("out: missing required key (output directory)"),
    };

    let is_toy = matches!(experiment, Experiment::ToyTopk | Experiment::Sensitivity);
    let default_noise = match experiment {
        Experiment::ToyTopk | Experiment::Sensitivity | Experiment::SogStats => NoiseKind::Sog,
        Experiment::GumbelMaxCheck => NoiseKind::Gumbel,
        Experiment::ShortestPath | Experiment::OracleDump => NoiseKind::Dirac,
    };
    let noise = match raw.get("noise").map(String::as_str) {
        None => default_noise,
        Some("dirac") => NoiseKind::Dirac,
        Some("gumbel") => NoiseKind::Gumbel,
        Some("sog") => NoiseKind::Sog,
        Some(other) => bail!("noise: unknown value `{other}` (expected dirac, gumbel, or sog)"),
    };
    let estimator = match raw.get("estimator").map(String::as_str) {
        None => EstimatorKind::Imle,
        Some("imle") => EstimatorKind::Imle,
        Some("ste") => EstimatorKind::Ste,
        Some("sfe") => EstimatorKind::Sfe,
        Some("exact") => EstimatorKind::Exact,
        Some(other) => {
            bail!("estimator: unknown value `{other}` (expected imle, ste, sfe, or exact)")
        }
    };
    let target_kind = match raw.get("target").map(String::as_str) {
        None => {
            if experiment == Experiment::ShortestPath {
                TargetKind::Co
            } else {
                TargetKind::Pid
            }
        }
        Some("pid") => TargetKind::Pid,
        Some("co") => TargetKind::Co,
        Some(other) => bail!("target: unknown value `{other}` (expected pid or co)"),
    };
    let loss = match raw.get("loss").map(String::as_str) {
        None => PathLoss::Hamming,
        Some("hamming") => PathLoss::Hamming,
        Some("regret") => PathLoss::Regret,
        Some(other) => bail!("loss: unknown value `{other}` (expected hamming or regret)"),
    };
    let space = match raw.get("space").map(String::as_str) {
        None => SpaceKind::KSubset,
        Some("categorical") => SpaceKind::Categorical,
        Some("ksubset") => SpaceKind::KSubset,
        Some("gridpath") => SpaceKind::GridPath,
        Some(other) => {
            bail!("space: unknown value `{other}` (expected categorical, ksubset, or gridpath)")
        }
    };

    let default_tau = if is_toy && noise == NoiseKind::Sog { 5.0 } else { 1.0 };
    let default_samples = match experiment {
        Experiment::SogStats => 1_000_000,
        Experiment::GumbelMaxCheck => 200_000,
        _ => 1,
    };
    let default_lr = if experiment == Experiment::ShortestPath { 0.01 } else { 0.1 };
    let default_m = if experiment == Experiment::GumbelMaxCheck { 5 } else { 10 };
    let default_lambda = if experiment == Experiment::ShortestPath { 20.0 } else { 10.0 };

    let config = ExperimentConfig {
        experiment,
        seed: get_parsed(raw, "seed", 0u64)?,
        out,
        jobs: get_parsed(raw, "jobs", 0usize)?,
        force: get_parsed(raw, "force", false)?,
        m: get_parsed(raw, "m", default_m)?,
        k: get_parsed(raw, "k", 5usize)?,
        estimator,
        noise,
        tau: positive("tau", get_parsed(raw, "tau", default_tau)?)?,
        kappa: get_parsed(
            raw,
            "kappa",
            match experiment {
                // 0 = derive κ from the mean label path length
                Experiment::ShortestPath => 0u32,
                Experiment::SogStats => 5,
                _ => 1,
            },
        )?,
        s: get_parsed(raw, "s", 10u32)?,
        samples: get_parsed(raw, "samples", default_samples)?,
        target_kind,
        lambda: positive("lambda", get_parsed(raw, "lambda", default_lambda)?)?,
        lr: get_parsed(raw, "lr", default_lr)?,
        momentum: get_parsed(raw, "momentum", 0.9f64)?,
        steps: get_parsed(raw, "steps", 50usize)?,
        runs: get_parsed(raw, "runs", 100usize)?,
        lambdas: get_list(raw, "lambdas", &imle_core::DEFAULT_LAMBDA_GRID)?,
        lrs: get_list(raw, "lrs", &imle_core::DEFAULT_LR_GRID)?,
        gumbel_tau: positive("gumbel_tau", get_parsed(raw, "gumbel_tau", 1.0f64)?)?,
        grid_size: get_parsed(raw, "grid_size", 8usize)?,
        n_examples: get_parsed(raw, "n_examples", 200usize)?,
        feature_dim: get_parsed(raw, "feature_dim", 5usize)?,
        loss,
        space,
        bins: get_parsed(raw, "bins", 60usize)?,
    };
    config.validate()?;
    Ok(config)
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.m == 0 {
            bail!("m: must be >= 1");
        }
        let uses_k = matches!(self.experiment, Experiment::ToyTopk | Experiment::Sensitivity)
            || (self.experiment == Experiment::OracleDump && self.space == SpaceKind::KSubset);
        if uses_k && (self.k == 0 || self.k > self.m) {
            bail!("k: must satisfy 1 <= k <= m, got k={} m={}", self.k, self.m);
        }
        if self.s == 0 {
            bail!("s: must be >= 1");
        }
        if self.samples == 0 {
            bail!("samples: must be >= 1");
        }
        if self.lr < 0.0 || !self.lr.is_finite() {
            bail!("lr: must be >= 0 and finite, got {}", self.lr);
        }
        if !(0.0..1.0).contains(&self.momentum) {
            bail!("momentum: must lie in [0, 1), got {}", self.momentum);
        }
        if self.steps == 0 {
            bail!("steps: must be >= 1");
        }
        if self.runs == 0 {
            bail!("runs: must be >= 1");
        }
        if self.grid_size < 2 {
            bail!("grid_size: must be >= 2, got {}", self.grid_size);
        }
        if self.n_examples == 0 {
            bail!("n_examples: must be >= 1");
        }
        if self.feature_dim < 2 {
            bail!("feature_dim: must be >= 2, got {}", self.feature_dim);
        }
        if self.lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            bail!("lambdas: every entry must be positive and finite");
        }
        if self.lrs.iter().any(|&l| l < 0.0 || !l.is_finite()) {
            bail!("lrs: every entry must be >= 0 and finite");
        }
        if self.experiment != Experiment::ShortestPath && self.kappa == 0 && self.noise == NoiseKind::Sog {
            bail!("kappa: must be >= 1");
        }
        if self.bins < 2 {
            bail!("bins: must be >= 2");
        }
        Ok(())
    }

    /// Build the noise spec for this config; `kappa = 0` means "derive κ
    /// from the data" and must be resolved by the caller beforehand.
    pub fn noise_spec(&self) -> Result<NoiseSpec> {
        Ok(match self.noise {
            NoiseKind::Dirac => NoiseSpec::DiracZero,
            NoiseKind::Gumbel => NoiseSpec::gumbel(self.tau)?,
            NoiseKind::Sog => NoiseSpec::sum_of_gamma(self.kappa, self.tau, self.s)?,
        })
    }

    pub fn target_rule(&self) -> Result<TargetRule> {
        Ok(match self.target_kind {
            TargetKind::Pid => TargetRule::pid(self.lambda)?,
            TargetKind::Co => TargetRule::Co,
        })
    }

    /// Keys echoed into the manifest, fully resolved, experiment-relevant
    /// only. `out`, `jobs` and `force` are operational and excluded.
    pub fn manifest_pairs(&self) -> Vec<(&'static str, String)> {
        let mut pairs: Vec<(&'static str, String)> = vec![
            ("experiment", self.experiment.to_string()),
            ("seed", self.seed.to_string()),
        ];
        match self.experiment {
            Experiment::ToyTopk => {
                pairs.extend([
                    ("m", self.m.to_string()),
                    ("k", self.k.to_string()),
                    ("estimator", estimator_name(self.estimator).to_string()),
                    ("noise", self.noise.to_string()),
                    ("tau", self.tau.to_string()),
                    ("kappa", self.kappa.to_string()),
                    ("s", self.s.to_string()),
                    ("samples", self.samples.to_string()),
                    ("target", self.target_kind.to_string()),
                    ("lambda", self.lambda.to_string()),
                    ("lr", self.lr.to_string()),
                    ("momentum", self.momentum.to_string()),
                    ("steps", self.steps.to_string()),
                    ("runs", self.runs.to_string()),
                ]);
            }
            Experiment::Sensitivity => {
                pairs.extend([
                    ("m", self.m.to_string()),
                    ("k", self.k.to_string()),
                    ("tau", self.tau.to_string()),
                    ("kappa", self.kappa.to_string()),
                    ("s", self.s.to_string()),
                    ("samples", self.samples.to_string()),
                    ("gumbel_tau", self.gumbel_tau.to_string()),
                    ("lambdas", join_list(&self.lambdas)),
                    ("lrs", join_list(&self.lrs)),
                    ("momentum", self.momentum.to_string()),
                    ("steps", self.steps.to_string()),
                    ("runs", self.runs.to_string()),
                ]);
            }
            Experiment::SogStats => {
                pairs.extend([
                    ("kappa", self.kappa.to_string()),
                    ("tau", self.tau.to_string()),
                    ("s", self.s.to_string()),
                    ("samples", self.samples.to_string()),
                    ("bins", self.bins.to_string()),
                ]);
            }
            Experiment::GumbelMaxCheck => {
                pairs.extend([
                    ("m", self.m.to_string()),
                    ("tau", self.tau.to_string()),
                    ("samples", self.samples.to_string()),
                ]);
            }
            Experiment::ShortestPath => {
                pairs.extend([
                    ("grid_size", self.grid_size.to_string()),
                    ("n_examples", self.n_examples.to_string()),
                    ("feature_dim", self.feature_dim.to_string()),
                    ("loss", loss_name(self.loss).to_string()),
                    ("noise", self.noise.to_string()),
                    ("tau", self.tau.to_string()),
                    ("kappa", self.kappa.to_string()),
                    ("s", self.s.to_string()),
                    ("target", self.target_kind.to_string()),
                    ("lambda", self.lambda.to_string()),
                    ("lr", self.lr.to_string()),
                    ("momentum", self.momentum.to_string()),
                    ("steps", self.steps.to_string()),
                ]);
            }
            Experiment::OracleDump => {
                pairs.extend([
                    ("space", self.space.to_string()),
                    ("m", self.m.to_string()),
                    ("k", self.k.to_string()),
                    ("grid_size", self.grid_size.to_string()),
                    ("tau", self.tau.to_string()),
                ]);
            }
        }
        pairs
    }
}

pub fn estimator_name(kind: EstimatorKind) -> &'static str {
    match kind {
        EstimatorKind::Imle => "imle",
        EstimatorKind::Ste => "ste",
        EstimatorKind::Sfe => "sfe",
        EstimatorKind::Exact => "exact",
    }
}

pub fn loss_name(loss: PathLoss) -> &'static str {
    match loss {
        PathLoss::Hamming => "hamming",
        PathLoss::Regret => "regret",
    }
}

fn join_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
