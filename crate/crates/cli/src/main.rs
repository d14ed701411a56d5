use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use imle_cli::{merge_overrides, parse_config_file, resolve, RawConfig};

/// Reproducible experiments over discrete exponential family distributions
/// and combinatorial solvers: perturb-and-MAP sampling checks, gradient
/// estimator comparisons, and shortest-path learning.
#[derive(Parser, Debug)]
#[command(name = "imle", version)]
struct Cli {
    /// Flat key-value config file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// toy-topk | sensitivity | sog-stats | gumbel-max-check | shortest-path | oracle-dump
    #[arg(long)]
    experiment: Option<String>,
    /// Root seed; every derived stream is a pure function of it.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (one per invocation).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker cap for parallel runs; 0 means all cores.
    #[arg(long)]
    jobs: Option<usize>,
    /// Overwrite a non-empty output directory.
    #[arg(long)]
    force: bool,

    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// imle | ste | sfe | exact
    #[arg(long)]
    estimator: Option<String>,
    /// dirac | gumbel | sog
    #[arg(long)]
    noise: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    tau: Option<f64>,
    #[arg(long)]
    kappa: Option<u32>,
    #[arg(long)]
    s: Option<u32>,
    #[arg(long)]
    samples: Option<usize>,
    /// pid | co
    #[arg(long)]
    target: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lr: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    momentum: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    /// Comma-separated λ grid for the sensitivity sweep.
    #[arg(long)]
    lambdas: Option<String>,
    /// Comma-separated learning-rate grid for the sensitivity sweep.
    #[arg(long)]
    lrs: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    gumbel_tau: Option<f64>,
    #[arg(long)]
    grid_size: Option<usize>,
    #[arg(long)]
    n_examples: Option<usize>,
    #[arg(long)]
    feature_dim: Option<usize>,
    /// hamming | regret
    #[arg(long)]
    loss: Option<String>,
    /// categorical | ksubset | gridpath (oracle-dump)
    #[arg(long)]
    space: Option<String>,
    #[arg(long)]
    bins: Option<usize>,
}

impl Cli {
    fn overrides(&self) -> RawConfig {
        let mut map = RawConfig::new();
        let mut put = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                map.insert(key.to_string(), v);
            }
        };
        put("experiment", self.experiment.clone());
        put("seed", self.seed.map(|v| v.to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("jobs", self.jobs.map(|v| v.to_string()));
        if self.force {
            put("force", Some("true".to_string()));
        }
        put("m", self.m.map(|v| v.to_string()));
        put("k", self.k.map(|v| v.to_string()));
        put("estimator", self.estimator.clone());
        put("noise", self.noise.clone());
        put("tau", self.tau.map(|v| v.to_string()));
        put("kappa", self.kappa.map(|v| v.to_string()));
        put("s", self.s.map(|v| v.to_string()));
        put("samples", self.samples.map(|v| v.to_string()));
        put("target", self.target.clone());
        put("lambda", self.lambda.map(|v| v.to_string()));
        put("lr", self.lr.map(|v| v.to_string()));
        put("momentum", self.momentum.map(|v| v.to_string()));
        put("steps", self.steps.map(|v| v.to_string()));
        put("runs", self.runs.map(|v| v.to_string()));
        put("lambdas", self.lambdas.clone());
        put("lrs", self.lrs.clone());
        put("gumbel_tau", self.gumbel_tau.map(|v| v.to_string()));
        put("grid_size", self.grid_size.map(|v| v.to_string()));
        put("n_examples", self.n_examples.map(|v| v.to_string()));
        put("feature_dim", self.feature_dim.map(|v| v.to_string()));
        put("loss", self.loss.clone());
        put("space", self.space.clone());
        put("bins", self.bins.map(|v| v.to_string()));
        map
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| {
        let base = match &cli.config {
            Some(path) => parse_config_file(path)?,
            None => RawConfig::new(),
        };
        let raw = merge_overrides(base, &cli.overrides())?;
        let cfg = resolve(&raw)?;
        imle_cli::run(&cfg)
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
