//! Experiment dispatch and CSV emission.
//!
//! All numeric output uses Rust's shortest round-trip float formatting, so
//! files are byte-stable across reruns of the same configuration.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use rand::Rng;

use imle_core::{
    gen_path_dataset, map, path_accuracy, rng::stream, run_sensitivity_grid, run_toy, sample_sog,
    sog_mean, sog_variance, train_path_model, EstimatorKind, EstimatorSpec, ExactOracle,
    LinearModel, NoiseSpec, SgdConfig, StateSpace, ToyProblem,
};

use crate::config::{estimator_name, loss_name, ExperimentConfig, NoiseKind, SpaceKind};

pub fn write_file(dir: &Path, name: &str, content: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content).with_context(|| format!("cannot write {}", path.display()))
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

fn sgd_config(cfg: &ExperimentConfig) -> SgdConfig {
    SgdConfig {
        learning_rate: cfg.lr,
        momentum: cfg.momentum,
        steps: cfg.steps,
        runs: cfg.runs,
        seed: cfg.seed,
    }
}

pub fn run_toy_topk(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let spec = EstimatorSpec {
        kind: cfg.estimator,
        noise: cfg.noise_spec()?,
        samples: cfg.samples,
        target: cfg.target_rule()?,
    };
    let problem = ToyProblem::new(cfg.m, cfg.k, spec, cfg.seed)?;
    let traces = run_toy(&problem, &sgd_config(cfg))?;

    for (r, trace) in traces.iter().enumerate() {
        let mut text = String::from("step,loss\n");
        for (step, loss) in trace.losses.iter().enumerate() {
            writeln!(text, "{},{}", step + 1, loss)?;
        }
        write_file(out, &format!("trace_run{r}.csv"), &text)?;
    }

    let finals: Vec<f64> = traces.iter().map(|t| t.final_loss()).collect();
    let (mean, std) = mean_std(&finals);
    let mut summary = String::from("estimator,mean_final_L,std_final_L\n");
    writeln!(summary, "{},{},{}", estimator_name(cfg.estimator), mean, std)?;
    write_file(out, "summary.csv", &summary)
}

pub fn run_sensitivity(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let sog = NoiseSpec::sum_of_gamma(cfg.kappa, cfg.tau, cfg.s)?;
    let gumbel = NoiseSpec::gumbel(cfg.gumbel_tau)?;
    let spec = EstimatorSpec {
        kind: EstimatorKind::Imle,
        noise: sog,
        samples: cfg.samples,
        target: imle_core::TargetRule::pid(cfg.lambdas[0])?,
    };
    let problem = ToyProblem::new(cfg.m, cfg.k, spec, cfg.seed)?;
    let grid =
        run_sensitivity_grid(&problem, &sog, &gumbel, &cfg.lambdas, &cfg.lrs, &sgd_config(cfg))?;

    let mut text = String::from("lambda,lr,mean_final_L,std_final_L,noise_kind\n");
    for (arm, kind) in [(&grid.arm_a, "sog"), (&grid.arm_b, "gumbel")] {
        for (i, row) in arm.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                writeln!(
                    text,
                    "{},{},{},{},{kind}",
                    grid.lambdas[i], grid.lrs[j], cell.mean, cell.std
                )?;
            }
        }
    }
    write_file(out, "grid.csv", &text)
}

pub fn run_sog_stats(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let mut rng = stream(cfg.seed, &[0x5c5]);
    let draws: Vec<f64> = (0..cfg.samples)
        .map(|_| sample_sog(cfg.kappa, cfg.tau, cfg.s, &mut rng))
        .collect::<imle_core::Result<_>>()?;
    let (mean, std) = mean_std(&draws);
    let var = std * std;

    let mut moments = String::from("kappa,tau,s,n,mean,var,analytic_mean,analytic_var\n");
    writeln!(
        moments,
        "{},{},{},{},{},{},{},{}",
        cfg.kappa,
        cfg.tau,
        cfg.s,
        cfg.samples,
        mean,
        var,
        sog_mean(cfg.kappa, cfg.tau, cfg.s),
        sog_variance(cfg.kappa, cfg.tau, cfg.s)
    )?;
    write_file(out, "moments.csv", &moments)?;

    // deterministic binning around the analytic moments; outliers fall
    // into the edge bins
    let center = sog_mean(cfg.kappa, cfg.tau, cfg.s);
    let sigma = sog_variance(cfg.kappa, cfg.tau, cfg.s).sqrt();
    let lo = center - 6.0 * sigma;
    let hi = center + 6.0 * sigma;
    let width = (hi - lo) / cfg.bins as f64;
    let mut counts = vec![0u64; cfg.bins];
    for &x in &draws {
        let idx = (((x - lo) / width).floor() as i64).clamp(0, cfg.bins as i64 - 1) as usize;
        counts[idx] += 1;
    }
    let mut hist = String::from("bin_lo,bin_hi,count\n");
    for (i, c) in counts.iter().enumerate() {
        writeln!(hist, "{},{},{c}", lo + i as f64 * width, lo + (i + 1) as f64 * width)?;
    }
    write_file(out, "histogram.csv", &hist)
}

pub fn run_gumbel_max_check(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let space = StateSpace::categorical(cfg.m)?;
    let oracle = ExactOracle::new(space)?;
    let mut rng = stream(cfg.seed, &[0x6a6]);
    let theta: Vec<f64> = (0..cfg.m).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
    let softmax = oracle.marginals(&theta, cfg.tau)?;

    let noise = NoiseSpec::gumbel(cfg.tau)?;
    let empirical =
        imle_core::marginals_pam(&space, &theta, &noise, cfg.samples, &mut rng)?;

    let mut text = String::from("category,theta,softmax,empirical,abs_error\n");
    for i in 0..cfg.m {
        writeln!(
            text,
            "{i},{},{},{},{}",
            theta[i],
            softmax[i],
            empirical[i],
            (softmax[i] - empirical[i]).abs()
        )?;
    }
    write_file(out, "frequencies.csv", &text)
}

/// Runs the path experiment; resolves `kappa = 0` to the rounded mean
/// label path length and writes the concrete value back so the manifest
/// pins it.
pub fn run_shortest_path(cfg: &mut ExperimentConfig, out: &Path) -> Result<()> {
    let dataset = gen_path_dataset(cfg.grid_size, cfg.n_examples, cfg.feature_dim, cfg.seed)?;
    if cfg.kappa == 0 {
        let total: usize = dataset.examples.iter().map(|e| e.y_star.count_ones()).sum();
        cfg.kappa = (total as f64 / dataset.examples.len() as f64).round().max(1.0) as u32;
    }
    let baseline = path_accuracy(&LinearModel::zeros(cfg.feature_dim), &dataset)?;
    let spec = EstimatorSpec {
        kind: EstimatorKind::Imle,
        noise: match cfg.noise {
            NoiseKind::Dirac => NoiseSpec::DiracZero,
            NoiseKind::Gumbel => NoiseSpec::gumbel(cfg.tau)?,
            NoiseKind::Sog => NoiseSpec::sum_of_gamma(cfg.kappa, cfg.tau, cfg.s)?,
        },
        samples: cfg.samples,
        target: cfg.target_rule()?,
    };
    let sgd = SgdConfig { runs: 1, ..sgd_config(cfg) };
    let (_, trace) = train_path_model(&dataset, &spec, cfg.loss, &sgd)?;

    let mut text = String::from("epoch,mean_loss,accuracy\n");
    for (e, (l, a)) in trace.mean_loss.iter().zip(&trace.accuracy).enumerate() {
        writeln!(text, "{},{l},{a}", e + 1)?;
    }
    write_file(out, "trace.csv", &text)?;

    let mut summary =
        String::from("loss,target,noise,baseline_accuracy,final_accuracy\n");
    writeln!(
        summary,
        "{},{},{},{baseline},{}",
        loss_name(cfg.loss),
        cfg.target_kind,
        cfg.noise,
        trace.accuracy.last().unwrap()
    )?;
    write_file(out, "summary.csv", &summary)
}

pub fn run_oracle_dump(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let space = match cfg.space {
        SpaceKind::Categorical => StateSpace::categorical(cfg.m)?,
        SpaceKind::KSubset => StateSpace::k_subset(cfg.m, cfg.k)?,
        SpaceKind::GridPath => StateSpace::grid_path(cfg.grid_size, cfg.grid_size)?,
    };
    let oracle = ExactOracle::new(space)?;
    let mut rng = stream(cfg.seed, &[0x0d0]);
    let theta: Vec<f64> = (0..space.dim()).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
    let probs = oracle.probabilities(&theta, cfg.tau)?;

    let mut thetas = String::from("index,theta\n");
    for (i, t) in theta.iter().enumerate() {
        writeln!(thetas, "{i},{t}")?;
    }
    write_file(out, "theta.csv", &thetas)?;

    let mut states = String::from("state,weight,prob\n");
    for (z, p) in oracle.states().iter().zip(&probs) {
        writeln!(states, "{:?},{},{p}", z, z.dot(&theta))?;
    }
    write_file(out, "states.csv", &states)?;

    // sanity line for humans: the MAP state and its weight
    let map_result = map(&space, &theta)?;
    let mut map_text = String::from("state,weight\n");
    writeln!(map_text, "{:?},{}", map_result.state, map_result.weight)?;
    write_file(out, "map.csv", &map_text)
}
