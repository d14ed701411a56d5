//! Experiment runner: config ingestion, dispatch, CSV + manifest emission.

pub mod config;
pub mod experiments;

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};

pub use config::{
    merge_overrides, parse_config_file, parse_config_text, resolve, Experiment, ExperimentConfig,
    RawConfig,
};

/// Execute a resolved configuration: prepare the output directory, run the
/// experiment, and write `manifest.txt` alongside the CSVs. Rerunning the
/// manifest reproduces the CSVs byte for byte.
pub fn run(cfg: &ExperimentConfig) -> Result<()> {
    let start = Instant::now();
    let out = cfg.out.clone();
    prepare_out_dir(&out, cfg.force)?;

    // the path experiment may resolve κ = 0 to a dataset-derived value;
    // the manifest must echo the concrete one
    let mut cfg = cfg.clone();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .context("cannot build worker pool")?;
    pool.install(|| match cfg.experiment {
        Experiment::ToyTopk => experiments::run_toy_topk(&cfg, &out),
        Experiment::Sensitivity => experiments::run_sensitivity(&cfg, &out),
        Experiment::SogStats => experiments::run_sog_stats(&cfg, &out),
        Experiment::GumbelMaxCheck => experiments::run_gumbel_max_check(&cfg, &out),
        Experiment::ShortestPath => experiments::run_shortest_path(&mut cfg, &out),
        Experiment::OracleDump => experiments::run_oracle_dump(&cfg, &out),
    })?;

    write_manifest(&cfg, &out, start.elapsed().as_secs_f64())
}

fn prepare_out_dir(out: &Path, force: bool) -> Result<()> {
    if out.exists() {
        let occupied = std::fs::read_dir(out)
            .with_context(|| format!("cannot inspect {}", out.display()))?
            .next()
            .is_some();
        if occupied && !force {
            bail!(
                "output directory {} is not empty; pass --force to overwrite",
                out.display()
            );
        }
    } else {
        std::fs::create_dir_all(out)
            .with_context(|| format!("cannot create {}", out.display()))?;
    }
    Ok(())
}

fn write_manifest(cfg: &ExperimentConfig, out: &Path, wall_clock_s: f64) -> Result<()> {
    let mut text = String::new();
    writeln!(text, "# run manifest; rerun with: imle --config manifest.txt --out <new dir>")?;
    writeln!(text, "# version = {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(text, "# wall_clock_s = {wall_clock_s}")?;
    for (key, value) in cfg.manifest_pairs() {
        writeln!(text, "{key} = {value}")?;
    }
    experiments::write_file(out, "manifest.txt", &text)
}
