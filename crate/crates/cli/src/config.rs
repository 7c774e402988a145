//! Command-line flags, the optional key = value config file, and the
//! resolved [`BenchConfig`].

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use iqa_core::perturb::{build_registry, is_registered, parse_condition};
use iqa_core::{Condition, DatasetId, GaussMode, Metric};
use serde::Deserialize;

use crate::failure::{Failure, Outcome};

pub const DEFAULT_N: usize = 50;
pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Parser)]
#[command(
    name = "iqa-bench",
    version,
    about = "Robustness benchmark of PSNR and BRISQUE on MNIST and CIFAR-10"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Draw the image sample and write pristine PNGs plus a manifest.
    Sample,
    /// Apply every selected condition to every sampled image.
    Corrupt,
    /// Score corrupted images with PSNR and/or BRISQUE.
    Score,
    /// Build summary tables and box plots from the scores.
    Report,
    /// Run all stages, skipping those whose outputs are up to date.
    Bench,
}

/// Every setting is optional here; flags override the config file, which
/// overrides the built-in defaults.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// mnist, cifar10 or all
    #[arg(long, global = true)]
    pub dataset: Option<String>,

    /// Directory holding the raw dataset files
    #[arg(long, global = true)]
    #[serde(alias = "data_dir")]
    pub data_dir: Option<PathBuf>,

    /// Images drawn per dataset
    #[arg(long, global = true)]
    pub n: Option<usize>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// How GA strengths are read: variance (sigma = sqrt(s)) or stddev (sigma = s)
    #[arg(long, global = true)]
    #[serde(alias = "gauss_mode")]
    pub gauss_mode: Option<String>,

    /// Comma-separated condition names, or all
    #[arg(long, global = true)]
    pub conditions: Option<String>,

    /// psnr, brisque or all
    #[arg(long, global = true)]
    pub metric: Option<String>,

    /// SVR model file for BRISQUE
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,

    /// Feature range file for BRISQUE
    #[arg(long, global = true)]
    pub range: Option<PathBuf>,

    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads (0 = one per core)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Config file of `key = value` lines using the flag names
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Options {
    pub fn read_file(path: &Path) -> Outcome<Options> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::config(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `self` win over `fallback`.
    pub fn or(self, fallback: Options) -> Options {
        Options {
            dataset: self.dataset.or(fallback.dataset),
            data_dir: self.data_dir.or(fallback.data_dir),
            n: self.n.or(fallback.n),
            seed: self.seed.or(fallback.seed),
            gauss_mode: self.gauss_mode.or(fallback.gauss_mode),
            conditions: self.conditions.or(fallback.conditions),
            metric: self.metric.or(fallback.metric),
            model: self.model.or(fallback.model),
            range: self.range.or(fallback.range),
            out: self.out.or(fallback.out),
            jobs: self.jobs.or(fallback.jobs),
            config: self.config.or(fallback.config),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub datasets: Vec<DatasetId>,
    pub data_dir: PathBuf,
    pub n: usize,
    pub seed: u64,
    pub gauss_mode: GaussMode,
    /// In registry order.
    pub conditions: Vec<Condition>,
    pub metrics: Vec<Metric>,
    pub model: Option<PathBuf>,
    pub range: Option<PathBuf>,
    pub out: PathBuf,
    pub jobs: usize,
}

fn parse_datasets(s: &str) -> Outcome<Vec<DatasetId>> {
    if s == "all" {
        return Ok(DatasetId::ALL.to_vec());
    }
    Ok(vec![s.parse().map_err(Failure::config)?])
}

fn parse_metrics(s: &str) -> Outcome<Vec<Metric>> {
    if s == "all" {
        return Ok(Metric::ALL.to_vec());
    }
    Ok(vec![s.parse().map_err(Failure::config)?])
}

fn parse_condition_filter(s: &str) -> Outcome<Vec<Condition>> {
    if s == "all" {
        return Ok(build_registry());
    }
    let wanted: Vec<&str> = s.split(',').map(str::trim).filter(|c| !c.is_empty()).collect();
    if wanted.is_empty() {
        return Err(Failure::config("empty condition filter"));
    }
    for name in &wanted {
        parse_condition(name).map_err(|e| Failure::config(format!("condition `{name}`: {e}")))?;
        if !is_registered(name) {
            return Err(Failure::config(format!("condition `{name}` is not in the registry")));
        }
    }
    Ok(build_registry()
        .into_iter()
        .filter(|c| wanted.contains(&c.name()))
        .collect())
}

impl BenchConfig {
    pub fn resolve(flags: Options) -> Outcome<BenchConfig> {
        let o = match &flags.config {
            Some(path) => {
                let file = Options::read_file(path)?;
                flags.or(file)
            }
            None => flags,
        };
        let n = o.n.unwrap_or(DEFAULT_N);
        if n == 0 {
            return Err(Failure::config("--n must be at least 1"));
        }
        let gauss_mode = match &o.gauss_mode {
            Some(m) => m.parse().map_err(Failure::config)?,
            None => GaussMode::default(),
        };
        Ok(BenchConfig {
            datasets: parse_datasets(o.dataset.as_deref().unwrap_or("all"))?,
            data_dir: o.data_dir.unwrap_or_else(|| PathBuf::from("data")),
            n,
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            gauss_mode,
            conditions: parse_condition_filter(o.conditions.as_deref().unwrap_or("all"))?,
            metrics: parse_metrics(o.metric.as_deref().unwrap_or("all"))?,
            model: o.model,
            range: o.range,
            out: o.out.unwrap_or_else(|| PathBuf::from("out")),
            jobs: o.jobs.unwrap_or(0),
        })
    }

    /// Output directory of one dataset.
    pub fn dataset_dir(&self, d: DatasetId) -> PathBuf {
        self.out.join(d.name())
    }

    /// Model and range paths, falling back to `<data-dir>/brisque/`.
    pub fn model_paths(&self) -> Outcome<(PathBuf, PathBuf)> {
        let model = self
            .model
            .clone()
            .unwrap_or_else(|| self.data_dir.join("brisque").join("allmodel"));
        let range = self
            .range
            .clone()
            .unwrap_or_else(|| self.data_dir.join("brisque").join("allrange"));
        for (what, p) in [("model", &model), ("range", &range)] {
            if !p.is_file() {
                return Err(Failure::config(format!(
                    "BRISQUE {what} file {} not found (use --{what})",
                    p.display()
                )));
            }
        }
        Ok((model, range))
    }
}
