//! Command-line front end for the snake optimizer experiment runner.
//!
//! Flags override values read from an optional TOML file, which in turn
//! override the library defaults (population 30, 500 iterations, 30 runs).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Parser;
use serde::Deserialize;
use snakeopt::experiment::{ExperimentConfig, ProblemKind};
use snakeopt::Algorithm;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "snakeopt",
    version,
    about = "Run seeded snake optimizer experiment batteries"
)]
pub struct Cli {
    /// Algorithms to run (SO, MISO, DSO, LSO, BSO); repeat or comma-separate.
    #[arg(long = "algorithm", value_delimiter = ',')]
    pub algorithms: Vec<String>,
    /// Problems: benchmark families, engineering ids or `uav`.
    #[arg(long = "problem", value_delimiter = ',')]
    pub problems: Vec<String>,
    /// Dimensions for benchmark families.
    #[arg(long = "dim", value_delimiter = ',')]
    pub dims: Vec<usize>,
    #[arg(long)]
    pub pop: Option<usize>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// UAV cost weights `w1,w2,w3` (nonnegative, summing to 1).
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub weights: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed every algorithm independently instead of pairing by run index.
    #[arg(long)]
    pub unpaired: bool,
    #[arg(long)]
    pub record_diversity: bool,
    /// TOML file with any of the settings above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Settings accepted in a TOML configuration file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub algorithms: Option<Vec<String>>,
    pub problems: Option<Vec<String>>,
    pub dims: Option<Vec<usize>>,
    pub population_size: Option<usize>,
    pub max_iterations: Option<usize>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub weights: Option<Vec<f64>>,
    pub output_dir: Option<PathBuf>,
    pub unpaired: Option<bool>,
    pub record_diversity: Option<bool>,
}

pub fn read_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
}

fn parse_weights(w: &[f64]) -> Result<[f64; 3]> {
    match w {
        [a, b, c] => Ok([*a, *b, *c]),
        _ => bail!("--weights needs exactly three values, got {}", w.len()),
    }
}

fn non_empty<T>(flag: Vec<T>) -> Option<Vec<T>> {
    (!flag.is_empty()).then_some(flag)
}

/// Resolves flags and an optional config file into a validated
/// [`ExperimentConfig`].
pub fn parse_config(cli: Cli) -> Result<ExperimentConfig> {
    let file = match &cli.config {
        Some(path) => read_file_config(path)?,
        None => FileConfig::default(),
    };
    let mut config = ExperimentConfig::default();

    if let Some(names) = non_empty(cli.algorithms).or(file.algorithms) {
        config.algorithms = names
            .iter()
            .map(|n| n.parse::<Algorithm>())
            .collect::<Result<_, _>>()?;
    }
    if let Some(names) = non_empty(cli.problems).or(file.problems) {
        for n in &names {
            n.parse::<ProblemKind>()?;
        }
        config.problems = names
            .iter()
            .map(|n| n.trim().to_ascii_lowercase())
            .collect();
    }
    if let Some(dims) = non_empty(cli.dims).or(file.dims) {
        config.dims = dims;
    }
    if let Some(p) = cli.pop.or(file.population_size) {
        config.population_size = p;
    }
    if let Some(t) = cli.iters.or(file.max_iterations) {
        config.max_iterations = t;
    }
    if let Some(r) = cli.runs.or(file.runs) {
        config.runs = r;
    }
    if let Some(s) = cli.seed.or(file.seed) {
        config.base_seed = s;
    }
    if let Some(w) = cli.weights.or(file.weights) {
        config.uav_weights = parse_weights(&w)?;
    }
    if let Some(out) = cli.out.or(file.output_dir) {
        config.output_dir = out;
    }
    config.unpaired = cli.unpaired || file.unpaired.unwrap_or(false);
    config.record_diversity = cli.record_diversity || file.record_diversity.unwrap_or(false);

    config.validate()?;
    Ok(config)
}

/// Parses an argument list (program name first) into a config.
pub fn parse_args<I, T>(args: I) -> Result<ExperimentConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    parse_config(Cli::try_parse_from(args)?)
}
