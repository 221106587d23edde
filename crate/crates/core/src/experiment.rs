//! Seeded experiment batteries: algorithm × problem × runs.
//!
//! [`execute`] runs a battery in memory (runs are spread over rayon workers,
//! each with its own random stream) and [`write_outputs`] serializes it:
//!
//! - `convergence/<algo>_<problem>_<run>.csv` with `iteration,best_fitness`,
//! - `diversity/<algo>_<problem>_<run>.csv` when diversity is recorded,
//! - `summary.json` with per-cell statistics, Wilcoxon p-values against MISO
//!   and Friedman mean ranks,
//! - `timings.csv` with wall time and evaluation counts per run,
//! - `instances/<problem>.txt` for every benchmark instance,
//! - `uav/<algo>_best.txt` waypoint listings for the UAV problem.
//!
//! `summary.json` depends only on the configuration; wall times live in
//! `timings.csv` so reruns produce byte-identical summaries.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchmarks::{random_instance, BaseFunction, BenchmarkProblem, BenchmarkSpec};
use crate::engine::{run, Algorithm, DiversitySample, Problem, RunConfig};
use crate::engineering::{ConstrainedProblem, EngineeringProblem, ACCEPTANCE_TOLERANCE};
use crate::error::ConfigError;
use crate::stats::{self, SampleSet, Summary};
use crate::uav::{PathSpec, UavProblem, DEFAULT_WEIGHTS};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot serialize summary: {0}")]
    Json(#[from] serde_json::Error),
}

/// A problem family as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Benchmark(BaseFunction),
    Engineering(EngineeringProblem),
    Uav,
}

pub fn valid_problem_names() -> String {
    let mut names: Vec<&str> = BaseFunction::ALL.iter().map(|b| b.as_str()).collect();
    names.extend(EngineeringProblem::ALL.iter().map(|p| p.id()));
    names.push("uav");
    names.join(", ")
}

impl std::str::FromStr for ProblemKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let name = s.trim();
        if name.eq_ignore_ascii_case("uav") {
            return Ok(ProblemKind::Uav);
        }
        if let Ok(p) = name.parse::<EngineeringProblem>() {
            return Ok(ProblemKind::Engineering(p));
        }
        if let Ok(b) = name.parse::<BaseFunction>() {
            return Ok(ProblemKind::Benchmark(b));
        }
        Err(ConfigError::UnknownProblem {
            name: s.to_string(),
            valid: valid_problem_names(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub algorithms: Vec<Algorithm>,
    /// Problem family names; benchmark families expand over `dims`.
    pub problems: Vec<String>,
    pub dims: Vec<usize>,
    pub population_size: usize,
    pub max_iterations: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    pub unpaired: bool,
    pub record_diversity: bool,
    pub uav_weights: [f64; 3],
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
            problems: EngineeringProblem::ALL
                .iter()
                .map(|p| p.id().to_string())
                .collect(),
            dims: vec![30],
            population_size: 30,
            max_iterations: 500,
            runs: 30,
            base_seed: 0,
            output_dir: PathBuf::from("results"),
            unpaired: false,
            record_diversity: false,
            uav_weights: DEFAULT_WEIGHTS,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.algorithms.is_empty() {
            return Err(ConfigError::Invalid("no algorithms selected".into()));
        }
        if self.problems.is_empty() {
            return Err(ConfigError::Invalid("no problems selected".into()));
        }
        if self.runs == 0 {
            return Err(ConfigError::Invalid("runs must be at least 1".into()));
        }
        RunConfig {
            population_size: self.population_size,
            max_iterations: self.max_iterations,
            seed: 0,
            algorithm: Algorithm::So,
            record_diversity: false,
        }
        .validate()?;
        crate::uav::validate_weights(&self.uav_weights)?;
        for p in &self.problems {
            if let ProblemKind::Benchmark(_) = p.parse::<ProblemKind>()? {
                if self.dims.is_empty() {
                    return Err(ConfigError::Invalid(
                        "benchmark problems need at least one dimension".into(),
                    ));
                }
                if let Some(d) = self.dims.iter().find(|&&d| d < 2) {
                    return Err(ConfigError::Invalid(format!(
                        "benchmark dimension must be at least 2, got {d}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Concrete problem instances in configuration order.
    pub fn instances(&self) -> Result<Vec<ProblemInstance>, ConfigError> {
        let mut out = Vec::new();
        for name in &self.problems {
            match name.parse::<ProblemKind>()? {
                ProblemKind::Benchmark(base) => {
                    for &dim in &self.dims {
                        let id = format!("{base}_d{dim}");
                        let spec = random_instance(base, dim, instance_seed(self.base_seed, &id))?;
                        out.push(ProblemInstance {
                            id,
                            source: InstanceSource::Benchmark(Box::new(spec)),
                        });
                    }
                }
                ProblemKind::Engineering(kind) => out.push(ProblemInstance {
                    id: kind.id().to_string(),
                    source: InstanceSource::Engineering(kind),
                }),
                ProblemKind::Uav => out.push(ProblemInstance {
                    id: "uav".to_string(),
                    source: InstanceSource::Uav(PathSpec::with_weights(self.uav_weights)?),
                }),
            }
        }
        Ok(out)
    }

    /// Seed for `run` of `algorithm` on `problem_id`. Paired batteries leave
    /// the algorithm out so every algorithm shares the initial population of
    /// a run index.
    pub fn run_seed(&self, algorithm: Algorithm, problem_id: &str, run: usize) -> u64 {
        let algo = if self.unpaired { Some(algorithm) } else { None };
        run_seed(self.base_seed, algo, problem_id, run)
    }
}

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub id: String,
    pub source: InstanceSource,
}

#[derive(Debug, Clone)]
pub enum InstanceSource {
    Benchmark(Box<BenchmarkSpec>),
    Engineering(EngineeringProblem),
    Uav(PathSpec),
}

impl ProblemInstance {
    pub fn build(&self) -> Result<Box<dyn Problem>, ConfigError> {
        Ok(match &self.source {
            InstanceSource::Benchmark(spec) => Box::new(BenchmarkProblem::new((**spec).clone())),
            InstanceSource::Engineering(kind) => Box::new(ConstrainedProblem::new(*kind)),
            InstanceSource::Uav(spec) => Box::new(UavProblem::new(spec.clone())?),
        })
    }

    /// Whether `position` satisfies the problem's constraints; `None` for
    /// unconstrained benchmarks.
    pub fn feasible(&self, position: &[f64]) -> Option<bool> {
        match &self.source {
            InstanceSource::Benchmark(_) => None,
            InstanceSource::Engineering(kind) => Some(
                kind.evaluate(position)
                    .1
                    .feasible_within(ACCEPTANCE_TOLERANCE),
            ),
            InstanceSource::Uav(spec) => UavProblem::new(spec.clone())
                .and_then(|p| p.breakdown(position))
                .map(|c| c.collision == 0.0)
                .ok(),
        }
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(mut hash: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// `base_seed` plus an FNV-1a hash of the (optional algorithm, problem, run)
/// key, stable across platforms and releases.
pub fn run_seed(base_seed: u64, algorithm: Option<Algorithm>, problem_id: &str, run: usize) -> u64 {
    let mut h = FNV_OFFSET;
    if let Some(a) = algorithm {
        h = fnv1a(h, a.as_str().as_bytes());
        h = fnv1a(h, &[0xff]);
    }
    h = fnv1a(h, problem_id.as_bytes());
    h = fnv1a(h, &[0xff]);
    h = fnv1a(h, &(run as u64).to_le_bytes());
    base_seed.wrapping_add(h)
}

fn instance_seed(base_seed: u64, problem_id: &str) -> u64 {
    let h = fnv1a(fnv1a(FNV_OFFSET, b"instance\xff"), problem_id.as_bytes());
    base_seed.wrapping_add(h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub best_fitness: f64,
    pub best_position: Vec<f64>,
    pub history: Vec<f64>,
    pub diversity: Option<Vec<DiversitySample>>,
    pub evaluations: usize,
    pub wall_time: f64,
    pub feasible: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub problem: String,
    pub run: usize,
    pub seed: u64,
    pub outcome: Result<RunOutcome, String>,
}

#[derive(Debug, Clone)]
pub struct Battery {
    pub config: ExperimentConfig,
    pub instances: Vec<ProblemInstance>,
    /// Ordered by problem, then algorithm, then run.
    pub records: Vec<RunRecord>,
}

impl Battery {
    pub fn cell(&self, algorithm: Algorithm, problem: &str) -> impl Iterator<Item = &RunRecord> {
        let problem = problem.to_string();
        self.records
            .iter()
            .filter(move |r| r.algorithm == algorithm && r.problem == problem)
    }

    /// Final fitness of every completed run of a cell, in run order.
    pub fn finals(&self, algorithm: Algorithm, problem: &str) -> Vec<f64> {
        self.cell(algorithm, problem)
            .filter_map(|r| r.outcome.as_ref().ok().map(|o| o.best_fitness))
            .collect()
    }

    pub fn summary(&self) -> ExperimentSummary {
        build_summary(self)
    }
}

/// Runs the whole battery in memory.
pub fn execute(config: &ExperimentConfig) -> Result<Battery, ExperimentError> {
    config.validate()?;
    let instances = config.instances()?;
    let problems = instances
        .iter()
        .map(|i| i.build())
        .collect::<Result<Vec<_>, _>>()?;

    let mut jobs = Vec::new();
    for p in 0..instances.len() {
        for &algorithm in &config.algorithms {
            for r in 0..config.runs {
                jobs.push((p, algorithm, r));
            }
        }
    }

    let records = jobs
        .par_iter()
        .map(|&(p, algorithm, r)| {
            let instance = &instances[p];
            let seed = config.run_seed(algorithm, &instance.id, r);
            let run_config = RunConfig {
                population_size: config.population_size,
                max_iterations: config.max_iterations,
                seed,
                algorithm,
                record_diversity: config.record_diversity,
            };
            let outcome = run(problems[p].as_ref(), &run_config)
                .map(|res| RunOutcome {
                    feasible: instance.feasible(&res.best.position),
                    best_fitness: res.best.fitness,
                    best_position: res.best.position,
                    history: res.best_history,
                    diversity: res.diversity_history,
                    evaluations: res.evaluations,
                    wall_time: res.wall_time,
                })
                .map_err(|e| e.to_string());
            RunRecord {
                algorithm,
                problem: instance.id.clone(),
                run: r,
                seed,
                outcome,
            }
        })
        .collect();

    Ok(Battery {
        config: config.clone(),
        instances,
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub algorithms: Vec<Algorithm>,
    pub problems: Vec<String>,
    pub population_size: usize,
    pub max_iterations: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub seed_pairing: String,
    pub uav_weights: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub completed_runs: usize,
    #[serde(flatten)]
    pub stats: Option<Summary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feasible_runs: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub metadata: Metadata,
    /// Algorithm, then problem.
    pub results: BTreeMap<String, BTreeMap<String, CellSummary>>,
    /// Rank-sum p-value of each algorithm against MISO, per problem.
    pub wilcoxon_vs_miso: BTreeMap<String, BTreeMap<String, f64>>,
    /// Friedman mean rank of each algorithm over problems, ranked on mean
    /// final fitness.
    pub friedman_mean_ranks: BTreeMap<String, f64>,
}

fn build_summary(battery: &Battery) -> ExperimentSummary {
    let config = &battery.config;
    let problem_ids: Vec<String> = battery.instances.iter().map(|i| i.id.clone()).collect();
    let has_uav = battery
        .instances
        .iter()
        .any(|i| matches!(i.source, InstanceSource::Uav(_)));

    let mut results: BTreeMap<String, BTreeMap<String, CellSummary>> = BTreeMap::new();
    for &algorithm in &config.algorithms {
        let row = results.entry(algorithm.to_string()).or_default();
        for id in &problem_ids {
            let finals = battery.finals(algorithm, id);
            let feasible: Vec<bool> = battery
                .cell(algorithm, id)
                .filter_map(|r| r.outcome.as_ref().ok().and_then(|o| o.feasible))
                .collect();
            let failures = battery
                .cell(algorithm, id)
                .filter_map(|r| {
                    r.outcome
                        .as_ref()
                        .err()
                        .map(|e| format!("run {}: {e}", r.run))
                })
                .collect();
            row.insert(
                id.clone(),
                CellSummary {
                    completed_runs: finals.len(),
                    stats: SampleSet::new(finals).ok().map(|s| stats::summarize(&s)),
                    feasible_runs: (!feasible.is_empty())
                        .then(|| feasible.iter().filter(|&&f| f).count()),
                    failures,
                },
            );
        }
    }

    let mut wilcoxon_vs_miso: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    if config.algorithms.contains(&Algorithm::Miso) {
        for &algorithm in config.algorithms.iter().filter(|&&a| a != Algorithm::Miso) {
            let row = wilcoxon_vs_miso.entry(algorithm.to_string()).or_default();
            for id in &problem_ids {
                let a = SampleSet::new(battery.finals(algorithm, id));
                let m = SampleSet::new(battery.finals(Algorithm::Miso, id));
                if let (Ok(a), Ok(m)) = (a, m) {
                    row.insert(id.clone(), stats::wilcoxon_rank_sum(&a, &m));
                }
            }
        }
    }

    let mut friedman_mean_ranks = BTreeMap::new();
    let table: Vec<Vec<f64>> = problem_ids
        .iter()
        .filter_map(|id| {
            config
                .algorithms
                .iter()
                .map(|&a| {
                    results[a.as_str()][id]
                        .stats
                        .as_ref()
                        .map(|s| s.mean)
                        .filter(|m| m.is_finite())
                })
                .collect::<Option<Vec<f64>>>()
        })
        .collect();
    if let Ok(ranks) = stats::friedman_mean_rank(&table) {
        for (a, r) in config.algorithms.iter().zip(ranks.mean_ranks) {
            friedman_mean_ranks.insert(a.to_string(), r);
        }
    }

    ExperimentSummary {
        metadata: Metadata {
            algorithms: config.algorithms.clone(),
            problems: problem_ids,
            population_size: config.population_size,
            max_iterations: config.max_iterations,
            runs: config.runs,
            base_seed: config.base_seed,
            seed_pairing: if config.unpaired {
                "unpaired"
            } else {
                "paired"
            }
            .to_string(),
            uav_weights: has_uav.then_some(config.uav_weights),
        },
        results,
        wilcoxon_vs_miso,
        friedman_mean_ranks,
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), ExperimentError> {
    fs::write(path, contents).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<(), ExperimentError> {
    fs::create_dir_all(path).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn convergence_csv(history: &[f64]) -> String {
    let mut out = String::from("iteration,best_fitness\n");
    for (t, f) in history.iter().enumerate() {
        let _ = writeln!(out, "{t},{f}");
    }
    out
}

pub fn diversity_csv(history: &[DiversitySample]) -> String {
    let dims: Vec<f64> = history.iter().map(|d| d.dimension).collect();
    let profile = stats::explore_exploit_profile(&dims);
    let mut out = String::from(
        "iteration,dimension_diversity,inertia_diversity,exploration_pct,exploitation_pct\n",
    );
    for (t, (d, (xpl, xpt))) in history.iter().zip(profile).enumerate() {
        let _ = writeln!(out, "{t},{},{},{xpl},{xpt}", d.dimension, d.inertia);
    }
    out
}

pub fn summary_json(summary: &ExperimentSummary) -> Result<String, ExperimentError> {
    let mut s = serde_json::to_string_pretty(summary)?;
    s.push('\n');
    Ok(s)
}

/// Writes every output file of `battery` under its configured output
/// directory.
pub fn write_outputs(battery: &Battery) -> Result<ExperimentSummary, ExperimentError> {
    let out = &battery.config.output_dir;
    let convergence = out.join("convergence");
    create_dir(&convergence)?;
    if battery.config.record_diversity {
        create_dir(&out.join("diversity"))?;
    }

    let mut timings = String::from("algorithm,problem,run,seed,wall_time_s,evaluations,status\n");
    for r in &battery.records {
        let stem = format!("{}_{}_{}", r.algorithm, r.problem, r.run);
        match &r.outcome {
            Ok(o) => {
                write_file(
                    &convergence.join(format!("{stem}.csv")),
                    &convergence_csv(&o.history),
                )?;
                if let Some(d) = &o.diversity {
                    write_file(
                        &out.join("diversity").join(format!("{stem}.csv")),
                        &diversity_csv(d),
                    )?;
                }
                let _ = writeln!(
                    timings,
                    "{},{},{},{},{:.6},{},ok",
                    r.algorithm, r.problem, r.run, r.seed, o.wall_time, o.evaluations
                );
            }
            Err(_) => {
                let _ = writeln!(
                    timings,
                    "{},{},{},{},,,failed",
                    r.algorithm, r.problem, r.run, r.seed
                );
            }
        }
    }
    write_file(&out.join("timings.csv"), &timings)?;

    for instance in &battery.instances {
        match &instance.source {
            InstanceSource::Benchmark(spec) => {
                let dir = out.join("instances");
                create_dir(&dir)?;
                write_file(&dir.join(format!("{}.txt", instance.id)), &spec.to_text())?;
            }
            InstanceSource::Uav(spec) => {
                let dir = out.join("uav");
                create_dir(&dir)?;
                let problem = UavProblem::new(spec.clone())?;
                for &algorithm in &battery.config.algorithms {
                    let best = battery
                        .cell(algorithm, &instance.id)
                        .filter_map(|r| r.outcome.as_ref().ok().map(|o| (r.seed, o)))
                        .min_by(|a, b| a.1.best_fitness.total_cmp(&b.1.best_fitness));
                    if let Some((seed, o)) = best {
                        let path = problem.path(&o.best_position)?;
                        let text = crate::uav::waypoint_text(&path, &spec.weights, seed);
                        write_file(&dir.join(format!("{algorithm}_best.txt")), &text)?;
                    }
                }
            }
            InstanceSource::Engineering(_) => {}
        }
    }

    let summary = battery.summary();
    write_file(&out.join("summary.json"), &summary_json(&summary)?)?;
    Ok(summary)
}

/// [`execute`] followed by [`write_outputs`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary, ExperimentError> {
    let battery = execute(config)?;
    write_outputs(&battery)
}
