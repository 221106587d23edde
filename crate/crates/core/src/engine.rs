//! Population lifecycle, bound repair, the iteration loop and run recording.
//!
//! The engine knows nothing about snake-specific update rules; those live in
//! a [`Strategy`] implementation (see [`crate::snake::SnakeOptimizer`]). A
//! strategy proposes positions and commits them through a [`StepContext`],
//! which clamps every position into the bounds and evaluates it, so the
//! repair-containment and evaluation-counting rules hold for any strategy.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, RunError};
use crate::rng::{RandomSource, SeededStream};
use crate::snake::SnakeOptimizer;
use crate::stats;

/// Axis-aligned search box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, ConfigError> {
        if lower.len() != upper.len() {
            return Err(ConfigError::BoundsLength {
                lower: lower.len(),
                upper: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(ConfigError::EmptyBounds);
        }
        for (dim, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(ConfigError::InvertedBounds {
                    dim,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval in every dimension.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self, ConfigError> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, position: &[f64]) -> bool {
        position.len() == self.dim()
            && position
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&x, (&lo, &hi))| lo <= x && x <= hi)
    }

    /// Draws a point `lower + r (upper - lower)` with an independent uniform
    /// `r` per dimension.
    pub fn sample<R: RandomSource>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| lo + rng.uniform() * (hi - lo))
            .collect()
    }
}

/// Clips each coordinate into `[lower[d], upper[d]]`.
pub fn clamp(position: &[f64], bounds: &Bounds) -> Vec<f64> {
    let mut out = position.to_vec();
    clamp_in_place(&mut out, bounds);
    out
}

pub(crate) fn clamp_in_place(position: &mut [f64], bounds: &Bounds) {
    debug_assert_eq!(position.len(), bounds.dim());
    for (x, (&lo, &hi)) in position
        .iter_mut()
        .zip(bounds.lower.iter().zip(&bounds.upper))
    {
        // NaN positions are pushed to the lower bound
        if x.is_nan() || *x < lo {
            *x = lo;
        } else if *x > hi {
            *x = hi;
        }
    }
}

/// One candidate solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub position: Vec<f64>,
    pub fitness: f64,
}

/// A minimization problem over a bounded box.
///
/// Implementations must be pure: the same input always yields the same
/// value and no shared state is mutated, so independent runs can be
/// evaluated on different threads.
pub trait Problem: Send + Sync {
    fn name(&self) -> &str;

    fn bounds(&self) -> &Bounds;

    fn dim(&self) -> usize {
        self.bounds().dim()
    }

    /// Fitness to minimize (penalized for constrained problems).
    fn evaluate(&self, x: &[f64]) -> f64;
}

/// Sex-partitioned population plus the best-ever record ("food").
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub males: Vec<Agent>,
    pub females: Vec<Agent>,
    pub food: Agent,
    pub iteration: usize,
    pub max_iterations: usize,
}

/// Male/female sizes for a population of `n`: `N_m = floor(n/2)`,
/// `N_f = n - N_m`.
pub fn sex_split(n: usize) -> (usize, usize) {
    let males = n / 2;
    (males, n - males)
}

impl Population {
    pub fn size(&self) -> usize {
        self.males.len() + self.females.len()
    }

    /// All agents, males first.
    pub fn agents(&self) -> impl Iterator<Item = &Agent> {
        self.males.iter().chain(self.females.iter())
    }

    /// Best agent of the current population; first on ties.
    pub fn current_best(&self) -> &Agent {
        best_of(self.agents()).expect("population is never empty")
    }

    /// Lowers `food` to the current best if the latter is strictly better.
    pub fn refresh_food(&mut self) {
        let best = self.current_best();
        if best.fitness < self.food.fitness {
            self.food = best.clone();
        }
    }
}

/// First agent with minimal fitness.
pub(crate) fn best_of<'a>(agents: impl Iterator<Item = &'a Agent>) -> Option<&'a Agent> {
    agents.fold(None, |best: Option<&Agent>, a| match best {
        Some(b) if b.fitness <= a.fitness => Some(b),
        _ => Some(a),
    })
}

/// Index of the first agent with maximal fitness.
pub(crate) fn worst_index(agents: &[Agent]) -> Option<usize> {
    let mut worst: Option<usize> = None;
    for (i, a) in agents.iter().enumerate() {
        match worst {
            Some(w) if agents[w].fitness >= a.fitness => {}
            _ => worst = Some(i),
        }
    }
    worst
}

/// Evaluation gateway handed to strategies. Clamps, evaluates and counts.
pub struct StepContext<'a, R> {
    problem: &'a dyn Problem,
    pub rng: &'a mut R,
    evaluations: usize,
}

impl<'a, R: RandomSource> StepContext<'a, R> {
    pub fn new(problem: &'a dyn Problem, rng: &'a mut R) -> Self {
        Self {
            problem,
            rng,
            evaluations: 0,
        }
    }

    pub fn bounds(&self) -> &'a Bounds {
        self.problem.bounds()
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Clamps `position` into the bounds and evaluates it.
    pub fn commit(&mut self, mut position: Vec<f64>) -> Result<Agent, RunError> {
        clamp_in_place(&mut position, self.problem.bounds());
        let fitness = self.problem.evaluate(&position);
        self.evaluations += 1;
        if !fitness.is_finite() {
            return Err(RunError::NonFiniteObjective {
                value: fitness,
                position,
            });
        }
        Ok(Agent { position, fitness })
    }
}

/// Draws and evaluates `n` agents uniformly in the bounds, splits them into
/// males (first `floor(n/2)` draws) and females, and sets the food to the
/// best of them.
pub fn init_population<R: RandomSource>(
    ctx: &mut StepContext<'_, R>,
    n: usize,
    max_iterations: usize,
) -> Result<Population, RunError> {
    if n < 4 {
        return Err(ConfigError::PopulationTooSmall(n).into());
    }
    let (n_males, _) = sex_split(n);
    let mut agents = Vec::with_capacity(n);
    for _ in 0..n {
        let position = ctx.bounds().sample(ctx.rng);
        agents.push(ctx.commit(position)?);
    }
    let females = agents.split_off(n_males);
    let males = agents;
    let food = best_of(males.iter().chain(females.iter()))
        .expect("n >= 4")
        .clone();
    Ok(Population {
        males,
        females,
        food,
        iteration: 0,
        max_iterations,
    })
}

/// One iteration of an optimizer.
pub trait Strategy {
    /// Advances `population` by one iteration (`population.iteration` holds
    /// the current `t`). All moves must be committed through `ctx`.
    fn step<R: RandomSource>(
        &mut self,
        population: &mut Population,
        ctx: &mut StepContext<'_, R>,
    ) -> Result<(), RunError>;
}

/// Algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "SO")]
    So,
    #[serde(rename = "MISO")]
    Miso,
    #[serde(rename = "DSO")]
    Dso,
    #[serde(rename = "LSO")]
    Lso,
    #[serde(rename = "BSO")]
    Bso,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::So,
        Algorithm::Miso,
        Algorithm::Dso,
        Algorithm::Lso,
        Algorithm::Bso,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::So => "SO",
            Algorithm::Miso => "MISO",
            Algorithm::Dso => "DSO",
            Algorithm::Lso => "LSO",
            Algorithm::Bso => "BSO",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ConfigError::UnknownAlgorithm {
                name: s.to_string(),
                valid: Algorithm::ALL.map(Algorithm::as_str).join(", "),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub population_size: usize,
    pub max_iterations: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub record_diversity: bool,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, seed: u64) -> Self {
        Self {
            population_size: 30,
            max_iterations: 500,
            seed,
            algorithm,
            record_diversity: false,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population_size < 4 {
            return Err(ConfigError::PopulationTooSmall(self.population_size));
        }
        if self.max_iterations < 1 {
            return Err(ConfigError::NoIterations);
        }
        Ok(())
    }
}

/// Per-iteration population spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversitySample {
    /// Dimension-wise median deviation.
    pub dimension: f64,
    /// Root-sum-square distance to the centroid.
    pub inertia: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best: Agent,
    /// Best-so-far fitness after each iteration.
    pub best_history: Vec<f64>,
    pub diversity_history: Option<Vec<DiversitySample>>,
    pub evaluations: usize,
    pub wall_time: f64,
}

/// Runs `strategy` for `config.max_iterations` iterations.
pub fn run_strategy<S: Strategy, R: RandomSource>(
    strategy: &mut S,
    problem: &dyn Problem,
    config: &RunConfig,
    rng: &mut R,
) -> Result<RunResult, RunError> {
    config.validate()?;
    let started = Instant::now();
    let mut ctx = StepContext::new(problem, rng);
    let mut population = init_population(&mut ctx, config.population_size, config.max_iterations)?;

    let mut best_history = Vec::with_capacity(config.max_iterations);
    let mut diversity = config
        .record_diversity
        .then(|| Vec::with_capacity(config.max_iterations));

    for t in 0..config.max_iterations {
        population.iteration = t;
        strategy.step(&mut population, &mut ctx)?;
        population.refresh_food();
        best_history.push(population.food.fitness);
        if let Some(d) = diversity.as_mut() {
            d.push(DiversitySample {
                dimension: stats::dimension_diversity(&population),
                inertia: stats::inertia_diversity(&population),
            });
        }
    }
    population.iteration = config.max_iterations;

    Ok(RunResult {
        best: population.food,
        best_history,
        diversity_history: diversity,
        evaluations: ctx.evaluations(),
        wall_time: started.elapsed().as_secs_f64(),
    })
}

/// Runs the configured snake variant with a [`SeededStream`] seeded from
/// `config.seed`.
pub fn run(problem: &dyn Problem, config: &RunConfig) -> Result<RunResult, RunError> {
    let mut rng = SeededStream::new(config.seed);
    let mut strategy = SnakeOptimizer::new(config.algorithm);
    run_strategy(&mut strategy, problem, config, &mut rng)
}
