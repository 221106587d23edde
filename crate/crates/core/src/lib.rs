//! Snake Optimizer (SO) and its multi-strategy improved variant (MISO), together
//! with the ablation variants DSO, LSO and BSO.
//!
//! The crate is organised around a small engine that owns the population
//! lifecycle and an algorithm-specific [`snake::SnakeOptimizer`] step strategy.
//! Problems implement [`engine::Problem`]; three suites ship with the crate:
//!
//! - [`benchmarks`]: shifted/rotated classical test functions,
//! - [`engineering`]: six constrained engineering design problems,
//! - [`uav`]: 3D UAV path planning over an analytic terrain.
//!
//! [`stats`] holds the nonparametric tests and population diagnostics, and
//! [`experiment`] runs seeded batteries and writes plot-ready output files.

pub mod benchmarks;
pub mod engine;
pub mod engineering;
pub mod error;
pub mod experiment;
pub mod rng;
pub mod snake;
pub mod stats;
pub mod uav;

pub use engine::{clamp, run, Agent, Algorithm, Bounds, Population, Problem, RunConfig, RunResult};
pub use error::{ConfigError, RunError};
pub use rng::{RandomSource, ScriptedStream, SeededStream};
