//! 3D UAV path planning over an analytic terrain.
//!
//! A decision vector holds `n_control` interior waypoints as consecutive
//! `(x, y, z)` triples. The full control sequence (start, interiors, goal) is
//! interpolated by a natural cubic spline per coordinate and sampled into a
//! [`DiscretePath`], which is costed as a weighted sum of length, altitude
//! variation and turning, plus a collision penalty against the terrain.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::engine::{Bounds, Problem};
use crate::error::ConfigError;

pub type Point3 = [f64; 3];

pub const DEFAULT_PENALTY: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerrainModel {
    pub safety_margin: f64,
}

impl Default for TerrainModel {
    fn default() -> Self {
        Self { safety_margin: 1.0 }
    }
}

impl TerrainModel {
    pub fn height(&self, x: f64, y: f64) -> f64 {
        terrain_height(x, y)
    }
}

pub fn terrain_height(x: f64, y: f64) -> f64 {
    let r2 = x * x + y * y;
    (y + 1.0).sin() + x.sin() + r2.cos() + 2.0 * y.cos() + r2.sin()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub start: Point3,
    pub goal: Point3,
    pub n_control: usize,
    pub n_samples: usize,
    pub weights: [f64; 3],
}

impl Default for PathSpec {
    fn default() -> Self {
        Self {
            start: [0.0, 0.0, 20.0],
            goal: [200.0, 200.0, 30.0],
            n_control: 5,
            n_samples: 100,
            weights: DEFAULT_WEIGHTS,
        }
    }
}

pub const DEFAULT_WEIGHTS: [f64; 3] = [0.8, 0.1, 0.1];

pub fn validate_weights(weights: &[f64; 3]) -> Result<(), ConfigError> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(ConfigError::Invalid(format!(
            "UAV weights must be nonnegative, got {weights:?}"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(ConfigError::Invalid(format!(
            "UAV weights must sum to 1, got {sum}"
        )));
    }
    Ok(())
}

impl PathSpec {
    pub fn with_weights(weights: [f64; 3]) -> Result<Self, ConfigError> {
        let spec = Self {
            weights,
            ..Self::default()
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        validate_weights(&self.weights)?;
        if self.n_control == 0 {
            return Err(ConfigError::Invalid(
                "UAV path needs at least one interior control point".into(),
            ));
        }
        if self.n_samples < self.n_control + 2 {
            return Err(ConfigError::Invalid(format!(
                "n_samples ({}) must be at least n_control + 2 ({})",
                self.n_samples,
                self.n_control + 2
            )));
        }
        Ok(())
    }

    pub fn decision_dim(&self) -> usize {
        3 * self.n_control
    }

    pub fn bounds(&self) -> Bounds {
        let mut lower = Vec::with_capacity(self.decision_dim());
        let mut upper = Vec::with_capacity(self.decision_dim());
        for _ in 0..self.n_control {
            lower.extend([0.0, 0.0, 0.0]);
            upper.extend([200.0, 200.0, 60.0]);
        }
        Bounds::new(lower, upper).expect("static bounds are valid")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePath {
    pub points: Vec<Point3>,
}

/// Start, interior waypoints in decision order, goal.
pub fn decode(decision: &[f64], spec: &PathSpec) -> Result<Vec<Point3>, ConfigError> {
    if decision.len() != spec.decision_dim() {
        return Err(ConfigError::DimensionMismatch {
            expected: spec.decision_dim(),
            actual: decision.len(),
        });
    }
    let mut controls = Vec::with_capacity(spec.n_control + 2);
    controls.push(spec.start);
    controls.extend(decision.chunks_exact(3).map(|c| [c[0], c[1], c[2]]));
    controls.push(spec.goal);
    Ok(controls)
}

/// Second derivatives of the natural cubic spline through `y` on unit knots.
fn natural_second_derivatives(y: &[f64]) -> Vec<f64> {
    let k = y.len();
    let mut m = vec![0.0; k];
    if k < 3 {
        return m;
    }
    // interior system: m[i-1] + 4 m[i] + m[i+1] = 6 (y[i-1] - 2 y[i] + y[i+1])
    let n = k - 2;
    let mut diag = vec![4.0; n];
    let mut rhs: Vec<f64> = (1..k - 1)
        .map(|i| 6.0 * (y[i - 1] - 2.0 * y[i] + y[i + 1]))
        .collect();
    for i in 1..n {
        let w = 1.0 / diag[i - 1];
        diag[i] -= w;
        rhs[i] -= w * rhs[i - 1];
    }
    m[n] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        m[i + 1] = (rhs[i] - m[i + 2]) / diag[i];
    }
    m
}

fn spline_eval(y: &[f64], m: &[f64], s: f64) -> f64 {
    let last = y.len() - 1;
    let j = (s.floor() as usize).min(last - 1);
    let t = s - j as f64;
    let u = 1.0 - t;
    u * y[j] + t * y[j + 1] + ((u * u * u - u) * m[j] + (t * t * t - t) * m[j + 1]) / 6.0
}

/// Samples the natural cubic spline through `controls` at `n_samples`
/// equally spaced knot parameters.
pub fn spline_path(controls: &[Point3], n_samples: usize) -> DiscretePath {
    assert!(
        controls.len() >= 2,
        "spline needs at least two control points"
    );
    assert!(n_samples >= 2, "spline needs at least two samples");
    let k = controls.len();
    let coords: Vec<Vec<f64>> = (0..3)
        .map(|c| controls.iter().map(|p| p[c]).collect())
        .collect();
    let second: Vec<Vec<f64>> = coords
        .iter()
        .map(|y| natural_second_derivatives(y))
        .collect();
    let span = (k - 1) as f64;
    let mut points = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let s = i as f64 * span / (n_samples - 1) as f64;
        points.push([
            spline_eval(&coords[0], &second[0], s),
            spline_eval(&coords[1], &second[1], s),
            spline_eval(&coords[2], &second[2], s),
        ]);
    }
    points[0] = controls[0];
    points[n_samples - 1] = controls[k - 1];
    DiscretePath { points }
}

fn sub(a: &Point3, b: &Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(v: &Point3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn path_length(path: &DiscretePath) -> f64 {
    path.points
        .windows(2)
        .map(|w| norm(&sub(&w[1], &w[0])))
        .sum()
}

pub fn height_cost(path: &DiscretePath) -> f64 {
    let n = path.points.len() as f64;
    let mean = path.points.iter().map(|p| p[2]).sum::<f64>() / n;
    path.points
        .iter()
        .map(|p| (p[2] - mean).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn smoothness_cost(path: &DiscretePath) -> f64 {
    let segments: Vec<Point3> = path.points.windows(2).map(|w| sub(&w[1], &w[0])).collect();
    segments
        .windows(2)
        .map(|pair| {
            let (a, b) = (&pair[0], &pair[1]);
            let (na, nb) = (norm(a), norm(b));
            if na == 0.0 || nb == 0.0 {
                return 0.0;
            }
            let cos = ((a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / (na * nb)).clamp(-1.0, 1.0);
            1.0 - cos
        })
        .sum()
}

pub fn collision_penalty(path: &DiscretePath, terrain: &TerrainModel) -> f64 {
    path.points
        .iter()
        .map(|p| (terrain.height(p[0], p[1]) + terrain.safety_margin - p[2]).max(0.0))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub length: f64,
    pub height: f64,
    pub smoothness: f64,
    pub collision: f64,
    pub total: f64,
}

pub fn cost_breakdown(
    path: &DiscretePath,
    weights: &[f64; 3],
    terrain: &TerrainModel,
    penalty_coefficient: f64,
) -> CostBreakdown {
    let length = path_length(path);
    let height = height_cost(path);
    let smoothness = smoothness_cost(path);
    let collision = collision_penalty(path, terrain);
    let total = weights[0] * length
        + weights[1] * height
        + weights[2] * smoothness
        + penalty_coefficient * collision;
    CostBreakdown {
        length,
        height,
        smoothness,
        collision,
        total,
    }
}

pub fn total_cost(
    decision: &[f64],
    spec: &PathSpec,
    terrain: &TerrainModel,
    penalty_coefficient: f64,
) -> Result<f64, ConfigError> {
    let controls = decode(decision, spec)?;
    let path = spline_path(&controls, spec.n_samples);
    Ok(cost_breakdown(&path, &spec.weights, terrain, penalty_coefficient).total)
}

/// Plain-text waypoint listing: a `#` header carrying weights and seed, then
/// one `x y z` line per sample.
pub fn waypoint_text(path: &DiscretePath, weights: &[f64; 3], seed: u64) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# weights={} {} {} seed={}",
        weights[0], weights[1], weights[2], seed
    );
    for p in &path.points {
        let _ = writeln!(out, "{} {} {}", p[0], p[1], p[2]);
    }
    out
}

#[derive(Debug, Clone)]
pub struct UavProblem {
    pub spec: PathSpec,
    pub terrain: TerrainModel,
    pub penalty_coefficient: f64,
    bounds: Bounds,
}

impl UavProblem {
    pub fn new(spec: PathSpec) -> Result<Self, ConfigError> {
        spec.validate()?;
        let bounds = spec.bounds();
        Ok(Self {
            spec,
            terrain: TerrainModel::default(),
            penalty_coefficient: DEFAULT_PENALTY,
            bounds,
        })
    }

    pub fn path(&self, decision: &[f64]) -> Result<DiscretePath, ConfigError> {
        let controls = decode(decision, &self.spec)?;
        Ok(spline_path(&controls, self.spec.n_samples))
    }

    pub fn breakdown(&self, decision: &[f64]) -> Result<CostBreakdown, ConfigError> {
        let path = self.path(decision)?;
        Ok(cost_breakdown(
            &path,
            &self.spec.weights,
            &self.terrain,
            self.penalty_coefficient,
        ))
    }
}

impl Problem for UavProblem {
    fn name(&self) -> &str {
        "uav"
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        total_cost(x, &self.spec, &self.terrain, self.penalty_coefficient)
            .expect("decision length matches problem bounds")
    }
}
