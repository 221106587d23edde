//! Shifted and rotated classical test functions.
//!
//! An instance evaluates `f_base(R (x - o)) + bias`, where `o` is the shift,
//! `R` an orthogonal rotation and every base function has its global minimum
//! 0 at the origin. The optimum of the instance is therefore `bias` at `o`.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{Bounds, Problem};
use crate::error::ConfigError;
use crate::rng::{RandomSource, SeededStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseFunction {
    Sphere,
    Rastrigin,
    Rosenbrock,
    Ackley,
    Griewank,
    Schwefel,
    Levy,
    Zakharov,
}

impl BaseFunction {
    pub const ALL: [BaseFunction; 8] = [
        BaseFunction::Sphere,
        BaseFunction::Rastrigin,
        BaseFunction::Rosenbrock,
        BaseFunction::Ackley,
        BaseFunction::Griewank,
        BaseFunction::Schwefel,
        BaseFunction::Levy,
        BaseFunction::Zakharov,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BaseFunction::Sphere => "sphere",
            BaseFunction::Rastrigin => "rastrigin",
            BaseFunction::Rosenbrock => "rosenbrock",
            BaseFunction::Ackley => "ackley",
            BaseFunction::Griewank => "griewank",
            BaseFunction::Schwefel => "schwefel",
            BaseFunction::Levy => "levy",
            BaseFunction::Zakharov => "zakharov",
        }
    }

    /// Optimum offset used by [`random_instance`], `100 (k + 1)` for the
    /// `k`-th base function.
    pub fn default_bias(self) -> f64 {
        let k = BaseFunction::ALL.iter().position(|&b| b == self).unwrap();
        100.0 * (k + 1) as f64
    }

    /// Unshifted, unrotated value; 0 at the origin.
    pub fn value(self, z: &[f64]) -> f64 {
        use std::f64::consts::{E, PI, TAU};
        let d = z.len() as f64;
        match self {
            BaseFunction::Sphere => z.iter().map(|v| v * v).sum(),
            BaseFunction::Rastrigin => z
                .iter()
                .map(|v| v * v + 10.0 * (1.0 - (TAU * v).cos()))
                .sum(),
            BaseFunction::Rosenbrock => z
                .windows(2)
                .map(|w| {
                    let (a, b) = (w[0] + 1.0, w[1] + 1.0);
                    100.0 * (b - a * a).powi(2) + (a - 1.0).powi(2)
                })
                .sum(),
            BaseFunction::Ackley => {
                let sq = z.iter().map(|v| v * v).sum::<f64>() / d;
                let cs = z.iter().map(|v| (TAU * v).cos()).sum::<f64>() / d;
                20.0 * (1.0 - (-0.2 * sq.sqrt()).exp()) + (E - cs.exp())
            }
            BaseFunction::Griewank => {
                let sum = z.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let prod: f64 = z
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                sum + (1.0 - prod)
            }
            // Schwefel's problem 1.2 (cumulative sums)
            BaseFunction::Schwefel => {
                let mut acc = 0.0;
                z.iter()
                    .map(|v| {
                        acc += v;
                        acc * acc
                    })
                    .sum()
            }
            // w = 1 + z/4, written so that every term vanishes exactly at z = 0
            BaseFunction::Levy => {
                let n = z.len();
                let head = (PI * z[0] / 4.0).sin().powi(2);
                let body: f64 = z[..n - 1]
                    .iter()
                    .map(|v| {
                        let w = 1.0 + v / 4.0;
                        (v / 4.0).powi(2) * (1.0 + 10.0 * (PI * w + 1.0).sin().powi(2))
                    })
                    .sum();
                let last = z[n - 1];
                let tail = (last / 4.0).powi(2) * (1.0 + (PI * last / 2.0).sin().powi(2));
                head + body + tail
            }
            BaseFunction::Zakharov => {
                let sq: f64 = z.iter().map(|v| v * v).sum();
                let lin: f64 = z
                    .iter()
                    .enumerate()
                    .map(|(i, v)| 0.5 * (i + 1) as f64 * v)
                    .sum();
                sq + lin.powi(2) + lin.powi(4)
            }
        }
    }
}

impl fmt::Display for BaseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BaseFunction {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaseFunction::ALL
            .into_iter()
            .find(|b| b.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ConfigError::UnknownProblem {
                name: s.to_string(),
                valid: BaseFunction::ALL.map(BaseFunction::as_str).join(", "),
            })
    }
}

/// A concrete shifted/rotated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub base: BaseFunction,
    pub dim: usize,
    pub shift: Vec<f64>,
    /// Row-major `dim × dim` orthogonal matrix.
    pub rotation: Vec<f64>,
    pub domain: Bounds,
    pub bias: f64,
}

pub const DEFAULT_DOMAIN: (f64, f64) = (-100.0, 100.0);

impl BenchmarkSpec {
    /// Identity rotation, zero shift, default domain.
    pub fn plain(base: BaseFunction, dim: usize, bias: f64) -> Result<Self, ConfigError> {
        let mut rotation = vec![0.0; dim * dim];
        for i in 0..dim {
            rotation[i * dim + i] = 1.0;
        }
        Ok(Self {
            base,
            dim,
            shift: vec![0.0; dim],
            rotation,
            domain: Bounds::uniform(dim, DEFAULT_DOMAIN.0, DEFAULT_DOMAIN.1)?,
            bias,
        })
    }

    /// `R (x - shift)`.
    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        let diff: Vec<f64> = x.iter().zip(&self.shift).map(|(a, b)| a - b).collect();
        self.rotation
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(&diff).map(|(r, d)| r * d).sum())
            .collect()
    }

    /// Largest entry of `|R Rᵀ - I|`.
    pub fn orthogonality_residual(&self) -> f64 {
        orthogonality_residual(&self.rotation, self.dim)
    }

    /// Writes the instance as text: a `#` header, the shift on one line,
    /// then one line per rotation row.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "# base={} dim={} bias={} lower={} upper={}",
            self.base,
            self.dim,
            self.bias,
            self.domain.lower()[0],
            self.domain.upper()[0]
        )
        .unwrap();
        let line = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
        writeln!(out, "{}", line(&self.shift)).unwrap();
        for row in self.rotation.chunks_exact(self.dim) {
            writeln!(out, "{}", line(row)).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let bad = |msg: &str| ConfigError::Invalid(format!("benchmark instance: {msg}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty file"))?;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| bad("missing header"))?;
        let mut base = None;
        let mut dim = None;
        let mut bias = None;
        let mut lower = DEFAULT_DOMAIN.0;
        let mut upper = DEFAULT_DOMAIN.1;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| bad("malformed header"))?;
            let num = || {
                value
                    .parse::<f64>()
                    .map_err(|_| bad("malformed number in header"))
            };
            match key {
                "base" => base = Some(value.parse::<BaseFunction>()?),
                "dim" => dim = Some(value.parse::<usize>().map_err(|_| bad("malformed dim"))?),
                "bias" => bias = Some(num()?),
                "lower" => lower = num()?,
                "upper" => upper = num()?,
                _ => return Err(bad("unknown header field")),
            }
        }
        let base = base.ok_or_else(|| bad("header lacks base"))?;
        let dim = dim.ok_or_else(|| bad("header lacks dim"))?;
        let parse_row = |line: &str| -> Result<Vec<f64>, ConfigError> {
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| bad("malformed number")))
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != dim {
                return Err(ConfigError::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            Ok(row)
        };
        let shift = parse_row(lines.next().ok_or_else(|| bad("missing shift line"))?)?;
        let mut rotation = Vec::with_capacity(dim * dim);
        for _ in 0..dim {
            rotation.extend(parse_row(
                lines.next().ok_or_else(|| bad("missing rotation row"))?,
            )?);
        }
        if lines.next().is_some() {
            return Err(bad("trailing lines"));
        }
        if orthogonality_residual(&rotation, dim) > 1e-9 {
            return Err(bad("rotation is not orthogonal"));
        }
        Ok(Self {
            base,
            dim,
            shift,
            rotation,
            domain: Bounds::uniform(dim, lower, upper)?,
            bias: bias.unwrap_or(0.0),
        })
    }
}

/// `f_base(R (x - shift)) + bias`.
pub fn evaluate(spec: &BenchmarkSpec, x: &[f64]) -> Result<f64, ConfigError> {
    if x.len() != spec.dim {
        return Err(ConfigError::DimensionMismatch {
            expected: spec.dim,
            actual: x.len(),
        });
    }
    Ok(spec.base.value(&spec.transform(x)) + spec.bias)
}

fn orthogonality_residual(m: &[f64], dim: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let dot: f64 = (0..dim).map(|k| m[i * dim + k] * m[j * dim + k]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    worst
}

/// Orthonormalises the rows of a random Gaussian matrix (modified
/// Gram-Schmidt with one re-orthogonalisation pass).
fn random_rotation<R: RandomSource>(dim: usize, rng: &mut R) -> Vec<f64> {
    let mut rows: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..dim).map(|_| rng.normal()).collect())
        .collect();
    for i in 0..dim {
        for _pass in 0..2 {
            for j in 0..i {
                let (done, rest) = rows.split_at_mut(i);
                let dot: f64 = rest[0].iter().zip(&done[j]).map(|(a, b)| a * b).sum();
                for (a, b) in rest[0].iter_mut().zip(&done[j]) {
                    *a -= dot * b;
                }
            }
        }
        let norm = rows[i].iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in rows[i].iter_mut() {
            *v /= norm;
        }
    }
    rows.concat()
}

/// Deterministic instance: shift uniform in the central 80% of the default
/// domain, random orthogonal rotation, bias from [`BaseFunction::default_bias`].
pub fn random_instance(
    base: BaseFunction,
    dim: usize,
    seed: u64,
) -> Result<BenchmarkSpec, ConfigError> {
    if dim < 2 {
        return Err(ConfigError::Invalid(format!(
            "benchmark dimension must be at least 2, got {dim}"
        )));
    }
    let mut rng = SeededStream::new(seed);
    let (lo, hi) = DEFAULT_DOMAIN;
    let margin = 0.1 * (hi - lo);
    let shift = (0..dim)
        .map(|_| lo + margin + rng.uniform() * (hi - lo - 2.0 * margin))
        .collect();
    let rotation = random_rotation(dim, &mut rng);
    Ok(BenchmarkSpec {
        base,
        dim,
        shift,
        rotation,
        domain: Bounds::uniform(dim, lo, hi)?,
        bias: base.default_bias(),
    })
}

/// A benchmark instance exposed through the [`Problem`] contract.
#[derive(Debug, Clone)]
pub struct BenchmarkProblem {
    name: String,
    pub spec: BenchmarkSpec,
}

impl BenchmarkProblem {
    pub fn new(spec: BenchmarkSpec) -> Self {
        Self {
            name: format!("{}_d{}", spec.base, spec.dim),
            spec,
        }
    }
}

impl Problem for BenchmarkProblem {
    fn name(&self) -> &str {
        &self.name
    }

    fn bounds(&self) -> &Bounds {
        &self.spec.domain
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        self.spec.base.value(&self.spec.transform(x)) + self.spec.bias
    }
}
