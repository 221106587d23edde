//! Six constrained engineering design problems with a static penalty.
//!
//! Every problem returns its raw objective and a [`ConstraintReport`] whose
//! values follow the `g(x) <= 0` convention. [`ConstrainedProblem`] folds the
//! report into a single fitness with [`penalize`].
//!
//! | id     | problem                        | dim |
//! |--------|--------------------------------|-----|
//! | `wbd`  | welded beam                    | 4   |
//! | `tcsd` | tension/compression spring     | 3   |
//! | `cbd`  | cantilever beam                | 5   |
//! | `rebd` | rolling element bearing        | 10  |
//! | `srd`  | speed reducer                  | 7   |
//! | `tbtd` | three-bar truss                | 2   |

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{Bounds, Problem};
use crate::error::ConfigError;

/// Feasibility tolerance used by [`ConstraintReport::feasible`].
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

/// Tolerance for counting an optimizer's reported best as feasible.
pub const ACCEPTANCE_TOLERANCE: f64 = 1e-6;

pub const DEFAULT_PENALTY: f64 = 1e6;

/// Constraint value substituted when a formula leaves its physical domain
/// (vanishing denominators, `acos` outside `[-1, 1]`).
pub const NONPHYSICAL_VIOLATION: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub values: Vec<f64>,
    pub feasible: bool,
    pub total_violation: f64,
}

impl ConstraintReport {
    pub fn new(values: Vec<f64>) -> Self {
        let values: Vec<f64> = values
            .into_iter()
            .map(|g| {
                if g.is_finite() {
                    g
                } else {
                    NONPHYSICAL_VIOLATION
                }
            })
            .collect();
        let total_violation = values.iter().map(|g| g.max(0.0)).sum();
        let feasible = values.iter().all(|&g| g <= FEASIBILITY_TOLERANCE);
        Self {
            values,
            feasible,
            total_violation,
        }
    }

    pub fn feasible_within(&self, tolerance: f64) -> bool {
        self.values.iter().all(|&g| g <= tolerance)
    }
}

/// Objective plus `coefficient` times the summed violation; feasible points
/// are returned unchanged.
pub fn penalize(objective: f64, report: &ConstraintReport, coefficient: f64) -> f64 {
    if report.feasible {
        objective
    } else {
        objective + coefficient * report.total_violation
    }
}

fn guarded_ratio(num: f64, den: f64) -> f64 {
    if den.abs() <= 1e-300 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Welded beam: `x = [h, l, t, b]`.
pub fn welded_beam(x: &[f64]) -> (f64, ConstraintReport) {
    let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
    const P: f64 = 6000.0;
    const L: f64 = 14.0;
    const E: f64 = 30e6;
    const G: f64 = 12e6;
    const TAU_MAX: f64 = 13600.0;
    const SIGMA_MAX: f64 = 30000.0;
    const DELTA_MAX: f64 = 0.25;

    let objective = 1.10471 * x1 * x1 * x2 + 0.04811 * x3 * x4 * (14.0 + x2);

    let tau_p = P / (SQRT_2 * x1 * x2);
    let m = P * (L + x2 / 2.0);
    let half_sq = x2 * x2 / 4.0 + ((x1 + x3) / 2.0).powi(2);
    let r = half_sq.sqrt();
    let j = 2.0 * (SQRT_2 * x1 * x2 * half_sq);
    let tau_pp = m * r / j;
    let tau = (tau_p * tau_p + 2.0 * tau_p * tau_pp * x2 / (2.0 * r) + tau_pp * tau_pp).sqrt();
    let sigma = 6.0 * P * L / (x4 * x3 * x3);
    let delta = 6.0 * P * L.powi(3) / (E * x3 * x3 * x4);
    let p_c = 4.013 * E * (x3 * x3 * x4.powi(6) / 30.0).sqrt() / (L * L)
        * (1.0 - x3 / (2.0 * L) * (E / (4.0 * G)).sqrt());

    let g = vec![
        tau - TAU_MAX,
        sigma - SIGMA_MAX,
        delta - DELTA_MAX,
        x1 - x4,
        P - p_c,
        0.125 - x1,
        1.10471 * x1 * x1 + 0.04811 * x3 * x4 * (14.0 + x2) - 5.0,
    ];
    (objective, ConstraintReport::new(g))
}

/// Tension/compression spring: `x = [d, D, N]`.
pub fn spring(x: &[f64]) -> (f64, ConstraintReport) {
    let (x1, x2, x3) = (x[0], x[1], x[2]);
    let objective = (x3 + 2.0) * x2 * x1 * x1;
    let g = vec![
        1.0 - x2.powi(3) * x3 / (71785.0 * x1.powi(4)),
        guarded_ratio(
            4.0 * x2 * x2 - x1 * x2,
            12566.0 * (x2 * x1.powi(3) - x1.powi(4)),
        ) + 1.0 / (5108.0 * x1 * x1)
            - 1.0,
        1.0 - 140.45 * x1 / (x2 * x2 * x3),
        (x1 + x2) / 1.5 - 1.0,
    ];
    (objective, ConstraintReport::new(g))
}

/// Cantilever beam built from five hollow square blocks.
pub fn cantilever(x: &[f64]) -> (f64, ConstraintReport) {
    let objective = 0.0624 * x.iter().sum::<f64>();
    let g = 61.0 / x[0].powi(3)
        + 37.0 / x[1].powi(3)
        + 19.0 / x[2].powi(3)
        + 7.0 / x[3].powi(3)
        + 1.0 / x[4].powi(3)
        - 1.0;
    (objective, ConstraintReport::new(vec![g]))
}

/// Rolling element bearing:
/// `x = [D_m, D_b, f_o, f_i, Z, e, ε, ζ, K_Dmax, K_Dmin]`.
///
/// The objective is the dynamic load capacity itself, minimized.
pub fn rolling_bearing(x: &[f64]) -> (f64, ConstraintReport) {
    let (dm, db, fo, fi, z) = (x[0], x[1], x[2], x[3], x[4]);
    let (e, eps, zeta, kd_max, kd_min) = (x[5], x[6], x[7], x[8], x[9]);
    const D: f64 = 160.0;
    const D_IN: f64 = 90.0;
    const B_W: f64 = 30.0;

    let gamma = db / dm;
    let ratio = 1.04
        * ((1.0 - gamma) / (1.0 + gamma)).powf(1.72)
        * (fi * (2.0 * fo - 1.0) / (fo * (2.0 * fi - 1.0))).powf(0.41);
    let fc = 37.91
        * (1.0 + ratio.powf(10.0 / 3.0)).powf(-0.3)
        * (gamma.powf(0.3) * (1.0 - gamma).powf(1.39) / (1.0 + gamma).powf(1.0 / 3.0))
        * (2.0 * fi / (2.0 * fi - 1.0)).powf(0.41);
    let objective = if db <= 25.4 {
        fc * z.powf(2.0 / 3.0) * db.powf(1.8)
    } else {
        3.647 * fc * z.powf(2.0 / 3.0) * db.powf(1.4)
    };

    let t = D - D_IN - 2.0 * db;
    let a = (D - D_IN) / 2.0 - 3.0 * (t / 4.0);
    let b = D / 2.0 - t / 4.0 - db;
    let c = D_IN / 2.0 + t / 4.0;
    let cos_arg = (a * a + b * b - c * c) / (2.0 * a * b);
    let g1 = if cos_arg.is_finite() && (-1.0..=1.0).contains(&cos_arg) {
        let phi0 = 2.0 * PI - 2.0 * cos_arg.acos();
        z - phi0 / (2.0 * (db / dm).asin()) - 1.0
    } else {
        NONPHYSICAL_VIOLATION
    };

    let g = vec![
        g1,
        kd_min * (D - D_IN) - 2.0 * db,
        2.0 * db - kd_max * (D - D_IN),
        zeta * B_W - db,
        0.5 * (D + D_IN) - dm,
        dm - (0.5 + e) * (D + D_IN),
        eps * db - 0.5 * (D - dm - db),
        0.515 - fi,
        0.515 - fo,
    ];
    (objective, ConstraintReport::new(g))
}

/// Speed reducer: `x = [b, m, z, l1, l2, d1, d2]`, tooth count `z` relaxed to
/// a real.
#[allow(clippy::approx_constant)]
pub fn speed_reducer(x: &[f64]) -> (f64, ConstraintReport) {
    let (x1, x2, x3, x4, x5, x6, x7) = (x[0], x[1], x[2], x[3], x[4], x[5], x[6]);
    let objective = 0.7854 * x1 * x2 * x2 * (3.3333 * x3 * x3 + 14.9334 * x3 - 43.0934)
        - 1.508 * x1 * (x6 * x6 + x7 * x7)
        + 7.4777 * (x6.powi(3) + x7.powi(3))
        + 0.7854 * (x4 * x6 * x6 + x5 * x7 * x7);
    let g = vec![
        27.0 / (x1 * x2 * x2 * x3) - 1.0,
        397.5 / (x1 * x2 * x2 * x3 * x3) - 1.0,
        1.93 * x4.powi(3) / (x2 * x3 * x6.powi(4)) - 1.0,
        1.93 * x5.powi(3) / (x2 * x3 * x7.powi(4)) - 1.0,
        ((745.0 * x4 / (x2 * x3)).powi(2) + 16.9e6).sqrt() / (110.0 * x6.powi(3)) - 1.0,
        ((745.0 * x5 / (x2 * x3)).powi(2) + 157.5e6).sqrt() / (85.0 * x7.powi(3)) - 1.0,
        x2 * x3 / 40.0 - 1.0,
        5.0 * x2 / x1 - 1.0,
        x1 / (12.0 * x2) - 1.0,
        (1.5 * x6 + 1.9) / x4 - 1.0,
        (1.1 * x7 + 1.9) / x5 - 1.0,
    ];
    (objective, ConstraintReport::new(g))
}

/// Three-bar truss: `x = [A1, A2]`.
pub fn three_bar_truss(x: &[f64]) -> (f64, ConstraintReport) {
    let (x1, x2) = (x[0], x[1]);
    const L: f64 = 100.0;
    const P: f64 = 2.0;
    const SIGMA: f64 = 2.0;
    let objective = L * (2.0 * SQRT_2 * x1 + x2);
    if x1 <= 1e-12 && x2 <= 1e-12 {
        return (
            objective,
            ConstraintReport::new(vec![NONPHYSICAL_VIOLATION; 3]),
        );
    }
    let den = SQRT_2 * x1 * x1 + 2.0 * x1 * x2;
    let g = vec![
        guarded_ratio(SQRT_2 * x1 + x2, den) * P - SIGMA,
        guarded_ratio(x2, den) * P - SIGMA,
        guarded_ratio(1.0, SQRT_2 * x2 + x1) * P - SIGMA,
    ];
    (objective, ConstraintReport::new(g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineeringProblem {
    Wbd,
    Tcsd,
    Cbd,
    Rebd,
    Srd,
    Tbtd,
}

impl EngineeringProblem {
    pub const ALL: [EngineeringProblem; 6] = [
        EngineeringProblem::Wbd,
        EngineeringProblem::Tcsd,
        EngineeringProblem::Cbd,
        EngineeringProblem::Rebd,
        EngineeringProblem::Srd,
        EngineeringProblem::Tbtd,
    ];

    pub fn id(self) -> &'static str {
        match self {
            EngineeringProblem::Wbd => "wbd",
            EngineeringProblem::Tcsd => "tcsd",
            EngineeringProblem::Cbd => "cbd",
            EngineeringProblem::Rebd => "rebd",
            EngineeringProblem::Srd => "srd",
            EngineeringProblem::Tbtd => "tbtd",
        }
    }

    pub fn evaluate(self, x: &[f64]) -> (f64, ConstraintReport) {
        match self {
            EngineeringProblem::Wbd => welded_beam(x),
            EngineeringProblem::Tcsd => spring(x),
            EngineeringProblem::Cbd => cantilever(x),
            EngineeringProblem::Rebd => rolling_bearing(x),
            EngineeringProblem::Srd => speed_reducer(x),
            EngineeringProblem::Tbtd => three_bar_truss(x),
        }
    }

    pub fn bounds(self) -> Bounds {
        let (lower, upper): (Vec<f64>, Vec<f64>) = match self {
            EngineeringProblem::Wbd => (vec![0.1, 0.1, 0.1, 0.1], vec![2.0, 10.0, 10.0, 2.0]),
            EngineeringProblem::Tcsd => (vec![0.05, 0.25, 2.0], vec![2.0, 1.3, 15.0]),
            EngineeringProblem::Cbd => (vec![0.01; 5], vec![100.0; 5]),
            EngineeringProblem::Rebd => {
                let (d, d_in) = (160.0, 90.0);
                (
                    vec![
                        0.5 * (d + d_in),
                        0.15 * (d - d_in),
                        0.515,
                        0.515,
                        5.0,
                        0.02,
                        0.3,
                        0.6,
                        0.6,
                        0.4,
                    ],
                    vec![
                        0.6 * (d + d_in),
                        0.45 * (d - d_in),
                        0.6,
                        0.6,
                        50.0,
                        0.1,
                        0.4,
                        0.85,
                        0.7,
                        0.5,
                    ],
                )
            }
            EngineeringProblem::Srd => (
                vec![2.6, 0.7, 17.0, 7.3, 7.3, 2.9, 5.0],
                vec![3.6, 0.8, 28.0, 8.3, 8.3, 3.9, 5.5],
            ),
            EngineeringProblem::Tbtd => (vec![0.0, 0.0], vec![1.0, 1.0]),
        };
        Bounds::new(lower, upper).expect("static bounds are valid")
    }

    /// Indices of physically integer variables (rounded in reports only).
    pub fn integer_variables(self) -> &'static [usize] {
        match self {
            EngineeringProblem::Rebd => &[4],
            EngineeringProblem::Srd => &[2],
            _ => &[],
        }
    }
}

impl fmt::Display for EngineeringProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for EngineeringProblem {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EngineeringProblem::ALL
            .into_iter()
            .find(|p| p.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ConfigError::UnknownProblem {
                name: s.to_string(),
                valid: EngineeringProblem::ALL
                    .map(EngineeringProblem::id)
                    .join(", "),
            })
    }
}

/// An engineering problem behind the [`Problem`] contract, fitness =
/// penalized objective.
#[derive(Debug, Clone)]
pub struct ConstrainedProblem {
    pub kind: EngineeringProblem,
    bounds: Bounds,
    pub penalty_coefficient: f64,
}

impl ConstrainedProblem {
    pub fn new(kind: EngineeringProblem) -> Self {
        Self {
            kind,
            bounds: kind.bounds(),
            penalty_coefficient: DEFAULT_PENALTY,
        }
    }

    pub fn report(&self, x: &[f64]) -> (f64, ConstraintReport) {
        self.kind.evaluate(x)
    }
}

impl Problem for ConstrainedProblem {
    fn name(&self) -> &str {
        self.kind.id()
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        let (objective, report) = self.kind.evaluate(x);
        penalize(objective, &report, self.penalty_coefficient)
    }
}
