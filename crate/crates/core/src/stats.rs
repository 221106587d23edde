//! Nonparametric tests, population diagnostics and result summaries.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::engine::Population;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("sample is empty")]
    EmptySample,
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("score table needs at least {min} {what}, got {got}")]
    TooSmall {
        what: &'static str,
        min: usize,
        got: usize,
    },
    #[error("score table row {row} has {got} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
}

/// Final fitness values of independent runs; never empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    values: Vec<f64>,
}

impl SampleSet {
    pub fn new(values: Vec<f64>) -> Result<Self, StatsError> {
        if values.is_empty() {
            return Err(StatsError::EmptySample);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Ascending ranks starting at 1, tied values sharing the mean of their
/// positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Largest per-sample size for which the exact null distribution is used.
pub const EXACT_LIMIT: usize = 10;

/// Two-sided Wilcoxon rank-sum p-value.
///
/// Uses the exact permutation distribution of the rank sum (with mid-ranks
/// for ties) when both samples have at most [`EXACT_LIMIT`] values, and the
/// tie-corrected normal approximation with continuity correction otherwise.
pub fn wilcoxon_rank_sum(a: &SampleSet, b: &SampleSet) -> f64 {
    let pooled: Vec<f64> = a.values.iter().chain(&b.values).copied().collect();
    if pooled.iter().all(|&v| v == pooled[0]) {
        return 1.0;
    }
    if a.len() <= EXACT_LIMIT && b.len() <= EXACT_LIMIT {
        wilcoxon_exact(a.values(), b.values())
    } else {
        wilcoxon_normal(a.values(), b.values())
    }
}

/// Exact two-sided p-value: the share of all `C(n, n_a)` splits of the pooled
/// mid-ranks whose rank sum lies at least as far from its mean as observed.
pub fn wilcoxon_exact(a: &[f64], b: &[f64]) -> f64 {
    let n_a = a.len();
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    // doubled mid-ranks are integers
    let doubled: Vec<usize> = average_ranks(&pooled)
        .iter()
        .map(|r| (2.0 * r).round() as usize)
        .collect();
    let max_sum: usize = doubled.iter().sum();

    // counts[k][s]: subsets of size k with doubled rank sum s
    let mut counts = vec![vec![0u64; max_sum + 1]; n_a + 1];
    counts[0][0] = 1;
    for &r in &doubled {
        for k in (1..=n_a).rev() {
            for s in (r..=max_sum).rev() {
                counts[k][s] += counts[k - 1][s - r];
            }
        }
    }

    let observed: usize = doubled[..n_a].iter().sum();
    let centre = (n_a * (n + 1)) as i64;
    let deviation = (observed as i64 - centre).abs();
    let total: u64 = counts[n_a].iter().sum();
    let extreme: u64 = counts[n_a]
        .iter()
        .enumerate()
        .filter(|(s, _)| (*s as i64 - centre).abs() >= deviation)
        .map(|(_, &c)| c)
        .sum();
    extreme as f64 / total as f64
}

/// Normal approximation of the Mann-Whitney `U` statistic with tie and
/// continuity corrections.
pub fn wilcoxon_normal(a: &[f64], b: &[f64]) -> f64 {
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = average_ranks(&pooled);
    let rank_sum: f64 = ranks[..a.len()].iter().sum();
    let u = rank_sum - n1 * (n1 + 1.0) / 2.0;
    let mean = n1 * n2 / 2.0;

    let n = n1 + n2;
    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        return 1.0;
    }
    let z = ((u - mean).abs() - 0.5).max(0.0) / variance.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

/// Scores (problems × algorithms) with their per-row ranks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub scores: Vec<Vec<f64>>,
    pub ranks: Vec<Vec<f64>>,
    pub mean_ranks: Vec<f64>,
}

/// Friedman mean ranks: each row ranked ascending (rank 1 = lowest score),
/// ties averaged, then averaged per column.
pub fn friedman_mean_rank(scores: &[Vec<f64>]) -> Result<RankTable, StatsError> {
    if scores.is_empty() {
        return Err(StatsError::TooSmall {
            what: "problems",
            min: 1,
            got: 0,
        });
    }
    let k = scores[0].len();
    if k < 2 {
        return Err(StatsError::TooSmall {
            what: "algorithms",
            min: 2,
            got: k,
        });
    }
    for (row, r) in scores.iter().enumerate() {
        if r.len() != k {
            return Err(StatsError::RaggedRow {
                row,
                expected: k,
                got: r.len(),
            });
        }
    }
    let ranks: Vec<Vec<f64>> = scores.iter().map(|r| average_ranks(r)).collect();
    let mean_ranks = (0..k)
        .map(|j| ranks.iter().map(|r| r[j]).sum::<f64>() / ranks.len() as f64)
        .collect();
    Ok(RankTable {
        scores: scores.to_vec(),
        ranks,
        mean_ranks,
    })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Mean absolute deviation from the per-dimension median, averaged over
/// dimensions.
pub fn dimension_diversity_of(positions: &[&[f64]]) -> f64 {
    let n = positions.len();
    let dim = positions[0].len();
    let mut column = vec![0.0; n];
    let mut total = 0.0;
    for d in 0..dim {
        for (c, p) in column.iter_mut().zip(positions) {
            *c = p[d];
        }
        let med = median(&mut column);
        total += positions.iter().map(|p| (med - p[d]).abs()).sum::<f64>() / n as f64;
    }
    total / dim as f64
}

/// Root-sum-square distance of every agent to the population centroid.
pub fn inertia_diversity_of(positions: &[&[f64]]) -> f64 {
    let n = positions.len() as f64;
    let dim = positions[0].len();
    let mut sum = 0.0;
    for d in 0..dim {
        let centroid = positions.iter().map(|p| p[d]).sum::<f64>() / n;
        sum += positions
            .iter()
            .map(|p| (p[d] - centroid).powi(2))
            .sum::<f64>();
    }
    sum.sqrt()
}

fn pooled_positions(population: &Population) -> Vec<&[f64]> {
    population.agents().map(|a| a.position.as_slice()).collect()
}

/// Dimension-wise diversity over both sexes.
pub fn dimension_diversity(population: &Population) -> f64 {
    dimension_diversity_of(&pooled_positions(population))
}

/// Inertia diversity over both sexes.
pub fn inertia_diversity(population: &Population) -> f64 {
    inertia_diversity_of(&pooled_positions(population))
}

/// Exploration and exploitation percentages of a diversity value relative to
/// the run maximum. A zero maximum yields `(0, 100)`.
pub fn explore_exploit_pct(div: f64, div_max: f64) -> (f64, f64) {
    if div_max <= 0.0 {
        return (0.0, 100.0);
    }
    (
        div / div_max * 100.0,
        (div - div_max).abs() / div_max * 100.0,
    )
}

/// Exploration/exploitation percentages for a whole diversity history.
pub fn explore_exploit_profile(history: &[f64]) -> Vec<(f64, f64)> {
    let div_max = history.iter().copied().fold(0.0, f64::max);
    history
        .iter()
        .map(|&d| explore_exploit_pct(d, div_max))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub best: f64,
    pub median: f64,
    pub worst: f64,
    pub mean: f64,
    pub std: f64,
}

/// Best/median/worst/mean and sample standard deviation (`n - 1`
/// denominator, 0 for a single value).
pub fn summarize(samples: &SampleSet) -> Summary {
    let values = samples.values();
    let n = values.len() as f64;
    let mut sorted = values.to_vec();
    let median = median(&mut sorted);
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Summary {
        best: sorted[0],
        median,
        worst: sorted[sorted.len() - 1],
        mean,
        std,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Agent;
    use proptest::prelude::*;

    fn set(v: &[f64]) -> SampleSet {
        SampleSet::new(v.to_vec()).unwrap()
    }

    fn population(positions: &[Vec<f64>]) -> Population {
        let agents: Vec<Agent> = positions
            .iter()
            .map(|p| Agent {
                position: p.clone(),
                fitness: 0.0,
            })
            .collect();
        let split = agents.len() / 2;
        Population {
            males: agents[..split].to_vec(),
            females: agents[split..].to_vec(),
            food: agents[0].clone(),
            iteration: 0,
            max_iterations: 1,
        }
    }

    #[test]
    fn sample_set_rejects_empty_and_nan() {
        assert_eq!(SampleSet::new(vec![]), Err(StatsError::EmptySample));
        assert_eq!(SampleSet::new(vec![f64::NAN]), Err(StatsError::NonFinite));
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 2.0]);
        assert_eq!(average_ranks(&[1.0, 1.0, 5.0]), vec![1.5, 1.5, 3.0]);
        assert_eq!(average_ranks(&[2.0, 2.0, 2.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn wilcoxon_identical_samples() {
        let a = set(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(wilcoxon_rank_sum(&a, &a), 1.0);
        let big: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let big = set(&big);
        assert_eq!(wilcoxon_rank_sum(&big, &big), 1.0);
    }

    #[test]
    fn wilcoxon_exact_extreme() {
        let p = wilcoxon_rank_sum(&set(&[1.0, 2.0, 3.0]), &set(&[10.0, 20.0, 30.0]));
        assert!((p - 0.1).abs() < 1e-15);
    }

    #[test]
    fn wilcoxon_degenerate_constant() {
        assert_eq!(wilcoxon_rank_sum(&set(&[5.0; 12]), &set(&[5.0; 15])), 1.0);
        assert_eq!(wilcoxon_rank_sum(&set(&[5.0; 2]), &set(&[5.0; 3])), 1.0);
    }

    #[test]
    fn wilcoxon_separated_large_samples() {
        let a: Vec<f64> = (0..30).map(|i| i as f64 * 0.01).collect();
        let b: Vec<f64> = (0..30).map(|i| 10.0 + i as f64 * 0.01).collect();
        // U = 0, mean 450, sd sqrt(30*30*61/12)
        let z: f64 = (450.0 - 0.5) / (900.0_f64 * 61.0 / 12.0).sqrt();
        let expected = erfc(z / std::f64::consts::SQRT_2);
        let p = wilcoxon_rank_sum(&set(&a), &set(&b));
        assert!(p < 1e-6);
        assert!((p - expected).abs() < 1e-20);
    }

    #[test]
    fn wilcoxon_normal_matches_reference_with_ties() {
        // scipy.stats.mannwhitneyu(a, b, method="asymptotic")
        let a = [1.0, 2.0, 2.0, 3.0, 4.0, 5.0, 5.0, 6.0, 7.0, 8.0, 9.0];
        let b = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 9.0, 10.0, 11.0];
        let p = wilcoxon_normal(&a, &b);
        assert!((p - 0.121_000_492_900_406_86).abs() < 1e-10, "{p:e}");
        assert!((wilcoxon_normal(&b, &a) - p).abs() < 1e-15);
    }

    #[test]
    fn friedman_examples() {
        let scores = vec![
            vec![1.0, 2.0, 3.0],
            vec![0.1, 5.0, 4.0],
            vec![-1.0, 0.0, 0.0],
        ];
        let table = friedman_mean_rank(&scores).unwrap();
        assert_eq!(table.mean_ranks[0], 1.0);
        assert_eq!(table.ranks[2], vec![1.0, 2.5, 2.5]);
        for row in &table.ranks {
            assert_eq!(row.iter().sum::<f64>(), 6.0);
        }
    }

    #[test]
    fn friedman_two_way_tie() {
        let table = friedman_mean_rank(&[vec![4.0, 4.0]]).unwrap();
        assert_eq!(table.mean_ranks, vec![1.5, 1.5]);
    }

    #[test]
    fn friedman_rejects_bad_tables() {
        assert!(friedman_mean_rank(&[]).is_err());
        assert!(friedman_mean_rank(&[vec![1.0]]).is_err());
        assert!(matches!(
            friedman_mean_rank(&[vec![1.0, 2.0], vec![1.0]]),
            Err(StatsError::RaggedRow { row: 1, .. })
        ));
    }

    #[test]
    fn dimension_diversity_examples() {
        let pop = population(&[vec![0.0], vec![1.0], vec![2.0]]);
        assert!((dimension_diversity(&pop) - 2.0 / 3.0).abs() < 1e-15);
        let clones = population(&vec![vec![1.5, -2.0]; 6]);
        assert_eq!(dimension_diversity(&clones), 0.0);
        assert_eq!(inertia_diversity(&clones), 0.0);
    }

    #[test]
    fn inertia_examples() {
        let pop = population(&[vec![-1.0], vec![1.0]]);
        assert!((inertia_diversity(&pop) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn explore_exploit_examples() {
        assert_eq!(explore_exploit_pct(2.0, 2.0), (100.0, 0.0));
        assert_eq!(explore_exploit_pct(0.0, 2.0), (0.0, 100.0));
        assert_eq!(explore_exploit_pct(0.5, 2.0), (25.0, 75.0));
        assert_eq!(explore_exploit_pct(0.0, 0.0), (0.0, 100.0));
    }

    #[test]
    fn summarize_examples() {
        let s = summarize(&set(&[1.0, 2.0, 3.0]));
        assert_eq!(
            s,
            Summary {
                best: 1.0,
                median: 2.0,
                worst: 3.0,
                mean: 2.0,
                std: 1.0
            }
        );
        let s = summarize(&set(&[4.2]));
        assert_eq!(s.std, 0.0);
        assert_eq!(s.median, 4.2);
        let s = summarize(&set(&[2.0; 4]));
        assert_eq!(
            s,
            Summary {
                best: 2.0,
                median: 2.0,
                worst: 2.0,
                mean: 2.0,
                std: 0.0
            }
        );
        assert_eq!(summarize(&set(&[4.0, 1.0, 3.0, 2.0])).median, 2.5);
    }

    proptest! {
        #[test]
        fn wilcoxon_is_symmetric(
            a in prop::collection::vec(-5i32..5, 1..14),
            b in prop::collection::vec(-5i32..5, 1..14),
        ) {
            let a = set(&a.iter().map(|&v| v as f64).collect::<Vec<_>>());
            let b = set(&b.iter().map(|&v| v as f64).collect::<Vec<_>>());
            let ab = wilcoxon_rank_sum(&a, &b);
            let ba = wilcoxon_rank_sum(&b, &a);
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab));
        }

        #[test]
        fn friedman_invariant_under_monotone_transform(
            rows in prop::collection::vec(prop::collection::vec(-100i32..100, 4), 1..6),
        ) {
            let scores: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
            let transformed: Vec<Vec<f64>> = scores
                .iter()
                .map(|r| r.iter().map(|&v| (v / 10.0).exp() * 3.0 + 7.0).collect())
                .collect();
            let a = friedman_mean_rank(&scores).unwrap();
            let b = friedman_mean_rank(&transformed).unwrap();
            prop_assert_eq!(a.mean_ranks, b.mean_ranks);
            for row in &a.ranks {
                prop_assert_eq!(row.iter().sum::<f64>(), 10.0);
            }
        }

        #[test]
        fn diversity_homogeneous_and_translation_invariant(
            pts in prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 3), 4..12),
            c in -4.0f64..4.0,
            shift in prop::collection::vec(-10.0f64..10.0, 3),
        ) {
            let base = population(&pts);
            let scaled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|v| v * c).collect()).collect();
            let moved: Vec<Vec<f64>> = pts
                .iter()
                .map(|p| p.iter().zip(&shift).map(|(v, s)| v + s).collect())
                .collect();
            let div = dimension_diversity(&base);
            prop_assert!((dimension_diversity(&population(&scaled)) - c.abs() * div).abs() < 1e-9);
            let ic = inertia_diversity(&base);
            prop_assert!((inertia_diversity(&population(&moved)) - ic).abs() < 1e-9);
        }

        #[test]
        fn explore_plus_exploit_is_hundred(div_max in 1e-6f64..1e6, frac in 0.0f64..=1.0) {
            let (a, b) = explore_exploit_pct(frac * div_max, div_max);
            prop_assert!((a + b - 100.0).abs() < 1e-9);
        }
    }
}
