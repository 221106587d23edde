//! Snake Optimizer update rules and the MISO strategies.
//!
//! Each iteration computes the temperature `Temp = exp(-t/T)` and food
//! quantity `Q = c1 exp((t-T)/T)` and dispatches every agent to one of four
//! classic moves: exploration around a random same-sex peer (`Q < 0.25`),
//! movement toward the food (`Temp > 0.6`), or, in the cold phase, fighting
//! (`rand > 0.6`) or mating followed by egg hatching.
//!
//! MISO scales the classic moves by a sine disturbance factor during the
//! first half of the run and replaces them in the second half with a
//! leader-guided Lévy flight for males and Brownian motion for females,
//! both shrunk by a convergence factor. DSO, LSO and BSO each enable one of
//! those strategies alone.
//!
//! Random draws within one iteration happen in a fixed order:
//!
//! 1. the disturbance factor (DF variants, early phase, sine mode only);
//! 2. the fight/mate selector, once, when the cold branch is taken;
//! 3. males in index order, then females: for exploration the peer index,
//!    the sign coin and one uniform per dimension; for the food move the
//!    sign coin and one uniform per dimension; for fight and mate one
//!    uniform per dimension; for Lévy moves two normals `(u, v)` per
//!    dimension; for Brownian moves one normal per dimension;
//! 4. hatching, after all moves are evaluated: one uniform per dimension for
//!    the worst male, then for the worst female.

use statrs::function::gamma::gamma;

use crate::engine::{worst_index, Agent, Algorithm, Bounds, Population, StepContext, Strategy};
use crate::error::RunError;
use crate::rng::RandomSource;

/// Thresholds and step constants of the classic SO moves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnakeParams {
    pub q_threshold: f64,
    pub temp_threshold: f64,
    pub mode_rand_threshold: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Default for SnakeParams {
    fn default() -> Self {
        Self {
            q_threshold: 0.25,
            temp_threshold: 0.6,
            mode_rand_threshold: 0.6,
            c1: 0.5,
            c2: 0.05,
            c3: 2.0,
        }
    }
}

/// Mantegna Lévy-flight parameters. `sigma` is derived from `stability`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevyParams {
    pub step_scale: f64,
    pub stability: f64,
    pub weight: f64,
    pub sigma: f64,
}

impl LevyParams {
    pub fn new(step_scale: f64, stability: f64, weight: f64) -> Self {
        Self {
            step_scale,
            stability,
            weight,
            sigma: mantegna_sigma(stability),
        }
    }
}

impl Default for LevyParams {
    fn default() -> Self {
        Self::new(0.01, 1.5, 0.05)
    }
}

/// `(Γ(1+η) sin(πη/2) / (Γ((1+η)/2) η 2^((η-1)/2)))^(1/η)`
pub fn mantegna_sigma(eta: f64) -> f64 {
    let num = gamma(1.0 + eta) * (std::f64::consts::PI * eta / 2.0).sin();
    let den = gamma((1.0 + eta) / 2.0) * eta * 2f64.powf((eta - 1.0) / 2.0);
    (num / den).powf(1.0 / eta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrownianParams {
    pub weight: f64,
    pub mu: f64,
    pub sigma: f64,
}

impl Default for BrownianParams {
    fn default() -> Self {
        Self {
            weight: 0.05,
            mu: 0.0,
            sigma: 1.0,
        }
    }
}

pub fn temperature(t: usize, max_iterations: usize) -> f64 {
    (-(t as f64) / max_iterations as f64).exp()
}

pub fn food_quantity(t: usize, max_iterations: usize, c1: f64) -> f64 {
    let big_t = max_iterations as f64;
    c1 * ((t as f64 - big_t) / big_t).exp()
}

/// `exp(-f_rand / f_self)` with the exponent clamped to `[-700, 0]`, so the
/// result stays in `(0, 1]` for any pair of fitness values.
pub fn hunt_ability(f_rand: f64, f_self: f64) -> f64 {
    let ratio = f_rand / f_self;
    let exponent = if ratio.is_nan() {
        0.0
    } else {
        (-ratio).clamp(-700.0, 0.0)
    };
    exponent.exp()
}

/// Sine disturbance factor `(sin(2 rand) + 1)(1 - t/T)`.
pub fn disturbance_factor<R: RandomSource>(t: usize, max_iterations: usize, rng: &mut R) -> f64 {
    disturbance_from_draw(t, max_iterations, rng.uniform())
}

pub fn disturbance_from_draw(t: usize, max_iterations: usize, r: f64) -> f64 {
    ((2.0 * r).sin() + 1.0) * (1.0 - t as f64 / max_iterations as f64)
}

/// `cos(π/2 · t/T) · (1 - t/T)^(2t/T)`; exactly 1 at `t = 0` and 0 at `t = T`.
pub fn convergence_factor(t: usize, max_iterations: usize) -> f64 {
    if t >= max_iterations {
        return 0.0;
    }
    let ratio = t as f64 / max_iterations as f64;
    (std::f64::consts::FRAC_PI_2 * ratio).cos() * (1.0 - ratio).powf(2.0 * ratio)
}

/// One weighted Lévy coordinate from normal draws `u` and `v`.
pub fn levy_from_draws(u: f64, v: f64, params: &LevyParams) -> f64 {
    params.weight * params.step_scale * (u * params.sigma) / v.abs().powf(1.0 / params.stability)
}

/// Weighted Lévy vector (`RL`), Mantegna scheme with `u, v ~ N(0, 1)`.
pub fn levy_sample<R: RandomSource>(dim: usize, params: &LevyParams, rng: &mut R) -> Vec<f64> {
    (0..dim)
        .map(|_| {
            let u = rng.normal();
            let mut v = rng.normal();
            while v.abs().powf(1.0 / params.stability) == 0.0 {
                v = rng.normal();
            }
            levy_from_draws(u, v, params)
        })
        .collect()
}

/// Weighted Brownian vector (`RB`).
pub fn brownian_sample<R: RandomSource>(
    dim: usize,
    params: &BrownianParams,
    rng: &mut R,
) -> Vec<f64> {
    (0..dim)
        .map(|_| params.weight * (params.mu + params.sigma * rng.normal()))
        .collect()
}

fn signed(plus: bool, v: f64) -> f64 {
    if plus {
        v
    } else {
        -v
    }
}

/// Exploration around a random same-sex peer. `df = 1` is plain SO.
pub fn explore_step<R: RandomSource>(
    agent: &Agent,
    rand_peer: &Agent,
    bounds: &Bounds,
    df: f64,
    params: &SnakeParams,
    rng: &mut R,
) -> Vec<f64> {
    let ability = hunt_ability(rand_peer.fitness, agent.fitness);
    let plus = rng.coin();
    rand_peer
        .position
        .iter()
        .zip(bounds.lower().iter().zip(bounds.upper()))
        .map(|(&p, (&lo, &hi))| {
            let jump = df * params.c2 * ability * ((hi - lo) * rng.uniform() + lo);
            p + signed(plus, jump)
        })
        .collect()
}

/// Movement toward the food in the hot phase.
pub fn food_step<R: RandomSource>(
    agent: &Agent,
    food: &Agent,
    temp: f64,
    df: f64,
    params: &SnakeParams,
    rng: &mut R,
) -> Vec<f64> {
    let plus = rng.coin();
    food.position
        .iter()
        .zip(&agent.position)
        .map(|(&f, &x)| f + signed(plus, df * params.c3 * temp * rng.uniform() * (f - x)))
        .collect()
}

/// Fight mode: attraction toward the best agent of the opposite sex.
pub fn fight_step<R: RandomSource>(
    agent: &Agent,
    best_opposite: &Agent,
    q: f64,
    df: f64,
    params: &SnakeParams,
    rng: &mut R,
) -> Vec<f64> {
    let ability = hunt_ability(best_opposite.fitness, agent.fitness);
    agent
        .position
        .iter()
        .zip(&best_opposite.position)
        .map(|(&x, &b)| x + df * params.c3 * ability * rng.uniform() * (q * b - x))
        .collect()
}

/// Mating mode: attraction toward the same-index partner of the opposite sex.
pub fn mate_step<R: RandomSource>(
    agent: &Agent,
    partner: &Agent,
    q: f64,
    df: f64,
    params: &SnakeParams,
    rng: &mut R,
) -> Vec<f64> {
    let ability = hunt_ability(partner.fitness, agent.fitness);
    agent
        .position
        .iter()
        .zip(&partner.position)
        .map(|(&x, &p)| x + df * params.c3 * ability * rng.uniform() * (q * p - x))
        .collect()
}

/// Late-phase leader move `food + cf · (r ⊙ (r ⊙ food - x))`, shared by the
/// Lévy (males) and Brownian (females) strategies.
pub fn leader_step(agent: &Agent, food: &Agent, cf: f64, r: &[f64]) -> Vec<f64> {
    food.position
        .iter()
        .zip(&agent.position)
        .zip(r)
        .map(|((&f, &x), &ri)| f + cf * (ri * (ri * f - x)))
        .collect()
}

/// Replaces the worst male and the worst female by fresh uniform draws.
pub fn hatch_replace<R: RandomSource>(
    population: &mut Population,
    ctx: &mut StepContext<'_, R>,
) -> Result<(), RunError> {
    hatch_group(&mut population.males, ctx)?;
    hatch_group(&mut population.females, ctx)
}

fn hatch_group<R: RandomSource>(
    group: &mut [Agent],
    ctx: &mut StepContext<'_, R>,
) -> Result<(), RunError> {
    if let Some(worst) = worst_index(group) {
        let position = ctx.bounds().sample(ctx.rng);
        group[worst] = ctx.commit(position)?;
    }
    Ok(())
}

/// Late-phase MISO update: Lévy leader move for every male, Brownian leader
/// move for every female, scaled by the convergence factor at `t`.
pub fn miso_late_update<R: RandomSource>(
    population: &mut Population,
    t: usize,
    levy: &LevyParams,
    brownian: &BrownianParams,
    ctx: &mut StepContext<'_, R>,
) -> Result<(), RunError> {
    let cf = convergence_factor(t, population.max_iterations);
    let dim = population.food.position.len();
    let males: Vec<_> = population
        .males
        .iter()
        .map(|a| leader_step(a, &population.food, cf, &levy_sample(dim, levy, ctx.rng)))
        .collect();
    let females: Vec<_> = population
        .females
        .iter()
        .map(|a| {
            leader_step(
                a,
                &population.food,
                cf,
                &brownian_sample(dim, brownian, ctx.rng),
            )
        })
        .collect();
    commit_group(&mut population.males, males, ctx)?;
    commit_group(&mut population.females, females, ctx)
}

fn commit_group<R: RandomSource>(
    group: &mut [Agent],
    positions: Vec<Vec<f64>>,
    ctx: &mut StepContext<'_, R>,
) -> Result<(), RunError> {
    for (agent, position) in group.iter_mut().zip(positions) {
        *agent = ctx.commit(position)?;
    }
    Ok(())
}

/// How the sine disturbance factor is produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DisturbanceMode {
    /// Drawn once per iteration from the sine schedule.
    Sine,
    /// Held at a fixed value without consuming random draws.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Explore,
    Food,
    Fight,
    Mate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mover {
    Classic,
    Levy,
    Brownian,
}

/// Which update each sex uses at a given iteration, plus whether the classic
/// moves are disturbance-scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Plan {
    males: Mover,
    females: Mover,
    disturbed: bool,
}

fn plan(variant: Algorithm, late: bool) -> Plan {
    use Mover::*;
    let (males, females, disturbed) = match (variant, late) {
        (Algorithm::So, _) => (Classic, Classic, false),
        (Algorithm::Dso, _) => (Classic, Classic, true),
        (Algorithm::Miso, false) => (Classic, Classic, true),
        (Algorithm::Miso, true) => (Levy, Brownian, false),
        (Algorithm::Lso, false) | (Algorithm::Bso, false) => (Classic, Classic, false),
        (Algorithm::Lso, true) => (Levy, Classic, false),
        (Algorithm::Bso, true) => (Classic, Brownian, false),
    };
    Plan {
        males,
        females,
        disturbed,
    }
}

/// SO / MISO / ablation step strategy.
#[derive(Debug, Clone)]
pub struct SnakeOptimizer {
    pub variant: Algorithm,
    pub params: SnakeParams,
    pub levy: LevyParams,
    pub brownian: BrownianParams,
    pub disturbance: DisturbanceMode,
}

impl SnakeOptimizer {
    pub fn new(variant: Algorithm) -> Self {
        Self {
            variant,
            params: SnakeParams::default(),
            levy: LevyParams::default(),
            brownian: BrownianParams::default(),
            disturbance: DisturbanceMode::Sine,
        }
    }

    pub fn with_disturbance(mut self, mode: DisturbanceMode) -> Self {
        self.disturbance = mode;
        self
    }

    #[allow(clippy::too_many_arguments)]
    fn classic_moves<R: RandomSource>(
        &self,
        own: &[Agent],
        opposite: &[Agent],
        population: &Population,
        phase: Phase,
        df: f64,
        temp: f64,
        q: f64,
        ctx: &mut StepContext<'_, R>,
    ) -> Vec<Vec<f64>> {
        let best_opposite = crate::engine::best_of(opposite.iter()).expect("non-empty sex");
        own.iter()
            .enumerate()
            .map(|(i, agent)| match phase {
                Phase::Explore => {
                    let peer = &own[ctx.rng.index(own.len())];
                    explore_step(agent, peer, ctx.bounds(), df, &self.params, ctx.rng)
                }
                Phase::Food => food_step(agent, &population.food, temp, df, &self.params, ctx.rng),
                Phase::Fight => fight_step(agent, best_opposite, q, df, &self.params, ctx.rng),
                Phase::Mate => {
                    let partner = &opposite[i % opposite.len()];
                    mate_step(agent, partner, q, df, &self.params, ctx.rng)
                }
            })
            .collect()
    }

    fn late_moves<R: RandomSource>(
        &self,
        own: &[Agent],
        food: &Agent,
        mover: Mover,
        cf: f64,
        ctx: &mut StepContext<'_, R>,
    ) -> Vec<Vec<f64>> {
        let dim = food.position.len();
        own.iter()
            .map(|agent| {
                let r = match mover {
                    Mover::Levy => levy_sample(dim, &self.levy, ctx.rng),
                    Mover::Brownian => brownian_sample(dim, &self.brownian, ctx.rng),
                    Mover::Classic => unreachable!("classic movers use classic_moves"),
                };
                leader_step(agent, food, cf, &r)
            })
            .collect()
    }
}

impl Strategy for SnakeOptimizer {
    fn step<R: RandomSource>(
        &mut self,
        population: &mut Population,
        ctx: &mut StepContext<'_, R>,
    ) -> Result<(), RunError> {
        let t = population.iteration;
        let max_t = population.max_iterations;
        let late = 2 * t >= max_t;
        let plan = plan(self.variant, late);

        let df = if plan.disturbed {
            match self.disturbance {
                DisturbanceMode::Sine => disturbance_factor(t, max_t, ctx.rng),
                DisturbanceMode::Fixed(v) => v,
            }
        } else {
            1.0
        };

        let any_classic = plan.males == Mover::Classic || plan.females == Mover::Classic;
        let temp = temperature(t, max_t);
        let q = food_quantity(t, max_t, self.params.c1);
        let phase = if !any_classic {
            None
        } else if q < self.params.q_threshold {
            Some(Phase::Explore)
        } else if temp > self.params.temp_threshold {
            Some(Phase::Food)
        } else if ctx.rng.uniform() > self.params.mode_rand_threshold {
            Some(Phase::Fight)
        } else {
            Some(Phase::Mate)
        };
        let cf = convergence_factor(t, max_t);

        let males = match (plan.males, phase) {
            (Mover::Classic, Some(phase)) => self.classic_moves(
                &population.males,
                &population.females,
                population,
                phase,
                df,
                temp,
                q,
                ctx,
            ),
            (mover, _) => self.late_moves(&population.males, &population.food, mover, cf, ctx),
        };
        let females = match (plan.females, phase) {
            (Mover::Classic, Some(phase)) => self.classic_moves(
                &population.females,
                &population.males,
                population,
                phase,
                df,
                temp,
                q,
                ctx,
            ),
            (mover, _) => self.late_moves(&population.females, &population.food, mover, cf, ctx),
        };

        commit_group(&mut population.males, males, ctx)?;
        commit_group(&mut population.females, females, ctx)?;

        if phase == Some(Phase::Mate) {
            if plan.males == Mover::Classic {
                hatch_group(&mut population.males, ctx)?;
            }
            if plan.females == Mover::Classic {
                hatch_group(&mut population.females, ctx)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{init_population, Problem, RunConfig};
    use crate::rng::{ScriptedStream, SeededStream};

    const E_INV: f64 = 0.367_879_441_171_442_3;

    fn agent(position: Vec<f64>, fitness: f64) -> Agent {
        Agent { position, fitness }
    }

    #[test]
    fn temperature_values() {
        assert_eq!(temperature(0, 500), 1.0);
        assert!((temperature(500, 500) - E_INV).abs() < 1e-12);
        assert!((temperature(250, 500) - 0.606_530_659_712_633_4).abs() < 1e-12);
    }

    #[test]
    fn food_quantity_values() {
        assert_eq!(food_quantity(500, 500, 0.5), 0.5);
        assert!((food_quantity(0, 500, 0.5) - 0.5 * E_INV).abs() < 1e-12);
        assert!((food_quantity(0, 500, 0.5) - 0.183_940).abs() < 1e-6);
        assert_eq!(food_quantity(123, 500, 0.0), 0.0);
        let qs: Vec<_> = (0..=500).map(|t| food_quantity(t, 500, 0.5)).collect();
        assert!(qs.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn hunt_ability_values() {
        assert!((hunt_ability(3.0, 3.0) - E_INV).abs() < 1e-15);
        assert_eq!(hunt_ability(0.0, 5.0), 1.0);
        assert!((hunt_ability(2.0, 1.0) - 0.135_335_283_236_612_7).abs() < 1e-12);
        // overflow and sign guards
        assert_eq!(hunt_ability(1.0, 0.0), (-700f64).exp());
        assert_eq!(hunt_ability(0.0, 0.0), 1.0);
        assert_eq!(hunt_ability(-2.0, 1.0), 1.0);
        assert!(hunt_ability(1e308, 1e-308) > 0.0);
    }

    #[test]
    fn explore_step_examples() {
        let bounds = Bounds::uniform(3, 0.0, 1.0).unwrap();
        let me = agent(vec![0.9, 0.9, 0.9], 1.0);
        let peer = agent(vec![0.2, 0.4, 0.6], 0.0);
        let params = SnakeParams::default();

        // peer fitness 0 gives A = 1; coin draw 0.0 -> plus, then rand = 1
        let mut rng = ScriptedStream::new(vec![0.0, 1.0, 1.0, 1.0], vec![0.0]);
        let out = explore_step(&me, &peer, &bounds, 1.0, &params, &mut rng);
        for (o, p) in out.iter().zip(&peer.position) {
            assert!((o - (p + 0.05)).abs() < 1e-15);
        }

        let mut rng = SeededStream::new(9);
        assert_eq!(
            explore_step(&me, &peer, &bounds, 0.0, &params, &mut rng),
            peer.position
        );

        // clamped exponent: A = e^-700 vanishes against the peer coordinates
        let far = agent(peer.position.clone(), 1e6);
        let tiny = agent(me.position.clone(), 1.0);
        let out = explore_step(&tiny, &far, &bounds, 1.0, &params, &mut rng);
        assert_eq!(out, peer.position);
    }

    #[test]
    fn food_step_examples() {
        let params = SnakeParams::default();
        let food = agent(vec![2.0], 0.0);
        let same = agent(vec![2.0], 1.0);
        let mut rng = SeededStream::new(1);
        assert_eq!(
            food_step(&same, &food, 0.8, 1.0, &params, &mut rng),
            vec![2.0]
        );

        let me = agent(vec![1.0], 1.0);
        let mut zero = ScriptedStream::new(vec![0.0], vec![0.0]);
        assert_eq!(
            food_step(&me, &food, 0.8, 1.0, &params, &mut zero),
            vec![2.0]
        );

        let mut rng = ScriptedStream::new(vec![0.0, 0.5], vec![0.0]);
        let out = food_step(&me, &food, 0.8, 1.0, &params, &mut rng);
        assert!((out[0] - 2.8).abs() < 1e-12);

        // minus branch mirrors it
        let mut rng = ScriptedStream::new(vec![0.9, 0.5], vec![0.0]);
        let out = food_step(&me, &food, 0.8, 1.0, &params, &mut rng);
        assert!((out[0] - 1.2).abs() < 1e-12);
    }

    #[test]
    fn fight_step_examples() {
        let params = SnakeParams::default();
        let me = agent(vec![1.0, -3.0], 2.0);
        let best = agent(vec![2.0, 5.0], 0.0);
        let mut zero = ScriptedStream::constant(0.0, 0.0);
        assert_eq!(
            fight_step(&me, &best, 0.5, 1.0, &params, &mut zero),
            me.position
        );
        let mut rng = SeededStream::new(4);
        assert_eq!(
            fight_step(&me, &best, 0.5, 0.0, &params, &mut rng),
            me.position
        );

        // F = 1 (best fitness 0), rand = 1: 1 + 2 (0.5 * 2 - 1) = 1
        let me = agent(vec![1.0], 3.0);
        let best = agent(vec![2.0], 0.0);
        let mut one = ScriptedStream::constant(1.0, 0.0);
        let out = fight_step(&me, &best, 0.5, 1.0, &params, &mut one);
        assert!((out[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mate_step_examples() {
        let params = SnakeParams::default();
        let me = agent(vec![1.0, 2.0], 1.0);
        let partner = agent(vec![4.0, 5.0], 1.0);
        let mut zero = ScriptedStream::constant(0.0, 0.0);
        assert_eq!(
            mate_step(&me, &partner, 0.5, 1.0, &params, &mut zero),
            me.position
        );

        // q * partner == agent
        let partner = agent(vec![2.0, 4.0], 1.0);
        let mut rng = SeededStream::new(2);
        assert_eq!(
            mate_step(&me, &partner, 0.5, 1.0, &params, &mut rng),
            me.position
        );

        // M = exp(-1): 0 + 2 e^-1 (0.5 * 2 - 0)
        let me = agent(vec![0.0], 1.0);
        let partner = agent(vec![2.0], 1.0);
        let mut one = ScriptedStream::constant(1.0, 0.0);
        let out = mate_step(&me, &partner, 0.5, 1.0, &params, &mut one);
        assert!((out[0] - 0.735_758_882_342_884_6).abs() < 1e-12);
    }

    struct Line(Bounds);
    impl Problem for Line {
        fn name(&self) -> &str {
            "line"
        }
        fn bounds(&self) -> &Bounds {
            &self.0
        }
        fn evaluate(&self, x: &[f64]) -> f64 {
            x.iter().sum::<f64>() + 10.0
        }
    }

    #[test]
    fn hatch_replaces_worst_at_lower_bound() {
        let p = Line(Bounds::uniform(2, -1.0, 1.0).unwrap());
        let mut rng = SeededStream::new(5);
        let mut ctx = StepContext::new(&p, &mut rng);
        let mut pop = init_population(&mut ctx, 7, 10).unwrap();
        // flat male fitness: first one goes
        for m in pop.males.iter_mut() {
            m.fitness = 3.0;
        }
        let worst_female = worst_index(&pop.females).unwrap();

        let mut zero = ScriptedStream::constant(0.0, 0.0);
        let mut ctx = StepContext::new(&p, &mut zero);
        hatch_replace(&mut pop, &mut ctx).unwrap();
        assert_eq!(pop.males[0].position, vec![-1.0, -1.0]);
        assert_eq!(pop.males[0].fitness, 8.0);
        assert_eq!(pop.males[1].fitness, 3.0);
        assert_eq!(pop.females[worst_female].position, vec![-1.0, -1.0]);
        assert_eq!((pop.males.len(), pop.females.len()), (3, 4));
        assert_eq!(ctx.evaluations(), 2);
    }

    #[test]
    fn disturbance_factor_values() {
        let mut rng = SeededStream::new(0);
        assert_eq!(disturbance_factor(100, 100, &mut rng), 0.0);
        assert_eq!(disturbance_from_draw(0, 100, 0.0), 1.0);
        let peak = disturbance_from_draw(0, 100, std::f64::consts::FRAC_PI_4);
        assert!((peak - 2.0).abs() < 1e-15);
    }

    #[test]
    fn disturbance_factor_range() {
        let max_t = 200;
        for t in 0..=max_t {
            let lo = 1.0 - t as f64 / max_t as f64;
            for k in 0..=100 {
                let df = disturbance_from_draw(t, max_t, k as f64 / 100.0);
                assert!(df >= lo - 1e-15 && df <= 2.0 * lo + 1e-15);
            }
        }
    }

    #[test]
    fn convergence_factor_values() {
        assert_eq!(convergence_factor(0, 500), 1.0);
        assert_eq!(convergence_factor(500, 500), 0.0);
        let half = convergence_factor(250, 500);
        assert!((half - std::f64::consts::FRAC_1_SQRT_2 * 0.5).abs() < 1e-12);
        assert!((half - 0.353_553).abs() < 1e-6);
        let grid: Vec<_> = (0..=500).map(|t| convergence_factor(t, 500)).collect();
        assert!(grid.iter().all(|&c| (0.0..=1.0).contains(&c)));
        assert!(grid.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn levy_forced_draws() {
        let params = LevyParams::default();
        let mut zero = ScriptedStream::new(vec![0.5], vec![0.0, 1.0]);
        assert!(levy_sample(4, &params, &mut zero).iter().all(|&v| v == 0.0));
        let mut ones = ScriptedStream::constant(0.5, 1.0);
        for v in levy_sample(3, &params, &mut ones) {
            assert!((v - 3.482_88e-4).abs() < 1e-9);
        }
    }

    #[test]
    fn levy_redraws_zero_denominator() {
        let params = LevyParams::default();
        // u = 1, v = 0 (rejected), v = 1
        let mut rng = ScriptedStream::new(vec![0.5], vec![1.0, 0.0, 1.0]);
        let v = levy_sample(1, &params, &mut rng);
        assert!(v[0].is_finite());
        assert!((v[0] - 0.05 * 0.01 * params.sigma).abs() < 1e-15);
    }

    #[test]
    fn brownian_forced_draws() {
        let params = BrownianParams::default();
        let mut zero = ScriptedStream::constant(0.5, 0.0);
        assert!(brownian_sample(5, &params, &mut zero)
            .iter()
            .all(|&v| v == 0.0));
        let mut one = ScriptedStream::constant(0.5, 1.0);
        assert!(brownian_sample(5, &params, &mut one)
            .iter()
            .all(|&v| v == 0.05));
    }

    #[test]
    fn leader_step_examples() {
        let food = agent(vec![1.0], 0.0);
        let me = agent(vec![0.0], 1.0);
        let out = leader_step(&me, &food, 0.5, &[0.1]);
        assert!((out[0] - 1.005).abs() < 1e-15);
        assert_eq!(leader_step(&me, &food, 0.0, &[0.3]), food.position);
        assert_eq!(leader_step(&me, &food, 0.7, &[0.0]), food.position);
    }

    #[test]
    fn late_update_with_zero_cf_lands_on_food() {
        let p = Line(Bounds::uniform(3, -5.0, 5.0).unwrap());
        let mut rng = SeededStream::new(8);
        let mut ctx = StepContext::new(&p, &mut rng);
        let mut pop = init_population(&mut ctx, 8, 10).unwrap();
        let food = pop.food.position.clone();
        miso_late_update(
            &mut pop,
            10,
            &LevyParams::default(),
            &BrownianParams::default(),
            &mut ctx,
        )
        .unwrap();
        assert!(pop.agents().all(|a| a.position == food));
    }

    /// Records which update families a step used by watching draw counts.
    struct Counting<R> {
        inner: R,
        uniforms: usize,
        normals: usize,
    }
    impl<R: RandomSource> RandomSource for Counting<R> {
        fn uniform(&mut self) -> f64 {
            self.uniforms += 1;
            self.inner.uniform()
        }
        fn normal(&mut self) -> f64 {
            self.normals += 1;
            self.inner.normal()
        }
    }

    #[test]
    fn miso_late_phase_uses_only_leader_moves() {
        let p = Line(Bounds::uniform(4, -5.0, 5.0).unwrap());
        let mut init_rng = SeededStream::new(3);
        let mut ctx = StepContext::new(&p, &mut init_rng);
        let mut pop = init_population(&mut ctx, 10, 20).unwrap();
        let mut opt = SnakeOptimizer::new(Algorithm::Miso);
        for t in 10..20 {
            pop.iteration = t;
            let mut rng = Counting {
                inner: SeededStream::new(t as u64),
                uniforms: 0,
                normals: 0,
            };
            let mut ctx = StepContext::new(&p, &mut rng);
            opt.step(&mut pop, &mut ctx).unwrap();
            let evals = ctx.evaluations();
            assert_eq!(evals, 10);
            assert_eq!(rng.uniforms, 0, "classic moves draw uniforms");
            // 5 males x 4 dims x (u, v) + 5 females x 4 dims
            assert_eq!(rng.normals, 5 * 4 * 2 + 5 * 4);
            pop.refresh_food();
        }
    }

    #[test]
    fn fixed_unit_disturbance_reduces_to_so() {
        let p = Line(Bounds::uniform(3, -5.0, 5.0).unwrap());
        let config = RunConfig {
            population_size: 9,
            max_iterations: 40,
            seed: 11,
            algorithm: Algorithm::So,
            record_diversity: false,
        };
        let trajectory = |variant| {
            let mut rng = SeededStream::new(config.seed);
            let mut ctx = StepContext::new(&p, &mut rng);
            let mut pop =
                init_population(&mut ctx, config.population_size, config.max_iterations).unwrap();
            let mut opt =
                SnakeOptimizer::new(variant).with_disturbance(DisturbanceMode::Fixed(1.0));
            let mut states = Vec::new();
            for t in 0..config.max_iterations / 2 {
                pop.iteration = t;
                opt.step(&mut pop, &mut ctx).unwrap();
                pop.refresh_food();
                states.push(pop.clone());
            }
            states
        };
        let so = trajectory(Algorithm::So);
        assert_eq!(so, trajectory(Algorithm::Dso));
        assert_eq!(so, trajectory(Algorithm::Miso));
        assert_eq!(so, trajectory(Algorithm::Lso));
        assert_eq!(so, trajectory(Algorithm::Bso));
    }

    #[test]
    fn plans_per_variant() {
        use Mover::*;
        assert_eq!(
            plan(Algorithm::Miso, true),
            Plan {
                males: Levy,
                females: Brownian,
                disturbed: false
            }
        );
        assert_eq!(
            plan(Algorithm::Miso, false),
            Plan {
                males: Classic,
                females: Classic,
                disturbed: true
            }
        );
        assert_eq!(
            plan(Algorithm::Dso, true),
            Plan {
                males: Classic,
                females: Classic,
                disturbed: true
            }
        );
        assert_eq!(
            plan(Algorithm::Lso, true),
            Plan {
                males: Levy,
                females: Classic,
                disturbed: false
            }
        );
        assert_eq!(
            plan(Algorithm::Bso, true),
            Plan {
                males: Classic,
                females: Brownian,
                disturbed: false
            }
        );
        assert_eq!(
            plan(Algorithm::So, true),
            Plan {
                males: Classic,
                females: Classic,
                disturbed: false
            }
        );
    }
}
