//! Fitness functions: squared-error fitness for the value model and the
//! expected-value betting fitness for the decision model.

use rand::Rng;

use crate::expr::{self, BoundBindings, ExprTree};
use crate::gates::{enumerate_strategies, random_strategy, GateError, GateTree};
use crate::series::{distances, State, TimeSeries};

/// One step of the betting game against the observed series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetOutcome {
    /// Step index (1-based).
    pub k: usize,
    /// Observed state at `k`.
    pub state: State,
    pub p1: f64,
    pub p2: f64,
    /// Observed distance at `k`.
    pub d: f64,
    /// Expected payoff of the bet.
    pub ev: f64,
}

/// Per-step expected payoff: betting the true state earns the observed
/// distance, betting against it loses it, each weighted by its probability.
pub fn expected_value_step(p1: f64, p2: f64, state: State, d: f64) -> f64 {
    match state {
        State::Up => (p1 - p2) * d,
        State::Down => (p2 - p1) * d,
    }
}

/// The full betting record of a fixed (p1, p2) strategy over a series.
pub fn bet_outcomes(p1: f64, p2: f64, series: &TimeSeries) -> Vec<BetOutcome> {
    distances(series)
        .into_iter()
        .zip(series.samples())
        .enumerate()
        .map(|(i, (d, sample))| {
            let k = i + 1;
            BetOutcome {
                k,
                state: sample.state,
                p1,
                p2,
                d,
                ev: expected_value_step(p1, p2, sample.state, d),
            }
        })
        .collect()
}

fn bet_total(p1: f64, p2: f64, series: &TimeSeries) -> f64 {
    let mut total = 0.0;
    let ds = distances(series);
    for (d, sample) in ds.into_iter().zip(series.samples()) {
        total += expected_value_step(p1, p2, sample.state, d);
    }
    total
}

/// How the decision-model fitness averages over strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Uniform average over every enumerated strategy. Errors when the tree
    /// has more choice nodes than `enumeration_cap`.
    Exact { enumeration_cap: usize },
    /// Empirical mean over uniformly drawn strategies.
    MonteCarlo { draws: usize },
}

/// Per-draw bet totals of uniformly sampled strategies; the Monte Carlo
/// fitness is their mean.
pub fn monte_carlo_bets<R: Rng>(
    tree: &GateTree,
    series: &TimeSeries,
    draws: usize,
    rng: &mut R,
) -> Vec<f64> {
    (0..draws)
        .map(|_| {
            let s = random_strategy(tree, rng);
            bet_total(s.p1, s.p2, series)
        })
        .collect()
}

/// Expected-value fitness of a decision tree: the strategy-averaged sum of
/// per-step expected payoffs. Bounded in magnitude by the total observed
/// distance.
pub fn decision_fitness<R: Rng>(
    tree: &GateTree,
    series: &TimeSeries,
    mode: EvalMode,
    rng: &mut R,
) -> Result<f64, GateError> {
    match mode {
        EvalMode::Exact { enumeration_cap } => {
            let strategies = enumerate_strategies(tree, enumeration_cap)?;
            let total: f64 = strategies
                .iter()
                .map(|s| bet_total(s.p1, s.p2, series))
                .sum();
            Ok(total / strategies.len() as f64)
        }
        EvalMode::MonteCarlo { draws } => {
            assert!(draws >= 1, "Monte Carlo mode needs at least one draw");
            let samples = monte_carlo_bets(tree, series, draws, rng);
            Ok(samples.iter().sum::<f64>() / draws as f64)
        }
    }
}

/// Exact fitness when the tree is small enough to enumerate, Monte Carlo
/// otherwise. The evolution loop's fitness function.
pub fn decision_fitness_auto<R: Rng>(
    tree: &GateTree,
    series: &TimeSeries,
    enumeration_cap: usize,
    mc_draws: usize,
    rng: &mut R,
) -> f64 {
    let mode = if tree.choice_count() <= enumeration_cap {
        EvalMode::Exact { enumeration_cap }
    } else {
        EvalMode::MonteCarlo { draws: mc_draws }
    };
    decision_fitness(tree, series, mode, rng).expect("mode chosen to fit the tree")
}

/// Squared-error fitness of a value tree; delegates to [`expr::fitness`] so
/// both genomes expose one fitness contract to the engine.
pub fn value_fitness(tree: &ExprTree, series: &TimeSeries, bindings: &BoundBindings) -> f64 {
    expr::fitness(tree, series, bindings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::test_fixtures::{cat_series, table1_values};
    use crate::expr::test_support::{puck_bindings, puck_tree};
    use crate::gates::{Gate, GateConfig};
    use crate::series::derive_states;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn exact() -> EvalMode {
        EvalMode::Exact {
            enumeration_cap: 12,
        }
    }

    #[test]
    fn expected_value_step_branches() {
        assert_eq!(expected_value_step(1.0, 0.0, State::Up, 7.0), 7.0);
        assert_eq!(expected_value_step(1.0, 0.0, State::Down, 1.0), -1.0);
        assert_eq!(expected_value_step(0.5, 0.5, State::Up, 11.0), 0.0);
        assert_eq!(expected_value_step(0.5, 0.5, State::Down, 11.0), 0.0);
    }

    #[test]
    fn expected_value_step_is_antisymmetric_under_state_flip() {
        for (p1, d) in [(0.3, 2.0), (0.9, 5.5), (0.0, 1.0)] {
            let p2 = 1.0 - p1;
            assert_eq!(
                expected_value_step(p1, p2, State::Up, d),
                -expected_value_step(p1, p2, State::Down, d)
            );
        }
    }

    #[test]
    fn sure_bettor_collects_total_distance_on_monotone_series() {
        // All states are 0 and (Y + I) always bets state 0, so the fitness
        // telescopes to the final minus the initial value: 1159.
        let series = derive_states(&table1_values()).unwrap();
        let tree = GateTree::add(GateTree::leaf(Gate::Y), GateTree::leaf(Gate::I));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = decision_fitness(&tree, &series, exact(), &mut rng).unwrap();
        assert!((f - 1159.0).abs() < 1e-9);
    }

    #[test]
    fn sure_bettor_breaks_even_on_balanced_walk() {
        let series = cat_series();
        let tree = GateTree::add(GateTree::leaf(Gate::Y), GateTree::leaf(Gate::I));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = decision_fitness(&tree, &series, exact(), &mut rng).unwrap();
        assert!(f.abs() < 1e-9);
    }

    #[test]
    fn flat_series_yields_zero_fitness() {
        let series = derive_states(&[5.0, 5.0]).unwrap();
        let tree = GateTree::leaf(Gate::H);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = decision_fitness(&tree, &series, exact(), &mut rng).unwrap();
        assert_eq!(f, 0.0);
    }

    #[test]
    fn fitness_is_bounded_by_total_distance() {
        let series = derive_states(&[0.0, 3.0, 1.0, 4.0, -2.0]).unwrap();
        let bound: f64 = distances(&series).iter().sum();
        let config = GateConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let tree = config.random_tree(&mut rng);
            let f = decision_fitness_auto(&tree, &series, 12, 64, &mut rng);
            assert!(f.abs() <= bound + 1e-9);
        }
    }

    #[test]
    fn exact_and_monte_carlo_agree_on_small_trees() {
        let series = derive_states(&[0.0, 1.0, -1.0, 2.0]).unwrap();
        let tree = GateTree::choice(
            GateTree::add(GateTree::leaf(Gate::Y), GateTree::leaf(Gate::I)),
            GateTree::leaf(Gate::H),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let exact_f = decision_fitness(&tree, &series, exact(), &mut rng).unwrap();
        let samples = monte_carlo_bets(&tree, &series, 4096, &mut rng);
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>()
            / (samples.len() - 1) as f64;
        let se = (var / samples.len() as f64).sqrt();
        assert!(
            (mean - exact_f).abs() <= 3.0 * se + 1e-12,
            "mean {mean}, exact {exact_f}, se {se}"
        );
    }

    #[test]
    fn exact_mode_rejects_trees_over_the_cap() {
        let mut tree = GateTree::choice(GateTree::leaf(Gate::I), GateTree::leaf(Gate::X));
        for _ in 0..4 {
            tree = GateTree::choice(tree.clone(), tree);
        }
        let series = cat_series();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            decision_fitness(
                &tree,
                &series,
                EvalMode::Exact { enumeration_cap: 3 },
                &mut rng
            ),
            Err(GateError::EnumerationCap { .. })
        ));
    }

    #[test]
    fn value_fitness_delegates_to_expression_fitness() {
        let series = derive_states(&table1_values()).unwrap();
        let b = puck_bindings().bind(None).unwrap();
        let tree = puck_tree();
        assert_eq!(value_fitness(&tree, &series, &b), 0.0);
    }

    #[test]
    fn bet_outcomes_record_every_step() {
        let series = cat_series();
        let outs = bet_outcomes(1.0, 0.0, &series);
        assert_eq!(outs.len(), series.len());
        for o in &outs {
            assert!(o.ev.abs() <= o.d + 1e-12);
            let expected = match o.state {
                State::Up => o.d,
                State::Down => -o.d,
            };
            assert_eq!(o.ev, expected);
        }
    }
}
