//! Deterministic generators for the two bundled experiments: a uniformly
//! accelerated puck and a fair digital-coin random walk.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::series::{derive_states, TimeSeries};

/// Parameters of the accelerated-puck generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PuckParams {
    /// Initial velocity.
    pub v: f64,
    /// Acceleration.
    pub a: f64,
    /// Number of generated values (positions at t = 0..steps-1).
    pub steps: usize,
}

/// Parameters of the digital-coin walk generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoinParams {
    /// Number of coin flips (= number of samples).
    pub steps: usize,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("puck generator needs steps >= 2, got {0}")]
    PuckSteps(usize),
    #[error("coin generator needs steps >= 1, got {0}")]
    CoinSteps(usize),
    #[error("puck parameters must be finite")]
    NonFiniteParams,
}

/// Puck position at time `t` under constant acceleration.
pub fn puck_position(params: &PuckParams, t: f64) -> f64 {
    params.v * t + 0.5 * params.a * t * t
}

/// Generate the puck trajectory: positions at t = 0..steps-1, states derived
/// from the values.
pub fn gen_puck(params: &PuckParams) -> Result<TimeSeries, DatagenError> {
    if params.steps < 2 {
        return Err(DatagenError::PuckSteps(params.steps));
    }
    if !params.v.is_finite() || !params.a.is_finite() {
        return Err(DatagenError::NonFiniteParams);
    }
    let values: Vec<f64> = (0..params.steps)
        .map(|t| puck_position(params, t as f64))
        .collect();
    Ok(derive_states(&values).expect("finite quadratic values form a valid series"))
}

/// Walk driven by an arbitrary coin stream; the test hook behind [`gen_coin`].
/// `coin` yields true for a 0-flip (+1 step) and false for a 1-flip (-1 step).
pub fn coin_walk(steps: usize, mut coin: impl FnMut() -> bool) -> Result<TimeSeries, DatagenError> {
    if steps == 0 {
        return Err(DatagenError::CoinSteps(steps));
    }
    let mut values = Vec::with_capacity(steps + 1);
    values.push(0.0);
    for _ in 0..steps {
        let delta = if coin() { 1.0 } else { -1.0 };
        values.push(values.last().unwrap() + delta);
    }
    Ok(derive_states(&values).expect("unit steps form a valid series"))
}

/// Generate a fair-coin walk from a seeded PRNG. Identical seeds produce
/// identical series.
pub fn gen_coin(params: &CoinParams) -> Result<TimeSeries, DatagenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    coin_walk(params.steps, move || rng.gen_bool(0.5))
}

/// Bundled fixtures used by the presets and the test suite.
pub mod test_fixtures {
    use crate::series::{from_csv, TimeSeries};

    const CAT_CSV: &str = include_str!("../data/cat_series.csv");

    /// The recorded 20-step coin-walk realization the `cat` preset trains on.
    pub fn cat_series() -> TimeSeries {
        from_csv(CAT_CSV).expect("bundled cat series is valid")
    }

    /// Raw text of the bundled coin-walk recording.
    pub fn cat_series_csv() -> &'static str {
        CAT_CSV
    }

    /// The 20 positions of the v=4, a=6 puck trajectory.
    pub fn table1_values() -> Vec<f64> {
        vec![
            0.0, 7.0, 20.0, 39.0, 64.0, 95.0, 132.0, 175.0, 224.0, 279.0, 340.0, 407.0, 480.0,
            559.0, 644.0, 735.0, 832.0, 935.0, 1044.0, 1159.0,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::test_fixtures::*;
    use super::*;
    use crate::series::{distances, State};
    use proptest::prelude::*;

    #[test]
    fn puck_reproduces_reference_trajectory() {
        let s = gen_puck(&PuckParams {
            v: 4.0,
            a: 6.0,
            steps: 20,
        })
        .unwrap();
        assert_eq!(s.values(), table1_values());
        assert!(s.samples().iter().all(|x| x.state == State::Up));
    }

    #[test]
    fn puck_at_rest_stays_flat() {
        let s = gen_puck(&PuckParams {
            v: 0.0,
            a: 0.0,
            steps: 3,
        })
        .unwrap();
        assert_eq!(s.values(), vec![0.0, 0.0, 0.0]);
        assert!(s.samples().iter().all(|x| x.state == State::Up));
    }

    #[test]
    fn puck_linear_motion() {
        let s = gen_puck(&PuckParams {
            v: 1.0,
            a: 0.0,
            steps: 4,
        })
        .unwrap();
        assert_eq!(s.values(), vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn puck_rejects_short_runs() {
        assert!(matches!(
            gen_puck(&PuckParams {
                v: 4.0,
                a: 6.0,
                steps: 1
            }),
            Err(DatagenError::PuckSteps(1))
        ));
    }

    #[test]
    fn coin_walk_distances_are_unit() {
        let s = gen_coin(&CoinParams { steps: 50, seed: 7 }).unwrap();
        assert!(distances(&s).iter().all(|&d| d == 1.0));
    }

    #[test]
    fn forced_heads_stream_counts_up() {
        let s = coin_walk(4, || true).unwrap();
        assert_eq!(s.values(), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn coin_walk_is_deterministic_per_seed() {
        let p = CoinParams { steps: 30, seed: 42 };
        assert_eq!(gen_coin(&p).unwrap(), gen_coin(&p).unwrap());
        let q = CoinParams { steps: 30, seed: 43 };
        assert_ne!(gen_coin(&p).unwrap(), gen_coin(&q).unwrap());
    }

    #[test]
    fn coin_rejects_zero_steps() {
        assert!(gen_coin(&CoinParams { steps: 0, seed: 1 }).is_err());
    }

    #[test]
    fn bundled_cat_series_matches_recording() {
        let s = cat_series();
        assert_eq!(s.x0(), 0.0);
        assert_eq!(s.len(), 20);
        assert_eq!(s.samples()[0].value, -1.0);
        assert_eq!(s.samples()[0].state, State::Down);
        assert_eq!(s.last_value(), 0.0);
    }

    proptest! {
        #[test]
        fn puck_second_difference_equals_acceleration(
            v in -10.0f64..10.0,
            a in -10.0f64..10.0,
            steps in 3usize..40,
        ) {
            let s = gen_puck(&PuckParams { v, a, steps }).unwrap();
            let xs = s.values();
            for t in 1..xs.len() - 1 {
                let second = xs[t + 1] - 2.0 * xs[t] + xs[t - 1];
                prop_assert!((second - a).abs() < 1e-9);
            }
        }

        #[test]
        fn coin_walk_invariants(seed in 0u64..1000, steps in 1usize..60) {
            let s = gen_coin(&CoinParams { steps, seed }).unwrap();
            prop_assert_eq!(s.len(), steps);
            for d in distances(&s) {
                prop_assert_eq!(d, 1.0);
            }
        }
    }
}
