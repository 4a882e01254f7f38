//! End-to-end use of the public API: evolve both genomes on the bundled
//! walk, bundle them into a theory, and replay the data through it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use theorist::datagen::test_fixtures::cat_series;
use theorist::evolve::{run, GpConfig};
use theorist::expr::{ExprConfig, StatKind, TerminalBindings, ValueSource};
use theorist::gates::GateConfig;
use theorist::objectives::{decision_fitness_auto, value_fitness};
use theorist::theory::{accuracy, predict, reconstruct, ReconstructionMode, Theory};

#[test]
fn discover_bundle_and_replay() {
    let series = cat_series();

    let mut bindings = TerminalBindings::new();
    bindings.insert("t", ValueSource::IndexK);
    bindings.insert("d", ValueSource::Stat(StatKind::DAvg));
    bindings.insert("av", ValueSource::Stat(StatKind::Av));
    bindings.insert("h", ValueSource::Stat(StatKind::H));
    bindings.insert("l", ValueSource::Stat(StatKind::L));
    let bound = bindings.bind_to(&series);

    let gp = GpConfig {
        population_size: 120,
        generations: 40,
        seed: 5,
        ..GpConfig::default()
    };

    let expr_ops = ExprConfig {
        max_depth: gp.max_depth,
        init_depth: gp.init_depth,
        ..ExprConfig::arithmetic(["t", "d", "av", "h", "l"])
    };
    let (value_best, history) = run(&gp, &expr_ops, |g, _| value_fitness(g, &series, &bound));
    assert!(value_best.fitness >= -1e-9, "fitness {}", value_best.fitness);
    assert_eq!(history.records.len(), gp.generations + 1);

    let gate_ops = GateConfig::default();
    let (decision_best, _) = run(&gp, &gate_ops, |g, rng| {
        decision_fitness_auto(g, &series, gp.enumeration_cap, gp.mc_draws, rng)
    });
    assert!(decision_best.fitness.abs() <= 1e-9);

    let theory = Theory::new(value_best.genome, decision_best.genome, bindings).unwrap();

    let dir = tempfile::tempdir().unwrap();
    theorist::theory::save(&theory, dir.path()).unwrap();
    let loaded = theorist::theory::load(dir.path()).unwrap();
    assert_eq!(loaded, theory);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rec = reconstruct(&loaded, &series, ReconstructionMode::TeacherForced, &mut rng);
    assert_eq!(accuracy(&rec, &series, 1e-9).unwrap(), 1.0);

    let forecast = predict(&loaded, &series, 5, &mut rng);
    assert_eq!(forecast.steps.len(), 5);
    for step in &forecast.steps {
        assert!(step.value.is_finite());
        assert!((0.0..=1.0).contains(&step.p1));
    }
}
