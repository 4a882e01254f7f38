//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Run with `cargo test -p theorist-cli --test acceptance -- --nocapture`
//! to see the per-criterion lines.

use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use theorist::datagen::test_fixtures::cat_series;
use theorist::evolve::{run, GpConfig, Individual, OperatorMix};
use theorist::expr::{self, ExprConfig, ExprTree, StatKind, TerminalBindings, ValueSource};
use theorist::gates::{
    action_probabilities, eigen2, enumerate_strategies, parse_text as parse_gate_text,
    random_strategy, GateConfig,
};
use theorist::objectives::{
    decision_fitness, monte_carlo_bets, value_fitness, EvalMode,
};
use theorist::series::{derive_states, read_csv, State, TimeSeries};
use theorist::theory::{accuracy, predict, reconstruct, ReconstructionMode, Theory};

/// The reference accelerated-puck trajectory (v=4, a=6, 20 positions).
const PUCK_VALUES: [f64; 20] = [
    0.0, 7.0, 20.0, 39.0, 64.0, 95.0, 132.0, 175.0, 224.0, 279.0, 340.0, 407.0, 480.0, 559.0,
    644.0, 735.0, 832.0, 935.0, 1044.0, 1159.0,
];

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_theorist")
}

fn puck_series() -> TimeSeries {
    derive_states(&PUCK_VALUES).unwrap()
}

fn newton_bindings() -> TerminalBindings {
    let mut b = TerminalBindings::new();
    b.insert("t", ValueSource::IndexK);
    b.insert("v", ValueSource::Const(4.0));
    b.insert("a", ValueSource::Const(6.0));
    b.insert("o", ValueSource::Const(1.0));
    b.insert("h", ValueSource::Const(0.5));
    b
}

fn cat_bindings() -> TerminalBindings {
    let mut b = TerminalBindings::new();
    b.insert("t", ValueSource::IndexK);
    b.insert("d", ValueSource::Stat(StatKind::DAvg));
    b.insert("av", ValueSource::Stat(StatKind::Av));
    b.insert("h", ValueSource::Stat(StatKind::H));
    b.insert("l", ValueSource::Stat(StatKind::L));
    b
}

fn pinned_gp(seed: u64) -> GpConfig {
    GpConfig {
        population_size: 500,
        generations: 100,
        crossover_prob: 0.70,
        mutation_prob: 0.05,
        elitism: 1,
        seed,
        ..GpConfig::default()
    }
}

fn arithmetic_ops(bindings: &TerminalBindings, gp: &GpConfig) -> ExprConfig {
    ExprConfig {
        binary_ops: expr::BinaryOp::ALL.to_vec(),
        unary_ops: Vec::new(),
        terminals: bindings.names().map(str::to_string).collect(),
        max_depth: gp.max_depth,
        init_depth: gp.init_depth,
    }
}

fn evolve_newton_seed(seed: u64) -> Individual<ExprTree> {
    let series = puck_series();
    let bindings = newton_bindings();
    let bound = bindings.bind_to(&series);
    let gp = pinned_gp(seed);
    let ops = arithmetic_ops(&bindings, &gp);
    run(&gp, &ops, |g, _| value_fitness(g, &series, &bound)).0
}

/// Does the tree's distance law equal v + a*t - a/2 (= 6t + 1) on t = 1..19?
fn has_exact_distance_law(tree: &ExprTree) -> bool {
    let series = puck_series();
    let bound = newton_bindings().bind_to(&series);
    (1..=series.len()).all(|k| {
        (expr::distance(tree, k, &bound) - (6.0 * k as f64 + 1.0)).abs() <= 1e-9
    })
}

/// First seed in 1..=10 whose evolved tree passes both criterion-2 clauses.
fn newton_winner() -> &'static (u64, ExprTree) {
    static WINNER: OnceLock<(u64, ExprTree)> = OnceLock::new();
    WINNER.get_or_init(|| {
        for seed in 1..=10u64 {
            let best = evolve_newton_seed(seed);
            if best.fitness >= -1e-6 && has_exact_distance_law(&best.genome) {
                return (seed, best.genome);
            }
        }
        panic!("no seed in 1..=10 rediscovered the distance law");
    })
}

#[test]
fn ac01_puck_datagen_regenerates_reference_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("puck.csv");
    let start = Instant::now();
    let status = Command::new(bin())
        .args(["datagen", "puck", "--v", "4", "--a", "6", "--steps", "20"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    let elapsed = start.elapsed();
    assert!(status.success());
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");

    let series = read_csv(&out).unwrap();
    let values = series.values();
    assert_eq!(values.len(), 20);
    for (got, want) in values.iter().zip(PUCK_VALUES) {
        assert_eq!(*got, want, "values must match exactly");
    }
    assert!(series.samples().iter().all(|s| s.state == State::Up));
    println!("AC-01 PASS - datagen puck reproduces all 20 reference values exactly in {elapsed:?}");
}

#[test]
fn ac02_newton_rediscovery_within_ten_seeds() {
    let mut hits = 0;
    let mut first_hit = None;
    for seed in 1..=10u64 {
        let start = Instant::now();
        let best = evolve_newton_seed(seed);
        let elapsed = start.elapsed();
        assert!(
            elapsed < Duration::from_secs(60),
            "seed {seed} took {elapsed:?}"
        );
        let hit = best.fitness >= -1e-6 && has_exact_distance_law(&best.genome);
        if hit {
            hits += 1;
            first_hit.get_or_insert(seed);
        }
        println!(
            "  seed {seed}: fitness {:.3e} in {elapsed:.1?}{}",
            best.fitness,
            if hit { " [exact distance law]" } else { "" }
        );
    }
    assert!(hits >= 1, "no seed rediscovered the distance law");
    println!(
        "AC-02 PASS - {hits}/10 seeds reached fitness 0 with distance law 6t+1 (first: seed {})",
        first_hit.unwrap()
    );
}

#[test]
fn ac03_reconstruction_and_horizon_one_forecast() {
    let (seed, tree) = newton_winner();
    let series = puck_series();
    let decision = parse_gate_text("(+ Y I)").unwrap();
    let theory = Theory::new(tree.clone(), decision, newton_bindings()).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
    let rec = reconstruct(&theory, &series, ReconstructionMode::TeacherForced, &mut rng);
    let acc = accuracy(&rec, &series, 1e-9).unwrap();
    assert_eq!(acc, 1.0);

    // Independent oracle: the generator law evaluated at t = 20.
    let expected = 4.0 * 20.0 + 0.5 * 6.0 * 20.0 * 20.0;
    assert_eq!(expected, 1280.0);
    let forecast = predict(&theory, &series, 1, &mut rng);
    let step = &forecast.steps[0];
    assert_eq!(step.k, 20);
    assert_eq!(step.state, State::Up);
    assert!((step.value - expected).abs() <= 1e-9, "got {}", step.value);
    println!(
        "AC-03 PASS - teacher-forced accuracy 1.0 and horizon-1 forecast x'_20 = {} (seed {seed})",
        step.value
    );
}

#[test]
fn ac04_unit_walk_rediscovery_on_eight_of_ten_seeds() {
    let series = cat_series();
    let bindings = cat_bindings();
    let bound = bindings.bind_to(&series);
    let mut hits = 0;
    for seed in 1..=10u64 {
        let gp = pinned_gp(seed);
        let ops = arithmetic_ops(&bindings, &gp);
        let start = Instant::now();
        let (best, _) = run(&gp, &ops, |g, _| value_fitness(g, &series, &bound));
        let elapsed = start.elapsed();
        assert!(
            elapsed < Duration::from_secs(30),
            "seed {seed} took {elapsed:?}"
        );
        if best.fitness >= -1e-9 {
            hits += 1;
        }
    }
    assert!(hits >= 8, "only {hits}/10 seeds reached fitness 0");
    println!("AC-04 PASS - {hits}/10 seeds rediscovered the unit distance law");
}

#[test]
fn ac05_strategy_oracle() {
    let pure_up = parse_gate_text("(+ Y I)").unwrap();
    let (p1, p2) = action_probabilities(&pure_up.resolve(&[]).unwrap());
    assert!((p1 - 1.0).abs() <= 1e-9 && p2.abs() <= 1e-9);

    let tree = parse_gate_text("(+ S (* (* (// I X) (* (// D Z) T)) T))").unwrap();
    let strategies = enumerate_strategies(&tree, 12).unwrap();
    assert_eq!(strategies.len(), 4, "reference tree must have 4 strategies");

    // Choices (X, D): all weight on action 2.
    let (p1, p2) = action_probabilities(&tree.resolve(&[true, false]).unwrap());
    assert!(p1.abs() <= 1e-9 && (p2 - 1.0).abs() <= 1e-9);

    // Choices (I, Z): all weight on action 1.
    let (p1, p2) = action_probabilities(&tree.resolve(&[false, true]).unwrap());
    assert!((p1 - 1.0).abs() <= 1e-9 && p2.abs() <= 1e-9);

    // The two mixed strategies split evenly under the documented convention
    // (their eigenvalues share one modulus).
    for bits in [[false, false], [true, true]] {
        let (p1, p2) = action_probabilities(&tree.resolve(&bits).unwrap());
        assert!((p1 - 0.5).abs() <= 1e-9 && (p2 - 0.5).abs() <= 1e-9);
    }
    println!(
        "AC-05 PASS - pure strategies map to (1,0)/(0,1); mixed strategies to the documented (0.5,0.5)"
    );
}

#[test]
fn ac06_eigen_kernel_properties_over_random_matrices() {
    let config = GateConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst_residual = 0.0f64;
    for _ in 0..1000 {
        let tree = config.random_tree(&mut rng);
        let strat = random_strategy(&tree, &mut rng);
        let m = strat.matrix;
        let dec = eigen2(&m);
        for pair in [dec.first, dec.second] {
            let mv = m.mul_vec(pair.vector);
            let lv = [pair.vector[0] * pair.lambda, pair.vector[1] * pair.lambda];
            let res = ((mv[0] - lv[0]).norm_sqr() + (mv[1] - lv[1]).norm_sqr()).sqrt();
            worst_residual = worst_residual.max(res);
            assert!(res <= 1e-8, "residual {res}");
        }
        assert!(
            (dec.first.lambda + dec.second.lambda - m.trace()).norm() <= 1e-8,
            "trace identity"
        );
        assert!(
            (dec.first.lambda * dec.second.lambda - m.det()).norm() <= 1e-8,
            "determinant identity"
        );
        assert!((strat.p1 + strat.p2 - 1.0).abs() <= 1e-12, "probability sum");
        assert!((0.0..=1.0).contains(&strat.p1));
    }
    println!(
        "AC-06 PASS - 1000 random gate-tree matrices: worst eigen residual {worst_residual:.2e}, \
         trace/det identities within 1e-8, probabilities sum to 1"
    );
}

#[test]
fn ac07_decision_fitness_oracles() {
    let tree = parse_gate_text("(+ Y I)").unwrap();
    let exact = EvalMode::Exact {
        enumeration_cap: 12,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);

    // Telescoping oracle: an always-right bettor on a monotone series earns
    // the sum of distances, which collapses to last - first.
    let telescoped: f64 = PUCK_VALUES
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .sum();
    assert_eq!(telescoped, PUCK_VALUES[19] - PUCK_VALUES[0]);
    let f = decision_fitness(&tree, &puck_series(), exact, &mut rng).unwrap();
    assert!((f - telescoped).abs() <= 1e-9, "got {f}, want {telescoped}");

    // State-count oracle on the bundled walk: 10 up-steps minus 10
    // down-steps, each of unit distance.
    let cat = cat_series();
    let ups = cat.samples().iter().filter(|s| s.state == State::Up).count() as f64;
    let downs = cat.len() as f64 - ups;
    let expected = ups - downs;
    assert_eq!(expected, 0.0);
    let f = decision_fitness(&tree, &cat, exact, &mut rng).unwrap();
    assert!((f - expected).abs() <= 1e-9, "got {f}");

    // Exact vs Monte Carlo on 50 random small instances.
    let config = GateConfig {
        max_depth: 4,
        init_depth: (2, 4),
    };
    let mut made = 0;
    let mut attempts = 0;
    while made < 50 {
        attempts += 1;
        assert!(attempts < 10_000, "tree sampling stalled");
        let tree = config.random_tree(&mut rng);
        if tree.choice_count() > 4 {
            continue;
        }
        let len = rng.gen_range(2..=8);
        let mut values = vec![0.0f64];
        for _ in 0..len {
            let step: f64 = rng.gen_range(-3.0..3.0);
            let last = *values.last().unwrap();
            values.push(last + step);
        }
        let series = derive_states(&values).unwrap();

        let exact_f = decision_fitness(&tree, &series, exact, &mut rng).unwrap();
        let samples = monte_carlo_bets(&tree, &series, 4096, &mut rng);
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>()
            / (samples.len() - 1) as f64;
        let se = (var / samples.len() as f64).sqrt();
        assert!(
            (mean - exact_f).abs() <= 3.0 * se + 1e-12,
            "instance {made}: exact {exact_f}, mc {mean}, se {se}"
        );
        made += 1;
    }
    println!(
        "AC-07 PASS - betting fitness matches the telescoping (1159) and state-count (0) oracles; \
         Monte Carlo agrees with exact within 3 SE on 50 instances"
    );
}

#[test]
fn ac08_even_strategy_forecasts_split_evenly() {
    let series = cat_series();
    // A single X leaf resolves to an even (0.5, 0.5) strategy.
    let decision = parse_gate_text("X").unwrap();
    let strategies = enumerate_strategies(&decision, 12).unwrap();
    assert_eq!(strategies.len(), 1);
    assert!((strategies[0].p1 - 0.5).abs() <= 1e-12);

    let theory = Theory::new(
        expr::parse_text("(+ d t)").unwrap(),
        decision,
        cat_bindings(),
    )
    .unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let n = 10_000;
    let mut ups = 0;
    for _ in 0..n {
        let f = predict(&theory, &series, 1, &mut rng);
        if f.steps[0].state == State::Up {
            ups += 1;
        }
    }
    let freq = ups as f64 / n as f64;
    assert!((freq - 0.5).abs() <= 0.02, "state-0 frequency {freq}");
    println!("AC-08 PASS - 10^4 horizon-1 forecasts: state-0 frequency {freq} within 0.5 +/- 0.02");
}

#[test]
fn ac09_engine_properties() {
    let series = cat_series();
    let bindings = cat_bindings();
    let bound = bindings.bind_to(&series);

    // Monotone best fitness over 20 random runs with elitism 1.
    for seed in 0..20u64 {
        let gp = GpConfig {
            population_size: 30,
            generations: 15,
            seed,
            ..GpConfig::default()
        };
        let ops = arithmetic_ops(&bindings, &gp);
        let (_, history) = run(&gp, &ops, |g, _| value_fitness(g, &series, &bound));
        for pair in history.records.windows(2) {
            assert!(
                pair[1].best_fitness >= pair[0].best_fitness,
                "seed {seed}: best fitness regressed"
            );
        }
    }

    // Identical seed, identical history.
    let gp = GpConfig {
        population_size: 40,
        generations: 10,
        seed: 909,
        ..GpConfig::default()
    };
    let ops = arithmetic_ops(&bindings, &gp);
    let (_, h1) = run(&gp, &ops, |g, _| value_fitness(g, &series, &bound));
    let (_, h2) = run(&gp, &ops, |g, _| value_fitness(g, &series, &bound));
    assert_eq!(h1, h2);

    // Operator mix over 10^4 offspring: 501 individuals, elitism 1, 20
    // generations = 10000 variation draws.
    let gp = GpConfig {
        population_size: 501,
        generations: 20,
        seed: 910,
        ..GpConfig::default()
    };
    let ops = arithmetic_ops(&bindings, &gp);
    let (_, history) = run(&gp, &ops, |g, _| value_fitness(g, &series, &bound));
    let OperatorMix {
        crossovers,
        mutations,
        copies,
    } = history.operator_mix;
    let total = (crossovers + mutations + copies) as f64;
    assert_eq!(total as u64, 10_000);
    let cx = crossovers as f64 / total;
    let mt = mutations as f64 / total;
    let cp = copies as f64 / total;
    assert!((cx - 0.70).abs() <= 0.02, "crossover share {cx}");
    assert!((mt - 0.05).abs() <= 0.02, "mutation share {mt}");
    assert!((cp - 0.25).abs() <= 0.02, "copy share {cp}");
    println!(
        "AC-09 PASS - monotone best over 20 runs, replayable histories, operator mix \
         {cx:.3}/{mt:.3}/{cp:.3} vs 0.70/0.05/0.25"
    );
}

#[test]
fn ac10_end_to_end_presets_pass() {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();

    let run_preset = |name: &str, out: &Path| {
        let output = Command::new(bin())
            .args(["run", name, "--seed", "1..10"])
            .arg("--out")
            .arg(out)
            .output()
            .unwrap();
        let stdout = String::from_utf8_lossy(&output.stdout).to_string();
        assert_eq!(
            output.status.code(),
            Some(0),
            "{name} exited {:?}\n{stdout}",
            output.status.code()
        );
        assert!(
            stdout.contains(&format!("RESULT {name}: PASS")),
            "{name} did not report PASS:\n{stdout}"
        );
        stdout
    };

    run_preset("newton", &dir.path().join("newton"));
    run_preset("cat", &dir.path().join("cat"));

    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(600),
        "presets took {elapsed:?}"
    );
    for file in ["theory/xft.sexp", "theory/qdt.sexp", "report.svg", "forecast.csv"] {
        assert!(dir.path().join("newton").join(file).exists(), "missing {file}");
        assert!(dir.path().join("cat").join(file).exists(), "missing {file}");
    }

    // The newton report plots all 20 positions of both trajectories, and its
    // horizon-1 forecast row carries the exact next position.
    let svg = std::fs::read_to_string(dir.path().join("newton/report.svg")).unwrap();
    assert_eq!(svg.matches("class=\"obs\"").count(), 20);
    assert_eq!(svg.matches("class=\"comp\"").count(), 20);
    let forecast = std::fs::read_to_string(dir.path().join("newton/forecast.csv")).unwrap();
    assert!(
        forecast.lines().any(|l| l.starts_with("20,0,1280,1")),
        "forecast rows:\n{forecast}"
    );
    println!("AC-10 PASS - newton and cat presets both PASS end to end in {elapsed:?}");
}
