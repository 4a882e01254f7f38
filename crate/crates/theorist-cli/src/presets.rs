//! End-to-end experiment presets: generate (or load) the data, evolve both
//! trees, bundle the winning theory, emit reports, and judge the run against
//! the preset thresholds.

use std::fs;
use std::ops::RangeInclusive;
use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use theorist::datagen::{gen_puck, test_fixtures, puck_position, PuckParams};
use theorist::evolve::{run, GpConfig, Individual, RunHistory};
use theorist::expr::{self, ExprConfig, ExprTree, StatKind, TerminalBindings, ValueSource};
use theorist::gates::{GateConfig, GateTree};
use theorist::objectives::{decision_fitness_auto, value_fitness};
use theorist::series::{distances, write_csv, State, TimeSeries};
use theorist::theory::{accuracy, predict, reconstruct, Provenance, ReconstructionMode, Theory};

use crate::commands::{reconstruction_csv, GATE_MAX_DEPTH};
use crate::svg;
use crate::CliError;

/// Fitness at or above this counts as an exact value-model fit.
const XFT_FITNESS_FLOOR: f64 = -1e-6;
/// Tolerance on the winning model's per-step distance law.
const DISTANCE_TOL: f64 = 1e-9;
/// Tolerance on the decision model's expected-value optimum.
const QDT_FITNESS_TOL: f64 = 1e-6;
/// Reconstruction value tolerance.
const RECON_TOL: f64 = 1e-9;
/// Tolerance on the horizon-1 forecast value.
const FORECAST_TOL: f64 = 1e-6;

pub fn newton_bindings() -> TerminalBindings {
    let mut b = TerminalBindings::new();
    b.insert("t", ValueSource::IndexK);
    b.insert("v", ValueSource::Const(4.0));
    b.insert("a", ValueSource::Const(6.0));
    b.insert("o", ValueSource::Const(1.0));
    b.insert("h", ValueSource::Const(0.5));
    b
}

pub fn cat_bindings() -> TerminalBindings {
    let mut b = TerminalBindings::new();
    b.insert("t", ValueSource::IndexK);
    b.insert("d", ValueSource::Stat(StatKind::DAvg));
    b.insert("av", ValueSource::Stat(StatKind::Av));
    b.insert("h", ValueSource::Stat(StatKind::H));
    b.insert("l", ValueSource::Stat(StatKind::L));
    b
}

fn preset_gp(seed: u64) -> GpConfig {
    GpConfig {
        seed,
        ..GpConfig::default()
    }
}

struct Judge {
    failed: bool,
}

impl Judge {
    fn new() -> Judge {
        Judge { failed: false }
    }

    fn check(&mut self, ok: bool, label: &str, detail: String) {
        if ok {
            println!("PASS {label}: {detail}");
        } else {
            println!("FAIL {label}: {detail}");
            self.failed = true;
        }
    }
}

fn evolve_value_tree(
    series: &TimeSeries,
    bindings: &TerminalBindings,
    gp: &GpConfig,
) -> (Individual<ExprTree>, RunHistory) {
    let bound = bindings.bind_to(series);
    let ops = ExprConfig {
        binary_ops: expr::BinaryOp::ALL.to_vec(),
        unary_ops: Vec::new(),
        terminals: bindings.names().map(str::to_string).collect(),
        max_depth: gp.max_depth,
        init_depth: gp.init_depth,
    };
    run(gp, &ops, |g, _| value_fitness(g, series, &bound))
}

fn evolve_decision_tree(series: &TimeSeries, gp: &GpConfig) -> (Individual<GateTree>, RunHistory) {
    let ops = GateConfig {
        max_depth: GATE_MAX_DEPTH,
        init_depth: gp.init_depth,
    };
    run(gp, &ops, |g, rng| {
        decision_fitness_auto(g, series, gp.enumeration_cap, gp.mc_draws, rng)
    })
}

fn provenance_for(preset: &str, seed: u64, data_file: &str, gp: &GpConfig) -> Provenance {
    let mut p = Provenance::new();
    p.set("preset", preset);
    p.set("seed", seed);
    p.set("data", data_file);
    p.set("population_size", gp.population_size);
    p.set("generations", gp.generations);
    p.set("crossover_prob", gp.crossover_prob);
    p.set("mutation_prob", gp.mutation_prob);
    p.set("elitism", gp.elitism);
    p.set("value_tree_max_depth", gp.max_depth);
    p.set("decision_tree_max_depth", GATE_MAX_DEPTH);
    p.set("enumeration_cap", gp.enumeration_cap);
    p.set("mc_draws", gp.mc_draws);
    p
}

fn write_file(out: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::write(out.join(name), contents)
        .with_context(|| format!("failed to write {}", out.join(name).display()))
        .map_err(CliError::Data)
}

fn emit_artifacts(
    out: &Path,
    theory: &Theory,
    series: &TimeSeries,
    reconstructed: &TimeSeries,
    forecast_csv: &str,
    xft_history: &RunHistory,
    qdt_history: &RunHistory,
) -> Result<(), CliError> {
    theorist::theory::save(theory, out.join("theory")).map_err(|e| CliError::Data(e.into()))?;
    write_file(out, "report.csv", &reconstruction_csv(series, reconstructed))?;
    write_file(out, "report.svg", &svg::series_plot(series, reconstructed))?;
    write_file(out, "forecast.csv", forecast_csv)?;
    write_file(out, "xft_history.csv", &xft_history.to_csv())?;
    write_file(out, "qdt_history.csv", &qdt_history.to_csv())?;
    Ok(())
}

pub fn run_preset(name: &str, seeds: RangeInclusive<u64>, out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out)
        .with_context(|| format!("failed to create {}", out.display()))
        .map_err(CliError::Data)?;
    match name {
        "newton" => run_newton(seeds, out),
        "cat" => run_cat(seeds, out),
        other => Err(CliError::Usage(format!(
            "unknown preset `{other}` (expected `newton` or `cat`)"
        ))),
    }
}

fn run_newton(seeds: RangeInclusive<u64>, out: &Path) -> Result<(), CliError> {
    let params = PuckParams {
        v: 4.0,
        a: 6.0,
        steps: 20,
    };
    let series = gen_puck(&params).expect("preset parameters are valid");
    write_csv(&series, out.join("data.csv")).map_err(|e| CliError::Data(e.into()))?;
    let bindings = newton_bindings();
    let bound = bindings.bind_to(&series);
    let total_distance: f64 = distances(&series).iter().sum();

    // The generator's own distance law, the oracle the model must match.
    let expected_distance = |k: usize| params.v + params.a * k as f64 - 0.5 * params.a;

    let mut judge = Judge::new();
    let mut winner = None;
    for seed in seeds.clone() {
        let gp = preset_gp(seed);
        let start = Instant::now();
        let (best, xft_history) = evolve_value_tree(&series, &bindings, &gp);
        let fit_ok = best.fitness >= XFT_FITNESS_FLOOR;
        let dist_ok = fit_ok
            && (1..=series.len()).all(|k| {
                (expr::distance(&best.genome, k, &bound) - expected_distance(k)).abs()
                    <= DISTANCE_TOL
            });
        println!(
            "seed {seed}: xft fitness {:.3e} in {:.1?}{}",
            best.fitness,
            start.elapsed(),
            if dist_ok {
                " (exact distance law)"
            } else if fit_ok {
                " (fitness ok, distance off)"
            } else {
                ""
            }
        );
        if !dist_ok {
            continue;
        }

        let start = Instant::now();
        let (qbest, qdt_history) = evolve_decision_tree(&series, &gp);
        let q_ok = qbest.fitness >= total_distance - QDT_FITNESS_TOL;
        println!(
            "seed {seed}: qdt fitness {:.6} (target {total_distance}) in {:.1?}",
            qbest.fitness,
            start.elapsed()
        );
        if q_ok {
            winner = Some((seed, best, xft_history, qbest, qdt_history));
            break;
        }
    }

    let Some((seed, xft_best, xft_history, qdt_best, qdt_history)) = winner else {
        judge.check(
            false,
            "newton rediscovery",
            format!("no seed in {seeds:?} reached an exact value model with an optimal bettor"),
        );
        println!("RESULT newton: FAIL");
        return Err(CliError::Fail);
    };

    judge.check(
        true,
        "xft fitness",
        format!("seed {seed} reached fitness {} (>= {XFT_FITNESS_FLOOR})", xft_best.fitness),
    );
    judge.check(
        true,
        "xft distance law",
        format!(
            "model distance matches v + a*t - a/2 within {DISTANCE_TOL} for t = 1..{}",
            series.len()
        ),
    );
    judge.check(
        true,
        "qdt fitness",
        format!(
            "expected value {} within {QDT_FITNESS_TOL} of the total distance {total_distance}",
            qdt_best.fitness
        ),
    );

    let theory = Theory::new(xft_best.genome, qdt_best.genome, bindings)
        .expect("preset bindings cover the evolved terminals")
        .with_provenance(provenance_for("newton", seed, "data.csv", &preset_gp(seed)));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rec = reconstruct(&theory, &series, ReconstructionMode::TeacherForced, &mut rng);
    let acc = accuracy(&rec, &series, RECON_TOL).map_err(|e| CliError::Data(e.into()))?;
    judge.check(
        acc == 1.0,
        "reconstruction",
        format!("teacher-forced accuracy {acc} at tolerance {RECON_TOL}"),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forecast = predict(&theory, &series, 1, &mut rng);
    let step = &forecast.steps[0];
    let expected_next = puck_position(&params, series.len() as f64 + 1.0);
    judge.check(
        (step.value - expected_next).abs() <= FORECAST_TOL && step.state == State::Up,
        "horizon-1 forecast",
        format!(
            "predicted (q={}, x={}) vs generator value {expected_next}",
            step.state, step.value
        ),
    );

    emit_artifacts(
        out,
        &theory,
        &series,
        &rec,
        &forecast.to_csv(),
        &xft_history,
        &qdt_history,
    )?;

    if judge.failed {
        println!("RESULT newton: FAIL");
        Err(CliError::Fail)
    } else {
        println!("RESULT newton: PASS");
        Ok(())
    }
}

fn run_cat(seeds: RangeInclusive<u64>, out: &Path) -> Result<(), CliError> {
    let series = test_fixtures::cat_series();
    write_csv(&series, out.join("data.csv")).map_err(|e| CliError::Data(e.into()))?;
    let bindings = cat_bindings();

    let mut judge = Judge::new();
    let seed_count = (seeds.end() - seeds.start() + 1) as usize;
    // At least 80% of the seeds must rediscover the unit distance law.
    let needed = (seed_count * 8).div_ceil(10);

    let mut successes = 0usize;
    let mut winner = None;
    for seed in seeds.clone() {
        let gp = preset_gp(seed);
        let start = Instant::now();
        let (best, history) = evolve_value_tree(&series, &bindings, &gp);
        let hit = best.fitness >= -DISTANCE_TOL;
        if hit {
            successes += 1;
            if winner.is_none() {
                winner = Some((seed, best.clone(), history));
            }
        }
        println!(
            "seed {seed}: xft fitness {:.3e} in {:.1?}{}",
            best.fitness,
            start.elapsed(),
            if hit { " (hit)" } else { "" }
        );
    }

    judge.check(
        successes >= needed,
        "xft success rate",
        format!("{successes}/{seed_count} seeds reached fitness 0 (needed {needed})"),
    );

    let Some((seed, xft_best, xft_history)) = winner else {
        println!("RESULT cat: FAIL");
        return Err(CliError::Fail);
    };

    let gp = preset_gp(seed);
    let start = Instant::now();
    let (qdt_best, qdt_history) = evolve_decision_tree(&series, &gp);
    println!(
        "seed {seed}: qdt fitness {:.3e} in {:.1?}",
        qdt_best.fitness,
        start.elapsed()
    );
    judge.check(
        qdt_best.fitness.abs() <= DISTANCE_TOL,
        "qdt fitness",
        format!(
            "expected value {:.3e}; on a balanced unit walk no bettor can beat zero",
            qdt_best.fitness
        ),
    );

    let theory = Theory::new(xft_best.genome, qdt_best.genome, bindings)
        .expect("preset bindings cover the evolved terminals")
        .with_provenance(provenance_for("cat", seed, "data.csv", &gp));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rec = reconstruct(&theory, &series, ReconstructionMode::TeacherForced, &mut rng);
    let acc = accuracy(&rec, &series, RECON_TOL).map_err(|e| CliError::Data(e.into()))?;
    judge.check(
        acc == 1.0,
        "reconstruction",
        format!("teacher-forced accuracy {acc} at tolerance {RECON_TOL}"),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forecast = predict(&theory, &series, 1, &mut rng);
    let step = &forecast.steps[0];
    println!(
        "forecast: k={} q_pred={} x_pred={} p1={}",
        step.k, step.state, step.value, step.p1
    );

    emit_artifacts(
        out,
        &theory,
        &series,
        &rec,
        &forecast.to_csv(),
        &xft_history,
        &qdt_history,
    )?;

    if judge.failed {
        println!("RESULT cat: FAIL");
        Err(CliError::Fail)
    } else {
        println!("RESULT cat: PASS");
        Ok(())
    }
}
