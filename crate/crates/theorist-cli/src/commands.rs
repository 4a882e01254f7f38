//! The non-preset subcommands: data generation, single evolution runs,
//! forecasting, and reconstruction reports.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use theorist::datagen::{gen_coin, gen_puck, CoinParams, PuckParams};
use theorist::evolve::{run, GpConfig};
use theorist::expr::{self, ExprConfig};
use theorist::gates::{enumerate_strategies, GateConfig};
use theorist::objectives::{decision_fitness_auto, value_fitness};
use theorist::series::{read_csv, write_csv, TimeSeries};
use theorist::theory::{self, accuracy, reconstruct, ReconstructionMode};

use crate::config::{effective_text, load_config, FileConfig};
use crate::svg;
use crate::CliError;

/// Gate trees default to a tighter depth bound than expression trees.
pub const GATE_MAX_DEPTH: usize = 8;

pub fn cmd_datagen_puck(v: f64, a: f64, steps: usize, out: &Path) -> Result<(), CliError> {
    let series = gen_puck(&PuckParams { v, a, steps }).map_err(|e| CliError::Usage(e.to_string()))?;
    write_csv(&series, out).map_err(|e| CliError::Data(e.into()))?;
    println!("wrote {} rows to {}", series.len(), out.display());
    Ok(())
}

pub fn cmd_datagen_coin(steps: usize, seed: u64, out: &Path) -> Result<(), CliError> {
    let series = gen_coin(&CoinParams { steps, seed }).map_err(|e| CliError::Usage(e.to_string()))?;
    write_csv(&series, out).map_err(|e| CliError::Data(e.into()))?;
    println!("wrote {} rows to {}", series.len(), out.display());
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenomeKind {
    ValueTree,
    DecisionTree,
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::write(dir.join(name), contents)
        .with_context(|| format!("failed to write {}", dir.join(name).display()))
        .map_err(CliError::Data)
}

fn load_inputs(
    data: &Path,
    config: Option<&PathBuf>,
    seed: Option<u64>,
) -> Result<(TimeSeries, FileConfig), CliError> {
    let series = read_csv(data)
        .with_context(|| format!("failed to load series {}", data.display()))
        .map_err(CliError::Data)?;
    let mut cfg = match config {
        Some(path) => load_config(path).map_err(CliError::Data)?,
        None => FileConfig::default(),
    };
    if let Some(s) = seed {
        cfg.gp.seed = s;
    }
    Ok((series, cfg))
}

pub fn cmd_evolve(
    kind: GenomeKind,
    data: &Path,
    config: Option<&PathBuf>,
    seed: Option<u64>,
    out: &Path,
) -> Result<(), CliError> {
    let (series, cfg) = load_inputs(data, config, seed)?;
    fs::create_dir_all(out)
        .with_context(|| format!("failed to create {}", out.display()))
        .map_err(CliError::Data)?;

    match kind {
        GenomeKind::ValueTree => {
            if cfg.bindings.is_empty() {
                return Err(CliError::Data(anyhow!(
                    "config must define at least one `terminal.<name>` binding for xft evolution"
                )));
            }
            let bound = cfg.bindings.bind_to(&series);
            let ops = ExprConfig {
                binary_ops: expr::BinaryOp::ALL.to_vec(),
                unary_ops: Vec::new(),
                terminals: cfg.bindings.names().map(str::to_string).collect(),
                max_depth: cfg.gp.max_depth,
                init_depth: cfg.gp.init_depth,
            };
            let (best, history) = run(&cfg.gp, &ops, |g, _| value_fitness(g, &series, &bound));
            write_out(out, "best.sexp", &(expr::to_text(&best.genome) + "\n"))?;
            write_out(out, "fitness.txt", &format!("{}\n", best.fitness))?;
            write_out(out, "history.csv", &history.to_csv())?;
            write_out(out, "effective.cfg", &effective_text(&cfg.gp, &cfg.bindings))?;
            println!("best fitness: {}", best.fitness);
            println!("best genome: {}", expr::to_text(&best.genome));
        }
        GenomeKind::DecisionTree => {
            let gate_depth = if cfg.was_set("max_depth") {
                cfg.gp.max_depth
            } else {
                GATE_MAX_DEPTH
            };
            let ops = GateConfig {
                max_depth: gate_depth,
                init_depth: cfg.gp.init_depth,
            };
            let gp = GpConfig {
                max_depth: gate_depth,
                ..cfg.gp.clone()
            };
            let (best, history) = run(&gp, &ops, |g, rng| {
                decision_fitness_auto(g, &series, gp.enumeration_cap, gp.mc_draws, rng)
            });
            write_out(out, "best.sexp", &(theorist::gates::to_text(&best.genome) + "\n"))?;
            write_out(out, "fitness.txt", &format!("{}\n", best.fitness))?;
            write_out(out, "history.csv", &history.to_csv())?;
            write_out(out, "effective.cfg", &effective_text(&gp, &cfg.bindings))?;
            println!("best fitness: {}", best.fitness);
            println!("best genome: {}", theorist::gates::to_text(&best.genome));
            match enumerate_strategies(&best.genome, gp.enumeration_cap) {
                Ok(strategies) => {
                    println!("strategies ({}):", strategies.len());
                    println!("  strategy  choices  p1        p2");
                    for (i, s) in strategies.iter().enumerate() {
                        let bits: String =
                            s.choices.iter().map(|&b| if b { '1' } else { '0' }).collect();
                        println!(
                            "  S{:<8} {:<8} {:<9.6} {:<9.6}",
                            i + 1,
                            if bits.is_empty() { "-".into() } else { bits },
                            s.p1,
                            s.p2
                        );
                    }
                }
                Err(e) => println!("strategy table skipped: {e}"),
            }
        }
    }
    Ok(())
}

pub fn cmd_predict(
    theory_dir: &Path,
    data: &Path,
    horizon: usize,
    seed: u64,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    if horizon == 0 {
        return Err(CliError::Usage("--horizon must be at least 1".into()));
    }
    let theory = theory::load(theory_dir).map_err(|e| CliError::Data(e.into()))?;
    let series = read_csv(data)
        .with_context(|| format!("failed to load series {}", data.display()))
        .map_err(CliError::Data)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forecast = theory::predict(&theory, &series, horizon, &mut rng);
    let csv = forecast.to_csv();
    match out {
        Some(path) => {
            fs::write(path, &csv)
                .with_context(|| format!("failed to write {}", path.display()))
                .map_err(CliError::Data)?;
            println!("wrote {} forecast rows to {}", forecast.steps.len(), path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

/// Reconstruction CSV: the observed and computed trajectories side by side.
pub fn reconstruction_csv(observed: &TimeSeries, computed: &TimeSeries) -> String {
    let mut out = String::from("k,q_obs,x_obs,q_rec,x_rec\n");
    out.push_str(&format!("0,,{},,{}\n", observed.x0(), computed.x0()));
    for (i, (o, r)) in observed
        .samples()
        .iter()
        .zip(computed.samples())
        .enumerate()
    {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            i + 1,
            o.state,
            o.value,
            r.state,
            r.value
        ));
    }
    out
}

pub fn cmd_report(theory_dir: &Path, data: &Path, out: &Path) -> Result<(), CliError> {
    let theory = theory::load(theory_dir).map_err(|e| CliError::Data(e.into()))?;
    let series = read_csv(data)
        .with_context(|| format!("failed to load series {}", data.display()))
        .map_err(CliError::Data)?;
    fs::create_dir_all(out)
        .with_context(|| format!("failed to create {}", out.display()))
        .map_err(CliError::Data)?;

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let rec = reconstruct(&theory, &series, ReconstructionMode::TeacherForced, &mut rng);
    let acc = accuracy(&rec, &series, 1e-9).map_err(|e| CliError::Data(e.into()))?;

    write_out(out, "report.csv", &reconstruction_csv(&series, &rec))?;
    write_out(out, "report.svg", &svg::series_plot(&series, &rec))?;
    println!("reconstruction accuracy: {acc}");
    println!("report written to {}", out.display());
    Ok(())
}
