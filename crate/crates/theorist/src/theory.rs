//! A theory bundles an evolved value tree and decision tree with the
//! terminal bindings that ground them; it can replay the observed trajectory
//! and forecast beyond it.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::Rng;
use thiserror::Error;

use crate::cfgtext;
use crate::expr::{self, ExprError, ExprTree, TerminalBindings, ValueSource};
use crate::gates::{self, random_strategy, sample_action, GateError, GateTree};
use crate::series::{derive_states, State, TimeSeries};

const VALUE_TREE_FILE: &str = "xft.sexp";
const DECISION_TREE_FILE: &str = "qdt.sexp";
const BINDINGS_FILE: &str = "bindings.cfg";
const PROVENANCE_FILE: &str = "provenance.cfg";

/// Free-form record of how a theory was produced (config, seeds, data).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    entries: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new() -> Provenance {
        Provenance::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.insert(key.into(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// An evolved (value tree, decision tree) pair with terminal bindings.
#[derive(Debug, Clone, PartialEq)]
pub struct Theory {
    pub value_tree: ExprTree,
    pub decision_tree: GateTree,
    pub bindings: TerminalBindings,
    pub provenance: Provenance,
}

#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("missing bundle file {path}")]
    MissingFile { path: String },
    #[error("failed to access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{file}: {source}")]
    ValueTree { file: String, source: ExprError },
    #[error("{file}: {source}")]
    DecisionTree { file: String, source: GateError },
    #[error("{file} line {line}: {reason}")]
    Bindings {
        file: String,
        line: usize,
        reason: String,
    },
    #[error("series lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

impl Theory {
    pub fn new(
        value_tree: ExprTree,
        decision_tree: GateTree,
        bindings: TerminalBindings,
    ) -> Result<Theory, ExprError> {
        value_tree.check_terminals(&bindings)?;
        Ok(Theory {
            value_tree,
            decision_tree,
            bindings,
            provenance: Provenance::new(),
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Theory {
        self.provenance = provenance;
        self
    }
}

/// Which state stream drives the value-update rule during reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReconstructionMode {
    /// Feed the observed states into the update rule.
    TeacherForced,
    /// Draw one strategy, then sample a believed state per step.
    FreeRun,
}

/// Replay a series through the theory: each step moves the running value by
/// the model distance, upward on state 0 and downward on state 1. The output
/// series derives its states from the reconstructed values, keeping the
/// series invariant intact for degenerate models.
pub fn reconstruct<R: Rng>(
    theory: &Theory,
    series: &TimeSeries,
    mode: ReconstructionMode,
    rng: &mut R,
) -> TimeSeries {
    let bound = theory.bindings.bind_to(series);
    let strategy = match mode {
        ReconstructionMode::TeacherForced => None,
        ReconstructionMode::FreeRun => Some(random_strategy(&theory.decision_tree, rng)),
    };

    let mut values = Vec::with_capacity(series.len() + 1);
    values.push(series.x0());
    let mut x = series.x0();
    for (i, sample) in series.samples().iter().enumerate() {
        let k = i + 1;
        let d = expr::distance(&theory.value_tree, k, &bound);
        let believed = match &strategy {
            None => sample.state,
            Some(s) => {
                if sample_action(s.p1, rng) == 1 {
                    State::Up
                } else {
                    State::Down
                }
            }
        };
        x = match believed {
            State::Up => x + d,
            State::Down => x - d,
        };
        values.push(x);
    }
    derive_states(&values).expect("reconstructed values are finite")
}

/// Fraction of steps whose state matches and whose value is within
/// `tolerance` of the observed one.
pub fn accuracy(
    reconstructed: &TimeSeries,
    observed: &TimeSeries,
    tolerance: f64,
) -> Result<f64, TheoryError> {
    if reconstructed.len() != observed.len() {
        return Err(TheoryError::LengthMismatch {
            left: reconstructed.len(),
            right: observed.len(),
        });
    }
    let hits = reconstructed
        .samples()
        .iter()
        .zip(observed.samples())
        .filter(|(r, o)| r.state == o.state && (r.value - o.value).abs() <= tolerance)
        .count();
    Ok(hits as f64 / observed.len() as f64)
}

/// One forecast step beyond the observed series.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastStep {
    /// Continuation index (first step is N+1).
    pub k: usize,
    pub state: State,
    pub value: f64,
    pub p1: f64,
    /// Choice bits of the strategy driving this run.
    pub strategy: Vec<bool>,
}

/// A sampled future trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Forecast {
    pub steps: Vec<ForecastStep>,
}

impl Forecast {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,q_pred,x_pred,p1,strategy\n");
        for s in &self.steps {
            let bits: String = s
                .strategy
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s.k, s.state, s.value, s.p1, bits
            ));
        }
        out
    }
}

/// Forecast `horizon` steps past the end of `series`. One strategy is drawn
/// for the whole run; each step samples a believed state from it and moves
/// the running value by the extrapolated model distance.
pub fn predict<R: Rng>(
    theory: &Theory,
    series: &TimeSeries,
    horizon: usize,
    rng: &mut R,
) -> Forecast {
    assert!(horizon >= 1, "forecast horizon must be at least 1");
    let bound = theory.bindings.bind_to(series);
    let strategy = random_strategy(&theory.decision_tree, rng);

    let mut steps = Vec::with_capacity(horizon);
    let mut x = series.last_value();
    let n = series.len();
    for j in 1..=horizon {
        let k = n + j;
        let d = expr::distance(&theory.value_tree, k, &bound);
        let state = if sample_action(strategy.p1, rng) == 1 {
            State::Up
        } else {
            State::Down
        };
        x = match state {
            State::Up => x + d,
            State::Down => x - d,
        };
        steps.push(ForecastStep {
            k,
            state,
            value: x,
            p1: strategy.p1,
            strategy: strategy.choices.clone(),
        });
    }
    Forecast { steps }
}

fn bundle_path(dir: &Path, file: &str) -> String {
    dir.join(file).display().to_string()
}

/// Write the four bundle files into `dir` (created if needed).
pub fn save(theory: &Theory, dir: impl AsRef<Path>) -> Result<(), TheoryError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| TheoryError::Io {
        path: dir.display().to_string(),
        source,
    })?;

    let write = |file: &str, contents: String| -> Result<(), TheoryError> {
        fs::write(dir.join(file), contents).map_err(|source| TheoryError::Io {
            path: bundle_path(dir, file),
            source,
        })
    };

    write(VALUE_TREE_FILE, expr::to_text(&theory.value_tree) + "\n")?;
    write(
        DECISION_TREE_FILE,
        gates::to_text(&theory.decision_tree) + "\n",
    )?;

    let bindings_text: String = theory
        .bindings
        .iter()
        .map(|(name, source)| format!("terminal.{name} = {source}\n"))
        .collect();
    write(BINDINGS_FILE, bindings_text)?;

    write(
        PROVENANCE_FILE,
        cfgtext::format_pairs(theory.provenance.iter()),
    )?;
    Ok(())
}

fn read_bundle_file(dir: &Path, file: &str) -> Result<String, TheoryError> {
    let path = dir.join(file);
    if !path.exists() {
        return Err(TheoryError::MissingFile {
            path: bundle_path(dir, file),
        });
    }
    fs::read_to_string(&path).map_err(|source| TheoryError::Io {
        path: bundle_path(dir, file),
        source,
    })
}

/// Load a bundle saved by [`save`], validating that the bindings cover every
/// value-tree terminal.
pub fn load(dir: impl AsRef<Path>) -> Result<Theory, TheoryError> {
    let dir = dir.as_ref();

    let value_text = read_bundle_file(dir, VALUE_TREE_FILE)?;
    let value_tree = expr::parse_text(value_text.trim()).map_err(|source| TheoryError::ValueTree {
        file: bundle_path(dir, VALUE_TREE_FILE),
        source,
    })?;

    let decision_text = read_bundle_file(dir, DECISION_TREE_FILE)?;
    let decision_tree =
        gates::parse_text(decision_text.trim()).map_err(|source| TheoryError::DecisionTree {
            file: bundle_path(dir, DECISION_TREE_FILE),
            source,
        })?;

    let bindings_text = read_bundle_file(dir, BINDINGS_FILE)?;
    let pairs =
        cfgtext::parse_pairs(&bindings_text).map_err(|e| TheoryError::Bindings {
            file: bundle_path(dir, BINDINGS_FILE),
            line: e.line,
            reason: e.reason,
        })?;
    let mut bindings = TerminalBindings::new();
    for (i, (key, value)) in pairs.iter().enumerate() {
        let Some(name) = key.strip_prefix("terminal.") else {
            return Err(TheoryError::Bindings {
                file: bundle_path(dir, BINDINGS_FILE),
                line: i + 1,
                reason: format!("expected `terminal.<name>` key, got {key:?}"),
            });
        };
        let Some(source) = ValueSource::parse(value) else {
            return Err(TheoryError::Bindings {
                file: bundle_path(dir, BINDINGS_FILE),
                line: i + 1,
                reason: format!("bad value source {value:?}"),
            });
        };
        bindings.insert(name, source);
    }

    let provenance_text = read_bundle_file(dir, PROVENANCE_FILE)?;
    let mut provenance = Provenance::new();
    for (key, value) in
        cfgtext::parse_pairs(&provenance_text).map_err(|e| TheoryError::Bindings {
            file: bundle_path(dir, PROVENANCE_FILE),
            line: e.line,
            reason: e.reason,
        })?
    {
        provenance.set(key, value);
    }

    value_tree
        .check_terminals(&bindings)
        .map_err(|source| TheoryError::ValueTree {
            file: bundle_path(dir, BINDINGS_FILE),
            source,
        })?;

    Ok(Theory {
        value_tree,
        decision_tree,
        bindings,
        provenance,
    })
}
