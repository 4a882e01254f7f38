//! State/value time series: the raw material every model trains on.
//!
//! A series is an initial value `x0` followed by samples `(q_k, x_k)` for
//! `k = 1..=N`. The state bit is fully determined by the values: `q_k = 0`
//! when `x_k >= x_{k-1}` and `q_k = 1` otherwise. Constructors enforce this,
//! so a [`TimeSeries`] obtained from any path is internally consistent.

use std::fmt;
use std::fs;
use std::path::Path;

use thiserror::Error;

/// Direction of one step of the trajectory.
///
/// `Up` (bit 0) means the value did not decrease relative to the previous
/// observation; `Down` (bit 1) means it decreased. Equality counts as `Up`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum State {
    Up,
    Down,
}

impl State {
    pub fn bit(self) -> u8 {
        match self {
            State::Up => 0,
            State::Down => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Option<State> {
        match bit {
            0 => Some(State::Up),
            1 => Some(State::Down),
            _ => None,
        }
    }

    /// State implied by moving from `prev` to `next`.
    pub fn of_step(prev: f64, next: f64) -> State {
        if next >= prev {
            State::Up
        } else {
            State::Down
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

/// One observed point: the step state and the value after the step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub state: State,
    pub value: f64,
}

/// An ordered trajectory: `x0` plus `N >= 1` state/value samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    x0: f64,
    samples: Vec<Sample>,
}

/// Summary statistics of a series, used as expression terminals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesStats {
    /// Mean absolute distance between consecutive observations.
    pub d_avg: f64,
    /// Mean value, `x0` included.
    pub av: f64,
    /// Highest value, `x0` included.
    pub h: f64,
    /// Lowest value, `x0` included.
    pub l: f64,
    /// Fraction of samples in state 0.
    pub freq0: f64,
    /// Fraction of samples in state 1.
    pub freq1: f64,
}

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("value at index {index} is not finite")]
    NonFinite { index: usize },
    #[error("need at least 2 values (x0 plus one observation), got {got}")]
    TooShort { got: usize },
    #[error("series must contain at least one sample")]
    Empty,
    #[error("state at index {index} is inconsistent with the values around it")]
    InconsistentState { index: usize },
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

impl TimeSeries {
    /// Build a series from explicit parts, checking every invariant.
    pub fn new(x0: f64, samples: Vec<Sample>) -> Result<TimeSeries, SeriesError> {
        if !x0.is_finite() {
            return Err(SeriesError::NonFinite { index: 0 });
        }
        if samples.is_empty() {
            return Err(SeriesError::Empty);
        }
        let mut prev = x0;
        for (i, s) in samples.iter().enumerate() {
            if !s.value.is_finite() {
                return Err(SeriesError::NonFinite { index: i + 1 });
            }
            if s.state != State::of_step(prev, s.value) {
                return Err(SeriesError::InconsistentState { index: i + 1 });
            }
            prev = s.value;
        }
        Ok(TimeSeries { x0, samples })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    /// Number of samples `N` (excluding `x0`).
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Value at index `k`, where index 0 is `x0`.
    pub fn value_at(&self, k: usize) -> f64 {
        if k == 0 {
            self.x0
        } else {
            self.samples[k - 1].value
        }
    }

    /// Last observed value.
    pub fn last_value(&self) -> f64 {
        self.samples.last().map(|s| s.value).unwrap_or(self.x0)
    }

    /// All values in order, `x0` first.
    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.samples.len() + 1);
        out.push(self.x0);
        out.extend(self.samples.iter().map(|s| s.value));
        out
    }
}

/// Derive the per-step states from a raw value sequence.
///
/// The first element becomes `x0`; each later element gets the state implied
/// by its predecessor. Rejects non-finite values with the offending index.
pub fn derive_states(values: &[f64]) -> Result<TimeSeries, SeriesError> {
    if values.len() < 2 {
        return Err(SeriesError::TooShort { got: values.len() });
    }
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(SeriesError::NonFinite { index: i });
        }
    }
    let samples = values
        .windows(2)
        .map(|w| Sample {
            state: State::of_step(w[0], w[1]),
            value: w[1],
        })
        .collect();
    TimeSeries::new(values[0], samples)
}

/// Absolute distances `|x_k - x_{k-1}|` for `k = 1..=N`.
pub fn distances(series: &TimeSeries) -> Vec<f64> {
    let mut prev = series.x0;
    series
        .samples
        .iter()
        .map(|s| {
            let d = (s.value - prev).abs();
            prev = s.value;
            d
        })
        .collect()
}

/// Summary statistics. Value aggregates include `x0`; state frequencies
/// count only the `N` decided states.
pub fn stats(series: &TimeSeries) -> SeriesStats {
    let ds = distances(series);
    let d_avg = ds.iter().sum::<f64>() / ds.len() as f64;

    let values = series.values();
    let av = values.iter().sum::<f64>() / values.len() as f64;
    let h = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let l = values.iter().cloned().fold(f64::INFINITY, f64::min);

    let n = series.len() as f64;
    let ones = series
        .samples
        .iter()
        .filter(|s| s.state == State::Down)
        .count() as f64;
    SeriesStats {
        d_avg,
        av,
        h,
        l,
        freq0: (n - ones) / n,
        freq1: ones / n,
    }
}

/// Render a series in the CSV interchange form.
///
/// Layout: a `# x0=<value>` comment, a `q,x` header, then one `q,x` row per
/// sample. Reading the output back yields an identical series.
pub fn to_csv(series: &TimeSeries) -> String {
    let mut out = String::new();
    out.push_str(&format!("# x0={}\n", series.x0));
    out.push_str("q,x\n");
    for s in &series.samples {
        out.push_str(&format!("{},{}\n", s.state, s.value));
    }
    out
}

/// Parse the CSV interchange form. `x0` defaults to 0 when the comment line
/// is absent. Errors carry the 1-based line number.
pub fn from_csv(text: &str) -> Result<TimeSeries, SeriesError> {
    let mut x0 = 0.0;
    let mut saw_header = false;
    let mut samples = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("x0=") {
                x0 = v.trim().parse::<f64>().map_err(|_| SeriesError::Malformed {
                    line: line_no,
                    reason: format!("bad x0 value {v:?}"),
                })?;
                if !x0.is_finite() {
                    return Err(SeriesError::Malformed {
                        line: line_no,
                        reason: "x0 must be finite".into(),
                    });
                }
            }
            continue;
        }
        if !saw_header {
            if line != "q,x" {
                return Err(SeriesError::Malformed {
                    line: line_no,
                    reason: format!("expected header `q,x`, got {line:?}"),
                });
            }
            saw_header = true;
            continue;
        }
        let (q_str, x_str) = line.split_once(',').ok_or_else(|| SeriesError::Malformed {
            line: line_no,
            reason: "expected two comma-separated fields".into(),
        })?;
        let bit = q_str
            .trim()
            .parse::<u8>()
            .ok()
            .and_then(State::from_bit)
            .ok_or_else(|| SeriesError::Malformed {
                line: line_no,
                reason: format!("state must be 0 or 1, got {q_str:?}"),
            })?;
        let x = x_str
            .trim()
            .parse::<f64>()
            .map_err(|_| SeriesError::Malformed {
                line: line_no,
                reason: format!("bad value {x_str:?}"),
            })?;
        if !x.is_finite() {
            return Err(SeriesError::Malformed {
                line: line_no,
                reason: format!("value must be finite, got {x_str:?}"),
            });
        }
        samples.push(Sample {
            state: bit,
            value: x,
        });
    }

    if !saw_header {
        return Err(SeriesError::Malformed {
            line: 1,
            reason: "missing `q,x` header".into(),
        });
    }
    TimeSeries::new(x0, samples)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<TimeSeries, SeriesError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| SeriesError::Read {
        path: path.display().to_string(),
        source,
    })?;
    from_csv(&text)
}

pub fn write_csv(series: &TimeSeries, path: impl AsRef<Path>) -> Result<(), SeriesError> {
    let path = path.as_ref();
    fs::write(path, to_csv(series)).map_err(|source| SeriesError::Write {
        path: path.display().to_string(),
        source,
    })
}
