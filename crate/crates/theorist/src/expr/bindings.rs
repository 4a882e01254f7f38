//! Terminal bindings: how expression-tree leaf names acquire values.

use std::collections::BTreeMap;
use std::fmt;

use super::ExprError;
use crate::series::{stats, SeriesStats, TimeSeries};

/// A named summary statistic of the training series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatKind {
    DAvg,
    Av,
    H,
    L,
}

impl StatKind {
    pub const ALL: [StatKind; 4] = [StatKind::DAvg, StatKind::Av, StatKind::H, StatKind::L];

    pub fn key(self) -> &'static str {
        match self {
            StatKind::DAvg => "d_avg",
            StatKind::Av => "av",
            StatKind::H => "h",
            StatKind::L => "l",
        }
    }

    pub fn from_key(key: &str) -> Option<StatKind> {
        Self::ALL.into_iter().find(|k| k.key() == key)
    }

    pub fn pick(self, s: &SeriesStats) -> f64 {
        match self {
            StatKind::DAvg => s.d_avg,
            StatKind::Av => s.av,
            StatKind::H => s.h,
            StatKind::L => s.l,
        }
    }
}

/// Where a terminal's value comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValueSource {
    /// The current evaluation index `k`.
    IndexK,
    /// A fixed constant.
    Const(f64),
    /// A statistic of the training series.
    Stat(StatKind),
}

impl fmt::Display for ValueSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueSource::IndexK => write!(f, "index_k"),
            ValueSource::Const(v) => write!(f, "const:{v}"),
            ValueSource::Stat(s) => write!(f, "stat:{}", s.key()),
        }
    }
}

impl ValueSource {
    /// Parse the textual form used in config files: `index_k`,
    /// `const:<real>`, or `stat:<d_avg|av|h|l>`.
    pub fn parse(text: &str) -> Option<ValueSource> {
        let text = text.trim();
        if text == "index_k" {
            return Some(ValueSource::IndexK);
        }
        if let Some(v) = text.strip_prefix("const:") {
            let v = v.trim().parse::<f64>().ok()?;
            if !v.is_finite() {
                return None;
            }
            return Some(ValueSource::Const(v));
        }
        if let Some(s) = text.strip_prefix("stat:") {
            return StatKind::from_key(s.trim()).map(ValueSource::Stat);
        }
        None
    }
}

/// Declarative map from terminal name to value source.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TerminalBindings {
    sources: BTreeMap<String, ValueSource>,
}

impl TerminalBindings {
    pub fn new() -> TerminalBindings {
        TerminalBindings::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, source: ValueSource) {
        self.sources.insert(name.into(), source);
    }

    pub fn contains(&self, name: &str) -> bool {
        self.sources.contains_key(name)
    }

    pub fn get(&self, name: &str) -> Option<ValueSource> {
        self.sources.get(name).copied()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.sources.keys().map(|s| s.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, ValueSource)> {
        self.sources.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    /// True when any binding draws on series statistics.
    pub fn needs_stats(&self) -> bool {
        self.sources
            .values()
            .any(|s| matches!(s, ValueSource::Stat(_)))
    }

    /// Freeze the bindings into direct lookup values. Statistic bindings
    /// require `stats`; constants must be finite.
    pub fn bind(&self, stats: Option<&SeriesStats>) -> Result<BoundBindings, ExprError> {
        let mut values = BTreeMap::new();
        for (name, source) in &self.sources {
            let bound = match source {
                ValueSource::IndexK => Binding::IndexK,
                ValueSource::Const(v) => {
                    if !v.is_finite() {
                        return Err(ExprError::NonFiniteConstant { name: name.clone() });
                    }
                    Binding::Value(*v)
                }
                ValueSource::Stat(kind) => match stats {
                    Some(s) => Binding::Value(kind.pick(s)),
                    None => return Err(ExprError::StatsUnavailable { name: name.clone() }),
                },
            };
            values.insert(name.clone(), bound);
        }
        Ok(BoundBindings { values })
    }

    /// Bind against a concrete training series (computes its statistics).
    pub fn bind_to(&self, series: &TimeSeries) -> BoundBindings {
        let s = stats(series);
        self.bind(Some(&s))
            .expect("stats supplied, constants checked at insert")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Binding {
    IndexK,
    Value(f64),
}

/// Bindings frozen against a training context; the evaluator's lookup table.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundBindings {
    values: BTreeMap<String, Binding>,
}

impl BoundBindings {
    pub fn resolve(&self, name: &str, k: usize) -> Option<f64> {
        match self.values.get(name)? {
            Binding::IndexK => Some(k as f64),
            Binding::Value(v) => Some(*v),
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }
}
