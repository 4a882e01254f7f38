//! Symbolic expression trees: the value model of a theory.
//!
//! A tree evaluates to a number at an integer index `k`; its discrete
//! difference `eval(k) - eval(k-1)` is the model's estimate of the distance
//! between consecutive observations, and the (negated) squared error of that
//! estimate against the observed distances is the model's fitness.

mod bindings;
mod genetic;
mod text;

pub use bindings::{BoundBindings, StatKind, TerminalBindings, ValueSource};
pub use genetic::ExprConfig;
pub use text::{parse_text, to_text};

use thiserror::Error;

use crate::series::{distances, TimeSeries};
use crate::sexpr::SexprError;

/// Hard ceiling on evaluation results. Together with the protected operators
/// this keeps every evaluation finite regardless of tree shape.
pub(crate) const VALUE_LIMIT: f64 = 1e100;
/// Divisors smaller than this in magnitude trigger protected division.
pub(crate) const DIV_EPSILON: f64 = 1e-12;
/// Exponent clamp for protected exp.
pub(crate) const EXP_LIMIT: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Sin,
    Cos,
    Log,
    Exp,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 4] = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div];

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
        }
    }

    pub fn from_symbol(s: &str) -> Option<BinaryOp> {
        Self::ALL.into_iter().find(|op| op.symbol() == s)
    }

    fn apply(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            BinaryOp::Add => lhs + rhs,
            BinaryOp::Sub => lhs - rhs,
            BinaryOp::Mul => lhs * rhs,
            BinaryOp::Div => {
                if rhs.abs() < DIV_EPSILON {
                    1.0
                } else {
                    lhs / rhs
                }
            }
        }
    }
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 4] = [UnaryOp::Sin, UnaryOp::Cos, UnaryOp::Log, UnaryOp::Exp];

    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Log => "log",
            UnaryOp::Exp => "exp",
        }
    }

    pub fn from_symbol(s: &str) -> Option<UnaryOp> {
        Self::ALL.into_iter().find(|op| op.symbol() == s)
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            UnaryOp::Sin => x.sin(),
            UnaryOp::Cos => x.cos(),
            UnaryOp::Log => {
                if x == 0.0 {
                    0.0
                } else {
                    x.abs().ln()
                }
            }
            UnaryOp::Exp => x.clamp(-EXP_LIMIT, EXP_LIMIT).exp(),
        }
    }
}

/// An immutable expression tree over named terminals.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprTree {
    Binary(BinaryOp, Box<ExprTree>, Box<ExprTree>),
    Unary(UnaryOp, Box<ExprTree>),
    Terminal(String),
}

#[derive(Debug, Error)]
pub enum ExprError {
    #[error("syntax error: {0}")]
    Syntax(#[from] SexprError),
    #[error("at byte {pos}: unknown operator `{name}`")]
    UnknownOperator { pos: usize, name: String },
    #[error("at byte {pos}: operator `{name}` takes {expected} argument(s), got {got}")]
    WrongArity {
        pos: usize,
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("terminal `{name}` is not covered by the bindings")]
    UnboundTerminal { name: String },
    #[error("binding `{name}` needs series statistics, but none were supplied")]
    StatsUnavailable { name: String },
    #[error("binding `{name}` must be a finite constant")]
    NonFiniteConstant { name: String },
}

impl ExprTree {
    pub fn terminal(name: impl Into<String>) -> ExprTree {
        ExprTree::Terminal(name.into())
    }

    pub fn binary(op: BinaryOp, left: ExprTree, right: ExprTree) -> ExprTree {
        ExprTree::Binary(op, Box::new(left), Box::new(right))
    }

    pub fn unary(op: UnaryOp, child: ExprTree) -> ExprTree {
        ExprTree::Unary(op, Box::new(child))
    }

    pub fn node_count(&self) -> usize {
        match self {
            ExprTree::Binary(_, l, r) => 1 + l.node_count() + r.node_count(),
            ExprTree::Unary(_, c) => 1 + c.node_count(),
            ExprTree::Terminal(_) => 1,
        }
    }

    /// Depth in nodes; a bare terminal has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            ExprTree::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
            ExprTree::Unary(_, c) => 1 + c.depth(),
            ExprTree::Terminal(_) => 1,
        }
    }

    /// Subtree rooted at pre-order index `index` (0 = whole tree).
    pub fn subtree(&self, index: usize) -> &ExprTree {
        self.find(index)
            .unwrap_or_else(|| panic!("subtree index {index} out of range"))
    }

    fn find(&self, index: usize) -> Option<&ExprTree> {
        if index == 0 {
            return Some(self);
        }
        let mut rest = index - 1;
        match self {
            ExprTree::Terminal(_) => None,
            ExprTree::Unary(_, c) => c.find(rest),
            ExprTree::Binary(_, l, r) => {
                let left_count = l.node_count();
                if rest < left_count {
                    l.find(rest)
                } else {
                    rest -= left_count;
                    r.find(rest)
                }
            }
        }
    }

    /// New tree with the subtree at pre-order index `index` replaced.
    pub fn replace(&self, index: usize, replacement: &ExprTree) -> ExprTree {
        if index == 0 {
            return replacement.clone();
        }
        match self {
            ExprTree::Terminal(_) => panic!("replace index {index} out of range"),
            ExprTree::Unary(op, c) => ExprTree::unary(*op, c.replace(index - 1, replacement)),
            ExprTree::Binary(op, l, r) => {
                let rest = index - 1;
                let left_count = l.node_count();
                if rest < left_count {
                    ExprTree::binary(*op, l.replace(rest, replacement), (**r).clone())
                } else {
                    ExprTree::binary(*op, (**l).clone(), r.replace(rest - left_count, replacement))
                }
            }
        }
    }

    /// Level (1-based distance from the root) of the node at `index`.
    pub fn level_of(&self, index: usize) -> usize {
        self.level_search(index, 1)
            .unwrap_or_else(|| panic!("level index {index} out of range"))
    }

    fn level_search(&self, index: usize, level: usize) -> Option<usize> {
        if index == 0 {
            return Some(level);
        }
        let rest = index - 1;
        match self {
            ExprTree::Terminal(_) => None,
            ExprTree::Unary(_, c) => c.level_search(rest, level + 1),
            ExprTree::Binary(_, l, r) => {
                let left_count = l.node_count();
                if rest < left_count {
                    l.level_search(rest, level + 1)
                } else {
                    r.level_search(rest - left_count, level + 1)
                }
            }
        }
    }

    /// Every terminal name appearing in the tree, in pre-order.
    pub fn terminal_names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_terminals(&mut out);
        out
    }

    fn collect_terminals<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            ExprTree::Terminal(name) => out.push(name),
            ExprTree::Unary(_, c) => c.collect_terminals(out),
            ExprTree::Binary(_, l, r) => {
                l.collect_terminals(out);
                r.collect_terminals(out);
            }
        }
    }

    /// Check that every terminal is covered by `bindings`.
    pub fn check_terminals(&self, bindings: &TerminalBindings) -> Result<(), ExprError> {
        for name in self.terminal_names() {
            if !bindings.contains(name) {
                return Err(ExprError::UnboundTerminal { name: name.into() });
            }
        }
        Ok(())
    }
}

fn confine(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(-VALUE_LIMIT, VALUE_LIMIT)
    }
}

/// Evaluate the tree at index `k`. Total for any tree whose terminals the
/// bindings cover; an unbound terminal is a caller bug and panics.
pub fn eval(tree: &ExprTree, k: usize, bindings: &BoundBindings) -> f64 {
    match tree {
        ExprTree::Terminal(name) => {
            let v = bindings
                .resolve(name, k)
                .unwrap_or_else(|| panic!("unbound terminal `{name}`"));
            confine(v)
        }
        ExprTree::Unary(op, c) => confine(op.apply(eval(c, k, bindings))),
        ExprTree::Binary(op, l, r) => {
            confine(op.apply(eval(l, k, bindings), eval(r, k, bindings)))
        }
    }
}

/// Model distance at step `k`: the signed difference of consecutive
/// evaluations. Requires `k >= 1`.
pub fn distance(tree: &ExprTree, k: usize, bindings: &BoundBindings) -> f64 {
    assert!(k >= 1, "distance is defined for k >= 1");
    eval(tree, k, bindings) - eval(tree, k - 1, bindings)
}

/// Negative sum of squared errors between model and observed distances.
/// Always <= 0, and 0 exactly when the model matches every distance.
pub fn fitness(tree: &ExprTree, series: &TimeSeries, bindings: &BoundBindings) -> f64 {
    let mut sse = 0.0;
    for (i, d_obs) in distances(series).into_iter().enumerate() {
        let k = i + 1;
        let err = distance(tree, k, bindings) - d_obs;
        sse += err * err;
    }
    -sse
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// The exact puck value tree: `v*t + (h*a)*(t*t)`.
    pub fn puck_tree() -> ExprTree {
        parse_text("(+ (* v t) (* (* h a) (* t t)))").unwrap()
    }

    pub fn puck_bindings() -> TerminalBindings {
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
}
