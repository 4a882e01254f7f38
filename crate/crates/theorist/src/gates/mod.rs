//! Matrix-valued decision trees over a fixed set of eight 2x2 gates.
//!
//! A tree combines gate leaves with addition, multiplication, and random
//! choice (`//`) nodes. Fixing every choice bit resolves the tree to one
//! concrete matrix, a *strategy*, whose eigendecomposition yields the
//! probabilities of the two available actions.

mod genetic;
mod matrix;
mod text;

pub use genetic::GateConfig;
pub use matrix::{
    action_probabilities, action_probabilities_with, eigen2, CMatrix2, EigenDecomposition,
    EigenPair, Normalization, DEGENERATE_EPSILON,
};
pub use text::{parse_text, to_text};

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::sexpr::SexprError;

/// Default ceiling on exhaustive strategy enumeration (2^12 strategies).
pub const DEFAULT_ENUMERATION_CAP: usize = 12;

/// The eight base gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    S,
    D,
    T,
    I,
}

impl Gate {
    pub const ALL: [Gate; 8] = [
        Gate::H,
        Gate::X,
        Gate::Y,
        Gate::Z,
        Gate::S,
        Gate::D,
        Gate::T,
        Gate::I,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Gate::H => "H",
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::S => "S",
            Gate::D => "D",
            Gate::T => "T",
            Gate::I => "I",
        }
    }

    pub fn from_name(name: &str) -> Option<Gate> {
        Self::ALL.into_iter().find(|g| g.name() == name)
    }

    pub fn matrix(self) -> CMatrix2 {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            Gate::H => CMatrix2::new(r, r, r, -r),
            Gate::X => CMatrix2::new(z, o, o, z),
            Gate::Y => CMatrix2::new(z, -i, i, z),
            Gate::Z => CMatrix2::new(o, z, z, -o),
            Gate::S => CMatrix2::new(o, z, z, i),
            Gate::D => CMatrix2::new(z, o, -o, z),
            Gate::T => CMatrix2::new(o, z, z, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)),
            Gate::I => CMatrix2::identity(),
        }
    }
}

/// Look up a gate matrix by name.
pub fn gate(name: &str) -> Result<CMatrix2, GateError> {
    Gate::from_name(name)
        .map(Gate::matrix)
        .ok_or_else(|| GateError::UnknownGate {
            pos: 0,
            name: name.to_string(),
        })
}

/// An immutable matrix-valued tree.
#[derive(Debug, Clone, PartialEq)]
pub enum GateTree {
    Add(Box<GateTree>, Box<GateTree>),
    Mul(Box<GateTree>, Box<GateTree>),
    Choice(Box<GateTree>, Box<GateTree>),
    Leaf(Gate),
}

/// One full resolution of a tree's choice nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    /// Choice bits in depth-first (pre-order) node order; false selects the
    /// left branch.
    pub choices: Vec<bool>,
    pub matrix: CMatrix2,
    pub p1: f64,
    pub p2: f64,
}

#[derive(Debug, Error)]
pub enum GateError {
    #[error("syntax error: {0}")]
    Syntax(#[from] SexprError),
    #[error("at byte {pos}: unknown gate `{name}`")]
    UnknownGate { pos: usize, name: String },
    #[error("at byte {pos}: operator `{name}` takes {expected} argument(s), got {got}")]
    WrongArity {
        pos: usize,
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("tree has {expected} choice node(s) but {got} bit(s) were supplied")]
    ChoicesLength { expected: usize, got: usize },
    #[error(
        "tree has {choices} choice nodes, beyond the enumeration cap of {cap}; \
         use Monte Carlo sampling instead"
    )]
    EnumerationCap { choices: usize, cap: usize },
}

impl GateTree {
    pub fn leaf(gate: Gate) -> GateTree {
        GateTree::Leaf(gate)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(left: GateTree, right: GateTree) -> GateTree {
        GateTree::Add(Box::new(left), Box::new(right))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(left: GateTree, right: GateTree) -> GateTree {
        GateTree::Mul(Box::new(left), Box::new(right))
    }

    pub fn choice(left: GateTree, right: GateTree) -> GateTree {
        GateTree::Choice(Box::new(left), Box::new(right))
    }

    fn children(&self) -> Option<(&GateTree, &GateTree)> {
        match self {
            GateTree::Add(l, r) | GateTree::Mul(l, r) | GateTree::Choice(l, r) => Some((l, r)),
            GateTree::Leaf(_) => None,
        }
    }

    pub fn node_count(&self) -> usize {
        match self.children() {
            Some((l, r)) => 1 + l.node_count() + r.node_count(),
            None => 1,
        }
    }

    /// Depth in nodes; a bare leaf has depth 1.
    pub fn depth(&self) -> usize {
        match self.children() {
            Some((l, r)) => 1 + l.depth().max(r.depth()),
            None => 1,
        }
    }

    /// Number of choice nodes in the whole tree.
    pub fn choice_count(&self) -> usize {
        let own = matches!(self, GateTree::Choice(..)) as usize;
        match self.children() {
            Some((l, r)) => own + l.choice_count() + r.choice_count(),
            None => 0,
        }
    }

    /// Subtree at pre-order index `index` (0 = whole tree).
    pub fn subtree(&self, index: usize) -> &GateTree {
        self.find(index)
            .unwrap_or_else(|| panic!("subtree index {index} out of range"))
    }

    fn find(&self, index: usize) -> Option<&GateTree> {
        if index == 0 {
            return Some(self);
        }
        let (l, r) = self.children()?;
        let rest = index - 1;
        let left_count = l.node_count();
        if rest < left_count {
            l.find(rest)
        } else {
            r.find(rest - left_count)
        }
    }

    /// New tree with the subtree at pre-order index `index` replaced.
    pub fn replace(&self, index: usize, replacement: &GateTree) -> GateTree {
        if index == 0 {
            return replacement.clone();
        }
        let rebuild = |l: GateTree, r: GateTree| match self {
            GateTree::Add(..) => GateTree::add(l, r),
            GateTree::Mul(..) => GateTree::mul(l, r),
            GateTree::Choice(..) => GateTree::choice(l, r),
            GateTree::Leaf(_) => unreachable!(),
        };
        match self.children() {
            None => panic!("replace index {index} out of range"),
            Some((l, r)) => {
                let rest = index - 1;
                let left_count = l.node_count();
                if rest < left_count {
                    rebuild(l.replace(rest, replacement), r.clone())
                } else {
                    rebuild(l.clone(), r.replace(rest - left_count, replacement))
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
        let (l, r) = self.children()?;
        let rest = index - 1;
        let left_count = l.node_count();
        if rest < left_count {
            l.level_search(rest, level + 1)
        } else {
            r.level_search(rest - left_count, level + 1)
        }
    }

    /// Resolve every choice node per `choices` (pre-order bit assignment)
    /// and evaluate the tree to a matrix.
    pub fn resolve(&self, choices: &[bool]) -> Result<CMatrix2, GateError> {
        let expected = self.choice_count();
        if choices.len() != expected {
            return Err(GateError::ChoicesLength {
                expected,
                got: choices.len(),
            });
        }
        let mut cursor = 0usize;
        Ok(self.resolve_inner(choices, &mut cursor))
    }

    fn resolve_inner(&self, choices: &[bool], cursor: &mut usize) -> CMatrix2 {
        match self {
            GateTree::Leaf(g) => g.matrix(),
            GateTree::Add(l, r) => {
                l.resolve_inner(choices, cursor) + r.resolve_inner(choices, cursor)
            }
            GateTree::Mul(l, r) => {
                l.resolve_inner(choices, cursor) * r.resolve_inner(choices, cursor)
            }
            GateTree::Choice(l, r) => {
                let bit = choices[*cursor];
                *cursor += 1;
                if bit {
                    // Unselected branches still own their bit positions.
                    *cursor += l.choice_count();
                    r.resolve_inner(choices, cursor)
                } else {
                    let m = l.resolve_inner(choices, cursor);
                    *cursor += r.choice_count();
                    m
                }
            }
        }
    }
}

fn strategy_for(tree: &GateTree, choices: Vec<bool>) -> Strategy {
    let matrix = tree
        .resolve(&choices)
        .expect("choice vector built to length");
    let (p1, p2) = action_probabilities(&matrix);
    Strategy {
        choices,
        matrix,
        p1,
        p2,
    }
}

/// All 2^c strategies of a tree with c choice nodes, in ascending bit-pattern
/// order (bit j of pattern i selects choice node j). No deduplication.
pub fn enumerate_strategies(tree: &GateTree, cap: usize) -> Result<Vec<Strategy>, GateError> {
    let c = tree.choice_count();
    if c > cap {
        return Err(GateError::EnumerationCap { choices: c, cap });
    }
    Ok((0..(1usize << c))
        .map(|pattern| {
            let choices = (0..c).map(|j| (pattern >> j) & 1 == 1).collect();
            strategy_for(tree, choices)
        })
        .collect())
}

/// Draw one strategy uniformly (each choice bit a fair coin).
pub fn random_strategy<R: Rng>(tree: &GateTree, rng: &mut R) -> Strategy {
    let choices = (0..tree.choice_count()).map(|_| rng.gen_bool(0.5)).collect();
    strategy_for(tree, choices)
}

/// Sample an action index: 1 with probability `p1`, else 2.
pub fn sample_action<R: Rng>(p1: f64, rng: &mut R) -> u8 {
    if rng.gen::<f64>() < p1 {
        1
    } else {
        2
    }
}
