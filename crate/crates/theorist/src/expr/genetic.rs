//! Genetic operators over expression trees: ramped half-and-half
//! initialization, subtree crossover, and subtree mutation.

use rand::Rng;

use super::{BinaryOp, ExprTree, UnaryOp};

/// Operator set, terminal set, and depth bounds for tree generation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprConfig {
    pub binary_ops: Vec<BinaryOp>,
    pub unary_ops: Vec<UnaryOp>,
    pub terminals: Vec<String>,
    pub max_depth: usize,
    /// Depth range (min, max) for ramped half-and-half initialization.
    pub init_depth: (usize, usize),
}

impl ExprConfig {
    /// Arithmetic-only operator set over the given terminals, with the
    /// standard depth settings (max 10, init ramp 2..=6).
    pub fn arithmetic<I, S>(terminals: I) -> ExprConfig
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ExprConfig {
            binary_ops: BinaryOp::ALL.to_vec(),
            unary_ops: Vec::new(),
            terminals: terminals.into_iter().map(Into::into).collect(),
            max_depth: 10,
            init_depth: (2, 6),
        }
    }

    fn op_count(&self) -> usize {
        self.binary_ops.len() + self.unary_ops.len()
    }

    fn random_terminal<R: Rng>(&self, rng: &mut R) -> ExprTree {
        let i = rng.gen_range(0..self.terminals.len());
        ExprTree::Terminal(self.terminals[i].clone())
    }

    fn random_op_node<R: Rng>(&self, rng: &mut R, child_depth: usize, full: bool) -> ExprTree {
        let i = rng.gen_range(0..self.op_count());
        if i < self.binary_ops.len() {
            let op = self.binary_ops[i];
            ExprTree::binary(
                op,
                self.gen_depth(rng, child_depth, full),
                self.gen_depth(rng, child_depth, full),
            )
        } else {
            let op = self.unary_ops[i - self.binary_ops.len()];
            ExprTree::unary(op, self.gen_depth(rng, child_depth, full))
        }
    }

    fn gen_depth<R: Rng>(&self, rng: &mut R, depth: usize, full: bool) -> ExprTree {
        if depth <= 1 || self.op_count() == 0 {
            return self.random_terminal(rng);
        }
        if full {
            self.random_op_node(rng, depth - 1, true)
        } else {
            // Grow method: leaves compete with operators at every level.
            let total = self.terminals.len() + self.op_count();
            if rng.gen_range(0..total) < self.terminals.len() {
                self.random_terminal(rng)
            } else {
                self.random_op_node(rng, depth - 1, false)
            }
        }
    }

    /// Ramped half-and-half: uniform depth limit over the init range, then a
    /// fair coin between the full and grow methods.
    pub fn random_tree<R: Rng>(&self, rng: &mut R) -> ExprTree {
        let (lo, hi) = self.init_depth;
        let limit = rng.gen_range(lo..=hi).min(self.max_depth).max(1);
        let full = rng.gen_bool(0.5);
        self.gen_depth(rng, limit, full)
    }

    /// Swap uniformly chosen subtrees. An offspring whose depth would exceed
    /// the bound is discarded in favor of the parent it grew from.
    pub fn crossover<R: Rng>(
        &self,
        a: &ExprTree,
        b: &ExprTree,
        rng: &mut R,
    ) -> (ExprTree, ExprTree) {
        let ia = rng.gen_range(0..a.node_count());
        let ib = rng.gen_range(0..b.node_count());
        let mut child_a = a.replace(ia, b.subtree(ib));
        let mut child_b = b.replace(ib, a.subtree(ia));
        if child_a.depth() > self.max_depth {
            child_a = a.clone();
        }
        if child_b.depth() > self.max_depth {
            child_b = b.clone();
        }
        (child_a, child_b)
    }

    /// Replace a uniformly chosen subtree with a fresh grown subtree sized to
    /// fit the depth budget at that position.
    pub fn mutate<R: Rng>(&self, tree: &ExprTree, rng: &mut R) -> ExprTree {
        let index = rng.gen_range(0..tree.node_count());
        let level = tree.level_of(index);
        let budget = self.max_depth.saturating_sub(level) + 1;
        let (lo, hi) = self.init_depth;
        let limit = rng.gen_range(lo..=hi).min(budget).max(1);
        let replacement = self.gen_depth(rng, limit, false);
        tree.replace(index, &replacement)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn config() -> ExprConfig {
        ExprConfig::arithmetic(["t", "v", "a", "o", "h"])
    }

    fn closed_over(tree: &ExprTree, config: &ExprConfig) -> bool {
        tree.terminal_names()
            .iter()
            .all(|n| config.terminals.iter().any(|t| t == n))
    }

    #[test]
    fn depth_bound_one_yields_bare_terminal() {
        let mut c = config();
        c.init_depth = (1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let t = c.random_tree(&mut rng);
            assert_eq!(t.depth(), 1);
            assert!(matches!(t, ExprTree::Terminal(_)));
        }
    }

    #[test]
    fn crossover_of_single_terminals_is_identity() {
        let c = config();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = ExprTree::terminal("t");
        let b = ExprTree::terminal("t");
        let (x, y) = c.crossover(&a, &b, &mut rng);
        assert_eq!(x, a);
        assert_eq!(y, b);
    }

    #[test]
    fn mutate_at_root_produces_fresh_tree_within_bounds() {
        let c = config();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let single = ExprTree::terminal("v");
        for _ in 0..100 {
            // A single-node tree forces the root to be picked.
            let m = c.mutate(&single, &mut rng);
            assert!(m.depth() <= c.max_depth);
            assert!(closed_over(&m, &c));
        }
    }

    #[test]
    fn genetic_operators_preserve_invariants() {
        let c = config();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pool: Vec<ExprTree> = (0..32).map(|_| c.random_tree(&mut rng)).collect();
        for _ in 0..500 {
            let i = rng.gen_range(0..pool.len());
            let j = rng.gen_range(0..pool.len());
            let (x, y) = c.crossover(&pool[i].clone(), &pool[j].clone(), &mut rng);
            let m = c.mutate(&pool[i].clone(), &mut rng);
            for t in [&x, &y, &m] {
                assert!(t.depth() <= c.max_depth, "depth {} too big", t.depth());
                assert!(closed_over(t, &c));
            }
            pool[i] = x;
            pool[j] = m;
        }
    }

    #[test]
    fn ramped_init_spans_depth_range() {
        let c = config();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut seen_deep = false;
        let mut seen_shallow = false;
        for _ in 0..300 {
            let d = c.random_tree(&mut rng).depth();
            assert!(d <= c.init_depth.1);
            if d >= 5 {
                seen_deep = true;
            }
            if d <= 2 {
                seen_shallow = true;
            }
        }
        assert!(seen_deep && seen_shallow);
    }
}
