//! Genetic operators over gate trees, mirroring the expression-tree set.

use rand::Rng;

use super::{Gate, GateTree};

/// Depth bounds for gate-tree generation. The operator and leaf sets are
/// fixed (add, multiply, choice over the eight gates).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateConfig {
    pub max_depth: usize,
    pub init_depth: (usize, usize),
}

impl Default for GateConfig {
    fn default() -> GateConfig {
        GateConfig {
            max_depth: 8,
            init_depth: (2, 6),
        }
    }
}

const OP_COUNT: usize = 3;

impl GateConfig {
    fn random_leaf<R: Rng>(&self, rng: &mut R) -> GateTree {
        GateTree::Leaf(Gate::ALL[rng.gen_range(0..Gate::ALL.len())])
    }

    fn random_op_node<R: Rng>(&self, rng: &mut R, child_depth: usize, full: bool) -> GateTree {
        let left = self.gen_depth(rng, child_depth, full);
        let right = self.gen_depth(rng, child_depth, full);
        match rng.gen_range(0..OP_COUNT) {
            0 => GateTree::add(left, right),
            1 => GateTree::mul(left, right),
            _ => GateTree::choice(left, right),
        }
    }

    fn gen_depth<R: Rng>(&self, rng: &mut R, depth: usize, full: bool) -> GateTree {
        if depth <= 1 {
            return self.random_leaf(rng);
        }
        if full {
            self.random_op_node(rng, depth - 1, true)
        } else {
            let total = Gate::ALL.len() + OP_COUNT;
            if rng.gen_range(0..total) < Gate::ALL.len() {
                self.random_leaf(rng)
            } else {
                self.random_op_node(rng, depth - 1, false)
            }
        }
    }

    /// Ramped half-and-half initialization.
    pub fn random_tree<R: Rng>(&self, rng: &mut R) -> GateTree {
        let (lo, hi) = self.init_depth;
        let limit = rng.gen_range(lo..=hi).min(self.max_depth).max(1);
        let full = rng.gen_bool(0.5);
        self.gen_depth(rng, limit, full)
    }

    /// Subtree crossover with parent fallback on depth violations.
    pub fn crossover<R: Rng>(
        &self,
        a: &GateTree,
        b: &GateTree,
        rng: &mut R,
    ) -> (GateTree, GateTree) {
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

    /// Replace a uniformly chosen subtree with a fresh grown subtree.
    pub fn mutate<R: Rng>(&self, tree: &GateTree, rng: &mut R) -> GateTree {
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

    #[test]
    fn depth_one_gives_bare_leaf() {
        let c = GateConfig {
            max_depth: 8,
            init_depth: (1, 1),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            assert!(matches!(c.random_tree(&mut rng), GateTree::Leaf(_)));
        }
    }

    #[test]
    fn crossover_of_two_leaves_returns_same_leaves() {
        let c = GateConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = GateTree::leaf(Gate::H);
        let b = GateTree::leaf(Gate::Z);
        let (x, y) = c.crossover(&a, &b, &mut rng);
        // Swapping the only nodes exchanges the leaves.
        assert_eq!(x, b);
        assert_eq!(y, a);
    }

    #[test]
    fn mutation_preserves_invariants_over_many_trials() {
        let c = GateConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut tree = c.random_tree(&mut rng);
        for _ in 0..1000 {
            tree = c.mutate(&tree, &mut rng);
            assert!(tree.depth() <= c.max_depth);
        }
    }

    #[test]
    fn crossover_respects_depth_bound() {
        let c = GateConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pool: Vec<GateTree> = (0..16).map(|_| c.random_tree(&mut rng)).collect();
        for _ in 0..500 {
            let i = rng.gen_range(0..pool.len());
            let j = rng.gen_range(0..pool.len());
            let (x, y) = c.crossover(&pool[i].clone(), &pool[j].clone(), &mut rng);
            assert!(x.depth() <= c.max_depth);
            assert!(y.depth() <= c.max_depth);
            pool[i] = x;
            pool[j] = y;
        }
    }
}
