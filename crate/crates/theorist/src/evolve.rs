//! Generic genetic-programming engine: population lifecycle, rank-based
//! roulette selection, crossover/mutation/reproduction mix, elitism, and run
//! statistics.
//!
//! Determinism: every stochastic step for offspring slot `s` of generation
//! `g` draws from a ChaCha stream keyed by `(seed, g, s)`, so results do not
//! depend on evaluation order and identical configs replay identical runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Engine parameters. Depth fields are carried here so one config object can
/// be parsed, validated, and handed to genome constructors.
#[derive(Debug, Clone, PartialEq)]
pub struct GpConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub max_depth: usize,
    pub init_depth: (usize, usize),
    pub elitism: usize,
    pub seed: u64,
    /// Choice-node ceiling for exact decision-fitness enumeration.
    pub enumeration_cap: usize,
    /// Strategy draws when a decision tree exceeds the enumeration cap.
    pub mc_draws: usize,
}

impl Default for GpConfig {
    fn default() -> GpConfig {
        GpConfig {
            population_size: 500,
            generations: 100,
            crossover_prob: 0.70,
            mutation_prob: 0.05,
            max_depth: 10,
            init_depth: (2, 6),
            elitism: 1,
            seed: 0,
            enumeration_cap: 12,
            mc_draws: 256,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("population_size must be at least 2, got {0}")]
    PopulationSize(usize),
    #[error("probability {name} = {value} is outside [0, 1]")]
    Probability { name: &'static str, value: f64 },
    #[error("crossover_prob + mutation_prob = {0} exceeds 1")]
    OperatorBudget(f64),
    #[error("elitism {elitism} exceeds population size {population}")]
    Elitism { elitism: usize, population: usize },
    #[error("init depth range ({0}, {1}) is invalid")]
    InitDepth(usize, usize),
    #[error("max_depth must be at least 1")]
    MaxDepth,
    #[error("mc_draws must be at least 1")]
    McDraws,
}

impl GpConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population_size < 2 {
            return Err(ConfigError::PopulationSize(self.population_size));
        }
        for (name, value) in [
            ("crossover_prob", self.crossover_prob),
            ("mutation_prob", self.mutation_prob),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::Probability { name, value });
            }
        }
        let budget = self.crossover_prob + self.mutation_prob;
        if budget > 1.0 + 1e-12 {
            return Err(ConfigError::OperatorBudget(budget));
        }
        if self.elitism > self.population_size {
            return Err(ConfigError::Elitism {
                elitism: self.elitism,
                population: self.population_size,
            });
        }
        if self.init_depth.0 < 1 || self.init_depth.0 > self.init_depth.1 {
            return Err(ConfigError::InitDepth(self.init_depth.0, self.init_depth.1));
        }
        if self.max_depth < 1 {
            return Err(ConfigError::MaxDepth);
        }
        if self.mc_draws < 1 {
            return Err(ConfigError::McDraws);
        }
        Ok(())
    }
}

/// A genome family: how to create, recombine, and print individuals.
pub trait GenomeOps {
    type Genome: Clone;

    fn random(&self, rng: &mut ChaCha8Rng) -> Self::Genome;
    fn crossover(
        &self,
        a: &Self::Genome,
        b: &Self::Genome,
        rng: &mut ChaCha8Rng,
    ) -> (Self::Genome, Self::Genome);
    fn mutate(&self, genome: &Self::Genome, rng: &mut ChaCha8Rng) -> Self::Genome;
    fn text(&self, genome: &Self::Genome) -> String;
}

impl GenomeOps for crate::expr::ExprConfig {
    type Genome = crate::expr::ExprTree;

    fn random(&self, rng: &mut ChaCha8Rng) -> Self::Genome {
        self.random_tree(rng)
    }

    fn crossover(
        &self,
        a: &Self::Genome,
        b: &Self::Genome,
        rng: &mut ChaCha8Rng,
    ) -> (Self::Genome, Self::Genome) {
        crate::expr::ExprConfig::crossover(self, a, b, rng)
    }

    fn mutate(&self, genome: &Self::Genome, rng: &mut ChaCha8Rng) -> Self::Genome {
        crate::expr::ExprConfig::mutate(self, genome, rng)
    }

    fn text(&self, genome: &Self::Genome) -> String {
        crate::expr::to_text(genome)
    }
}

impl GenomeOps for crate::gates::GateConfig {
    type Genome = crate::gates::GateTree;

    fn random(&self, rng: &mut ChaCha8Rng) -> Self::Genome {
        self.random_tree(rng)
    }

    fn crossover(
        &self,
        a: &Self::Genome,
        b: &Self::Genome,
        rng: &mut ChaCha8Rng,
    ) -> (Self::Genome, Self::Genome) {
        crate::gates::GateConfig::crossover(self, a, b, rng)
    }

    fn mutate(&self, genome: &Self::Genome, rng: &mut ChaCha8Rng) -> Self::Genome {
        crate::gates::GateConfig::mutate(self, genome, rng)
    }

    fn text(&self, genome: &Self::Genome) -> String {
        crate::gates::to_text(genome)
    }
}

/// A genome with its cached fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual<G> {
    pub genome: G,
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_genome: String,
}

/// How many offspring each variation operator produced over a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OperatorMix {
    pub crossovers: u64,
    pub mutations: u64,
    pub copies: u64,
}

impl OperatorMix {
    fn absorb(&mut self, other: OperatorMix) {
        self.crossovers += other.crossovers;
        self.mutations += other.mutations;
        self.copies += other.copies;
    }
}

/// Per-generation records plus the aggregate operator mix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunHistory {
    pub records: Vec<GenerationRecord>,
    pub operator_mix: OperatorMix,
}

impl RunHistory {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("generation,best_fitness,mean_fitness,best_genome\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.generation, r.best_fitness, r.mean_fitness, r.best_genome
            ));
        }
        out
    }
}

fn stream_rng(seed: u64, generation: u64, slot: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&generation.to_le_bytes());
    key[16..24].copy_from_slice(&slot.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Rank-based roulette sampler. Individuals are ranked by fitness (worst
/// rank 1, best rank n, ties sharing their average rank) and picked with
/// probability proportional to rank. Safe for non-positive fitness.
pub struct RankSelector {
    cumulative: Vec<f64>,
    total: f64,
}

impl RankSelector {
    pub fn new(fitness: &[f64]) -> RankSelector {
        let n = fitness.len();
        assert!(n > 0, "cannot select from an empty population");
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            fitness[i]
                .partial_cmp(&fitness[j])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(i.cmp(&j))
        });

        // Fractional ranking: tied fitness shares the mean of its rank span,
        // which makes selection uniform when every fitness is equal.
        let mut weights = vec![0.0f64; n];
        let mut start = 0;
        while start < n {
            let mut end = start;
            while end + 1 < n && fitness[order[end + 1]] == fitness[order[start]] {
                end += 1;
            }
            let mean_rank = (start + end + 2) as f64 / 2.0;
            for &idx in &order[start..=end] {
                weights[idx] = mean_rank;
            }
            start = end + 1;
        }

        let mut cumulative = Vec::with_capacity(n);
        let mut total = 0.0;
        for w in &weights {
            total += w;
            cumulative.push(total);
        }
        RankSelector { cumulative, total }
    }

    pub fn pick<R: Rng>(&self, rng: &mut R) -> usize {
        let u = rng.gen::<f64>() * self.total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.cumulative.len() - 1)
    }
}

/// Draw one parent by rank-based roulette.
pub fn select_parent<'a, G, R: Rng>(
    population: &'a [Individual<G>],
    rng: &mut R,
) -> &'a Individual<G> {
    let fitness: Vec<f64> = population.iter().map(|i| i.fitness).collect();
    let selector = RankSelector::new(&fitness);
    &population[selector.pick(rng)]
}

fn ranked_indices<G>(population: &[Individual<G>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&i, &j| {
        population[j]
            .fitness
            .partial_cmp(&population[i].fitness)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    order
}

/// Produce the next generation: the top `elitism` individuals are copied
/// verbatim (cached fitness included) and every remaining slot is filled by
/// crossover, mutation, or reproduction per the configured operator mix.
pub fn step_generation<O, F>(
    population: &[Individual<O::Genome>],
    config: &GpConfig,
    ops: &O,
    fitness_fn: &F,
    generation: u64,
) -> (Vec<Individual<O::Genome>>, OperatorMix)
where
    O: GenomeOps,
    F: Fn(&O::Genome, &mut ChaCha8Rng) -> f64,
{
    let n = population.len();
    let fitness: Vec<f64> = population.iter().map(|i| i.fitness).collect();
    let selector = RankSelector::new(&fitness);

    let order = ranked_indices(population);
    let mut next: Vec<Individual<O::Genome>> = order
        .iter()
        .take(config.elitism.min(n))
        .map(|&i| population[i].clone())
        .collect();

    let mut mix = OperatorMix::default();
    for slot in next.len()..n {
        let mut rng = stream_rng(config.seed, generation, slot as u64);
        let u: f64 = rng.gen();
        let genome = if u < config.crossover_prob {
            mix.crossovers += 1;
            let a = &population[selector.pick(&mut rng)];
            let b = &population[selector.pick(&mut rng)];
            ops.crossover(&a.genome, &b.genome, &mut rng).0
        } else if u < config.crossover_prob + config.mutation_prob {
            mix.mutations += 1;
            let parent = &population[selector.pick(&mut rng)];
            ops.mutate(&parent.genome, &mut rng)
        } else {
            mix.copies += 1;
            population[selector.pick(&mut rng)].genome.clone()
        };
        let f = fitness_fn(&genome, &mut rng);
        next.push(Individual { genome, fitness: f });
    }
    (next, mix)
}

fn best_index<G>(population: &[Individual<G>]) -> usize {
    let mut best = 0;
    for i in 1..population.len() {
        if population[i].fitness > population[best].fitness {
            best = i;
        }
    }
    best
}

fn record<O: GenomeOps>(
    history: &mut RunHistory,
    generation: usize,
    population: &[Individual<O::Genome>],
    ops: &O,
) {
    let best = &population[best_index(population)];
    let mean = population.iter().map(|i| i.fitness).sum::<f64>() / population.len() as f64;
    history.records.push(GenerationRecord {
        generation,
        best_fitness: best.fitness,
        mean_fitness: mean,
        best_genome: ops.text(&best.genome),
    });
}

/// Run the full evolution loop and return the best individual ever seen
/// along with the per-generation history.
pub fn run<O, F>(config: &GpConfig, ops: &O, fitness_fn: F) -> (Individual<O::Genome>, RunHistory)
where
    O: GenomeOps,
    F: Fn(&O::Genome, &mut ChaCha8Rng) -> f64,
{
    config.validate().expect("GpConfig must be valid");

    let mut population: Vec<Individual<O::Genome>> = (0..config.population_size)
        .map(|slot| {
            let mut rng = stream_rng(config.seed, 0, slot as u64);
            let genome = ops.random(&mut rng);
            let fitness = fitness_fn(&genome, &mut rng);
            Individual { genome, fitness }
        })
        .collect();

    let mut history = RunHistory::default();
    record(&mut history, 0, &population, ops);
    let mut best = population[best_index(&population)].clone();

    for generation in 1..=config.generations {
        let (next, mix) =
            step_generation(&population, config, ops, &fitness_fn, generation as u64);
        debug_assert_eq!(next.len(), population.len());
        population = next;
        history.operator_mix.absorb(mix);
        record(&mut history, generation, &population, ops);
        let gen_best = &population[best_index(&population)];
        if gen_best.fitness > best.fitness {
            best = gen_best.clone();
        }
    }

    (best, history)
}
