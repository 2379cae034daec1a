//! One-elite (1 + λ) evolution strategy over genotypes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cgp::{Genotype, DEFAULT_GENOME_LENGTH, DEFAULT_MUTATION_RATE};
use crate::error::{Error, Result};
use crate::rng;
use crate::tasks::{EvalSeeds, Evaluator, FitnessReport};

// Labels for the run's random streams.
const STREAM_POPULATION: u64 = 1;
const STREAM_BRAIN: u64 = 2;
const STREAM_DEVELOPMENT: u64 = 3;
const STREAM_EPISODES: u64 = 4;
const STREAM_MUTATION: u64 = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolutionConfig {
    pub generations: usize,
    pub population_size: usize,
    pub mutation_rate: f64,
    pub genome_length: usize,
    /// Re-score the elite each generation instead of carrying its fitness.
    pub elite_reeval: bool,
    pub seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            generations: 100,
            population_size: 10,
            mutation_rate: DEFAULT_MUTATION_RATE,
            genome_length: DEFAULT_GENOME_LENGTH,
            elite_reeval: false,
            seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.generations == 0 {
            return Err(Error::Config("generations must be >= 1".into()));
        }
        if self.population_size < 2 {
            return Err(Error::Config("population_size must be >= 2".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::Config(format!("mutation_rate {} outside [0, 1]", self.mutation_rate)));
        }
        if self.genome_length == 0 {
            return Err(Error::Config("genome_length must be >= 1".into()));
        }
        Ok(())
    }

    /// Seeds for evaluations in generation `generation` (0 = initial population).
    ///
    /// The initial brain and development jitter are fixed for the run; the
    /// cartpole starts change every generation and are shared by all
    /// individuals of that generation.
    pub fn eval_seeds(&self, generation: usize) -> EvalSeeds {
        let episodes = rng::derive(self.seed, &[STREAM_EPISODES, generation as u64]);
        EvalSeeds {
            brain: rng::derive(self.seed, &[STREAM_BRAIN]),
            development: rng::derive(self.seed, &[STREAM_DEVELOPMENT]),
            training: rng::derive(episodes, &[0]),
            scoring: rng::derive(episodes, &[1]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub genotype: Genotype,
    pub fitness: Option<FitnessReport>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    pub individuals: Vec<Individual>,
}

impl Population {
    pub fn random(config: &EvolutionConfig) -> Result<Population> {
        let mut r = rng::stream(config.seed, &[STREAM_POPULATION]);
        let individuals = (0..config.population_size)
            .map(|_| Ok(Individual { genotype: Genotype::random(config.genome_length, &mut r)?, fitness: None }))
            .collect::<Result<_>>()?;
        Ok(Population { individuals })
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    /// Score every individual without a cached fitness.
    pub fn evaluate(&mut self, evaluator: &Evaluator, seeds: &EvalSeeds) -> Result<()> {
        self.individuals
            .par_iter_mut()
            .filter(|ind| ind.fitness.is_none())
            .try_for_each(|ind| {
                ind.fitness = Some(evaluator.evaluate(&ind.genotype, seeds)?);
                Ok(())
            })
    }

    fn fitness_of(&self, i: usize) -> Result<FitnessReport> {
        self.individuals[i]
            .fitness
            .ok_or_else(|| Error::Contract(format!("individual {i} has not been evaluated")))
    }

    /// Index of the highest total fitness; the lowest index wins ties.
    pub fn elite_index(&self) -> Result<usize> {
        let mut best = 0;
        let mut best_total = self.fitness_of(0)?.total;
        for i in 1..self.len() {
            let total = self.fitness_of(i)?.total;
            if total > best_total {
                best = i;
                best_total = total;
            }
        }
        Ok(best)
    }

    pub fn stats(&self) -> Result<GenerationStats> {
        let elite = self.elite_index()?;
        let mut sum = 0.0;
        for i in 0..self.len() {
            sum += self.fitness_of(i)?.total;
        }
        Ok(GenerationStats { best: self.fitness_of(elite)?, mean_total: sum / self.len() as f64 })
    }
}

/// Summary of one evaluated generation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    /// Fitness of the generation's best individual.
    pub best: FitnessReport,
    pub mean_total: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub stats: GenerationStats,
}

/// Elite first (unchanged), then `population_size - 1` mutants of it.
/// Mutants are unevaluated; the elite keeps its fitness unless `elite_reeval`.
pub fn next_generation<R: rand::Rng + ?Sized>(pop: &Population, config: &EvolutionConfig, rng: &mut R) -> Result<Population> {
    let elite = pop.individuals[pop.elite_index()?].clone();
    let mut individuals = Vec::with_capacity(pop.len());
    for _ in 1..pop.len() {
        individuals.push(Individual { genotype: elite.genotype.mutate(config.mutation_rate, rng), fitness: None });
    }
    let fitness = if config.elite_reeval { None } else { elite.fitness };
    individuals.insert(0, Individual { genotype: elite.genotype, fitness });
    Ok(Population { individuals })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub records: Vec<GenerationRecord>,
    pub final_population: Population,
}

impl RunOutcome {
    /// Best individual of the last generation.
    pub fn champion(&self) -> Result<&Individual> {
        Ok(&self.final_population.individuals[self.final_population.elite_index()?])
    }
}

pub fn run_evolution(config: &EvolutionConfig, evaluator: &Evaluator) -> Result<RunOutcome> {
    run_evolution_with(config, evaluator, |_, _| Ok(()))
}

/// Evaluate a random population, then apply `generations` rounds of
/// reproduction and evaluation. `observe` sees each recorded generation.
pub fn run_evolution_with<F>(config: &EvolutionConfig, evaluator: &Evaluator, mut observe: F) -> Result<RunOutcome>
where
    F: FnMut(&GenerationRecord, &Population) -> Result<()>,
{
    config.validate()?;
    let mut pop = Population::random(config)?;
    pop.evaluate(evaluator, &config.eval_seeds(0))?;

    let mut records = Vec::with_capacity(config.generations);
    for generation in 1..=config.generations {
        let mut mutation_rng = rng::stream(config.seed, &[STREAM_MUTATION, generation as u64]);
        pop = next_generation(&pop, config, &mut mutation_rng)?;
        pop.evaluate(evaluator, &config.eval_seeds(generation))?;
        let record = GenerationRecord { generation, stats: pop.stats()? };
        observe(&record, &pop)?;
        records.push(record);
    }
    Ok(RunOutcome { records, final_population: pop })
}
