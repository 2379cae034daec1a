//! Benchmark tasks and the per-individual fitness pipeline.

pub mod cartpole;
pub mod dataset;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::brain::{Brain, DevelopmentConfig, TaskId, TaskSpec, WiredNetwork};
use crate::cgp::{DecodedGenotype, Genotype};
use crate::error::{Error, Result};
use crate::learning::{ad_update, reward_from_accuracy, reward_from_cartpole, AdConfig, RewardSignal};
use crate::rng;

pub use cartpole::{run_cartpole_episode, Action, CartpoleConfig, CartpoleState};
pub use dataset::{evaluate_classification, Dataset};

/// Per-task score ceiling.
pub const TASK_MAX_SCORE: f64 = 1000.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Cartpole,
    Classification,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Cartpole => "cartpole",
            TaskKind::Classification => "classification",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FitnessReport {
    pub cartpole: f64,
    pub classification: f64,
    pub total: f64,
}

impl FitnessReport {
    pub fn new(cartpole: f64, classification: f64) -> Self {
        FitnessReport { cartpole, classification, total: cartpole + classification }
    }
}

/// Everything an evaluation needs besides the genotype and the seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Tasks in the order they are laid out in the brain and run per AD epoch.
    pub tasks: Vec<TaskKind>,
    pub development: DevelopmentConfig,
    pub ad: AdConfig,
    pub cartpole: CartpoleConfig,
    /// Fresh cartpole episodes averaged for the final score.
    pub score_episodes: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            tasks: vec![TaskKind::Cartpole, TaskKind::Classification],
            development: DevelopmentConfig::default(),
            ad: AdConfig::default(),
            cartpole: CartpoleConfig::default(),
            score_episodes: 3,
        }
    }
}

/// Seeds of the random streams used by one evaluation.
///
/// The harness shares episode seeds across a whole generation so that
/// individuals are compared on the same cartpole starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EvalSeeds {
    /// Initial dendrites of the output somas.
    pub brain: u64,
    /// Birth jitter during development and structural AD updates.
    pub development: u64,
    /// Cartpole starts of the AD learning episodes.
    pub training: u64,
    /// Cartpole starts of the scoring episodes.
    pub scoring: u64,
}

impl EvalSeeds {
    pub fn from_seed(seed: u64) -> Self {
        EvalSeeds {
            brain: rng::derive(seed, &[0]),
            development: rng::derive(seed, &[1]),
            training: rng::derive(seed, &[2]),
            scoring: rng::derive(seed, &[3]),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Evaluator {
    config: EvalConfig,
    dataset: Option<Arc<Dataset>>,
    specs: Vec<TaskSpec>,
}

impl Evaluator {
    pub fn new(config: EvalConfig, dataset: Option<Arc<Dataset>>) -> Result<Self> {
        config.development.validate()?;
        if config.tasks.is_empty() {
            return Err(Error::Config("at least one task is required".into()));
        }
        if config.tasks.iter().filter(|&&t| t == TaskKind::Cartpole).count() > 1
            || config.tasks.iter().filter(|&&t| t == TaskKind::Classification).count() > 1
        {
            return Err(Error::Config("each task may appear at most once".into()));
        }
        if config.cartpole.max_steps == 0 {
            return Err(Error::Config("cartpole max_steps must be >= 1".into()));
        }
        if config.tasks.contains(&TaskKind::Cartpole) && config.score_episodes == 0 {
            return Err(Error::Config("score_episodes must be >= 1".into()));
        }
        let mut specs = Vec::new();
        for &task in &config.tasks {
            let inputs = match task {
                TaskKind::Cartpole => 4,
                TaskKind::Classification => dataset
                    .as_ref()
                    .ok_or_else(|| Error::Config("classification task needs a dataset".into()))?
                    .n_features(),
            };
            specs.push(TaskSpec::new(task.name(), inputs, 1));
        }
        Ok(Evaluator { config, dataset, specs })
    }

    pub fn config(&self) -> &EvalConfig {
        &self.config
    }

    pub fn dataset(&self) -> Option<&Dataset> {
        self.dataset.as_deref()
    }

    pub fn task_specs(&self) -> &[TaskSpec] {
        &self.specs
    }

    /// Initial brain followed by the development cycles.
    pub fn grow(&self, genotype: &Genotype, seeds: &EvalSeeds) -> Result<Brain> {
        genotype.validate()?;
        let programs = genotype.decode();
        let mut dev_rng = rng::from_seed(seeds.development);
        self.grow_decoded(&programs, seeds, &mut dev_rng)
    }

    fn grow_decoded(&self, programs: &DecodedGenotype, seeds: &EvalSeeds, dev_rng: &mut rng::Rng) -> Result<Brain> {
        let dev = &self.config.development;
        let mut brain = Brain::new(&self.specs, dev, &mut rng::from_seed(seeds.brain))?;
        brain.develop(programs, dev, dev_rng);
        Ok(brain)
    }

    /// Develop, learn for the configured AD epochs, then score every task.
    ///
    /// With an empty AD mask the learning episodes still run (same compute as
    /// the AD arms) but cannot change the brain.
    pub fn evaluate(&self, genotype: &Genotype, seeds: &EvalSeeds) -> Result<FitnessReport> {
        genotype.validate()?;
        let programs = genotype.decode();
        let mut dev_rng = rng::from_seed(seeds.development);
        let mut brain = self.grow_decoded(&programs, seeds, &mut dev_rng)?;
        let mut network = brain.wire();
        let ad = &self.config.ad;

        for epoch in 0..ad.epochs {
            for (i, &task) in self.config.tasks.iter().enumerate() {
                let mut episode_rng = rng::stream(seeds.training, &[epoch as u64, i as u64]);
                let reward = self.play(&network, TaskId(i), task, &mut episode_rng)?.1;
                if !ad.mask.is_empty() {
                    ad_update(&mut brain, &programs, ad, reward, &self.config.development, &mut dev_rng);
                    network = brain.wire();
                }
            }
        }

        let mut cartpole = 0.0;
        let mut classification = 0.0;
        for (i, &task) in self.config.tasks.iter().enumerate() {
            match task {
                TaskKind::Cartpole => {
                    let episodes = self.config.score_episodes;
                    let mut total = 0usize;
                    for k in 0..episodes {
                        let mut episode_rng = rng::stream(seeds.scoring, &[k as u64]);
                        total += run_cartpole_episode(&network, TaskId(i), &self.config.cartpole, &mut episode_rng)?;
                    }
                    cartpole = TASK_MAX_SCORE * total as f64 / (episodes * self.config.cartpole.max_steps) as f64;
                }
                TaskKind::Classification => {
                    let (correct, n) = evaluate_classification(&network, TaskId(i), self.data()?)?;
                    classification = TASK_MAX_SCORE * correct as f64 / n as f64;
                }
            }
        }
        Ok(FitnessReport::new(cartpole, classification))
    }

    /// Run one learning episode of `task` and return its raw score and reward.
    fn play(&self, network: &WiredNetwork, id: TaskId, task: TaskKind, rng: &mut rng::Rng) -> Result<(f64, RewardSignal)> {
        match task {
            TaskKind::Cartpole => {
                let max = self.config.cartpole.max_steps;
                let steps = run_cartpole_episode(network, id, &self.config.cartpole, rng)?;
                Ok((steps as f64, reward_from_cartpole(steps, max)?))
            }
            TaskKind::Classification => {
                let (correct, n) = evaluate_classification(network, id, self.data()?)?;
                Ok((correct as f64, reward_from_accuracy(correct, n)?))
            }
        }
    }

    fn data(&self) -> Result<&Dataset> {
        self.dataset.as_deref().ok_or_else(|| Error::Config("classification task needs a dataset".into()))
    }
}

/// Free-function form of [`Evaluator::evaluate`].
pub fn evaluate_individual(genotype: &Genotype, evaluator: &Evaluator, seeds: &EvalSeeds) -> Result<FitnessReport> {
    evaluator.evaluate(genotype, seeds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learning::{AdMask, AdTarget};
    use crate::rng;
    use proptest::prelude::*;

    fn small_dataset() -> Arc<Dataset> {
        let (rows, labels) = dataset::surrogate_banknote(&mut rng::from_seed(3));
        Arc::new(Dataset::from_rows(&rows[..200], labels[..200].to_vec()).unwrap())
    }

    fn evaluator(mask: AdMask, epochs: usize) -> Evaluator {
        let config = EvalConfig { ad: AdConfig { mask, epochs, structural_updates: true }, ..Default::default() };
        Evaluator::new(config, Some(small_dataset())).unwrap()
    }

    #[test]
    fn classification_without_dataset_is_rejected() {
        assert!(matches!(Evaluator::new(EvalConfig::default(), None), Err(Error::Config(_))));
    }

    #[test]
    fn cartpole_only_needs_no_dataset() {
        let config = EvalConfig { tasks: vec![TaskKind::Cartpole], ..Default::default() };
        let ev = Evaluator::new(config, None).unwrap();
        let g = Genotype::random(64, &mut rng::from_seed(1)).unwrap();
        let r = ev.evaluate(&g, &EvalSeeds::from_seed(2)).unwrap();
        assert_eq!(r.classification, 0.0);
        assert_eq!(r.total, r.cartpole);
    }

    #[test]
    fn evaluation_is_deterministic() {
        let ev = evaluator(AdMask::all(), 2);
        let g = Genotype::random(64, &mut rng::from_seed(4)).unwrap();
        let seeds = EvalSeeds::from_seed(5);
        assert_eq!(ev.evaluate(&g, &seeds).unwrap(), ev.evaluate(&g, &seeds).unwrap());
    }

    #[test]
    fn empty_mask_matches_no_learning_at_all() {
        let with_epochs = evaluator(AdMask::EMPTY, 5);
        let without = evaluator(AdMask::EMPTY, 0);
        let mut r = rng::from_seed(6);
        for i in 0..20 {
            let g = Genotype::random(64, &mut r).unwrap();
            let seeds = EvalSeeds::from_seed(i);
            assert_eq!(with_epochs.evaluate(&g, &seeds).unwrap(), without.evaluate(&g, &seeds).unwrap());
        }
    }

    #[test]
    fn perfect_scores_sum_to_two_thousand() {
        let r = FitnessReport::new(TASK_MAX_SCORE, TASK_MAX_SCORE);
        assert_eq!(r.total, 2000.0);
    }

    #[test]
    fn ad_mask_changes_some_outcome() {
        let plain = evaluator(AdMask::EMPTY, 3);
        let learned = evaluator(AdMask::only(AdTarget::Bias), 3);
        let mut r = rng::from_seed(8);
        let differs = (0..40).any(|i| {
            let g = Genotype::random(64, &mut r).unwrap();
            let seeds = EvalSeeds::from_seed(i);
            plain.evaluate(&g, &seeds).unwrap() != learned.evaluate(&g, &seeds).unwrap()
        });
        assert!(differs);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn fitness_stays_within_ceilings(seed in any::<u64>(), mask_bits in 0u8..8) {
            let mask: AdMask = AdTarget::ALL.into_iter().filter(|&t| mask_bits & (1 << t as u8) != 0).collect();
            let ev = evaluator(mask, 2);
            let g = Genotype::random(64, &mut rng::from_seed(seed)).unwrap();
            let r = ev.evaluate(&g, &EvalSeeds::from_seed(seed)).unwrap();
            prop_assert!((0.0..=1000.0).contains(&r.cartpole));
            prop_assert!((0.0..=1000.0).contains(&r.classification));
            prop_assert!(r.total <= 2000.0);
            prop_assert_eq!(r.total, r.cartpole + r.classification);
        }
    }
}
