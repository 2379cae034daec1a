//! Experiment configuration file.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::brain::DevelopmentConfig;
use crate::cgp::{DEFAULT_GENOME_LENGTH, DEFAULT_MUTATION_RATE};
use crate::error::{Error, Result};
use crate::evolution::EvolutionConfig;
use crate::learning::{AdConfig, AdMask, AdTarget};
use crate::tasks::{dataset, CartpoleConfig, Dataset, EvalConfig, Evaluator, TaskKind};

/// One experimental condition: a name and the soma parameters under AD.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmConfig {
    pub name: String,
    #[serde(default)]
    pub ad: AdMask,
}

impl ArmConfig {
    pub fn new(name: impl Into<String>, ad: AdMask) -> Self {
        ArmConfig { name: name.into(), ad }
    }

    /// base, bias, health, position and all.
    pub fn standard_arms() -> Vec<ArmConfig> {
        vec![
            ArmConfig::new("base", AdMask::EMPTY),
            ArmConfig::new("bias", AdMask::only(AdTarget::Bias)),
            ArmConfig::new("health", AdMask::only(AdTarget::Health)),
            ArmConfig::new("position", AdMask::only(AdTarget::Position)),
            ArmConfig::new("all", AdMask::all()),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub arms: Vec<ArmConfig>,
    pub runs: usize,
    pub generations: usize,
    pub population_size: usize,
    pub mutation_rate: f64,
    pub genome_length: usize,
    pub dev_cycles: usize,
    pub theta_birth: f64,
    pub theta_death: f64,
    pub soma_cap: usize,
    pub max_dendrites: usize,
    pub init_dendrites_per_output: usize,
    pub ad_epochs: usize,
    pub structural_updates: bool,
    pub elite_reeval: bool,
    pub tasks: Vec<TaskKind>,
    pub cartpole_max_steps: usize,
    pub score_episodes: usize,
    /// CSV of `f1,...,fn,label` rows. Without it the built-in surrogate
    /// table is used.
    pub dataset_path: Option<PathBuf>,
    /// Run `r` uses seed `seed + r`.
    pub seed: u64,
    pub out_csv: PathBuf,
    /// Concurrent runs; `None` uses the available parallelism.
    pub workers: Option<usize>,
    /// Write the elite genotype every N generations (0 disables).
    pub checkpoint_every: usize,
    /// Defaults to `<out_csv without extension>_checkpoints`.
    pub checkpoint_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let dev = DevelopmentConfig::default();
        let ad = AdConfig::default();
        ExperimentConfig {
            arms: ArmConfig::standard_arms(),
            runs: 50,
            generations: 100,
            population_size: 10,
            mutation_rate: DEFAULT_MUTATION_RATE,
            genome_length: DEFAULT_GENOME_LENGTH,
            dev_cycles: dev.cycles,
            theta_birth: dev.theta_birth,
            theta_death: dev.theta_death,
            soma_cap: dev.soma_cap,
            max_dendrites: dev.max_dendrites,
            init_dendrites_per_output: dev.init_dendrites_per_output,
            ad_epochs: ad.epochs,
            structural_updates: ad.structural_updates,
            elite_reeval: false,
            tasks: vec![TaskKind::Cartpole, TaskKind::Classification],
            cartpole_max_steps: CartpoleConfig::default().max_steps,
            score_episodes: 3,
            dataset_path: None,
            seed: 0,
            out_csv: PathBuf::from("results.csv"),
            workers: None,
            checkpoint_every: 0,
            checkpoint_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: ExperimentConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.arms.is_empty() {
            return Err(Error::Config("at least one arm is required".into()));
        }
        let mut names = HashSet::new();
        for arm in &self.arms {
            if arm.name.is_empty() || arm.name.contains([',', '"', '\n', '\r']) {
                return Err(Error::Config(format!("arm name {:?} must be non-empty plain text", arm.name)));
            }
            if !names.insert(arm.name.as_str()) {
                return Err(Error::Config(format!("duplicate arm name {:?}", arm.name)));
            }
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be >= 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        self.evolution_config(0).validate()?;
        self.development_config().validate()
    }

    pub fn development_config(&self) -> DevelopmentConfig {
        DevelopmentConfig {
            cycles: self.dev_cycles,
            theta_birth: self.theta_birth,
            theta_death: self.theta_death,
            soma_cap: self.soma_cap,
            max_dendrites: self.max_dendrites,
            init_dendrites_per_output: self.init_dendrites_per_output,
        }
    }

    pub fn evolution_config(&self, run: usize) -> EvolutionConfig {
        EvolutionConfig {
            generations: self.generations,
            population_size: self.population_size,
            mutation_rate: self.mutation_rate,
            genome_length: self.genome_length,
            elite_reeval: self.elite_reeval,
            seed: self.seed.wrapping_add(run as u64),
        }
    }

    pub fn eval_config(&self, arm: &ArmConfig) -> EvalConfig {
        EvalConfig {
            tasks: self.tasks.clone(),
            development: self.development_config(),
            ad: AdConfig { mask: arm.ad, epochs: self.ad_epochs, structural_updates: self.structural_updates },
            cartpole: CartpoleConfig { max_steps: self.cartpole_max_steps, ..Default::default() },
            score_episodes: self.score_episodes,
        }
    }

    /// The classification table, if the task list needs one.
    pub fn load_dataset(&self) -> Result<Option<Arc<Dataset>>> {
        if !self.tasks.contains(&TaskKind::Classification) {
            return Ok(None);
        }
        let data = match &self.dataset_path {
            Some(path) => Dataset::load(path)?,
            None => dataset::surrogate_dataset(),
        };
        Ok(Some(Arc::new(data)))
    }

    pub fn evaluator(&self, arm: &ArmConfig, dataset: Option<Arc<Dataset>>) -> Result<Evaluator> {
        Evaluator::new(self.eval_config(arm), dataset)
    }

    pub fn arm(&self, name: &str) -> Result<&ArmConfig> {
        self.arms
            .iter()
            .find(|a| a.name == name)
            .ok_or_else(|| Error::Config(format!("no arm named {name:?}")))
    }

    pub fn checkpoint_dir(&self) -> PathBuf {
        self.checkpoint_dir.clone().unwrap_or_else(|| {
            let stem = self.out_csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            self.out_csv.with_file_name(format!("{stem}_checkpoints"))
        })
    }
}
