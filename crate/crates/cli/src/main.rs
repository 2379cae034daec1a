use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use devann_core::cgp::Genotype;
use devann_core::evolution::run_evolution_with;
use devann_core::harness::{self, ExperimentConfig};
use devann_core::rng;
use devann_core::tasks::dataset;

#[derive(Parser)]
#[command(name = "devann", version, about = "Evolve developmental neural networks with activity dependence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one evolutionary run and print the final best fitness as JSON.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        /// Arm to run; defaults to the first arm in the config.
        #[arg(long)]
        arm: Option<String>,
        /// Run index; the run uses seed + run.
        #[arg(long, default_value_t = 0)]
        run: usize,
        /// Write the champion genotype here.
        #[arg(long)]
        genotype_out: Option<PathBuf>,
    },
    /// Run every arm and run of the config, appending records to its out_csv.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Also render the summary curves as SVG.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Render mean best-fitness curves from a records CSV.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Grow one brain and write its soma/dendrite snapshot as JSON.
    DumpBrain {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Genotype JSON, or a checkpoint file holding one. Without it a
        /// random genotype is drawn from the config seed.
        #[arg(long)]
        genotype: Option<PathBuf>,
    },
    /// Write the built-in surrogate classification table as CSV.
    MakeSurrogate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = dataset::SURROGATE_SEED)]
        seed: u64,
    },
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
    if let Ok(seed) = std::env::var("DEVANN_SEED") {
        config.seed = seed.trim().parse().with_context(|| format!("DEVANN_SEED={seed:?} is not an unsigned integer"))?;
    }
    Ok(config)
}

fn read_genotype(path: &Path) -> Result<Genotype> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)?;
    if let Some(inner) = value.get_mut("genotype") {
        value = inner.take();
    }
    serde_json::from_value(value).with_context(|| format!("{} holds no valid genotype", path.display()))
}

fn evolve(config: &Path, arm: Option<String>, run: usize, genotype_out: Option<PathBuf>) -> Result<()> {
    let config = load_config(config)?;
    let arm = match arm {
        Some(name) => config.arm(&name)?.clone(),
        None => config.arms[0].clone(),
    };
    let evaluator = config.evaluator(&arm, config.load_dataset()?)?;
    let evo = config.evolution_config(run);
    let outcome = run_evolution_with(&evo, &evaluator, |record, _| {
        let b = record.stats.best;
        eprintln!(
            "gen {:>4}  best {:7.1}  cartpole {:6.1}  classification {:6.1}  mean {:7.1}",
            record.generation, b.total, b.cartpole, b.classification, record.stats.mean_total
        );
        Ok(())
    })?;
    let champion = outcome.champion()?;
    if let Some(path) = genotype_out {
        std::fs::write(&path, serde_json::to_string_pretty(&champion.genotype)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let report = champion.fitness.context("champion was not evaluated")?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn experiment(config: &Path, plot: Option<PathBuf>) -> Result<()> {
    let config = load_config(config)?;
    let records = harness::run_experiment_with(&config, |run| {
        if let Some(last) = run.last() {
            eprintln!("{} run {}: best {:.1} at generation {}", last.arm, last.run, last.best_total, last.generation);
        }
    })?;
    let summaries = harness::summarize(&records)?;
    for s in summaries.iter().filter(|s| s.generation == config.generations) {
        println!("{:<12} generation {}  mean best {:7.1}  se {:5.1}  runs {}", s.arm, s.generation, s.mean, s.stderr, s.runs);
    }
    if let Some(path) = plot {
        harness::render_plot(&summaries, &path)?;
    }
    Ok(())
}

fn dump_brain(config: &Path, out: &Path, genotype: Option<PathBuf>) -> Result<()> {
    let config = load_config(config)?;
    let genotype = match genotype {
        Some(path) => read_genotype(&path)?,
        None => Genotype::random(config.genome_length, &mut rng::stream(config.seed, &[0]))?,
    };
    let evaluator = config.evaluator(&config.arms[0], config.load_dataset()?)?;
    let brain = evaluator.grow(&genotype, &config.evolution_config(0).eval_seeds(0))?;
    std::fs::write(out, serde_json::to_string_pretty(&brain.snapshot())?)
        .with_context(|| format!("writing {}", out.display()))?;
    eprintln!("{} hidden somas, {} dendrites", brain.hidden_count(), brain.dendrite_count());
    Ok(())
}

fn make_surrogate(out: &Path, seed: u64) -> Result<()> {
    let (rows, labels) = dataset::surrogate_banknote(&mut rng::from_seed(seed));
    let mut buf = b"variance,skewness,curtosis,entropy,class\n".to_vec();
    dataset::write_csv(&mut buf, &rows, &labels)?;
    std::fs::write(out, buf).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evolve { config, arm, run, genotype_out } => evolve(&config, arm, run, genotype_out),
        Command::Experiment { config, plot } => experiment(&config, plot),
        Command::Plot { input, out } => {
            let records = harness::load_csv(&input)?;
            if records.is_empty() {
                bail!("{} holds no records", input.display());
            }
            harness::render_plot(&harness::summarize(&records)?, &out)?;
            Ok(())
        }
        Command::DumpBrain { config, out, genotype } => dump_brain(&config, &out, genotype),
        Command::MakeSurrogate { out, seed } => make_surrogate(&out, seed),
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
