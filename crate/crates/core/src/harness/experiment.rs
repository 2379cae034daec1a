//! Multi-arm, multi-run experiment runner with a resumable CSV sink.

use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::cgp::Genotype;
use crate::error::{Error, Result};
use crate::evolution::run_evolution_with;
use crate::tasks::FitnessReport;

use super::config::ExperimentConfig;
use super::records::{read_csv, write_csv, write_records, RunRecord};

#[derive(Serialize)]
struct Checkpoint<'a> {
    arm: &'a str,
    run: usize,
    generation: usize,
    fitness: FitnessReport,
    genotype: &'a Genotype,
}

fn arm_index(config: &ExperimentConfig, arm: &str) -> Result<usize> {
    config
        .arms
        .iter()
        .position(|a| a.name == arm)
        .ok_or_else(|| Error::Config(format!("output holds records of arm {arm:?}, which is not in the config")))
}

/// Canonical order: arm as listed in the config, then run, then generation.
fn sort_canonical(config: &ExperimentConfig, records: &mut [RunRecord]) -> Result<()> {
    let mut keyed = Vec::with_capacity(records.len());
    for r in records.iter() {
        keyed.push((arm_index(config, &r.arm)?, r.run, r.generation));
    }
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by_key(|&i| keyed[i]);
    let sorted: Vec<RunRecord> = order.iter().map(|&i| records[i].clone()).collect();
    records.clone_from_slice(&sorted);
    Ok(())
}

type RunKey = (usize, usize);

/// Keep only the records of (arm, run) pairs that hold exactly generations
/// 1..=G once each.
fn complete_runs(config: &ExperimentConfig, records: Vec<RunRecord>) -> Result<(Vec<RunRecord>, HashSet<RunKey>)> {
    let mut by_run: BTreeMap<RunKey, Vec<RunRecord>> = BTreeMap::new();
    for r in records {
        let arm = arm_index(config, &r.arm)?;
        if r.run >= config.runs {
            return Err(Error::Config(format!("output holds run {} of arm {:?}; config has {} runs", r.run, r.arm, config.runs)));
        }
        by_run.entry((arm, r.run)).or_default().push(r);
    }
    let mut kept = Vec::new();
    let mut done = HashSet::new();
    for (key, mut recs) in by_run {
        recs.sort_by_key(|r| r.generation);
        if recs.iter().map(|r| r.generation).eq(1..=config.generations) {
            done.insert(key);
            kept.extend(recs);
        }
    }
    Ok((kept, done))
}

fn rewrite(path: &Path, records: &[RunRecord]) -> Result<()> {
    let tmp = path.with_extension("csv.tmp");
    let mut buf = Vec::new();
    write_csv(&mut buf, records)?;
    std::fs::write(&tmp, buf).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    run_experiment_with(config, |_| {})
}

/// Run every (arm, run) pair missing from `config.out_csv` and return all
/// records in canonical order.
///
/// Each finished run is appended to the CSV as one batch, and `on_run` sees
/// its records. Complete runs already in the file are skipped and partial
/// ones are discarded, so an interrupted experiment resumes where it stopped.
/// When all runs are done the file is rewritten in canonical order, which
/// makes the output independent of scheduling and of interruptions.
pub fn run_experiment_with<F>(config: &ExperimentConfig, on_run: F) -> Result<Vec<RunRecord>>
where
    F: Fn(&[RunRecord]) + Sync,
{
    config.validate()?;
    let dataset = config.load_dataset()?;
    let evaluators = config
        .arms
        .iter()
        .map(|arm| config.evaluator(arm, dataset.clone()))
        .collect::<Result<Vec<_>>>()?;

    let out = config.out_csv.as_path();
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let existing = match File::open(out) {
        Ok(f) => read_csv(std::io::BufReader::new(f), out, true)?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(Error::io(out, e)),
    };
    let (mut kept, done) = complete_runs(config, existing)?;
    sort_canonical(config, &mut kept)?;
    rewrite(out, &kept)?;
    let sink = Mutex::new(OpenOptions::new().append(true).open(out).map_err(|e| Error::io(out, e))?);

    let checkpoint_dir = config.checkpoint_dir();
    if config.checkpoint_every > 0 {
        std::fs::create_dir_all(&checkpoint_dir).map_err(|e| Error::io(&checkpoint_dir, e))?;
    }

    let pending: Vec<RunKey> = (0..config.arms.len())
        .flat_map(|a| (0..config.runs).map(move |r| (a, r)))
        .filter(|key| !done.contains(key))
        .collect();
    let workers = config.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;

    pool.install(|| {
        pending.par_iter().try_for_each(|&(a, run)| {
            let arm = &config.arms[a].name;
            let evo = config.evolution_config(run);
            let outcome = run_evolution_with(&evo, &evaluators[a], |record, pop| {
                if config.checkpoint_every == 0 || record.generation % config.checkpoint_every != 0 {
                    return Ok(());
                }
                let elite = &pop.individuals[pop.elite_index()?];
                let cp = Checkpoint {
                    arm,
                    run,
                    generation: record.generation,
                    fitness: record.stats.best,
                    genotype: &elite.genotype,
                };
                let path = checkpoint_dir.join(format!("{arm}_run{run}_gen{}.json", record.generation));
                std::fs::write(&path, serde_json::to_string_pretty(&cp)?).map_err(|e| Error::io(&path, e))
            })?;
            let records: Vec<RunRecord> =
                outcome.records.iter().map(|g| RunRecord::from_generation(arm, run, g)).collect();
            let mut buf = Vec::new();
            write_records(&mut buf, &records)?;
            {
                let mut file = sink.lock().unwrap_or_else(|p| p.into_inner());
                file.write_all(&buf).and_then(|_| file.flush()).map_err(|e| Error::io(out, e))?;
            }
            on_run(&records);
            Ok::<(), Error>(())
        })
    })?;
    drop(sink);

    let file = File::open(out).map_err(|e| Error::io(out, e))?;
    let mut all = read_csv(std::io::BufReader::new(file), out, false)?;
    sort_canonical(config, &mut all)?;
    rewrite(out, &all)?;
    Ok(all)
}
