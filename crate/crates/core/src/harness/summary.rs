//! Mean best-fitness curves with standard-error bands.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::records::RunRecord;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub arm: String,
    pub generation: usize,
    /// Completed runs contributing to this point.
    pub runs: usize,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(runs)`; 0 for a single run.
    pub stderr: f64,
}

pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Per arm (in order of first appearance) and generation, the mean and
/// standard error of `best_total` over complete runs. A run is complete when
/// it has exactly one record for every generation from 1 to the arm's last.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<CurveSummary>> {
    let mut arms: Vec<&str> = Vec::new();
    let mut runs: BTreeMap<(&str, usize), BTreeMap<usize, f64>> = BTreeMap::new();
    for r in records {
        if !arms.contains(&r.arm.as_str()) {
            arms.push(&r.arm);
        }
        let run = runs.entry((&r.arm, r.run)).or_default();
        if run.insert(r.generation, r.best_total).is_some() {
            return Err(Error::Contract(format!("duplicate record for {} run {} generation {}", r.arm, r.run, r.generation)));
        }
    }

    let mut out = Vec::new();
    for arm in arms {
        let arm_runs: Vec<&BTreeMap<usize, f64>> =
            runs.iter().filter(|((a, _), _)| *a == arm).map(|(_, gens)| gens).collect();
        let last = arm_runs.iter().filter_map(|g| g.keys().next_back().copied()).max().unwrap_or(0);
        let complete: Vec<_> = arm_runs.into_iter().filter(|g| g.len() == last && g.keys().copied().eq(1..=last)).collect();
        if complete.is_empty() {
            continue;
        }
        for generation in 1..=last {
            let values: Vec<f64> = complete.iter().map(|g| g[&generation]).collect();
            let (mean, stderr) = mean_and_stderr(&values);
            out.push(CurveSummary { arm: arm.to_string(), generation, runs: values.len(), mean, stderr });
        }
    }
    if out.is_empty() {
        return Err(Error::Contract("no complete runs to summarize".into()));
    }
    Ok(out)
}

/// The summary point of `arm` at `generation`, if present.
pub fn point<'a>(summaries: &'a [CurveSummary], arm: &str, generation: usize) -> Option<&'a CurveSummary> {
    summaries.iter().find(|s| s.arm == arm && s.generation == generation)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(arm: &str, run: usize, generation: usize, best: f64) -> RunRecord {
        RunRecord {
            arm: arm.into(),
            run,
            generation,
            best_total: best,
            mean_total: 0.0,
            best_cartpole: 0.0,
            best_classification: 0.0,
        }
    }

    #[test]
    fn two_runs_hand_formula() {
        let s = summarize(&[rec("a", 0, 1, 900.0), rec("a", 1, 1, 1100.0)]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].mean, 1000.0);
        // s = sqrt(2 * 100^2 / 1) = 141.42..., stderr = s / sqrt(2) = 100.
        assert!((s[0].stderr - 100.0).abs() < 1e-9);
    }

    #[test]
    fn single_run_has_zero_stderr() {
        let s = summarize(&[rec("a", 0, 1, 700.0), rec("a", 0, 2, 750.0)]).unwrap();
        assert!(s.iter().all(|p| p.stderr == 0.0 && p.runs == 1));
        assert_eq!(point(&s, "a", 2).unwrap().mean, 750.0);
    }

    #[test]
    fn constant_values_have_zero_stderr() {
        let recs: Vec<_> = (0..5).map(|r| rec("a", r, 1, 812.5)).collect();
        assert_eq!(summarize(&recs).unwrap()[0].stderr, 0.0);
    }

    #[test]
    fn incomplete_runs_are_ignored() {
        let recs = vec![rec("a", 0, 1, 1.0), rec("a", 0, 2, 3.0), rec("a", 1, 1, 100.0)];
        let s = summarize(&recs).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|p| p.runs == 1));
        assert_eq!(s[0].mean, 1.0);
    }

    #[test]
    fn arms_keep_first_appearance_order() {
        let recs = vec![rec("z", 0, 1, 1.0), rec("a", 0, 1, 2.0), rec("z", 1, 1, 3.0)];
        let s = summarize(&recs).unwrap();
        assert_eq!(s.iter().map(|p| p.arm.as_str()).collect::<Vec<_>>(), ["z", "a"]);
        assert_eq!(s[0].mean, 2.0);
    }

    #[test]
    fn empty_and_duplicate_inputs_are_contract_errors() {
        assert!(matches!(summarize(&[]), Err(Error::Contract(_))));
        assert!(matches!(summarize(&[rec("a", 0, 1, 1.0), rec("a", 0, 1, 2.0)]), Err(Error::Contract(_))));
    }
}
