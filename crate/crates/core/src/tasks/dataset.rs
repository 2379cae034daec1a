//! Binary classification data: CSV loading, per-column min-max scaling into
//! [-1, 1], and accuracy evaluation.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::brain::{TaskId, WiredNetwork};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    n_features: usize,
    /// Row-major normalized features.
    features: Vec<f64>,
    labels: Vec<u8>,
    /// Raw (min, max) per column, as used for normalization.
    bounds: Vec<(f64, f64)>,
}

impl Dataset {
    /// Normalize raw rows column-wise into [-1, 1]. A constant column maps to 0.
    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<u8>) -> Result<Dataset> {
        if rows.is_empty() {
            return Err(Error::Config("dataset has no rows".into()));
        }
        if rows.len() != labels.len() {
            return Err(Error::Config(format!("{} rows but {} labels", rows.len(), labels.len())));
        }
        if let Some(bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::Config(format!("label {bad} is not 0 or 1")));
        }
        let n_features = rows[0].len();
        if n_features == 0 || rows.iter().any(|r| r.len() != n_features) {
            return Err(Error::Config("rows must all have the same non-zero feature count".into()));
        }
        let bounds: Vec<(f64, f64)> = (0..n_features)
            .map(|c| {
                rows.iter()
                    .map(|r| r[c])
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
            })
            .collect();
        let features = rows
            .iter()
            .flat_map(|r| r.iter().zip(&bounds).map(|(&v, &(lo, hi))| scale(v, lo, hi)))
            .collect();
        Ok(Dataset { n_features, features, labels, bounds })
    }

    /// Read `f1,...,fn,label` lines. A first line whose leading field is not
    /// numeric is treated as a header and skipped.
    pub fn load(path: impl AsRef<Path>) -> Result<Dataset> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let load_err = |line: usize, msg: String| Error::Load { path: path.to_path_buf(), line, msg };

        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut width = None;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if rows.is_empty() && width.is_none() && fields[0].parse::<f64>().is_err() {
                width = Some(fields.len());
                continue;
            }
            if fields.len() < 2 {
                return Err(load_err(line_no, format!("expected features and a label, found {} field(s)", fields.len())));
            }
            match width {
                Some(w) if w != fields.len() => {
                    return Err(load_err(line_no, format!("expected {w} fields, found {}", fields.len())));
                }
                _ => width = Some(fields.len()),
            }
            let (label, feats) = fields.split_last().expect("at least two fields");
            let row = feats
                .iter()
                .map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| load_err(line_no, format!("non-numeric feature in {line:?}")))?;
            let label = match *label {
                "0" => 0,
                "1" => 1,
                other => {
                    let v: f64 = other
                        .parse()
                        .map_err(|_| load_err(line_no, format!("label {other:?} is not numeric")))?;
                    if v == 0.0 {
                        0
                    } else if v == 1.0 {
                        1
                    } else {
                        return Err(load_err(line_no, format!("label {other} is not 0 or 1")));
                    }
                }
            };
            rows.push(row);
            labels.push(label);
        }
        if rows.is_empty() {
            return Err(load_err(0, "no data rows".into()));
        }
        Dataset::from_rows(&rows, labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[f64], u8)> {
        self.features.chunks_exact(self.n_features).zip(self.labels.iter().copied())
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn class_count(&self, label: u8) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Classification fitness of a constant predictor of the larger class.
    pub fn majority_score(&self) -> f64 {
        let majority = self.class_count(0).max(self.class_count(1));
        1000.0 * majority as f64 / self.len() as f64
    }
}

fn scale(v: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        (2.0 * (v - lo) / (hi - lo) - 1.0).clamp(-1.0, 1.0)
    } else {
        0.0
    }
}

/// Predict class 1 iff the output is >= 0. Returns `(correct, total)`.
pub fn evaluate_classification(network: &WiredNetwork, task: TaskId, data: &Dataset) -> Result<(usize, usize)> {
    let mut values = Vec::new();
    let mut out = [0.0];
    let mut correct = 0;
    for (row, label) in data.rows() {
        network.evaluate_into(task, row, &mut values, &mut out)?;
        let predicted = u8::from(out[0] >= 0.0);
        correct += usize::from(predicted == label);
    }
    Ok((correct, data.len()))
}

/// Per-class Gaussian moments of the four wavelet features (variance,
/// skewness, curtosis, entropy) of the banknote-authentication images.
const SURROGATE_CLASSES: [(usize, [(f64, f64); 4]); 2] = [
    (762, [(2.28, 2.02), (4.26, 5.14), (0.80, 3.24), (-1.15, 2.13)]),
    (610, [(-1.87, 1.88), (-0.99, 5.40), (2.15, 5.26), (-1.25, 2.07)]),
];

/// Synthetic stand-in for the banknote-authentication table: 1372 rows,
/// 762 of class 0 and 610 of class 1, features drawn from per-class normals
/// with the published class means and spreads. Rows are interleaved by a
/// seeded shuffle.
pub fn surrogate_banknote<R: Rng + ?Sized>(rng: &mut R) -> (Vec<Vec<f64>>, Vec<u8>) {
    let mut rows = Vec::new();
    for (label, &(count, moments)) in SURROGATE_CLASSES.iter().enumerate() {
        let dists: Vec<Normal<f64>> =
            moments.iter().map(|&(m, s)| Normal::new(m, s).expect("positive spread")).collect();
        for _ in 0..count {
            let feats: Vec<f64> = dists.iter().map(|d| (d.sample(rng) * 1e5).round() / 1e5).collect();
            rows.push((feats, label as u8));
        }
    }
    for i in (1..rows.len()).rev() {
        let j = rng.gen_range(0..=i);
        rows.swap(i, j);
    }
    rows.into_iter().unzip()
}

/// Seed of the surrogate table used when no dataset file is configured.
pub const SURROGATE_SEED: u64 = 1;

/// The surrogate table drawn with [`SURROGATE_SEED`], normalized.
pub fn surrogate_dataset() -> Dataset {
    let (rows, labels) = surrogate_banknote(&mut crate::rng::from_seed(SURROGATE_SEED));
    Dataset::from_rows(&rows, labels).expect("surrogate rows are well formed")
}

/// Write rows as headerless `f1,...,fn,label` lines.
pub fn write_csv<W: Write>(mut w: W, rows: &[Vec<f64>], labels: &[u8]) -> std::io::Result<()> {
    for (row, label) in rows.iter().zip(labels) {
        let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{},{}", fields.join(","), label)?;
    }
    Ok(())
}
