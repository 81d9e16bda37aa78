//! K-fold cross-validation with pooled-score threshold calibration.

use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::calibrate::{calibrate_threshold_with_step, DEFAULT_GRID_STEP};
use super::metrics::{confusion_at, pr_curve, roc_auc, ConfusionCounts, PrPoint};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::forest::{class_weights, fit_trees, Execution, TrainConfig};

/// Partitions redrawn when a training split lacks one of the classes.
pub const MAX_PARTITION_ATTEMPTS: usize = 32;

fn partition_with_stream(n: usize, k: usize, seed: u64, stream: u64) -> Result<Vec<Vec<usize>>> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "cannot split {n} rows into {k} folds"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    // The first k - n%k folds get floor(n/k) rows, the rest one more.
    let small = n / k;
    let n_large = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = if f < k - n_large { small } else { small + 1 };
        let mut fold = idx[start..start + size].to_vec();
        fold.sort_unstable();
        folds.push(fold);
        start += size;
    }
    Ok(folds)
}

/// Random disjoint cover of `0..n` by `k` folds whose sizes differ by at
/// most one.
pub fn kfold_partition(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    partition_with_stream(n, k, seed, 0)
}

/// Held-out scores from every fold, in dataset row order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledScores {
    pub scores: Vec<f64>,
    pub labels: Vec<bool>,
    pub fold_sizes: Vec<usize>,
    pub partition_attempts: usize,
}

fn fold_seed(seed: u64, fold: usize) -> u64 {
    seed ^ (fold as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Train on k-1 folds and score the held-out fold, for every fold.
pub fn cross_validate_scores(
    dataset: &Dataset,
    config: &TrainConfig,
    k: usize,
    seed: u64,
) -> Result<PooledScores> {
    cross_validate_scores_with(dataset, config, k, seed, Execution::Parallel)
}

pub fn cross_validate_scores_with(
    dataset: &Dataset,
    config: &TrainConfig,
    k: usize,
    seed: u64,
    exec: Execution,
) -> Result<PooledScores> {
    for (r, _) in &dataset.records {
        r.require_label()?;
    }
    let n = dataset.len();
    let labels = dataset.labels();
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 folds, got {k}"
        )));
    }
    class_weights(&labels)?;

    let mut chosen = None;
    for attempt in 0..MAX_PARTITION_ATTEMPTS {
        let folds = partition_with_stream(n, k, seed, attempt as u64)?;
        let ok = folds.iter().all(|fold| {
            let held_pos = fold.iter().filter(|&&i| labels[i]).count();
            let total_pos = labels.iter().filter(|&&y| y).count();
            let train_pos = total_pos - held_pos;
            let train_neg = (n - fold.len()) - train_pos;
            train_pos > 0 && train_neg > 0
        });
        if ok {
            chosen = Some((attempt + 1, folds));
            break;
        }
    }
    let (attempts, folds) = chosen.ok_or(Error::PartitionRetries(MAX_PARTITION_ATTEMPTS))?;

    let matrix = dataset.matrix();
    let mut scores = vec![0.0; n];
    let mut held_out = vec![false; n];
    for (f, fold) in folds.iter().enumerate() {
        for &i in fold {
            held_out[i] = true;
        }
        let train_rows: Vec<usize> = (0..n).filter(|&i| !held_out[i]).collect();
        for &i in fold {
            held_out[i] = false;
        }
        let fold_config = TrainConfig {
            seed: fold_seed(config.seed, f),
            ..config.clone()
        };
        let ensemble = fit_trees(&matrix, &labels, &train_rows, &fold_config, exec)?;
        for &i in fold {
            scores[i] = ensemble.score_row(matrix.row(i));
        }
    }
    Ok(PooledScores {
        scores,
        labels,
        fold_sizes: folds.iter().map(Vec::len).collect(),
        partition_attempts: attempts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdChoice {
    /// Equalise false-negative and false-positive rates on the pooled scores.
    Calibrated {
        grid_step: f64,
    },
    Fixed(f64),
}

impl Default for ThresholdChoice {
    fn default() -> Self {
        ThresholdChoice::Calibrated {
            grid_step: DEFAULT_GRID_STEP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub accuracy: f64,
    pub precision_dys: f64,
    pub recall_dys: f64,
    pub precision_nodys: f64,
    pub recall_nodys: f64,
}

impl ClassMetrics {
    fn from_counts(c: &ConfusionCounts) -> ClassMetrics {
        ClassMetrics {
            accuracy: c.accuracy(),
            precision_dys: c.precision_pos(),
            recall_dys: c.recall_pos(),
            precision_nodys: c.precision_neg(),
            recall_nodys: c.recall_neg(),
        }
    }
}

/// Cross-validated performance at one operating point.
///
/// `weighted` uses inverse class-frequency weights, so its accuracy is the
/// balanced accuracy; `raw` counts every participant once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub n: usize,
    pub n_dyslexia: usize,
    pub fold_count: usize,
    pub fold_sizes: Vec<usize>,
    pub chosen_threshold: f64,
    pub threshold_calibrated: bool,
    pub balanced_accuracy: f64,
    pub roc_auc: f64,
    pub weighted: ClassMetrics,
    pub raw: ClassMetrics,
    /// Raw accuracy of always predicting the majority class.
    pub trivial_accuracy: f64,
    pub confusion: ConfusionCounts,
    pub pr_curve: Vec<PrPoint>,
}

pub fn evaluate_pooled(pooled: &PooledScores, choice: ThresholdChoice) -> Result<EvaluationReport> {
    let labels = &pooled.labels;
    let weights = class_weights(labels)?.expand(labels);
    let threshold = match choice {
        ThresholdChoice::Calibrated { grid_step } => {
            calibrate_threshold_with_step(&pooled.scores, labels, &weights, grid_step)?.threshold
        }
        ThresholdChoice::Fixed(t) => t,
    };
    let confusion = confusion_at(&pooled.scores, labels, &weights, threshold)?;
    let weighted = ClassMetrics::from_counts(&confusion);
    let raw = ClassMetrics::from_counts(&confusion.unweighted());
    let n = labels.len();
    let n_dys = labels.iter().filter(|&&y| y).count();
    Ok(EvaluationReport {
        n,
        n_dyslexia: n_dys,
        fold_count: pooled.fold_sizes.len(),
        fold_sizes: pooled.fold_sizes.clone(),
        chosen_threshold: threshold,
        threshold_calibrated: matches!(choice, ThresholdChoice::Calibrated { .. }),
        balanced_accuracy: weighted.accuracy,
        roc_auc: roc_auc(&pooled.scores, labels, &weights)?,
        weighted,
        raw,
        trivial_accuracy: n_dys.max(n - n_dys) as f64 / n as f64,
        confusion,
        pr_curve: pr_curve(&pooled.scores, labels, &weights)?,
    })
}

/// K-fold cross-validation with the threshold calibrated on pooled
/// held-out scores.
pub fn cross_validate(
    dataset: &Dataset,
    config: &TrainConfig,
    k: usize,
    seed: u64,
) -> Result<EvaluationReport> {
    let pooled = cross_validate_scores(dataset, config, k, seed)?;
    evaluate_pooled(&pooled, ThresholdChoice::default())
}

impl EvaluationReport {
    /// PR curve as CSV: `threshold,precision,recall`.
    pub fn pr_curve_csv(&self) -> String {
        let mut out = String::from("threshold,precision,recall\n");
        for p in &self.pr_curve {
            let _ = writeln!(out, "{},{},{}", p.threshold, p.precision, p.recall);
        }
        out
    }
}

impl fmt::Display for EvaluationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pct = |x: f64| 100.0 * x;
        writeln!(
            f,
            "participants {}  dyslexia {} ({:.1}%)  folds {} {:?}",
            self.n,
            self.n_dyslexia,
            pct(self.n_dyslexia as f64 / self.n as f64),
            self.fold_count,
            self.fold_sizes
        )?;
        writeln!(
            f,
            "threshold {:.4} ({})",
            self.chosen_threshold,
            if self.threshold_calibrated {
                "calibrated"
            } else {
                "fixed"
            }
        )?;
        writeln!(
            f,
            "{:<10} {:>9} {:>9} {:>9} {:>9} {:>9}",
            "", "accuracy", "prec dys", "rec dys", "prec non", "rec non"
        )?;
        for (name, m) in [("weighted", &self.weighted), ("raw", &self.raw)] {
            writeln!(
                f,
                "{:<10} {:>9.1} {:>9.1} {:>9.1} {:>9.1} {:>9.1}",
                name,
                pct(m.accuracy),
                pct(m.precision_dys),
                pct(m.recall_dys),
                pct(m.precision_nodys),
                pct(m.recall_nodys)
            )?;
        }
        writeln!(f, "ROC AUC {:.3}", self.roc_auc)?;
        write!(
            f,
            "majority-class raw accuracy {:.1}",
            pct(self.trivial_accuracy)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn study_fold_sizes() {
        let folds = kfold_partition(3644, 10, 7).unwrap();
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        assert_eq!(sizes.iter().filter(|&&s| s == 364).count(), 6);
        assert_eq!(sizes.iter().filter(|&&s| s == 365).count(), 4);
    }

    #[test]
    fn singletons_and_cover() {
        let folds = kfold_partition(10, 10, 1).unwrap();
        assert!(folds.iter().all(|f| f.len() == 1));
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        assert!(kfold_partition(3, 4, 1).is_err());
    }

    #[test]
    fn seed_changes_partition() {
        assert_ne!(
            kfold_partition(50, 5, 1).unwrap(),
            kfold_partition(50, 5, 2).unwrap()
        );
        assert_eq!(
            kfold_partition(50, 5, 1).unwrap(),
            kfold_partition(50, 5, 1).unwrap()
        );
    }
}
