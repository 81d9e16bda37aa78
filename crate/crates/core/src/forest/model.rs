use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::tree::{build_tree, DecisionTree, TreeParams};
use crate::dataset::{Dataset, FeatureMatrix};
use crate::error::{Error, Result};
use crate::participant::Label;
use crate::variant::AgeVariant;

/// Per-instance weights that give each class half of the total mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassWeights {
    pub dyslexia: f64,
    pub no_dyslexia: f64,
}

impl ClassWeights {
    pub fn of(&self, positive: bool) -> f64 {
        if positive {
            self.dyslexia
        } else {
            self.no_dyslexia
        }
    }

    /// Instance weight for every label.
    pub fn expand(&self, labels: &[bool]) -> Vec<f64> {
        labels.iter().map(|&y| self.of(y)).collect()
    }
}

/// `w_c = N / (2 N_c)` for each class `c`.
pub fn class_weights(labels: &[bool]) -> Result<ClassWeights> {
    let n = labels.len();
    let n_pos = labels.iter().filter(|&&y| y).count();
    let n_neg = n - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    Ok(ClassWeights {
        dyslexia: n as f64 / (2.0 * n_pos as f64),
        no_dyslexia: n as f64 / (2.0 * n_neg as f64),
    })
}

/// How trees are scheduled. Both produce identical models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Serial,
}

/// Random stream owned by tree `index` of a forest trained with `seed`.
pub fn tree_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Draw `n` rows uniformly with replacement; returns `(position, multiplicity)`
/// pairs in ascending position order.
pub fn bootstrap<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<(usize, u32)> {
    let mut counts = vec![0u32; n];
    for _ in 0..n {
        counts[rng.gen_range(0..n)] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub variant: AgeVariant,
    pub trees: Vec<DecisionTree>,
    /// Scores at or above this are flagged as dyslexia risk.
    pub threshold: f64,
    pub config: TrainConfig,
    pub class_weights: ClassWeights,
}

/// Trained trees before they are attached to a variant and a threshold.
#[derive(Debug, Clone)]
pub struct TreeEnsemble {
    pub trees: Vec<DecisionTree>,
    pub config: TrainConfig,
    pub class_weights: ClassWeights,
}

impl TreeEnsemble {
    #[inline]
    pub fn score_row(&self, row: &[f64]) -> f64 {
        mean_leaf(&self.trees, row)
    }
}

#[inline]
fn mean_leaf(trees: &[DecisionTree], row: &[f64]) -> f64 {
    trees.iter().map(|t| t.predict(row)).sum::<f64>() / trees.len() as f64
}

/// Train on the rows `train_rows` of `matrix`.
///
/// Class weights are computed over `train_rows`. Tree `i` draws its bootstrap
/// sample and its per-node feature subsets from [`tree_rng`]`(seed, i)`;
/// a row drawn `k` times enters the tree with weight `k * w_class`.
pub fn fit_trees(
    matrix: &FeatureMatrix,
    labels: &[bool],
    train_rows: &[usize],
    config: &TrainConfig,
    exec: Execution,
) -> Result<TreeEnsemble> {
    let n_features = matrix.n_cols();
    config.validate(n_features)?;
    let train_labels: Vec<bool> = train_rows.iter().map(|&r| labels[r]).collect();
    let weights = class_weights(&train_labels)?;
    let params = TreeParams {
        max_depth: config.max_depth,
        mtry: config.resolved_mtry(n_features),
        min_node_weight: config
            .min_node_weight
            .unwrap_or_else(|| weights.dyslexia.min(weights.no_dyslexia)),
    };

    let grow = |i: usize| {
        let mut rng = tree_rng(config.seed, i);
        let sample = bootstrap(train_rows.len(), &mut rng);
        let rows: Vec<usize> = sample.iter().map(|&(p, _)| train_rows[p]).collect();
        let w: Vec<f64> = sample
            .iter()
            .map(|&(p, k)| f64::from(k) * weights.of(labels[train_rows[p]]))
            .collect();
        build_tree(matrix, labels, &rows, &w, &params, &mut rng)
    };
    let trees: Vec<DecisionTree> = match exec {
        Execution::Parallel => (0..config.n_trees).into_par_iter().map(grow).collect(),
        Execution::Serial => (0..config.n_trees).map(grow).collect(),
    };

    let mut resolved = config.clone();
    resolved.mtry = Some(params.mtry);
    Ok(TreeEnsemble {
        trees,
        config: resolved,
        class_weights: weights,
    })
}

pub fn train(dataset: &Dataset, config: &TrainConfig) -> Result<ForestModel> {
    train_with(dataset, config, Execution::Parallel)
}

pub fn train_with(dataset: &Dataset, config: &TrainConfig, exec: Execution) -> Result<ForestModel> {
    for (r, _) in &dataset.records {
        r.require_label()?;
    }
    let matrix = dataset.matrix();
    let labels = dataset.labels();
    let all: Vec<usize> = (0..dataset.len()).collect();
    let ensemble = fit_trees(&matrix, &labels, &all, config, exec)?;
    Ok(ForestModel {
        variant: dataset.variant,
        trees: ensemble.trees,
        threshold: 0.5,
        config: ensemble.config,
        class_weights: ensemble.class_weights,
    })
}

impl ForestModel {
    /// Mean positive leaf fraction over all trees.
    pub fn predict_score(&self, values: &[f64]) -> Result<f64> {
        let expected = self.variant.feature_count();
        if values.len() != expected {
            return Err(Error::VectorLength {
                expected,
                found: values.len(),
            });
        }
        Ok(mean_leaf(&self.trees, values))
    }

    pub fn classify(&self, values: &[f64]) -> Result<Label> {
        let score = self.predict_score(values)?;
        Ok(Label::from_positive(score >= self.threshold))
    }

    pub fn with_threshold(mut self, threshold: f64) -> Result<ForestModel> {
        check_threshold(threshold)?;
        self.threshold = threshold;
        Ok(self)
    }
}

pub fn check_threshold(threshold: f64) -> Result<()> {
    if threshold > 0.0 && threshold < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "threshold {threshold} must lie strictly between 0 and 1"
        )))
    }
}
