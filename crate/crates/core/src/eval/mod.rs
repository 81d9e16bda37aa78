//! Evaluation harness: cross-validation, metrics, threshold calibration,
//! feature importance, hyperparameter sweeps and synthetic data.

mod calibrate;
mod cv;
mod importance;
mod metrics;
mod sweep;
mod synth;

pub use calibrate::{
    calibrate_threshold, calibrate_threshold_with_step, candidate_thresholds, Calibration,
    DEFAULT_GRID_STEP,
};
pub use cv::{
    cross_validate, cross_validate_scores, cross_validate_scores_with, evaluate_pooled,
    kfold_partition, ClassMetrics, EvaluationReport, PooledScores, ThresholdChoice,
    MAX_PARTITION_ATTEMPTS,
};
pub use importance::{
    entropy, feature_gains, info_gain, info_gain_values, question_importance, ranked,
    type_importance, GroupImportance, ImportanceGroup,
};
pub use metrics::{confusion_at, pr_curve, roc_auc, ConfusionCounts, PrPoint, RawCounts};
pub use sweep::{sweep, SweepCell};
pub use synth::{positive_count, synth_generate};

use crate::error::{Error, Result};

/// Share of the whole population expected to be at risk when `flag_rate`
/// of test takers are flagged and `take_rate` of the population takes the
/// test.
pub fn estimate_prevalence(flag_rate: f64, take_rate: f64) -> Result<f64> {
    for (name, r) in [("flag rate", flag_rate), ("take rate", take_rate)] {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidArgument(format!(
                "{name} {r} must lie in [0, 1]"
            )));
        }
    }
    Ok(flag_rate * take_rate)
}
