//! Information-gain feature importance, aggregated by question and by
//! measure type.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::variant::{FeatureSlot, Measure};

/// Shannon entropy in bits of a two-class distribution.
pub fn entropy(pos: f64, neg: f64) -> f64 {
    let total = pos + neg;
    if total <= 0.0 {
        return 0.0;
    }
    [pos, neg]
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / total;
            -p * p.log2()
        })
        .sum()
}

/// `H(label)` minus the smallest conditional entropy over every binary
/// split `value <= cut` of one numeric column. Constant columns gain 0.
pub fn info_gain_values(values: &[f64], labels: &[bool]) -> Result<f64> {
    if values.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} values but {} labels",
            values.len(),
            labels.len()
        )));
    }
    let n = values.len() as f64;
    let total_pos = labels.iter().filter(|&&y| y).count() as f64;
    let total_neg = n - total_pos;
    let base = entropy(total_pos, total_neg);

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut best = base;
    let (mut pos, mut neg) = (0.0, 0.0);
    for w in 0..order.len().saturating_sub(1) {
        if labels[order[w]] {
            pos += 1.0;
        } else {
            neg += 1.0;
        }
        if values[order[w]] == values[order[w + 1]] {
            continue;
        }
        let left = pos + neg;
        let right = n - left;
        let cond =
            (left * entropy(pos, neg) + right * entropy(total_pos - pos, total_neg - neg)) / n;
        best = best.min(cond);
    }
    Ok((base - best).max(0.0))
}

pub fn info_gain(dataset: &Dataset, feature_index: usize) -> Result<f64> {
    let width = dataset.variant.feature_count();
    if feature_index >= width {
        return Err(Error::InvalidArgument(format!(
            "feature {feature_index} outside the {} layout of {width}",
            dataset.variant
        )));
    }
    for (r, _) in &dataset.records {
        r.require_label()?;
    }
    let column: Vec<f64> = dataset
        .records
        .iter()
        .map(|(_, f)| f.values[feature_index])
        .collect();
    info_gain_values(&column, &dataset.labels())
}

/// Gain of every feature column, in layout order.
pub fn feature_gains(dataset: &Dataset) -> Result<Vec<f64>> {
    (0..dataset.variant.feature_count())
        .map(|i| info_gain(dataset, i))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceGroup {
    Demographics,
    Question(u8),
    Measure(Measure),
}

impl fmt::Display for ImportanceGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImportanceGroup::Demographics => f.write_str("Demog."),
            ImportanceGroup::Question(q) => write!(f, "Q{q}"),
            ImportanceGroup::Measure(m) => f.write_str(m.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupImportance {
    pub group: ImportanceGroup,
    /// Mean gain of the group's features, in bits.
    pub mean_gain: f64,
    /// `mean_gain` scaled so the largest group is 100.
    pub relative: f64,
}

fn aggregate(groups: Vec<(ImportanceGroup, Vec<f64>)>) -> Vec<GroupImportance> {
    let means: Vec<(ImportanceGroup, f64)> = groups
        .into_iter()
        .map(|(g, gains)| (g, gains.iter().sum::<f64>() / gains.len() as f64))
        .collect();
    let top = means.iter().map(|&(_, m)| m).fold(0.0, f64::max);
    means
        .into_iter()
        .map(|(group, mean_gain)| GroupImportance {
            group,
            mean_gain,
            relative: if top > 0.0 {
                100.0 * mean_gain / top
            } else {
                0.0
            },
        })
        .collect()
}

/// Mean gain of each question's six measures, plus one group for the four
/// demographic features. Listed demographics first, then questions in order.
pub fn question_importance(dataset: &Dataset) -> Result<Vec<GroupImportance>> {
    let gains = feature_gains(dataset)?;
    let variant = dataset.variant;
    let mut groups = vec![(ImportanceGroup::Demographics, Vec::new())];
    groups.extend(
        variant
            .qids()
            .iter()
            .map(|&q| (ImportanceGroup::Question(q), Vec::new())),
    );
    for (i, &g) in gains.iter().enumerate() {
        let slot = variant.describe(i).expect("index within layout");
        let at = match slot {
            FeatureSlot::Demographic(_) => 0,
            FeatureSlot::Question { qid, .. } => {
                1 + variant
                    .qids()
                    .iter()
                    .position(|&q| q == qid)
                    .expect("variant qid")
            }
        };
        groups[at].1.push(g);
    }
    Ok(aggregate(groups))
}

/// Mean gain of each measure type across questions, plus demographics.
pub fn type_importance(dataset: &Dataset) -> Result<Vec<GroupImportance>> {
    let gains = feature_gains(dataset)?;
    let variant = dataset.variant;
    let mut groups = vec![(ImportanceGroup::Demographics, Vec::new())];
    groups.extend(
        Measure::ALL
            .iter()
            .map(|&m| (ImportanceGroup::Measure(m), Vec::new())),
    );
    for (i, &g) in gains.iter().enumerate() {
        let at = match variant.describe(i).expect("index within layout") {
            FeatureSlot::Demographic(_) => 0,
            FeatureSlot::Question { measure, .. } => 1 + measure as usize,
        };
        groups[at].1.push(g);
    }
    Ok(aggregate(groups))
}

/// Groups sorted by decreasing importance; ties keep their listed order.
pub fn ranked(mut groups: Vec<GroupImportance>) -> Vec<GroupImportance> {
    groups.sort_by(|a, b| b.mean_gain.total_cmp(&a.mean_gain));
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(1.0, 1.0), 1.0);
        assert_eq!(entropy(3.0, 0.0), 0.0);
        assert!((entropy(1.0, 3.0) - 0.811_278_124_459_132_8).abs() < 1e-12);
    }

    #[test]
    fn label_copy_gains_one_bit() {
        let labels = [true, false, true, false];
        let values = [1.0, 0.0, 1.0, 0.0];
        assert_eq!(info_gain_values(&values, &labels).unwrap(), 1.0);
        assert_eq!(info_gain_values(&[5.0; 4], &labels).unwrap(), 0.0);
    }

    #[test]
    fn eight_rows_by_hand() {
        // (left pos, left neg, right pos, right neg) for each cut between
        // distinct values
        let values = [1.0, 1.0, 2.0, 3.0, 3.0, 4.0, 5.0, 6.0];
        let labels = [true, true, false, false, false, false, true, false];
        let base = entropy(3.0, 5.0);
        let cuts = [
            (2.0, 0.0, 1.0, 5.0),
            (2.0, 1.0, 1.0, 4.0),
            (2.0, 3.0, 1.0, 2.0),
            (2.0, 4.0, 1.0, 1.0),
            (3.0, 4.0, 0.0, 1.0),
        ];
        let best = cuts
            .iter()
            .map(|&(lp, ln, rp, rn)| {
                ((lp + ln) * entropy(lp, ln) + (rp + rn) * entropy(rp, rn)) / 8.0
            })
            .fold(f64::INFINITY, f64::min);
        let got = info_gain_values(&values, &labels).unwrap();
        assert!((got - (base - best)).abs() < 1e-12, "{got}");
    }
}
