//! Threshold metrics, ROC AUC and precision/recall curves over weighted
//! scores. A row is predicted positive when its score is `>= t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Weighted confusion masses with the unweighted counts alongside.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: f64,
    pub fp: f64,
    pub tn: f64,
    #[serde(rename = "fn")]
    pub fn_: f64,
    pub raw: RawCounts,
}

fn rate(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

impl ConfusionCounts {
    pub fn positive_mass(&self) -> f64 {
        self.tp + self.fn_
    }

    pub fn negative_mass(&self) -> f64 {
        self.tn + self.fp
    }

    pub fn recall_pos(&self) -> f64 {
        rate(self.tp, self.tp + self.fn_)
    }

    pub fn recall_neg(&self) -> f64 {
        rate(self.tn, self.tn + self.fp)
    }

    pub fn precision_pos(&self) -> f64 {
        rate(self.tp, self.tp + self.fp)
    }

    pub fn precision_neg(&self) -> f64 {
        rate(self.tn, self.tn + self.fn_)
    }

    pub fn fnr(&self) -> f64 {
        rate(self.fn_, self.tp + self.fn_)
    }

    pub fn fpr(&self) -> f64 {
        rate(self.fp, self.fp + self.tn)
    }

    pub fn accuracy(&self) -> f64 {
        rate(self.tp + self.tn, self.tp + self.tn + self.fp + self.fn_)
    }

    /// The same metrics computed on unweighted counts.
    pub fn unweighted(&self) -> ConfusionCounts {
        let r = self.raw;
        ConfusionCounts {
            tp: r.tp as f64,
            fp: r.fp as f64,
            tn: r.tn as f64,
            fn_: r.fn_ as f64,
            raw: r,
        }
    }
}

pub(crate) fn check_lengths(scores: &[f64], labels: &[bool], weights: &[f64]) -> Result<()> {
    if scores.len() != labels.len() || scores.len() != weights.len() {
        return Err(Error::InvalidArgument(format!(
            "{} scores, {} labels and {} weights",
            scores.len(),
            labels.len(),
            weights.len()
        )));
    }
    Ok(())
}

pub(crate) fn class_masses(labels: &[bool], weights: &[f64]) -> (f64, f64) {
    labels.iter().zip(weights).fold(
        (0.0, 0.0),
        |(p, n), (&y, &w)| {
            if y {
                (p + w, n)
            } else {
                (p, n + w)
            }
        },
    )
}

pub(crate) fn require_both_classes(labels: &[bool]) -> Result<()> {
    let pos = labels.iter().filter(|&&y| y).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::SingleClass);
    }
    Ok(())
}

pub fn confusion_at(
    scores: &[f64],
    labels: &[bool],
    weights: &[f64],
    t: f64,
) -> Result<ConfusionCounts> {
    check_lengths(scores, labels, weights)?;
    let mut c = ConfusionCounts::default();
    for ((&s, &y), &w) in scores.iter().zip(labels).zip(weights) {
        match (s >= t, y) {
            (true, true) => {
                c.tp += w;
                c.raw.tp += 1;
            }
            (true, false) => {
                c.fp += w;
                c.raw.fp += 1;
            }
            (false, false) => {
                c.tn += w;
                c.raw.tn += 1;
            }
            (false, true) => {
                c.fn_ += w;
                c.raw.fn_ += 1;
            }
        }
    }
    Ok(c)
}

/// Indices of `scores` in ascending score order.
pub(crate) fn ascending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    order
}

/// Weighted probability that a positive outscores a negative, counting ties
/// as one half.
pub fn roc_auc(scores: &[f64], labels: &[bool], weights: &[f64]) -> Result<f64> {
    check_lengths(scores, labels, weights)?;
    require_both_classes(labels)?;
    let order = ascending(scores);
    let (pos_total, neg_total) = class_masses(labels, weights);

    let mut neg_below = 0.0;
    let mut area = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (mut pos_here, mut neg_here) = (0.0, 0.0);
        while i < order.len() && scores[order[i]] == s {
            let r = order[i];
            if labels[r] {
                pos_here += weights[r];
            } else {
                neg_here += weights[r];
            }
            i += 1;
        }
        area += pos_here * (neg_below + 0.5 * neg_here);
        neg_below += neg_here;
    }
    // rounding can push a perfect ranking a hair past 1
    Ok((area / (pos_total * neg_total)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// One point per distinct score, thresholds ascending.
pub fn pr_curve(scores: &[f64], labels: &[bool], weights: &[f64]) -> Result<Vec<PrPoint>> {
    check_lengths(scores, labels, weights)?;
    require_both_classes(labels)?;
    let order = ascending(scores);

    // Walk from the highest score down, accumulating predicted positives.
    // Recall is divided by the mass summed in the same order, so the lowest
    // threshold reaches exactly 1.
    let mut points = Vec::new();
    let (mut tp, mut fp) = (0.0, 0.0);
    let mut i = order.len();
    while i > 0 {
        let s = scores[order[i - 1]];
        while i > 0 && scores[order[i - 1]] == s {
            let r = order[i - 1];
            if labels[r] {
                tp += weights[r];
            } else {
                fp += weights[r];
            }
            i -= 1;
        }
        points.push(PrPoint {
            threshold: s,
            precision: rate(tp, tp + fp),
            recall: tp,
        });
    }
    for p in &mut points {
        p.recall = rate(p.recall, tp);
    }
    points.reverse();
    Ok(points)
}
