//! Operating-point selection that balances missed cases against false alarms.

use serde::{Deserialize, Serialize};

use super::metrics::{ascending, check_lengths, class_masses, require_both_classes};
use crate::error::{Error, Result};
use crate::forest::tree::midpoint;

pub const DEFAULT_GRID_STEP: f64 = 0.005;

const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub threshold: f64,
    pub fnr: f64,
    pub fpr: f64,
    /// `|fnr - fpr|` at `threshold`.
    pub gap: f64,
}

/// Candidate thresholds: the regular grid `step * i` strictly inside (0, 1)
/// plus every midpoint between adjacent distinct scores, ascending.
pub fn candidate_thresholds(scores: &[f64], step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold grid step {step} must lie in (0, 1)"
        )));
    }
    // For steps like 0.005 divide by the integer 200 so grid points are the
    // nearest doubles to their decimal values.
    let inverse = 1.0 / step;
    let divisor = inverse.round();
    let exact = (inverse - divisor).abs() < 1e-9;
    let mut out = Vec::new();
    let mut i = 1u32;
    loop {
        let t = if exact {
            f64::from(i) / divisor
        } else {
            f64::from(i) * step
        };
        if t >= 1.0 - TIE_EPS {
            break;
        }
        out.push(t);
        i += 1;
    }
    let mut sorted: Vec<f64> = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    out.extend(sorted.windows(2).map(|w| midpoint(w[0], w[1])));
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

/// Threshold minimising `|FNR(t) - FPR(t)|` on the default 0.005 grid plus
/// score midpoints. Ties go to the smaller threshold.
pub fn calibrate_threshold(
    scores: &[f64],
    labels: &[bool],
    weights: &[f64],
) -> Result<Calibration> {
    calibrate_threshold_with_step(scores, labels, weights, DEFAULT_GRID_STEP)
}

pub fn calibrate_threshold_with_step(
    scores: &[f64],
    labels: &[bool],
    weights: &[f64],
    step: f64,
) -> Result<Calibration> {
    check_lengths(scores, labels, weights)?;
    require_both_classes(labels)?;
    let candidates = candidate_thresholds(scores, step)?;
    let order = ascending(scores);
    let (pos_total, neg_total) = class_masses(labels, weights);

    // Mass strictly below the current candidate is predicted negative.
    let (mut fn_mass, mut tn_mass) = (0.0, 0.0);
    let mut next = 0;
    let mut best: Option<Calibration> = None;
    for t in candidates {
        while next < order.len() && scores[order[next]] < t {
            let r = order[next];
            if labels[r] {
                fn_mass += weights[r];
            } else {
                tn_mass += weights[r];
            }
            next += 1;
        }
        let fnr = fn_mass / pos_total;
        let fpr = (neg_total - tn_mass) / neg_total;
        let gap = (fnr - fpr).abs();
        if best.is_none_or(|b| gap < b.gap - TIE_EPS) {
            best = Some(Calibration {
                threshold: t,
                fnr,
                fpr,
                gap,
            });
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("no candidate thresholds".into()))
}
