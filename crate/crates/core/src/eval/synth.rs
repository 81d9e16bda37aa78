//! Synthetic labelled datasets with a tunable gap between the classes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Dataset, FeatureVector};
use crate::error::{Error, Result};
use crate::features::QuestionMeasures;
use crate::participant::{Gender, Label, ParticipantRecord};
use crate::variant::AgeVariant;

/// Number of dyslexia rows for `n` participants at `prevalence`
/// (round half away from zero).
pub fn positive_count(n: usize, prevalence: f64) -> usize {
    (n as f64 * prevalence).round() as usize
}

fn age_range(variant: AgeVariant) -> (u8, u8) {
    match variant {
        AgeVariant::Full => (7, 17),
        AgeVariant::Young7_8 => (7, 8),
        AgeVariant::Mid9_11 => (9, 11),
        AgeVariant::Teen12_17 => (12, 17),
    }
}

/// Generate `n` participants for `variant`.
///
/// Each participant has an ability `a ~ U(-1, 1)`. Question `q` has
/// `4 + q % 5` trials, each a hit with probability
/// `clamp(0.85 - 0.01 q + 0.1 a - separation * dys, 0, 1)`; every trial is
/// one click and misses are the remaining trials, plus 0-2 neutral clicks.
/// Demographics do not depend on the label. With `separation = 1` the
/// dyslexia class never hits, so the classes have disjoint supports except
/// for the vanishing chance of a control row with no hits at all.
pub fn synth_generate(
    n: usize,
    prevalence: f64,
    separation: f64,
    seed: u64,
    variant: AgeVariant,
) -> Result<Dataset> {
    if n < 10 {
        return Err(Error::InvalidArgument(format!(
            "need at least 10 rows, got {n}"
        )));
    }
    if !(prevalence > 0.0 && prevalence < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "prevalence {prevalence} must lie strictly between 0 and 1"
        )));
    }
    if !(0.0..=1.0).contains(&separation) {
        return Err(Error::InvalidArgument(format!(
            "separation {separation} must lie in [0, 1]"
        )));
    }
    let n_pos = positive_count(n, prevalence);
    if n_pos == 0 || n_pos == n {
        return Err(Error::InvalidArgument(format!(
            "{n} rows at prevalence {prevalence} leave one class empty"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<bool> = (0..n).map(|i| i < n_pos).collect();
    labels.shuffle(&mut rng);
    let (lo, hi) = age_range(variant);

    let mut records = Vec::with_capacity(n);
    for (i, &dys) in labels.iter().enumerate() {
        let record = ParticipantRecord {
            id: format!("synth-{i:05}"),
            gender: if rng.gen_bool(0.5) {
                Gender::Male
            } else {
                Gender::Female
            },
            native_spanish_monolingual: rng.gen_bool(0.9),
            failed_language_subject: rng.gen_bool(0.1),
            age: rng.gen_range(lo..=hi),
            label: Some(Label::from_positive(dys)),
        };
        let ability: f64 = rng.gen_range(-1.0..1.0);
        let mut values = record.demographic_features().to_vec();
        for &qid in variant.qids() {
            let trials = 4 + u32::from(qid % 5);
            let shift = if dys { separation } else { 0.0 };
            let p = (0.85 - 0.01 * f64::from(qid) + 0.1 * ability - shift).clamp(0.0, 1.0);
            let hits = (0..trials).filter(|_| rng.gen_bool(p)).count() as u32;
            let misses = trials - hits;
            let clicks = trials + rng.gen_range(0..=2);
            let m = QuestionMeasures {
                qid,
                clicks,
                hits,
                misses,
                score: hits,
                accuracy: f64::from(hits) / f64::from(clicks),
                missrate: f64::from(misses) / f64::from(clicks),
            };
            values.extend_from_slice(&m.as_features());
        }
        records.push((record, FeatureVector::new(variant, values)?));
    }
    Dataset::new(variant, records)
}
