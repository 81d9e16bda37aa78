//! Turning a session's raw events into the model's feature vector.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::FeatureVector;
use crate::error::{Error, Result};
use crate::manifest::{QuestionManifest, QuestionSpec};
use crate::session::{EventKind, InteractionEvent, SessionLog};

/// The six per-question measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuestionMeasures {
    pub qid: u8,
    pub clicks: u32,
    pub hits: u32,
    pub misses: u32,
    pub score: u32,
    pub accuracy: f64,
    pub missrate: f64,
}

impl QuestionMeasures {
    pub fn zero(qid: u8) -> QuestionMeasures {
        QuestionMeasures {
            qid,
            clicks: 0,
            hits: 0,
            misses: 0,
            score: 0,
            accuracy: 0.0,
            missrate: 0.0,
        }
    }

    /// Values in feature order: clicks, hits, misses, score, accuracy, missrate.
    pub fn as_features(&self) -> [f64; 6] {
        [
            f64::from(self.clicks),
            f64::from(self.hits),
            f64::from(self.misses),
            f64::from(self.score),
            self.accuracy,
            self.missrate,
        ]
    }
}

/// Lowercase, trim and collapse interior whitespace. Accents are kept.
pub fn text_canonicalize(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

fn ratio(num: u32, den: u32) -> f64 {
    if den == 0 {
        0.0
    } else {
        f64::from(num) / f64::from(den)
    }
}

/// Count the measures for one question.
///
/// `events` must all belong to `spec.qid` and may include the question's
/// start/end markers. Every click and submission counts as one interaction
/// (the denominator of accuracy and missrate); neutral clicks count as
/// neither hit nor miss. A submission is a hit when its canonical text equals
/// one of the item's targets.
pub fn measures_for_question<'a, I>(events: I, spec: &QuestionSpec) -> Result<QuestionMeasures>
where
    I: IntoIterator<Item = &'a InteractionEvent>,
{
    let qid = spec.qid;
    let mut open = false;
    let mut clicks = 0u32;
    let mut misses = 0u32;
    let mut per_item_hits: BTreeMap<u32, u32> = BTreeMap::new();

    for ev in events {
        if ev.qid != qid {
            return Err(Error::MalformedSession(format!(
                "event for Q{} passed while measuring Q{qid}",
                ev.qid
            )));
        }
        if !ev.kind.is_bracket() && !open {
            return Err(Error::MalformedSession(format!(
                "{:?} for Q{qid} at {} ms outside the question window",
                ev.kind, ev.t_ms
            )));
        }
        match ev.kind {
            EventKind::QuestionStart => open = true,
            EventKind::QuestionEnd => open = false,
            EventKind::ClickTarget => {
                clicks += 1;
                *per_item_hits.entry(ev.item_index).or_default() += 1;
            }
            EventKind::ClickDistractor => {
                clicks += 1;
                misses += 1;
            }
            EventKind::ClickNeutral => clicks += 1,
            EventKind::SubmitText => {
                let item = spec.items.get(ev.item_index as usize).ok_or_else(|| {
                    Error::MalformedSession(format!(
                        "submission for item {} of Q{qid}, which has {} items",
                        ev.item_index,
                        spec.items.len()
                    ))
                })?;
                clicks += 1;
                let answer = text_canonicalize(ev.payload.as_deref().unwrap_or(""));
                if item.targets.iter().any(|t| text_canonicalize(t) == answer) {
                    *per_item_hits.entry(ev.item_index).or_default() += 1;
                } else {
                    misses += 1;
                }
            }
        }
    }

    let hits: u32 = per_item_hits.values().sum();
    // Score is the per-item sum of hits; the reference engine has no bonus rules.
    let score = hits;
    Ok(QuestionMeasures {
        qid,
        clicks,
        hits,
        misses,
        score,
        accuracy: ratio(hits, clicks),
        missrate: ratio(misses, clicks),
    })
}

/// All question measures of a completed session, in variant order.
pub fn session_measures(
    session: &SessionLog,
    manifest: &QuestionManifest,
) -> Result<Vec<QuestionMeasures>> {
    if !session.completed {
        return Err(Error::MalformedSession(format!(
            "session `{}` is not completed",
            session.session_id
        )));
    }
    session.validate()?;

    let variant = session.variant;
    let mut bracketed: BTreeMap<u8, (bool, bool)> = BTreeMap::new();
    for ev in &session.events {
        let entry = bracketed.entry(ev.qid).or_default();
        match ev.kind {
            EventKind::QuestionStart => entry.0 = true,
            EventKind::QuestionEnd => entry.1 = true,
            _ => {}
        }
    }
    let missing: Vec<u8> = variant
        .qids()
        .iter()
        .copied()
        .filter(|q| bracketed.get(q) != Some(&(true, true)))
        .collect();
    if !missing.is_empty() {
        return Err(Error::IncompleteSession { missing });
    }

    variant
        .qids()
        .iter()
        .map(|&qid| {
            let spec = manifest.question(qid).ok_or_else(|| {
                Error::InvalidManifest(format!("manifest has no entry for Q{qid}"))
            })?;
            measures_for_question(session.question_events(qid), spec)
        })
        .collect()
}

/// Feature vector for a completed session: demographics, then the six
/// measures of each question of the session's variant.
pub fn extract_features(
    session: &SessionLog,
    manifest: &QuestionManifest,
) -> Result<FeatureVector> {
    let measures = session_measures(session, manifest)?;
    let mut values = Vec::with_capacity(session.variant.feature_count());
    values.extend_from_slice(&session.participant.demographic_features());
    for m in &measures {
        values.extend_from_slice(&m.as_features());
    }
    FeatureVector::new(session.variant, values)
}
