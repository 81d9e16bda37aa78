#![allow(dead_code)]

use lexiscreen_core::session::{EventKind, InteractionEvent, SessionLog};
use lexiscreen_core::{AgeVariant, Gender, ParticipantRecord, QuestionManifest};
use rand::Rng;

/// Per-question counts the scripted player intended to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Intended {
    pub clicks: u32,
    pub hits: u32,
    pub misses: u32,
}

pub fn participant<R: Rng>(rng: &mut R, variant: AgeVariant) -> ParticipantRecord {
    let (lo, hi) = match variant {
        AgeVariant::Full => (7, 17),
        AgeVariant::Young7_8 => (7, 8),
        AgeVariant::Mid9_11 => (9, 11),
        AgeVariant::Teen12_17 => (12, 17),
    };
    ParticipantRecord {
        id: format!("p{}", rng.gen::<u32>()),
        gender: if rng.gen_bool(0.5) {
            Gender::Male
        } else {
            Gender::Female
        },
        native_spanish_monolingual: rng.gen_bool(0.8),
        failed_language_subject: rng.gen_bool(0.2),
        age: rng.gen_range(lo..=hi),
        label: None,
    }
}

/// A completed session with random clicks and submissions for every
/// question of `variant`.
pub fn random_session<R: Rng>(
    rng: &mut R,
    variant: AgeVariant,
    manifest: &QuestionManifest,
) -> (SessionLog, Vec<Intended>) {
    let sid = format!("s{}", rng.gen::<u64>());
    let mut t = rng.gen_range(0..5_000u64);
    let mut events = Vec::new();
    let mut intended = Vec::new();
    for &qid in variant.qids() {
        let spec = manifest
            .question(qid)
            .expect("manifest covers every question");
        let mut counts = Intended::default();
        events.push(InteractionEvent::new(
            &sid,
            qid,
            0,
            t,
            EventKind::QuestionStart,
        ));
        for _ in 0..rng.gen_range(0..12) {
            t += rng.gen_range(0..300);
            let item = rng.gen_range(0..spec.items.len()) as u32;
            counts.clicks += 1;
            if spec.archetype.is_text_answer() {
                let target = &spec.items[item as usize].targets[0];
                let text = match rng.gen_range(0..3) {
                    0 => {
                        counts.misses += 1;
                        format!("{target}x")
                    }
                    1 => {
                        counts.hits += 1;
                        format!("  {}  ", target.to_uppercase())
                    }
                    _ => {
                        counts.hits += 1;
                        target.clone()
                    }
                };
                events.push(InteractionEvent::submit(&sid, qid, item, t, &text));
            } else {
                let kind = match rng.gen_range(0..3) {
                    0 => {
                        counts.hits += 1;
                        EventKind::ClickTarget
                    }
                    1 => {
                        counts.misses += 1;
                        EventKind::ClickDistractor
                    }
                    _ => EventKind::ClickNeutral,
                };
                events.push(InteractionEvent::new(&sid, qid, item, t, kind));
            }
        }
        t += rng.gen_range(0..300);
        events.push(InteractionEvent::new(
            &sid,
            qid,
            0,
            t,
            EventKind::QuestionEnd,
        ));
        t += rng.gen_range(0..300);
        intended.push(counts);
    }
    let log = SessionLog {
        session_id: sid,
        participant: participant(rng, variant),
        variant,
        events,
        completed: true,
    };
    (log, intended)
}
