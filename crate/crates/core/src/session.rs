//! Raw interaction events and the per-participant session log.
//!
//! On disk a session log is JSON lines: a header object with the session
//! metadata, then one event object per line.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::participant::ParticipantRecord;
use crate::variant::AgeVariant;

/// Upper bound on the time between the first question start and the last
/// question end.
pub const SESSION_TIME_LIMIT_MS: u64 = 15 * 60 * 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    ClickTarget,
    ClickDistractor,
    ClickNeutral,
    SubmitText,
    QuestionStart,
    QuestionEnd,
}

impl EventKind {
    pub fn is_bracket(self) -> bool {
        matches!(self, EventKind::QuestionStart | EventKind::QuestionEnd)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub session_id: String,
    pub qid: u8,
    #[serde(default)]
    pub item_index: u32,
    /// Milliseconds since the session started.
    pub t_ms: u64,
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<String>,
}

impl InteractionEvent {
    pub fn new(session_id: &str, qid: u8, item_index: u32, t_ms: u64, kind: EventKind) -> Self {
        InteractionEvent {
            session_id: session_id.to_string(),
            qid,
            item_index,
            t_ms,
            kind,
            payload: None,
        }
    }

    pub fn submit(session_id: &str, qid: u8, item_index: u32, t_ms: u64, text: &str) -> Self {
        InteractionEvent {
            payload: Some(text.to_string()),
            ..InteractionEvent::new(session_id, qid, item_index, t_ms, EventKind::SubmitText)
        }
    }
}

/// Incremental checker for the ordering rules of an event stream.
///
/// Used both when validating a complete log and when a live service accepts
/// events batch by batch.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamCursor {
    pub last_t_ms: Option<u64>,
    pub open_qid: Option<u8>,
    pub first_start_ms: Option<u64>,
}

impl StreamCursor {
    pub fn accept(&mut self, variant: AgeVariant, ev: &InteractionEvent) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedSession(msg));
        if !variant.contains(ev.qid) {
            return bad(format!(
                "event for Q{} which is not part of the {variant} test",
                ev.qid
            ));
        }
        if let Some(last) = self.last_t_ms {
            if ev.t_ms < last {
                return bad(format!("timestamp {} ms precedes {} ms", ev.t_ms, last));
            }
        }
        match ev.kind {
            EventKind::QuestionStart => {
                if let Some(open) = self.open_qid {
                    return bad(format!("Q{} started while Q{open} is still open", ev.qid));
                }
                self.open_qid = Some(ev.qid);
                self.first_start_ms.get_or_insert(ev.t_ms);
            }
            EventKind::QuestionEnd => {
                if self.open_qid != Some(ev.qid) {
                    return bad(format!("Q{} ended without being started", ev.qid));
                }
                self.open_qid = None;
            }
            _ => {
                if self.open_qid != Some(ev.qid) {
                    return bad(format!(
                        "{:?} for Q{} at {} ms outside that question's window",
                        ev.kind, ev.qid, ev.t_ms
                    ));
                }
            }
        }
        if let Some(start) = self.first_start_ms {
            if ev.t_ms - start > SESSION_TIME_LIMIT_MS {
                return bad(format!(
                    "session spans {} ms, longer than the {SESSION_TIME_LIMIT_MS} ms limit",
                    ev.t_ms - start
                ));
            }
        }
        self.last_t_ms = Some(ev.t_ms);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SessionHeader {
    session_id: String,
    participant: ParticipantRecord,
    variant: AgeVariant,
    completed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub session_id: String,
    pub participant: ParticipantRecord,
    pub variant: AgeVariant,
    pub events: Vec<InteractionEvent>,
    pub completed: bool,
}

impl SessionLog {
    pub fn validate(&self) -> Result<()> {
        self.participant.validate()?;
        let mut cursor = StreamCursor::default();
        for ev in &self.events {
            cursor.accept(self.variant, ev)?;
        }
        Ok(())
    }

    /// Events of one question, in log order, brackets included.
    pub fn question_events(&self, qid: u8) -> impl Iterator<Item = &InteractionEvent> {
        self.events.iter().filter(move |e| e.qid == qid)
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        let header = SessionHeader {
            session_id: self.session_id.clone(),
            participant: self.participant.clone(),
            variant: self.variant,
            completed: self.completed,
        };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n")?;
        for ev in &self.events {
            serde_json::to_writer(&mut out, ev)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<SessionLog> {
        let mut lines = input.lines().enumerate().filter(|(_, l)| match l {
            Ok(l) => !l.trim().is_empty(),
            Err(_) => true,
        });
        let (_, first) = lines
            .next()
            .ok_or_else(|| Error::MalformedSession("empty session log".into()))?;
        let header: SessionHeader = serde_json::from_str(&first?)
            .map_err(|e| Error::MalformedSession(format!("line 1: bad header: {e}")))?;
        let mut events = Vec::new();
        for (i, line) in lines {
            let ev: InteractionEvent = serde_json::from_str(&line?)
                .map_err(|e| Error::MalformedSession(format!("line {}: {e}", i + 1)))?;
            events.push(ev);
        }
        Ok(SessionLog {
            session_id: header.session_id,
            participant: header.participant,
            variant: header.variant,
            events,
            completed: header.completed,
        })
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<SessionLog> {
        let file = std::fs::File::open(path)?;
        SessionLog::read_jsonl(std::io::BufReader::new(file))
    }
}
