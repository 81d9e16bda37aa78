//! Session lifecycle on top of the flat-file store and the model registry.
//!
//! Layout under the data directory:
//!
//! ```text
//! salt                    random salt for participant id hashes
//! index.jsonl             one line per created session
//! sessions/{id}.jsonl     header, event batches, then a finalized or abandoned record
//! models/{version}.json   uploaded artifacts, named by content hash
//! models/active.json      active version per variant
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use lexiscreen_core::features::session_measures;
use lexiscreen_core::manifest::VariantManifest;
use lexiscreen_core::session::StreamCursor;
use lexiscreen_core::{
    AgeVariant, FeatureVector, Gender, InteractionEvent, ParticipantRecord, QuestionManifest,
    QuestionMeasures, SessionLog,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, ServiceError};
use crate::registry::{ActiveModel, ModelInfo, Registry};
use crate::store::{append_record, read_records, write_atomic};

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    /// Question manifest to serve; the bundled one when `None`.
    pub manifest_path: Option<PathBuf>,
    /// When set, every request must carry `Authorization: Bearer <token>`.
    pub api_token: Option<String>,
}

/// Questionnaire answers sent when a session is opened.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Demographics {
    /// Optional external identifier; only its salted hash is stored.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub participant_id: Option<String>,
    pub gender: Gender,
    pub native_spanish_monolingual: bool,
    pub failed_language_subject: bool,
    pub age: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Open,
    Finalized,
    Abandoned,
}

impl SessionStatus {
    fn name(self) -> &'static str {
        match self {
            SessionStatus::Open => "open",
            SessionStatus::Finalized => "finalized",
            SessionStatus::Abandoned => "abandoned",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub score: f64,
    pub flagged: bool,
    pub threshold: f64,
    pub model_version: String,
    pub variant: AgeVariant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalizeResult {
    pub session_id: String,
    pub prediction: Prediction,
    pub features: FeatureVector,
    pub measures: Vec<QuestionMeasures>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreatedSession {
    pub session_id: String,
    pub variant: AgeVariant,
    pub qids: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ack {
    pub seq: u64,
    pub accepted: usize,
    /// True when this sequence number had already been stored.
    pub duplicate: bool,
    pub total_events: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub variant: AgeVariant,
    pub status: SessionStatus,
    pub created_at_ms: u64,
    pub event_count: usize,
    pub batches: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<FinalizeResult>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StoredDemographics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    participant_hash: Option<String>,
    gender: Gender,
    native_spanish_monolingual: bool,
    failed_language_subject: bool,
    age: u8,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Record {
    Header {
        session_id: String,
        variant: AgeVariant,
        created_at_ms: u64,
        demographics: StoredDemographics,
    },
    Batch {
        seq: u64,
        events: Vec<InteractionEvent>,
    },
    Finalized {
        result: FinalizeResult,
    },
    Abandoned {
        at_ms: u64,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct IndexEntry {
    session_id: String,
    variant: AgeVariant,
    created_at_ms: u64,
}

#[derive(Debug)]
struct SessionState {
    id: String,
    path: PathBuf,
    variant: AgeVariant,
    created_at_ms: u64,
    demographics: StoredDemographics,
    events: Vec<InteractionEvent>,
    acks: BTreeMap<u64, usize>,
    cursor: StreamCursor,
    status: SessionStatus,
    result: Option<FinalizeResult>,
}

impl SessionState {
    fn participant(&self) -> ParticipantRecord {
        let d = &self.demographics;
        ParticipantRecord {
            id: d
                .participant_hash
                .clone()
                .unwrap_or_else(|| self.id.clone()),
            gender: d.gender,
            native_spanish_monolingual: d.native_spanish_monolingual,
            failed_language_subject: d.failed_language_subject,
            age: d.age,
            label: None,
        }
    }

    fn log(&self) -> SessionLog {
        SessionLog {
            session_id: self.id.clone(),
            participant: self.participant(),
            variant: self.variant,
            events: self.events.clone(),
            completed: true,
        }
    }

    fn view(&self) -> SessionView {
        SessionView {
            session_id: self.id.clone(),
            variant: self.variant,
            status: self.status,
            created_at_ms: self.created_at_ms,
            event_count: self.events.len(),
            batches: self.acks.len(),
            result: self.result.clone(),
        }
    }

    fn require_open(&self) -> Result<()> {
        match self.status {
            SessionStatus::Open => Ok(()),
            s => Err(ServiceError::Closed {
                id: self.id.clone(),
                status: s.name(),
            }),
        }
    }

    /// Check a batch against the stored tail without changing anything.
    fn admit(&self, events: &[InteractionEvent]) -> Result<StreamCursor> {
        let mut cursor = self.cursor.clone();
        for (i, ev) in events.iter().enumerate() {
            if ev.session_id != self.id {
                return Err(ServiceError::InvalidEvents(format!(
                    "event {i} belongs to session `{}`",
                    ev.session_id
                )));
            }
            cursor
                .accept(self.variant, ev)
                .map_err(|e| ServiceError::InvalidEvents(format!("event {i}: {e}")))?;
        }
        Ok(cursor)
    }

    fn apply(&mut self, record: Record) -> std::result::Result<(), String> {
        match record {
            Record::Header { .. } => return Err("second header".into()),
            Record::Batch { seq, events } => {
                self.cursor = self.admit(&events).map_err(|e| e.to_string())?;
                self.acks.insert(seq, events.len());
                self.events.extend(events);
            }
            Record::Finalized { result } => {
                self.status = SessionStatus::Finalized;
                self.result = Some(result);
            }
            Record::Abandoned { .. } => self.status = SessionStatus::Abandoned,
        }
        Ok(())
    }
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

pub struct Service {
    config: ServiceConfig,
    manifest: QuestionManifest,
    registry: Registry,
    salt: String,
    sessions: RwLock<HashMap<String, Arc<Mutex<SessionState>>>>,
}

impl Service {
    /// Open (or initialise) a data directory and replay every stored session.
    pub fn open(config: ServiceConfig) -> Result<Service> {
        let manifest = match &config.manifest_path {
            Some(p) => QuestionManifest::load(p)
                .map_err(|e| ServiceError::Internal(format!("manifest {}: {e}", p.display())))?,
            None => QuestionManifest::builtin(),
        };
        let sessions_dir = config.data_dir.join("sessions");
        fs::create_dir_all(&sessions_dir)?;
        let registry = Registry::open(&config.data_dir.join("models"))?;

        let salt_path = config.data_dir.join("salt");
        let salt = if salt_path.exists() {
            fs::read_to_string(&salt_path)?.trim().to_string()
        } else {
            let salt = hex::encode(rand::random::<[u8; 16]>());
            write_atomic(&salt_path, salt.as_bytes())?;
            salt
        };

        let mut sessions = HashMap::new();
        for entry in fs::read_dir(&sessions_dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("jsonl") {
                continue;
            }
            let state = replay(&path)?;
            sessions.insert(state.id.clone(), Arc::new(Mutex::new(state)));
        }
        tracing::info!(sessions = sessions.len(), dir = %config.data_dir.display(), "store opened");

        Ok(Service {
            config,
            manifest,
            registry,
            salt,
            sessions: RwLock::new(sessions),
        })
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    fn sessions_dir(&self) -> PathBuf {
        self.config.data_dir.join("sessions")
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<SessionState>>> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    fn hash_participant(&self, id: &str) -> String {
        let mut h = Sha256::new();
        h.update(self.salt.as_bytes());
        h.update(b":");
        h.update(id.as_bytes());
        hex::encode(h.finalize())
    }

    /// Open a session; the variant follows from the participant's age.
    pub fn create_session(&self, demographics: Demographics) -> Result<CreatedSession> {
        let age = u8::try_from(demographics.age)
            .ok()
            .filter(|a| AgeVariant::for_age(*a).is_some())
            .ok_or_else(|| {
                ServiceError::Validation(format!(
                    "age {} is outside the screened range 7-17",
                    demographics.age
                ))
            })?;
        let variant = AgeVariant::for_age(age).expect("age checked above");
        let id = format!("{:032x}", rand::random::<u128>());
        let stored = StoredDemographics {
            participant_hash: demographics
                .participant_id
                .as_deref()
                .map(|p| self.hash_participant(p)),
            gender: demographics.gender,
            native_spanish_monolingual: demographics.native_spanish_monolingual,
            failed_language_subject: demographics.failed_language_subject,
            age,
        };
        let created_at_ms = now_ms();
        let path = self.sessions_dir().join(format!("{id}.jsonl"));
        append_record(
            &path,
            &Record::Header {
                session_id: id.clone(),
                variant,
                created_at_ms,
                demographics: stored.clone(),
            },
        )?;
        append_record(
            &self.config.data_dir.join("index.jsonl"),
            &IndexEntry {
                session_id: id.clone(),
                variant,
                created_at_ms,
            },
        )?;
        let state = SessionState {
            id: id.clone(),
            path,
            variant,
            created_at_ms,
            demographics: stored,
            events: Vec::new(),
            acks: BTreeMap::new(),
            cursor: StreamCursor::default(),
            status: SessionStatus::Open,
            result: None,
        };
        self.sessions
            .write()
            .expect("session map lock")
            .insert(id.clone(), Arc::new(Mutex::new(state)));
        tracing::info!(session = %id, %variant, "session created");
        Ok(CreatedSession {
            session_id: id,
            variant,
            qids: variant.qids().to_vec(),
        })
    }

    /// Durably append a batch. A sequence number already stored is
    /// acknowledged again without storing anything.
    pub fn append_events(&self, id: &str, seq: u64, events: Vec<InteractionEvent>) -> Result<Ack> {
        let session = self.session(id)?;
        let mut s = session.lock().expect("session lock");
        if let Some(&accepted) = s.acks.get(&seq) {
            return Ok(Ack {
                seq,
                accepted,
                duplicate: true,
                total_events: s.events.len(),
            });
        }
        s.require_open()?;
        let cursor = s.admit(&events)?;
        let accepted = events.len();
        append_record(
            &s.path,
            &Record::Batch {
                seq,
                events: events.clone(),
            },
        )?;
        s.cursor = cursor;
        s.acks.insert(seq, accepted);
        s.events.extend(events);
        Ok(Ack {
            seq,
            accepted,
            duplicate: false,
            total_events: s.events.len(),
        })
    }

    /// Score a completed session with the model active when the call starts.
    /// Repeated calls return the stored result.
    pub fn finalize(&self, id: &str) -> Result<FinalizeResult> {
        let variant = self.session(id)?.lock().expect("session lock").variant;
        let snapshot = self.registry.active(variant);
        self.finalize_with(id, snapshot)
    }

    /// As [`Service::finalize`], scoring with an explicit model snapshot.
    pub fn finalize_with(
        &self,
        id: &str,
        model: Option<Arc<ActiveModel>>,
    ) -> Result<FinalizeResult> {
        let session = self.session(id)?;
        let mut s = session.lock().expect("session lock");
        if let Some(done) = &s.result {
            return Ok(done.clone());
        }
        s.require_open()?;
        let log = s.log();
        let measures = session_measures(&log, &self.manifest).map_err(ServiceError::from_core)?;
        let mut values = log.participant.demographic_features().to_vec();
        for m in &measures {
            values.extend_from_slice(&m.as_features());
        }
        let features = FeatureVector::new(s.variant, values).map_err(ServiceError::from_core)?;

        let active = model.ok_or_else(|| ServiceError::NoActiveModel(s.variant.to_string()))?;
        if active.model.variant != s.variant {
            return Err(ServiceError::Internal(format!(
                "model {} is for {}, session is {}",
                active.version, active.model.variant, s.variant
            )));
        }
        let score = active
            .model
            .predict_score(&features.values)
            .map_err(ServiceError::from_core)?;
        let result = FinalizeResult {
            session_id: s.id.clone(),
            prediction: Prediction {
                score,
                flagged: score >= active.model.threshold,
                threshold: active.model.threshold,
                model_version: active.version.clone(),
                variant: s.variant,
            },
            features,
            measures,
        };
        append_record(
            &s.path,
            &Record::Finalized {
                result: result.clone(),
            },
        )?;
        s.status = SessionStatus::Finalized;
        s.result = Some(result.clone());
        tracing::info!(session = %id, score, flagged = result.prediction.flagged, "session finalized");
        Ok(result)
    }

    /// Close an open session without scoring it.
    pub fn abandon(&self, id: &str) -> Result<SessionView> {
        let session = self.session(id)?;
        let mut s = session.lock().expect("session lock");
        if s.status == SessionStatus::Abandoned {
            return Ok(s.view());
        }
        s.require_open()?;
        append_record(&s.path, &Record::Abandoned { at_ms: now_ms() })?;
        s.status = SessionStatus::Abandoned;
        Ok(s.view())
    }

    pub fn session_view(&self, id: &str) -> Result<SessionView> {
        Ok(self.session(id)?.lock().expect("session lock").view())
    }

    /// Stored event log of a session, as a core [`SessionLog`].
    pub fn session_log(&self, id: &str) -> Result<SessionLog> {
        Ok(self.session(id)?.lock().expect("session lock").log())
    }

    /// Every finalized session, oldest first.
    pub fn finalized_sessions(&self) -> Vec<SessionView> {
        let sessions: Vec<_> = self
            .sessions
            .read()
            .expect("session map lock")
            .values()
            .cloned()
            .collect();
        let mut out: Vec<SessionView> = sessions
            .iter()
            .map(|s| s.lock().expect("session lock").view())
            .filter(|v| v.status == SessionStatus::Finalized)
            .collect();
        out.sort_by(|a, b| (a.created_at_ms, &a.session_id).cmp(&(b.created_at_ms, &b.session_id)));
        out
    }

    pub fn activate_model(&self, bytes: &[u8]) -> Result<ModelInfo> {
        self.registry.activate(bytes)
    }

    pub fn active_models(&self) -> Vec<ModelInfo> {
        self.registry.active_infos()
    }

    pub fn manifest_for(&self, variant: &str) -> Result<VariantManifest> {
        let v: AgeVariant = variant
            .parse()
            .map_err(|_| ServiceError::UnknownVariant(variant.to_string()))?;
        Ok(self.manifest.for_variant(v))
    }
}

fn replay(path: &Path) -> Result<SessionState> {
    let corrupt = |msg: String| ServiceError::Internal(format!("{}: {msg}", path.display()));
    let records: Vec<Record> = read_records(path)?;
    let mut records = records.into_iter();
    let Some(Record::Header {
        session_id,
        variant,
        created_at_ms,
        demographics,
    }) = records.next()
    else {
        return Err(corrupt("session file does not start with a header".into()));
    };
    let mut state = SessionState {
        id: session_id,
        path: path.to_path_buf(),
        variant,
        created_at_ms,
        demographics,
        events: Vec::new(),
        acks: BTreeMap::new(),
        cursor: StreamCursor::default(),
        status: SessionStatus::Open,
        result: None,
    };
    for record in records {
        state.apply(record).map_err(corrupt)?;
    }
    Ok(state)
}
