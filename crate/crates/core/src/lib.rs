//! Core of the screening pipeline: question manifest and session types,
//! feature extraction from interaction events, a class-weighted random
//! forest, and the evaluation harness around it.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod forest;
pub mod manifest;
pub mod participant;
pub mod session;
pub mod variant;

pub use dataset::{read_dataset, read_dataset_csv, Dataset, FeatureMatrix, FeatureVector};
pub use error::{Error, Result};
pub use features::{extract_features, measures_for_question, text_canonicalize, QuestionMeasures};
pub use forest::{ForestModel, TrainConfig};
pub use manifest::{QuestionManifest, QuestionSpec};
pub use participant::{Gender, Label, ParticipantRecord};
pub use session::{EventKind, InteractionEvent, SessionLog};
pub use variant::{AgeVariant, Measure};
