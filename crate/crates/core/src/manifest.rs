//! Data-driven description of the test questions.
//!
//! The manifest is versioned JSON. Audio prompts are referenced by asset id
//! and resolved by the frontend against its static asset directory.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::variant::{AgeVariant, QUESTION_COUNT};

pub const MANIFEST_VERSION: u32 = 1;

const BUILTIN_MANIFEST: &str = include_str!("../data/manifest.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Archetype {
    WhacAMole,
    AudioChoice,
    VisualSearchPairs,
    FillMissingLetter,
    DeleteExtraLetter,
    FindSentenceError,
    ReorderLetters,
    ReorderSyllables,
    SeparateWords,
    MemorySequence,
    Dictation,
}

impl Archetype {
    /// Archetypes whose items are answered by clicking among distractors.
    pub fn needs_distractors(self) -> bool {
        matches!(
            self,
            Archetype::WhacAMole | Archetype::AudioChoice | Archetype::VisualSearchPairs
        )
    }

    /// Archetypes answered by submitting text (typed or a final arrangement).
    pub fn is_text_answer(self) -> bool {
        matches!(
            self,
            Archetype::ReorderLetters
                | Archetype::ReorderSyllables
                | Archetype::SeparateWords
                | Archetype::MemorySequence
                | Archetype::Dictation
        )
    }
}

/// Cognitive skills a question is designed to exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    AlphabeticAwareness,
    PhonologicalAwareness,
    SyllabicAwareness,
    LexicalAwareness,
    MorphologicalAwareness,
    SyntacticAwareness,
    SemanticAwareness,
    OrthographicAwareness,
    VisualWorkingMemory,
    AuditoryWorkingMemory,
    SequentialAuditoryWorkingMemory,
    SequentialVisualWorkingMemory,
    ActivationAndAttention,
    SustainedAttention,
    SimultaneousAttention,
    VisualDiscrimination,
    AuditoryDiscrimination,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_audio: Option<String>,
    /// Stimulus shown on screen, e.g. the scrambled letters or the sentence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display: Option<String>,
    pub targets: Vec<String>,
    #[serde(default)]
    pub distractors: Vec<String>,
    /// How long the stimulus stays visible, for memory items.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display_ms: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionSpec {
    pub qid: u8,
    pub archetype: Archetype,
    pub items: Vec<Item>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit_s: Option<u32>,
    pub indicators: BTreeSet<Indicator>,
}

impl QuestionSpec {
    pub fn item_count(&self) -> usize {
        self.items.len()
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.qid;
        if !(1..=QUESTION_COUNT).contains(&q) {
            return Err(Error::InvalidManifest(format!("qid {q} outside 1..=32")));
        }
        if self.items.is_empty() {
            return Err(Error::InvalidManifest(format!("Q{q} has no items")));
        }
        if self.indicators.is_empty() {
            return Err(Error::InvalidManifest(format!("Q{q} lists no indicators")));
        }
        for (i, item) in self.items.iter().enumerate() {
            if item.targets.is_empty() {
                return Err(Error::InvalidManifest(format!(
                    "Q{q} item {i} has no target"
                )));
            }
            if self.archetype.needs_distractors() && item.distractors.is_empty() {
                return Err(Error::InvalidManifest(format!(
                    "Q{q} item {i} is a {:?} item without distractors",
                    self.archetype
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionManifest {
    pub version: u32,
    pub language: String,
    pub questions: Vec<QuestionSpec>,
}

impl QuestionManifest {
    /// The manifest shipped with the crate.
    pub fn builtin() -> QuestionManifest {
        QuestionManifest::from_json(BUILTIN_MANIFEST).expect("bundled manifest is valid")
    }

    pub fn from_json(text: &str) -> Result<QuestionManifest> {
        let manifest: QuestionManifest = serde_json::from_str(text)?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<QuestionManifest> {
        QuestionManifest::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != MANIFEST_VERSION {
            return Err(Error::InvalidManifest(format!(
                "manifest version {} is not supported (expected {MANIFEST_VERSION})",
                self.version
            )));
        }
        let mut seen = BTreeMap::new();
        for spec in &self.questions {
            spec.validate()?;
            if seen.insert(spec.qid, ()).is_some() {
                return Err(Error::InvalidManifest(format!(
                    "Q{} listed twice",
                    spec.qid
                )));
            }
        }
        let missing: Vec<u8> = (1..=QUESTION_COUNT)
            .filter(|q| !seen.contains_key(q))
            .collect();
        if !missing.is_empty() {
            return Err(Error::InvalidManifest(format!(
                "missing questions {missing:?}"
            )));
        }
        Ok(())
    }

    pub fn question(&self, qid: u8) -> Option<&QuestionSpec> {
        self.questions.iter().find(|q| q.qid == qid)
    }

    /// The questions a variant administers, in presentation order.
    pub fn for_variant(&self, variant: AgeVariant) -> VariantManifest {
        VariantManifest {
            version: self.version,
            language: self.language.clone(),
            variant,
            questions: variant
                .qids()
                .iter()
                .filter_map(|&q| self.question(q).cloned())
                .collect(),
        }
    }
}

/// Manifest restricted to one variant, as served to the frontend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantManifest {
    pub version: u32,
    pub language: String,
    pub variant: AgeVariant,
    pub questions: Vec<QuestionSpec>,
}
