use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_AGE: u8 = 7;
pub const MAX_AGE: u8 = 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Female,
    Male,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "dys")]
    Dyslexia,
    #[serde(rename = "nodys")]
    NoDyslexia,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::Dyslexia
    }

    pub fn from_positive(positive: bool) -> Label {
        if positive {
            Label::Dyslexia
        } else {
            Label::NoDyslexia
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Label::Dyslexia => "dys",
            Label::NoDyslexia => "nodys",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Label {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s {
            "dys" => Ok(Label::Dyslexia),
            "nodys" => Ok(Label::NoDyslexia),
            _ => Err(()),
        }
    }
}

/// Demographic questionnaire plus the ground-truth label when known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantRecord {
    pub id: String,
    pub gender: Gender,
    pub native_spanish_monolingual: bool,
    pub failed_language_subject: bool,
    pub age: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
}

impl ParticipantRecord {
    pub fn validate(&self) -> Result<()> {
        if !(MIN_AGE..=MAX_AGE).contains(&self.age) {
            return Err(Error::InvalidRecord(format!(
                "participant `{}` has age {}, outside {MIN_AGE}..={MAX_AGE}",
                self.id, self.age
            )));
        }
        Ok(())
    }

    /// The four leading feature values: gender, native language, failed
    /// language subject, age.
    pub fn demographic_features(&self) -> [f64; 4] {
        [
            match self.gender {
                Gender::Female => 0.0,
                Gender::Male => 1.0,
            },
            f64::from(u8::from(self.native_spanish_monolingual)),
            f64::from(u8::from(self.failed_language_subject)),
            f64::from(self.age),
        ]
    }

    pub fn require_label(&self) -> Result<Label> {
        self.label.ok_or(Error::Unlabeled)
    }
}
