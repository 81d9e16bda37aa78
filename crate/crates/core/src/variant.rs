//! Test variants and the feature layout they induce.
//!
//! Every variant lays out its feature vector the same way: four demographic
//! values followed by one block of six measures per question, in ascending
//! question id. A variant only differs in which questions it contains.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Number of demographic values at the start of every feature vector.
pub const DEMOGRAPHIC_FEATURES: usize = 4;

/// Number of measures recorded per question.
pub const MEASURES_PER_QUESTION: usize = 6;

/// Highest question id in the full test.
pub const QUESTION_COUNT: u8 = 32;

const FULL: [u8; 32] = [
    1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26,
    27, 28, 29, 30, 31, 32,
];
const YOUNG: [u8; 19] = [
    1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 14, 15, 16, 17, 22, 23, 30,
];
const MID: [u8; 27] = [
    1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 22, 23, 24, 26, 27, 28,
    30,
];
const TEEN: [u8; 31] = [
    1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26,
    27, 28, 30, 31, 32,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgeVariant {
    /// All 32 questions, as administered to every age in the desktop study.
    Full,
    #[serde(rename = "young7_8")]
    Young7_8,
    #[serde(rename = "mid9_11")]
    Mid9_11,
    #[serde(rename = "teen12_17")]
    Teen12_17,
}

impl AgeVariant {
    pub const ALL: [AgeVariant; 4] = [
        AgeVariant::Full,
        AgeVariant::Young7_8,
        AgeVariant::Mid9_11,
        AgeVariant::Teen12_17,
    ];

    /// Variants served to new participants, selected by age.
    pub const LIVE: [AgeVariant; 3] = [
        AgeVariant::Young7_8,
        AgeVariant::Mid9_11,
        AgeVariant::Teen12_17,
    ];

    /// Question ids in presentation order.
    pub fn qids(self) -> &'static [u8] {
        match self {
            AgeVariant::Full => &FULL,
            AgeVariant::Young7_8 => &YOUNG,
            AgeVariant::Mid9_11 => &MID,
            AgeVariant::Teen12_17 => &TEEN,
        }
    }

    pub fn feature_count(self) -> usize {
        DEMOGRAPHIC_FEATURES + MEASURES_PER_QUESTION * self.qids().len()
    }

    pub fn contains(self, qid: u8) -> bool {
        self.qids().binary_search(&qid).is_ok()
    }

    /// Zero-based index of the first measure of `qid`, if the variant has it.
    pub fn block_offset(self, qid: u8) -> Option<usize> {
        self.qids()
            .binary_search(&qid)
            .ok()
            .map(|pos| DEMOGRAPHIC_FEATURES + MEASURES_PER_QUESTION * pos)
    }

    pub fn feature_index(self, qid: u8, measure: Measure) -> Option<usize> {
        self.block_offset(qid).map(|off| off + measure as usize)
    }

    /// Live variant for a participant of the given age.
    pub fn for_age(age: u8) -> Option<AgeVariant> {
        match age {
            7..=8 => Some(AgeVariant::Young7_8),
            9..=11 => Some(AgeVariant::Mid9_11),
            12..=17 => Some(AgeVariant::Teen12_17),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AgeVariant::Full => "full",
            AgeVariant::Young7_8 => "young7_8",
            AgeVariant::Mid9_11 => "mid9_11",
            AgeVariant::Teen12_17 => "teen12_17",
        }
    }

    /// What a given feature index means in this variant.
    pub fn describe(self, index: usize) -> Option<FeatureSlot> {
        if index < DEMOGRAPHIC_FEATURES {
            return Some(FeatureSlot::Demographic(Demographic::ALL[index]));
        }
        let rel = index - DEMOGRAPHIC_FEATURES;
        let qid = *self.qids().get(rel / MEASURES_PER_QUESTION)?;
        Some(FeatureSlot::Question {
            qid,
            measure: Measure::ALL[rel % MEASURES_PER_QUESTION],
        })
    }

    /// CSV column names for the feature part of a dataset row.
    pub fn column_names(self) -> Vec<String> {
        (0..self.feature_count())
            .map(|i| self.describe(i).expect("index in range").column_name())
            .collect()
    }
}

impl fmt::Display for AgeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgeVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AgeVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown variant `{s}` (expected one of full, young7_8, mid9_11, teen12_17)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Clicks = 0,
    Hits = 1,
    Misses = 2,
    Score = 3,
    Accuracy = 4,
    Missrate = 5,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::Clicks,
        Measure::Hits,
        Measure::Misses,
        Measure::Score,
        Measure::Accuracy,
        Measure::Missrate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Clicks => "clicks",
            Measure::Hits => "hits",
            Measure::Misses => "misses",
            Measure::Score => "score",
            Measure::Accuracy => "accuracy",
            Measure::Missrate => "missrate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Demographic {
    Gender,
    Native,
    LangFail,
    Age,
}

impl Demographic {
    pub const ALL: [Demographic; 4] = [
        Demographic::Gender,
        Demographic::Native,
        Demographic::LangFail,
        Demographic::Age,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Demographic::Gender => "gender",
            Demographic::Native => "native",
            Demographic::LangFail => "lang_fail",
            Demographic::Age => "age",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureSlot {
    Demographic(Demographic),
    Question { qid: u8, measure: Measure },
}

impl FeatureSlot {
    pub fn column_name(self) -> String {
        match self {
            FeatureSlot::Demographic(d) => d.name().to_string(),
            FeatureSlot::Question { qid, measure } => format!("q{qid:02}_{}", measure.name()),
        }
    }
}
