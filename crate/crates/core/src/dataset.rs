//! Feature vectors, labeled datasets and their CSV form.
//!
//! CSV layout: `id,label,gender,native,lang_fail,age` followed by six
//! columns per question of the variant (`q01_clicks`, `q01_hits`, ...).
//! Labels are `dys` or `nodys`; the label cell is empty for screening-only
//! rows.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::participant::{Gender, Label, ParticipantRecord, MAX_AGE, MIN_AGE};
use crate::variant::{AgeVariant, DEMOGRAPHIC_FEATURES};

const ID_COLUMNS: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub variant: AgeVariant,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(variant: AgeVariant, values: Vec<f64>) -> Result<FeatureVector> {
        if values.len() != variant.feature_count() {
            return Err(Error::VectorLength {
                expected: variant.feature_count(),
                found: values.len(),
            });
        }
        Ok(FeatureVector { variant, values })
    }

    /// Restrict a vector to the questions of a smaller variant.
    pub fn project(&self, target: AgeVariant) -> Result<FeatureVector> {
        let mut values = self.values[..DEMOGRAPHIC_FEATURES].to_vec();
        for &qid in target.qids() {
            let off = self.variant.block_offset(qid).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "{} vector has no block for Q{qid} required by {target}",
                    self.variant
                ))
            })?;
            values.extend_from_slice(&self.values[off..off + 6]);
        }
        FeatureVector::new(target, values)
    }
}

/// Row-major numeric matrix handed to the learner.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    n_cols: usize,
    values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn from_rows<R: AsRef<[f64]>>(n_cols: usize, rows: &[R]) -> Result<FeatureMatrix> {
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::VectorLength {
                    expected: n_cols,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Ok(FeatureMatrix { n_cols, values })
    }

    pub fn n_rows(&self) -> usize {
        self.values.len().checked_div(self.n_cols).unwrap_or(0)
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_cols + col]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub variant: AgeVariant,
    pub records: Vec<(ParticipantRecord, FeatureVector)>,
}

impl Dataset {
    /// Build a dataset, checking every record is labeled, in range and laid
    /// out for `variant`.
    pub fn new(
        variant: AgeVariant,
        records: Vec<(ParticipantRecord, FeatureVector)>,
    ) -> Result<Dataset> {
        for (rec, fv) in &records {
            rec.validate()?;
            rec.require_label()?;
            if fv.variant != variant {
                return Err(Error::InvalidRecord(format!(
                    "record `{}` is a {} vector in a {variant} dataset",
                    rec.id, fv.variant
                )));
            }
            if fv.values.len() != variant.feature_count() {
                return Err(Error::VectorLength {
                    expected: variant.feature_count(),
                    found: fv.values.len(),
                });
            }
        }
        Ok(Dataset { variant, records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// True for dyslexia rows.
    pub fn labels(&self) -> Vec<bool> {
        self.records
            .iter()
            .map(|(r, _)| r.label.is_some_and(Label::is_positive))
            .collect()
    }

    pub fn positive_count(&self) -> usize {
        self.labels().into_iter().filter(|&p| p).count()
    }

    pub fn matrix(&self) -> FeatureMatrix {
        let rows: Vec<&[f64]> = self
            .records
            .iter()
            .map(|(_, f)| f.values.as_slice())
            .collect();
        FeatureMatrix::from_rows(self.variant.feature_count(), &rows).expect("validated lengths")
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            variant: self.variant,
            records: indices.iter().map(|&i| self.records[i].clone()).collect(),
        }
    }

    /// Records with `lo <= age <= hi`, in their original order.
    pub fn slice_by_age(&self, lo: u8, hi: u8) -> Result<Dataset> {
        if !(MIN_AGE <= lo && lo <= hi && hi <= MAX_AGE) {
            return Err(Error::InvalidArgument(format!(
                "age range {lo}..={hi} must lie within {MIN_AGE}..={MAX_AGE}"
            )));
        }
        Ok(Dataset {
            variant: self.variant,
            records: self
                .records
                .iter()
                .filter(|(r, _)| (lo..=hi).contains(&r.age))
                .cloned()
                .collect(),
        })
    }

    /// Restrict every record to the questions of a smaller variant.
    pub fn project(&self, target: AgeVariant) -> Result<Dataset> {
        let records = self
            .records
            .iter()
            .map(|(r, f)| Ok((r.clone(), f.project(target)?)))
            .collect::<Result<_>>()?;
        Ok(Dataset {
            variant: target,
            records,
        })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows_csv(out, self.variant, &self.records)
    }
}

pub fn read_dataset_csv(path: impl AsRef<Path>, variant: AgeVariant) -> Result<Dataset> {
    read_dataset(std::fs::File::open(path)?, variant)
}

/// Parse a labeled dataset. Unlabeled rows are rejected.
pub fn read_dataset<R: Read>(input: R, variant: AgeVariant) -> Result<Dataset> {
    let rows = read_rows(input, variant, true)?;
    Ok(Dataset {
        variant,
        records: rows,
    })
}

/// Parse feature rows where the label column may be empty.
pub fn read_feature_rows<R: Read>(
    input: R,
    variant: AgeVariant,
) -> Result<Vec<(ParticipantRecord, FeatureVector)>> {
    read_rows(input, variant, false)
}

pub fn csv_header(variant: AgeVariant) -> Vec<String> {
    let mut cols = vec!["id".to_string(), "label".to_string()];
    cols.extend(variant.column_names());
    cols
}

fn read_rows<R: Read>(
    input: R,
    variant: AgeVariant,
    require_label: bool,
) -> Result<Vec<(ParticipantRecord, FeatureVector)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let expected = csv_header(variant);
    let header = reader.headers().map_err(|e| csv_error(1, e))?.clone();
    if header.len() != expected.len() {
        return Err(Error::RowLength {
            line: 1,
            expected: variant.feature_count(),
            found: header.len().saturating_sub(ID_COLUMNS),
        });
    }
    if let Some((got, want)) = header.iter().zip(&expected).find(|(g, w)| g != w) {
        return Err(Error::Header {
            variant: variant.to_string(),
            message: format!("found column `{got}` where `{want}` was expected"),
        });
    }

    let mut rows = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| csv_error(0, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != expected.len() {
            return Err(Error::RowLength {
                line,
                expected: variant.feature_count(),
                found: record.len().saturating_sub(ID_COLUMNS),
            });
        }
        rows.push(parse_row(&record, line, variant, require_label)?);
    }
    Ok(rows)
}

fn parse_row(
    record: &csv::StringRecord,
    line: u64,
    variant: AgeVariant,
    require_label: bool,
) -> Result<(ParticipantRecord, FeatureVector)> {
    let malformed = |message: String| Error::MalformedRow { line, message };
    let label = match &record[1] {
        "" if !require_label => None,
        token => Some(token.parse::<Label>().map_err(|_| Error::UnknownLabel {
            line,
            token: token.to_string(),
        })?),
    };
    let gender = match &record[2] {
        "0" | "female" | "Female" => Gender::Female,
        "1" | "male" | "Male" => Gender::Male,
        other => return Err(malformed(format!("bad gender `{other}`"))),
    };
    let flag = |col: usize, name: &str| -> Result<bool> {
        match &record[col] {
            "1" | "yes" | "Yes" | "true" => Ok(true),
            "0" | "no" | "No" | "false" => Ok(false),
            other => Err(malformed(format!("bad {name} value `{other}`"))),
        }
    };
    let native = flag(3, "native")?;
    let lang_fail = flag(4, "lang_fail")?;
    let age: u8 = record[5]
        .parse()
        .map_err(|_| malformed(format!("bad age `{}`", &record[5])))?;
    let participant = ParticipantRecord {
        id: record[0].to_string(),
        gender,
        native_spanish_monolingual: native,
        failed_language_subject: lang_fail,
        age,
        label,
    };
    participant
        .validate()
        .map_err(|e| malformed(e.to_string()))?;

    let mut values = participant.demographic_features().to_vec();
    for (col, cell) in record
        .iter()
        .enumerate()
        .skip(ID_COLUMNS + DEMOGRAPHIC_FEATURES)
    {
        let v: f64 = cell
            .parse()
            .map_err(|_| malformed(format!("column {}: `{cell}` is not a number", col + 1)))?;
        if !v.is_finite() {
            return Err(malformed(format!("column {}: non-finite value", col + 1)));
        }
        values.push(v);
    }
    Ok((participant, FeatureVector::new(variant, values)?))
}

pub fn write_rows_csv<W: Write>(
    out: W,
    variant: AgeVariant,
    rows: &[(ParticipantRecord, FeatureVector)],
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer
        .write_record(csv_header(variant))
        .map_err(|e| csv_error(0, e))?;
    let mut cells: Vec<String> = Vec::with_capacity(ID_COLUMNS + variant.feature_count());
    for (rec, fv) in rows {
        cells.clear();
        cells.push(rec.id.clone());
        cells.push(rec.label.map(|l| l.token().to_string()).unwrap_or_default());
        cells.extend(fv.values.iter().map(|v| v.to_string()));
        writer.write_record(&cells).map_err(|e| csv_error(0, e))?;
    }
    writer.flush()?;
    Ok(())
}

fn csv_error(line: u64, e: csv::Error) -> Error {
    let line = e.position().map_or(line, |p| p.line());
    Error::MalformedRow {
        line,
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_text(rows: &[(&str, &str, u8)], variant: AgeVariant) -> String {
        let mut s = csv_header(variant).join(",");
        s.push('\n');
        for (id, label, age) in rows {
            s.push_str(&format!("{id},{label},1,1,0,{age}"));
            for _ in 0..(variant.feature_count() - 4) {
                s.push_str(",0.5");
            }
            s.push('\n');
        }
        s
    }

    #[test]
    fn reads_three_rows() {
        let text = csv_text(
            &[("a", "dys", 9), ("b", "nodys", 10), ("c", "nodys", 12)],
            AgeVariant::Full,
        );
        let ds = read_dataset(text.as_bytes(), AgeVariant::Full).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.labels(), vec![true, false, false]);
        assert_eq!(ds.records[0].1.values.len(), 196);
        assert_eq!(&ds.records[0].1.values[..4], &[1.0, 1.0, 0.0, 9.0]);
    }

    #[test]
    fn rejects_age_25() {
        let text = csv_text(&[("a", "dys", 25)], AgeVariant::Full);
        let err = read_dataset(text.as_bytes(), AgeVariant::Full).unwrap_err();
        assert!(matches!(err, Error::MalformedRow { line: 2, .. }), "{err}");
    }

    #[test]
    fn rejects_short_header() {
        let mut text = csv_text(&[("a", "dys", 9)], AgeVariant::Full);
        // drop the final column from header and row
        text = text
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string() + "\n")
            .collect();
        let err = read_dataset(text.as_bytes(), AgeVariant::Full).unwrap_err();
        assert!(
            matches!(
                err,
                Error::RowLength {
                    expected: 196,
                    found: 195,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn rejects_short_row() {
        let mut text = csv_text(&[("a", "dys", 9)], AgeVariant::Young7_8);
        text.truncate(text.trim_end().rfind(',').unwrap());
        let err = read_dataset(text.as_bytes(), AgeVariant::Young7_8).unwrap_err();
        assert!(matches!(err, Error::RowLength { line: 2, .. }), "{err}");
    }

    #[test]
    fn rejects_unknown_label() {
        let text = csv_text(&[("a", "maybe", 9)], AgeVariant::Full);
        assert!(matches!(
            read_dataset(text.as_bytes(), AgeVariant::Full),
            Err(Error::UnknownLabel { line: 2, .. })
        ));
        let text = csv_text(&[("a", "", 9)], AgeVariant::Full);
        assert!(read_dataset(text.as_bytes(), AgeVariant::Full).is_err());
        let rows = read_feature_rows(text.as_bytes(), AgeVariant::Full).unwrap();
        assert_eq!(rows[0].0.label, None);
    }

    #[test]
    fn slice_partitions() {
        let rows: Vec<(String, &str, u8)> = (0..10)
            .map(|i| {
                (
                    format!("r{i}"),
                    if i % 3 == 0 { "dys" } else { "nodys" },
                    7 + i as u8,
                )
            })
            .collect();
        let borrowed: Vec<(&str, &str, u8)> =
            rows.iter().map(|(a, b, c)| (a.as_str(), *b, *c)).collect();
        let ds = read_dataset(
            csv_text(&borrowed, AgeVariant::Full).as_bytes(),
            AgeVariant::Full,
        )
        .unwrap();
        let teen = ds.slice_by_age(12, 17).unwrap();
        assert!(teen.records.iter().all(|(r, _)| r.age >= 12));
        assert_eq!(
            teen.len(),
            ds.records.iter().filter(|(r, _)| r.age >= 12).count()
        );
        let young = ds.slice_by_age(7, 8).unwrap();
        let rest = ds.slice_by_age(9, 17).unwrap();
        assert_eq!(young.len() + rest.len(), ds.len());
        assert!(ds.slice_by_age(6, 9).is_err());
        assert!(ds.slice_by_age(10, 9).is_err());
    }

    #[test]
    fn csv_roundtrip_is_field_identical() {
        let text = csv_text(&[("a", "dys", 9), ("b", "nodys", 17)], AgeVariant::Mid9_11);
        let ds = read_dataset(text.as_bytes(), AgeVariant::Mid9_11).unwrap();
        let mut out = Vec::new();
        ds.write_csv(&mut out).unwrap();
        let again = read_dataset(&out[..], AgeVariant::Mid9_11).unwrap();
        assert_eq!(again, ds);
    }
}
