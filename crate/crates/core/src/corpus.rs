//! Clinical record ingestion: race and age coding, filtering and merging of
//! multi-visit records into patients.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const DEFAULT_RACE_MAP: &str = include_str!("../data/race_map.tsv");

/// One row of the input CSV:
/// `patient_id,gender,ethnicity,age,diagnosis,note_text`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub patient_id: String,
    pub gender: String,
    pub ethnicity: String,
    #[serde(rename = "age")]
    pub age_years: f64,
    pub diagnosis: String,
    pub note_text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Race {
    Asian,
    Black,
    Latino,
    White,
}

impl fmt::Display for Race {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Race::Asian => "Asian",
            Race::Black => "Black",
            Race::Latino => "Latino",
            Race::White => "White",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Female,
    Male,
}

impl FromStr for Gender {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "f" | "female" => Ok(Gender::Female),
            "m" | "male" => Ok(Gender::Male),
            other => Err(Error::Validation(format!("unrecognized gender `{other}`"))),
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gender::Female => "Female",
            Gender::Male => "Male",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgeGroup {
    Child,
    Adult,
    Senior,
}

impl fmt::Display for AgeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AgeGroup::Child => "Child",
            AgeGroup::Adult => "Adult",
            AgeGroup::Senior => "Senior",
        })
    }
}

/// Child below 16, adult 16 through 64, senior from 65 on. Masked ages
/// above 89 are taken as given.
pub fn age_group(age_years: f64) -> Result<AgeGroup> {
    if age_years.is_nan() || age_years < 0.0 {
        return Err(Error::Validation(format!("age must be non-negative, got {age_years}")));
    }
    Ok(if age_years < 16.0 {
        AgeGroup::Child
    } else if age_years < 65.0 {
        AgeGroup::Adult
    } else {
        AgeGroup::Senior
    })
}

/// Ordered ethnicity-prefix table. The first case-insensitive prefix match
/// decides; `None` marks ethnicities excluded from analysis.
#[derive(Debug, Clone)]
pub struct RaceCoding {
    rules: Vec<(String, Option<Race>)>,
}

impl Default for RaceCoding {
    fn default() -> Self {
        RaceCoding::from_tsv("race_map.tsv", DEFAULT_RACE_MAP).expect("bundled race map parses")
    }
}

impl RaceCoding {
    /// Parses `prefix<TAB>race` lines where race is one of
    /// `asian|black|latino|white|excluded`.
    pub fn from_tsv(source_name: &str, text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (prefix, race) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(source_name, i + 1, 1, "expected `prefix<TAB>race`"))?;
            let race = match race.trim().to_ascii_lowercase().as_str() {
                "asian" => Some(Race::Asian),
                "black" => Some(Race::Black),
                "latino" | "hispanic" => Some(Race::Latino),
                "white" => Some(Race::White),
                "excluded" => None,
                other => {
                    return Err(Error::parse(source_name, i + 1, prefix.len() + 2, format!("unknown race `{other}`")))
                }
            };
            rules.push((prefix.trim().to_lowercase(), race));
        }
        Ok(RaceCoding { rules })
    }

    /// `None` when the ethnicity is excluded or not codable.
    pub fn code(&self, ethnicity: &str) -> Option<Race> {
        let e = ethnicity.trim().to_lowercase();
        self.rules.iter().find(|(p, _)| e.starts_with(p.as_str())).and_then(|(_, r)| *r)
    }
}

/// Codes an ethnicity string with the bundled prefix table.
pub fn code_race(ethnicity: &str) -> Option<Race> {
    RaceCoding::default().code(ethnicity)
}

fn is_newborn(diagnosis: &str) -> bool {
    diagnosis.trim().eq_ignore_ascii_case("newborn")
}

/// Drops records whose race cannot be coded, then every record of a patient
/// whose only diagnosis is "newborn". Order is otherwise preserved.
pub fn filter_records(records: Vec<RawRecord>, coding: &RaceCoding) -> Vec<RawRecord> {
    let coded: Vec<RawRecord> = records.into_iter().filter(|r| coding.code(&r.ethnicity).is_some()).collect();
    let with_other_diagnosis: HashSet<&str> = coded
        .iter()
        .filter(|r| !is_newborn(&r.diagnosis))
        .map(|r| r.patient_id.as_str())
        .collect();
    let keep: Vec<bool> = coded.iter().map(|r| with_other_diagnosis.contains(r.patient_id.as_str())).collect();
    coded.into_iter().zip(keep).filter_map(|(r, k)| k.then_some(r)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PatientKey {
    pub patient_id: String,
    pub gender: Gender,
    pub race: Race,
    pub diagnosis: String,
}

/// Records merged on (patient id, gender, race, diagnosis).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Patient {
    pub key: PatientKey,
    /// Age group of the first merged record.
    pub age_group: AgeGroup,
    pub notes: Vec<String>,
}

impl Patient {
    pub fn record_count(&self) -> usize {
        self.notes.len()
    }
}

/// Groups filtered records into patients. Age is not part of the key; the
/// first record's age group is kept. Output is in first-appearance order.
pub fn merge_patients(records: &[RawRecord], coding: &RaceCoding) -> Result<Vec<Patient>> {
    let mut slot: HashMap<PatientKey, usize> = HashMap::new();
    let mut patients: Vec<Patient> = Vec::new();
    for r in records {
        if r.patient_id.trim().is_empty() {
            return Err(Error::Validation("record with empty patient_id".into()));
        }
        let race = coding
            .code(&r.ethnicity)
            .ok_or_else(|| Error::Validation(format!("ethnicity `{}` is not codable", r.ethnicity)))?;
        let key = PatientKey {
            patient_id: r.patient_id.clone(),
            gender: r.gender.parse()?,
            race,
            diagnosis: r.diagnosis.trim().to_string(),
        };
        let group = age_group(r.age_years)?;
        match slot.get(&key) {
            Some(&i) => patients[i].notes.push(r.note_text.clone()),
            None => {
                slot.insert(key.clone(), patients.len());
                patients.push(Patient { key, age_group: group, notes: vec![r.note_text.clone()] });
            }
        }
    }
    Ok(patients)
}

/// Reads records from a CSV with a header row naming at least
/// `patient_id,gender,ethnicity,age,diagnosis,note_text`.
pub fn read_records<R: Read>(reader: R) -> Result<Vec<RawRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn read_records_path(path: &Path) -> Result<Vec<RawRecord>> {
    read_records(std::fs::File::open(path)?)
}

/// A manifest lists CSV paths, one per line, relative to the manifest's
/// directory. Blank lines and `#` comments are ignored.
pub fn manifest_paths(manifest: &Path) -> Result<Vec<PathBuf>> {
    let text = std::fs::read_to_string(manifest)?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| base.join(l))
        .collect())
}

/// Concatenates the records of several CSV files in order.
pub fn read_all(paths: &[PathBuf]) -> Result<Vec<RawRecord>> {
    let mut out = Vec::new();
    for p in paths {
        out.extend(read_records_path(p)?);
    }
    Ok(out)
}

/// Patient counts per (race, gender, age group), sorted.
pub fn group_counts(patients: &[Patient]) -> Vec<((Race, Gender, AgeGroup), usize)> {
    let mut counts: HashMap<(Race, Gender, AgeGroup), usize> = HashMap::new();
    for p in patients {
        *counts.entry((p.key.race, p.key.gender, p.age_group)).or_default() += 1;
    }
    let mut v: Vec<_> = counts.into_iter().collect();
    v.sort();
    v
}
