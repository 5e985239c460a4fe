//! Per-patient unjust-term rates, exceedance thresholds and the binary
//! analysis dataset.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{AgeGroup, Gender, Patient, PatientKey, Race};
use crate::lexicon::{Lexicon, Matcher, PerCategory, TermCategory};
use crate::{BinaryDataset, Error, Result};

pub const GENDER_COLUMN: &str = "is_marginalized_gender";
pub const RACE_COLUMN: &str = "is_marginalized_race";
pub const AGE_COLUMN: &str = "is_marginalized_age";
pub const COARSE_COLUMN: &str = "is_marginalized";
pub const OUTCOME_COLUMN: &str = "is_testinj";

/// Average term count per record, per category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatientRates {
    pub key: PatientKey,
    pub rates: PerCategory<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    /// Nearest-rank 90th percentile of the per-patient rates.
    Percentile90,
    /// Largest per-patient rate.
    Maximum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPolicy {
    pub mode: ThresholdMode,
    pub fraction: f64,
}

impl Default for ThresholdPolicy {
    fn default() -> Self {
        ThresholdPolicy { mode: ThresholdMode::Percentile90, fraction: 0.10 }
    }
}

impl ThresholdPolicy {
    pub fn new(mode: ThresholdMode, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::Validation(format!("threshold fraction must be in (0, 1], got {fraction}")));
        }
        Ok(ThresholdPolicy { mode, fraction })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    #[default]
    Fine,
    Coarse,
}

/// How the four category indicators combine into `is_testinj`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeRule {
    /// Any category exceeds its threshold.
    #[default]
    Or,
    /// Every category exceeds its threshold.
    And,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LabelConfig {
    pub policy: ThresholdPolicy,
    pub granularity: Granularity,
    pub outcome: OutcomeRule,
}

pub(crate) fn rates_with(patient: &Patient, matcher: &Matcher) -> PatientRates {
    let mut totals = PerCategory::<u64>::default();
    for note in &patient.notes {
        let c = matcher.count(note);
        for cat in TermCategory::ALL {
            totals[cat] += c[cat];
        }
    }
    let n = patient.record_count().max(1) as f64;
    PatientRates { key: patient.key.clone(), rates: PerCategory::from_fn(|c| totals[c] as f64 / n) }
}

/// Summed category counts over the patient's notes divided by the number of
/// merged records.
pub fn compute_rates(patient: &Patient, lex: &Lexicon) -> PatientRates {
    rates_with(patient, &Matcher::new(lex))
}

/// Threshold for one category's population of per-patient rates.
pub fn category_threshold(rates: &[f64], policy: ThresholdPolicy) -> Result<f64> {
    if rates.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let base = match policy.mode {
        ThresholdMode::Maximum => rates.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ThresholdMode::Percentile90 => {
            let mut sorted = rates.to_vec();
            sorted.sort_by(f64::total_cmp);
            // ceil(0.9 n), 1-based
            let rank = (9 * sorted.len()).div_ceil(10);
            sorted[rank - 1]
        }
    };
    Ok(policy.fraction * base)
}

pub fn thresholds(rates: &[PerCategory<f64>], policy: ThresholdPolicy) -> Result<PerCategory<f64>> {
    let mut out = PerCategory::default();
    for c in TermCategory::ALL {
        let column: Vec<f64> = rates.iter().map(|r| r[c]).collect();
        out[c] = category_threshold(&column, policy)?;
    }
    Ok(out)
}

/// A category triggers when its rate strictly exceeds the threshold.
pub fn indicators(rates: &PerCategory<f64>, thresholds: &PerCategory<f64>) -> PerCategory<u8> {
    PerCategory::from_fn(|c| u8::from(rates[c] > thresholds[c]))
}

pub fn outcome(ind: &PerCategory<u8>, rule: OutcomeRule) -> u8 {
    match rule {
        OutcomeRule::Or => u8::from(ind.0.contains(&1)),
        OutcomeRule::And => u8::from(ind.0.iter().all(|&v| v == 1)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DemographicFlags {
    pub gender: u8,
    pub race: u8,
    pub age: u8,
}

pub fn demographic_flags(gender: Gender, race: Race, age: AgeGroup) -> DemographicFlags {
    DemographicFlags {
        gender: u8::from(gender == Gender::Female),
        race: u8::from(matches!(race, Race::Black | Race::Latino)),
        age: u8::from(matches!(age, AgeGroup::Child | AgeGroup::Senior)),
    }
}

/// Female; Black or Latino; child or senior.
pub fn binarize_demographics(patient: &Patient) -> DemographicFlags {
    demographic_flags(patient.key.gender, patient.key.race, patient.age_group)
}

pub fn coarse_marginalization(flags: DemographicFlags) -> u8 {
    flags.gender | flags.race | flags.age
}

/// Column names of the dataset for a granularity, in export order.
pub fn dataset_columns(granularity: Granularity) -> Vec<String> {
    let mut names: Vec<&str> = match granularity {
        Granularity::Fine => vec![GENDER_COLUMN, RACE_COLUMN, AGE_COLUMN],
        Granularity::Coarse => vec![COARSE_COLUMN],
    };
    names.extend(TermCategory::ALL.map(TermCategory::column));
    names.push(OUTCOME_COLUMN);
    names.into_iter().map(String::from).collect()
}

/// Assembles binary rows from demographic flags and rates, thresholding
/// each category over the whole population.
pub fn dataset_from_rates(
    flags: &[DemographicFlags],
    rates: &[PerCategory<f64>],
    config: &LabelConfig,
) -> Result<(BinaryDataset, PerCategory<f64>)> {
    if flags.len() != rates.len() {
        return Err(Error::Validation("flags and rates differ in length".into()));
    }
    let limits = thresholds(rates, config.policy)?;
    let rows: Vec<Vec<u8>> = flags
        .iter()
        .zip(rates)
        .map(|(f, r)| {
            let ind = indicators(r, &limits);
            let mut row = match config.granularity {
                Granularity::Fine => vec![f.gender, f.race, f.age],
                Granularity::Coarse => vec![coarse_marginalization(*f)],
            };
            row.extend(ind.0);
            row.push(outcome(&ind, config.outcome));
            row
        })
        .collect();
    let ds = BinaryDataset::from_rows(dataset_columns(config.granularity), &rows)?;
    Ok((ds, limits))
}

/// Everything produced by labeling a population.
#[derive(Debug, Clone)]
pub struct Labeling {
    pub dataset: BinaryDataset,
    pub rates: Vec<PatientRates>,
    pub thresholds: PerCategory<f64>,
    pub config: LabelConfig,
}

pub fn label(patients: &[Patient], lex: &Lexicon, config: &LabelConfig) -> Result<Labeling> {
    if patients.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let matcher = Matcher::new(lex);
    let rates: Vec<PatientRates> = patients.par_iter().map(|p| rates_with(p, &matcher)).collect();
    let flags: Vec<DemographicFlags> = patients.iter().map(binarize_demographics).collect();
    let raw: Vec<PerCategory<f64>> = rates.iter().map(|r| r.rates).collect();
    let (dataset, thresholds) = dataset_from_rates(&flags, &raw, config)?;
    Ok(Labeling { dataset, rates, thresholds, config: *config })
}

pub fn build_dataset(patients: &[Patient], lex: &Lexicon, config: &LabelConfig) -> Result<BinaryDataset> {
    Ok(label(patients, lex, config)?.dataset)
}

impl Labeling {
    /// Diagnostic CSV of per-patient rates.
    pub fn write_rates_csv<W: Write>(&self, patients: &[Patient], w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["patient_id", "gender", "race", "diagnosis", "age_group", "record_count"];
        header.extend(TermCategory::ALL.map(TermCategory::name));
        wtr.write_record(&header)?;
        for (p, r) in patients.iter().zip(&self.rates) {
            let mut row = vec![
                p.key.patient_id.clone(),
                p.key.gender.to_string(),
                p.key.race.to_string(),
                p.key.diagnosis.clone(),
                p.age_group.to_string(),
                p.record_count().to_string(),
            ];
            row.extend(r.rates.0.iter().map(f64::to_string));
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn thresholds_json(&self) -> serde_json::Value {
        let per: serde_json::Map<String, serde_json::Value> =
            self.thresholds.iter().map(|(c, v)| (c.name().to_string(), v.into())).collect();
        serde_json::json!({
            "mode": self.config.policy.mode,
            "fraction": self.config.policy.fraction,
            "granularity": self.config.granularity,
            "outcome": self.config.outcome,
            "thresholds": per,
        })
    }
}
