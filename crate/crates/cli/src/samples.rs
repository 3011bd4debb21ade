//! Registry of diamond samples used to label outputs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const BUNDLED_REGISTRY: &str = include_str!("../data/samples.csv");

const COLUMNS: [&str; 6] = [
    "label",
    "edge_orientation",
    "fluence_cm2",
    "anneal_temperature_c",
    "anneal_time_min",
    "nv_concentration_cm3",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub label: String,
    pub edge_orientation: String,
    pub fluence_cm2: f64,
    pub anneal_temperature_c: f64,
    pub anneal_time_min: f64,
    pub nv_concentration_cm3: f64,
}

/// Parses a registry, collecting every problem instead of stopping at the
/// first one.
pub fn parse_registry(text: &str, origin: &str) -> CliResult<Vec<SampleRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::Data(format!("{origin}: {e}")))?
        .clone();
    let mut problems = Vec::new();
    let index: BTreeMap<&str, usize> = COLUMNS
        .iter()
        .filter_map(|c| {
            let found = headers.iter().position(|h| h.eq_ignore_ascii_case(c));
            if found.is_none() {
                problems.push(format!("header: missing column {c}"));
            }
            found.map(|k| (*c, k))
        })
        .collect();
    if !problems.is_empty() {
        return Err(CliError::Data(format!(
            "{origin}:\n  {}",
            problems.join("\n  ")
        )));
    }

    let mut records = Vec::new();
    let mut first_seen: BTreeMap<String, u64> = BTreeMap::new();
    for row in reader.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                problems.push(e.to_string());
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line());
        let text = |c: &str| row.get(index[c]).unwrap_or("");
        let mut number = |c: &str, positive: bool| -> f64 {
            let raw = text(c);
            match raw.parse::<f64>() {
                Ok(v) if !v.is_finite() => {
                    problems.push(format!("line {line}: {c} must be finite, got {raw:?}"));
                    f64::NAN
                }
                Ok(v) if positive && v <= 0.0 => {
                    problems.push(format!("line {line}: {c} must be > 0, got {raw}"));
                    v
                }
                Ok(v) => v,
                Err(_) => {
                    problems.push(format!("line {line}: {c} is not a number: {raw:?}"));
                    f64::NAN
                }
            }
        };
        let record = SampleRecord {
            label: text("label").to_string(),
            edge_orientation: text("edge_orientation").to_string(),
            fluence_cm2: number("fluence_cm2", true),
            anneal_temperature_c: number("anneal_temperature_c", false),
            anneal_time_min: number("anneal_time_min", false),
            nv_concentration_cm3: number("nv_concentration_cm3", true),
        };
        if record.label.is_empty() {
            problems.push(format!("line {line}: label is empty"));
        } else if let Some(first) = first_seen.get(&record.label) {
            problems.push(format!(
                "line {line}: duplicate label {:?} (first on line {first})",
                record.label
            ));
        } else {
            first_seen.insert(record.label.clone(), line);
        }
        records.push(record);
    }
    if problems.is_empty() {
        Ok(records)
    } else {
        Err(CliError::Data(format!(
            "{origin}:\n  {}",
            problems.join("\n  ")
        )))
    }
}

pub fn find<'a>(records: &'a [SampleRecord], label: &str) -> CliResult<&'a SampleRecord> {
    records.iter().find(|r| r.label == label).ok_or_else(|| {
        let known: Vec<&str> = records.iter().map(|r| r.label.as_str()).collect();
        CliError::config(format!(
            "sample: unknown sample {label:?}, registry has {}",
            known.join(", ")
        ))
    })
}
