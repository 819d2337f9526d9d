//! CSV ingestion.
//!
//! The one ingestion format is CSV with a header row. Columns are
//! resolved by name through a [`ColumnMap`]; rows with a missing or
//! unparseable mapped field are dropped and counted rather than failing
//! the run. Without a weight column every record gets weight 1.

use crate::error::CliError;
use pairdiff_core::sample::{PairedDataset, PairedRecord};
use std::collections::BTreeSet;
use std::path::Path;

/// Names of the mapped columns: one or more covariates (order matters —
/// it changes the Hilbert traversal and hence the scores), the two
/// response columns, and an optional weight column.
#[derive(Debug, Clone)]
pub struct ColumnMap {
    pub covariate_columns: Vec<String>,
    pub q_column: String,
    pub r_column: String,
    pub weight_column: Option<String>,
}

impl ColumnMap {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.covariate_columns.is_empty() {
            return Err(CliError::Schema(
                "need at least one covariate column".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        let mut all: Vec<&String> = self.covariate_columns.iter().collect();
        all.push(&self.q_column);
        all.push(&self.r_column);
        if let Some(w) = &self.weight_column {
            all.push(w);
        }
        for name in all {
            if !seen.insert(name) {
                return Err(CliError::Schema(format!("duplicate column {name:?}")));
            }
        }
        Ok(())
    }
}

/// Ingestion result: records in input row order (scores provisionally set
/// to the first covariate; the analysis pipeline replaces them with
/// Hilbert scores), the raw covariate matrix in mapped column order, and
/// the number of dropped rows.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub dataset: PairedDataset,
    pub covariates: Vec<Vec<f64>>,
    pub dropped: usize,
}

fn parse_field(s: &str) -> Option<f64> {
    let t = s.trim();
    if t.is_empty() {
        return None;
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn ingest_csv(path: &Path, map: &ColumnMap) -> Result<Ingested, CliError> {
    map.validate()?;
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize, CliError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Schema(format!("column {name:?} not found in header")))
    };
    let cov_idx: Vec<usize> = map
        .covariate_columns
        .iter()
        .map(|c| col(c))
        .collect::<Result<_, _>>()?;
    let q_idx = col(&map.q_column)?;
    let r_idx = col(&map.r_column)?;
    let w_idx = map.weight_column.as_deref().map(col).transpose()?;

    let mut records = Vec::new();
    let mut covariates = Vec::new();
    let mut dropped = 0usize;
    for row in reader.records() {
        let row = row?;
        let field = |i: usize| row.get(i).and_then(parse_field);
        let covs: Option<Vec<f64>> = cov_idx.iter().map(|&i| field(i)).collect();
        let q = field(q_idx);
        let r = field(r_idx);
        let w = match w_idx {
            Some(i) => field(i),
            None => Some(1.0),
        };
        match (covs, q, r, w) {
            (Some(covs), Some(q), Some(r), Some(w)) => {
                records.push(PairedRecord::new(covs[0], q, r, w));
                covariates.push(covs);
            }
            _ => dropped += 1,
        }
    }
    if records.is_empty() {
        return Err(CliError::EmptyInput);
    }
    Ok(Ingested {
        dataset: PairedDataset::new(records),
        covariates,
        dropped,
    })
}
