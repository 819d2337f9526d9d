//! Raw paired observations and their per-score weighted aggregation.
//!
//! A [`PairedRecord`] carries one score, the two population responses
//! observed at that score, and a positive weight (1 for unweighted data).
//! [`canonicalize`] validates and sorts a dataset; [`aggregate`] collapses
//! records sharing a score into per-score weighted averages, the
//! re-weighted dataset on which every downstream statistic is defined.

use crate::sum::NeumaierSum;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SampleError {
    #[error("empty dataset")]
    EmptyInput,
    #[error("invalid record at index {index}: {reason}")]
    InvalidRecord { index: usize, reason: String },
    #[error("invalid aggregate: {0}")]
    InvalidAggregate(String),
}

/// One matched pair: responses `q` and `r` observed at `score`, with a
/// strictly positive weight. All fields must be finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedRecord {
    pub score: f64,
    pub q: f64,
    pub r: f64,
    pub weight: f64,
}

impl PairedRecord {
    pub fn new(score: f64, q: f64, r: f64, weight: f64) -> Self {
        Self { score, q, r, weight }
    }

    /// Record with unit weight, the convention for unweighted samples.
    pub fn unweighted(score: f64, q: f64, r: f64) -> Self {
        Self::new(score, q, r, 1.0)
    }

    fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("score", self.score),
            ("q", self.q),
            ("r", self.r),
            ("weight", self.weight),
        ] {
            if !v.is_finite() {
                return Err(format!("nonfinite {name} ({v})"));
            }
        }
        if self.weight <= 0.0 {
            return Err(format!("nonpositive weight ({})", self.weight));
        }
        Ok(())
    }
}

/// Raw dataset in arbitrary order; validated by [`canonicalize`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairedDataset {
    pub records: Vec<PairedRecord>,
}

impl PairedDataset {
    pub fn new(records: Vec<PairedRecord>) -> Self {
        Self { records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// A nonempty dataset whose records are validated and stably sorted
/// ascending by score. Equal-score records keep their input order, which
/// is what makes perturbation-mode runs reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalDataset {
    records: Vec<PairedRecord>,
}

impl CanonicalDataset {
    pub fn records(&self) -> &[PairedRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }
}

/// Validates every record and stably sorts the dataset by score.
pub fn canonicalize(dataset: PairedDataset) -> Result<CanonicalDataset, SampleError> {
    if dataset.is_empty() {
        return Err(SampleError::EmptyInput);
    }
    for (index, rec) in dataset.records.iter().enumerate() {
        rec.validate()
            .map_err(|reason| SampleError::InvalidRecord { index, reason })?;
    }
    let mut records = dataset.records;
    records.sort_by(|a, b| a.score.total_cmp(&b.score));
    Ok(CanonicalDataset { records })
}

/// Per-unique-score weighted averages: for each of the `m` distinct
/// scores, the weighted mean responses of both populations and the total
/// weight of the group.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedSamples {
    scores: Vec<f64>,
    q_mean: Vec<f64>,
    r_mean: Vec<f64>,
    weight_total: Vec<f64>,
    grand_weight: f64,
}

impl AggregatedSamples {
    /// Builds an aggregate from parallel per-group columns, validating
    /// the type invariants (equal lengths, strictly increasing finite
    /// scores, finite means, positive weights).
    pub fn new(
        scores: Vec<f64>,
        q_mean: Vec<f64>,
        r_mean: Vec<f64>,
        weight_total: Vec<f64>,
    ) -> Result<Self, SampleError> {
        let m = scores.len();
        if m == 0 {
            return Err(SampleError::InvalidAggregate("no groups".into()));
        }
        if q_mean.len() != m || r_mean.len() != m || weight_total.len() != m {
            return Err(SampleError::InvalidAggregate(
                "column lengths differ".into(),
            ));
        }
        for j in 0..m {
            if !scores[j].is_finite() || !q_mean[j].is_finite() || !r_mean[j].is_finite() {
                return Err(SampleError::InvalidAggregate(format!(
                    "nonfinite entry in group {j}"
                )));
            }
            if !(weight_total[j] > 0.0 && weight_total[j].is_finite()) {
                return Err(SampleError::InvalidAggregate(format!(
                    "nonpositive weight in group {j}"
                )));
            }
            if j > 0 && scores[j] <= scores[j - 1] {
                return Err(SampleError::InvalidAggregate(format!(
                    "scores not strictly increasing at group {j}"
                )));
            }
        }
        let grand_weight = crate::sum::sum(weight_total.iter().copied());
        Ok(Self {
            scores,
            q_mean,
            r_mean,
            weight_total,
            grand_weight,
        })
    }

    /// Number of distinct scores.
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn q_mean(&self) -> &[f64] {
        &self.q_mean
    }

    pub fn r_mean(&self) -> &[f64] {
        &self.r_mean
    }

    pub fn weight_total(&self) -> &[f64] {
        &self.weight_total
    }

    pub fn grand_weight(&self) -> f64 {
        self.grand_weight
    }

    /// Mean response difference of group `j`.
    pub fn difference(&self, j: usize) -> f64 {
        self.q_mean[j] - self.r_mean[j]
    }

    /// Views the aggregate as a dataset with one record per group.
    /// Aggregating that dataset reproduces `self` exactly.
    pub fn to_dataset(&self) -> CanonicalDataset {
        CanonicalDataset {
            records: (0..self.len())
                .map(|j| {
                    PairedRecord::new(
                        self.scores[j],
                        self.q_mean[j],
                        self.r_mean[j],
                        self.weight_total[j],
                    )
                })
                .collect(),
        }
    }
}

/// Collapses runs of equal scores into weighted average responses.
///
/// Group membership uses exact score equality: scores are ordinal labels,
/// and merging nearby ones would silently change the group count.
pub fn aggregate(dataset: &CanonicalDataset) -> AggregatedSamples {
    let records = dataset.records();
    let mut scores = Vec::new();
    let mut q_mean = Vec::new();
    let mut r_mean = Vec::new();
    let mut weight_total = Vec::new();
    let mut grand = NeumaierSum::new();

    let mut start = 0;
    while start < records.len() {
        let score = records[start].score;
        let mut end = start;
        let mut wq = NeumaierSum::new();
        let mut wr = NeumaierSum::new();
        let mut w = NeumaierSum::new();
        while end < records.len() && records[end].score == score {
            let rec = &records[end];
            wq.add(rec.q * rec.weight);
            wr.add(rec.r * rec.weight);
            w.add(rec.weight);
            end += 1;
        }
        let group_weight = w.value();
        scores.push(score);
        q_mean.push(wq.value() / group_weight);
        r_mean.push(wr.value() / group_weight);
        weight_total.push(group_weight);
        grand.add(group_weight);
        start = end;
    }

    AggregatedSamples {
        scores,
        q_mean,
        r_mean,
        weight_total,
        grand_weight: grand.value(),
    }
}
