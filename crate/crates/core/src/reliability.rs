//! Classical reliability-diagram baseline.
//!
//! A reliability diagram partitions the score axis into bins and plots
//! both populations' per-bin weighted mean responses against the per-bin
//! weighted mean score. Two binning strategies are provided: the
//! traditional equal-width bins, and bins equalizing the per-bin noise
//! level `v = (sum of squared weights) / (square of summed weights)` so
//! that responses average away about equally in every bin.

use crate::sample::{AggregatedSamples, CanonicalDataset};
use crate::sum::NeumaierSum;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BinError {
    #[error("invalid bin count {requested}: {reason}")]
    InvalidBinCount { requested: usize, reason: String },
    #[error("degenerate score range: all scores equal")]
    DegenerateRange,
}

/// Boundaries of `bins` score bins: `bins - 1` strictly increasing finite
/// interior boundaries, with the outermost bins open to infinity. A score
/// `s` belongs to bin `i` when `B_{i-1} < s <= B_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinBoundaries {
    interior: Vec<f64>,
}

impl BinBoundaries {
    pub fn interior(&self) -> &[f64] {
        &self.interior
    }

    /// Number of bins.
    pub fn len(&self) -> usize {
        self.interior.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the bin containing `score`.
    pub fn bin_of(&self, score: f64) -> usize {
        self.interior.partition_point(|&b| b < score)
    }
}

/// Equal-width boundaries over the score range `[S_1, S_m]`.
pub fn bins_equispaced(agg: &AggregatedSamples, bins: usize) -> Result<BinBoundaries, BinError> {
    if bins < 1 {
        return Err(BinError::InvalidBinCount {
            requested: bins,
            reason: "need at least one bin".into(),
        });
    }
    let lo = agg.scores()[0];
    let hi = *agg.scores().last().expect("nonempty aggregate");
    if bins > 1 && hi == lo {
        return Err(BinError::DegenerateRange);
    }
    let width = (hi - lo) / bins as f64;
    Ok(BinBoundaries {
        interior: (1..bins).map(|i| lo + i as f64 * width).collect(),
    })
}

/// Boundaries equalizing the per-bin noise level `v = sum(w^2)/sum(w)^2`.
///
/// Groups are consumed left to right; the current bin closes once its `v`
/// falls to or below the `v` a bin would have if the remaining groups were
/// spread evenly over the remaining bins (and always early enough that
/// every remaining bin gets at least one group). Under uniform weights
/// with `bins` dividing the group count this reproduces the equal-count
/// partition exactly. Boundaries sit at midpoints between the last score
/// of one bin and the first score of the next, which is exactly the set
/// of points inducing the chosen partition.
pub fn bins_equivariance(agg: &AggregatedSamples, bins: usize) -> Result<BinBoundaries, BinError> {
    let m = agg.len();
    if bins < 1 || bins > m {
        return Err(BinError::InvalidBinCount {
            requested: bins,
            reason: format!("need between 1 and {m} bins"),
        });
    }
    let w = agg.weight_total();
    // Suffix totals of w and w^2 for the even-spread target.
    let mut suffix_w = vec![0.0; m + 1];
    let mut suffix_w2 = vec![0.0; m + 1];
    for j in (0..m).rev() {
        suffix_w[j] = suffix_w[j + 1] + w[j];
        suffix_w2[j] = suffix_w2[j + 1] + w[j] * w[j];
    }

    let mut interior = Vec::with_capacity(bins - 1);
    let mut start = 0;
    for bin in 0..bins {
        let bins_after = bins - bin - 1;
        let mut end = start;
        let mut bin_w = 0.0;
        let mut bin_w2 = 0.0;
        loop {
            bin_w += w[end];
            bin_w2 += w[end] * w[end];
            end += 1;
            let remaining = m - end;
            if remaining == bins_after {
                break;
            }
            if bins_after == 0 {
                continue;
            }
            let v_bin = bin_w2 / (bin_w * bin_w);
            let v_even = bins_after as f64 * suffix_w2[end] / (suffix_w[end] * suffix_w[end]);
            if v_bin <= v_even {
                break;
            }
        }
        if bins_after > 0 {
            interior.push((agg.scores()[end - 1] + agg.scores()[end]) / 2.0);
        }
        start = end;
    }
    Ok(BinBoundaries { interior })
}

/// Per-bin weighted means of score and both responses; bins that receive
/// no records are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityDiagram {
    s_mean: Vec<f64>,
    r_mean: Vec<f64>,
    q_mean: Vec<f64>,
    bin_weight: Vec<f64>,
    boundaries: BinBoundaries,
}

impl ReliabilityDiagram {
    /// Number of nonempty bins.
    pub fn len(&self) -> usize {
        self.s_mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_mean.is_empty()
    }

    pub fn s_mean(&self) -> &[f64] {
        &self.s_mean
    }

    pub fn r_mean(&self) -> &[f64] {
        &self.r_mean
    }

    pub fn q_mean(&self) -> &[f64] {
        &self.q_mean
    }

    pub fn bin_weight(&self) -> &[f64] {
        &self.bin_weight
    }

    pub fn boundaries(&self) -> &BinBoundaries {
        &self.boundaries
    }
}

/// Bins the raw records and forms the per-bin weighted means.
pub fn diagram(dataset: &CanonicalDataset, boundaries: &BinBoundaries) -> ReliabilityDiagram {
    let bins = boundaries.len();
    let mut acc_w = vec![NeumaierSum::new(); bins];
    let mut acc_ws = vec![NeumaierSum::new(); bins];
    let mut acc_wq = vec![NeumaierSum::new(); bins];
    let mut acc_wr = vec![NeumaierSum::new(); bins];
    for rec in dataset.records() {
        let b = boundaries.bin_of(rec.score);
        acc_w[b].add(rec.weight);
        acc_ws[b].add(rec.score * rec.weight);
        acc_wq[b].add(rec.q * rec.weight);
        acc_wr[b].add(rec.r * rec.weight);
    }
    let mut s_mean = Vec::new();
    let mut r_mean = Vec::new();
    let mut q_mean = Vec::new();
    let mut bin_weight = Vec::new();
    for b in 0..bins {
        let w = acc_w[b].value();
        if w > 0.0 {
            s_mean.push(acc_ws[b].value() / w);
            q_mean.push(acc_wq[b].value() / w);
            r_mean.push(acc_wr[b].value() / w);
            bin_weight.push(w);
        }
    }
    ReliabilityDiagram {
        s_mean,
        r_mean,
        q_mean,
        bin_weight,
        boundaries: boundaries.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{aggregate, canonicalize, PairedDataset, PairedRecord};

    fn uniform_agg(scores: Vec<f64>) -> AggregatedSamples {
        let m = scores.len();
        AggregatedSamples::new(scores, vec![0.0; m], vec![0.0; m], vec![1.0; m]).unwrap()
    }

    #[test]
    fn equispaced_examples() {
        let agg = uniform_agg(vec![0.0, 3.0, 7.0, 10.0]);
        assert_eq!(bins_equispaced(&agg, 2).unwrap().interior(), &[5.0]);
        assert_eq!(bins_equispaced(&agg, 1).unwrap().interior(), &[] as &[f64]);

        let unit = uniform_agg(vec![0.0, 0.5, 1.0]);
        assert_eq!(
            bins_equispaced(&unit, 4).unwrap().interior(),
            &[0.25, 0.5, 0.75]
        );

        assert!(matches!(
            bins_equispaced(&agg, 0),
            Err(BinError::InvalidBinCount { .. })
        ));
        let flat = uniform_agg(vec![2.0]);
        assert_eq!(bins_equispaced(&flat, 2), Err(BinError::DegenerateRange));
        assert!(bins_equispaced(&flat, 1).is_ok());
    }

    #[test]
    fn equivariance_uniform_weights_equal_counts() {
        let agg = uniform_agg((0..100).map(|j| j as f64).collect());
        let bounds = bins_equivariance(&agg, 10).unwrap();
        let mut counts = vec![0usize; 10];
        for &s in agg.scores() {
            counts[bounds.bin_of(s)] += 1;
        }
        assert_eq!(counts, vec![10; 10]);
    }

    #[test]
    fn equivariance_single_bin() {
        let agg = uniform_agg(vec![1.0, 2.0, 3.0]);
        let bounds = bins_equivariance(&agg, 1).unwrap();
        assert!(bounds.interior().is_empty());
        assert_eq!(bounds.len(), 1);
    }

    /// Exhaustively-checked two-bin split of weights (4, 1, 1, 1, 1): the
    /// contiguous partition minimizing the larger noise level v is
    /// {groups 1-3} | {groups 4-5} with v = (0.5, 0.5).
    #[test]
    fn equivariance_heavy_first_group() {
        let agg = AggregatedSamples::new(
            vec![0.0, 1.0, 2.0, 3.0, 4.0],
            vec![0.0; 5],
            vec![0.0; 5],
            vec![4.0, 1.0, 1.0, 1.0, 1.0],
        )
        .unwrap();
        let bounds = bins_equivariance(&agg, 2).unwrap();
        assert_eq!(bounds.interior(), &[2.5]);
        let v1: f64 = (16.0 + 1.0 + 1.0) / (6.0 * 6.0);
        let v2: f64 = 2.0 / 4.0;
        assert_eq!(v1, 0.5);
        assert_eq!(v2, 0.5);
    }

    #[test]
    fn equivariance_bin_count_limits() {
        let agg = uniform_agg(vec![1.0, 2.0]);
        assert!(matches!(
            bins_equivariance(&agg, 3),
            Err(BinError::InvalidBinCount { .. })
        ));
        // One bin per group.
        let per_group = bins_equivariance(&agg, 2).unwrap();
        assert_eq!(per_group.interior(), &[1.5]);
    }

    #[test]
    fn diagram_single_bin_equals_global_means() {
        let dataset = PairedDataset::new(vec![
            PairedRecord::new(0.0, 1.0, 0.5, 1.0),
            PairedRecord::new(1.0, 0.0, 0.25, 3.0),
        ]);
        let canonical = canonicalize(dataset).unwrap();
        let agg = aggregate(&canonical);
        let bounds = bins_equispaced(&agg, 1).unwrap();
        let d = diagram(&canonical, &bounds);
        assert_eq!(d.len(), 1);
        // (1*1 + 0*3)/4 and (0.5*1 + 0.25*3)/4.
        assert_eq!(d.q_mean()[0], 0.25);
        assert_eq!(d.r_mean()[0], 0.3125);
        assert_eq!(d.bin_weight()[0], 4.0);
        let curve_avg = crate::cumulative::metrics(&agg).average_difference;
        assert!((d.q_mean()[0] - d.r_mean()[0] - curve_avg).abs() < 1e-15);
    }

    #[test]
    fn diagram_bin_per_group_reproduces_aggregate() {
        let dataset = PairedDataset::new(vec![
            PairedRecord::new(0.0, 0.2, 0.1, 1.0),
            PairedRecord::new(0.0, 0.6, 0.3, 1.0),
            PairedRecord::new(5.0, 0.9, 0.8, 2.0),
        ]);
        let canonical = canonicalize(dataset).unwrap();
        let agg = aggregate(&canonical);
        let bounds = bins_equivariance(&agg, 2).unwrap();
        let d = diagram(&canonical, &bounds);
        assert_eq!(d.len(), 2);
        for j in 0..2 {
            assert_eq!(d.q_mean()[j], agg.q_mean()[j]);
            assert_eq!(d.r_mean()[j], agg.r_mean()[j]);
            assert_eq!(d.s_mean()[j], agg.scores()[j]);
        }
    }

    #[test]
    fn diagram_two_records_split() {
        let dataset = PairedDataset::new(vec![
            PairedRecord::unweighted(0.0, 0.0, 1.0),
            PairedRecord::unweighted(1.0, 1.0, 0.0),
        ]);
        let canonical = canonicalize(dataset).unwrap();
        let agg = aggregate(&canonical);
        let d = diagram(&canonical, &bins_equispaced(&agg, 2).unwrap());
        assert_eq!(d.q_mean(), &[0.0, 1.0]);
        assert_eq!(d.r_mean(), &[1.0, 0.0]);
    }

    #[test]
    fn diagram_drops_empty_bins() {
        // Scores cluster at the ends, so middle equispaced bins are empty.
        let dataset = PairedDataset::new(vec![
            PairedRecord::unweighted(0.0, 0.0, 0.0),
            PairedRecord::unweighted(0.01, 0.0, 0.0),
            PairedRecord::unweighted(10.0, 0.0, 0.0),
        ]);
        let canonical = canonicalize(dataset).unwrap();
        let agg = aggregate(&canonical);
        let d = diagram(&canonical, &bins_equispaced(&agg, 10).unwrap());
        assert_eq!(d.len(), 2);
        assert!(d.s_mean().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn boundary_assignment_is_left_open() {
        // Assignment rule: B_{i-1} < s <= B_i, so a score equal to an
        // interior boundary lands in the bin to its left.
        let bounds = BinBoundaries {
            interior: vec![1.0, 2.0],
        };
        assert_eq!(bounds.bin_of(0.5), 0);
        assert_eq!(bounds.bin_of(1.0), 0);
        assert_eq!(bounds.bin_of(1.5), 1);
        assert_eq!(bounds.bin_of(2.0), 1);
        assert_eq!(bounds.bin_of(2.5), 2);
    }
}
