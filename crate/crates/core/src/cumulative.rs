//! Cumulative-difference curves and their scalar summaries.
//!
//! For aggregated samples the curve plots, against accumulated weight,
//! the running normalized sum of weighted response differences
//!
//! ```text
//! C_k = sum_{j<=k} (qmean_j - rmean_j) * w_j / W,   A_k = sum_{j<=k} w_j / W,
//! ```
//!
//! with `W` the grand weight and an implicit origin at (0, 0). The slope
//! of any secant of this graph is the weighted average response
//! difference over the score range between its endpoints. The Kuiper
//! metric is the vertical range of the graph, equivalently the largest
//! magnitude the normalized total difference attains over any contiguous
//! score interval; the Kolmogorov-Smirnov metric is the largest absolute
//! ordinate; the final ordinate is the overall average difference.

use crate::sample::AggregatedSamples;
use crate::sum::NeumaierSum;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CurveError {
    #[error("secant indices ({lo}, {hi}) invalid for a curve with {m} points")]
    IndexError { lo: usize, hi: usize, m: usize },
}

/// Cumulative-difference curve over `m` groups. The origin (0, 0) is
/// implicit, so both point lists have length `m` and the final abscissa
/// is 1. Per-group increments are kept alongside the prefix arrays so
/// that one-step secant slopes do not suffer cancellation.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeCurve {
    abscissae: Vec<f64>,
    ordinates: Vec<f64>,
    d_absc: Vec<f64>,
    d_ord: Vec<f64>,
}

impl CumulativeCurve {
    /// Number of plotted points (excluding the implicit origin).
    pub fn len(&self) -> usize {
        self.abscissae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissae.is_empty()
    }

    /// Accumulated weight fractions `A_1..A_m`, strictly increasing to 1.
    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    /// Cumulative differences `C_1..C_m`.
    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    fn point(&self, index: usize) -> (f64, f64) {
        if index == 0 {
            (0.0, 0.0)
        } else {
            (self.abscissae[index - 1], self.ordinates[index - 1])
        }
    }
}

/// Builds the cumulative-difference curve of an aggregate.
pub fn cumulative_curve(agg: &AggregatedSamples) -> CumulativeCurve {
    let m = agg.len();
    let total = agg.grand_weight();
    let mut abscissae = Vec::with_capacity(m);
    let mut ordinates = Vec::with_capacity(m);
    let mut d_absc = Vec::with_capacity(m);
    let mut d_ord = Vec::with_capacity(m);
    let mut wsum = NeumaierSum::new();
    let mut dsum = NeumaierSum::new();
    for j in 0..m {
        let w = agg.weight_total()[j];
        let t = agg.difference(j) * w;
        wsum.add(w);
        dsum.add(t);
        abscissae.push(wsum.value() / total);
        ordinates.push(dsum.value() / total);
        d_absc.push(w / total);
        d_ord.push(t / total);
    }
    CumulativeCurve {
        abscissae,
        ordinates,
        d_absc,
        d_ord,
    }
}

/// Slope of the secant line from point `lo` to point `hi` of the curve,
/// where index 0 denotes the origin: the weighted average response
/// difference over the covered score range. For adjacent indices this is
/// the group's own mean difference, evaluated from the cached increment
/// to avoid cancellation in the prefix arrays.
pub fn secant_slope(curve: &CumulativeCurve, lo: usize, hi: usize) -> Result<f64, CurveError> {
    let m = curve.len();
    if lo >= hi || hi > m {
        return Err(CurveError::IndexError { lo, hi, m });
    }
    if hi == lo + 1 {
        return Ok(curve.d_ord[lo] / curve.d_absc[lo]);
    }
    let (a_lo, c_lo) = curve.point(lo);
    let (a_hi, c_hi) = curve.point(hi);
    Ok((c_hi - c_lo) / (a_hi - a_lo))
}

/// Kuiper metric: the vertical range of the curve including the origin.
pub fn kuiper(curve: &CumulativeCurve) -> f64 {
    let mut hi = 0.0f64;
    let mut lo = 0.0f64;
    for &c in curve.ordinates() {
        hi = hi.max(c);
        lo = lo.min(c);
    }
    hi - lo
}

/// Kolmogorov-Smirnov metric: the largest absolute ordinate.
pub fn kolmogorov_smirnov(curve: &CumulativeCurve) -> f64 {
    curve
        .ordinates()
        .iter()
        .fold(0.0f64, |acc, &c| acc.max(c.abs()))
}

/// Square root of the unbiased estimate of the variance of the final
/// ordinate under the null hypothesis of equal expected responses:
/// `sigma^2 = sum_j (qmean_j - rmean_j)^2 w_j^2 / W^2`.
pub fn sigma_estimate(agg: &AggregatedSamples) -> f64 {
    let total = agg.grand_weight();
    let mut s = NeumaierSum::new();
    for j in 0..agg.len() {
        let t = agg.difference(j) * agg.weight_total()[j] / total;
        s.add(t * t);
    }
    s.value().sqrt()
}

/// Scalar summaries of a cumulative-difference curve.
///
/// The sigma-normalized ratios are `None` when `sigma` is zero; they are
/// never NaN or infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveMetrics {
    pub kuiper: f64,
    pub kolmogorov_smirnov: f64,
    /// Final ordinate `C_m`: the overall weighted average difference.
    pub average_difference: f64,
    pub sigma: f64,
    pub kuiper_over_sigma: Option<f64>,
    pub ks_over_sigma: Option<f64>,
}

/// Computes the curve and bundles all scalar summaries.
pub fn metrics(agg: &AggregatedSamples) -> CurveMetrics {
    let curve = cumulative_curve(agg);
    let d = kuiper(&curve);
    let e = kolmogorov_smirnov(&curve);
    let average_difference = *curve.ordinates().last().expect("nonempty aggregate");
    let sigma = sigma_estimate(agg);
    let ratio = |x: f64| if sigma > 0.0 { Some(x / sigma) } else { None };
    CurveMetrics {
        kuiper: d,
        kolmogorov_smirnov: e,
        average_difference,
        sigma,
        kuiper_over_sigma: ratio(d),
        ks_over_sigma: ratio(e),
    }
}
