//! Synthetic paired datasets with analytically known expectations.
//!
//! The generator lays `n` records over exactly `m` distinct scores (ties
//! produced by rounding a uniform grid down to the `m` group cells), sets
//! the expected responses from a stylized profile of the group position
//! `x = (g + 0.5) / m`, and adds independent noise to each response. The
//! noise-free expected aggregate comes back alongside the noisy dataset,
//! so ground-truth curves and diagrams are available by construction.
//!
//! Profile constants are dyadic, so with zero noise the aggregated
//! dataset reproduces the expected aggregate bit for bit (except for the
//! cosine-valued `Oscillating` profile, which is exact only to rounding).

use crate::sample::{AggregatedSamples, PairedDataset, PairedRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
}

/// Shape of the expected response difference as a function of the group
/// position `x` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// No difference anywhere; the null hypothesis holds exactly.
    Null,
    /// Positive difference below 0.4, zero on the middle band, negative
    /// above 0.6: large variation with a near-zero overall average.
    FlatMiddle,
    /// A single step of height [`JUMP_HEIGHT`] over `[JUMP_LO, JUMP_HI)`.
    Jump,
    /// Damped oscillation; cancellation weakens the scalar metrics.
    Oscillating,
}

/// Step height of the [`Profile::Jump`] difference.
pub const JUMP_HEIGHT: f64 = 0.5;
/// Group-position window carrying the jump.
pub const JUMP_LO: f64 = 0.3;
pub const JUMP_HI: f64 = 0.55;

impl Profile {
    /// Expected difference `E[Q] - E[R]` at group position `x`.
    pub fn difference(&self, x: f64) -> f64 {
        match self {
            Profile::Null => 0.0,
            Profile::FlatMiddle => {
                if x < 0.4 {
                    0.25
                } else if x <= 0.6 {
                    0.0
                } else {
                    -0.25
                }
            }
            Profile::Jump => {
                if (JUMP_LO..JUMP_HI).contains(&x) {
                    JUMP_HEIGHT
                } else {
                    0.0
                }
            }
            Profile::Oscillating => {
                0.25 * (2.0 * std::f64::consts::PI * 8.0 * x).cos() * (1.0 - x)
            }
        }
    }

    /// Expected response of the reference population.
    pub fn base(&self) -> f64 {
        0.5
    }
}

/// Response noise applied independently to each observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Noise {
    /// Additive centered gaussian with the given standard deviation.
    Gaussian(f64),
    /// Responses drawn as Bernoulli with the expected value as the
    /// success probability (expectations must lie in [0, 1], which the
    /// built-in profiles guarantee).
    Bernoulli,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n: usize,
    pub m: usize,
    pub profile: Profile,
    pub noise: Noise,
    pub seed: u64,
}

impl SynthSpec {
    fn validate(&self) -> Result<(), SynthError> {
        if self.n == 0 {
            return Err(SynthError::InvalidSpec("n must be at least 1".into()));
        }
        if self.m == 0 || self.m > self.n {
            return Err(SynthError::InvalidSpec(format!(
                "m must lie in 1..={} (got {})",
                self.n, self.m
            )));
        }
        if let Noise::Gaussian(sigma) = self.noise {
            if !(sigma >= 0.0 && sigma.is_finite()) {
                return Err(SynthError::InvalidSpec(format!(
                    "noise sigma must be finite and nonnegative (got {sigma})"
                )));
            }
        }
        Ok(())
    }
}

/// Deterministic per-trial seed derivation (SplitMix64 of the counter
/// mixed into the master seed), used by Monte-Carlo drivers so that a
/// master seed and a trial index pin the trial exactly.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Group index of record `k`: the uniform grid midpoint `(k + 0.5)/n`
/// rounded down to one of the `m` cells.
fn group_of(k: usize, n: usize, m: usize) -> usize {
    (((k as f64 + 0.5) / n as f64 * m as f64) as usize).min(m - 1)
}

/// Generates the noisy dataset plus the noise-free expected aggregate.
///
/// All weights are 1. Records come out already sorted by score. The
/// output is a pure function of the spec, including its seed.
pub fn generate(spec: &SynthSpec) -> Result<(PairedDataset, AggregatedSamples), SynthError> {
    spec.validate()?;
    let (n, m) = (spec.n, spec.m);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let scores: Vec<f64> = (0..m).map(|g| (g as f64 + 0.5) / m as f64).collect();
    let expected_q: Vec<f64> = (0..m)
        .map(|g| spec.profile.base() + spec.profile.difference(scores[g]))
        .collect();
    let expected_r = vec![spec.profile.base(); m];

    let mut records = Vec::with_capacity(n);
    let mut counts = vec![0.0f64; m];
    for k in 0..n {
        let g = group_of(k, n, m);
        counts[g] += 1.0;
        let (q, r) = match spec.noise {
            Noise::Gaussian(sigma) => {
                let zq: f64 = rng.sample(StandardNormal);
                let zr: f64 = rng.sample(StandardNormal);
                (expected_q[g] + sigma * zq, expected_r[g] + sigma * zr)
            }
            Noise::Bernoulli => {
                let q = if rng.random::<f64>() < expected_q[g] { 1.0 } else { 0.0 };
                let r = if rng.random::<f64>() < expected_r[g] { 1.0 } else { 0.0 };
                (q, r)
            }
        };
        records.push(PairedRecord::unweighted(scores[g], q, r));
    }

    let expected = AggregatedSamples::new(scores, expected_q, expected_r, counts)
        .expect("generator invariants");
    Ok((PairedDataset::new(records), expected))
}

/// Ground-truth curve of the expected aggregate.
pub fn expected_curve(expected: &AggregatedSamples) -> crate::cumulative::CumulativeCurve {
    crate::cumulative::cumulative_curve(expected)
}
