//! Cumulative-difference analysis of matched pairs.
//!
//! Two populations are observed at shared values of an ordinal covariate
//! (the "score"); each observation pairs one response from each population
//! plus a positive weight. This crate builds the cumulative-difference
//! curve of the weighted response differences against accumulated weight,
//! summarizes it with the Kuiper and Kolmogorov-Smirnov metrics and a
//! null-hypothesis variance estimate, and provides the classical binned
//! reliability-diagram baseline for comparison. Multiple covariates are
//! reduced to a single scalar score with a Hilbert space-filling curve.
//!
//! Typical flow:
//!
//! ```
//! use pairdiff_core::sample::{self, PairedDataset, PairedRecord};
//! use pairdiff_core::cumulative;
//!
//! let dataset = PairedDataset::new(vec![
//!     PairedRecord::unweighted(0.0, 1.0, 0.0),
//!     PairedRecord::unweighted(1.0, 0.0, 1.0),
//! ]);
//! let canonical = sample::canonicalize(dataset).unwrap();
//! let agg = sample::aggregate(&canonical);
//! let m = cumulative::metrics(&agg);
//! assert!(m.kolmogorov_smirnov <= m.kuiper);
//! ```

pub mod cumulative;
pub mod exec;
pub mod hilbert;
pub mod reliability;
pub mod sample;
pub mod sum;
pub mod synth;
