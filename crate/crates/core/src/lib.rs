//! Baseline-wander (BLW) removal methods for ECG signals, distance-based
//! similarity metrics, and the benchmark harness that compares them.
//!
//! The crate is organized around a plain [`Signal`] container:
//!
//! - [`signal`] — container, subtraction, resampling, windowing
//! - [`generators`] — synthetic ECG, sinusoidal BLW, MAD-normalized mixing
//! - [`ingest`] — WFDB (formats 212/16) and CSV readers
//! - [`qrs`] — R-peak detection shared by the annotation-dependent methods
//! - [`denoise`] — the nine BLW removal methods and their primitives
//! - [`metrics`] — MAD, SSD, PRD and a sliding covariance diagnostic
//! - [`bench`] — experiment driver, ranking tables, report emission

pub mod bench;
pub mod denoise;
pub mod dsp;
pub mod error;
pub mod generators;
pub mod ingest;
pub mod metrics;
pub mod qrs;
pub mod signal;

pub use error::{Error, Result};
pub use signal::{SegmentRef, Signal};
