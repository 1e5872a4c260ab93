//! Distributional laws for the running extrema of win-probability paths,
//! with Monte Carlo oracles and calibration diagnostics.
//!
//! A well-specified live win-probability feed is a bounded martingale that
//! starts at the pre-game probability `p0` and ends at 0 or 1. Under that
//! assumption the peak probability reached by an eventual loser (and the
//! minimum reached by an eventual winner) has an exact closed-form law
//! depending only on `p0`. This crate provides:
//!
//! - [`laws`]: the closed-form CDFs, survival functions, and quantiles;
//! - [`paths`]: path functionals (running max, first passage, loser peak,
//!   winner min) over observed or simulated series;
//! - [`simulate`]: exactly-martingale path generators (Gaussian bridge,
//!   absorbing grid walks) used as independent Monte Carlo oracles;
//! - [`stats`]: ECDF, Kolmogorov-Smirnov test, binned KL divergence, and
//!   multiplicity control (Bonferroni, Benjamini-Hochberg);
//! - [`ingest`]: file parsing, orientation, p0-binning, and the per-bin
//!   diagnostic table for empirical datasets.

pub mod error;
pub mod ingest;
pub mod laws;
pub mod paths;
pub mod simulate;
pub mod stats;

pub use error::{Error, Result};
pub use ingest::{BinConfig, BinDiagnostics, GameRecord, Winner};
pub use laws::{Law, LawKind, Prior, PriorVector};
pub use paths::{NPlayerSeries, Outcome, WinProbSeries};
pub use simulate::{Functional, Generator, SimConfig, StoppingDecomposition};
pub use stats::{PathSample, TestResult};
