//! Estimators of the integrated autocorrelation time of a Markov chain.
//!
//! Four estimators are provided: non-overlapping batch means, a polynomial
//! fit to the low-frequency log-periodogram, initial sequence
//! estimators (positive, monotone, convex), and an autoregressive fit whose
//! coefficient uncertainty yields Monte Carlo confidence intervals.
//! [`generators`] produces seven benchmark chains with known or calibrated
//! autocorrelation times and [`harness`] sweeps every estimator over
//! prefixes of them.

// `!(x > 0.0)` is used on purpose so that NaN takes the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ar;
pub mod batch_means;
pub mod error;
pub mod estimate;
pub mod generators;
pub mod harness;
pub mod initial_seq;
pub mod series;
pub mod spectrum;

pub use error::{Error, Result};
pub use estimate::{Detail, Method, TauEstimate};
pub use series::{sample_acf, AcfVector, TimeSeries};
