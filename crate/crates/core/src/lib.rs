//! Generalized resubstitution error estimators for trained classifiers.
//!
//! Every estimator in this crate reads as the error functional of a trained
//! classifier evaluated against some empirical measure built from the
//! training sample: point masses (plain resubstitution), Gaussian kernels
//! (bolstered resubstitution), kNN label fractions (posterior-probability
//! resubstitution), their product, or resampled/held-out measures
//! (cross-validation, bootstrap, test set).
//!
//! The crate is `no_std` with `alloc`. All randomness flows from an explicit
//! [`RngSeed`]; nothing reads global state, so every result is reproducible
//! from its inputs.
//!
//! Modules:
//!
//! - [`dataset`]: labeled samples, the block-covariance Gaussian generator and
//!   nearest-neighbor distance statistics.
//! - [`classifiers`]: linear/RBF SVM (SMO), CART and kNN behind [`Classifier`].
//! - [`kernels`]: chi-median dimensionality correction, kernel widths,
//!   sampling and exact half-space Gaussian mass.
//! - [`estimators`]: the estimator family and [`ErrorEstimate`].
//! - [`calibration`]: holdout-driven search for the kernel-width multiplier.
//! - [`stats`]: deviation statistics, true-error oracle, Markov tail check.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod calibration;
pub mod classifiers;
pub mod dataset;
mod error;
pub mod estimators;
pub mod kernels;
mod linalg;
mod rng;
pub mod special;
pub mod stats;

pub use calibration::{CalibrationOutcome, CalibrationSpec};
pub use classifiers::{Classifier, Rule, TrainingConfig};
pub use dataset::{LabeledDataset, SyntheticModelSpec};
pub use error::{Error, Result};
pub use estimators::{ErrorEstimate, EstimatorId, EstimatorSpec};
pub use kernels::{BolsteringSpec, KernelFamily};
pub use rng::RngSeed;
pub use stats::DeviationStats;
