//! Deviation-distribution statistics for repeated-trial evaluation.
//!
//! Moments use the population convention (divide by `T`) so that
//! `rms² = bias² + var_dev` holds exactly in real arithmetic.

use alloc::vec::Vec;

use crate::classifiers::Classifier;
use crate::dataset::SyntheticModel;
use crate::estimators::ErrorEstimate;
use crate::{Error, Result, RngSeed};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationStats {
    /// Mean of `estimate − true error`.
    pub bias: f64,
    /// Variance of `estimate − true error`.
    pub deviation_variance: f64,
    /// Root mean square of `estimate − true error`.
    pub rms: f64,
    pub mean_true_error: f64,
    pub mean_estimate: f64,
    pub var_true_error: f64,
    pub var_estimate: f64,
    pub covariance: f64,
    pub trials: usize,
    /// Mean within-sample variance of a randomized estimator, when measured.
    pub mean_internal_variance: Option<f64>,
}

impl DeviationStats {
    /// Statistics of `(true error, estimate)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::invalid(
                "deviation statistics need at least one trial",
            ));
        }
        let t = pairs.len() as f64;
        let mean_true_error = pairs.iter().map(|p| p.0).sum::<f64>() / t;
        let mean_estimate = pairs.iter().map(|p| p.1).sum::<f64>() / t;
        let bias = pairs.iter().map(|p| p.1 - p.0).sum::<f64>() / t;
        let mut var_true_error = 0.0;
        let mut var_estimate = 0.0;
        let mut covariance = 0.0;
        let mut deviation_variance = 0.0;
        let mut second_moment = 0.0;
        for &(e, h) in pairs {
            let (de, dh) = (e - mean_true_error, h - mean_estimate);
            var_true_error += de * de;
            var_estimate += dh * dh;
            covariance += de * dh;
            let dev = h - e;
            deviation_variance += (dev - bias) * (dev - bias);
            second_moment += dev * dev;
        }
        Ok(DeviationStats {
            bias,
            deviation_variance: deviation_variance / t,
            rms: libm::sqrt(second_moment / t),
            mean_true_error,
            mean_estimate,
            var_true_error: var_true_error / t,
            var_estimate: var_estimate / t,
            covariance: covariance / t,
            trials: pairs.len(),
            mean_internal_variance: None,
        })
    }

    /// `|rms² − (bias² + var_dev)|` relative to `rms²`.
    pub fn rms_identity_error(&self) -> f64 {
        let lhs = self.rms * self.rms;
        let rhs = self.bias * self.bias + self.deviation_variance;
        (lhs - rhs).abs() / lhs.max(f64::MIN_POSITIVE)
    }

    /// `|var_dev − (var_est + var_true − 2 cov)|` relative to the magnitude
    /// of the terms on the right.
    pub fn variance_identity_error(&self) -> f64 {
        let rhs = self.var_estimate + self.var_true_error - 2.0 * self.covariance;
        let scale = self
            .deviation_variance
            .max(self.var_estimate + self.var_true_error + 2.0 * self.covariance.abs());
        (self.deviation_variance - rhs).abs() / scale.max(f64::MIN_POSITIVE)
    }
}

/// Markov bound `(rms / τ)²` on `P(|estimate − true error| ≥ τ)`.
pub fn markov_check(stats: &DeviationStats, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::invalid("tau must be positive"));
    }
    Ok((stats.rms / tau) * (stats.rms / tau))
}

/// Empirical tail frequency against its Markov bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailCheck {
    pub tau: f64,
    pub bound: f64,
    pub empirical: f64,
    /// Three binomial standard errors at the bound.
    pub slack: f64,
}

impl TailCheck {
    pub fn holds(&self) -> bool {
        self.empirical <= self.bound + self.slack
    }
}

/// Compares the observed frequency of `|deviation| ≥ τ` with the Markov
/// bound computed from the same deviations.
pub fn markov_tail_check(pairs: &[(f64, f64)], tau: f64) -> Result<TailCheck> {
    let stats = DeviationStats::from_pairs(pairs)?;
    let bound = markov_check(&stats, tau)?;
    let t = pairs.len() as f64;
    let empirical = pairs.iter().filter(|p| (p.1 - p.0).abs() >= tau).count() as f64 / t;
    let p = bound.min(1.0);
    let slack = 3.0 * libm::sqrt(bound * (1.0 - p) / t);
    Ok(TailCheck {
        tau,
        bound,
        empirical,
        slack,
    })
}

/// Result of [`internal_variance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InternalVariance {
    pub variance: f64,
    /// False when the estimator ignored its seed; the variance is then 0.
    pub randomized: bool,
}

/// Sample variance (divisor `S − 1`) of an estimator re-run with each seed
/// on fixed inputs.
pub fn internal_variance(
    seeds: &[RngSeed],
    mut estimate: impl FnMut(RngSeed) -> Result<ErrorEstimate>,
) -> Result<InternalVariance> {
    if seeds.len() < 2 {
        return Err(Error::invalid("internal variance needs at least two seeds"));
    }
    let mut values = Vec::with_capacity(seeds.len());
    let mut randomized = false;
    for &s in seeds {
        let e = estimate(s)?;
        randomized |= e.randomized;
        values.push(e.value);
    }
    if !randomized {
        return Ok(InternalVariance {
            variance: 0.0,
            randomized: false,
        });
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    Ok(InternalVariance {
        variance,
        randomized: true,
    })
}

/// Misclassification rate of `clf` on `m` fresh draws from `model`
/// (standard error at most `0.5 / √m`).
pub fn true_error(
    clf: &Classifier,
    model: &SyntheticModel,
    m: usize,
    seed: RngSeed,
) -> Result<f64> {
    let test = model.sample(m, seed)?;
    Ok(crate::estimators::resubstitution(clf, &test).value)
}
