//! Repeated-trial evaluation of error estimators on the synthetic model.
//!
//! Each trial draws a fresh training sample, trains the rule once, measures
//! the true error on a large independent test sample, and runs every
//! estimator. Trials run in parallel; every trial's randomness comes from
//! seeds derived from `(master seed, n, trial, role)`, so the aggregates do
//! not depend on the worker count.

use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use genresub_core::classifiers::train;
use genresub_core::dataset::SyntheticModel;
use genresub_core::estimators::EstimationContext;
use genresub_core::stats::{internal_variance, markov_tail_check, TailCheck};
use genresub_core::{
    DeviationStats, EstimatorId, EstimatorSpec, RngSeed, SyntheticModelSpec, TrainingConfig,
};

use crate::AppError;

const ROLE_SIZE: u64 = 101;
const ROLE_TRIAL: u64 = 102;
const ROLE_DATA: u64 = 103;
const ROLE_TEST: u64 = 104;
const ROLE_ESTIMATOR: u64 = 105;
const ROLE_INTERNAL: u64 = 106;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub model: SyntheticModelSpec,
    pub config: TrainingConfig,
    pub estimators: Vec<EstimatorSpec>,
    pub sample_sizes: Vec<usize>,
    pub trials: usize,
    /// Size of the independent sample approximating the true error.
    pub test_size: usize,
    /// Extra seeds per trial for measuring internal variance of randomized
    /// estimators; 0 disables it.
    pub internal_variance_seeds: usize,
    pub seed: RngSeed,
    /// Worker threads; `None` uses all cores.
    pub workers: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(
        model: SyntheticModelSpec,
        config: TrainingConfig,
        estimators: Vec<EstimatorSpec>,
    ) -> Self {
        ExperimentSpec {
            model,
            config,
            estimators,
            sample_sizes: vec![20, 40, 60, 80, 100],
            trials: 200,
            test_size: 5000,
            internal_variance_seeds: 0,
            seed: RngSeed(0),
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<(), AppError> {
        self.model
            .validate()
            .map_err(|e| AppError::Config(e.to_string()))?;
        self.config
            .rule
            .validate()
            .map_err(|e| AppError::Config(e.to_string()))?;
        if self.trials < 2 {
            return Err(AppError::Config("trials must be at least 2".into()));
        }
        if self.test_size == 0 {
            return Err(AppError::Config("test_size must be at least 1".into()));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.iter().any(|&n| n < 2) {
            return Err(AppError::Config("sample sizes must be at least 2".into()));
        }
        if self.estimators.is_empty() {
            return Err(AppError::Config("no estimators selected".into()));
        }
        if self.internal_variance_seeds == 1 {
            return Err(AppError::Config(
                "internal_variance_seeds must be 0 or at least 2".into(),
            ));
        }
        Ok(())
    }
}

/// One estimator at one sample size, aggregated over trials.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSummary {
    pub estimator: EstimatorId,
    pub n: usize,
    /// `(true error, estimate)` per successful trial, in trial order.
    pub pairs: Vec<(f64, f64)>,
    /// `None` when every trial failed.
    pub stats: Option<DeviationStats>,
    pub failures: usize,
    pub median_ms: f64,
}

impl EstimatorSummary {
    pub fn tail_check(&self, tau: f64) -> Option<TailCheck> {
        markov_tail_check(&self.pairs, tau).ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub classifier: &'static str,
    pub summaries: Vec<EstimatorSummary>,
}

impl ExperimentReport {
    pub fn get(&self, estimator: EstimatorId, n: usize) -> Option<&EstimatorSummary> {
        self.summaries
            .iter()
            .find(|s| s.estimator == estimator && s.n == n)
    }

    pub fn stats(&self, estimator: EstimatorId, n: usize) -> Option<&DeviationStats> {
        self.get(estimator, n).and_then(|s| s.stats.as_ref())
    }
}

struct Outcome {
    value: Option<f64>,
    elapsed: Duration,
    internal: Option<f64>,
}

struct Trial {
    true_error: f64,
    outcomes: Vec<Outcome>,
}

fn run_trial(
    spec: &ExperimentSpec,
    model: &SyntheticModel,
    n: usize,
    t: usize,
) -> Result<Trial, AppError> {
    let base = spec
        .seed
        .derive(ROLE_SIZE, n as u64)
        .derive(ROLE_TRIAL, t as u64);
    let ds = model.sample(n, base.derive(ROLE_DATA, 0))?;
    let test = model.sample(spec.test_size, base.derive(ROLE_TEST, 0))?;
    let config = spec.config.with_seed(base);
    let clf = train(&config, &ds)?;
    let true_error = genresub_core::estimators::resubstitution(&clf, &test).value;
    let outcomes = spec
        .estimators
        .iter()
        .enumerate()
        .map(|(i, est)| {
            let seed = base.derive(ROLE_ESTIMATOR, i as u64);
            let ctx = EstimationContext {
                config: &config,
                classifier: &clf,
                train: &ds,
                test: Some(&test),
                seed,
            };
            let start = Instant::now();
            let result = est.evaluate(&ctx);
            let elapsed = start.elapsed();
            let value = result.as_ref().ok().map(|e| e.value);
            let internal = match (&result, spec.internal_variance_seeds) {
                (Ok(e), s) if e.randomized && s >= 2 => {
                    let seeds: Vec<RngSeed> = (0..s)
                        .map(|j| seed.derive(ROLE_INTERNAL, j as u64))
                        .collect();
                    internal_variance(&seeds, |s| {
                        est.evaluate(&EstimationContext { seed: s, ..ctx })
                    })
                    .ok()
                    .map(|v| v.variance)
                }
                (Ok(_), _) => Some(0.0),
                _ => None,
            };
            Outcome {
                value,
                elapsed,
                internal,
            }
        })
        .collect();
    Ok(Trial {
        true_error,
        outcomes,
    })
}

fn median_ms(mut times: Vec<Duration>) -> f64 {
    if times.is_empty() {
        return f64::NAN;
    }
    times.sort_unstable();
    let m = times.len();
    let mid = if m % 2 == 1 {
        times[m / 2]
    } else {
        (times[m / 2 - 1] + times[m / 2]) / 2
    };
    mid.as_secs_f64() * 1e3
}

/// Runs every `(sample size, trial)` and aggregates per estimator.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport, AppError> {
    spec.validate()?;
    let model = SyntheticModel::new(spec.model.clone())?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = spec.workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| AppError::Config(e.to_string()))?;
    let mut summaries = Vec::new();
    for &n in &spec.sample_sizes {
        let trials: Vec<Trial> = pool.install(|| {
            (0..spec.trials)
                .into_par_iter()
                .map(|t| run_trial(spec, &model, n, t))
                .collect::<Result<_, _>>()
        })?;
        for (i, est) in spec.estimators.iter().enumerate() {
            let mut pairs = Vec::with_capacity(trials.len());
            let mut times = Vec::with_capacity(trials.len());
            let mut internal = Vec::new();
            for trial in &trials {
                let o = &trial.outcomes[i];
                times.push(o.elapsed);
                if let Some(v) = o.value {
                    pairs.push((trial.true_error, v));
                    internal.extend(o.internal);
                }
            }
            let mut stats = DeviationStats::from_pairs(&pairs).ok();
            if let Some(s) = stats.as_mut() {
                if spec.internal_variance_seeds >= 2 && !internal.is_empty() {
                    s.mean_internal_variance =
                        Some(internal.iter().sum::<f64>() / internal.len() as f64);
                }
            }
            summaries.push(EstimatorSummary {
                estimator: est.id(),
                n,
                failures: trials.len() - pairs.len(),
                pairs,
                stats,
                median_ms: median_ms(times),
            });
        }
    }
    Ok(ExperimentReport {
        classifier: spec.config.rule.name(),
        summaries,
    })
}

pub const STATS_HEADER: [&str; 11] = [
    "estimator",
    "n",
    "bias",
    "var_dev",
    "rms",
    "mean_true_error",
    "mean_estimate",
    "var_true_error",
    "var_estimate",
    "covariance",
    "T_effective",
];

pub const TIMING_HEADER: [&str; 4] = ["estimator", "classifier", "n", "median_ms"];

pub fn write_stats_csv<W: Write>(report: &ExperimentReport, out: W) -> Result<(), AppError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(STATS_HEADER)?;
    for s in &report.summaries {
        let mut row = vec![s.estimator.name().to_string(), s.n.to_string()];
        match &s.stats {
            Some(st) => row.extend(
                [
                    st.bias,
                    st.deviation_variance,
                    st.rms,
                    st.mean_true_error,
                    st.mean_estimate,
                    st.var_true_error,
                    st.var_estimate,
                    st.covariance,
                ]
                .iter()
                .map(|v| format!("{v:?}")),
            ),
            None => row.extend(std::iter::repeat_n(String::from("NaN"), 8)),
        }
        row.push(s.pairs.len().to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_timing_csv<W: Write>(reports: &[ExperimentReport], out: W) -> Result<(), AppError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TIMING_HEADER)?;
    for r in reports {
        for s in &r.summaries {
            w.write_record([
                s.estimator.name().to_string(),
                r.classifier.to_string(),
                s.n.to_string(),
                format!("{:.6}", s.median_ms),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Estimators compared in the reference timing table.
const TIMED: [EstimatorId; 5] = [
    EstimatorId::Bolster,
    EstimatorId::KnnPosterior,
    EstimatorId::BolsterPosterior,
    EstimatorId::CrossValidation,
    EstimatorId::BootstrapZero,
];

/// Per sample size: fastest and slowest of the timed estimators present,
/// and whether that matches "posterior-probability fastest, bootstrap
/// slowest". Informational only.
pub fn timing_ordering(report: &ExperimentReport) -> Vec<String> {
    let mut sizes: Vec<usize> = report.summaries.iter().map(|s| s.n).collect();
    sizes.dedup();
    sizes
        .into_iter()
        .filter_map(|n| {
            let timed: Vec<&EstimatorSummary> = report
                .summaries
                .iter()
                .filter(|s| s.n == n && TIMED.contains(&s.estimator))
                .collect();
            let fastest = timed
                .iter()
                .min_by(|a, b| a.median_ms.total_cmp(&b.median_ms))?;
            let slowest = timed
                .iter()
                .max_by(|a, b| a.median_ms.total_cmp(&b.median_ms))?;
            let matches = fastest.estimator == EstimatorId::KnnPosterior
                && slowest.estimator == EstimatorId::BootstrapZero;
            Some(format!(
                "{} n={n}: fastest {} ({:.3} ms), slowest {} ({:.3} ms), reference ordering {}",
                report.classifier,
                fastest.estimator.name(),
                fastest.median_ms,
                slowest.estimator.name(),
                slowest.median_ms,
                if matches { "matched" } else { "not matched" }
            ))
        })
        .collect()
}
