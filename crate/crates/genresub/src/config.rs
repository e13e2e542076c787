//! Flat run configuration.
//!
//! A config file is a flat TOML table, for example:
//!
//! ```toml
//! d = 10
//! d_noise = 4
//! blocks = [2, 2, 2]
//! rho = 0.2
//! delta = 0.4
//! rule = "linear-svm"
//! estimators = ["resub", "bolster", "cv", "boot0"]
//! sample_sizes = [20, 40]
//! trials = 200
//! ```
//!
//! Unknown keys are rejected. `key=value` overrides are parsed as TOML
//! values and replace file entries.

use std::path::PathBuf;

use serde::Deserialize;

use genresub_core::classifiers::Rule;
use genresub_core::{
    CalibrationSpec, EstimatorId, EstimatorSpec, KernelFamily, RngSeed, SyntheticModelSpec,
    TrainingConfig,
};

use crate::harness::ExperimentSpec;
use crate::AppError;

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    // synthetic model
    pub d: Option<usize>,
    pub d_noise: Option<usize>,
    pub blocks: Option<Vec<usize>>,
    pub rho: Option<f64>,
    pub delta: Option<f64>,
    pub sigma2: Option<f64>,
    pub priors: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub sample_sizes: Option<Vec<usize>>,

    // classification rule
    pub rule: Option<String>,
    pub rules: Option<Vec<String>>,
    #[serde(rename = "C")]
    pub cost: Option<f64>,
    pub gamma: Option<f64>,
    pub min_leaf: Option<usize>,
    pub knn_k: Option<usize>,

    // estimators
    pub estimator: Option<String>,
    pub estimators: Option<Vec<String>>,
    pub kernel: Option<String>,
    pub k: Option<usize>,
    pub folds: Option<usize>,
    #[serde(rename = "B")]
    pub replicates: Option<usize>,
    #[serde(rename = "M")]
    pub mc_samples: Option<usize>,
    pub kappa: Option<f64>,

    // benchmark
    pub trials: Option<usize>,
    pub test_size: Option<usize>,
    pub internal_variance_seeds: Option<usize>,

    // calibration
    pub repetitions: Option<usize>,
    pub holdout_fraction: Option<f64>,
    pub step: Option<f64>,
    pub patience: Option<usize>,
    pub kappa_max: Option<f64>,
    pub downward: Option<bool>,

    // inputs and run control
    pub input: Option<PathBuf>,
    pub test_input: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

fn config_err(e: impl std::fmt::Display) -> AppError {
    AppError::Config(e.to_string())
}

impl RunConfig {
    /// Parses `text` after applying `key=value` overrides.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, AppError> {
        let mut table: toml::Table = text.parse().map_err(config_err)?;
        for o in overrides {
            let (key, value) = o
                .split_once('=')
                .ok_or_else(|| AppError::Config(format!("override `{o}` is not key=value")))?;
            let key = key.trim();
            let snippet = format!("v = {}", value.trim());
            let parsed = match snippet.parse::<toml::Table>() {
                Ok(mut t) => t.remove("v").expect("parsed snippet has key v"),
                // bare words such as estimator=bolster
                Err(_) => toml::Value::String(value.trim().to_string()),
            };
            table.insert(key.to_string(), parsed);
        }
        table.try_into().map_err(config_err)
    }

    pub fn seed(&self) -> RngSeed {
        RngSeed(self.seed.unwrap_or(0))
    }

    pub fn model_spec(&self) -> Result<SyntheticModelSpec, AppError> {
        let base = SyntheticModelSpec::default();
        let d = self.d.unwrap_or(base.d);
        let d_noise = self
            .d_noise
            .unwrap_or(if self.d.is_some() { 0 } else { base.d_noise });
        let blocks = match &self.blocks {
            Some(b) => b.clone(),
            None if self.d.is_none() && self.d_noise.is_none() => base.blocks.clone(),
            // one block per informative feature: uncorrelated
            None => vec![1; d.saturating_sub(d_noise)],
        };
        let spec = SyntheticModelSpec {
            d,
            d_noise,
            blocks,
            rho: self.rho.unwrap_or(base.rho),
            delta: self.delta.unwrap_or(base.delta),
            sigma2: self.sigma2.unwrap_or(base.sigma2),
            priors: self.priors.clone().unwrap_or(base.priors),
        };
        spec.validate().map_err(config_err)?;
        Ok(spec)
    }

    pub fn parse_rule(&self, name: &str) -> Result<Rule, AppError> {
        let cost = self.cost.unwrap_or(1.0);
        let rule = match name {
            "linear-svm" => Rule::LinearSvm { c: cost },
            "rbf-svm" => Rule::RbfSvm {
                c: cost,
                gamma: self.gamma,
            },
            "cart" => Rule::Cart {
                min_leaf: self.min_leaf.unwrap_or(5),
            },
            "knn" => Rule::Knn {
                k: self.knn_k.unwrap_or(3),
            },
            other => return Err(AppError::Config(format!("unknown rule `{other}`"))),
        };
        rule.validate().map_err(config_err)?;
        Ok(rule)
    }

    pub fn training_config(&self) -> Result<TrainingConfig, AppError> {
        let rule = self.parse_rule(self.rule.as_deref().unwrap_or("linear-svm"))?;
        Ok(TrainingConfig::new(rule).with_seed(self.seed()))
    }

    /// Rules to benchmark: `rules` if present, else `rule`.
    pub fn training_configs(&self) -> Result<Vec<TrainingConfig>, AppError> {
        match &self.rules {
            Some(names) if !names.is_empty() => names
                .iter()
                .map(|n| Ok(TrainingConfig::new(self.parse_rule(n)?).with_seed(self.seed())))
                .collect(),
            _ => Ok(vec![self.training_config()?]),
        }
    }

    pub fn kernel_family(&self) -> Result<KernelFamily, AppError> {
        match self.kernel.as_deref().unwrap_or("spherical") {
            "spherical" => Ok(KernelFamily::Spherical),
            "diagonal" => Ok(KernelFamily::Diagonal),
            other => Err(AppError::Config(format!("unknown kernel `{other}`"))),
        }
    }

    pub fn calibration_spec(&self) -> Result<CalibrationSpec, AppError> {
        let base = CalibrationSpec::default();
        let spec = CalibrationSpec {
            repetitions: self.repetitions.unwrap_or(base.repetitions),
            holdout_fraction: self.holdout_fraction.unwrap_or(base.holdout_fraction),
            step: self.step.unwrap_or(base.step),
            patience: self.patience.unwrap_or(base.patience),
            kappa_max: self.kappa_max.unwrap_or(base.kappa_max),
            downward: self.downward.unwrap_or(base.downward),
            seed: self.seed(),
        };
        spec.validate().map_err(config_err)?;
        Ok(spec)
    }

    pub fn estimator_spec(&self, name: &str) -> Result<EstimatorSpec, AppError> {
        let id = EstimatorId::parse(name)
            .ok_or_else(|| AppError::Config(format!("unknown estimator `{name}`")))?;
        let family = self.kernel_family()?;
        let kappa = self.kappa.unwrap_or(1.0);
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(AppError::Config("kappa must be non-negative".into()));
        }
        let mc_samples = self.mc_samples.unwrap_or(100);
        let k = self.k.unwrap_or(3);
        let positive = |v: usize, key: &str| {
            if v == 0 {
                Err(AppError::Config(format!("{key} must be positive")))
            } else {
                Ok(v)
            }
        };
        positive(mc_samples, "M")?;
        positive(k, "k")?;
        Ok(match id {
            EstimatorId::Resub => EstimatorSpec::Resub,
            EstimatorId::Bolster => EstimatorSpec::Bolster {
                family,
                kappa,
                mc_samples,
            },
            EstimatorId::SemiBolster => EstimatorSpec::SemiBolster {
                family,
                kappa,
                mc_samples,
            },
            EstimatorId::KnnPosterior => EstimatorSpec::KnnPosterior { k },
            EstimatorId::BolsterPosterior => EstimatorSpec::BolsterPosterior {
                family,
                kappa,
                mc_samples,
                k,
            },
            EstimatorId::CrossValidation => {
                let folds = self.folds.unwrap_or(10);
                if folds < 2 {
                    return Err(AppError::Config("folds must be at least 2".into()));
                }
                EstimatorSpec::CrossValidation { folds }
            }
            EstimatorId::BootstrapZero => EstimatorSpec::BootstrapZero {
                replicates: positive(self.replicates.unwrap_or(100), "B")?,
            },
            EstimatorId::TestSet => EstimatorSpec::TestSet,
            EstimatorId::CalibratedBolster => EstimatorSpec::CalibratedBolster {
                family,
                mc_samples,
                calibration: self.calibration_spec()?,
            },
        })
    }

    pub fn experiment_spec(&self, config: TrainingConfig) -> Result<ExperimentSpec, AppError> {
        let names = self.estimators.clone().unwrap_or_else(|| {
            ["resub", "bolster", "knnpp", "bolster_knnpp", "cv", "boot0"]
                .map(String::from)
                .to_vec()
        });
        let estimators = names
            .iter()
            .map(|n| self.estimator_spec(n))
            .collect::<Result<Vec<_>, _>>()?;
        let spec = ExperimentSpec {
            model: self.model_spec()?,
            config,
            estimators,
            sample_sizes: self
                .sample_sizes
                .clone()
                .unwrap_or_else(|| vec![20, 40, 60, 80, 100]),
            trials: self.trials.unwrap_or(200),
            test_size: self.test_size.unwrap_or(5000),
            internal_variance_seeds: self.internal_variance_seeds.unwrap_or(0),
            seed: self.seed(),
            workers: self.workers,
        };
        spec.validate()?;
        Ok(spec)
    }
}
