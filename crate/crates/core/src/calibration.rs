//! Data-driven choice of the kernel-width multiplier `κ`.
//!
//! The bias of bolstered resubstitution is estimated roughly by retraining
//! on a stratified 80/20 split: bolstered resubstitution on the 80% part
//! minus the error on the held-out 20%. Starting at `κ = 1`, `κ` moves by a
//! fixed step until the magnitude of that rough bias has failed to decrease
//! `patience` times in a row; the best `κ` seen is returned.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::classifiers::{train, Classifier, TrainingConfig};
use crate::estimators::{bolstered_resub, test_set};
use crate::kernels::{BolsteringSpec, KernelFamily};
use crate::rng::role;
use crate::{Error, LabeledDataset, Result, RngSeed};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationSpec {
    /// Number of independent splits averaged into each rough bias.
    pub repetitions: usize,
    pub holdout_fraction: f64,
    pub step: f64,
    /// Consecutive non-decreasing steps tolerated before stopping.
    pub patience: usize,
    pub kappa_max: f64,
    /// Search downward from `κ = 1` when the rough bias there is positive.
    pub downward: bool,
    pub seed: RngSeed,
}

impl Default for CalibrationSpec {
    fn default() -> Self {
        CalibrationSpec {
            repetitions: 1,
            holdout_fraction: 0.2,
            step: 0.1,
            patience: 2,
            kappa_max: 10.0,
            downward: false,
            seed: RngSeed::default(),
        }
    }
}

impl CalibrationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::invalid("calibration needs at least one repetition"));
        }
        if !(self.holdout_fraction > 0.0 && self.holdout_fraction < 1.0) {
            return Err(Error::invalid("holdout fraction must lie in (0, 1)"));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::invalid("kappa step must be positive"));
        }
        if self.patience == 0 {
            return Err(Error::invalid("patience must be at least 1"));
        }
        if !(self.kappa_max >= 1.0 && self.kappa_max.is_finite()) {
            return Err(Error::invalid("kappa_max must be at least 1"));
        }
        Ok(())
    }

    /// Seed of repetition `rep`; independent of `κ`.
    pub fn repetition_seed(&self, rep: usize) -> RngSeed {
        self.seed.derive(role::SPLIT, rep as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationOutcome {
    pub kappa: f64,
    /// Every visited `(κ, rough bias)` in visiting order.
    pub trace: Vec<(f64, f64)>,
    /// The search hit `kappa_max` (or the downward floor) before stopping.
    pub truncated: bool,
}

/// Stratified split into `(train, holdout)` indices. Each class keeps at
/// least one training point.
pub fn holdout_split(
    ds: &LabeledDataset,
    fraction: f64,
    seed: RngSeed,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid("holdout fraction must lie in (0, 1)"));
    }
    let mut rng = seed.rng();
    let (mut kept, mut held) = (Vec::new(), Vec::new());
    for j in 0..ds.class_count() {
        let mut members = ds.class_indices(j);
        if members.is_empty() {
            continue;
        }
        members.shuffle(&mut rng);
        let h = libm::round(members.len() as f64 * fraction) as usize;
        let h = h.min(members.len() - 1);
        held.extend_from_slice(&members[..h]);
        kept.extend_from_slice(&members[h..]);
    }
    if held.is_empty() {
        return Err(Error::invalid("holdout split leaves no test points"));
    }
    kept.sort_unstable();
    held.sort_unstable();
    Ok((kept, held))
}

/// One split's worth of state: everything in the rough bias except `κ`.
struct SplitProbe {
    train: LabeledDataset,
    classifier: Classifier,
    widths: BolsteringSpec,
    holdout_error: f64,
    kernel_seed: RngSeed,
}

impl SplitProbe {
    fn new(
        config: &TrainingConfig,
        ds: &LabeledDataset,
        family: KernelFamily,
        mc_samples: usize,
        fraction: f64,
        seed: RngSeed,
    ) -> Result<Self> {
        let (kept, held) = holdout_split(ds, fraction, seed)?;
        let train_ds = ds.subset(&kept)?;
        let classifier = train(&config.with_seed(seed.derive(role::TRAIN, 0)), &train_ds)?;
        let holdout_error = test_set(&classifier, &ds.subset(&held)?)?.value;
        let widths = BolsteringSpec::fit(&train_ds, family)?.with_mc_samples(mc_samples);
        Ok(SplitProbe {
            train: train_ds,
            classifier,
            widths,
            holdout_error,
            kernel_seed: seed.derive(role::KERNEL, 0),
        })
    }

    fn bias(&self, kappa: f64) -> Result<f64> {
        let spec = self.widths.clone().with_kappa(kappa);
        Ok(
            bolstered_resub(&self.classifier, &self.train, &spec, self.kernel_seed)?.value
                - self.holdout_error,
        )
    }
}

/// Rough bias from a single split seeded by `seed`.
pub fn rough_bias_once(
    config: &TrainingConfig,
    ds: &LabeledDataset,
    family: KernelFamily,
    mc_samples: usize,
    holdout_fraction: f64,
    seed: RngSeed,
    kappa: f64,
) -> Result<f64> {
    SplitProbe::new(config, ds, family, mc_samples, holdout_fraction, seed)?.bias(kappa)
}

fn probes(
    config: &TrainingConfig,
    ds: &LabeledDataset,
    family: KernelFamily,
    mc_samples: usize,
    cspec: &CalibrationSpec,
) -> Result<Vec<SplitProbe>> {
    cspec.validate()?;
    (0..cspec.repetitions)
        .map(|r| {
            SplitProbe::new(
                config,
                ds,
                family,
                mc_samples,
                cspec.holdout_fraction,
                cspec.repetition_seed(r),
            )
        })
        .collect()
}

fn mean_bias(probes: &[SplitProbe], kappa: f64) -> Result<f64> {
    let mut sum = 0.0;
    for p in probes {
        sum += p.bias(kappa)?;
    }
    Ok(sum / probes.len() as f64)
}

/// Bolstered resubstitution minus holdout error, averaged over
/// `cspec.repetitions` stratified splits, at multiplier `kappa`.
pub fn rough_bias(
    config: &TrainingConfig,
    ds: &LabeledDataset,
    family: KernelFamily,
    mc_samples: usize,
    cspec: &CalibrationSpec,
    kappa: f64,
) -> Result<f64> {
    mean_bias(&probes(config, ds, family, mc_samples, cspec)?, kappa)
}

/// Runs the `κ` search against the rough bias of `(config, ds)`.
pub fn calibrate_kappa(
    config: &TrainingConfig,
    ds: &LabeledDataset,
    family: KernelFamily,
    mc_samples: usize,
    cspec: &CalibrationSpec,
) -> Result<CalibrationOutcome> {
    let probes = probes(config, ds, family, mc_samples, cspec)?;
    calibrate_with(cspec, |kappa| mean_bias(&probes, kappa))
}

/// Runs the `κ` search against an arbitrary bias profile.
pub fn calibrate_with(
    cspec: &CalibrationSpec,
    mut bias: impl FnMut(f64) -> Result<f64>,
) -> Result<CalibrationOutcome> {
    cspec.validate()?;
    let at_one = bias(1.0)?;
    let mut trace = alloc::vec![(1.0, at_one)];
    let downward = cspec.downward && at_one > 0.0;
    let (mut best_kappa, mut best) = (1.0, at_one.abs());
    let mut previous = at_one.abs();
    let mut misses = 0;
    let mut truncated = false;
    for i in 1usize.. {
        let offset = i as f64 * cspec.step;
        let kappa = if downward { 1.0 - offset } else { 1.0 + offset };
        // snap to the grid so 1.7 is not 1.7000000000000002
        let kappa = libm::round(kappa * 1e12) / 1e12;
        if (!downward && kappa > cspec.kappa_max + 1e-9) || (downward && kappa < cspec.step - 1e-9)
        {
            truncated = true;
            break;
        }
        let b = bias(kappa)?;
        trace.push((kappa, b));
        if b.abs() < best {
            best = b.abs();
            best_kappa = kappa;
        }
        if b.abs() < previous {
            misses = 0;
        } else {
            misses += 1;
        }
        previous = b.abs();
        if misses >= cspec.patience {
            break;
        }
    }
    Ok(CalibrationOutcome {
        kappa: best_kappa,
        trace,
        truncated,
    })
}
