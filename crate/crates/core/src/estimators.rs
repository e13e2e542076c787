//! The estimator family.
//!
//! Resubstitution-style estimators score a trained classifier against its
//! own training sample, replacing each point's 0/1 error indicator with a
//! smoothed contribution: a kernel's misclassified mass (bolstering), the
//! fraction of disagreeing kNN labels (posterior probability), or their
//! product. Resampling estimators (cross-validation, zero bootstrap) retrain
//! the rule on subsamples and score held-out points.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::calibration::{calibrate_kappa, CalibrationSpec};
use crate::classifiers::{k_nearest, train, Classifier, TrainingConfig};
use crate::kernels::{halfspace_mass, BolsteringSpec, KernelFamily, Side};
use crate::rng::role;
use crate::{Error, LabeledDataset, Result, RngSeed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorId {
    Resub,
    Bolster,
    SemiBolster,
    KnnPosterior,
    BolsterPosterior,
    CrossValidation,
    BootstrapZero,
    TestSet,
    CalibratedBolster,
}

impl EstimatorId {
    pub const ALL: [EstimatorId; 9] = [
        EstimatorId::Resub,
        EstimatorId::Bolster,
        EstimatorId::SemiBolster,
        EstimatorId::KnnPosterior,
        EstimatorId::BolsterPosterior,
        EstimatorId::CrossValidation,
        EstimatorId::BootstrapZero,
        EstimatorId::TestSet,
        EstimatorId::CalibratedBolster,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorId::Resub => "resub",
            EstimatorId::Bolster => "bolster",
            EstimatorId::SemiBolster => "semi_bolster",
            EstimatorId::KnnPosterior => "knnpp",
            EstimatorId::BolsterPosterior => "bolster_knnpp",
            EstimatorId::CrossValidation => "cv",
            EstimatorId::BootstrapZero => "boot0",
            EstimatorId::TestSet => "testset",
            EstimatorId::CalibratedBolster => "cal_bolster",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.name() == name)
    }
}

/// Hyperparameters an estimate was computed with; unused fields stay `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Hyperparams {
    pub family: Option<KernelFamily>,
    pub kappa: Option<f64>,
    pub mc_samples: Option<usize>,
    pub k: Option<usize>,
    pub folds: Option<usize>,
    pub replicates: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorEstimate {
    /// Estimated error rate in `[0, 1]`.
    pub value: f64,
    pub estimator: EstimatorId,
    pub hyperparams: Hyperparams,
    /// Whether the value depends on `seed` (Monte-Carlo or resampling).
    pub randomized: bool,
    pub seed: Option<RngSeed>,
    /// Set when some internal retraining fell back to a constant classifier.
    pub degenerate_training: bool,
}

impl ErrorEstimate {
    fn deterministic(value: f64, estimator: EstimatorId, hyperparams: Hyperparams) -> Self {
        ErrorEstimate {
            value: value.clamp(0.0, 1.0),
            estimator,
            hyperparams,
            randomized: false,
            seed: None,
            degenerate_training: false,
        }
    }

    fn randomized(
        value: f64,
        estimator: EstimatorId,
        hyperparams: Hyperparams,
        seed: RngSeed,
    ) -> Self {
        ErrorEstimate {
            randomized: true,
            seed: Some(seed),
            ..Self::deterministic(value, estimator, hyperparams)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PosteriorSpec {
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResamplingSpec {
    pub folds: usize,
    pub replicates: usize,
    pub seed: RngSeed,
}

impl ResamplingSpec {
    pub fn folds(folds: usize, seed: RngSeed) -> Self {
        ResamplingSpec {
            folds,
            replicates: 100,
            seed,
        }
    }

    pub fn replicates(replicates: usize, seed: RngSeed) -> Self {
        ResamplingSpec {
            folds: 10,
            replicates,
            seed,
        }
    }
}

fn misclassified(clf: &Classifier, ds: &LabeledDataset, i: usize) -> bool {
    clf.predict(ds.point(i)) != ds.label(i)
}

fn bolster_params(spec: &BolsteringSpec) -> Hyperparams {
    Hyperparams {
        family: Some(spec.family()),
        kappa: Some(spec.kappa),
        mc_samples: Some(spec.mc_samples),
        ..Hyperparams::default()
    }
}

/// Misclassified kernel mass per training point, for points where
/// `wanted(i)` holds (others get 0). Returns whether sampling was used.
///
/// Two-class linear classifiers are integrated exactly unless `sample` is
/// set; everything else uses `M` kernel draws per point, seeded per point so
/// that the draws for point `i` do not depend on which other points were
/// evaluated.
fn kernel_masses(
    clf: &Classifier,
    ds: &LabeledDataset,
    spec: &BolsteringSpec,
    seed: RngSeed,
    sample: bool,
    wanted: impl Fn(usize) -> bool,
) -> Result<(Vec<f64>, bool)> {
    spec.validate(ds)?;
    let n = ds.len();
    let mut masses = vec![0.0; n];
    if let (Some(form), 2, false) = (clf.linear_form(), ds.class_count(), sample) {
        for (i, mass) in masses.iter_mut().enumerate() {
            if !wanted(i) {
                continue;
            }
            // class 0 errs on the positive side, class 1 on the negative
            let side = if ds.label(i) == 0 {
                Side::Positive
            } else {
                Side::Negative
            };
            *mass = halfspace_mass(
                ds.point(i),
                ds.label(i),
                spec,
                form.weights,
                form.bias,
                side,
            )?;
        }
        return Ok((masses, false));
    }
    let m = spec.mc_samples;
    let mut buf = vec![0.0; m * ds.dim()];
    for (i, mass) in masses.iter_mut().enumerate() {
        if !wanted(i) {
            continue;
        }
        let y = ds.label(i);
        let mut rng = seed.derive(role::KERNEL, i as u64).rng();
        spec.fill_samples(ds.point(i), y, &mut rng, &mut buf);
        let wrong = buf
            .chunks_exact(ds.dim())
            .filter(|x| clf.predict(x) != y)
            .count();
        *mass = wrong as f64 / m as f64;
    }
    Ok((masses, true))
}

/// Fraction of training points the classifier gets wrong.
pub fn resubstitution(clf: &Classifier, ds: &LabeledDataset) -> ErrorEstimate {
    let wrong = (0..ds.len()).filter(|&i| misclassified(clf, ds, i)).count();
    ErrorEstimate::deterministic(
        wrong as f64 / ds.len() as f64,
        EstimatorId::Resub,
        Hyperparams::default(),
    )
}

/// Mean misclassified mass of the bolstering kernels centered at the
/// training points.
pub fn bolstered_resub(
    clf: &Classifier,
    ds: &LabeledDataset,
    spec: &BolsteringSpec,
    seed: RngSeed,
) -> Result<ErrorEstimate> {
    bolster_with(clf, ds, spec, seed, false)
}

/// [`bolstered_resub`] by kernel sampling even where a closed form exists.
pub fn bolstered_resub_sampled(
    clf: &Classifier,
    ds: &LabeledDataset,
    spec: &BolsteringSpec,
    seed: RngSeed,
) -> Result<ErrorEstimate> {
    bolster_with(clf, ds, spec, seed, true)
}

fn bolster_with(
    clf: &Classifier,
    ds: &LabeledDataset,
    spec: &BolsteringSpec,
    seed: RngSeed,
    sample: bool,
) -> Result<ErrorEstimate> {
    let (masses, sampled) = kernel_masses(clf, ds, spec, seed, sample, |_| true)?;
    let value = masses.iter().sum::<f64>() / ds.len() as f64;
    let params = bolster_params(spec);
    Ok(if sampled {
        ErrorEstimate::randomized(value, EstimatorId::Bolster, params, seed)
    } else {
        ErrorEstimate::deterministic(value, EstimatorId::Bolster, params)
    })
}

/// Bolstering applied to correctly classified points only; misclassified
/// points contribute a full error.
pub fn semi_bolstered_resub(
    clf: &Classifier,
    ds: &LabeledDataset,
    spec: &BolsteringSpec,
    seed: RngSeed,
) -> Result<ErrorEstimate> {
    let wrong: Vec<bool> = (0..ds.len()).map(|i| misclassified(clf, ds, i)).collect();
    let (masses, sampled) = kernel_masses(clf, ds, spec, seed, false, |i| !wrong[i])?;
    let total: f64 = masses
        .iter()
        .zip(&wrong)
        .map(|(m, &w)| if w { 1.0 } else { *m })
        .sum();
    let value = total / ds.len() as f64;
    let params = bolster_params(spec);
    Ok(if sampled {
        ErrorEstimate::randomized(value, EstimatorId::SemiBolster, params, seed)
    } else {
        ErrorEstimate::deterministic(value, EstimatorId::SemiBolster, params)
    })
}

/// Number of the `k` nearest training labels (self included) that disagree
/// with the prediction at each training point.
fn knn_disagreements(clf: &Classifier, ds: &LabeledDataset, k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > ds.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must lie in 1..={}",
            ds.len()
        )));
    }
    Ok((0..ds.len())
        .map(|i| {
            let pred = clf.predict(ds.point(i));
            k_nearest(ds, ds.point(i), k)
                .into_iter()
                .filter(|&j| ds.label(j) != pred)
                .count()
        })
        .collect())
}

/// kNN posterior-probability resubstitution: the mean fraction of each
/// training point's `k` nearest labels that disagree with its prediction.
pub fn knn_posterior_resub(
    clf: &Classifier,
    ds: &LabeledDataset,
    spec: PosteriorSpec,
) -> Result<ErrorEstimate> {
    let counts = knn_disagreements(clf, ds, spec.k)?;
    let value = counts.iter().sum::<usize>() as f64 / (ds.len() * spec.k) as f64;
    let params = Hyperparams {
        k: Some(spec.k),
        ..Hyperparams::default()
    };
    Ok(ErrorEstimate::deterministic(
        value,
        EstimatorId::KnnPosterior,
        params,
    ))
}

/// Per-point product of the bolstered misclassified mass and the kNN
/// posterior disagreement fraction.
pub fn bolstered_posterior_resub(
    clf: &Classifier,
    ds: &LabeledDataset,
    bspec: &BolsteringSpec,
    pspec: PosteriorSpec,
    seed: RngSeed,
) -> Result<ErrorEstimate> {
    let counts = knn_disagreements(clf, ds, pspec.k)?;
    let (masses, sampled) = kernel_masses(clf, ds, bspec, seed, false, |i| counts[i] > 0)?;
    let total: f64 = masses.iter().zip(&counts).map(|(m, &c)| m * c as f64).sum();
    let value = total / (ds.len() * pspec.k) as f64;
    let params = Hyperparams {
        k: Some(pspec.k),
        ..bolster_params(bspec)
    };
    Ok(if sampled {
        ErrorEstimate::randomized(value, EstimatorId::BolsterPosterior, params, seed)
    } else {
        ErrorEstimate::deterministic(value, EstimatorId::BolsterPosterior, params)
    })
}

/// Misclassification fraction on an independent test sample.
pub fn test_set(clf: &Classifier, test: &LabeledDataset) -> Result<ErrorEstimate> {
    if test.is_empty() {
        return Err(Error::invalid("test set is empty"));
    }
    let mut est = resubstitution(clf, test);
    est.estimator = EstimatorId::TestSet;
    Ok(est)
}

/// Fold assignment for each point. Stratified by class when every present
/// class has at least `folds` points.
pub(crate) fn fold_assignment(ds: &LabeledDataset, folds: usize, seed: RngSeed) -> Vec<usize> {
    let mut rng = seed.derive(role::FOLDS, 0).rng();
    let counts = ds.class_counts();
    let stratify = counts.iter().all(|&c| c == 0 || c >= folds);
    let mut assignment = vec![0; ds.len()];
    let groups: Vec<Vec<usize>> = if stratify {
        (0..ds.class_count()).map(|j| ds.class_indices(j)).collect()
    } else {
        vec![(0..ds.len()).collect()]
    };
    let mut slot = 0;
    for mut group in groups {
        group.shuffle(&mut rng);
        for i in group {
            assignment[i] = slot % folds;
            slot += 1;
        }
    }
    assignment
}

/// `folds`-fold cross-validation: the mean over folds of the error rate of
/// the rule retrained on the complement of each fold.
pub fn cross_validation(
    config: &TrainingConfig,
    ds: &LabeledDataset,
    spec: ResamplingSpec,
) -> Result<ErrorEstimate> {
    let folds = spec.folds;
    if folds < 2 || folds > ds.len() {
        return Err(Error::InvalidArgument(format!(
            "folds = {folds} must lie in 2..={}",
            ds.len()
        )));
    }
    let assignment = fold_assignment(ds, folds, spec.seed);
    let mut sum = 0.0;
    let mut degenerate = false;
    for f in 0..folds {
        let (held, kept): (Vec<usize>, Vec<usize>) =
            (0..ds.len()).partition(|&i| assignment[i] == f);
        let train_ds = ds.subset(&kept)?;
        let cfg = config.with_seed(spec.seed.derive(role::TRAIN, f as u64));
        let clf = train(&cfg, &train_ds)?;
        degenerate |= clf.is_degenerate();
        let wrong = held.iter().filter(|&&i| misclassified(&clf, ds, i)).count();
        sum += wrong as f64 / held.len() as f64;
    }
    let params = Hyperparams {
        folds: Some(folds),
        ..Hyperparams::default()
    };
    let mut est = ErrorEstimate::randomized(
        sum / folds as f64,
        EstimatorId::CrossValidation,
        params,
        spec.seed,
    );
    est.degenerate_training = degenerate;
    Ok(est)
}

/// Zero bootstrap: out-of-bag errors of classifiers retrained on bootstrap
/// resamples, pooled over replicates as a ratio of sums. Replicates with an
/// empty out-of-bag set are skipped.
pub fn bootstrap_zero(
    config: &TrainingConfig,
    ds: &LabeledDataset,
    spec: ResamplingSpec,
) -> Result<ErrorEstimate> {
    let n = ds.len();
    bootstrap_zero_with(config, ds, spec, |b, out| {
        let mut rng = spec.seed.derive(role::BOOTSTRAP, b as u64).rng();
        out.clear();
        out.extend((0..n).map(|_| rng.random_range(0..n)));
    })
}

fn bootstrap_zero_with(
    config: &TrainingConfig,
    ds: &LabeledDataset,
    spec: ResamplingSpec,
    mut resample: impl FnMut(usize, &mut Vec<usize>),
) -> Result<ErrorEstimate> {
    if spec.replicates == 0 {
        return Err(Error::invalid("bootstrap needs at least one replicate"));
    }
    let n = ds.len();
    let mut drawn = Vec::with_capacity(n);
    let mut in_bag = vec![false; n];
    let (mut errors, mut scored) = (0usize, 0usize);
    let mut degenerate = false;
    for b in 0..spec.replicates {
        resample(b, &mut drawn);
        in_bag.iter_mut().for_each(|v| *v = false);
        for &i in &drawn {
            in_bag[i] = true;
        }
        let oob: Vec<usize> = (0..n).filter(|&i| !in_bag[i]).collect();
        if oob.is_empty() {
            continue;
        }
        let cfg = config.with_seed(spec.seed.derive(role::TRAIN, b as u64));
        let clf = train(&cfg, &ds.subset(&drawn)?)?;
        degenerate |= clf.is_degenerate();
        errors += oob.iter().filter(|&&i| misclassified(&clf, ds, i)).count();
        scored += oob.len();
    }
    if scored == 0 {
        return Err(Error::EstimationFailed(
            "every bootstrap replicate had an empty out-of-bag set".into(),
        ));
    }
    let params = Hyperparams {
        replicates: Some(spec.replicates),
        ..Hyperparams::default()
    };
    let mut est = ErrorEstimate::randomized(
        errors as f64 / scored as f64,
        EstimatorId::BootstrapZero,
        params,
        spec.seed,
    );
    est.degenerate_training = degenerate;
    Ok(est)
}

/// An estimator with all its hyperparameters, evaluated uniformly through
/// [`EstimatorSpec::evaluate`]. Kernel widths are fitted from the training
/// sample at evaluation time.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorSpec {
    Resub,
    Bolster {
        family: KernelFamily,
        kappa: f64,
        mc_samples: usize,
    },
    SemiBolster {
        family: KernelFamily,
        kappa: f64,
        mc_samples: usize,
    },
    KnnPosterior {
        k: usize,
    },
    BolsterPosterior {
        family: KernelFamily,
        kappa: f64,
        mc_samples: usize,
        k: usize,
    },
    CrossValidation {
        folds: usize,
    },
    BootstrapZero {
        replicates: usize,
    },
    /// Scores the classifier on the context's test sample.
    TestSet,
    /// Bolstering with `κ` chosen by [`calibrate_kappa`] on the training sample.
    CalibratedBolster {
        family: KernelFamily,
        mc_samples: usize,
        calibration: CalibrationSpec,
    },
}

/// Inputs shared by every estimator in a single evaluation.
#[derive(Debug, Clone, Copy)]
pub struct EstimationContext<'a> {
    pub config: &'a TrainingConfig,
    pub classifier: &'a Classifier,
    pub train: &'a LabeledDataset,
    pub test: Option<&'a LabeledDataset>,
    pub seed: RngSeed,
}

impl EstimatorSpec {
    pub fn id(&self) -> EstimatorId {
        match self {
            EstimatorSpec::Resub => EstimatorId::Resub,
            EstimatorSpec::Bolster { .. } => EstimatorId::Bolster,
            EstimatorSpec::SemiBolster { .. } => EstimatorId::SemiBolster,
            EstimatorSpec::KnnPosterior { .. } => EstimatorId::KnnPosterior,
            EstimatorSpec::BolsterPosterior { .. } => EstimatorId::BolsterPosterior,
            EstimatorSpec::CrossValidation { .. } => EstimatorId::CrossValidation,
            EstimatorSpec::BootstrapZero { .. } => EstimatorId::BootstrapZero,
            EstimatorSpec::TestSet => EstimatorId::TestSet,
            EstimatorSpec::CalibratedBolster { .. } => EstimatorId::CalibratedBolster,
        }
    }

    pub fn evaluate(&self, ctx: &EstimationContext<'_>) -> Result<ErrorEstimate> {
        let (clf, ds, seed) = (ctx.classifier, ctx.train, ctx.seed);
        let fit = |family: KernelFamily, kappa: f64, m: usize| -> Result<BolsteringSpec> {
            Ok(BolsteringSpec::fit(ds, family)?
                .with_kappa(kappa)
                .with_mc_samples(m))
        };
        match *self {
            EstimatorSpec::Resub => Ok(resubstitution(clf, ds)),
            EstimatorSpec::Bolster {
                family,
                kappa,
                mc_samples,
            } => bolstered_resub(clf, ds, &fit(family, kappa, mc_samples)?, seed),
            EstimatorSpec::SemiBolster {
                family,
                kappa,
                mc_samples,
            } => semi_bolstered_resub(clf, ds, &fit(family, kappa, mc_samples)?, seed),
            EstimatorSpec::KnnPosterior { k } => knn_posterior_resub(clf, ds, PosteriorSpec { k }),
            EstimatorSpec::BolsterPosterior {
                family,
                kappa,
                mc_samples,
                k,
            } => bolstered_posterior_resub(
                clf,
                ds,
                &fit(family, kappa, mc_samples)?,
                PosteriorSpec { k },
                seed,
            ),
            EstimatorSpec::CrossValidation { folds } => {
                cross_validation(ctx.config, ds, ResamplingSpec::folds(folds, seed))
            }
            EstimatorSpec::BootstrapZero { replicates } => {
                bootstrap_zero(ctx.config, ds, ResamplingSpec::replicates(replicates, seed))
            }
            EstimatorSpec::TestSet => test_set(
                clf,
                ctx.test
                    .ok_or_else(|| Error::invalid("test-set estimator needs test data"))?,
            ),
            EstimatorSpec::CalibratedBolster {
                family,
                mc_samples,
                calibration,
            } => {
                let cal = CalibrationSpec {
                    seed: seed.derive(role::CALIBRATION, 0),
                    ..calibration
                };
                let outcome = calibrate_kappa(ctx.config, ds, family, mc_samples, &cal)?;
                let mut est =
                    bolstered_resub(clf, ds, &fit(family, outcome.kappa, mc_samples)?, seed)?;
                est.estimator = EstimatorId::CalibratedBolster;
                est.randomized = true;
                est.seed = Some(seed);
                Ok(est)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::Rule;
    use crate::dataset::{generate_synthetic, SyntheticModelSpec};
    use crate::kernels::KernelWidths;

    fn line(points: &[(f64, usize)]) -> LabeledDataset {
        let rows: Vec<Vec<f64>> = points.iter().map(|p| vec![p.0]).collect();
        LabeledDataset::from_rows(&rows, points.iter().map(|p| p.1).collect(), 2).unwrap()
    }

    #[test]
    fn resub_trivial_cases() {
        let all_zero = line(&[(0.0, 0), (1.0, 0)]);
        assert_eq!(
            resubstitution(&Classifier::constant(0, 2), &all_zero).value,
            0.0
        );
        let balanced = line(&[(0.0, 0), (1.0, 1), (2.0, 0), (3.0, 1)]);
        assert_eq!(
            resubstitution(&Classifier::constant(0, 2), &balanced).value,
            0.5
        );
        let clf = train(&TrainingConfig::new(Rule::Knn { k: 1 }), &balanced).unwrap();
        assert_eq!(resubstitution(&clf, &balanced).value, 0.0);
    }

    #[test]
    fn boundary_point_has_half_mass() {
        let ds = line(&[(0.0, 1), (5.0, 1), (-3.0, 0), (-9.0, 0)]);
        let clf = Classifier::linear(vec![1.0], 0.0);
        let spec = BolsteringSpec::new(KernelWidths::Spherical(vec![0.0, 1.0]));
        let (masses, sampled) =
            kernel_masses(&clf, &ds, &spec, RngSeed(0), false, |_| true).unwrap();
        assert!(!sampled);
        assert_eq!(masses[0], 0.5);
    }

    #[test]
    fn semi_bolster_all_wrong_is_one() {
        let ds = line(&[(1.0, 0), (2.0, 0), (-1.0, 1), (-2.0, 1)]);
        let clf = Classifier::linear(vec![1.0], 0.0);
        let spec = BolsteringSpec::new(KernelWidths::Spherical(vec![3.0, 3.0]));
        assert_eq!(
            semi_bolstered_resub(&clf, &ds, &spec, RngSeed(1))
                .unwrap()
                .value,
            1.0
        );
        let knn = train(
            &TrainingConfig::new(Rule::Knn { k: 1 }),
            &line(&[(0.0, 0), (1.0, 1)]),
        )
        .unwrap();
        let swapped = line(&[(0.0, 1), (1.0, 0)]);
        assert_eq!(
            semi_bolstered_resub(&knn, &swapped, &spec, RngSeed(1))
                .unwrap()
                .value,
            1.0
        );
    }

    #[test]
    fn knn_posterior_full_neighborhood() {
        let ds = line(&[(0.0, 0), (1.0, 1), (2.0, 1), (3.0, 0), (4.0, 1)]);
        let est =
            knn_posterior_resub(&Classifier::constant(0, 2), &ds, PosteriorSpec { k: 5 }).unwrap();
        assert!((est.value - 0.6).abs() < 1e-15);
        assert!(
            knn_posterior_resub(&Classifier::constant(0, 2), &ds, PosteriorSpec { k: 6 }).is_err()
        );
    }

    #[test]
    fn test_set_equal_to_training_is_resub() {
        let ds = generate_synthetic(&SyntheticModelSpec::default(), 30, RngSeed(2)).unwrap();
        let clf = train(&TrainingConfig::new(Rule::cart()), &ds).unwrap();
        assert_eq!(
            test_set(&clf, &ds).unwrap().value,
            resubstitution(&clf, &ds).value
        );
    }

    #[test]
    fn leave_one_out_pathology() {
        let ds = line(&[(0.0, 0), (1.0, 1)]);
        let cfg = TrainingConfig::new(Rule::Knn { k: 1 });
        let est = cross_validation(&cfg, &ds, ResamplingSpec::folds(2, RngSeed(0))).unwrap();
        assert_eq!(est.value, 1.0);
        assert!(est.degenerate_training);
        assert!(cross_validation(&cfg, &ds, ResamplingSpec::folds(3, RngSeed(0))).is_err());
    }

    #[test]
    fn folds_are_stratified_and_balanced() {
        let ds = generate_synthetic(&SyntheticModelSpec::default(), 40, RngSeed(5)).unwrap();
        let a = fold_assignment(&ds, 10, RngSeed(8));
        for f in 0..10 {
            let members: Vec<usize> = (0..40).filter(|&i| a[i] == f).collect();
            assert_eq!(members.len(), 4);
        }
        let counts = ds.class_counts();
        if counts.iter().all(|&c| c >= 10) {
            for f in 0..10 {
                let ones = (0..40).filter(|&i| a[i] == f && ds.label(i) == 1).count();
                assert!(ones >= counts[1] / 10 && ones <= counts[1] / 10 + 1);
            }
        }
        assert_eq!(a, fold_assignment(&ds, 10, RngSeed(8)));
    }

    #[test]
    fn bootstrap_skips_full_resamples() {
        let ds = line(&[(0.0, 0), (1.0, 1), (2.0, 0), (3.0, 1)]);
        let cfg = TrainingConfig::new(Rule::Knn { k: 1 });
        let spec = ResamplingSpec::replicates(1, RngSeed(0));
        let err = bootstrap_zero_with(&cfg, &ds, spec, |_, out| {
            out.clear();
            out.extend(0..4);
        })
        .unwrap_err();
        assert!(matches!(err, Error::EstimationFailed(_)));
        // one identity replicate skipped, one informative replicate kept
        let spec = ResamplingSpec::replicates(2, RngSeed(0));
        let est = bootstrap_zero_with(&cfg, &ds, spec, |b, out| {
            out.clear();
            if b == 0 {
                out.extend(0..4);
            } else {
                out.extend([0, 0, 1, 1]);
            }
        })
        .unwrap();
        // 1-NN on {0→0, 1→1}: point 2 → 1 (wrong), point 3 → 1 (right)
        assert_eq!(est.value, 0.5);
    }

    #[test]
    fn bootstrap_constant_rule_on_balanced_data() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64]).collect();
        let labels: Vec<usize> = (0..40).map(|i| i % 2).collect();
        let ds = LabeledDataset::from_rows(&rows, labels, 2).unwrap();
        // a 1-leaf tree predicts the bag majority; on alternating labels
        // that is near-constant and the pooled OOB error hovers around 0.5
        let cfg = TrainingConfig::new(Rule::Cart { min_leaf: 40 });
        let est = bootstrap_zero(&cfg, &ds, ResamplingSpec::replicates(200, RngSeed(3))).unwrap();
        assert!((est.value - 0.5).abs() < 0.1, "{}", est.value);
        assert!(bootstrap_zero(&cfg, &ds, ResamplingSpec::replicates(0, RngSeed(3))).is_err());
    }

    #[test]
    fn empty_test_set_is_impossible_to_build() {
        assert!(LabeledDataset::new(1, Vec::new(), Vec::new(), 2).is_err());
    }

    #[test]
    fn spec_evaluation_matches_direct_calls() {
        let ds = generate_synthetic(&SyntheticModelSpec::default(), 30, RngSeed(6)).unwrap();
        let cfg = TrainingConfig::new(Rule::linear_svm());
        let clf = train(&cfg, &ds).unwrap();
        let ctx = EstimationContext {
            config: &cfg,
            classifier: &clf,
            train: &ds,
            test: None,
            seed: RngSeed(7),
        };
        let via_spec = EstimatorSpec::Bolster {
            family: KernelFamily::Spherical,
            kappa: 1.0,
            mc_samples: 100,
        }
        .evaluate(&ctx)
        .unwrap();
        let spec = BolsteringSpec::fit(&ds, KernelFamily::Spherical).unwrap();
        assert_eq!(
            via_spec,
            bolstered_resub(&clf, &ds, &spec, RngSeed(7)).unwrap()
        );
        assert!(EstimatorSpec::TestSet.evaluate(&ctx).is_err());
        for id in EstimatorId::ALL {
            assert_eq!(EstimatorId::parse(id.name()), Some(id));
        }
    }
}
