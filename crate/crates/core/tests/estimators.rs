mod common;

use common::{benchmark_sample, brute_neighbours, phi, random_dataset};
use genresub_core::classifiers::{train, Classifier, Rule};
use genresub_core::estimators::{
    bolstered_posterior_resub, bolstered_resub, bootstrap_zero, cross_validation,
    knn_posterior_resub, resubstitution, semi_bolstered_resub, PosteriorSpec, ResamplingSpec,
};
use genresub_core::kernels::{sample_kernel, KernelWidths};
use genresub_core::stats::internal_variance;
use genresub_core::{
    BolsteringSpec, EstimatorSpec, KernelFamily, LabeledDataset, RngSeed, TrainingConfig,
};

fn linear_svm(ds: &LabeledDataset) -> Classifier {
    train(&TrainingConfig::new(Rule::linear_svm()), ds).unwrap()
}

fn knn(ds: &LabeledDataset, k: usize) -> Classifier {
    train(&TrainingConfig::new(Rule::Knn { k }), ds).unwrap()
}

/// `(aᵀx + b, √(aᵀKa))` for point `i` under a spherical spec.
fn margin_and_scale(a: &[f64], b: f64, x: &[f64], s: f64) -> (f64, f64) {
    let m = a.iter().zip(x).map(|(u, v)| u * v).sum::<f64>() + b;
    (m, s * a.iter().map(|u| u * u).sum::<f64>().sqrt())
}

/// Exact misclassified mass of point `i` for a linear rule.
fn exact_mass(a: &[f64], b: f64, ds: &LabeledDataset, i: usize, spec: &BolsteringSpec) -> f64 {
    let y = ds.label(i);
    let (m, scale) = margin_and_scale(a, b, ds.point(i), spec.stdev(y, 0));
    let signed = if y == 1 { -m } else { m };
    phi(signed / scale)
}

#[test]
fn knn_posterior_k1_is_resubstitution() {
    for seed in 0..100 {
        let ds = random_dataset(30, 3, seed);
        for clf in [linear_svm(&ds), knn(&ds, 3), Classifier::constant(0, 2)] {
            let pp = knn_posterior_resub(&clf, &ds, PosteriorSpec { k: 1 })
                .unwrap()
                .value;
            assert_eq!(pp, resubstitution(&clf, &ds).value, "seed {seed}");
        }
    }
}

#[test]
fn knn_posterior_matches_double_loop() {
    for seed in 0..20 {
        let ds = random_dataset(25, 2, 100 + seed);
        let clf = linear_svm(&ds);
        let k = 3;
        let mut disagree = 0;
        for i in 0..ds.len() {
            let pred = clf.predict(ds.point(i));
            disagree += brute_neighbours(&ds, ds.point(i), k)
                .iter()
                .filter(|&&j| ds.label(j) != pred)
                .count();
        }
        let oracle = disagree as f64 / (ds.len() * k) as f64;
        let v = knn_posterior_resub(&clf, &ds, PosteriorSpec { k })
            .unwrap()
            .value;
        assert!((v - oracle).abs() < 1e-15);
    }
    let ds = random_dataset(10, 2, 1);
    assert!(
        knn_posterior_resub(&Classifier::constant(0, 2), &ds, PosteriorSpec { k: 11 }).is_err()
    );
}

#[test]
fn zero_width_collapses_to_resubstitution() {
    for seed in 0..20 {
        let ds = benchmark_sample(30, seed);
        let zero = BolsteringSpec::fit(&ds, KernelFamily::Spherical)
            .unwrap()
            .with_kappa(0.0);
        let diag_zero = BolsteringSpec::new(KernelWidths::Diagonal(vec![vec![0.0; ds.dim()]; 2]));
        for clf in [linear_svm(&ds), knn(&ds, 3)] {
            let resub = resubstitution(&clf, &ds).value;
            for spec in [&zero, &diag_zero] {
                assert_eq!(
                    bolstered_resub(&clf, &ds, spec, RngSeed(seed))
                        .unwrap()
                        .value,
                    resub
                );
                assert_eq!(
                    semi_bolstered_resub(&clf, &ds, spec, RngSeed(seed))
                        .unwrap()
                        .value,
                    resub
                );
                let bp = bolstered_posterior_resub(
                    &clf,
                    &ds,
                    spec,
                    PosteriorSpec { k: 1 },
                    RngSeed(seed),
                )
                .unwrap();
                assert_eq!(bp.value, resub);
            }
        }
    }
}

#[test]
fn tiny_kappa_approaches_resubstitution() {
    let ds = benchmark_sample(40, 3);
    let clf = linear_svm(&ds);
    let form = clf.linear_form().unwrap();
    let min_margin = (0..ds.len())
        .map(|i| form.margin(ds.point(i)).abs())
        .fold(f64::INFINITY, f64::min);
    assert!(min_margin > 1e-6);
    let spec = BolsteringSpec::fit(&ds, KernelFamily::Spherical)
        .unwrap()
        .with_kappa(1e-8);
    let v = bolstered_resub(&clf, &ds, &spec, RngSeed(0)).unwrap().value;
    assert!((v - resubstitution(&clf, &ds).value).abs() < 1e-6);
}

#[test]
fn exact_linear_bolstering_matches_direct_formula() {
    for seed in 0..10 {
        let ds = benchmark_sample(30, 200 + seed);
        let clf = linear_svm(&ds);
        let form = clf.linear_form().unwrap();
        let spec = BolsteringSpec::fit(&ds, KernelFamily::Spherical)
            .unwrap()
            .with_kappa(1.3);
        let oracle = (0..ds.len())
            .map(|i| exact_mass(form.weights, form.bias, &ds, i, &spec))
            .sum::<f64>()
            / ds.len() as f64;
        let est = bolstered_resub(&clf, &ds, &spec, RngSeed(1)).unwrap();
        assert!(!est.randomized);
        assert!((est.value - oracle).abs() < 1e-12);
    }
}

#[test]
fn exact_and_monte_carlo_bolstering_agree() {
    // oracle: direct kernel draws against the same hyperplane
    let mut within = 0;
    for seed in 0..20u64 {
        let ds = benchmark_sample(20, 300 + seed);
        let clf = linear_svm(&ds);
        let form = clf.linear_form().unwrap();
        let spec = BolsteringSpec::fit(&ds, KernelFamily::Spherical).unwrap();
        let exact = bolstered_resub(&clf, &ds, &spec, RngSeed(0)).unwrap().value;
        let m = 20_000;
        let mut total = 0.0;
        let mut v = 0.0;
        for i in 0..ds.len() {
            let y = ds.label(i);
            let draws = sample_kernel(ds.point(i), y, &spec, RngSeed(seed * 1000 + i as u64), m);
            let p = draws.iter().filter(|x| clf.predict(x) != y).count() as f64 / m as f64;
            total += p;
            let e = exact_mass(form.weights, form.bias, &ds, i, &spec);
            v += e * (1.0 - e);
        }
        let mc = total / ds.len() as f64;
        let se = (v / ds.len() as f64 / (ds.len() * m) as f64).sqrt();
        if (exact - mc).abs() <= 3.0 * se {
            within += 1;
        }
    }
    assert!(within >= 18, "{within}/20");
}

#[test]
fn monte_carlo_path_is_seeded_and_bounded() {
    let ds = benchmark_sample(30, 17);
    let clf = knn(&ds, 3);
    let spec = BolsteringSpec::fit(&ds, KernelFamily::Spherical).unwrap();
    let a = bolstered_resub(&clf, &ds, &spec, RngSeed(5)).unwrap();
    let b = bolstered_resub(&clf, &ds, &spec, RngSeed(5)).unwrap();
    assert!(a.randomized);
    assert_eq!(a.value, b.value);
    let seeds: Vec<RngSeed> = (0..50).map(RngSeed).collect();
    let iv = internal_variance(&seeds, |s| bolstered_resub(&clf, &ds, &spec, s)).unwrap();
    assert!(iv.randomized);
    let bound = 0.25 / (ds.len() * spec.mc_samples) as f64;
    assert!(
        iv.variance > 0.0 && iv.variance <= 3.0 * bound,
        "{} vs {bound}",
        iv.variance
    );

    let lin = linear_svm(&ds);
    let iv = internal_variance(&seeds, |s| bolstered_resub(&lin, &ds, &spec, s)).unwrap();
    assert!(!iv.randomized);
    assert_eq!(iv.variance, 0.0);
}

#[test]
fn semi_bolstering_per_point_decomposition() {
    for seed in 0..10 {
        let ds = benchmark_sample(25, 400 + seed);
        let clf = linear_svm(&ds);
        let form = clf.linear_form().unwrap();
        let spec = BolsteringSpec::fit(&ds, KernelFamily::Spherical).unwrap();
        let oracle = (0..ds.len())
            .map(|i| {
                if clf.predict(ds.point(i)) != ds.label(i) {
                    1.0
                } else {
                    exact_mass(form.weights, form.bias, &ds, i, &spec)
                }
            })
            .sum::<f64>()
            / ds.len() as f64;
        let v = semi_bolstered_resub(&clf, &ds, &spec, RngSeed(0))
            .unwrap()
            .value;
        assert!((v - oracle).abs() < 1e-12);
        assert!(v >= bolstered_resub(&clf, &ds, &spec, RngSeed(0)).unwrap().value - 1e-12);
    }
}

#[test]
fn semi_bolstering_monte_carlo_decomposition() {
    // MC decomposition oracle on a nonlinear rule with many draws
    let ds = benchmark_sample(20, 77);
    let clf = knn(&ds, 3);
    let m = 20_000;
    let spec = BolsteringSpec::fit(&ds, KernelFamily::Spherical)
        .unwrap()
        .with_mc_samples(m);
    let mut total = 0.0;
    for i in 0..ds.len() {
        let y = ds.label(i);
        total += if clf.predict(ds.point(i)) != y {
            1.0
        } else {
            let draws = sample_kernel(ds.point(i), y, &spec, RngSeed(900 + i as u64), m);
            draws.iter().filter(|x| clf.predict(x) != y).count() as f64 / m as f64
        };
    }
    let oracle = total / ds.len() as f64;
    let v = semi_bolstered_resub(&clf, &ds, &spec, RngSeed(3))
        .unwrap()
        .value;
    // two independent MC runs, each with s.e. ≤ 0.5 / √(nM)
    let se = (2.0 * 0.25 / (ds.len() * m) as f64).sqrt();
    assert!((v - oracle).abs() < 4.0 * se, "{v} vs {oracle}");
}

#[test]
fn bolstered_posterior_matches_direct_formula() {
    for seed in 0..10 {
        let ds = benchmark_sample(30, 500 + seed);
        let clf = linear_svm(&ds);
        let form = clf.linear_form().unwrap();
        let spec = BolsteringSpec::fit(&ds, KernelFamily::Spherical).unwrap();
        for k in [1, 3, 5] {
            let mut total = 0.0;
            for i in 0..ds.len() {
                let pred = clf.predict(ds.point(i));
                let count = brute_neighbours(&ds, ds.point(i), k)
                    .iter()
                    .filter(|&&j| ds.label(j) != pred)
                    .count();
                total += exact_mass(form.weights, form.bias, &ds, i, &spec) * count as f64;
            }
            let oracle = total / (ds.len() * k) as f64;
            let v = bolstered_posterior_resub(&clf, &ds, &spec, PosteriorSpec { k }, RngSeed(0))
                .unwrap()
                .value;
            assert!((v - oracle).abs() < 1e-12, "k={k}");
        }
    }
}

#[test]
fn exact_bolstering_is_continuous_in_kappa() {
    let ds = benchmark_sample(30, 21);
    let clf = linear_svm(&ds);
    let base = BolsteringSpec::fit(&ds, KernelFamily::Spherical).unwrap();
    let h = 0.01;
    let values: Vec<f64> = (1..=300)
        .map(|i| {
            bolstered_resub(
                &clf,
                &ds,
                &base.clone().with_kappa(i as f64 * h),
                RngSeed(0),
            )
            .unwrap()
            .value
        })
        .collect();
    // |d/dκ Φ(t/κ)| = φ(t/κ)·|t|/κ² ≤ φ(1)/κ
    for (i, w) in values.windows(2).enumerate() {
        let kappa = (i + 1) as f64 * h;
        assert!(
            (w[1] - w[0]).abs() <= 0.25 * h / kappa + 1e-12,
            "jump at kappa {kappa}"
        );
    }
}

#[test]
fn cross_validation_on_duplicated_data() {
    for seed in 0..5 {
        let base = benchmark_sample(12, 600 + seed);
        let idx: Vec<usize> = (0..10).flat_map(|_| 0..base.len()).collect();
        let dup = base.subset(&idx).unwrap();
        for k in [1, 3] {
            let config = TrainingConfig::new(Rule::Knn { k });
            let cv =
                cross_validation(&config, &dup, ResamplingSpec::folds(10, RngSeed(seed))).unwrap();
            // every held-out point keeps nine copies in training
            assert_eq!(cv.value, 0.0, "k={k}");
        }
    }
}

#[test]
fn resampling_estimators_are_seeded() {
    let ds = benchmark_sample(30, 31);
    let config = TrainingConfig::new(Rule::linear_svm());
    let a = cross_validation(&config, &ds, ResamplingSpec::folds(10, RngSeed(1))).unwrap();
    let b = cross_validation(&config, &ds, ResamplingSpec::folds(10, RngSeed(1))).unwrap();
    assert_eq!(a.value, b.value);
    let a = bootstrap_zero(&config, &ds, ResamplingSpec::replicates(20, RngSeed(1))).unwrap();
    let b = bootstrap_zero(&config, &ds, ResamplingSpec::replicates(20, RngSeed(1))).unwrap();
    assert_eq!(a.value, b.value);
    assert!(a.randomized);
    assert!(cross_validation(&config, &ds, ResamplingSpec::folds(31, RngSeed(1))).is_err());
}

#[test]
fn every_estimate_lies_in_unit_interval() {
    let specs = [
        EstimatorSpec::Resub,
        EstimatorSpec::Bolster {
            family: KernelFamily::Diagonal,
            kappa: 2.0,
            mc_samples: 50,
        },
        EstimatorSpec::SemiBolster {
            family: KernelFamily::Spherical,
            kappa: 1.0,
            mc_samples: 50,
        },
        EstimatorSpec::KnnPosterior { k: 5 },
        EstimatorSpec::BolsterPosterior {
            family: KernelFamily::Spherical,
            kappa: 1.0,
            mc_samples: 50,
            k: 3,
        },
        EstimatorSpec::CrossValidation { folds: 5 },
        EstimatorSpec::BootstrapZero { replicates: 10 },
        EstimatorSpec::TestSet,
    ];
    for seed in 0..3 {
        let ds = benchmark_sample(20, 700 + seed);
        let test = benchmark_sample(50, 800 + seed);
        for rule in [
            Rule::linear_svm(),
            Rule::rbf_svm(),
            Rule::cart(),
            Rule::knn(),
        ] {
            let config = TrainingConfig::new(rule);
            let clf = train(&config, &ds).unwrap();
            let ctx = genresub_core::estimators::EstimationContext {
                config: &config,
                classifier: &clf,
                train: &ds,
                test: Some(&test),
                seed: RngSeed(seed),
            };
            for spec in &specs {
                let v = spec.evaluate(&ctx).unwrap().value;
                assert!((0.0..=1.0).contains(&v), "{spec:?} {rule:?}: {v}");
            }
        }
    }
}
