#![allow(dead_code)]

use genresub_core::dataset::generate_synthetic;
use genresub_core::{LabeledDataset, RngSeed, SyntheticModelSpec};
use rand::Rng;

pub fn benchmark_sample(n: usize, seed: u64) -> LabeledDataset {
    generate_synthetic(&SyntheticModelSpec::default(), n, RngSeed(seed)).unwrap()
}

/// Uniform points in the unit cube with random binary labels, both classes
/// present, no duplicate rows.
pub fn random_dataset(n: usize, d: usize, seed: u64) -> LabeledDataset {
    let mut rng = RngSeed(seed).rng();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
        .collect();
    let mut labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
    labels[0] = 0;
    labels[1] = 1;
    LabeledDataset::from_rows(&rows, labels, 2).unwrap()
}

/// Gaussian CDF from `erfc`, independent of the library's own routine.
pub fn phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

pub fn brute_neighbours(ds: &LabeledDataset, x: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<(f64, usize)> = (0..ds.len())
        .map(|j| {
            (
                ds.point(j)
                    .iter()
                    .zip(x)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>(),
                j,
            )
        })
        .collect();
    idx.sort_by(|a, b| a.partial_cmp(b).unwrap());
    idx.into_iter().take(k).map(|p| p.1).collect()
}
