//! Labeled samples, the synthetic two-class Gaussian model, and the
//! nearest-neighbor distance statistics used to size bolstering kernels.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{cholesky, sq_dist};
use crate::{Error, Result, RngSeed};

/// A sample of `n` labeled points in `R^d` with labels in `0..class_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    dim: usize,
    features: Vec<f64>,
    labels: Vec<usize>,
    class_count: usize,
}

impl LabeledDataset {
    /// Builds a dataset from row-major `features` (`labels.len() × dim`).
    pub fn new(
        dim: usize,
        features: Vec<f64>,
        labels: Vec<usize>,
        class_count: usize,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("feature dimension must be at least 1"));
        }
        if labels.is_empty() {
            return Err(Error::invalid("dataset must contain at least one point"));
        }
        if class_count < 2 {
            return Err(Error::invalid("class count must be at least 2"));
        }
        if features.len() != labels.len() * dim {
            return Err(Error::invalid("feature buffer does not match n × d"));
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= class_count) {
            return Err(Error::InvalidArgument(alloc::format!(
                "label {bad} out of range for {class_count} classes"
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("features must be finite"));
        }
        Ok(LabeledDataset {
            dim,
            features,
            labels,
            class_count,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<usize>, class_count: usize) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("rows have differing lengths"));
        }
        if rows.len() != labels.len() {
            return Err(Error::invalid("row and label counts differ"));
        }
        Self::new(dim, rows.concat(), labels, class_count)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn points(&self) -> impl Iterator<Item = (&[f64], usize)> + '_ {
        self.features
            .chunks_exact(self.dim)
            .zip(self.labels.iter().copied())
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_count];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }

    pub fn class_indices(&self, class: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.labels[i] == class)
            .collect()
    }

    /// Rows at `indices` (repeats allowed). Keeps the class count.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut features = Vec::with_capacity(indices.len() * self.dim);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(Error::invalid("subset index out of range"));
            }
            features.extend_from_slice(self.point(i));
            labels.push(self.labels[i]);
        }
        Self::new(self.dim, features, labels, self.class_count)
    }

    fn class_members_checked(&self, class: usize) -> Result<Vec<usize>> {
        if class >= self.class_count {
            return Err(Error::invalid("class index out of range"));
        }
        let members = self.class_indices(class);
        if members.len() < 2 {
            return Err(Error::InsufficientClassData {
                class,
                count: members.len(),
            });
        }
        Ok(members)
    }
}

/// Mean Euclidean distance from each class-`class` point to its nearest
/// other point of the same class.
pub fn mean_min_distance(ds: &LabeledDataset, class: usize) -> Result<f64> {
    let members = ds.class_members_checked(class)?;
    let mut total = 0.0;
    for (a, &i) in members.iter().enumerate() {
        let xi = ds.point(i);
        let mut best = f64::INFINITY;
        for (b, &j) in members.iter().enumerate() {
            if a == b {
                continue;
            }
            let d2 = sq_dist(xi, ds.point(j));
            // strict comparison keeps the lowest-index neighbor on ties
            if d2 < best {
                best = d2;
            }
        }
        total += libm::sqrt(best);
    }
    Ok(total / members.len() as f64)
}

/// Mean absolute gap from each class-`class` value of coordinate `coord` to
/// the nearest other same-class value of that coordinate.
pub fn mean_min_coordinate_distance(
    ds: &LabeledDataset,
    class: usize,
    coord: usize,
) -> Result<f64> {
    if coord >= ds.dim() {
        return Err(Error::invalid("coordinate index out of range"));
    }
    let members = ds.class_members_checked(class)?;
    let mut values: Vec<f64> = members.iter().map(|&i| ds.point(i)[coord]).collect();
    values.sort_by(f64::total_cmp);
    let m = values.len();
    let total: f64 = (0..m)
        .map(|i| {
            let left = if i > 0 {
                values[i] - values[i - 1]
            } else {
                f64::INFINITY
            };
            let right = if i + 1 < m {
                values[i + 1] - values[i]
            } else {
                f64::INFINITY
            };
            left.min(right)
        })
        .sum();
    Ok(total / m as f64)
}

/// Two-class Gaussian model with block-correlated informative features and
/// independent noise features.
///
/// Class 0 has mean `-delta` and class 1 mean `+delta` on each informative
/// coordinate; noise coordinates have mean 0 in both classes. Both classes
/// share the covariance built by [`covariance_matrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticModelSpec {
    pub d: usize,
    pub d_noise: usize,
    pub blocks: Vec<usize>,
    pub rho: f64,
    pub delta: f64,
    pub sigma2: f64,
    pub priors: Vec<f64>,
}

impl SyntheticModelSpec {
    /// Mean offset used by the default benchmark model. Chosen so that the
    /// linear SVM at `n = 20` has mean true error inside `[0.15, 0.35]`.
    pub const DEFAULT_DELTA: f64 = 0.4;

    pub fn informative(&self) -> usize {
        self.d - self.d_noise
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::spec("d must be at least 1"));
        }
        if self.d_noise > self.d {
            return Err(Error::spec("d_noise exceeds d"));
        }
        if self.blocks.contains(&0) {
            return Err(Error::spec("block sizes must be positive"));
        }
        if self.blocks.iter().sum::<usize>() != self.d - self.d_noise {
            return Err(Error::spec("block sizes must sum to d - d_noise"));
        }
        if !(self.rho > -1.0 && self.rho < 1.0) {
            return Err(Error::spec("rho must lie in (-1, 1)"));
        }
        let max_block = self.blocks.iter().copied().max().unwrap_or(1);
        if max_block > 1 && self.rho <= -1.0 / (max_block as f64 - 1.0) {
            return Err(Error::spec(
                "rho too negative: block covariance is not positive definite",
            ));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::spec("delta must be finite and non-negative"));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::spec("sigma2 must be positive"));
        }
        if self.priors.len() != 2 {
            return Err(Error::spec("the synthetic model has exactly two classes"));
        }
        if self.priors.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::spec("priors must lie in [0, 1]"));
        }
        if (self.priors.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::spec("priors must sum to 1"));
        }
        Ok(())
    }

    pub fn class_mean(&self, class: usize) -> Vec<f64> {
        let sign = if class == 0 { -1.0 } else { 1.0 };
        let mut mean = vec![0.0; self.d];
        for m in mean.iter_mut().take(self.informative()) {
            *m = sign * self.delta;
        }
        mean
    }
}

impl Default for SyntheticModelSpec {
    fn default() -> Self {
        SyntheticModelSpec {
            d: 10,
            d_noise: 4,
            blocks: vec![2, 2, 2],
            rho: 0.2,
            delta: Self::DEFAULT_DELTA,
            sigma2: 1.0,
            priors: vec![0.5, 0.5],
        }
    }
}

/// `sigma2 × blockdiag(Σ_{l_1}, …, Σ_{l_k}, I_{d_noise})`, row-major, where
/// each `Σ_l` has unit diagonal and `rho` off the diagonal.
pub fn covariance_matrix(spec: &SyntheticModelSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let d = spec.d;
    let mut cov = vec![0.0; d * d];
    let mut start = 0;
    for &l in &spec.blocks {
        for i in start..start + l {
            for j in start..start + l {
                cov[i * d + j] = if i == j { 1.0 } else { spec.rho };
            }
        }
        start += l;
    }
    for i in start..d {
        cov[i * d + i] = 1.0;
    }
    for v in &mut cov {
        *v *= spec.sigma2;
    }
    Ok(cov)
}

/// A validated model with its Cholesky factor, ready to draw samples.
#[derive(Debug, Clone)]
pub struct SyntheticModel {
    spec: SyntheticModelSpec,
    chol: Vec<f64>,
    means: [Vec<f64>; 2],
}

impl SyntheticModel {
    pub fn new(spec: SyntheticModelSpec) -> Result<Self> {
        let cov = covariance_matrix(&spec)?;
        let chol = cholesky(&cov, spec.d)
            .ok_or_else(|| Error::spec("covariance is not positive definite"))?;
        let means = [spec.class_mean(0), spec.class_mean(1)];
        Ok(SyntheticModel { spec, chol, means })
    }

    pub fn spec(&self) -> &SyntheticModelSpec {
        &self.spec
    }

    /// Draws `m ≥ 1` i.i.d. labeled points.
    pub fn sample(&self, m: usize, seed: RngSeed) -> Result<LabeledDataset> {
        if m == 0 {
            return Err(Error::invalid("sample size must be at least 1"));
        }
        let d = self.spec.d;
        let mut rng = seed.rng();
        let mut features = Vec::with_capacity(m * d);
        let mut labels = Vec::with_capacity(m);
        let mut z = vec![0.0; d];
        for _ in 0..m {
            let u: f64 = rng.random();
            let y = if u < self.spec.priors[0] { 0 } else { 1 };
            for zi in z.iter_mut() {
                *zi = rng.sample(StandardNormal);
            }
            let mean = &self.means[y];
            for i in 0..d {
                let row = &self.chol[i * d..i * d + i + 1];
                let v: f64 = row.iter().zip(&z).map(|(l, zk)| l * zk).sum();
                features.push(mean[i] + v);
            }
            labels.push(y);
        }
        LabeledDataset::new(d, features, labels, 2)
    }
}

/// Draws a training sample of size `n ≥ 2` from the synthetic model.
pub fn generate_synthetic(
    spec: &SyntheticModelSpec,
    n: usize,
    seed: RngSeed,
) -> Result<LabeledDataset> {
    if n < 2 {
        return Err(Error::invalid("sample size must be at least 2"));
    }
    SyntheticModel::new(spec.clone())?.sample(n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ds(rows: &[&[f64]], labels: &[usize]) -> LabeledDataset {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        LabeledDataset::from_rows(&rows, labels.to_vec(), 2).unwrap()
    }

    #[test]
    fn rejects_bad_labels_and_shapes() {
        assert!(LabeledDataset::new(2, vec![0.0; 4], vec![0, 2], 2).is_err());
        assert!(LabeledDataset::new(2, vec![0.0; 3], vec![0, 1], 2).is_err());
        assert!(LabeledDataset::new(1, vec![0.0], vec![0], 1).is_err());
        assert!(LabeledDataset::new(1, vec![f64::NAN], vec![0], 2).is_err());
    }

    #[test]
    fn two_point_mean_min_distance() {
        let d = ds(&[&[0.0, 0.0], &[3.0, 4.0], &[9.0, 9.0]], &[0, 0, 1]);
        assert_eq!(mean_min_distance(&d, 0).unwrap(), 5.0);
    }

    #[test]
    fn duplicates_give_zero_distance() {
        let d = ds(
            &[&[1.0, 2.0], &[1.0, 2.0], &[0.0, 0.0], &[1.0, 1.0]],
            &[0, 0, 1, 1],
        );
        assert_eq!(mean_min_distance(&d, 0).unwrap(), 0.0);
    }

    #[test]
    fn singleton_class_is_an_error() {
        let d = ds(&[&[0.0], &[1.0], &[2.0]], &[0, 0, 1]);
        assert_eq!(
            mean_min_distance(&d, 1),
            Err(Error::InsufficientClassData { class: 1, count: 1 })
        );
        assert!(mean_min_coordinate_distance(&d, 1, 0).is_err());
    }

    #[test]
    fn coordinate_distance_hand_case() {
        let d = ds(
            &[
                &[1.0, 7.0],
                &[4.0, 7.0],
                &[5.0, 7.0],
                &[0.0, 0.0],
                &[1.0, 1.0],
            ],
            &[0, 0, 0, 1, 1],
        );
        assert!((mean_min_coordinate_distance(&d, 0, 0).unwrap() - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(mean_min_coordinate_distance(&d, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn covariance_structure() {
        let spec = SyntheticModelSpec {
            d: 2,
            d_noise: 0,
            blocks: vec![2],
            rho: 0.2,
            delta: 1.0,
            sigma2: 1.0,
            priors: vec![0.5, 0.5],
        };
        assert_eq!(covariance_matrix(&spec).unwrap(), vec![1.0, 0.2, 0.2, 1.0]);

        let zero = SyntheticModelSpec {
            rho: 0.0,
            sigma2: 2.5,
            ..SyntheticModelSpec::default()
        };
        let cov = covariance_matrix(&zero).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(cov[i * 10 + j], if i == j { 2.5 } else { 0.0 });
            }
        }
    }

    #[test]
    fn benchmark_model_is_positive_definite() {
        let cov = covariance_matrix(&SyntheticModelSpec::default()).unwrap();
        assert!(cholesky(&cov, 10).is_some());
    }

    #[test]
    fn invalid_specs_rejected() {
        let base = SyntheticModelSpec::default();
        let bad_blocks = SyntheticModelSpec {
            blocks: vec![2, 2],
            ..base.clone()
        };
        assert!(matches!(
            covariance_matrix(&bad_blocks),
            Err(Error::InvalidSpec(_))
        ));
        let bad_rho = SyntheticModelSpec {
            blocks: vec![3, 3],
            rho: -0.6,
            ..base.clone()
        };
        assert!(SyntheticModel::new(bad_rho).is_err());
        let bad_priors = SyntheticModelSpec {
            priors: vec![0.7, 0.7],
            ..base.clone()
        };
        assert!(bad_priors.validate().is_err());
        assert!(generate_synthetic(&base, 1, RngSeed(0)).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = SyntheticModelSpec::default();
        let a = generate_synthetic(&spec, 50, RngSeed(9)).unwrap();
        let b = generate_synthetic(&spec, 50, RngSeed(9)).unwrap();
        let c = generate_synthetic(&spec, 50, RngSeed(10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.dim(), 10);
    }
}
