//! Gaussian bolstering kernels: width selection, sampling, and exact
//! half-space mass.
//!
//! Widths are chosen so that the median distance of a kernel draw from its
//! center equals the mean nearest-neighbor distance within the class. For a
//! spherical Gaussian in `d` dimensions the distance is chi-distributed, so
//! `σ = d̂ / median(chi_d)`. The diagonal family applies the same rule per
//! coordinate with `median(chi_1)`.

use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dataset::{mean_min_coordinate_distance, mean_min_distance};
use crate::special::{chi_quantile, normal_cdf};
use crate::{Error, LabeledDataset, Result, RngSeed};

const CACHED_DIMS: usize = 64;
// f64 bits; 0 means not yet computed. Racing writers store identical bits.
static CHI_MEDIANS: [AtomicU64; CACHED_DIMS] = [const { AtomicU64::new(0) }; CACHED_DIMS];

/// Median of the chi distribution with `d` degrees of freedom: the
/// dimensionality correction that converts a mean nearest-neighbor distance
/// into a Gaussian kernel standard deviation.
pub fn chi_median(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if let Some(slot) = CHI_MEDIANS.get(d - 1) {
        let bits = slot.load(Ordering::Relaxed);
        if bits != 0 {
            return Ok(f64::from_bits(bits));
        }
        let v = chi_quantile(0.5, d)?;
        slot.store(v.to_bits(), Ordering::Relaxed);
        return Ok(v);
    }
    chi_quantile(0.5, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    /// `σ_j² I` per class.
    Spherical,
    /// Independent per-coordinate `σ_jk` per class (Naive-Bayes bolstering).
    Diagonal,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Spherical => "spherical",
            KernelFamily::Diagonal => "diagonal",
        }
    }
}

/// Per-class kernel standard deviations before the `κ` multiplier.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelWidths {
    Spherical(Vec<f64>),
    Diagonal(Vec<Vec<f64>>),
}

impl KernelWidths {
    pub fn family(&self) -> KernelFamily {
        match self {
            KernelWidths::Spherical(_) => KernelFamily::Spherical,
            KernelWidths::Diagonal(_) => KernelFamily::Diagonal,
        }
    }

    fn class_count(&self) -> usize {
        match self {
            KernelWidths::Spherical(s) => s.len(),
            KernelWidths::Diagonal(s) => s.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BolsteringSpec {
    pub widths: KernelWidths,
    /// Multiplier applied to every width before sampling or integration.
    pub kappa: f64,
    /// Monte-Carlo draws per training point when no closed form applies.
    pub mc_samples: usize,
}

impl BolsteringSpec {
    pub const DEFAULT_MC_SAMPLES: usize = 100;

    pub fn new(widths: KernelWidths) -> Self {
        BolsteringSpec {
            widths,
            kappa: 1.0,
            mc_samples: Self::DEFAULT_MC_SAMPLES,
        }
    }

    /// Widths estimated from `ds` for `family`.
    pub fn fit(ds: &LabeledDataset, family: KernelFamily) -> Result<Self> {
        let widths = match family {
            KernelFamily::Spherical => KernelWidths::Spherical(spherical_sigmas(ds)?),
            KernelFamily::Diagonal => KernelWidths::Diagonal(diagonal_sigmas(ds)?),
        };
        Ok(Self::new(widths))
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_mc_samples(mut self, m: usize) -> Self {
        self.mc_samples = m;
        self
    }

    pub fn family(&self) -> KernelFamily {
        self.widths.family()
    }

    pub fn validate(&self, ds: &LabeledDataset) -> Result<()> {
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::invalid("kappa must be finite and non-negative"));
        }
        if self.mc_samples == 0 {
            return Err(Error::invalid(
                "Monte-Carlo sample count must be at least 1",
            ));
        }
        if self.widths.class_count() < ds.class_count() {
            return Err(Error::invalid("kernel widths missing for some classes"));
        }
        match &self.widths {
            KernelWidths::Spherical(s) if s.iter().any(|v| !(*v >= 0.0)) => {
                Err(Error::invalid("kernel widths must be non-negative"))
            }
            KernelWidths::Diagonal(s) => {
                if s.iter()
                    .any(|row| row.len() != ds.dim() || row.iter().any(|v| !(*v >= 0.0)))
                {
                    Err(Error::invalid(
                        "diagonal widths must be non-negative with one per coordinate",
                    ))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Effective standard deviation `κ σ` of coordinate `coord` for `class`.
    #[inline]
    pub fn stdev(&self, class: usize, coord: usize) -> f64 {
        let sigma = match &self.widths {
            KernelWidths::Spherical(s) => s[class],
            KernelWidths::Diagonal(s) => s[class][coord],
        };
        self.kappa * sigma
    }

    /// Fills `out` (length `M × d`) with `M` kernel draws around `center`.
    pub(crate) fn fill_samples(
        &self,
        center: &[f64],
        class: usize,
        rng: &mut impl Rng,
        out: &mut [f64],
    ) {
        let d = center.len();
        for draw in out.chunks_exact_mut(d) {
            for (k, v) in draw.iter_mut().enumerate() {
                let z: f64 = rng.sample(StandardNormal);
                *v = center[k] + self.stdev(class, k) * z;
            }
        }
    }
}

/// Mean within-class nearest-neighbor distance divided by `chi_median(d)`,
/// per class. Classes without points get width 0.
pub fn spherical_sigmas(ds: &LabeledDataset) -> Result<Vec<f64>> {
    let alpha = chi_median(ds.dim())?;
    let counts = ds.class_counts();
    (0..ds.class_count())
        .map(|j| {
            if counts[j] == 0 {
                Ok(0.0)
            } else {
                Ok(mean_min_distance(ds, j)? / alpha)
            }
        })
        .collect()
}

/// Per-class, per-coordinate nearest-value distance divided by
/// `chi_median(1)`.
pub fn diagonal_sigmas(ds: &LabeledDataset) -> Result<Vec<Vec<f64>>> {
    let alpha = chi_median(1)?;
    let counts = ds.class_counts();
    (0..ds.class_count())
        .map(|j| {
            if counts[j] == 0 {
                return Ok(vec![0.0; ds.dim()]);
            }
            (0..ds.dim())
                .map(|k| Ok(mean_min_coordinate_distance(ds, j, k)? / alpha))
                .collect()
        })
        .collect()
}

/// `count` i.i.d. draws from the class-`class` kernel centered at `center`.
pub fn sample_kernel(
    center: &[f64],
    class: usize,
    spec: &BolsteringSpec,
    seed: RngSeed,
    count: usize,
) -> Vec<Vec<f64>> {
    let mut rng = seed.rng();
    let mut buf = vec![0.0; count * center.len()];
    spec.fill_samples(center, class, &mut rng, &mut buf);
    buf.chunks_exact(center.len())
        .map(<[f64]>::to_vec)
        .collect()
}

/// Which side of the hyperplane `aᵀx + b = 0` to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `aᵀx + b > 0`
    Positive,
    /// `aᵀx + b < 0`
    Negative,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Positive => 1.0,
            Side::Negative => -1.0,
        }
    }
}

/// Mass of `{x : side·(aᵀx + b) > 0}` under the class-`class` kernel at
/// `center`, i.e. `Φ(side·(aᵀc + b) / √(aᵀKa))`.
///
/// A zero-width kernel is a point mass: the result is 1 if the center lies
/// strictly on `side`, otherwise 0 (boundary centers included).
pub fn halfspace_mass(
    center: &[f64],
    class: usize,
    spec: &BolsteringSpec,
    normal: &[f64],
    offset: f64,
    side: Side,
) -> Result<f64> {
    if normal.iter().all(|&a| a == 0.0) {
        return Err(Error::invalid("half-space normal vector must be nonzero"));
    }
    let margin = side.sign() * (crate::linalg::dot(normal, center) + offset);
    let var: f64 = normal
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let s = spec.stdev(class, k);
            a * a * s * s
        })
        .sum();
    let scale = libm::sqrt(var);
    if scale == 0.0 {
        return Ok(if margin > 0.0 { 1.0 } else { 0.0 });
    }
    Ok(normal_cdf(margin / scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(values: &[f64]) -> LabeledDataset {
        let rows: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
        let mut labels = vec![0; values.len()];
        labels.push(1);
        labels.push(1);
        let mut rows = rows;
        rows.push(vec![100.0]);
        rows.push(vec![101.0]);
        LabeledDataset::from_rows(&rows, labels, 2).unwrap()
    }

    #[test]
    fn chi_median_rejects_zero() {
        assert!(chi_median(0).is_err());
        // cached and uncached paths agree
        assert_eq!(chi_median(3).unwrap(), chi_median(3).unwrap());
        assert!(chi_median(100).unwrap() > chi_median(64).unwrap());
    }

    #[test]
    fn spherical_width_one_dimension() {
        let ds = one_d(&[0.0, 0.674]);
        let s = spherical_sigmas(&ds).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-3, "{}", s[0]);
    }

    #[test]
    fn diagonal_width_and_constant_coordinate() {
        let rows = vec![
            vec![0.0, 5.0],
            vec![0.674, 5.0],
            vec![1.0, 1.0],
            vec![2.0, 2.0],
        ];
        let ds = LabeledDataset::from_rows(&rows, vec![0, 0, 1, 1], 2).unwrap();
        let s = diagonal_sigmas(&ds).unwrap();
        assert!((s[0][0] - 1.0).abs() < 1e-3);
        assert_eq!(s[0][1], 0.0);
    }

    #[test]
    fn duplicated_points_give_zero_width() {
        let ds = one_d(&[2.0, 2.0, 2.0]);
        assert_eq!(spherical_sigmas(&ds).unwrap()[0], 0.0);
    }

    #[test]
    fn singleton_class_errors() {
        let rows = vec![vec![0.0], vec![1.0], vec![5.0]];
        let ds = LabeledDataset::from_rows(&rows, vec![0, 0, 1], 2).unwrap();
        assert_eq!(
            spherical_sigmas(&ds),
            Err(Error::InsufficientClassData { class: 1, count: 1 })
        );
    }

    #[test]
    fn zero_width_samples_equal_center() {
        let spec = BolsteringSpec::new(KernelWidths::Spherical(vec![0.0, 1.0]));
        for p in sample_kernel(&[1.5, -2.0], 0, &spec, RngSeed(1), 10) {
            assert_eq!(p, vec![1.5, -2.0]);
        }
    }

    #[test]
    fn halfspace_basic_cases() {
        let spec = BolsteringSpec::new(KernelWidths::Spherical(vec![0.7, 0.0]));
        let a = [1.0, -2.0];
        assert_eq!(
            halfspace_mass(&[2.0, 1.0], 0, &spec, &a, 0.0, Side::Positive).unwrap(),
            0.5
        );
        assert_eq!(
            halfspace_mass(&[3.0, 1.0], 1, &spec, &a, 0.0, Side::Positive).unwrap(),
            1.0
        );
        assert_eq!(
            halfspace_mass(&[2.0, 1.0], 1, &spec, &a, 0.0, Side::Positive).unwrap(),
            0.0
        );
        assert_eq!(
            halfspace_mass(&[2.0, 1.0], 1, &spec, &a, 0.0, Side::Negative).unwrap(),
            0.0
        );
        assert!(halfspace_mass(&[2.0, 1.0], 0, &spec, &[0.0, 0.0], 1.0, Side::Positive).is_err());
    }

    #[test]
    fn validate_catches_bad_specs() {
        let ds = one_d(&[0.0, 1.0]);
        let good = BolsteringSpec::fit(&ds, KernelFamily::Spherical).unwrap();
        assert!(good.validate(&ds).is_ok());
        assert!(good.clone().with_kappa(-1.0).validate(&ds).is_err());
        assert!(good.clone().with_mc_samples(0).validate(&ds).is_err());
        let short = BolsteringSpec::new(KernelWidths::Diagonal(vec![vec![1.0, 1.0]; 2]));
        assert!(short.validate(&ds).is_err());
    }
}
