//! Classification rules behind one [`Classifier`] type.
//!
//! Two-class linear SVMs expose their decision hyperplane through
//! [`Classifier::linear_form`], which lets the bolstered estimators integrate
//! Gaussian kernels in closed form instead of sampling.

mod cart;
mod knn;
mod svm;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

pub use cart::{Node, Tree};
pub use knn::k_nearest;

use crate::linalg::dot;
use crate::{Error, LabeledDataset, Result, RngSeed};
use svm::{DualSolution, Kernel, SmoParams};

/// A classification rule and its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    LinearSvm {
        c: f64,
    },
    /// `gamma = None` picks `1 / (d · mean per-feature variance)` from the
    /// training data.
    RbfSvm {
        c: f64,
        gamma: Option<f64>,
    },
    Cart {
        min_leaf: usize,
    },
    Knn {
        k: usize,
    },
}

impl Rule {
    pub const fn linear_svm() -> Self {
        Rule::LinearSvm { c: 1.0 }
    }

    pub const fn rbf_svm() -> Self {
        Rule::RbfSvm {
            c: 1.0,
            gamma: None,
        }
    }

    pub const fn cart() -> Self {
        Rule::Cart { min_leaf: 5 }
    }

    pub const fn knn() -> Self {
        Rule::Knn { k: 3 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Rule::LinearSvm { .. } => "linear-svm",
            Rule::RbfSvm { .. } => "rbf-svm",
            Rule::Cart { .. } => "cart",
            Rule::Knn { .. } => "knn",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Rule::LinearSvm { c } | Rule::RbfSvm { c, gamma: None }
                if !(c > 0.0 && c.is_finite()) =>
            {
                Err(Error::invalid("SVM cost C must be positive"))
            }
            Rule::RbfSvm { c, gamma: Some(g) }
                if !(c > 0.0 && g > 0.0 && c.is_finite() && g.is_finite()) =>
            {
                Err(Error::invalid("SVM cost C and gamma must be positive"))
            }
            Rule::Cart { min_leaf: 0 } => Err(Error::invalid("min_leaf must be at least 1")),
            Rule::Knn { k: 0 } => Err(Error::invalid("k must be at least 1")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingConfig {
    pub rule: Rule,
    /// SMO stopping tolerance on the maximal KKT violation.
    pub svm_tol: f64,
    /// SMO iteration cap, in multiples of the training-set size.
    pub svm_max_passes: usize,
    pub seed: RngSeed,
}

impl TrainingConfig {
    pub fn new(rule: Rule) -> Self {
        TrainingConfig {
            rule,
            svm_tol: 1e-3,
            svm_max_passes: 10_000,
            seed: RngSeed::default(),
        }
    }

    pub fn with_seed(mut self, seed: RngSeed) -> Self {
        self.seed = seed;
        self
    }
}

/// The hyperplane `aᵀx + b` of a two-class linear classifier, which predicts
/// class 1 exactly when the margin is strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearForm<'a> {
    pub weights: &'a [f64],
    pub bias: f64,
}

impl LinearForm<'_> {
    #[inline]
    pub fn margin(&self, x: &[f64]) -> f64 {
        dot(self.weights, x) + self.bias
    }
}

#[derive(Debug, Clone, PartialEq)]
struct KernelMachine {
    kernel: Kernel,
    support: Vec<Vec<f64>>,
    coef: Vec<f64>,
    bias: f64,
}

impl KernelMachine {
    fn decision(&self, x: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(&self.coef)
            .map(|(s, c)| c * self.kernel.eval(s, x))
            .sum::<f64>()
            + self.bias
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Binary {
    /// All training points on one side.
    Constant(f64),
    Linear {
        weights: Vec<f64>,
        bias: f64,
    },
    Kernel(KernelMachine),
}

impl Binary {
    fn decision(&self, x: &[f64]) -> f64 {
        match self {
            Binary::Constant(v) => *v,
            Binary::Linear { weights, bias } => dot(weights, x) + bias,
            Binary::Kernel(m) => m.decision(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Model {
    Constant(usize),
    Binary(Binary),
    OneVsRest(Vec<Binary>),
    Tree(Tree),
    Knn(knn::Knn),
}

/// A trained decision function `R^d → {0, …, c−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    model: Model,
    class_count: usize,
    degenerate: bool,
}

impl Classifier {
    /// Predicts `label` everywhere.
    pub fn constant(label: usize, class_count: usize) -> Self {
        Classifier {
            model: Model::Constant(label),
            class_count,
            degenerate: false,
        }
    }

    /// `I(aᵀx + b > 0)` for two classes.
    pub fn linear(weights: Vec<f64>, bias: f64) -> Self {
        Classifier {
            model: Model::Binary(Binary::Linear { weights, bias }),
            class_count: 2,
            degenerate: false,
        }
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        match &self.model {
            Model::Constant(y) => *y,
            Model::Binary(b) => usize::from(b.decision(x) > 0.0),
            Model::OneVsRest(machines) => {
                let mut best = 0;
                let mut best_v = f64::NEG_INFINITY;
                for (j, m) in machines.iter().enumerate() {
                    let v = m.decision(x);
                    if v > best_v {
                        best_v = v;
                        best = j;
                    }
                }
                best
            }
            Model::Tree(t) => t.predict(x),
            Model::Knn(k) => k.predict(x),
        }
    }

    pub fn linear_form(&self) -> Option<LinearForm<'_>> {
        match &self.model {
            Model::Binary(Binary::Linear { weights, bias })
                if weights.iter().any(|&w| w != 0.0) =>
            {
                Some(LinearForm {
                    weights,
                    bias: *bias,
                })
            }
            _ => None,
        }
    }

    /// `aᵀx + b` for linear classifiers.
    pub fn decision_margin(&self, x: &[f64]) -> Result<f64> {
        self.linear_form().map(|f| f.margin(x)).ok_or_else(|| {
            Error::Unsupported("decision margin requires a linear classifier".into())
        })
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// True when training saw fewer than two classes and fell back to a
    /// constant prediction.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn tree(&self) -> Option<&Tree> {
        match &self.model {
            Model::Tree(t) => Some(t),
            _ => None,
        }
    }
}

fn default_gamma(ds: &LabeledDataset) -> f64 {
    let n = ds.len() as f64;
    let d = ds.dim();
    let mut mean_var = 0.0;
    for f in 0..d {
        let mean = ds.points().map(|(x, _)| x[f]).sum::<f64>() / n;
        mean_var += ds
            .points()
            .map(|(x, _)| (x[f] - mean) * (x[f] - mean))
            .sum::<f64>()
            / n;
    }
    mean_var /= d as f64;
    if mean_var > 0.0 {
        1.0 / (d as f64 * mean_var)
    } else {
        1.0
    }
}

fn train_binary(ds: &LabeledDataset, positive: usize, kernel: Kernel, params: SmoParams) -> Binary {
    let y: Vec<f64> = ds
        .labels()
        .iter()
        .map(|&l| if l == positive { 1.0 } else { -1.0 })
        .collect();
    if y.iter().all(|&v| v > 0.0) {
        return Binary::Constant(1.0);
    }
    if y.iter().all(|&v| v < 0.0) {
        return Binary::Constant(-1.0);
    }
    let points: Vec<&[f64]> = (0..ds.len()).map(|i| ds.point(i)).collect();
    let DualSolution { coef, bias, .. } = svm::solve(&points, &y, kernel, params);
    match kernel {
        Kernel::Linear => {
            let mut weights = vec![0.0; ds.dim()];
            for (x, c) in points.iter().zip(&coef) {
                for (w, xi) in weights.iter_mut().zip(x.iter()) {
                    *w += c * xi;
                }
            }
            Binary::Linear { weights, bias }
        }
        Kernel::Rbf { .. } => {
            let (support, coef) = points
                .iter()
                .zip(&coef)
                .filter(|(_, &c)| c != 0.0)
                .map(|(x, &c)| (x.to_vec(), c))
                .unzip();
            Binary::Kernel(KernelMachine {
                kernel,
                support,
                coef,
                bias,
            })
        }
    }
}

/// Trains `config.rule` on `ds`. Deterministic in `(config, ds)`.
///
/// A sample containing a single class yields a constant classifier flagged
/// by [`Classifier::is_degenerate`] rather than an error.
pub fn train(config: &TrainingConfig, ds: &LabeledDataset) -> Result<Classifier> {
    config.rule.validate()?;
    let c = ds.class_count();
    let counts = ds.class_counts();
    let present: Vec<usize> = (0..c).filter(|&j| counts[j] > 0).collect();
    if present.len() < 2 {
        let mut clf = Classifier::constant(present.first().copied().unwrap_or(0), c);
        clf.degenerate = true;
        return Ok(clf);
    }
    let params = SmoParams {
        c: 1.0,
        tol: config.svm_tol,
        max_passes: config.svm_max_passes,
    };
    let svm = |kernel: Kernel, cost: f64| -> Model {
        let params = SmoParams { c: cost, ..params };
        if c == 2 {
            Model::Binary(train_binary(ds, 1, kernel, params))
        } else {
            let machines = (0..c)
                .map(|j| {
                    if counts[j] == 0 {
                        Binary::Constant(f64::NEG_INFINITY)
                    } else {
                        train_binary(ds, j, kernel, params)
                    }
                })
                .collect();
            Model::OneVsRest(machines)
        }
    };
    let model = match config.rule {
        Rule::LinearSvm { c: cost } => svm(Kernel::Linear, cost),
        Rule::RbfSvm { c: cost, gamma } => {
            let gamma = gamma.unwrap_or_else(|| default_gamma(ds));
            svm(Kernel::Rbf { gamma }, cost)
        }
        Rule::Cart { min_leaf } => Model::Tree(Tree::fit(ds, min_leaf)),
        Rule::Knn { k } => {
            if k > ds.len() {
                return Err(Error::InvalidArgument(format!(
                    "k = {k} exceeds training size {}",
                    ds.len()
                )));
            }
            Model::Knn(knn::Knn {
                train: ds.clone(),
                k,
            })
        }
    };
    Ok(Classifier {
        model,
        class_count: c,
        degenerate: false,
    })
}
