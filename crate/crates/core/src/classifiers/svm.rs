//! Two-class C-SVM dual solved by SMO with second-order working-set
//! selection.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{dot, sq_dist};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    #[inline]
    pub(crate) fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => dot(a, b),
            Kernel::Rbf { gamma } => libm::exp(-gamma * sq_dist(a, b)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SmoParams {
    pub c: f64,
    pub tol: f64,
    pub max_passes: usize,
}

/// Dual solution: `f(x) = Σ coef_i K(x_i, x) + bias`, with `coef_i = α_i y_i`.
#[derive(Debug, Clone)]
pub(crate) struct DualSolution {
    pub coef: Vec<f64>,
    pub bias: f64,
}

/// Solves `min ½ αᵀQα − Σα` s.t. `0 ≤ α ≤ C`, `yᵀα = 0` with
/// `Q_ij = y_i y_j K(x_i, x_j)`. `y` holds ±1.
pub(crate) fn solve(
    points: &[&[f64]],
    y: &[f64],
    kernel: Kernel,
    params: SmoParams,
) -> DualSolution {
    let n = y.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = kernel.eval(points[i], points[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    let c = params.c;
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let max_iter = params.max_passes.saturating_mul(n.max(1));
    let mut iterations = 0;

    let in_up = |a: f64, yt: f64| if yt > 0.0 { a < c } else { a > 0.0 };
    let in_low = |a: f64, yt: f64| if yt > 0.0 { a > 0.0 } else { a < c };

    while iterations < max_iter {
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..n {
            if in_up(alpha[t], y[t]) {
                let v = -y[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    i_sel = t;
                }
            }
        }
        if i_sel == usize::MAX {
            break;
        }
        let i = i_sel;
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = usize::MAX;
        let mut obj_min = f64::INFINITY;
        for t in 0..n {
            if !in_low(alpha[t], y[t]) {
                continue;
            }
            let v = y[t] * grad[t];
            if v > gmax2 {
                gmax2 = v;
            }
            let b = gmax + v;
            if b > 0.0 {
                let mut a = k[i * n + i] + k[t * n + t] - 2.0 * k[i * n + t];
                if a <= 0.0 {
                    a = TAU;
                }
                let obj = -(b * b) / a;
                if obj < obj_min {
                    obj_min = obj;
                    j_sel = t;
                }
            }
        }
        if gmax + gmax2 < params.tol || j_sel == usize::MAX {
            break;
        }
        let j = j_sel;
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let qij = y[i] * y[j] * k[i * n + j];
        let (kii, kjj) = (k[i * n + i], k[j * n + j]);
        if y[i] != y[j] {
            let quad = (kii + kjj + 2.0 * qij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (kii + kjj - 2.0 * qij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * k[t * n + i] * di + y[j] * k[t * n + j] * dj);
        }
    }

    // offset from free multipliers, or the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        let at_upper = alpha[t] >= c;
        let at_lower = alpha[t] <= 0.0;
        if at_upper {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if at_lower {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    };
    let coef = alpha.iter().zip(y).map(|(a, yt)| a * yt).collect();
    DualSolution { coef, bias: -rho }
}
