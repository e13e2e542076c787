//! Scalar special functions: standard normal CDF, regularized incomplete
//! gamma, chi distribution CDF and quantiles.

use crate::{Error, Result};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

const EPS: f64 = 1e-15;
const MAX_ITER: usize = 10_000;

/// Regularized lower incomplete gamma `P(a, x)`.
///
/// Series expansion for `x < a + 1`, Lentz continued fraction for the upper
/// tail otherwise.
pub fn regularized_gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    let log_prefix = a * libm::log(x) - x - libm::lgamma(a);
    if x < a + 1.0 {
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        (sum * libm::exp(log_prefix)).clamp(0.0, 1.0)
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                break;
            }
        }
        (1.0 - libm::exp(log_prefix) * h).clamp(0.0, 1.0)
    }
}

/// CDF of the chi distribution with `dof` degrees of freedom.
pub fn chi_cdf(r: f64, dof: usize) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    regularized_gamma_p(dof as f64 / 2.0, r * r / 2.0)
}

/// Quantile of the chi distribution by bisection on its CDF over
/// `[0, d + 10√d]`, to absolute tolerance `1e-9`.
pub fn chi_quantile(p: f64, dof: usize) -> Result<f64> {
    if dof == 0 {
        return Err(Error::invalid(
            "chi distribution needs at least 1 degree of freedom",
        ));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("quantile level must lie in (0, 1)"));
    }
    let d = dof as f64;
    let (mut lo, mut hi) = (0.0_f64, d + 10.0 * libm::sqrt(d));
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if chi_cdf(mid, dof) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
