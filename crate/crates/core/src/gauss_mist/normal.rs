//! Standard normal density, distribution and quantile.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{check_closed, Result};

/// `φ(x)`.
#[inline]
pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `Φ(x)`, accurate in both tails through `erfc`.
#[inline]
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// `t` with `Φ(t) = mu`; `mu = 0` and `mu = 1` map to `∓∞`.
///
/// Bisection on the lower tail to machine resolution, then Newton polishing.
/// Upper-tail inputs use `Φ^{-1}(mu) = -Φ^{-1}(1 - mu)`, and `1 - mu` is exact
/// for `mu >= 1/2`.
pub fn quantile(mu: f64) -> Result<f64> {
    check_closed("mu", mu, 0.0, 1.0, "0 <= mu <= 1")?;
    if mu == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if mu == 1.0 {
        return Ok(f64::INFINITY);
    }
    if mu == 0.5 {
        return Ok(0.0);
    }
    if mu > 0.5 {
        return Ok(-lower_quantile(1.0 - mu));
    }
    Ok(lower_quantile(mu))
}

fn lower_quantile(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 0.5);
    let (mut lo, mut hi) = (-40.0f64, 0.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..3 {
        let d = pdf(t);
        if d <= 0.0 {
            break;
        }
        let step = (cdf(t) - p) / d;
        let next = t - step;
        if !next.is_finite() || next < lo || next > hi {
            break;
        }
        t = next;
    }
    t
}
