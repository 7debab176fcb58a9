//! Coefficient-space tests: dyadic block sums and the `sup k·b_k` criterion.

use serde::{Deserialize, Serialize};

use super::CoefficientSeries;
use crate::error::{Error, Result};

/// Decade growth ratio above which `k·b_k` is judged unbounded.
pub const QP_RATIO_THRESHOLD: f64 = 1.1;

const MONOTONE_TOL: f64 = 1e-14;
const MIN_QP_TERMS: usize = 100;

/// `Σ_{k=2^n+1}^{2^{n+1}} |a_k / k^{α-1}|²` for every block fully inside the truncation.
pub fn dyadic_block_sums(f: &CoefficientSeries, alpha: f64) -> Result<Vec<f64>> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let a = f.coefficients();
    let order = f.order();
    let mut sums = Vec::new();
    let mut n = 0u32;
    while (1usize << (n + 1)) <= order {
        let lo = (1usize << n) + 1;
        let hi = 1usize << (n + 1);
        let s = (lo..=hi)
            .map(|k| {
                let v = a[k].norm() / (k as f64).powf(alpha - 1.0);
                v * v
            })
            .sum();
        sums.push(s);
        n += 1;
    }
    if sums.len() < 2 {
        return Err(Error::InsufficientTruncation(format!(
            "order {order} covers {} complete dyadic blocks, need at least 2",
            sums.len()
        )));
    }
    Ok(sums)
}

/// Largest dyadic block sum.
pub fn dyadic_block_seminorm(f: &CoefficientSeries, alpha: f64) -> Result<f64> {
    Ok(dyadic_block_sums(f, alpha)?.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QpVerdict {
    pub sup_k_ka_k: f64,
    pub bounded: bool,
    /// `max k·b_k` over the last decade `(K/10, K]` divided by the max over `(K/100, K/10]`.
    pub decade_ratio: f64,
}

/// Boundedness of `k·b_k` for a nonnegative nonincreasing sequence `b_0, b_1, ...`.
///
/// The verdict compares the last two decades in `k`; growth by less than
/// `threshold` counts as bounded.
pub fn qp_coefficient_test(b: &[f64], threshold: f64) -> Result<QpVerdict> {
    if b.len() < MIN_QP_TERMS {
        return Err(Error::InsufficientTruncation(format!(
            "need at least {MIN_QP_TERMS} coefficients, got {}",
            b.len()
        )));
    }
    for (k, w) in b.windows(2).enumerate() {
        if !(w[0] >= 0.0 && w[1] >= 0.0) {
            return Err(Error::Precondition(format!("negative or NaN coefficient near index {k}")));
        }
        if w[1] > w[0] * (1.0 + MONOTONE_TOL) + MONOTONE_TOL * f64::MIN_POSITIVE {
            return Err(Error::Precondition(format!("coefficients increase at index {}", k + 1)));
        }
    }
    let weighted = |k: usize| k as f64 * b[k];
    let last = b.len() - 1;
    let window_max = |lo: usize, hi: usize| (lo + 1..=hi).map(weighted).fold(0.0, f64::max);
    let sup = window_max(0, last);
    let recent = window_max(last / 10, last);
    let earlier = window_max(last / 100, last / 10);
    let decade_ratio = if earlier > 0.0 {
        recent / earlier
    } else if recent > 0.0 {
        f64::INFINITY
    } else {
        1.0
    };
    Ok(QpVerdict { sup_k_ka_k: sup, bounded: decade_ratio < threshold, decade_ratio })
}
