//! The coefficients `c_n(α) = Γ(n+α) / (n! Γ(α))` of `(1-z)^{-α}`.
//!
//! Values come from the product recurrence `c_n = c_{n-1} (n-1+α)/n`, never
//! from Gamma evaluations at large arguments. Once the running product would
//! pass [`LOG_SWITCH`] the recurrence continues in log space.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub const LOG_SWITCH: f64 = 1e300;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must be positive, got {alpha}")))
    }
}

/// `c_n(α)`; returns `+∞` only when the true value exceeds `f64::MAX`.
pub fn gamma_ratio(alpha: f64, n: usize) -> Result<f64> {
    check_alpha(alpha)?;
    let mut value = 1.0_f64;
    for j in 1..=n {
        let factor = (j as f64 - 1.0 + alpha) / j as f64;
        if value * factor > LOG_SWITCH {
            let log = value.ln() + (j..=n).map(|i| log_factor(alpha, i)).sum::<f64>();
            return Ok(log.exp());
        }
        value *= factor;
    }
    Ok(value)
}

fn log_factor(alpha: f64, j: usize) -> f64 {
    ((alpha - 1.0) / j as f64).ln_1p()
}

/// `log c_n(α)` by summing logarithms of the recurrence factors.
pub fn ln_gamma_ratio(alpha: f64, n: usize) -> Result<f64> {
    check_alpha(alpha)?;
    Ok((1..=n).map(|j| log_factor(alpha, j)).sum())
}

/// `Γ(α) c_n(α) / n^{α-1}`, which tends to 1.
pub fn stirling_check(alpha: f64, n: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if n == 0 {
        return Err(Error::Domain("stirling_check needs n >= 1".into()));
    }
    let c = gamma_ratio(alpha, n)?;
    let nf = n as f64;
    let direct = statrs::function::gamma::gamma(alpha) * c / nf.powf(alpha - 1.0);
    if direct.is_finite() && direct > 0.0 {
        Ok(direct)
    } else {
        Ok((ln_gamma(alpha) + ln_gamma_ratio(alpha, n)? - (alpha - 1.0) * nf.ln()).exp())
    }
}

/// [`stirling_check`] for `n = 1..=n_max` in one pass; element `i` belongs to `n = i + 1`.
pub fn stirling_sweep(alpha: f64, n_max: usize) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let gamma_alpha = statrs::function::gamma::gamma(alpha);
    let ln_gamma_alpha = ln_gamma(alpha);
    let mut value = 1.0_f64;
    let mut log = 0.0_f64;
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let nf = n as f64;
        value *= (nf - 1.0 + alpha) / nf;
        log += log_factor(alpha, n);
        let direct = gamma_alpha * value / nf.powf(alpha - 1.0);
        out.push(if value.is_finite() && value < LOG_SWITCH && direct.is_finite() && direct > 0.0 {
            direct
        } else {
            (ln_gamma_alpha + log - (alpha - 1.0) * nf.ln()).exp()
        });
    }
    Ok(out)
}

/// `c_0(α) ..= c_N(α)` for one `α`.
#[derive(Debug, Clone, Serialize)]
pub struct GammaRatioTable {
    alpha: f64,
    values: Vec<f64>,
}

impl GammaRatioTable {
    pub fn new(alpha: f64, n_max: usize) -> Result<Self> {
        check_alpha(alpha)?;
        let mut values = Vec::with_capacity(n_max + 1);
        values.push(1.0);
        let mut log = 0.0_f64;
        let mut in_log = false;
        for j in 1..=n_max {
            let prev = values[j - 1];
            let factor = (j as f64 - 1.0 + alpha) / j as f64;
            if !in_log && prev * factor > LOG_SWITCH {
                in_log = true;
                log = prev.ln();
            }
            if in_log {
                log += log_factor(alpha, j);
                values.push(log.exp());
            } else {
                values.push(prev * factor);
            }
        }
        Ok(GammaRatioTable { alpha, values })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.values.get(n).copied()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Rows `n,c_n` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,c_n\n");
        for (n, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{n},{}\n", crate::fmt17(*v)));
        }
        out
    }
}

/// Upper bound `c_k(α) ≤ e^{max(α-1,0)} k^{α-1}` valid for every `k ≥ 1`.
///
/// Follows from `1 + x ≤ e^x` and `log(k+1) ≤ H_k ≤ 1 + log k`.
pub fn gamma_ratio_envelope_scale(alpha: f64) -> f64 {
    (alpha - 1.0).max(0.0).exp()
}
