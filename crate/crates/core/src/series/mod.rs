//! Truncated Taylor series on the unit disk.
//!
//! A [`CoefficientSeries`] stores `a_0..=a_N` together with a
//! [`TailEnvelope`], a bound `|a_k| ≤ C k^p ρ^k` valid for every discarded
//! index `k > N`. The envelope is what makes the tail bound at any radius,
//! the tail bound of the derivative and the residual of operator
//! truncation computable.

mod coeff;
mod family;
mod grid;
mod norms;

pub use coeff::{dyadic_block_seminorm, dyadic_block_sums, qp_coefficient_test, QpVerdict, QP_RATIO_THRESHOLD};
pub use family::{AnalyticFn, Family, TestFamilyMember};
pub use grid::DiskGrid;
pub use norms::{bergman_a1_norm, bloch_norm, bloch_seminorm, growth_bound_check, growth_envelope};

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default truncation order.
pub const DEFAULT_TRUNCATION: usize = 4096;

/// Default evaluation radius `1 - 2^{-10}`.
pub const DEFAULT_R_MAX: f64 = 1.0 - 1.0 / 1024.0;

const RADIUS_SLACK: f64 = 1e-14;

/// `|a_k| ≤ scale · k^power · ratio^k` for every `k` past the truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEnvelope {
    pub scale: f64,
    pub power: f64,
    pub ratio: f64,
}

impl TailEnvelope {
    pub const ZERO: TailEnvelope = TailEnvelope { scale: 0.0, power: 0.0, ratio: 0.0 };

    pub fn new(scale: f64, power: f64, ratio: f64) -> Self {
        TailEnvelope { scale, power, ratio }
    }

    pub fn is_zero(&self) -> bool {
        self.scale == 0.0
    }

    /// `scale · k^power · ratio^k`
    pub fn bound(&self, k: usize) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let kf = k as f64;
        (self.scale.ln() + self.power * kf.ln() + kf * self.ratio.ln()).exp()
    }

    /// Upper bound for `Σ_{k>n} scale k^power (ratio·r)^k`.
    pub fn tail_sum(&self, n: usize, r: f64) -> f64 {
        if self.is_zero() || r == 0.0 {
            return 0.0;
        }
        let x = self.ratio * r;
        if x >= 1.0 {
            return f64::INFINITY;
        }
        let log_x = x.ln();
        let log_term = |k: f64| self.scale.ln() + self.power * k.ln() + k * log_x;
        let mut k = n as f64 + 1.0;
        if self.power <= 0.0 {
            return log_term(k).exp() / (1.0 - x);
        }
        // Term ratios ((k+1)/k)^p x decrease towards x; sum explicitly until
        // the geometric closure overshoots by at most 0.5%.
        let mut sum = 0.0;
        for _ in 0..50_000_000u64 {
            let q = ((k + 1.0) / k).powf(self.power) * x;
            let term = log_term(k).exp();
            if q < 1.0 && q - x <= 0.005 * (1.0 - x) {
                return sum + term / (1.0 - q);
            }
            sum += term;
            k += 1.0;
        }
        f64::INFINITY
    }

    /// Envelope of the coefficients `(k+1) a_{k+1}` of the derivative.
    pub fn derivative(&self) -> TailEnvelope {
        if self.is_zero() {
            return TailEnvelope::ZERO;
        }
        let p1 = self.power + 1.0;
        TailEnvelope {
            scale: self.scale * self.ratio * 2f64.powf(p1.max(0.0)),
            power: p1,
            ratio: self.ratio,
        }
    }

    /// An envelope dominating both `self` and `other` for `k ≥ 1`.
    pub fn combine(&self, other: &TailEnvelope) -> TailEnvelope {
        match (self.is_zero(), other.is_zero()) {
            (true, _) => *other,
            (_, true) => *self,
            _ => TailEnvelope {
                scale: self.scale + other.scale,
                power: self.power.max(other.power),
                ratio: self.ratio.max(other.ratio),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSeries {
    coefficients: Vec<Complex64>,
    envelope: TailEnvelope,
    r_max: f64,
    tail_bound: f64,
}

impl CoefficientSeries {
    /// A polynomial: no discarded tail, evaluable on the closed disk.
    pub fn polynomial(coefficients: Vec<Complex64>) -> Self {
        let coefficients = if coefficients.is_empty() { vec![Complex64::new(0.0, 0.0)] } else { coefficients };
        CoefficientSeries { coefficients, envelope: TailEnvelope::ZERO, r_max: 1.0, tail_bound: 0.0 }
    }

    pub fn from_real(coefficients: &[f64]) -> Self {
        Self::polynomial(coefficients.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn with_envelope(coefficients: Vec<Complex64>, envelope: TailEnvelope, r_max: f64) -> Result<Self> {
        if !(r_max > 0.0 && r_max <= 1.0) {
            return Err(Error::Domain(format!("r_max must lie in (0,1], got {r_max}")));
        }
        if coefficients.is_empty() {
            return Err(Error::Domain("series needs at least one coefficient".into()));
        }
        if !envelope.is_zero() {
            if coefficients.len() < 2 {
                return Err(Error::Domain("series with a tail needs at least two coefficients".into()));
            }
            if !(envelope.scale > 0.0 && envelope.ratio > 0.0 && envelope.power.is_finite()) {
                return Err(Error::Domain(format!("malformed tail envelope {envelope:?}")));
            }
        }
        let n = coefficients.len() - 1;
        let tail_bound = envelope.tail_sum(n, r_max);
        Ok(CoefficientSeries { coefficients, envelope, r_max, tail_bound })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn envelope(&self) -> TailEnvelope {
        self.envelope
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Bound on `sup_{|z| ≤ r_max}` of the discarded tail.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Bound on the discarded tail at radius `r`.
    pub fn tail_bound_at(&self, r: f64) -> f64 {
        self.envelope.tail_sum(self.order(), r)
    }

    /// Bound on `Σ_{k>N} |a_k|`; infinite unless the envelope decays geometrically.
    pub fn tail_l1(&self) -> f64 {
        self.envelope.tail_sum(self.order(), 1.0)
    }

    /// `Σ |a_k|` over the stored coefficients plus the tail bound.
    pub fn l1_norm(&self) -> f64 {
        self.coefficients.iter().map(|a| a.norm()).sum::<f64>() + self.tail_l1()
    }

    /// Same function with a smaller evaluation radius.
    pub fn with_r_max(&self, r_max: f64) -> Result<Self> {
        Self::with_envelope(self.coefficients.clone(), self.envelope, r_max)
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if r > self.r_max + RADIUS_SLACK {
            Err(Error::Domain(format!("|z| = {r} exceeds r_max = {}", self.r_max)))
        } else {
            Ok(())
        }
    }

    /// Horner evaluation of the stored coefficients.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        self.check_radius(z.norm())?;
        Ok(self.horner(z))
    }

    fn horner(&self, z: Complex64) -> Complex64 {
        self.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    pub fn derivative(&self) -> CoefficientSeries {
        let coefficients: Vec<Complex64> = if self.coefficients.len() > 1 {
            self.coefficients.iter().enumerate().skip(1).map(|(k, &a)| a * k as f64).collect()
        } else {
            vec![Complex64::new(0.0, 0.0)]
        };
        let envelope = self.envelope.derivative();
        let n = coefficients.len() - 1;
        let tail_bound = envelope.tail_sum(n, self.r_max);
        CoefficientSeries { coefficients, envelope, r_max: self.r_max, tail_bound }
    }

    /// Drops coefficients past `n`, widening the envelope to cover them.
    pub fn truncate(&self, n: usize) -> CoefficientSeries {
        if n >= self.order() {
            return self.clone();
        }
        let n = n.max(1);
        let dropped = &self.coefficients[n + 1..];
        let mut env = if self.envelope.is_zero() {
            TailEnvelope { scale: 0.0, power: 0.0, ratio: self.r_max.min(1.0) }
        } else {
            self.envelope
        };
        if env.ratio <= 0.0 {
            env.ratio = 1.0;
        }
        let mut needed = env.scale;
        for (i, a) in dropped.iter().enumerate() {
            let k = (n + 1 + i) as f64;
            let unit = (env.power * k.ln() + k * env.ratio.ln()).exp();
            if unit > 0.0 {
                needed = needed.max(a.norm() / unit);
            }
        }
        env.scale = needed;
        let envelope = if env.scale == 0.0 { TailEnvelope::ZERO } else { env };
        let coefficients = self.coefficients[..=n].to_vec();
        let tail_bound = envelope.tail_sum(n, self.r_max);
        CoefficientSeries { coefficients, envelope, r_max: self.r_max, tail_bound }
    }

    pub fn scale(&self, c: Complex64) -> CoefficientSeries {
        let envelope = if self.envelope.is_zero() || c.norm() == 0.0 {
            TailEnvelope::ZERO
        } else {
            TailEnvelope { scale: self.envelope.scale * c.norm(), ..self.envelope }
        };
        let coefficients = self.coefficients.iter().map(|&a| a * c).collect();
        let tail_bound = envelope.tail_sum(self.order(), self.r_max);
        CoefficientSeries { coefficients, envelope, r_max: self.r_max, tail_bound }
    }

    pub fn add(&self, other: &CoefficientSeries) -> CoefficientSeries {
        let n = match (self.envelope.is_zero(), other.envelope.is_zero()) {
            (true, true) => self.order().max(other.order()),
            (true, false) => other.order(),
            (false, true) => self.order(),
            (false, false) => self.order().min(other.order()),
        };
        let a = self.truncate(n);
        let b = other.truncate(n);
        let coefficients = (0..=n)
            .map(|k| {
                a.coefficients.get(k).copied().unwrap_or_default() + b.coefficients.get(k).copied().unwrap_or_default()
            })
            .collect();
        let envelope = a.envelope.combine(&b.envelope);
        let r_max = self.r_max.min(other.r_max);
        let tail_bound = envelope.tail_sum(n, r_max);
        CoefficientSeries { coefficients, envelope, r_max, tail_bound }
    }

    /// Values on `m` equally spaced points of the circle `|z| = rho`,
    /// starting at angle 0, by one FFT of the folded coefficients.
    pub fn eval_circle(&self, rho: f64, m: usize) -> Result<Vec<Complex64>> {
        self.check_radius(rho)?;
        let fft = FftPlanner::new().plan_fft_inverse(m);
        Ok(self.eval_circle_with(rho, &fft))
    }

    pub(crate) fn eval_circle_with(&self, rho: f64, fft: &Arc<dyn Fft<f64>>) -> Vec<Complex64> {
        let m = fft.len();
        let mut buffer = vec![Complex64::new(0.0, 0.0); m];
        let mut power = 1.0;
        for (k, &a) in self.coefficients.iter().enumerate() {
            buffer[k % m] += a * power;
            power *= rho;
            if power == 0.0 {
                break;
            }
        }
        fft.process(&mut buffer);
        buffer
    }

    /// JSON array of `[re, im]` pairs.
    pub fn to_json_pairs(&self) -> String {
        let pairs: Vec<[f64; 2]> = self.coefficients.iter().map(|a| [a.re, a.im]).collect();
        serde_json::to_string(&pairs).expect("pairs always serialize")
    }

    /// Reads a JSON array of `[re, im]` pairs as a polynomial.
    pub fn from_json_pairs(text: &str) -> Result<Self> {
        let pairs: Vec<[f64; 2]> = serde_json::from_str(text)?;
        if pairs.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Domain("series coefficients must be finite".into()));
        }
        Ok(Self::polynomial(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn derivative_examples() {
        let z = CoefficientSeries::from_real(&[0.0, 1.0]);
        assert_eq!(z.derivative().coefficients(), &[c(1.0)]);
        let one = CoefficientSeries::from_real(&[1.0]);
        assert!(one.derivative().coefficients().iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn evaluate_rejects_outside_radius() {
        let f = CoefficientSeries::with_envelope(vec![c(1.0), c(0.5)], TailEnvelope::new(1.0, 0.0, 0.5), 0.9).unwrap();
        assert!(f.evaluate(Complex64::new(0.95, 0.0)).is_err());
        assert!(f.evaluate(Complex64::new(0.0, 0.9)).is_ok());
    }

    #[test]
    fn geometric_tail_bound_is_exact_for_geometric_series() {
        // 1/(1-z/2) truncated at N: tail Σ_{k>N} (r/2)^k
        let n = 10;
        let coeffs: Vec<_> = (0..=n).map(|k| c(0.5f64.powi(k))).collect();
        let f = CoefficientSeries::with_envelope(coeffs, TailEnvelope::new(1.0, 0.0, 0.5), 0.9).unwrap();
        let x: f64 = 0.45;
        let exact = x.powi(n + 1) / (1.0 - x);
        assert!((f.tail_bound() - exact).abs() < 1e-15);
        let z = Complex64::new(0.9, 0.0);
        let err = (f.evaluate(z).unwrap() - 1.0 / (1.0 - z / 2.0)).norm();
        assert!(err <= f.tail_bound() * (1.0 + 1e-12));
    }

    #[test]
    fn tail_sum_with_growing_power() {
        let e = TailEnvelope::new(1.0, 3.0, 0.99);
        let n = 100;
        let brute: f64 = (n + 1..200_000).map(|k| (k as f64).powi(3) * 0.99f64.powi(k as i32)).sum();
        let bound = e.tail_sum(n, 1.0);
        assert!(bound >= brute && bound < brute * 1.006, "{bound} vs {brute}");
    }

    #[test]
    fn circle_matches_horner() {
        let f = CoefficientSeries::polynomial((0..37).map(|k| Complex64::new(k as f64, -(k as f64) / 3.0)).collect());
        let m = 8;
        let vals = f.eval_circle(0.7, m).unwrap();
        for (j, v) in vals.iter().enumerate() {
            let z = Complex64::from_polar(0.7, 2.0 * std::f64::consts::PI * j as f64 / m as f64);
            assert!((v - f.evaluate(z).unwrap()).norm() < 1e-10);
        }
    }

    #[test]
    fn truncate_keeps_a_valid_envelope() {
        let coeffs: Vec<_> = (0..=50).map(|k| c(0.8f64.powi(k))).collect();
        let f = CoefficientSeries::polynomial(coeffs);
        let g = f.truncate(10);
        assert_eq!(g.order(), 10);
        for k in 11..=50 {
            assert!(0.8f64.powi(k as i32) <= g.envelope().bound(k) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn json_pairs() {
        let f = CoefficientSeries::from_json_pairs("[[1.0,0.0],[0.5,-2.0]]").unwrap();
        assert_eq!(f.coefficients(), &[c(1.0), Complex64::new(0.5, -2.0)]);
        let back = CoefficientSeries::from_json_pairs(&f.to_json_pairs()).unwrap();
        assert_eq!(back, f);
        assert!(CoefficientSeries::from_json_pairs("[[1.0]]").is_err());
    }
}
