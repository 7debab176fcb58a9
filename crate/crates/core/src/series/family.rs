//! Closed-form test functions used by the boundedness arguments.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CoefficientSeries, TailEnvelope};
use crate::error::{Error, Result};
use crate::special::{gamma_ratio_envelope_scale, GammaRatioTable};

/// Something that can be evaluated on the disk.
pub trait AnalyticFn: Sync {
    fn value(&self, z: Complex64) -> Result<Complex64>;
}

impl AnalyticFn for CoefficientSeries {
    fn value(&self, z: Complex64) -> Result<Complex64> {
        self.evaluate(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `1`
    ConstantOne,
    /// `(1-λ²) / (1-λz)^β`
    PowerBeta { beta: f64 },
    /// `log(e / (1-az))`
    LogE,
    /// `(log(2/(1-az)))² / log(2/(1-a²))`
    LogSq,
    /// `((1-a²) / (1-az)²)²`
    BergmanPeak,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::ConstantOne => write!(f, "constant_one"),
            Family::PowerBeta { beta } => write!(f, "power_beta(beta={beta})"),
            Family::LogE => write!(f, "log_e"),
            Family::LogSq => write!(f, "log_sq"),
            Family::BergmanPeak => write!(f, "bergman_peak"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFamilyMember {
    pub family: Family,
    pub parameter: f64,
    pub series: CoefficientSeries,
}

impl TestFamilyMember {
    /// Builds the member and its truncated Taylor series of order `truncation`.
    pub fn new(family: Family, parameter: f64, truncation: usize, r_max: f64) -> Result<Self> {
        if family != Family::ConstantOne && !(parameter > 0.0 && parameter < 1.0) {
            return Err(Error::Domain(format!("{family} needs a parameter in (0,1), got {parameter}")));
        }
        if let Family::PowerBeta { beta } = family {
            if !(beta.is_finite() && beta > 0.0) {
                return Err(Error::Domain(format!("power_beta needs beta > 0, got {beta}")));
            }
        }
        let n = truncation.max(1);
        let a = parameter;
        let re = |v: f64| Complex64::new(v, 0.0);
        let (coefficients, envelope) = match family {
            Family::ConstantOne => {
                return Ok(TestFamilyMember {
                    family,
                    parameter,
                    series: CoefficientSeries::polynomial(vec![re(1.0)]),
                })
            }
            Family::PowerBeta { beta } => {
                let c = GammaRatioTable::new(beta, n)?;
                let lead = 1.0 - a * a;
                let coeffs = geometric_weighted(n, a, |k| lead * c.get(k).unwrap());
                let env = TailEnvelope::new(lead * gamma_ratio_envelope_scale(beta), beta - 1.0, a);
                (coeffs, env)
            }
            Family::LogE => {
                let coeffs = geometric_weighted(n, a, |k| if k == 0 { 1.0 } else { 1.0 / k as f64 });
                (coeffs, TailEnvelope::new(1.0, -1.0, a))
            }
            Family::LogSq => {
                let norm = (2.0 / (1.0 - a * a)).ln();
                let ln2 = std::f64::consts::LN_2;
                let mut harmonic = 0.0; // H_{k-1}
                let mut weights = Vec::with_capacity(n + 1);
                weights.push(ln2 * ln2 / norm);
                for k in 1..=n {
                    let kf = k as f64;
                    weights.push((2.0 * ln2 / kf + 2.0 * harmonic / kf) / norm);
                    harmonic += 1.0 / kf;
                }
                let coeffs = geometric_weighted(n, a, |k| weights[k]);
                // (2 ln2 + 2 H_{k-1})/k <= (2 ln2 + 2 + 4/e) k^{-1/2}
                let scale = (2.0 * ln2 + 2.0 + 4.0 / std::f64::consts::E) / norm;
                (coeffs, TailEnvelope::new(scale, -0.5, a))
            }
            Family::BergmanPeak => {
                let c = GammaRatioTable::new(4.0, n)?;
                let lead = (1.0 - a * a) * (1.0 - a * a);
                let coeffs = geometric_weighted(n, a, |k| lead * c.get(k).unwrap());
                (coeffs, TailEnvelope::new(lead * gamma_ratio_envelope_scale(4.0), 3.0, a))
            }
        };
        let series = CoefficientSeries::with_envelope(coefficients, envelope, r_max)?;
        Ok(TestFamilyMember { family, parameter, series })
    }

    /// Closed-form value, valid on the closed unit disk.
    pub fn closed_form(&self, z: Complex64) -> Complex64 {
        let a = self.parameter;
        let one = Complex64::new(1.0, 0.0);
        match self.family {
            Family::ConstantOne => one,
            Family::PowerBeta { beta } => (one - a * z).powf(-beta) * (1.0 - a * a),
            Family::LogE => one - (one - a * z).ln(),
            Family::LogSq => {
                let l = Complex64::new(std::f64::consts::LN_2, 0.0) - (one - a * z).ln();
                l * l / (2.0 / (1.0 - a * a)).ln()
            }
            Family::BergmanPeak => {
                let w = (1.0 - a * a) / ((one - a * z) * (one - a * z));
                w * w
            }
        }
    }

    /// Closed-form derivative.
    pub fn closed_form_derivative(&self, z: Complex64) -> Complex64 {
        let a = self.parameter;
        let one = Complex64::new(1.0, 0.0);
        let d = one - a * z;
        match self.family {
            Family::ConstantOne => Complex64::new(0.0, 0.0),
            Family::PowerBeta { beta } => d.powf(-beta - 1.0) * (beta * a * (1.0 - a * a)),
            Family::LogE => a / d,
            Family::LogSq => {
                let l = Complex64::new(std::f64::consts::LN_2, 0.0) - d.ln();
                l * 2.0 * a / d / (2.0 / (1.0 - a * a)).ln()
            }
            Family::BergmanPeak => {
                let lead = (1.0 - a * a) * (1.0 - a * a);
                lead * 4.0 * a / d.powi(5)
            }
        }
    }
}

impl AnalyticFn for TestFamilyMember {
    fn value(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() > 1.0 + 1e-14 {
            return Err(Error::Domain(format!("|z| = {} outside the closed disk", z.norm())));
        }
        Ok(self.closed_form(z))
    }
}

/// `w(k) a^k` for `k = 0..=n`, computed without underflowing intermediate powers.
fn geometric_weighted(n: usize, a: f64, w: impl Fn(usize) -> f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut power = 1.0;
    for k in 0..=n {
        out.push(Complex64::new(w(k) * power, 0.0));
        power *= a;
    }
    out
}
