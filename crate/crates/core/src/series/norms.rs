//! Grid estimates of Bloch-type and Bergman norms.
//!
//! Sup-norms are maxima over a [`DiskGrid`] and therefore lower estimates of
//! the true suprema. The Bergman norm is a genuine quadrature: adaptive
//! Gauss–Kronrod in the radius, trapezoid (FFT) in the angle with doubling
//! until the circle mean settles.

use rustfft::FftPlanner;

use super::{CoefficientSeries, DiskGrid};
use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

fn check_grid(f: &CoefficientSeries, grid: &DiskGrid) -> Result<()> {
    if grid.max_radius() > f.r_max() + 1e-14 {
        return Err(Error::Domain(format!(
            "grid radius {} exceeds series r_max {}",
            grid.max_radius(),
            f.r_max()
        )));
    }
    Ok(())
}

/// `max over grid of (1-|z|²)^α |f'(z)|`.
pub fn bloch_seminorm(f: &CoefficientSeries, alpha: f64, grid: &DiskGrid) -> Result<f64> {
    check_grid(f, grid)?;
    let df = f.derivative();
    let fft = FftPlanner::new().plan_fft_inverse(grid.angles);
    let mut best = 0.0_f64;
    for r in grid.radii() {
        let weight = (1.0 - r * r).powf(alpha);
        let peak = df.eval_circle_with(r, &fft).iter().map(|v| v.norm()).fold(0.0, f64::max);
        best = best.max(weight * peak);
    }
    Ok(best)
}

/// `|f(0)| + bloch_seminorm`.
pub fn bloch_norm(f: &CoefficientSeries, alpha: f64, grid: &DiskGrid) -> Result<f64> {
    Ok(f.coefficients()[0].norm() + bloch_seminorm(f, alpha, grid)?)
}

/// The growth envelope `G_α(r)`: 1, `log(e/(1-r))` or `(1-r²)^{1-α}`.
pub fn growth_envelope(alpha: f64, r: f64) -> f64 {
    if alpha < 1.0 {
        1.0
    } else if alpha == 1.0 {
        1.0 - (-r).ln_1p()
    } else {
        (1.0 - r * r).powf(1.0 - alpha)
    }
}

/// `max over grid of |f(z)| / G_α(|z|)`.
pub fn growth_bound_check(f: &CoefficientSeries, alpha: f64, grid: &DiskGrid) -> Result<f64> {
    check_grid(f, grid)?;
    let fft = FftPlanner::new().plan_fft_inverse(grid.angles);
    let mut best = 0.0_f64;
    for r in grid.radii() {
        let peak = f.eval_circle_with(r, &fft).iter().map(|v| v.norm()).fold(0.0, f64::max);
        best = best.max(peak / growth_envelope(alpha, r));
    }
    Ok(best)
}

const ANGLE_TOL: f64 = 1e-11;
const MAX_ANGLES: usize = 1 << 17;

/// Normalized-area integral `∫_{|z|<r_max} |f| dA`.
///
/// For series with `r_max = 1` this is the Bergman `A¹` norm; otherwise it
/// is the integral over the smaller disk.
pub fn bergman_a1_norm(f: &CoefficientSeries, grid: &DiskGrid) -> Result<f64> {
    let mut planner = FftPlanner::new();
    let start = grid.angles.max(16).next_power_of_two();
    let plans: Vec<_> = std::iter::successors(Some(start), |&m| (m < MAX_ANGLES).then_some(2 * m))
        .map(|m| planner.plan_fft_inverse(m))
        .collect();
    let failure = std::cell::Cell::new(None::<f64>);
    let circle_mean = |rho: f64| -> f64 {
        let mut previous = f64::NAN;
        for fft in &plans {
            let vals = f.eval_circle_with(rho, fft);
            let mean = vals.iter().map(|v| v.norm()).sum::<f64>() / vals.len() as f64;
            if (mean - previous).abs() <= ANGLE_TOL * mean.abs().max(f64::MIN_POSITIVE) {
                return mean;
            }
            previous = mean;
        }
        failure.set(Some(rho));
        previous
    };
    let result = quadrature::adaptive(
        |rho: f64| 2.0 * rho * circle_mean(rho),
        0.0,
        f.r_max(),
        Tolerance::relative(1e-10),
        400,
    )?;
    if let Some(rho) = failure.get() {
        return Err(Error::numeric(
            format!("angular trapezoid did not settle at radius {rho}"),
            result.value,
        ));
    }
    Ok(result.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{Family, TestFamilyMember, DEFAULT_R_MAX};

    #[test]
    fn bloch_of_z() {
        let f = CoefficientSeries::from_real(&[0.0, 1.0]);
        let g = DiskGrid::default();
        assert!((bloch_seminorm(&f, 1.0, &g).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bloch_power_family_close_to_real_axis_search() {
        let lam = 0.9;
        let beta = 2.0;
        let m = TestFamilyMember::new(Family::PowerBeta { beta }, lam, 4096, DEFAULT_R_MAX).unwrap();
        let est = bloch_seminorm(&m.series, beta, &DiskGrid::default()).unwrap();
        // dense 1-D oracle on the real axis from the closed-form derivative
        let oracle = (0..=2_000_000)
            .map(|i| i as f64 / 2_000_000.0 * 0.99999)
            .map(|r| (1.0 - r * r).powf(beta) * beta * lam * (1.0 - lam * lam) / (1.0 - lam * r).powf(beta + 1.0))
            .fold(0.0, f64::max);
        assert!(est <= oracle * (1.0 + 1e-9));
        assert!(est >= 0.95 * oracle, "{est} vs {oracle}");
    }

    #[test]
    fn log_family_bounds() {
        for a in [0.5, 0.9, 0.99, 0.999] {
            let m = TestFamilyMember::new(Family::LogE, a, 16384, DEFAULT_R_MAX).unwrap();
            let g = DiskGrid::default();
            let semi = bloch_seminorm(&m.series, 1.0, &g).unwrap();
            assert!(semi <= 2.0);
            assert!(bloch_norm(&m.series, 1.0, &g).unwrap() <= 3.0);
        }
    }

    #[test]
    fn bergman_examples() {
        let g = DiskGrid::default();
        let one = CoefficientSeries::from_real(&[1.0]);
        assert!((bergman_a1_norm(&one, &g).unwrap() - 1.0).abs() < 1e-12);
        let z = CoefficientSeries::from_real(&[0.0, 1.0]);
        assert!((bergman_a1_norm(&z, &g).unwrap() - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn bergman_polynomial_with_zeros_on_circles() {
        // |1 + z| has a kink where the circle crosses the zero at -1 only at r = 1;
        // ∫|1+z| dA by 2-D oracle on a fine polar grid
        let f = CoefficientSeries::from_real(&[1.0, 1.0]);
        let est = bergman_a1_norm(&f, &DiskGrid::default()).unwrap();
        let n_r = 2000;
        let n_t = 4000;
        let mut oracle = 0.0;
        for i in 0..n_r {
            let r = (i as f64 + 0.5) / n_r as f64;
            let mut s = 0.0;
            for j in 0..n_t {
                let t = 2.0 * std::f64::consts::PI * j as f64 / n_t as f64;
                s += ((1.0 + r * t.cos()).powi(2) + (r * t.sin()).powi(2)).sqrt();
            }
            oracle += 2.0 * r * s / n_t as f64 / n_r as f64;
        }
        assert!((est - oracle).abs() < 1e-6, "{est} vs {oracle}");
    }

    #[test]
    fn growth_examples() {
        let one = CoefficientSeries::from_real(&[1.0]);
        assert_eq!(growth_bound_check(&one, 0.5, &DiskGrid::default()).unwrap(), 1.0);
        let m = TestFamilyMember::new(Family::LogE, 0.9, 4096, DEFAULT_R_MAX).unwrap();
        assert!(growth_bound_check(&m.series, 1.0, &DiskGrid::default()).unwrap() <= 3.0);
    }

    #[test]
    fn grid_must_fit_inside_r_max() {
        let m = TestFamilyMember::new(Family::LogE, 0.9, 64, 0.9).unwrap();
        assert!(bloch_seminorm(&m.series, 1.0, &DiskGrid::default()).is_err());
    }
}
