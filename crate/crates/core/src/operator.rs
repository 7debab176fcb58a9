//! The Hankel operator in coefficient form and its integral form.
//!
//! `H` acts on Taylor coefficients through the entries
//! `μ_{n,k,α} = c_n(α) m_{n+k}`; `I` integrates `f(t) / (1 - tz)^α` against
//! the measure. Both are computed independently so that their agreement is a
//! genuine check.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{MeasureSpec, MomentCache, INTEGRATE_TOL};
use crate::quadrature::gauss_legendre_on;
use crate::series::{AnalyticFn, CoefficientSeries, TailEnvelope, DEFAULT_R_MAX};
use crate::special::{gamma_ratio_envelope_scale, GammaRatioTable};

/// Largest input truncation ever suggested when the residual is too big.
const MAX_SUGGESTED_K: usize = 1 << 24;

/// Cached `c_n(α)` and moments `m_j` for one measure and one `α`.
#[derive(Debug, Clone)]
pub struct HankelEntrySpec {
    measure: MeasureSpec,
    alpha: f64,
    gamma_table: GammaRatioTable,
    moment_cache: MomentCache,
}

impl HankelEntrySpec {
    /// Caches cover `n ≤ n_max` and `n + k ≤ n_max + k_max`.
    pub fn new(measure: &MeasureSpec, alpha: f64, n_max: usize, k_max: usize) -> Result<Self> {
        measure.validate()?;
        Ok(HankelEntrySpec {
            measure: measure.clone(),
            alpha,
            gamma_table: GammaRatioTable::new(alpha, n_max)?,
            moment_cache: MomentCache::build(measure, n_max + k_max)?,
        })
    }

    pub fn measure(&self) -> &MeasureSpec {
        &self.measure
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma_table(&self) -> &GammaRatioTable {
        &self.gamma_table
    }

    pub fn moment_cache(&self) -> &MomentCache {
        &self.moment_cache
    }

    /// Grows the caches to cover `n ≤ n_max`, `n + k ≤ n_max + k_max`.
    pub fn ensure(&mut self, n_max: usize, k_max: usize) -> Result<()> {
        if self.gamma_table.n_max() < n_max {
            self.gamma_table = GammaRatioTable::new(self.alpha, n_max.max(2 * self.gamma_table.n_max()))?;
        }
        self.moment_cache.ensure(n_max + k_max)
    }

    /// `μ_{n,k,α} = c_n(α) m_{n+k}`.
    pub fn entry(&self, n: usize, k: usize) -> Result<f64> {
        let c = self.gamma_table.get(n);
        let m = self.moment_cache.get(n + k);
        match (c, m) {
            (Some(c), Some(m)) => Ok(c * m),
            _ => Err(Error::InsufficientTruncation(format!(
                "entry ({n},{k}) lies outside the cached range n ≤ {}, n+k ≤ {}",
                self.gamma_table.n_max(),
                self.moment_cache.j_max()
            ))),
        }
    }

    /// `c_n(α) · mass · t*^n`-type bound on `m_j` for `j > j0`, as an envelope ratio and
    /// the corresponding leading moment factor.
    fn moment_decay(&self, j0: usize) -> Result<(f64, f64)> {
        match self.measure.support_max() {
            Some(t) if t < 1.0 => Ok((self.measure.total_mass()?, t)),
            _ => Ok((self.moment_cache.get(j0).unwrap_or(0.0), 1.0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApplyOptions {
    pub n_out: usize,
    /// Input coefficients used; defaults to the input's order.
    pub k_in: Option<usize>,
    /// Evaluation radius attached to the output series.
    pub r_out: f64,
    /// Largest acceptable residual; `None` skips the check.
    pub tolerance: Option<f64>,
}

impl Default for ApplyOptions {
    fn default() -> Self {
        ApplyOptions { n_out: 4096, k_in: None, r_out: DEFAULT_R_MAX, tolerance: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorApplication {
    pub input: CoefficientSeries,
    pub output: CoefficientSeries,
    /// `(N_out, K_in)`
    pub truncation: (usize, usize),
    /// Bound on `|Σ_{k>K_in} μ_{n,k,α} a_k|` for every `n ≤ N_out`.
    pub residual_bound: f64,
}

/// `Σ_{K<k} |a_k|` from the stored coefficients and the envelope.
fn input_tail_l1(f: &CoefficientSeries, k_in: usize) -> f64 {
    let stored: f64 = f.coefficients().iter().skip(k_in + 1).map(|a| a.norm()).sum();
    stored + f.tail_l1()
}

/// `b_n = Σ_{k ≤ K_in} μ_{n,k,α} a_k` for `n ≤ N_out`.
pub fn apply_h(spec: &mut HankelEntrySpec, f: &CoefficientSeries, options: &ApplyOptions) -> Result<OperatorApplication> {
    let n_out = options.n_out;
    let k_in = options.k_in.unwrap_or(f.order()).min(f.order());
    spec.ensure(n_out, k_in + 1)?;
    let tail = input_tail_l1(f, k_in);
    let residual = residual_bound(spec, n_out, k_in, tail)?;
    if let Some(tol) = options.tolerance {
        if residual.is_nan() || residual > tol {
            return Err(Error::TruncationInsufficient {
                residual,
                tolerance: tol,
                suggested_k_in: suggest_k_in(spec, f, n_out, k_in, tol)?,
            });
        }
    }
    let a = &f.coefficients()[..=k_in];
    let c = spec.gamma_table.as_slice();
    let m = spec.moment_cache.as_slice();
    let coefficients: Vec<Complex64> = (0..=n_out)
        .into_par_iter()
        .map(|n| {
            let s: Complex64 = a.iter().enumerate().map(|(k, &ak)| ak * m[n + k]).sum();
            s * c[n]
        })
        .collect();
    let l1 = f.l1_norm();
    let (lead, ratio) = spec.moment_decay(n_out + 1)?;
    let scale = gamma_ratio_envelope_scale(spec.alpha) * lead * l1;
    let envelope = if scale == 0.0 { TailEnvelope::ZERO } else { TailEnvelope::new(scale, spec.alpha - 1.0, ratio) };
    let output = CoefficientSeries::with_envelope(coefficients, envelope, options.r_out)?;
    Ok(OperatorApplication { input: f.clone(), output, truncation: (n_out, k_in), residual_bound: residual })
}

/// `max_{n ≤ N} c_n m_{n+K+1} · tail`, using that moments do not increase.
fn residual_bound(spec: &HankelEntrySpec, n_out: usize, k_in: usize, tail: f64) -> Result<f64> {
    if tail == 0.0 {
        return Ok(0.0);
    }
    let c = spec.gamma_table.as_slice();
    let m = spec.moment_cache.as_slice();
    let worst = (0..=n_out).map(|n| c[n] * m[n + k_in + 1]).fold(0.0, f64::max);
    Ok(if worst == 0.0 { 0.0 } else { worst * tail })
}

/// Smallest doubled `K` whose conservative residual `max c_n · m_{K+1} · tail_K` meets `tol`.
fn suggest_k_in(spec: &HankelEntrySpec, f: &CoefficientSeries, n_out: usize, k_in: usize, tol: f64) -> Result<usize> {
    let c_max = spec.gamma_table.as_slice()[..=n_out].iter().copied().fold(0.0, f64::max);
    let mut k = (2 * k_in).max(1);
    while k < MAX_SUGGESTED_K {
        let tail = if k >= f.order() {
            f.envelope().tail_sum(k, 1.0)
        } else {
            input_tail_l1(f, k)
        };
        if c_max * spec.measure.moment(k + 1)? * tail <= tol {
            return Ok(k);
        }
        k *= 2;
    }
    Ok(MAX_SUGGESTED_K)
}

/// Evaluates `f` at real points, remembering the first failure.
struct RealSampler<'a> {
    f: &'a dyn AnalyticFn,
    failure: RefCell<Option<Error>>,
}

impl<'a> RealSampler<'a> {
    fn new(f: &'a dyn AnalyticFn) -> Self {
        RealSampler { f, failure: RefCell::new(None) }
    }

    fn at(&self, t: f64) -> Complex64 {
        match self.f.value(Complex64::new(t, 0.0)) {
            Ok(v) => v,
            Err(e) => {
                self.failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    }

    fn finish<T>(self, value: T) -> Result<T> {
        match self.failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(value),
        }
    }
}

fn check_gate(mu: &MeasureSpec, beta: f64) -> Result<()> {
    let gate = mu.convergence_gate(beta)?;
    if gate.admissible {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "the integral does not converge for inputs of order beta = {beta}"
        )))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must be positive, got {alpha}")))
    }
}

/// `∫ f(t) / (1 - tz)^α dμ(t)` for inputs from the space of order `beta`.
pub fn apply_i(mu: &MeasureSpec, alpha: f64, beta: f64, f: &dyn AnalyticFn, z: Complex64) -> Result<Complex64> {
    check_alpha(alpha)?;
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!("|z| = {} is not inside the disk", z.norm())));
    }
    check_gate(mu, beta)?;
    let sampler = RealSampler::new(f);
    let one = Complex64::new(1.0, 0.0);
    let value = mu.integrate_from(0.0, INTEGRATE_TOL, |t: f64, _s: f64| sampler.at(t) * (one - z * t).powf(-alpha))?;
    sampler.finish(value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalencePoint {
    pub z: Complex64,
    pub h_value: Complex64,
    pub i_value: Complex64,
    pub gap: f64,
    pub budget: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub max_abs_gap: f64,
    /// Largest per-point error budget.
    pub error_budget: f64,
    /// Every gap lies inside its point's budget.
    pub within_budget: bool,
    pub residual_bound: f64,
    pub points: Vec<EquivalencePoint>,
}

/// Rings `|z| ∈ {0, r/3, 2r/3, r}` with `angles` points each (one point at the origin).
pub fn equivalence_points(radius: f64, angles: usize) -> Vec<Complex64> {
    let mut pts = vec![Complex64::new(0.0, 0.0)];
    for ring in 1..=3 {
        let rho = radius * ring as f64 / 3.0;
        for j in 0..angles {
            pts.push(Complex64::from_polar(rho, 2.0 * std::f64::consts::PI * j as f64 / angles as f64));
        }
    }
    pts
}

/// Compares `H f` built from `series` with `I f` built from `exact` at `points`.
pub fn equivalence_check(
    spec: &mut HankelEntrySpec,
    beta: f64,
    series: &CoefficientSeries,
    exact: &dyn AnalyticFn,
    points: &[Complex64],
    options: &ApplyOptions,
) -> Result<EquivalenceReport> {
    let r_eval = points.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let opts = ApplyOptions { r_out: r_eval.max(options.r_out.min(DEFAULT_R_MAX)), ..*options };
    let applied = apply_h(spec, series, &opts)?;
    let mu = spec.measure().clone();
    let alpha = spec.alpha();
    let out = &applied.output;
    let abs_sum = |r: f64| -> f64 {
        let mut power = 1.0;
        let mut s = 0.0;
        for b in out.coefficients() {
            s += b.norm() * power;
            power *= r;
        }
        s
    };
    let n_out = applied.truncation.0;
    let rows: Vec<Result<EquivalencePoint>> = points
        .par_iter()
        .map(|&z| {
            let r = z.norm();
            let h_value = out.evaluate(z)?;
            let i_value = apply_i(&mu, alpha, beta, exact, z)?;
            let geometric = if r < 1.0 { (1.0 - r.powi(n_out as i32 + 1)) / (1.0 - r) } else { n_out as f64 + 1.0 };
            let budget = applied.residual_bound * geometric
                + out.tail_bound_at(r)
                + 1e-11 * abs_sum(r)
                + 10.0 * INTEGRATE_TOL * i_value.norm().max(1.0);
            Ok(EquivalencePoint { z, h_value, i_value, gap: (h_value - i_value).norm(), budget })
        })
        .collect();
    let points = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let max_abs_gap = points.iter().map(|p| p.gap).fold(0.0, f64::max);
    let error_budget = points.iter().map(|p| p.budget).fold(0.0, f64::max);
    let within_budget = points.iter().all(|p| p.gap <= p.budget);
    Ok(EquivalenceReport { max_abs_gap, error_budget, within_budget, residual_bound: applied.residual_bound, points })
}

/// Weight in the area pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingWeight {
    /// `(α-1)(1-|z|²)^{α-2}`, the reproducing-kernel normalization.
    Reproducing,
    /// `(1-|z|²)^{α-1}` without normalization.
    Duality,
}

/// Taylor series of `I f` around 0 with coefficients `c_n(α) ∫ f(t) t^n dμ`,
/// truncated so that the tail on `|w| ≤ radius` stays below `tol`.
pub fn integral_series(
    mu: &MeasureSpec,
    alpha: f64,
    beta: f64,
    f: &dyn AnalyticFn,
    radius: f64,
    tol: f64,
) -> Result<CoefficientSeries> {
    check_alpha(alpha)?;
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::Domain(format!("radius must lie in (0,1), got {radius}")));
    }
    check_gate(mu, beta)?;
    let sampler = RealSampler::new(f);
    let abs_mass: f64 = mu.integrate_from(0.0, INTEGRATE_TOL, |t: f64, _| sampler.at(t).norm())?;
    let abs_mass = sampler.finish(abs_mass)? * (1.0 + 1e-8);
    let ratio = mu.support_max().filter(|&t| t < 1.0).unwrap_or(1.0);
    if abs_mass == 0.0 {
        return Ok(CoefficientSeries::from_real(&[0.0]));
    }
    let envelope = TailEnvelope::new(gamma_ratio_envelope_scale(alpha) * abs_mass, alpha - 1.0, ratio);
    let tol = tol * abs_mass.max(1.0);
    let mut n = 16usize;
    while envelope.tail_sum(n, radius) > tol {
        n *= 2;
        if n > MAX_SUGGESTED_K {
            return Err(Error::InsufficientTruncation(format!(
                "integral series needs more than {MAX_SUGGESTED_K} terms at radius {radius}"
            )));
        }
    }
    // bisect back towards the smallest sufficient order
    let (mut lo, mut hi) = (n / 2, n);
    while hi - lo > 16 {
        let mid = (lo + hi) / 2;
        if envelope.tail_sum(mid, radius) > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let n = hi;
    let c = GammaRatioTable::new(alpha, n)?;
    let coefficients = (0..=n)
        .into_par_iter()
        .map(|j| {
            let sampler = RealSampler::new(f);
            let jf = j as f64;
            let v: Complex64 = mu.integrate_from(0.0, INTEGRATE_TOL * 1e-2, |t: f64, s: f64| {
                let power = if j <= 16 {
                    t.powi(j as i32)
                } else {
                    (jf * (-s).ln_1p()).exp()
                };
                sampler.at(t) * power
            })?;
            sampler.finish(v * c.as_slice()[j])
        })
        .collect::<Result<Vec<_>>>()?;
    CoefficientSeries::with_envelope(coefficients, envelope, radius)
}

const PAIRING_RADIAL_NODES: usize = 64;
const PAIRING_PANELS: usize = 14;
const PAIRING_ANGLES: usize = 256;
const PAIRING_MAX_ANGLES: usize = 1 << 16;
const PAIRING_ANGLE_TOL: f64 = 1e-14;

/// `Σ_{n ≥ M} |a_n| rho^n` for every `M`, plus the total in slot 0.
fn suffix_sums(series: &CoefficientSeries, rho: f64) -> Vec<f64> {
    let mut power = 1.0;
    let terms: Vec<f64> = series
        .coefficients()
        .iter()
        .map(|a| {
            let v = a.norm() * power;
            power *= rho;
            v
        })
        .collect();
    let mut out = vec![0.0; terms.len() + 1];
    for i in (0..terms.len()).rev() {
        out[i] = out[i + 1] + terms[i];
    }
    out
}

/// Mean of `conj(F) G` over the circle `|w| = rho` by the uniform rule on the
/// fewest nodes whose aliasing bound meets the tolerance.
///
/// Aliased pairs `n ≢ k`, `n ≡ k mod M` have `max(n, k) ≥ M`, so the error is
/// at most `A_{≥M} B + A B_{≥M}` with `A, B` the weighted absolute sums.
fn circle_pairing(fs: &CoefficientSeries, g: &CoefficientSeries, rho: f64, plans: &[Arc<dyn Fft<f64>>]) -> Result<Complex64> {
    let a = suffix_sums(fs, rho);
    let b = suffix_sums(g, rho);
    let tail = |s: &[f64], m: usize| s.get(m).copied().unwrap_or(0.0);
    let target = PAIRING_ANGLE_TOL * a[0] * b[0];
    let mut bound = f64::INFINITY;
    for fft in plans {
        let m = fft.len();
        bound = tail(&a, m) * b[0] + a[0] * tail(&b, m);
        if bound <= target {
            let x = fs.eval_circle_with(rho, fft);
            let y = g.eval_circle_with(rho, fft);
            return Ok(x.iter().zip(&y).map(|(u, v)| u.conj() * v).sum::<Complex64>() / m as f64);
        }
    }
    Err(Error::numeric(format!("angular rule cannot resolve |w| = {rho} (aliasing bound {bound:e})"), bound))
}

/// `∫_D conj(I f(rz)) g(rz) W(|z|) dA(z)` with the chosen weight.
#[allow(clippy::too_many_arguments)]
pub fn pairing_lhs(
    mu: &MeasureSpec,
    alpha: f64,
    beta: f64,
    f: &dyn AnalyticFn,
    g: &CoefficientSeries,
    r: f64,
    weight: PairingWeight,
) -> Result<Complex64> {
    if alpha.is_nan() || alpha < 2.0 {
        return Err(Error::Domain(format!("the pairing needs alpha >= 2, got {alpha}")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("r must lie in (0,1), got {r}")));
    }
    if g.r_max() < r {
        return Err(Error::Domain(format!("g is only known up to |z| = {}", g.r_max())));
    }
    let fs = integral_series(mu, alpha, beta, f, r, 1e-13)?;
    let (exponent, factor) = match weight {
        PairingWeight::Reproducing => (alpha - 2.0, alpha - 1.0),
        PairingWeight::Duality => (alpha - 1.0, 1.0),
    };
    let mut planner = FftPlanner::new();
    let plans: Vec<Arc<dyn Fft<f64>>> =
        std::iter::successors(Some(PAIRING_ANGLES), |&m| (m < PAIRING_MAX_ANGLES).then_some(2 * m))
            .map(|m| planner.plan_fft_inverse(m))
            .collect();
    // panels [1-2^{-i}, 1-2^{-i-1}] grade towards the boundary, the last one closes at 1
    let mut nodes = Vec::new();
    for i in 0..PAIRING_PANELS {
        let a = 1.0 - 0.5f64.powi(i as i32);
        let b = if i + 1 == PAIRING_PANELS { 1.0 } else { 1.0 - 0.5f64.powi(i as i32 + 1) };
        nodes.extend(gauss_legendre_on(PAIRING_RADIAL_NODES, a, b));
    }
    let terms = nodes
        .par_iter()
        .map(|&(rho, w)| {
            let one_minus = (1.0 - rho) * (1.0 + rho);
            let radial = 2.0 * rho * one_minus.powf(exponent) * w;
            if radial == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            Ok(circle_pairing(&fs, g, r * rho, &plans)? * radial)
        })
        .collect::<Result<Vec<Complex64>>>()?;
    Ok(terms.into_iter().sum::<Complex64>() * factor)
}

/// `∫ conj(f(t)) g(r² t) dμ(t)`.
pub fn pairing_rhs(mu: &MeasureSpec, beta: f64, f: &dyn AnalyticFn, g: &CoefficientSeries, r: f64) -> Result<Complex64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!("r must lie in (0,1], got {r}")));
    }
    check_gate(mu, beta)?;
    let fs = RealSampler::new(f);
    let gs = RealSampler::new(g);
    let v = mu.integrate_from(0.0, INTEGRATE_TOL, |t: f64, _| fs.at(t).conj() * gs.at(r * r * t))?;
    let v = fs.finish(v)?;
    gs.finish(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingLimit {
    /// `(r, value)` at each radius.
    pub samples: Vec<(f64, Complex64)>,
    pub extrapolated: Complex64,
    /// Distance between the extrapolations from the two adjacent radius pairs.
    pub spread: f64,
}

/// Radii at which the `r → 1` limit of the pairing is sampled.
pub const PAIRING_LIMIT_RADII: [f64; 3] = [0.9, 0.99, 0.999];

/// `lim_{r→1} pairing_lhs` by first-order Richardson extrapolation in `1 - r`.
pub fn pairing_limit(
    mu: &MeasureSpec,
    alpha: f64,
    beta: f64,
    f: &dyn AnalyticFn,
    g: &CoefficientSeries,
    weight: PairingWeight,
) -> Result<PairingLimit> {
    let samples = PAIRING_LIMIT_RADII
        .iter()
        .map(|&r| Ok((r, pairing_lhs(mu, alpha, beta, f, g, r, weight)?)))
        .collect::<Result<Vec<_>>>()?;
    let richardson = |coarse: Complex64, fine: Complex64| (fine * 10.0 - coarse) / 9.0;
    let early = richardson(samples[0].1, samples[1].1);
    let late = richardson(samples[1].1, samples[2].1);
    Ok(PairingLimit { samples, extrapolated: late, spread: (late - early).norm() })
}

/// `∫_{[a,1)} ((1-a²)/(1-a r² t)²)² w(a,t) dμ(t)` with `w = 1` (`β<1`),
/// `log(e/(1-at))` (`β=1`) or `(1-a²)(1-at)^{-β}` (`β>1`).
pub fn lower_bound_functional(mu: &MeasureSpec, beta: f64, a: f64, r: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0 && r >= a && r < 1.0) {
        return Err(Error::Domain(format!("need 0 < a <= r < 1, got a = {a}, r = {r}")));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    let one_minus_a2 = (1.0 - a) * (1.0 + a);
    let ar2 = a * r * r;
    mu.integrate_from(a, INTEGRATE_TOL, |_t: f64, s: f64| {
        // 1 - c t = (1 - c) + c s keeps precision near t = 1
        let peak = one_minus_a2 / ((1.0 - ar2) + ar2 * s).powi(2);
        let one_minus_at = (1.0 - a) + a * s;
        let w = if beta < 1.0 {
            1.0
        } else if beta == 1.0 {
            1.0 - one_minus_at.ln()
        } else {
            one_minus_a2 * one_minus_at.powf(-beta)
        };
        peak * peak * w
    })
}
