//! Positive Borel measures on `[0,1)`.
//!
//! A measure is a finite positive combination of point masses and densities
//! of the form `(1-t)^p (log(e/(1-t)))^q dt`. All integrals against a
//! density are computed after the substitution `u = -log(1-t)`, which turns
//! the density into `e^{-(p+1)u} (1+u)^q du` on `[0, ∞)`; integrands receive
//! both `t` and `1-t` so that quantities such as `(1-t)^{-c}` stay accurate
//! when `t` rounds to one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadValue, Tolerance};

/// Atoms closer than this to 1 are rejected.
pub const ATOM_EDGE: f64 = 1e-12;

/// Relative tolerance used for moments.
pub const MOMENT_TOL: f64 = 1e-12;

/// Relative tolerance used for general integrals.
pub const INTEGRATE_TOL: f64 = 1e-10;

/// Moments below this magnitude are stored as zero.
pub const MOMENT_FLOOR: f64 = 1e-300;

const U_SPAN: f64 = 65536.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeasureSpec {
    /// Point masses `(location, weight)`.
    Atomic { atoms: Vec<(f64, f64)> },
    /// `(1-t)^p (log(e/(1-t)))^q dt`.
    Density {
        p: f64,
        #[serde(default)]
        q: f64,
    },
    /// Finite positive combination `Σ scale_i μ_i`.
    Mixture { parts: Vec<(f64, MeasureSpec)> },
}

/// Weight applied by [`MeasureSpec::weighted`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    /// `log(e/(1-t))`
    LogE,
    /// `(1-t)^{1-β}` for `β > 1`
    Power { beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateResult {
    pub admissible: bool,
    pub value: f64,
}

impl MeasureSpec {
    pub fn lebesgue() -> Self {
        MeasureSpec::Density { p: 0.0, q: 0.0 }
    }

    pub fn density(p: f64, q: f64) -> Self {
        MeasureSpec::Density { p, q }
    }

    pub fn atom(t: f64, w: f64) -> Self {
        MeasureSpec::Atomic { atoms: vec![(t, w)] }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mu: MeasureSpec = serde_json::from_str(text)?;
        mu.validate()?;
        Ok(mu)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure specs always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MeasureSpec::Atomic { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::InvalidMeasure("atomic measure needs at least one atom".into()));
                }
                for &(t, w) in atoms {
                    if !(t.is_finite() && (0.0..1.0).contains(&t)) {
                        return Err(Error::InvalidMeasure(format!("atom location {t} outside [0,1)")));
                    }
                    if t > 1.0 - ATOM_EDGE {
                        return Err(Error::InvalidMeasure(format!(
                            "atom location {t} is within {ATOM_EDGE:e} of 1"
                        )));
                    }
                    if !(w.is_finite() && w > 0.0) {
                        return Err(Error::InvalidMeasure(format!("atom weight {w} must be positive")));
                    }
                }
                Ok(())
            }
            MeasureSpec::Density { p, q } => {
                if !p.is_finite() || !q.is_finite() {
                    return Err(Error::InvalidMeasure("density exponents must be finite".into()));
                }
                if *p > -1.0 || (*p == -1.0 && *q < -1.0) {
                    Ok(())
                } else {
                    Err(Error::InvalidMeasure(format!(
                        "density (1-t)^{p} (log(e/(1-t)))^{q} has infinite mass"
                    )))
                }
            }
            MeasureSpec::Mixture { parts } => {
                if parts.is_empty() {
                    return Err(Error::InvalidMeasure("mixture needs at least one part".into()));
                }
                for (scale, part) in parts {
                    if !(scale.is_finite() && *scale > 0.0) {
                        return Err(Error::InvalidMeasure(format!("mixture scale {scale} must be positive")));
                    }
                    part.validate()?;
                }
                Ok(())
            }
        }
    }

    /// Largest point of the support, `None` when the support reaches 1.
    pub fn support_max(&self) -> Option<f64> {
        match self {
            MeasureSpec::Atomic { atoms } => atoms.iter().map(|a| a.0).reduce(f64::max),
            MeasureSpec::Density { .. } => None,
            MeasureSpec::Mixture { parts } => parts
                .iter()
                .map(|(_, m)| m.support_max())
                .try_fold(0.0_f64, |acc, s| s.map(|s| acc.max(s))),
        }
    }

    /// `∫_{[from,1)} f(t, 1-t) dμ(t)` to relative tolerance `tol`.
    pub fn integrate_from<T, F>(&self, from: f64, tol: f64, f: F) -> Result<T>
    where
        T: QuadValue,
        F: Fn(f64, f64) -> T,
    {
        self.validate()?;
        self.integrate_unchecked(from, tol, &f)
    }

    fn integrate_unchecked<T, F>(&self, from: f64, tol: f64, f: &F) -> Result<T>
    where
        T: QuadValue,
        F: Fn(f64, f64) -> T,
    {
        match self {
            MeasureSpec::Atomic { atoms } => Ok(atoms
                .iter()
                .filter(|(t, _)| *t >= from)
                .fold(T::default(), |acc, &(t, w)| acc + f(t, 1.0 - t) * w)),
            MeasureSpec::Density { p, q } => density_integral(*p, *q, from, tol, f),
            MeasureSpec::Mixture { parts } => {
                let mut acc = T::default();
                for (scale, part) in parts {
                    acc = acc + part.integrate_unchecked(from, tol, f)? * *scale;
                }
                Ok(acc)
            }
        }
    }

    /// `∫ f dμ` over all of `[0,1)`.
    pub fn integrate<T, F>(&self, f: F) -> Result<T>
    where
        T: QuadValue,
        F: Fn(f64) -> T,
    {
        self.integrate_from(0.0, INTEGRATE_TOL, |t, _| f(t))
    }

    pub fn total_mass(&self) -> Result<f64> {
        self.integrate_from(0.0, MOMENT_TOL, |_, _| 1.0)
    }

    /// `m_j = ∫ t^j dμ(t)`.
    pub fn moment(&self, j: usize) -> Result<f64> {
        self.validate()?;
        self.moment_unchecked(j)
    }

    fn moment_unchecked(&self, j: usize) -> Result<f64> {
        let jf = j as f64;
        let m = self.integrate_unchecked(0.0, MOMENT_TOL, &|t: f64, s: f64| {
            if j == 0 {
                1.0
            } else if j <= 16 {
                t.powi(j as i32)
            } else if t < 0.5 {
                t.powf(jf)
            } else {
                (jf * (-s).ln_1p()).exp()
            }
        })?;
        Ok(if m < MOMENT_FLOOR { 0.0 } else { m })
    }

    /// `μ([t,1))`.
    pub fn tail(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && (0.0..1.0).contains(&t)) {
            return Err(Error::Domain(format!("tail requires 0 <= t < 1, got {t}")));
        }
        self.integrate_from(t, MOMENT_TOL, |_, _| 1.0)
    }

    /// The measure `w(t) dμ(t)`.
    pub fn weighted(&self, weight: Weight) -> Result<MeasureSpec> {
        if let Weight::Power { beta } = weight {
            if !(beta.is_finite() && beta > 1.0) {
                return Err(Error::Domain(format!("power weight needs beta > 1, got {beta}")));
            }
        }
        self.validate()?;
        let out = match self {
            MeasureSpec::Atomic { atoms } => MeasureSpec::Atomic {
                atoms: atoms
                    .iter()
                    .map(|&(t, w)| {
                        let s = 1.0 - t;
                        let factor = match weight {
                            Weight::LogE => 1.0 - s.ln(),
                            Weight::Power { beta } => s.powf(1.0 - beta),
                        };
                        (t, w * factor)
                    })
                    .collect(),
            },
            MeasureSpec::Density { p, q } => match weight {
                Weight::LogE => MeasureSpec::Density { p: *p, q: q + 1.0 },
                Weight::Power { beta } => MeasureSpec::Density { p: p + 1.0 - beta, q: *q },
            },
            MeasureSpec::Mixture { parts } => MeasureSpec::Mixture {
                parts: parts
                    .iter()
                    .map(|(c, m)| m.weighted(weight).map(|m| (*c, m)))
                    .collect::<Result<_>>()?,
            },
        };
        out.validate()?;
        Ok(out)
    }

    /// Whether the integral operator converges for every `f` in the
    /// Bloch-type space of order `beta`, together with the value of the
    /// deciding integral (`+∞` when inadmissible).
    pub fn convergence_gate(&self, beta: f64) -> Result<GateResult> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Domain(format!("gate requires beta > 0, got {beta}")));
        }
        self.validate()?;
        if !self.gate_finite(beta) {
            return Ok(GateResult { admissible: false, value: f64::INFINITY });
        }
        let value = if beta < 1.0 {
            self.total_mass()?
        } else if beta == 1.0 {
            self.weighted(Weight::LogE)?.total_mass()?
        } else {
            self.weighted(Weight::Power { beta })?.total_mass()?
        };
        Ok(GateResult { admissible: value.is_finite(), value })
    }

    fn gate_finite(&self, beta: f64) -> bool {
        match self {
            MeasureSpec::Atomic { .. } => true,
            MeasureSpec::Density { p, q } => {
                let (p, q) = if beta < 1.0 {
                    (*p, *q)
                } else if beta == 1.0 {
                    (*p, q + 1.0)
                } else {
                    (p + 1.0 - beta, *q)
                };
                p > -1.0 || (p == -1.0 && q < -1.0)
            }
            MeasureSpec::Mixture { parts } => parts.iter().all(|(_, m)| m.gate_finite(beta)),
        }
    }
}

fn density_integral<T, F>(p: f64, q: f64, from: f64, tol: f64, f: &F) -> Result<T>
where
    T: QuadValue,
    F: Fn(f64, f64) -> T,
{
    let u0 = -(-from).ln_1p();
    let rate = p + 1.0;
    let tolerance = Tolerance::relative(tol);
    if rate > 0.0 {
        let integrand = |u: f64| {
            let log_w = -rate * u + q * u.ln_1p();
            let w = log_w.exp();
            if w == 0.0 {
                return T::default();
            }
            let s = (-u).exp();
            let t = -(-u).exp_m1();
            f(t, s) * w
        };
        let span = U_SPAN.max(64.0 / rate);
        Ok(quadrature::half_line(integrand, u0, tolerance, span)?.value)
    } else {
        // p = -1, q < -1: substitute 1 + u = e^v, giving e^{(q+1)v} dv.
        let v0 = u0.ln_1p();
        let integrand = |v: f64| {
            let w = ((q + 1.0) * v).exp();
            if w == 0.0 {
                return T::default();
            }
            let u = v.exp_m1();
            let s = (-u).exp();
            let t = -(-u).exp_m1();
            f(t, s) * w
        };
        Ok(quadrature::half_line(integrand, v0, tolerance, U_SPAN)?.value)
    }
}

/// Moments `m_0..=m_{j_max}` of a fixed measure.
#[derive(Debug, Clone)]
pub struct MomentCache {
    measure: MeasureSpec,
    moments: Vec<f64>,
}

impl MomentCache {
    pub fn build(measure: &MeasureSpec, j_max: usize) -> Result<Self> {
        measure.validate()?;
        let moments = compute_moments(measure, 0, j_max)?;
        Ok(MomentCache { measure: measure.clone(), moments })
    }

    pub fn measure(&self) -> &MeasureSpec {
        &self.measure
    }

    pub fn j_max(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn get(&self, j: usize) -> Option<f64> {
        self.moments.get(j).copied()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.moments
    }

    /// Grows the cache by doubling until it covers `j`.
    pub fn ensure(&mut self, j: usize) -> Result<()> {
        let mut target = self.j_max();
        if j <= target {
            return Ok(());
        }
        while target < j {
            target = (2 * target).max(1);
        }
        let extra = compute_moments(&self.measure, self.moments.len(), target)?;
        self.moments.extend(extra);
        Ok(())
    }
}

/// Moment ranges at least this long use the shared-node rule.
const BATCH_MIN: usize = 64;
const BATCH_GL_NODES: usize = 20;
/// Panel width in `u = -log(1-t)` where `t^j` switches on for some `j` in range.
const BATCH_PANEL: f64 = 0.5;
/// Geometric growth of panel widths beyond the switching region.
const BATCH_GROWTH: f64 = 1.25;
/// Re-anchor running powers with an exact `exp` this often.
const BATCH_ANCHOR: usize = 64;

fn compute_moments(measure: &MeasureSpec, from: usize, to: usize) -> Result<Vec<f64>> {
    let mut moments = if to + 1 - from >= BATCH_MIN {
        batched_moments(measure, from, to)?
    } else {
        (from..=to).into_par_iter().map(|j| measure.moment_unchecked(j)).collect::<Result<Vec<_>>>()?
    };
    // Quadrature noise may break the exact monotonicity by an ulp or so.
    for i in 1..moments.len() {
        if moments[i] > moments[i - 1] {
            moments[i] = moments[i - 1];
        }
    }
    Ok(moments)
}

/// `m_from..=m_to` from one set of `(log t, weight)` nodes per component.
///
/// In `u = -log(1-t)` every `t^j` is a unit-width switch located at
/// `u ≈ log j`, so one composite Gauss–Legendre rule with panels of width
/// [`BATCH_PANEL`] up to the last switch, then geometrically wider panels
/// following the density's decay, serves all `j` at once.
fn batched_moments(measure: &MeasureSpec, from: usize, to: usize) -> Result<Vec<f64>> {
    match measure {
        MeasureSpec::Atomic { atoms } => {
            let nodes: Vec<(f64, f64)> = atoms.iter().map(|&(t, w)| (t.ln(), w)).collect();
            Ok(sum_powers(&nodes, from, to))
        }
        MeasureSpec::Density { p, q } if *p > -1.0 => Ok(sum_powers(&density_nodes(*p, *q, to), from, to)),
        MeasureSpec::Density { .. } => {
            (from..=to).into_par_iter().map(|j| measure.moment_unchecked(j)).collect()
        }
        MeasureSpec::Mixture { parts } => {
            let mut acc = vec![0.0; to + 1 - from];
            for (scale, part) in parts {
                for (a, v) in acc.iter_mut().zip(batched_moments(part, from, to)?) {
                    *a += scale * v;
                }
            }
            Ok(acc)
        }
    }
}

fn density_nodes(p: f64, q: f64, j_max: usize) -> Vec<(f64, f64)> {
    let rate = p + 1.0;
    let switch_end = ((j_max + 1) as f64).ln() + 8.0;
    // past `end` the weight e^{-rate u}(1+u)^q is below 1e-18 of the smallest moment
    let mut end = switch_end;
    for _ in 0..4 {
        end = switch_end + (42.0 + q.max(0.0) * end.ln_1p()) / rate;
    }
    let (x, w) = crate::quadrature::gauss_legendre(BATCH_GL_NODES);
    let mut nodes = Vec::new();
    let mut a = 0.0;
    let mut width = BATCH_PANEL;
    while a < end {
        let b = a + width;
        for (xi, wi) in x.iter().zip(&w) {
            let u = a + 0.5 * width * (xi + 1.0);
            let weight = (-rate * u + q * u.ln_1p()).exp() * 0.5 * width * wi;
            nodes.push(((-(-u).exp()).ln_1p(), weight));
        }
        a = b;
        if a >= switch_end {
            width *= BATCH_GROWTH;
        }
    }
    nodes
}

/// `Σ_i w_i t_i^j` for `j = from..=to` with nodes given as `(log t_i, w_i)`.
fn sum_powers(nodes: &[(f64, f64)], from: usize, to: usize) -> Vec<f64> {
    let mut out = vec![0.0; to + 1 - from];
    for &(log_t, w) in nodes {
        if w == 0.0 {
            continue;
        }
        if log_t == f64::NEG_INFINITY {
            if from == 0 {
                out[0] += w;
            }
            continue;
        }
        let t = log_t.exp();
        let mut power = 0.0;
        for (i, slot) in out.iter_mut().enumerate() {
            let j = from + i;
            if i % BATCH_ANCHOR == 0 {
                power = (j as f64 * log_t).exp();
            } else {
                power *= t;
            }
            if power < MOMENT_FLOOR {
                break;
            }
            *slot += w * power;
        }
    }
    for v in out.iter_mut() {
        if *v < MOMENT_FLOOR {
            *v = 0.0;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beta_moment(m: usize, p: usize) -> f64 {
        // B(m+1, p+1) = m! p! / (m+p+1)!
        let mut v = 1.0;
        for i in 1..=p {
            v *= i as f64 / (m + i) as f64;
        }
        v / (m + p + 1) as f64
    }

    #[test]
    fn atomic_moment() {
        assert_eq!(MeasureSpec::atom(0.5, 1.0).moment(3).unwrap(), 0.125);
    }

    #[test]
    fn lebesgue_moments() {
        let mu = MeasureSpec::lebesgue();
        for m in [0usize, 1, 5, 50, 1000] {
            let v = mu.moment(m).unwrap();
            assert!((v - 1.0 / (m as f64 + 1.0)).abs() < 1e-12 / (m as f64 + 1.0), "m={m} v={v}");
        }
    }

    #[test]
    fn density_p1_moments_match_beta() {
        let mu = MeasureSpec::density(1.0, 0.0);
        for m in [0usize, 3, 40, 700] {
            let exact = 1.0 / ((m as f64 + 1.0) * (m as f64 + 2.0));
            assert!((mu.moment(m).unwrap() - exact).abs() <= 1e-10 * exact);
        }
    }

    #[test]
    fn quadrature_vs_closed_form_beta_family() {
        for p in 0..=2usize {
            let mu = MeasureSpec::density(p as f64, 0.0);
            for m in [0usize, 1, 10, 100, 5000] {
                let exact = beta_moment(m, p);
                let v = mu.moment(m).unwrap();
                assert!((v - exact).abs() <= 1e-10 * exact, "p={p} m={m}");
            }
        }
    }

    #[test]
    fn tails() {
        assert!((MeasureSpec::lebesgue().tail(0.75).unwrap() - 0.25).abs() < 1e-14);
        let t = 0.3;
        let v = MeasureSpec::density(1.0, 0.0).tail(t).unwrap();
        assert!((v - (1.0 - t) * (1.0 - t) / 2.0).abs() < 1e-14);
        assert_eq!(MeasureSpec::atom(0.5, 1.0).tail(0.6).unwrap(), 0.0);
        assert_eq!(MeasureSpec::atom(0.5, 1.0).tail(0.5).unwrap(), 1.0);
        assert!(MeasureSpec::lebesgue().tail(1.0).is_err());
        assert!(MeasureSpec::lebesgue().tail(-0.1).is_err());
    }

    #[test]
    fn deep_tail_is_relatively_accurate() {
        let h = 2f64.powi(-40);
        let v = MeasureSpec::density(2.0, 0.0).tail(1.0 - h).unwrap();
        let exact = h.powi(3) / 3.0;
        assert!((v / exact - 1.0).abs() < 1e-10);
    }

    #[test]
    fn transforms() {
        assert_eq!(
            MeasureSpec::lebesgue().weighted(Weight::LogE).unwrap(),
            MeasureSpec::density(0.0, 1.0)
        );
        assert_eq!(
            MeasureSpec::density(2.0, 0.0).weighted(Weight::Power { beta: 2.0 }).unwrap(),
            MeasureSpec::density(1.0, 0.0)
        );
        match MeasureSpec::atom(0.5, 1.0).weighted(Weight::LogE).unwrap() {
            MeasureSpec::Atomic { atoms } => {
                assert!((atoms[0].1 - (1.0 + 2f64.ln())).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(MeasureSpec::lebesgue().weighted(Weight::Power { beta: 0.5 }).is_err());
        // (1-t)^{-2} dt has infinite mass
        assert!(MeasureSpec::lebesgue().weighted(Weight::Power { beta: 3.0 }).is_err());
    }

    #[test]
    fn integrate_examples() {
        let v = MeasureSpec::lebesgue().integrate_from(0.0, INTEGRATE_TOL, |_, s| 1.0 - s.ln()).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
        let v: f64 = MeasureSpec::atom(0.5, 2.0).integrate(|t| t * t).unwrap();
        assert_eq!(v, 0.5);
        let v: f64 = MeasureSpec::lebesgue().integrate(|_| 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gates() {
        let leb = MeasureSpec::lebesgue();
        let g = leb.convergence_gate(0.5).unwrap();
        assert!(g.admissible && (g.value - 1.0).abs() < 1e-12);
        let g = leb.convergence_gate(1.0).unwrap();
        assert!(g.admissible && (g.value - 2.0).abs() < 1e-9);
        let g = leb.convergence_gate(3.0).unwrap();
        assert!(!g.admissible && g.value.is_infinite());
        // critical line p + 1 - beta = -1 with q < -1 converges: ∫ (1+u)^{-3} du = 1/2
        let g = MeasureSpec::density(0.0, -3.0).convergence_gate(2.0).unwrap();
        assert!(g.admissible && (g.value - 0.5).abs() < 1e-9, "{g:?}");
        let g = MeasureSpec::density(0.0, -1.0).convergence_gate(2.0).unwrap();
        assert!(!g.admissible);
        assert!(leb.convergence_gate(0.0).is_err());
    }

    #[test]
    fn gate_agrees_with_direct_quadrature() {
        // 0.5 away from the critical exponent on either side
        for (p, beta) in [(0.0, 2.5), (1.0, 3.5), (0.5, 3.0)] {
            let e = p + 1.0 - beta; // -1.5, -1.5, -1.5
            assert!(!MeasureSpec::density(p, 0.0).convergence_gate(beta).unwrap().admissible);
            // truncated integral ∫_0^{1-h} (1-t)^e dt blows past 1e8
            let h: f64 = 1e-17;
            let u_max = -h.ln();
            let v = quadrature::adaptive(|u: f64| (-(e + 1.0) * u).exp(), 0.0, u_max, Tolerance::relative(1e-10), 500)
                .unwrap()
                .value;
            assert!(v > 1e8, "e={e} v={v}");
        }
        for (p, beta) in [(0.0, 1.5), (1.0, 2.5), (0.5, 2.0)] {
            let g = MeasureSpec::density(p, 0.0).convergence_gate(beta).unwrap();
            assert!(g.admissible);
            let exact = 1.0 / (p + 2.0 - beta);
            assert!((g.value - exact).abs() < 1e-8 * exact);
        }
    }

    #[test]
    fn validation() {
        assert!(MeasureSpec::density(-1.0, 0.0).validate().is_err());
        assert!(MeasureSpec::density(-1.5, 0.0).moment(0).is_err());
        assert!(MeasureSpec::atom(1.0, 1.0).validate().is_err());
        assert!(MeasureSpec::atom(1.0 - 1e-13, 1.0).validate().is_err());
        assert!(MeasureSpec::atom(0.5, 0.0).validate().is_err());
        assert!(MeasureSpec::Atomic { atoms: vec![] }.validate().is_err());
        assert!(MeasureSpec::Mixture { parts: vec![(-1.0, MeasureSpec::lebesgue())] }.validate().is_err());
    }

    #[test]
    fn json_schema() {
        let mu = MeasureSpec::from_json(r#"{"kind":"density","p":1.0,"q":0.0}"#).unwrap();
        assert_eq!(mu, MeasureSpec::density(1.0, 0.0));
        let mu = MeasureSpec::from_json(r#"{"kind":"atomic","atoms":[[0.5,1.0]]}"#).unwrap();
        assert_eq!(mu, MeasureSpec::atom(0.5, 1.0));
        let mu = MeasureSpec::from_json(
            r#"{"kind":"mixture","parts":[[2.0,{"kind":"density","p":0.0}],[1.0,{"kind":"atomic","atoms":[[0.9,0.5]]}]]}"#,
        )
        .unwrap();
        assert!((mu.total_mass().unwrap() - 2.5).abs() < 1e-12);
        assert!(MeasureSpec::from_json(r#"{"kind":"density","p":-2.0}"#).is_err());
        assert!(MeasureSpec::from_json(r#"{"kind":"blob"}"#).is_err());
        assert_eq!(MeasureSpec::from_json(&mu.to_json()).unwrap(), mu);
    }

    #[test]
    fn moment_cache_grows_by_doubling() {
        let mut cache = MomentCache::build(&MeasureSpec::lebesgue(), 10).unwrap();
        cache.ensure(11).unwrap();
        assert_eq!(cache.j_max(), 20);
        cache.ensure(100).unwrap();
        assert_eq!(cache.j_max(), 160);
        assert!((cache.get(100).unwrap() - 1.0 / 101.0).abs() < 1e-14);
        assert_eq!(cache.get(0).unwrap(), 1.0_f64.min(cache.get(0).unwrap()));
        assert!(cache.as_slice().windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn batched_moments_match_adaptive() {
        let cases = [(-0.9, 0.0), (-0.5, 0.0), (0.0, 0.0), (1.0, -1.0), (2.5, 1.5), (0.4, -2.0), (-1.0, -2.5)];
        for (p, q) in cases {
            let mu = MeasureSpec::density(p, q);
            let cache = MomentCache::build(&mu, 100_000).unwrap();
            for j in [0usize, 1, 5, 63, 100, 1000, 10_000, 100_000] {
                let direct = mu.moment(j).unwrap();
                let batched = cache.get(j).unwrap();
                assert!((batched - direct).abs() <= 1e-11 * direct, "p={p} q={q} j={j}: {batched:e} vs {direct:e}");
            }
        }
        let mix = MeasureSpec::Mixture {
            parts: vec![(0.5, MeasureSpec::atom(0.0, 1.0)), (2.0, MeasureSpec::Atomic { atoms: vec![(0.5, 1.0), (0.9, 0.5)] })],
        };
        let cache = MomentCache::build(&mix, 200).unwrap();
        assert_eq!(cache.get(0).unwrap(), 0.5 + 2.0 * 1.5);
        for j in [1usize, 7, 200] {
            let exact = 2.0 * (0.5f64.powi(j as i32) + 0.5 * 0.9f64.powi(j as i32));
            assert!((cache.get(j).unwrap() - exact).abs() <= 1e-14 * exact);
        }
    }

    #[test]
    fn support() {
        assert_eq!(MeasureSpec::atom(0.3, 1.0).support_max(), Some(0.3));
        assert_eq!(MeasureSpec::lebesgue().support_max(), None);
    }
}
