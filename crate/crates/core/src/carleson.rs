//! Carleson-type classification of measures on `[0,1)` from radial tails.
//!
//! Everything is read off the tail `μ([t,1))` on the probe ladder
//! `t_i = 1 - 2^{-i}`, `i = 1..=40`. Finite probes cannot certify limits, so
//! divergence and vanishing are decided by documented trend thresholds.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::line_fit;
use crate::measure::MeasureSpec;

pub const PROBE_COUNT: usize = 40;
/// Probes used by the exponent fit, counted from the deepest.
pub const EXPONENT_FIT_PROBES: usize = 20;
/// Probes used for the trend decisions, counted from the deepest.
pub const TREND_PROBES: usize = 10;
/// Slope of `log ratio` against `log log(e/(1-t))` above which the ratio diverges.
pub const DIVERGENCE_SLOPE: f64 = 0.1;
/// Required decay from the first probe decade to the deepest probe for vanishing.
pub const VANISHING_FACTOR: f64 = 10.0;
const MONOTONE_TOL: f64 = 1e-12;

/// `t_i = 1 - 2^{-i}` for `i = 1..=40`.
pub fn probe_ladder() -> Vec<f64> {
    (1..=PROBE_COUNT).map(|i| 1.0 - 0.5f64.powi(i as i32)).collect()
}

/// `log(e/(1-t))`
pub fn log_weight(t: f64) -> f64 {
    1.0 - (-t).ln_1p()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub t: f64,
    pub tail: f64,
    /// `tail · log(e/(1-t))^{log_exponent} / (1-t)^s`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlesonReport {
    pub s_target: f64,
    pub log_exponent: f64,
    /// Largest probe ratio.
    pub constant_estimate: f64,
    /// The ratio keeps growing over the deepest probes.
    pub diverging: bool,
    pub vanishing: bool,
    pub fitted_exponent: f64,
    pub fit_residual: f64,
    pub probe_points: Vec<ProbePoint>,
    pub notes: Vec<String>,
}

impl CarlesonReport {
    /// Bounded ratio on the probes.
    pub fn is_carleson(&self) -> bool {
        !self.diverging
    }

    /// Probe table with a header line.
    pub fn probes_csv(&self) -> String {
        let mut out = String::from("t,tail,ratio\n");
        for p in &self.probe_points {
            out.push_str(&format!("{},{},{}\n", crate::fmt17(p.t), crate::fmt17(p.tail), crate::fmt17(p.ratio)));
        }
        out
    }
}

fn check_s(s: f64) -> Result<()> {
    if s.is_finite() && s >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Carleson exponent must be nonnegative, got {s}")))
    }
}

fn probe_points(mu: &MeasureSpec, s: f64, log_exponent: f64) -> Result<Vec<ProbePoint>> {
    mu.validate()?;
    probe_ladder()
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let tail = mu.tail(t)?;
            let h = 0.5f64.powi(i as i32 + 1);
            let ratio = if tail == 0.0 { 0.0 } else { tail * log_weight(t).powf(log_exponent) / h.powf(s) };
            Ok(ProbePoint { t, tail, ratio })
        })
        .collect()
}

fn diverging(points: &[ProbePoint]) -> Result<bool> {
    let deep = &points[points.len() - TREND_PROBES..];
    if deep.iter().any(|p| p.ratio == 0.0) {
        return Ok(false);
    }
    let xs: Vec<f64> = deep.iter().map(|p| log_weight(p.t).ln()).collect();
    let ys: Vec<f64> = deep.iter().map(|p| p.ratio.ln()).collect();
    Ok(line_fit(&xs, &ys)?.slope > DIVERGENCE_SLOPE)
}

/// Largest ratio over the first probe decade divided by the ratio at the deepest probe.
pub fn decay_factor(points: &[ProbePoint]) -> f64 {
    let first = points[..TREND_PROBES].iter().map(|p| p.ratio).fold(0.0, f64::max);
    let last = points.last().map_or(0.0, |p| p.ratio);
    if last > 0.0 {
        first / last
    } else if first > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

fn vanishing(points: &[ProbePoint]) -> bool {
    let monotone = points[points.len() - TREND_PROBES..]
        .windows(2)
        .all(|w| w[1].ratio <= w[0].ratio * (1.0 + MONOTONE_TOL));
    decay_factor(points) >= VANISHING_FACTOR && monotone
}

/// Probes `μ([t,1)) · log(e/(1-t))^{log_exponent} / (1-t)^s` and summarizes it.
pub fn carleson_constant(mu: &MeasureSpec, s: f64, log_exponent: f64) -> Result<CarlesonReport> {
    check_s(s)?;
    let points = probe_points(mu, s, log_exponent)?;
    let fit = fit_exponent(&points)?;
    let mut notes = Vec::new();
    let diverging = diverging(&points)?;
    if diverging {
        notes.push(format!(
            "ratio grows faster than log(e/(1-t))^{DIVERGENCE_SLOPE} over the deepest {TREND_PROBES} probes"
        ));
    }
    if fit.fitted_exponent.is_infinite() {
        notes.push("tail vanishes near 1; every exponent is satisfied".into());
    }
    Ok(CarlesonReport {
        s_target: s,
        log_exponent,
        constant_estimate: points.iter().map(|p| p.ratio).fold(0.0, f64::max),
        diverging,
        vanishing: vanishing(&points),
        fitted_exponent: fit.fitted_exponent,
        fit_residual: fit.fit_residual,
        probe_points: points,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    /// `+∞` when the tail vanishes before the deepest probes.
    pub fitted_exponent: f64,
    pub fit_residual: f64,
}

fn fit_exponent(points: &[ProbePoint]) -> Result<ExponentFit> {
    let deep = &points[points.len() - EXPONENT_FIT_PROBES..];
    if deep.iter().any(|p| p.tail == 0.0) {
        return Ok(ExponentFit { fitted_exponent: f64::INFINITY, fit_residual: 0.0 });
    }
    let xs: Vec<f64> = deep.iter().map(|p| (1.0 - p.t).ln()).collect();
    let ys: Vec<f64> = deep.iter().map(|p| p.tail.ln()).collect();
    let fit = line_fit(&xs, &ys)?;
    Ok(ExponentFit { fitted_exponent: fit.slope, fit_residual: fit.residual })
}

/// Slope of `log μ([t,1))` against `log(1-t)` over the deepest probes.
pub fn exponent_estimate(mu: &MeasureSpec) -> Result<ExponentFit> {
    fit_exponent(&probe_points(mu, 0.0, 0.0)?)
}

/// Decade-decay test for the vanishing condition.
pub fn vanishing_test(mu: &MeasureSpec, s: f64, log_exponent: f64) -> Result<bool> {
    check_s(s)?;
    Ok(vanishing(&probe_points(mu, s, log_exponent)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "T2.1")]
    T2_1,
    #[serde(rename = "T2.2")]
    T2_2,
    #[serde(rename = "T2.3")]
    T2_3,
    #[serde(rename = "T3.1")]
    T3_1,
    #[serde(rename = "T3.2")]
    T3_2,
    #[serde(rename = "T3.3")]
    T3_3,
    #[serde(rename = "T3.4")]
    T3_4,
    #[serde(rename = "Qp")]
    Qp,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        TheoremId::T2_1,
        TheoremId::T2_2,
        TheoremId::T2_3,
        TheoremId::T3_1,
        TheoremId::T3_2,
        TheoremId::T3_3,
        TheoremId::T3_4,
        TheoremId::Qp,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::T2_1 => "T2.1",
            TheoremId::T2_2 => "T2.2",
            TheoremId::T2_3 => "T2.3",
            TheoremId::T3_1 => "T3.1",
            TheoremId::T3_2 => "T3.2",
            TheoremId::T3_3 => "T3.3",
            TheoremId::T3_4 => "T3.4",
            TheoremId::Qp => "Qp",
        }
    }

    /// Operator form: `true` for the coefficient operator, `false` for the integral one.
    pub fn is_coefficient_form(&self) -> bool {
        !matches!(self, TheoremId::T2_1 | TheoremId::T2_2 | TheoremId::T2_3)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown theorem id '{s}' (expected one of T2.1, T2.2, T2.3, T3.1, T3.2, T3.3, T3.4, Qp)")))
    }
}

/// Target space of the operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum TargetSpace {
    /// `B_{α-1}`
    BAlphaMinus1,
    /// `B_γ`
    BGamma { gamma: f64 },
    /// `Q_p` for any `p > 0`
    Qp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    Sufficient,
    Necessary,
    Equivalent,
}

/// A tail condition `μ([t,1)) log(e/(1-t))^{log_exponent} ≤ C (1-t)^s`.
///
/// `s = 0` with `log_exponent = 0` means the measure is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionDescriptor {
    pub s: f64,
    pub log_exponent: f64,
    pub kind: ConditionKind,
    /// Theorems the condition comes from, integral form first.
    pub theorems: Vec<TheoremId>,
    pub notes: Vec<String>,
}

impl ConditionDescriptor {
    fn new(s: f64, log_exponent: f64, kind: ConditionKind, theorems: Vec<TheoremId>) -> Self {
        ConditionDescriptor { s, log_exponent, kind, theorems, notes: Vec::new() }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {v}")))
    }
}

/// Necessary condition for boundedness `B_β → B_γ` of the coefficient operator.
fn necessity_condition(alpha: f64, beta: f64, gamma: f64) -> Result<ConditionDescriptor> {
    let s = if beta > 1.0 {
        alpha + beta - gamma - 0.5
    } else if beta < 1.0 {
        alpha - gamma + 0.5
    } else {
        return Err(Error::NoPrediction("no necessity statement covers beta = 1".into()));
    };
    if s < 0.0 {
        return Err(Error::NoPrediction(format!(
            "the necessity exponent {s} is negative; the statement only covers exponents >= 0 \
             (its proof yields finiteness of the measure for every exponent <= 0)"
        )));
    }
    let mut d = ConditionDescriptor::new(s, 0.0, ConditionKind::Necessary, vec![TheoremId::T3_1]);
    if s == 0.0 {
        d.notes.push(
            "exponent 0 means finite measure; the statement says '= 0' while its proof covers every exponent <= 0".into(),
        );
    }
    Ok(d)
}

/// The tail condition each theorem attaches to `(α, β, target)`.
pub fn predicted_condition(alpha: f64, beta: f64, target: TargetSpace) -> Result<ConditionDescriptor> {
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    match target {
        TargetSpace::BAlphaMinus1 if alpha >= 2.0 => Ok(if beta < 1.0 {
            ConditionDescriptor::new(2.0, 0.0, ConditionKind::Equivalent, vec![TheoremId::T2_1, TheoremId::T3_2])
        } else if beta == 1.0 {
            ConditionDescriptor::new(2.0, 1.0, ConditionKind::Equivalent, vec![TheoremId::T2_2, TheoremId::T3_3])
        } else {
            ConditionDescriptor::new(beta + 1.0, 0.0, ConditionKind::Equivalent, vec![TheoremId::T2_3, TheoremId::T3_4])
        }),
        TargetSpace::BAlphaMinus1 => {
            let mut d = necessity_condition(alpha, beta, alpha - 1.0)?;
            d.notes.push("alpha < 2: only the necessity direction applies".into());
            Ok(d)
        }
        TargetSpace::BGamma { gamma } => {
            check_positive("gamma", gamma)?;
            necessity_condition(alpha, beta, gamma)
        }
        TargetSpace::Qp => {
            if alpha <= 1.0 && beta < 1.0 {
                Ok(ConditionDescriptor::new(alpha, 0.0, ConditionKind::Necessary, vec![TheoremId::Qp]))
            } else {
                Err(Error::NoPrediction(format!(
                    "the Q_p necessity statement needs 0 < alpha <= 1 and 0 < beta < 1, got alpha = {alpha}, beta = {beta}"
                )))
            }
        }
    }
}
