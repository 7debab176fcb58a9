//! Generalized Hilbert operators on spaces of analytic functions in the unit disk.
//!
//! The crate is organised bottom-up: measures and their moments, the
//! coefficients of `(1-z)^{-α}`, truncated Taylor series with rigorous tail
//! envelopes, the operators themselves, Carleson-type classification of
//! measures, and numeric harnesses that compare both.

pub mod carleson;
pub mod cli;
pub mod error;
pub mod fit;
pub mod harness;
pub mod measure;
pub mod operator;
pub mod quadrature;
pub mod series;
pub mod special;

pub use error::{Error, Result};
pub use measure::{GateResult, MeasureSpec, MomentCache, Weight};
pub use series::{CoefficientSeries, DiskGrid, Family, TailEnvelope, TestFamilyMember};
pub use special::{gamma_ratio, stirling_check, stirling_sweep, GammaRatioTable};

/// Shortest decimal form that round-trips the `f64` exactly.
pub fn fmt17(v: f64) -> String {
    format!("{v:?}")
}
