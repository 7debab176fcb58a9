#![allow(dead_code)]

use genhilbert::series::AnalyticFn;
use genhilbert::{CoefficientSeries, Family, MeasureSpec, TestFamilyMember};
use num_complex::Complex64;

pub const TRUNCATION: usize = 4096;

pub enum Input {
    Member(TestFamilyMember),
    Polynomial(CoefficientSeries),
}

impl Input {
    pub fn series(&self) -> &CoefficientSeries {
        match self {
            Input::Member(m) => &m.series,
            Input::Polynomial(p) => p,
        }
    }

    pub fn exact(&self) -> &dyn AnalyticFn {
        match self {
            Input::Member(m) => m,
            Input::Polynomial(p) => p,
        }
    }
}

/// One row of the equivalence matrix: `H f = I f` is expected on the disk.
pub struct MatrixCase {
    pub name: &'static str,
    /// Hypothesis under which the identity holds.
    pub hypothesis: &'static str,
    pub measure: MeasureSpec,
    pub alpha: f64,
    pub beta: f64,
    pub input: Input,
}

fn member(family: Family, a: f64) -> Input {
    Input::Member(TestFamilyMember::new(family, a, TRUNCATION, 1.0).unwrap())
}

/// Twelve measures, each paired with an input space whose hypothesis it satisfies.
pub fn equivalence_matrix() -> Vec<MatrixCase> {
    let one = || member(Family::ConstantOne, 0.5);
    let poly = CoefficientSeries::polynomial(
        [1.0, 1.0, 0.0, -0.5, 0.25].iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    );
    vec![
        MatrixCase {
            name: "atom at 1/2, constant input",
            hypothesis: "t-Carleson, Bloch-type source of order <= 1",
            measure: MeasureSpec::atom(0.5, 1.0),
            alpha: 2.0,
            beta: 0.5,
            input: one(),
        },
        MatrixCase {
            name: "Lebesgue, classical kernel",
            hypothesis: "t-Carleson, Bloch-type source of order <= 1",
            measure: MeasureSpec::lebesgue(),
            alpha: 1.0,
            beta: 0.5,
            input: one(),
        },
        MatrixCase {
            name: "Lebesgue, logarithmic input",
            hypothesis: "t-Carleson, Bloch source",
            measure: MeasureSpec::lebesgue(),
            alpha: 2.0,
            beta: 1.0,
            input: member(Family::LogE, 0.5),
        },
        MatrixCase {
            name: "linear density, power input",
            hypothesis: "beta-Carleson, source of order beta > 1",
            measure: MeasureSpec::density(1.0, 0.0),
            alpha: 2.0,
            beta: 1.5,
            input: member(Family::PowerBeta { beta: 1.5 }, 0.5),
        },
        MatrixCase {
            name: "log-damped linear density",
            hypothesis: "t-Carleson, Bloch source",
            measure: MeasureSpec::density(1.0, -1.0),
            alpha: 3.0,
            beta: 1.0,
            input: member(Family::LogE, 0.9),
        },
        MatrixCase {
            name: "square-root density, small alpha",
            hypothesis: "t-Carleson, Bloch-type source of order <= 1",
            measure: MeasureSpec::density(0.5, 0.0),
            alpha: 0.5,
            beta: 0.5,
            input: one(),
        },
        MatrixCase {
            name: "three atoms, power input",
            hypothesis: "beta-Carleson (compact support), source of order beta > 1",
            measure: MeasureSpec::Atomic { atoms: vec![(0.3, 0.5), (0.7, 0.25), (0.95, 0.1)] },
            alpha: 2.5,
            beta: 2.0,
            input: member(Family::PowerBeta { beta: 2.0 }, 0.6),
        },
        MatrixCase {
            name: "Lebesgue plus atom, squared logarithm",
            hypothesis: "t-Carleson, Bloch source",
            measure: MeasureSpec::Mixture {
                parts: vec![(0.5, MeasureSpec::lebesgue()), (1.0, MeasureSpec::atom(0.8, 1.0))],
            },
            alpha: 1.5,
            beta: 1.0,
            input: member(Family::LogSq, 0.5),
        },
        MatrixCase {
            name: "quadratic density, cubic power input",
            hypothesis: "beta-Carleson, source of order beta > 1",
            measure: MeasureSpec::density(2.0, 0.0),
            alpha: 3.0,
            beta: 3.0,
            input: member(Family::PowerBeta { beta: 3.0 }, 0.7),
        },
        MatrixCase {
            name: "singular density, Bergman peak",
            hypothesis: "1/p-Carleson for large p, bounded input",
            measure: MeasureSpec::density(-0.5, 0.0),
            alpha: 1.0,
            beta: 0.5,
            input: member(Family::BergmanPeak, 0.5),
        },
        MatrixCase {
            name: "log-heavy Lebesgue",
            hypothesis: "t-Carleson, Bloch-type source of order <= 1",
            measure: MeasureSpec::density(0.0, 2.0),
            alpha: 2.0,
            beta: 0.5,
            input: one(),
        },
        MatrixCase {
            name: "mild density, polynomial input",
            hypothesis: "(2-(p-1)^2)/p-Carleson with p = 3/2",
            measure: MeasureSpec::density(0.2, 0.0),
            alpha: 2.0,
            beta: 0.5,
            input: Input::Polynomial(poly),
        },
    ]
}
