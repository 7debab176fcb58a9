use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polar sampling grid for sup-norm estimates.
///
/// Radii follow the ladder `1 - 2^{-j/substeps}` for `j = 0..=i_max·substeps`
/// (so `substeps = 1` gives `r_i = 1 - 2^{-i}`), angles are `2πm/M`.
/// Doubling `substeps` or `angles` yields a superset of points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskGrid {
    pub i_max: usize,
    pub substeps: usize,
    pub angles: usize,
}

impl Default for DiskGrid {
    fn default() -> Self {
        DiskGrid { i_max: 10, substeps: 1, angles: 256 }
    }
}

impl DiskGrid {
    pub fn new(i_max: usize, substeps: usize, angles: usize) -> Result<Self> {
        if substeps == 0 || angles == 0 {
            return Err(Error::Domain("grid needs at least one substep and one angle".into()));
        }
        Ok(DiskGrid { i_max, substeps, angles })
    }

    pub fn radii(&self) -> Vec<f64> {
        let steps = self.i_max * self.substeps;
        (0..=steps)
            .map(|j| -(-(j as f64) / self.substeps as f64 * std::f64::consts::LN_2).exp_m1())
            .collect()
    }

    pub fn max_radius(&self) -> f64 {
        -(-(self.i_max as f64) * std::f64::consts::LN_2).exp_m1()
    }

    pub fn refined(&self) -> DiskGrid {
        DiskGrid { i_max: self.i_max, substeps: self.substeps * 2, angles: self.angles * 2 }
    }
}
