//! The metric `dt² + f²(dψ + A)² + h²g_FS` on `(0, L) × S¹ × ℂⁿ⁻¹` in explicit
//! real coordinates `(t, ψ, Re w₁, Im w₁, …)`, its complex structure, and
//! curvature.

mod base;
mod curvature;
mod metric;

pub use base::{connection_one_form, fubini_study, BaseData};
pub use curvature::{
    christoffels, d_omega, killing_residuals, nabla_j, ricci_scalar, riemann, riemann_from_jet,
    scalar_curvature, Christoffels, KillingResiduals,
};
pub use metric::{
    adapted_frame, calibrate_orientation, complex_structure, complex_structure_with,
    distribution_projector, jet_of, metric_jet, orientation, projector_for, Calibration, MetricJet,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::ProfileSolution;

/// Default fraction of `[0, L]` excluded at each end of the chart.
pub const DEFAULT_MARGIN: f64 = 0.05;

/// A point of the coordinate chart. `base` stores `(Re w₁, Im w₁, Re w₂, …)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub t: f64,
    pub psi: f64,
    pub base: Vec<f64>,
}

impl ChartPoint {
    /// `n` is the complex dimension of the total space, so `base` has
    /// `2(n − 1)` entries.
    pub fn new(t: f64, psi: f64, base: Vec<f64>) -> Self {
        Self { t, psi, base }
    }

    pub fn origin(t: f64, n: usize) -> Self {
        Self::new(t, 0.0, vec![0.0; 2 * (n - 1)])
    }

    /// Builds a point and checks `margin·L ≤ t ≤ (1 − margin)·L`.
    pub fn interior(
        t: f64,
        psi: f64,
        base: Vec<f64>,
        sol: &ProfileSolution,
        margin: f64,
    ) -> Result<Self> {
        let l = sol.length();
        let (lo, hi) = (margin * l, (1.0 - margin) * l);
        if !(lo..=hi).contains(&t) {
            return Err(Error::OutOfRange { t, lo, hi });
        }
        Ok(Self::new(t, psi, base))
    }

    /// Complex dimension of the manifold.
    pub fn n(&self) -> usize {
        self.base.len() / 2 + 1
    }

    /// Real dimension `2n`.
    pub fn dim(&self) -> usize {
        self.base.len() + 2
    }

    pub fn coords(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.dim());
        x.push(self.t);
        x.push(self.psi);
        x.extend_from_slice(&self.base);
        x
    }
}
