//! Pointwise coefficients seen by the forward and adjoint solvers.
//!
//! Both solvers only need, at every node, the diffusivity, conductivity,
//! sink and tracking residual together with their θ-derivatives.
//! [`RichardsModel`] provides them from a soil, a Feddes uptake and a
//! diffusivity truncation; [`FrozenModel`] is a constant-coefficient
//! stand-in used to check the discretisations against closed-form
//! solutions.

use crate::soil::{DiffusivityRegularization, SoilModel};
use crate::uptake::FeddesUptake;
use crate::Result;

/// Coefficients at one node. The cost integrand is `½·tracking²`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NodeCoefficients {
    pub diffusivity: f64,
    pub diffusivity_slope: f64,
    pub conductivity: f64,
    pub conductivity_slope: f64,
    pub sink: f64,
    pub sink_slope: f64,
    pub tracking: f64,
    pub tracking_slope: f64,
}

impl NodeCoefficients {
    fn without_slopes(self) -> Self {
        Self { diffusivity_slope: 0.0, conductivity_slope: 0.0, sink_slope: 0.0, tracking_slope: 0.0, ..self }
    }
}

pub trait FlowModel {
    /// `[lower, upper)` interval that initial and boundary data must lie in.
    fn admissible_range(&self) -> (f64, f64);

    /// Closed interval states are clamped to before evaluation.
    fn evaluation_bounds(&self) -> (f64, f64);

    /// Coefficients at `theta`, which lies within [`Self::evaluation_bounds`].
    fn evaluate(&self, theta: f64) -> NodeCoefficients;

    /// Clamps, evaluates, and reports whether clamping was active. Slopes
    /// are zero where the clamp is active.
    fn node(&self, theta: f64) -> (NodeCoefficients, bool) {
        let (lo, hi) = self.evaluation_bounds();
        if theta < lo {
            (self.evaluate(lo).without_slopes(), true)
        } else if theta > hi {
            (self.evaluate(hi).without_slopes(), true)
        } else {
            (self.evaluate(theta), false)
        }
    }
}

/// What the tracking term of the cost drives towards one.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum TrackingTarget {
    /// `½(f − 1)²` with the scaled uptake `f = φ·f̂`.
    #[default]
    Scaled,
    /// `½(f̂ − 1)²` with the normalised stress factor.
    Normalized,
}

/// Lower clamp offset above `θ_r` for constitutive evaluation.
pub const DRY_CLAMP: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RichardsModel {
    pub soil: SoilModel,
    pub uptake: FeddesUptake,
    pub reg: DiffusivityRegularization,
    pub target: TrackingTarget,
    diffusivity_cap: f64,
}

impl RichardsModel {
    pub fn new(
        soil: SoilModel,
        uptake: FeddesUptake,
        reg: DiffusivityRegularization,
        target: TrackingTarget,
    ) -> Result<Self> {
        let soil = soil.checked()?;
        uptake.validate()?;
        reg.validate_for(&soil)?;
        let diffusivity_cap = soil.diffusivity_raw(soil.theta_s() - reg.epsilon);
        Ok(Self { soil, uptake, reg, target, diffusivity_cap })
    }

    fn truncation_point(&self) -> f64 {
        self.soil.theta_s() - self.reg.epsilon
    }
}

impl FlowModel for RichardsModel {
    fn admissible_range(&self) -> (f64, f64) {
        (self.soil.theta_r(), self.soil.theta_s())
    }

    fn evaluation_bounds(&self) -> (f64, f64) {
        (self.soil.theta_r() + DRY_CLAMP, self.soil.theta_s() - 0.5 * self.reg.epsilon)
    }

    fn evaluate(&self, theta: f64) -> NodeCoefficients {
        let soil = &self.soil;
        let h = soil.head_raw(theta);
        let c = soil.c_raw(h);
        let k = soil.k_raw(h);
        let dlnk = soil.dlnk_dh(h);
        let (diffusivity, diffusivity_slope) = if theta <= self.truncation_point() {
            let beta = k / c;
            (beta, beta * (dlnk - soil.dlnc_dh(h)) / c)
        } else {
            (self.diffusivity_cap, 0.0)
        };
        let hat = self.uptake.hat_raw(h);
        let hat_slope = self.uptake.hat_slope(h) / c;
        let varphi = self.uptake.varphi;
        let (tracking, tracking_slope) = match self.target {
            TrackingTarget::Scaled => (varphi * hat - 1.0, varphi * hat_slope),
            TrackingTarget::Normalized => (hat - 1.0, hat_slope),
        };
        NodeCoefficients {
            diffusivity,
            diffusivity_slope,
            conductivity: k,
            conductivity_slope: k * dlnk / c,
            sink: varphi * hat,
            sink_slope: varphi * hat_slope,
            tracking,
            tracking_slope,
        }
    }
}

/// Constant diffusivity `D`, linear conductivity `K(θ) = a·θ`, no sink and
/// a constant tracking residual of −1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenModel {
    pub diffusivity: f64,
    pub advection: f64,
}

impl FlowModel for FrozenModel {
    fn admissible_range(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn evaluation_bounds(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn evaluate(&self, theta: f64) -> NodeCoefficients {
        NodeCoefficients {
            diffusivity: self.diffusivity,
            conductivity: self.advection * theta,
            conductivity_slope: self.advection,
            tracking: -1.0,
            ..NodeCoefficients::default()
        }
    }
}
