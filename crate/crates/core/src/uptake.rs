//! Feddes-type root water uptake.
//!
//! `f(h) = φ·f̂(h)` with the piecewise-linear stress factor
//!
//! ```text
//!        ┌ 0                        h₁ ≤ h ≤ 0  or  h ≤ h₄
//! f̂(h) = ┤ (h − h₁)/(h₂ − h₁)       h₂ < h < h₁
//!        │ 1                        h₃ ≤ h ≤ h₂
//!        └ (h − h₄)/(h₃ − h₄)       h₄ < h < h₃
//! ```
//!
//! The solvers need `f` and `df/dθ` as functions of water content; both go
//! through the inverse retention curve of the soil.

use crate::soil::SoilModel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeddesUptake {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub h4: f64,
    /// Scaling factor φ (potential transpiration over rooting depth).
    pub varphi: f64,
}

impl FeddesUptake {
    /// Breakpoints `h₄ ≈ −820`, `h₃ ≈ −400`, `h₂ ≈ −350`, `h₁ = 0` cm with
    /// `φ = 0.1/Z`.
    pub fn standard(depth: f64) -> Self {
        Self { h1: 0.0, h2: -350.0, h3: -400.0, h4: -820.0, varphi: 0.1 / depth }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h4 < self.h3 && self.h3 < self.h2 && self.h2 < self.h1 && self.h1 <= 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "Feddes breakpoints must satisfy h4 < h3 < h2 < h1 <= 0, got {}, {}, {}, {}",
                self.h4,
                self.h3,
                self.h2,
                self.h1
            )));
        }
        if !(self.varphi >= 0.0) || !self.varphi.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("varphi = {} must be >= 0", self.varphi)));
        }
        Ok(())
    }

    /// Normalised uptake `f̂(h)` in `[0, 1]`.
    pub fn uptake_hat(&self, h: f64) -> Result<f64> {
        if h > 0.0 || h.is_nan() {
            return Err(Error::PositiveHead(h));
        }
        Ok(self.hat_raw(h))
    }

    /// `f(θ) = φ·f̂(h(θ))`.
    pub fn uptake(&self, soil: &SoilModel, theta: f64) -> Result<f64> {
        let h = soil.pressure_head(theta)?;
        Ok(self.varphi * self.hat_raw(h))
    }

    /// `df/dθ = φ·(df̂/dh)/C(h)`. At a breakpoint the wetter-side limit is
    /// returned.
    pub fn uptake_dtheta(&self, soil: &SoilModel, theta: f64) -> Result<f64> {
        let h = soil.pressure_head(theta)?;
        Ok(self.dtheta_at_head(soil, h))
    }

    /// `F(θ) = (f(θ) − 1)·df/dθ`, the pointwise derivative of the tracking
    /// integrand `½(f − 1)²`.
    pub fn adjoint_source(&self, soil: &SoilModel, theta: f64) -> Result<f64> {
        let h = soil.pressure_head(theta)?;
        Ok((self.varphi * self.hat_raw(h) - 1.0) * self.dtheta_at_head(soil, h))
    }

    pub(crate) fn hat_raw(&self, h: f64) -> f64 {
        if h >= self.h1 || h <= self.h4 {
            0.0
        } else if h > self.h2 {
            (h - self.h1) / (self.h2 - self.h1)
        } else if h >= self.h3 {
            1.0
        } else {
            (h - self.h4) / (self.h3 - self.h4)
        }
    }

    /// `df̂/dh`, right-continuous.
    pub(crate) fn hat_slope(&self, h: f64) -> f64 {
        if h >= self.h1 || h < self.h4 {
            0.0
        } else if h >= self.h2 {
            1.0 / (self.h2 - self.h1)
        } else if h >= self.h3 {
            0.0
        } else {
            1.0 / (self.h3 - self.h4)
        }
    }

    pub(crate) fn dtheta_at_head(&self, soil: &SoilModel, h: f64) -> f64 {
        let slope = self.hat_slope(h);
        if slope == 0.0 || self.varphi == 0.0 {
            0.0
        } else {
            self.varphi * slope / soil.c_raw(h)
        }
    }
}
