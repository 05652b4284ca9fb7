//! The control-to-cost map.
//!
//! A [`ControlProblem`] fixes everything except the control `u`: model,
//! grid, initial profile, bottom boundary and control weight. The top
//! boundary value at level `n` is `top_offset + u[n]` (`θ_r + u` for a
//! soil). The initial profile is built from the current `u[0]` and wins at
//! the corner `(z, t) = (0, 0)`.

use alloc::vec::Vec;

use crate::adjoint::{control_sensitivity, solve_adjoint, AdjointField};
use crate::forward::{solve_forward, BoundaryData, ForwardSettings, StateField};
use crate::grid::Grid1D;
use crate::model::{FlowModel, RichardsModel, TrackingTarget};
use crate::optim::{cost, gradient, AdmissibleSet, PgdConfig};
use crate::soil::{DiffusivityRegularization, SoilModel};
use crate::uptake::FeddesUptake;
use crate::{Error, Result};

/// Initial water-content profile.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    /// `top + (bottom − top)(z/Z)^power` between the two boundary values at
    /// `t = 0`.
    Blend { power: i32 },
    /// `top + (top − bottom)·z/Z`: the blend reflected about the top value.
    /// Values below the admissible range are lifted to its lower end.
    Reflected,
    /// Piecewise-linear interpolation of `(z, θ)` points, constant beyond
    /// the end points. Independent of the control.
    Table(Vec<(f64, f64)>),
}

impl InitialProfile {
    /// Nodal values and their derivative with respect to the top value.
    fn build(&self, grid: &Grid1D, top: f64, bottom: f64) -> (Vec<f64>, Vec<f64>) {
        let depth = grid.depth;
        (0..grid.nz)
            .map(|i| {
                let r = grid.z(i) / depth;
                match self {
                    InitialProfile::Blend { power } => {
                        let w = crate::math::powf(r, *power as f64);
                        (top + (bottom - top) * w, 1.0 - w)
                    }
                    InitialProfile::Reflected => (top + (top - bottom) * r, 1.0 + r),
                    InitialProfile::Table(points) => (interpolate(points, grid.z(i)), 0.0),
                }
            })
            .unzip()
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InitialProfile::Blend { power } if *power < 1 => {
                Err(Error::InvalidParameter(alloc::format!("blend power must be >= 1, got {power}")))
            }
            InitialProfile::Table(points) => {
                if points.is_empty() {
                    return Err(Error::InvalidParameter("initial table is empty".into()));
                }
                if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(Error::InvalidParameter("initial table depths must increase".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn interpolate(points: &[(f64, f64)], z: f64) -> f64 {
    let first = points[0];
    let last = points[points.len() - 1];
    if z <= first.0 {
        return first.1;
    }
    if z >= last.0 {
        return last.1;
    }
    let k = points.partition_point(|p| p.0 <= z);
    let (a, b) = (points[k - 1], points[k]);
    a.1 + (b.1 - a.1) * (z - a.0) / (b.0 - a.0)
}

/// Water content prescribed at `z = Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BottomBoundary {
    Constant(f64),
    /// Linear in time from `start` at `t = 0` to `end` at `t = T`.
    Linear { start: f64, end: f64 },
}

impl BottomBoundary {
    pub fn at(&self, t: f64, horizon: f64) -> f64 {
        match *self {
            BottomBoundary::Constant(v) => v,
            BottomBoundary::Linear { start, end } => start + (end - start) * t / horizon,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlProblem<M = RichardsModel> {
    pub model: M,
    pub grid: Grid1D,
    pub initial: InitialProfile,
    pub bottom: BottomBoundary,
    pub top_offset: f64,
    pub lambda: f64,
    pub settings: ForwardSettings,
    pub admissible: AdmissibleSet,
}

/// State, adjoint, cost and gradient at one control.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub state: StateField,
    pub adjoint: AdjointField,
    pub cost: f64,
    /// `L²(0,T)` gradient density of the reduced cost.
    pub gradient: Vec<f64>,
}

impl ControlProblem<RichardsModel> {
    /// Problem on a soil with control `u ∈ [0, θ_S − θ_r − ε]`, using the
    /// weight, truncation margin and Picard settings of `config`.
    #[allow(clippy::too_many_arguments)]
    pub fn richards(
        soil: SoilModel,
        uptake: FeddesUptake,
        target: TrackingTarget,
        grid: Grid1D,
        initial: InitialProfile,
        bottom: BottomBoundary,
        config: &PgdConfig,
    ) -> Result<Self> {
        config.validate()?;
        initial.validate()?;
        let reg = DiffusivityRegularization::new(config.epsilon);
        let model = RichardsModel::new(soil, uptake, reg, target)?;
        let admissible = AdmissibleSet::for_soil(&model.soil, config.epsilon)?;
        Ok(Self {
            model,
            grid,
            initial,
            bottom,
            top_offset: soil.theta_r(),
            lambda: config.lambda,
            settings: config.picard,
            admissible,
        })
    }
}

impl<M: FlowModel> ControlProblem<M> {
    fn check_control(&self, u: &[f64]) -> Result<()> {
        if u.len() == self.grid.nt {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: self.grid.nt, actual: u.len() })
        }
    }

    pub fn boundary_data(&self, u: &[f64]) -> Result<BoundaryData> {
        self.check_control(u)?;
        let g = &self.grid;
        Ok(BoundaryData {
            top: u.iter().map(|&v| self.top_offset + v).collect(),
            bottom: (0..g.nt).map(|n| self.bottom.at(g.t(n), g.horizon)).collect(),
        })
    }

    /// Initial profile for the top value `top_offset + u0`, and its
    /// sensitivity to `u0`. Values below the admissible range are lifted
    /// onto it (zero sensitivity there).
    pub fn initial_state(&self, u0: f64) -> (Vec<f64>, Vec<f64>) {
        let top = self.top_offset + u0;
        let bottom = self.bottom.at(0.0, self.grid.horizon);
        let (mut values, mut sens) = self.initial.build(&self.grid, top, bottom);
        let (lo, _) = self.model.admissible_range();
        for (v, s) in values.iter_mut().zip(sens.iter_mut()) {
            if *v < lo {
                *v = lo;
                *s = 0.0;
            }
        }
        (values, sens)
    }

    pub fn solve_state(&self, u: &[f64]) -> Result<StateField> {
        let bc = self.boundary_data(u)?;
        let (ic, _) = self.initial_state(u[0]);
        solve_forward(&self.model, &self.grid, &ic, &bc, &self.settings)
    }

    pub fn reduced_cost(&self, u: &[f64]) -> Result<f64> {
        let state = self.solve_state(u)?;
        Ok(cost(&self.model, &state, u, self.lambda))
    }

    pub fn evaluate(&self, u: &[f64]) -> Result<Evaluation> {
        let state = self.solve_state(u)?;
        let j = cost(&self.model, &state, u, self.lambda);
        let adjoint = solve_adjoint(&self.model, &state)?;
        let (_, sens) = self.initial_state(u[0]);
        let flux = control_sensitivity(&self.model, &state, &adjoint, &sens)?;
        let gradient = gradient(u, self.lambda, &flux);
        Ok(Evaluation { state, adjoint, cost: j, gradient })
    }
}
