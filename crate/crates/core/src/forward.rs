//! State solver for the water-content form of the Richards equation.
//!
//! Discretisation on a uniform grid:
//!
//! * implicit Euler in time;
//! * conservative centred diffusion `∂z(β ∂zθ)` with interface values
//!   `β_{i+½} = (β_i + β_{i+1})/2`;
//! * upwind gravity term `(K_i − K_{i−1})/dz` (z points down);
//! * the sink evaluated at the previous Picard iterate.
//!
//! Each time step is solved by frozen-coefficient Picard iteration: the
//! diffusivities and the sink come from the previous iterate, the
//! conductivity is linearised around it. Every iterate is a tridiagonal
//! M-matrix solve. Iterates are clamped into the model's evaluation bounds
//! before the coefficients are computed; each interior clamp is counted.

use alloc::vec;
use alloc::vec::Vec;

use crate::grid::{Grid1D, SpaceTimeField};
use crate::model::FlowModel;
use crate::tridiag;
use crate::{Error, Result};

/// Dirichlet data, one value per time level.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub top: Vec<f64>,
    pub bottom: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardSettings {
    /// Max-norm of the Picard update (θ units) that ends the inner loop.
    pub picard_tol: f64,
    pub picard_maxit: usize,
}

impl Default for ForwardSettings {
    fn default() -> Self {
        Self { picard_tol: 1e-8, picard_maxit: 200 }
    }
}

/// Water content on the whole space-time grid, plus solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct StateField {
    pub grid: Grid1D,
    pub theta: SpaceTimeField,
    /// Interior clamp events per time level.
    pub clamp_events: Vec<u32>,
    /// Picard iterations per time level (0 at the initial level).
    pub picard_iterations: Vec<u32>,
    /// Nodes whose value exceeds the upper evaluation bound.
    pub saturation_breaches: usize,
}

impl StateField {
    pub fn total_clamp_events(&self) -> u64 {
        self.clamp_events.iter().map(|&c| c as u64).sum()
    }

    pub fn saturation_breach(&self) -> bool {
        self.saturation_breaches > 0
    }
}

struct Workspace {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
    scratch: Vec<f64>,
}

impl Workspace {
    fn new(unknowns: usize) -> Self {
        Self {
            lower: vec![0.0; unknowns],
            diag: vec![0.0; unknowns],
            upper: vec![0.0; unknowns],
            rhs: vec![0.0; unknowns],
            scratch: vec![0.0; unknowns],
        }
    }
}

/// Floor for the Picard under-relaxation factor.
const MIN_RELAXATION: f64 = 0.125;

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}

/// Integrates the state equation from `ic` with boundary data `bc`.
///
/// Level 0 is `ic` verbatim; the boundary data is imposed from level 1 on.
pub fn solve_forward<M: FlowModel>(
    model: &M,
    grid: &Grid1D,
    ic: &[f64],
    bc: &BoundaryData,
    settings: &ForwardSettings,
) -> Result<StateField> {
    let (nz, nt) = (grid.nz, grid.nt);
    check_len(nz, ic.len())?;
    check_len(nt, bc.top.len())?;
    check_len(nt, bc.bottom.len())?;
    let (lower, upper) = model.admissible_range();
    for (node, &value) in ic.iter().enumerate() {
        if !(value >= lower && value < upper) {
            return Err(Error::InvalidInitialCondition { node, value });
        }
    }
    for n in 0..nt {
        for (value, strict) in [(bc.top[n], false), (bc.bottom[n], true)] {
            let above = if strict { value > lower } else { value >= lower };
            if !(above && value < upper) {
                return Err(Error::InvalidBoundary { level: n, value, lower, upper });
            }
        }
    }

    let dz = grid.dz();
    let dt = grid.dt();
    let inv_dz2 = 1.0 / (dz * dz);
    let m = nz - 2;
    let mut theta = SpaceTimeField::zeros(grid);
    theta.level_mut(0).copy_from_slice(ic);
    let mut clamp_events = vec![0u32; nt];
    let mut picard_iterations = vec![0u32; nt];
    let mut ws = Workspace::new(m);
    let mut iterate = ic.to_vec();
    let mut coeffs = vec![Default::default(); nz];
    let mut last = vec![0.0; m];

    for n in 1..nt {
        let (prev, rest) = theta.split_level(n);
        iterate.copy_from_slice(prev);
        iterate[0] = bc.top[n];
        iterate[nz - 1] = bc.bottom[n];
        let mut converged = false;
        let mut update = f64::INFINITY;
        let mut relax: f64 = 1.0;
        last.iter_mut().for_each(|v| *v = 0.0);
        let mut iterations = 0;
        while iterations < settings.picard_maxit {
            iterations += 1;
            for (c, &v) in coeffs.iter_mut().zip(iterate.iter()) {
                *c = model.node(v).0;
            }
            for k in 0..m {
                let i = k + 1;
                let (cw, cc, ce) = (&coeffs[i - 1], &coeffs[i], &coeffs[i + 1]);
                let bw = 0.5 * (cw.diffusivity + cc.diffusivity) * inv_dz2;
                let be = 0.5 * (cc.diffusivity + ce.diffusivity) * inv_dz2;
                // K(θ) ≈ K(θᵏ) + K'(θᵏ)(θ − θᵏ) on the unknown nodes
                let kw_slope = if i > 1 { cw.conductivity_slope } else { 0.0 };
                let mut rhs = prev[i] / dt + cc.sink
                    - (cc.conductivity - cc.conductivity_slope * iterate[i]) / dz
                    + (cw.conductivity - kw_slope * iterate[i - 1]) / dz;
                let low = -bw - kw_slope / dz;
                let up = -be;
                ws.diag[k] = 1.0 / dt + bw + be + cc.conductivity_slope / dz;
                ws.lower[k] = low;
                ws.upper[k] = up;
                if i == 1 {
                    rhs -= low * iterate[0];
                }
                if i == nz - 2 {
                    rhs -= up * iterate[nz - 1];
                }
                ws.rhs[k] = rhs;
            }
            tridiag::solve_in_place(&ws.lower, &ws.diag, &ws.upper, &mut ws.rhs, &mut ws.scratch);
            let mut step = 0.0;
            let mut turn = 0.0;
            for k in 0..m {
                let d = ws.rhs[k] - iterate[k + 1];
                if !(d.abs() <= step) {
                    step = d.abs();
                }
                turn += d * last[k];
                last[k] = d;
            }
            if step < settings.picard_tol {
                iterate[1..nz - 1].copy_from_slice(&ws.rhs);
                update = step;
                converged = true;
                break;
            }
            // successive updates pointing against each other: under-relax
            relax = if turn < 0.0 { (0.5 * relax).max(MIN_RELAXATION) } else { (2.0 * relax).min(1.0) };
            update = step;
            for k in 0..m {
                iterate[k + 1] += relax * last[k];
                last[k] *= relax;
            }
        }
        if !converged {
            return Err(Error::PicardDivergence { level: n, update, iterations });
        }
        clamp_events[n] = iterate[1..nz - 1].iter().filter(|&&v| model.node(v).1).count() as u32;
        picard_iterations[n] = iterations as u32;
        rest.copy_from_slice(&iterate);
    }

    let (_, hi) = model.evaluation_bounds();
    let saturation_breaches = theta.as_slice().iter().filter(|&&v| v > hi).count();
    Ok(StateField { grid: *grid, theta, clamp_events, picard_iterations, saturation_breaches })
}

/// Max-norm of the discrete state residual
/// `(θⁿ − θⁿ⁻¹)/dt − ∂z(β ∂zθⁿ) + (K_i − K_{i−1})/dz − f(θⁿ)` over interior
/// nodes at level `n ≥ 1`.
pub fn step_residual<M: FlowModel>(model: &M, field: &StateField, n: usize) -> f64 {
    let grid = &field.grid;
    let (dz, dt) = (grid.dz(), grid.dt());
    let cur = field.theta.level(n);
    let prev = field.theta.level(n - 1);
    let c: Vec<_> = cur.iter().map(|&v| model.node(v).0).collect();
    (1..grid.nz - 1)
        .map(|i| {
            let be = 0.5 * (c[i].diffusivity + c[i + 1].diffusivity);
            let bw = 0.5 * (c[i - 1].diffusivity + c[i].diffusivity);
            let diffusion = (be * (cur[i + 1] - cur[i]) - bw * (cur[i] - cur[i - 1])) / (dz * dz);
            let gravity = (c[i].conductivity - c[i - 1].conductivity) / dz;
            ((cur[i] - prev[i]) / dt - diffusion + gravity - c[i].sink).abs()
        })
        .fold(0.0, f64::max)
}

/// Downward Darcy fluxes `q = K − β ∂zθ` through the top and bottom
/// interfaces at level `n`, with the scheme's interface values.
fn boundary_fluxes<M: FlowModel>(model: &M, grid: &Grid1D, level: &[f64]) -> (f64, f64) {
    let dz = grid.dz();
    let nz = grid.nz;
    let flux = |i: usize| {
        let (a, b) = (model.node(level[i]).0, model.node(level[i + 1]).0);
        a.conductivity - 0.5 * (a.diffusivity + b.diffusivity) * (level[i + 1] - level[i]) / dz
    };
    (flux(0), flux(nz - 2))
}

/// Relative mass-balance defect of a solved state:
///
/// `|ΔM − ∫(q_top − q_bottom) dt − ∬ f| / max(|ΔM|, 1e-12)`
///
/// with trapezoidal quadrature in time and depth (the sink acts on interior
/// nodes only). The sink enters with a positive sign, as in the state
/// equation.
pub fn mass_balance_residual<M: FlowModel>(model: &M, field: &StateField) -> f64 {
    let grid = &field.grid;
    let wz = grid.space_weights();
    let wt = grid.time_weights();
    let dz = grid.dz();
    let last = grid.nt - 1;
    let storage: f64 = (0..grid.nz)
        .map(|i| wz[i] * (field.theta.at(i, last) - field.theta.at(i, 0)))
        .sum();
    let mut boundary = 0.0;
    let mut sink = 0.0;
    for n in 0..grid.nt {
        let level = field.theta.level(n);
        let (top, bottom) = boundary_fluxes(model, grid, level);
        boundary += wt[n] * (top - bottom);
        let interior: f64 = level[1..grid.nz - 1].iter().map(|&v| model.node(v).0.sink).sum();
        sink += wt[n] * dz * interior;
    }
    (storage - boundary - sink).abs() / storage.abs().max(1e-12)
}
