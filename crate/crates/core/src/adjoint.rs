//! Backward adjoint of the discrete state equation.
//!
//! The adjoint is the exact transpose of the implicit-Euler state scheme
//! linearised around a solved trajectory, so the gradient it yields is the
//! gradient of the discrete reduced cost. Write one state step as
//! `(θⁿ − θⁿ⁻¹)/dt = N(θⁿ)` and `A = ∂N/∂θ` at level `n`. Stored level `m`
//! holds the multiplier of the step that produces level `m + 1`:
//!
//! ```text
//! (I/dt − Aᵀ) p^m = p^{m+1}/dt + (w_{m+1}/dt) S^{m+1},    p^{Nt−1} = 0
//! ```
//!
//! where `S` is the pointwise derivative of the cost integrand and `w` are
//! the trapezoidal time weights. In reversed time this is an implicit-Euler
//! step of `−p_t − β p_zz − K'(θ) p_z = S + …`, the continuous adjoint.
//! Boundary rows are zero.

use alloc::vec;
use alloc::vec::Vec;

use crate::forward::StateField;
use crate::grid::{Grid1D, SpaceTimeField};
use crate::model::{FlowModel, NodeCoefficients};
use crate::{tridiag, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AdjointField {
    pub grid: Grid1D,
    pub p: SpaceTimeField,
    /// Smallest row diagonal-dominance margin over all backward steps.
    pub dominance_margin: f64,
}

/// Rows of `∂N/∂θ` for the interior nodes of one level:
/// `(∂N_i/∂θ_{i−1}, ∂N_i/∂θ_i, ∂N_i/∂θ_{i+1})` for `i = 1..nz−1`.
pub(crate) fn jacobian_rows(level: &[f64], c: &[NodeCoefficients], dz: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let nz = level.len();
    let inv = 1.0 / (dz * dz);
    let mut sub = Vec::with_capacity(nz - 2);
    let mut diag = Vec::with_capacity(nz - 2);
    let mut sup = Vec::with_capacity(nz - 2);
    for i in 1..nz - 1 {
        let bw = 0.5 * (c[i - 1].diffusivity + c[i].diffusivity);
        let be = 0.5 * (c[i].diffusivity + c[i + 1].diffusivity);
        let dw = level[i] - level[i - 1];
        let de = level[i + 1] - level[i];
        sub.push((bw - 0.5 * c[i - 1].diffusivity_slope * dw) * inv + c[i - 1].conductivity_slope / dz);
        diag.push(
            (-be - bw + 0.5 * c[i].diffusivity_slope * (de - dw)) * inv - c[i].conductivity_slope / dz
                + c[i].sink_slope,
        );
        sup.push((be + 0.5 * c[i + 1].diffusivity_slope * de) * inv);
    }
    (sub, diag, sup)
}

pub(crate) fn coefficients<M: FlowModel>(model: &M, level: &[f64]) -> Vec<NodeCoefficients> {
    level.iter().map(|&v| model.node(v).0).collect()
}

/// Adjoint driven by the tracking term `½·tracking²` of the cost.
pub fn solve_adjoint<M: FlowModel>(model: &M, state: &StateField) -> Result<AdjointField> {
    let source = SpaceTimeField::from_fn(&state.grid, |i, n| {
        let c = model.node(state.theta.at(i, n)).0;
        c.tracking * c.tracking_slope
    });
    solve_adjoint_with_source(model, state, &source)
}

/// Adjoint with a prescribed source `S` (same grid as the state).
pub fn solve_adjoint_with_source<M: FlowModel>(
    model: &M,
    state: &StateField,
    source: &SpaceTimeField,
) -> Result<AdjointField> {
    let grid = state.grid;
    if source.nz() != grid.nz || source.nt() != grid.nt {
        return Err(Error::LengthMismatch { expected: grid.nz * grid.nt, actual: source.nz() * source.nt() });
    }
    let (nz, nt) = (grid.nz, grid.nt);
    let (dz, dt) = (grid.dz(), grid.dt());
    let wt = grid.time_weights();
    let m = nz - 2;
    let mut p = SpaceTimeField::zeros(&grid);
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    let mut scratch = vec![0.0; m];
    let mut dominance_margin = f64::INFINITY;

    for s in (1..nt).rev() {
        let level = state.theta.level(s);
        let c = coefficients(model, level);
        let (sub, a_diag, sup) = jacobian_rows(level, &c, dz);
        for k in 0..m {
            diag[k] = 1.0 / dt - a_diag[k];
            lower[k] = if k > 0 { -sup[k - 1] } else { 0.0 };
            upper[k] = if k + 1 < m { -sub[k + 1] } else { 0.0 };
            rhs[k] = p.at(k + 1, s) / dt + wt[s] / dt * source.at(k + 1, s);
        }
        dominance_margin = dominance_margin.min(tridiag::dominance_margin(&lower, &diag, &upper));
        tridiag::solve_in_place(&lower, &diag, &upper, &mut rhs, &mut scratch);
        p.level_mut(s - 1)[1..nz - 1].copy_from_slice(&rhs);
    }
    Ok(AdjointField { grid, p, dominance_margin })
}

/// Diagnostic boundary fluxes `β(θ*) ∂p/∂z` per time level, at the top
/// (`p₁`) and with reversed sign at the bottom (`p₂`), from second-order
/// one-sided differences.
pub fn boundary_flux_gradient<M: FlowModel>(
    model: &M,
    state: &StateField,
    adjoint: &AdjointField,
) -> (Vec<f64>, Vec<f64>) {
    let grid = &state.grid;
    let (nz, dz) = (grid.nz, grid.dz());
    let mut top = Vec::with_capacity(grid.nt);
    let mut bottom = Vec::with_capacity(grid.nt);
    for n in 0..grid.nt {
        let p = adjoint.p.level(n);
        let theta = state.theta.level(n);
        let b0 = model.node(theta[0]).0.diffusivity;
        let bz = model.node(theta[nz - 1]).0.diffusivity;
        top.push(b0 * (-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * dz));
        bottom.push(-bz * (3.0 * p[nz - 1] - 4.0 * p[nz - 2] + p[nz - 3]) / (2.0 * dz));
    }
    (top, bottom)
}

/// `L²(0,T)` density of the derivative of the tracking cost with respect
/// to the top boundary value, per time level.
///
/// `initial_sensitivity[j]` is `∂θ⁰_j/∂θ_top(0)`; the initial level is the
/// only one through which the first control value acts.
pub fn control_sensitivity<M: FlowModel>(
    model: &M,
    state: &StateField,
    adjoint: &AdjointField,
    initial_sensitivity: &[f64],
) -> Result<Vec<f64>> {
    let grid = &state.grid;
    if initial_sensitivity.len() != grid.nz {
        return Err(Error::LengthMismatch { expected: grid.nz, actual: initial_sensitivity.len() });
    }
    let (dz, dt) = (grid.dz(), grid.dt());
    let wz = grid.space_weights();
    let wt = grid.time_weights();
    let mut g = Vec::with_capacity(grid.nt);

    let level = state.theta.level(0);
    let p0 = adjoint.p.level(0);
    let mut first = 0.0;
    for (j, &sens) in initial_sensitivity.iter().enumerate() {
        if sens != 0.0 {
            let c = model.node(level[j]).0;
            first += wz[j] * (wt[0] * c.tracking * c.tracking_slope + p0[j]) * sens;
        }
    }
    g.push(first / wt[0]);

    for n in 1..grid.nt {
        let level = state.theta.level(n);
        let (c0, _) = model.node(level[0]);
        let (c1, _) = model.node(level[1]);
        let bw = 0.5 * (c0.diffusivity + c1.diffusivity);
        let dn1 = (bw - 0.5 * c0.diffusivity_slope * (level[1] - level[0])) / (dz * dz) + c0.conductivity_slope / dz;
        let direct = wt[n] * wz[0] * c0.tracking * c0.tracking_slope;
        let through_state = dt * wz[1] * adjoint.p.at(1, n - 1) * dn1;
        g.push((direct + through_state) / wt[n]);
    }
    Ok(g)
}
