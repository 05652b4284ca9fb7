//! Cost functional, admissible box, step search and projected gradient
//! descent.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::adjoint::AdjointField;
use crate::forward::{ForwardSettings, StateField};
use crate::model::FlowModel;
use crate::problem::ControlProblem;
use crate::soil::SoilModel;
use crate::{Error, Result};

/// Control values `u[n]`, one per time level of the state grid.
pub type ControlSignal = Vec<f64>;

/// Closed box `[lower, upper]` for every control value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibleSet {
    pub lower: f64,
    pub upper: f64,
}

impl AdmissibleSet {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower < upper {
            Ok(Self { lower, upper })
        } else {
            Err(Error::InvalidParameter(alloc::format!("admissible set needs lower < upper, got [{lower}, {upper}]")))
        }
    }

    /// `[0, θ_S − θ_r − margin]`.
    pub fn for_soil(soil: &SoilModel, margin: f64) -> Result<Self> {
        Self::new(0.0, soil.theta_s() - soil.theta_r() - margin)
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.iter().all(|&v| v >= self.lower && v <= self.upper)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchConfig {
    /// Reduced-cost evaluations per search.
    pub budget: usize,
}

impl Default for LineSearchConfig {
    fn default() -> Self {
        Self { budget: 20 }
    }
}

/// Optimizer settings. `lambda`, `epsilon` and `picard` are consumed when a
/// problem is built; [`pgd`] itself reads `maxit`, `tol` and `linesearch`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgdConfig {
    pub maxit: usize,
    pub tol: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub picard: ForwardSettings,
    pub linesearch: LineSearchConfig,
}

impl Default for PgdConfig {
    fn default() -> Self {
        Self {
            maxit: 100,
            tol: 1e-5,
            lambda: 0.1,
            epsilon: 1e-3,
            picard: ForwardSettings::default(),
            linesearch: LineSearchConfig::default(),
        }
    }
}

impl PgdConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.into()));
        if self.maxit < 1 {
            return bad("maxit must be >= 1");
        }
        if !(self.tol > 0.0) {
            return bad("tol must be > 0");
        }
        if !(self.lambda > 0.0) {
            return bad("lambda must be > 0");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be > 0");
        }
        if !(self.picard.picard_tol > 0.0) || self.picard.picard_maxit < 1 {
            return bad("picard_tol must be > 0 and picard_maxit >= 1");
        }
        if self.linesearch.budget < 2 {
            return bad("line-search budget must be >= 2");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitReason {
    Tolerance,
    MaxIterations,
    LineSearchStall,
}

impl ExitReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExitReason::Tolerance => "Tolerance",
            ExitReason::MaxIterations => "MaxIterations",
            ExitReason::LineSearchStall => "LineSearchStall",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationReport {
    /// Completed step searches.
    pub iterations: usize,
    /// Cost at the initial control, then after every accepted step.
    pub cost_history: Vec<f64>,
    pub final_control: ControlSignal,
    pub final_state: StateField,
    pub final_adjoint: AdjointField,
    pub final_gradient: Vec<f64>,
    pub exit_reason: ExitReason,
    /// Interior clamp events of the final state.
    pub clamp_events: u64,
    /// `‖u − pr(u − ∇J)‖_∞` at the initial control.
    pub initial_projected_gradient: f64,
    /// Same quantity at the final control.
    pub final_projected_gradient: f64,
}

/// `J = ½∬ tracking² dz dt + (λ/2)∫ u² dt`, trapezoidal in `z` and `t`.
pub fn cost<M: FlowModel>(model: &M, state: &StateField, u: &[f64], lambda: f64) -> f64 {
    let grid = &state.grid;
    let wz = grid.space_weights();
    let wt = grid.time_weights();
    let mut tracking = 0.0;
    for n in 0..grid.nt {
        let level: f64 = state
            .theta
            .level(n)
            .iter()
            .zip(&wz)
            .map(|(&v, w)| {
                let t = model.node(v).0.tracking;
                w * t * t
            })
            .sum();
        tracking += wt[n] * level;
    }
    let control: f64 = u.iter().zip(&wt).map(|(v, w)| w * v * v).sum();
    0.5 * tracking + 0.5 * lambda * control
}

/// `λu + g`.
pub fn gradient(u: &[f64], lambda: f64, boundary_flux: &[f64]) -> Vec<f64> {
    u.iter().zip(boundary_flux).map(|(v, g)| lambda * v + g).collect()
}

pub fn project(u: &[f64], set: &AdmissibleSet) -> ControlSignal {
    u.iter().map(|&v| v.clamp(set.lower, set.upper)).collect()
}

/// `‖u − pr(u − grad)‖_∞`.
pub fn projected_gradient_norm(u: &[f64], grad: &[f64], set: &AdmissibleSet) -> f64 {
    u.iter()
        .zip(grad)
        .map(|(&v, &g)| (v - (v - g).clamp(set.lower, set.upper)).abs())
        .fold(0.0, f64::max)
}

fn stepped(u: &[f64], r: &[f64], s: f64, set: &AdmissibleSet) -> ControlSignal {
    u.iter().zip(r).map(|(&v, &d)| (v + s * d).clamp(set.lower, set.upper)).collect()
}

/// Golden-section search for `min_s J(pr(u + s·r))` on `[0, s_max]`, where
/// `s_max·max|r|` spans the box along the components of `r` that are not
/// blocked by an active bound.
///
/// Returns the best step and its cost. A zero effective direction returns
/// `(0, j_u)` without evaluating. If no evaluated step improves on `j_u`
/// the search fails with [`Error::LineSearchStall`].
pub fn line_search<F>(
    mut reduced_cost: F,
    u: &[f64],
    r: &[f64],
    j_u: f64,
    set: &AdmissibleSet,
    config: &LineSearchConfig,
) -> Result<(f64, f64)>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let reach = u
        .iter()
        .zip(r)
        .filter(|&(&v, &d)| (d > 0.0 && v < set.upper) || (d < 0.0 && v > set.lower))
        .map(|(_, d)| d.abs())
        .fold(0.0, f64::max);
    if reach == 0.0 {
        return Ok((0.0, j_u));
    }
    let s_max = (set.upper - set.lower) / reach;
    let ratio = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut eval = |s: f64| reduced_cost(&stepped(u, r, s, set));

    let (mut a, mut b) = (0.0, s_max);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    let mut evaluations = 2;
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    while evaluations < config.budget {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = eval(x1)?;
            if f1 < best.1 {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = eval(x2)?;
            if f2 < best.1 {
                best = (x2, f2);
            }
        }
        evaluations += 1;
    }
    if best.1 < j_u {
        Ok(best)
    } else {
        Err(Error::LineSearchStall { evaluations })
    }
}

fn in_iteration(iteration: usize) -> impl FnOnce(Error) -> Error {
    move |e| Error::Iteration { iteration, source: Box::new(e) }
}

/// Projected gradient descent from `u0` (projected first).
///
/// Every iteration takes the steepest-descent direction `r = −∇J`, picks
/// the step by [`line_search`], and moves to `pr(u + s·r)`. The loop stops
/// when the accepted step changes the cost by less than `config.tol`, when
/// the step search stalls, or after `config.maxit` iterations.
pub fn pgd<M: FlowModel>(problem: &ControlProblem<M>, config: &PgdConfig, u0: &[f64]) -> Result<OptimizationReport> {
    config.validate()?;
    let set = problem.admissible;
    let mut u = project(u0, &set);
    let mut current = problem.evaluate(&u).map_err(in_iteration(0))?;
    let mut cost_history = alloc::vec![current.cost];
    let initial_projected_gradient = projected_gradient_norm(&u, &current.gradient, &set);
    let mut iterations = 0;
    let mut exit_reason = ExitReason::MaxIterations;

    while iterations < config.maxit {
        iterations += 1;
        let r: Vec<f64> = current.gradient.iter().map(|g| -g).collect();
        let searched = line_search(|v| problem.reduced_cost(v), &u, &r, current.cost, &set, &config.linesearch);
        let (s, j_new) = match searched {
            Ok(found) => found,
            Err(Error::LineSearchStall { .. }) => {
                exit_reason = ExitReason::LineSearchStall;
                break;
            }
            Err(e) => return Err(in_iteration(iterations)(e)),
        };
        let change = (j_new - current.cost).abs();
        if s > 0.0 {
            u = stepped(&u, &r, s, &set);
            current = problem.evaluate(&u).map_err(in_iteration(iterations))?;
            cost_history.push(current.cost);
        }
        if change < config.tol {
            exit_reason = ExitReason::Tolerance;
            break;
        }
    }

    let final_projected_gradient = projected_gradient_norm(&u, &current.gradient, &set);
    Ok(OptimizationReport {
        iterations,
        cost_history,
        clamp_events: current.state.total_clamp_events(),
        final_control: u,
        final_state: current.state,
        final_adjoint: current.adjoint,
        final_gradient: current.gradient,
        exit_reason,
        initial_projected_gradient,
        final_projected_gradient,
    })
}
