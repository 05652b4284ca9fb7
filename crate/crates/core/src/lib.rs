//! Optimal boundary control of moisture content in unsaturated soil.
//!
//! The crate solves the one-dimensional quasi-unsaturated Richards equation
//! in water-content form
//!
//! ```text
//! ∂θ/∂t − ∂/∂z(β_ε(θ) ∂θ/∂z) + ∂K(θ)/∂z = f(θ)     in (0, Z) × (0, T)
//! θ(0, t) = θ_r + u(t),   θ(Z, t) = g(t),   θ(z, 0) = θ₀(z)
//! ```
//!
//! together with its discrete adjoint, and minimises the tracking cost
//!
//! ```text
//! J(u) = ½ ∬ (f(θ) − 1)² dz dt + λ/2 ∫ u² dt
//! ```
//!
//! over box-constrained top-boundary controls with projected gradient
//! descent.
//!
//! The crate is `no_std` (it needs `alloc`). IO, configuration and the CLI
//! live in the `richards-optctl` crate.
//!
//! Module map:
//!
//! * [`soil`]: Haverkamp and Van Genuchten–Mualem constitutive relations.
//! * [`uptake`]: Feddes root-water uptake and the adjoint source term.
//! * [`model`]: the pointwise coefficient interface used by the solvers.
//! * [`forward`]: implicit Euler / Picard state solver.
//! * [`adjoint`]: backward adjoint solver and control sensitivities.
//! * [`problem`]: initial/boundary data and the reduced cost map `u ↦ J(u)`.
//! * [`optim`]: cost, projection, golden-section step search, PGD.
#![cfg_attr(not(test), no_std)]
// NaN parameters must fail the range checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod adjoint;
pub mod error;
pub mod forward;
pub mod grid;
pub mod model;
pub mod optim;
pub mod problem;
pub mod soil;
pub mod tridiag;
pub mod uptake;

mod math;

pub use adjoint::{boundary_flux_gradient, control_sensitivity, solve_adjoint, solve_adjoint_with_source, AdjointField};
pub use error::Error;
pub use forward::{mass_balance_residual, solve_forward, BoundaryData, ForwardSettings, StateField};
pub use grid::{Grid1D, SpaceTimeField};
pub use model::{FlowModel, FrozenModel, NodeCoefficients, RichardsModel, TrackingTarget};
pub use optim::{
    cost, gradient, line_search, pgd, project, AdmissibleSet, ControlSignal, ExitReason, LineSearchConfig,
    OptimizationReport, PgdConfig, projected_gradient_norm,
};
pub use problem::{BottomBoundary, ControlProblem, Evaluation, InitialProfile};
pub use soil::{DiffusivityRegularization, HaverkampSoil, SoilModel, ValidityReport, VanGenuchtenSoil};
pub use uptake::FeddesUptake;

pub type Result<T, E = Error> = core::result::Result<T, E>;
