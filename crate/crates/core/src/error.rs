use alloc::string::String;

use crate::soil::ValidityReport;

/// Errors raised by the constitutive models, solvers and optimizer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("pressure head {0} cm is positive; only the unsaturated regime (h <= 0) is modelled")]
    PositiveHead(f64),
    #[error("pressure head {0} cm is singular for this function (requires h < 0)")]
    SingularHead(f64),
    #[error("water content {value} outside the admissible interval ({lower}, {upper})")]
    WaterContentOutOfRange { value: f64, lower: f64, upper: f64 },
    #[error("soil parameters are not quasi-unsaturated admissible: {0}")]
    InadmissibleSoil(ValidityReport),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid boundary data at time level {level}: {value} not in [{lower}, {upper})")]
    InvalidBoundary { level: usize, value: f64, lower: f64, upper: f64 },
    #[error("invalid initial condition at node {node}: {value}")]
    InvalidInitialCondition { node: usize, value: f64 },
    #[error("Picard iteration did not converge at time level {level}: last update {update:e} after {iterations} iterations")]
    PicardDivergence { level: usize, update: f64, iterations: usize },
    #[error("line search exhausted {evaluations} cost evaluations without improvement")]
    LineSearchStall { evaluations: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("PGD iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}
