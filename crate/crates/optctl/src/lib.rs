//! Scenario configuration, batch runs and file output for the irrigation
//! control problem solved by `richards-core`.
//!
//! ```no_run
//! let scenario = richards_optctl::builtin_scenario("haverkamp-ex1").unwrap();
//! let bundle = richards_optctl::run(&scenario, "out/ex1".as_ref()).unwrap();
//! println!("{:?}", bundle.report.exit_reason);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

pub mod check;
pub mod output;
pub mod run;
pub mod scenario;

pub use check::{gradient_check, GradientCheck, GradientCheckOptions};
pub use output::{FieldLayout, OutputBundle, Report};
pub use run::{run, run_with, solve, thread_cap, THREADS_ENV};
pub use scenario::{builtin_scenario, load_scenario, parse_scenario, Overrides, Scenario, ScenarioDocument, BUILTIN_NAMES};

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("unknown scenario `{0}` (built-ins: haverkamp-ex1, haverkamp-ex2, berino-ex3, glendale-ex4)")]
    UnknownScenario(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid scenario:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("solver failure: {0}")]
    Solver(#[from] richards_core::Error),
}

impl AppError {
    /// 1 for bad input, 2 for solver and output failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::UnknownScenario(_) | AppError::Schema(_) | AppError::Validation(_) | AppError::Read { .. } => 1,
            AppError::Write { .. } | AppError::Solver(_) => 2,
        }
    }
}
