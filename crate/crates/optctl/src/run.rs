//! End-to-end runs of a scenario.

use std::path::Path;
use std::time::Instant;

use richards_core::{mass_balance_residual, pgd};

use crate::output::{Diagnostics, FieldLayout, OutputBundle, Report, SolverSettings};
use crate::scenario::Scenario;
use crate::AppError;

/// Caps the number of scenarios run concurrently.
pub const THREADS_ENV: &str = "RICHARDS_OPTCTL_THREADS";

/// Value of [`THREADS_ENV`], at least 1; 1 when unset or unparsable.
pub fn thread_cap() -> usize {
    std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()).filter(|&n: &usize| n >= 1).unwrap_or(1)
}

/// Runs projected gradient descent from the scenario's initial control.
pub fn solve(scenario: &Scenario) -> Result<OutputBundle, AppError> {
    let start = Instant::now();
    let problem = scenario.problem()?;
    let report = pgd(&problem, &scenario.pgd, &scenario.initial_control())?;
    let wall_time_seconds = start.elapsed().as_secs_f64();

    let state = &report.final_state;
    let grid = scenario.grid;
    let p = &scenario.pgd;
    let diagnostics = Diagnostics {
        initial_projected_gradient: report.initial_projected_gradient,
        final_projected_gradient: report.final_projected_gradient,
        mass_balance_residual: mass_balance_residual(&problem.model, state),
        saturation_breaches: state.saturation_breaches,
        max_picard_iterations: state.picard_iterations.iter().copied().max().unwrap_or(0),
        theta_min: state.theta.min(),
        theta_max: state.theta.max(),
        adjoint_dominance_margin: report.final_adjoint.dominance_margin,
    };
    let meta = Report {
        scenario: scenario.to_document(),
        iterations: report.iterations,
        exit_reason: report.exit_reason.as_str().to_string(),
        cost_history: report.cost_history.clone(),
        clamp_events: report.clamp_events,
        wall_time_seconds,
        solver_settings: SolverSettings {
            nz: grid.nz,
            nt: grid.nt,
            maxit: p.maxit,
            tol: p.tol,
            lambda: p.lambda,
            epsilon: p.epsilon,
            picard_tol: p.picard.picard_tol,
            picard_maxit: p.picard.picard_maxit,
            linesearch_budget: p.linesearch.budget,
        },
        diagnostics,
    };
    Ok(OutputBundle {
        grid,
        mean_theta: state.theta.depth_average(&grid),
        theta_field: report.final_state.theta,
        adjoint_field: report.final_adjoint.p,
        control: report.final_control,
        cost_history: report.cost_history,
        report: meta,
    })
}

pub fn run(scenario: &Scenario, out_dir: &Path) -> Result<OutputBundle, AppError> {
    run_with(scenario, out_dir, FieldLayout::Long)
}

pub fn run_with(scenario: &Scenario, out_dir: &Path, layout: FieldLayout) -> Result<OutputBundle, AppError> {
    let bundle = solve(scenario)?;
    bundle.write(out_dir, layout)?;
    Ok(bundle)
}

/// Runs independent scenarios, at most `threads` at a time, each into its
/// own directory. Results keep the input order.
pub fn run_many(
    jobs: &[(Scenario, std::path::PathBuf)],
    layout: FieldLayout,
    threads: usize,
) -> Vec<Result<OutputBundle, AppError>> {
    let mut results = Vec::with_capacity(jobs.len());
    for chunk in jobs.chunks(threads.max(1)) {
        std::thread::scope(|s| {
            let handles: Vec<_> =
                chunk.iter().map(|(sc, dir)| s.spawn(move || run_with(sc, dir, layout))).collect();
            results.extend(handles.into_iter().map(|h| h.join().expect("scenario thread panicked")));
        });
    }
    results
}
