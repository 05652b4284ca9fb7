//! Finite-difference check of the adjoint gradient.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scenario::Scenario;
use crate::AppError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheckOptions {
    pub directions: usize,
    /// Central-difference step.
    pub step: f64,
    /// Uniform control value the gradient is checked at.
    pub base: f64,
    pub seed: u64,
    pub threads: usize,
}

impl Default for GradientCheckOptions {
    fn default() -> Self {
        Self { directions: 5, step: 1e-5, base: 0.01, seed: 0, threads: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientCheck {
    /// `⟨∇J, d⟩` in `L²(0,T)` per direction.
    pub adjoint: Vec<f64>,
    /// `(J(u + hd) − J(u − hd))/2h` per direction.
    pub finite_difference: Vec<f64>,
    pub relative_errors: Vec<f64>,
}

impl GradientCheck {
    pub fn max_relative_error(&self) -> f64 {
        self.relative_errors.iter().copied().fold(0.0, f64::max)
    }
}

/// Compares directional derivatives of the adjoint gradient with central
/// differences of the reduced cost along random directions with entries in
/// `[−½, ½]`.
pub fn gradient_check(scenario: &Scenario, opts: &GradientCheckOptions) -> Result<GradientCheck, AppError> {
    let problem = scenario.problem()?;
    let set = problem.admissible;
    let h = opts.step;
    if !(opts.base - 0.5 * h >= set.lower && opts.base + 0.5 * h <= set.upper) {
        return Err(AppError::Validation(vec![format!(
            "gradient check base {} must leave room for the step inside [{}, {}]",
            opts.base, set.lower, set.upper
        )]));
    }
    let nt = problem.grid.nt;
    let u = vec![opts.base; nt];
    let eval = problem.evaluate(&u)?;
    let wt = problem.grid.time_weights();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let directions: Vec<Vec<f64>> =
        (0..opts.directions).map(|_| (0..nt).map(|_| rng.gen_range(-0.5..=0.5)).collect()).collect();

    let mut points = Vec::with_capacity(2 * directions.len());
    for d in &directions {
        for sign in [1.0, -1.0] {
            points.push(u.iter().zip(d).map(|(a, b)| a + sign * h * b).collect::<Vec<f64>>());
        }
    }
    let mut costs = Vec::with_capacity(points.len());
    for chunk in points.chunks(opts.threads.max(1)) {
        let batch: Vec<_> = std::thread::scope(|s| {
            let handles: Vec<_> = chunk.iter().map(|v| s.spawn(|| problem.reduced_cost(v))).collect();
            handles.into_iter().map(|h| h.join().expect("cost evaluation panicked")).collect()
        });
        for c in batch {
            costs.push(c?);
        }
    }

    let adjoint: Vec<f64> =
        directions.iter().map(|d| eval.gradient.iter().zip(d).zip(&wt).map(|((g, d), w)| g * d * w).sum()).collect();
    let finite_difference: Vec<f64> = costs.chunks(2).map(|c| (c[0] - c[1]) / (2.0 * h)).collect();
    let relative_errors =
        adjoint.iter().zip(&finite_difference).map(|(a, f)| (a - f).abs() / f.abs().max(f64::MIN_POSITIVE)).collect();
    Ok(GradientCheck { adjoint, finite_difference, relative_errors })
}
