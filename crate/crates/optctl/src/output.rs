//! Plot-ready CSV tables and the run report.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use richards_core::{Grid1D, SpaceTimeField};
use serde::{Deserialize, Serialize};

use crate::scenario::ScenarioDocument;
use crate::AppError;

/// How space-time fields are laid out in CSV.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum FieldLayout {
    /// One `z,t,value` row per node.
    #[default]
    Long,
    /// One row per depth, one column per time level.
    Wide,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub nz: usize,
    pub nt: usize,
    pub maxit: usize,
    pub tol: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub picard_tol: f64,
    pub picard_maxit: usize,
    pub linesearch_budget: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub initial_projected_gradient: f64,
    pub final_projected_gradient: f64,
    pub mass_balance_residual: f64,
    pub saturation_breaches: usize,
    pub max_picard_iterations: u32,
    pub theta_min: f64,
    pub theta_max: f64,
    pub adjoint_dominance_margin: f64,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: ScenarioDocument,
    pub iterations: usize,
    pub exit_reason: String,
    pub cost_history: Vec<f64>,
    pub clamp_events: u64,
    pub wall_time_seconds: f64,
    pub solver_settings: SolverSettings,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputBundle {
    pub grid: Grid1D,
    pub theta_field: SpaceTimeField,
    pub adjoint_field: SpaceTimeField,
    pub control: Vec<f64>,
    /// Trapezoidal depth average of θ per time level.
    pub mean_theta: Vec<f64>,
    pub cost_history: Vec<f64>,
    pub report: Report,
}

pub const FILES: [&str; 6] = ["theta.csv", "adjoint.csv", "control.csv", "mean_theta.csv", "cost_history.csv", "report.json"];

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), AppError> {
    let wrap = |source| AppError::Write { path: path.to_path_buf(), source };
    let mut w = BufWriter::new(File::create(path).map_err(wrap)?);
    body(&mut w).and_then(|_| w.flush()).map_err(wrap)
}

fn write_field(path: &Path, grid: &Grid1D, field: &SpaceTimeField, name: &str, layout: FieldLayout) -> Result<(), AppError> {
    write_file(path, |w| match layout {
        FieldLayout::Long => {
            writeln!(w, "z,t,{name}")?;
            for n in 0..grid.nt {
                let t = num(grid.t(n));
                for (i, v) in field.level(n).iter().enumerate() {
                    writeln!(w, "{},{t},{}", num(grid.z(i)), num(*v))?;
                }
            }
            Ok(())
        }
        FieldLayout::Wide => {
            write!(w, "z")?;
            for n in 0..grid.nt {
                write!(w, ",{}", num(grid.t(n)))?;
            }
            writeln!(w)?;
            for i in 0..grid.nz {
                write!(w, "{}", num(grid.z(i)))?;
                for n in 0..grid.nt {
                    write!(w, ",{}", num(field.at(i, n)))?;
                }
                writeln!(w)?;
            }
            Ok(())
        }
    })
}

fn write_series(path: &Path, header: &str, keys: impl Iterator<Item = String>, values: &[f64]) -> Result<(), AppError> {
    write_file(path, |w| {
        writeln!(w, "{header}")?;
        for (k, v) in keys.zip(values) {
            writeln!(w, "{k},{}", num(*v))?;
        }
        Ok(())
    })
}

impl OutputBundle {
    /// Writes the five CSV tables and `report.json` into `dir`, creating it
    /// if needed.
    pub fn write(&self, dir: &Path, layout: FieldLayout) -> Result<(), AppError> {
        fs::create_dir_all(dir).map_err(|source| AppError::Write { path: dir.to_path_buf(), source })?;
        let g = &self.grid;
        write_field(&dir.join("theta.csv"), g, &self.theta_field, "theta", layout)?;
        write_field(&dir.join("adjoint.csv"), g, &self.adjoint_field, "p", layout)?;
        let times = || (0..g.nt).map(|n| num(g.t(n)));
        write_series(&dir.join("control.csv"), "t,u", times(), &self.control)?;
        write_series(&dir.join("mean_theta.csv"), "t,mean_theta", times(), &self.mean_theta)?;
        write_series(&dir.join("cost_history.csv"), "iteration,cost", (0..).map(|k: usize| k.to_string()), &self.cost_history)?;
        let path = dir.join("report.json");
        write_file(&path, |w| {
            serde_json::to_writer_pretty(&mut *w, &self.report).map_err(std::io::Error::other)?;
            writeln!(w)
        })
    }
}
